#pragma once

#include <cstdio>
#include <string>

namespace ccd {

// %.{sig}g with -0 collapsed to 0; used wherever machine output must be
// byte-stable across runs.
inline std::string format_sig(double v, int sig = 15) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", sig, v);
  return buf;
}

inline std::string format_fixed(double v, int prec = 4) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

}  // namespace ccd
