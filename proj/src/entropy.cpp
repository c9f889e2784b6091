#include "ieppa/entropy.hpp"

#include <cmath>
#include <string>

#include "ieppa/error.hpp"

namespace ieppa {

namespace {

inline double XLogX(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

void CheckPair(const Tensor3& x, const Tensor3& y, const char* what) {
  RequireSameDims(x, y, what);
  for (std::size_t e = 0; e < x.size(); ++e) {
    if (!(x[e] >= 0.0) || !std::isfinite(x[e])) {
      Fail(ErrorKind::kDomain, std::string(what) + ": first argument must be finite and >= 0");
    }
    if (!(y[e] >= kMinPositive) || !std::isfinite(y[e])) {
      Fail(ErrorKind::kDomain, std::string(what) + ": second argument entry " +
                                   std::to_string(e) + " is not in [1e-300, inf)");
    }
  }
}

}  // namespace

double Phi(const Tensor3& x) {
  double s = 0.0;
  for (double v : x.values()) {
    if (!(v >= 0.0)) Fail(ErrorKind::kDomain, "phi: negative entry");
    s += XLogX(v) - v;
  }
  return s;
}

double Bregman(const Tensor3& x, const Tensor3& y) {
  CheckPair(x, y, "bregman");
  double s = 0.0;
  for (std::size_t e = 0; e < x.size(); ++e) {
    const double ly = std::log(y[e]);
    s += (XLogX(x[e]) - x[e]) - (y[e] * ly - y[e]) - ly * (x[e] - y[e]);
  }
  return s;
}

double Kl(const Tensor3& x, const Tensor3& y) {
  CheckPair(x, y, "kl");
  double s = 0.0;
  for (std::size_t e = 0; e < x.size(); ++e) {
    const double xe = x[e];
    const double t = xe == 0.0 ? 0.0 : xe * std::log(xe / y[e]);
    s += t - xe + y[e];
  }
  return s;
}

double BregmanLog(const Tensor3& x, const Tensor3& log_y) {
  RequireSameDims(x, log_y, "bregman_log");
  double s = 0.0;
  for (std::size_t e = 0; e < x.size(); ++e) {
    const double xe = x[e];
    const double ly = log_y[e];
    if (!(xe >= 0.0)) Fail(ErrorKind::kDomain, "bregman_log: negative entry");
    if (std::isnan(ly) || ly == kInf) Fail(ErrorKind::kDomain, "bregman_log: bad log entry");
    const double ye = std::exp(ly);
    if (xe == 0.0) {
      s += ye;
    } else if (ly == -kInf) {
      return kInf;
    } else {
      s += xe * (std::log(xe) - ly) - xe + ye;
    }
  }
  return s;
}

}  // namespace ieppa
