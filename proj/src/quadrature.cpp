#include "fbl/quadrature.hpp"

#include <cmath>
#include <algorithm>
#include <stdexcept>
#include <string>

namespace fbl {

namespace {

double effective_tolerance(double tol, double estimate) {
  return tol * std::max(1.0, std::fabs(estimate));
}

struct SimpsonState {
  const std::function<double(double)>& f;
  double tol;
};

// Classic adaptive Simpson with Richardson correction: accept when the
// halved-interval estimate moves by less than 15*tol.
double simpson_recurse(const SimpsonState& s, double a, double b, double fa, double fm,
                       double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = s.f(lm);
  const double frm = s.f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) {
    if (std::fabs(delta) > 15.0 * tol) {
      throw std::runtime_error("adaptive_simpson: depth cap reached on [" +
                               std::to_string(a) + ", " + std::to_string(b) + "]");
    }
    return left + right + delta / 15.0;
  }
  if (std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_recurse(s, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(s, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  SimpsonState s{f, tol};
  return simpson_recurse(s, a, b, fa, fm, fb, whole, effective_tolerance(tol, whole), 48);
}

CachedAntiderivative::CachedAntiderivative(std::function<double(double)> f, double tol)
    : f_(std::move(f)), tol_(tol) {}

double CachedAntiderivative::anchor_value(int k) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = anchors_.find(k);
  if (it != anchors_.end()) return it->second;
  // Fill every missing anchor up to k; each piece integrates one dyadic band.
  double acc;
  int from;
  if (anchors_.empty() || anchors_.begin()->first > kMinExp) {
    acc = adaptive_simpson(f_, 0.0, std::ldexp(1.0, kMinExp), tol_);
    anchors_[kMinExp] = acc;
    from = kMinExp;
  } else {
    auto lo = anchors_.upper_bound(k);
    --lo;  // greatest anchor <= k; exists because kMinExp is present
    from = lo->first;
    acc = lo->second;
  }
  for (int j = from; j < k; ++j) {
    acc += adaptive_simpson(f_, std::ldexp(1.0, j), std::ldexp(1.0, j + 1), tol_);
    anchors_[j + 1] = acc;
  }
  return anchors_.at(k);
}

double CachedAntiderivative::value(double t) const {
  if (t < 0.0) throw std::domain_error("CachedAntiderivative: negative argument");
  if (t == 0.0) return 0.0;
  const int k = std::ilogb(t);
  if (k <= kMinExp) {
    return adaptive_simpson(f_, 0.0, t, tol_);
  }
  const double base = anchor_value(k);
  return base + adaptive_simpson(f_, std::ldexp(1.0, k), t, tol_);
}

}  // namespace fbl
