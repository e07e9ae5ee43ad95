// Adaptive Simpson quadrature and a memoized antiderivative for integrands
// that are evaluated repeatedly on [0, t) prefixes (energy densities, Young
// conjugates). The cache anchors exact prefix integrals at powers of two so
// an evaluation at t only integrates the remainder [2^k, t].
#pragma once

#include <functional>
#include <map>
#include <mutex>

namespace fbl {

// Integrates f over [a, b]. The tolerance is absolute for O(1) integrals and
// degrades to ~1e-12 relative for large ones (double precision headroom);
// see effective_tolerance. Throws std::runtime_error when the recursion
// depth cap is hit before the tolerance is met, naming the subinterval.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12);

// Antiderivative A(t) = integral of f over [0, t] for f >= 0 defined on
// [0, inf). Thread-safe: anchor insertion is mutex-guarded; anchor values
// depend only on the anchor index, so concurrent warm-up is deterministic.
class CachedAntiderivative {
 public:
  explicit CachedAntiderivative(std::function<double(double)> f, double tol = 1e-12);

  double value(double t) const;  // t >= 0

 private:
  double anchor_value(int k) const;  // integral over [0, 2^k], k >= kMinExp

  static constexpr int kMinExp = -40;  // below 2^-40 the prefix is integrated directly

  std::function<double(double)> f_;
  double tol_;
  mutable std::map<int, double> anchors_;
  mutable std::mutex mutex_;
};

}  // namespace fbl
