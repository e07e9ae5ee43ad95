// Orlicz growth functions G(t) = integral of g over [0, t] with power-law
// pinch delta0 <= t g'(t)/g(t) <= g0, absorption nonlinearities F with
// 1+theta0 <= t F'(t)/F(t) <= 1+f0, their Young conjugates, and the catalog
// of named families addressable as "family:param,param" strings.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fbl/quadrature.hpp"

namespace fbl {

// Base class owns the label, the claimed exponents, and a quadrature-backed
// fallback for G; families with a closed form override G().
class OrliczFunction {
 public:
  OrliczFunction(std::string label, double delta0, double g0);
  virtual ~OrliczFunction() = default;

  virtual double g(double t) const = 0;        // t >= 0, g(0) = 0
  virtual double g_prime(double t) const = 0;  // t > 0
  virtual double G(double t) const;            // default: cached quadrature of g
  virtual bool has_closed_form_G() const { return false; }

  // Points where g' is only one-sided; ratio checks skip a guard band here.
  virtual std::vector<double> knots() const { return {}; }

  double delta0() const { return delta0_; }
  double g0() const { return g0_; }
  const std::string& label() const { return label_; }

 protected:
  static void require_nonnegative(double t);
  static void require_positive_arg(double t);

 private:
  std::string label_;
  double delta0_;
  double g0_;
  mutable std::unique_ptr<CachedAntiderivative> cached_G_;
  mutable std::mutex init_mutex_;
};

class Nonlinearity {
 public:
  Nonlinearity(std::string label, double theta0, double f0, bool increasing,
               bool f_continuous_at_zero);
  virtual ~Nonlinearity() = default;

  virtual double F(double t) const = 0;  // t >= 0, F(0) = 0
  virtual double f(double t) const = 0;  // t > 0 (t = 0 only if continuous there)

  double theta0() const { return theta0_; }
  double f0() const { return f0_; }
  bool increasing() const { return increasing_; }
  bool f_continuous_at_zero() const { return f_continuous_at_zero_; }
  const std::string& label() const { return label_; }

 private:
  std::string label_;
  double theta0_;
  double f0_;
  bool increasing_;
  bool f_continuous_at_zero_;
};

// Young conjugate: G~'(s) = g^{-1}(s), so ab <= G(a) + G~(b).
class ConjugatePair {
 public:
  explicit ConjugatePair(std::shared_ptr<const OrliczFunction> base);

  double g_inverse(double s) const;  // s >= 0; safeguarded bisection/Newton
  double G_tilde(double s) const;    // cached quadrature of g_inverse

  const OrliczFunction& base() const { return *base_; }

 private:
  std::shared_ptr<const OrliczFunction> base_;
  std::unique_ptr<CachedAntiderivative> cached_Gt_;
};

// Solves g(t) = s by geometric bracket growth plus bisection/Newton to
// 1e-12 relative. Throws std::range_error when the bracket cap overflows.
double invert_g(const OrliczFunction& fn, double s);

// --- catalog -------------------------------------------------------------
// Families: plap(p); loglin; logsum(a,b); tlog(a,b,c,d); tdivlog(a,b,c,d);
// piecewise(a,b,c,p,q,t0); power-F(gamma) for the nonlinearity.
// Parameter constraints are rejected with the violated constraint named.

std::shared_ptr<const OrliczFunction> make_orlicz(const std::string& family,
                                                  const std::vector<double>& params);
std::shared_ptr<const Nonlinearity> make_nonlinearity(const std::string& family,
                                                      const std::vector<double>& params);

// Parses "family:p1,p2,..." (no params allowed, e.g. "loglin").
std::shared_ptr<const OrliczFunction> parse_orlicz(const std::string& catalog_string);
std::shared_ptr<const Nonlinearity> parse_nonlinearity(const std::string& catalog_string);

// Same g, different claimed exponents; lets verification test false claims.
std::shared_ptr<const OrliczFunction> with_claimed_exponents(
    std::shared_ptr<const OrliczFunction> base, double delta0, double g0);

}  // namespace fbl
