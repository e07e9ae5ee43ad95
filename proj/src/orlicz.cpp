#include "fbl/orlicz.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fbl {

namespace {

// L(x) = (1+x)ln(1+x) - x. The closed form cancels catastrophically for
// small x (L ~ x^2/2), so below 0.5 the alternating series
// sum_{k>=2} (-1)^k x^k / (k(k-1)) is summed to machine precision.
double stable_L(double x) {
  if (x < 0.5) {
    double term = 0.5 * x * x;  // k = 2
    double sum = term;
    for (int k = 3; k < 80; ++k) {
      term *= -x * (k - 2) / k;  // ratio of consecutive series terms
      sum += term;
      if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
    }
    return sum;
  }
  return (1.0 + x) * std::log1p(x) - x;
}

// M(x) = integral of L over [0, x]; same small-x treatment (M ~ x^3/6).
double stable_M(double x) {
  if (x < 0.5) {
    double term = x * x * x / 6.0;  // k = 2 term x^{k+1}/(k(k-1)(k+1))
    double sum = term;
    for (int k = 3; k < 80; ++k) {
      term *= -x * (k - 2) / (k + 1.0);
      sum += term;
      if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
    }
    return sum;
  }
  const double w = 1.0 + x;
  return 0.5 * w * w * std::log1p(x) - 0.25 * (w * w - 1.0) - 0.5 * x * x;
}

[[noreturn]] void reject(const std::string& family, const std::string& constraint) {
  throw std::invalid_argument("catalog: " + family + " requires " + constraint);
}

std::string format_label(const std::string& family, const std::vector<double>& params) {
  std::string out = family;
  char buf[32];
  for (size_t i = 0; i < params.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%g", params[i]);
    out += (i == 0 ? ":" : ",");
    out += buf;
  }
  return out;
}

void require_param_count(const std::string& family, const std::vector<double>& p,
                         size_t n) {
  if (p.size() != n) {
    std::ostringstream os;
    os << "catalog: " << family << " takes " << n << " parameter(s), got " << p.size();
    throw std::invalid_argument(os.str());
  }
}

class PowerLaw final : public OrliczFunction {
 public:
  explicit PowerLaw(double p)
      : OrliczFunction(format_label("plap", {p}), p - 1.0, p - 1.0), p_(p) {}
  double g(double t) const override {
    require_nonnegative(t);
    return p_ * std::pow(t, p_ - 1.0);
  }
  double g_prime(double t) const override {
    require_positive_arg(t);
    return p_ * (p_ - 1.0) * std::pow(t, p_ - 2.0);
  }
  double G(double t) const override {
    require_nonnegative(t);
    return std::pow(t, p_);
  }
  bool has_closed_form_G() const override { return true; }

 private:
  double p_;
};

class LogLinear final : public OrliczFunction {
 public:
  LogLinear() : OrliczFunction("loglin", 1.0, 2.0) {}
  double g(double t) const override {
    require_nonnegative(t);
    return stable_L(t);
  }
  double g_prime(double t) const override {
    require_positive_arg(t);
    return std::log1p(t);
  }
  double G(double t) const override {
    require_nonnegative(t);
    return stable_M(t);
  }
  bool has_closed_form_G() const override { return true; }
};

class LogSum final : public OrliczFunction {
 public:
  LogSum(double a, double b)
      : OrliczFunction(format_label("logsum", {a, b}), b / (a + b), (a + b) / b),
        a_(a),
        b_(b) {}
  double g(double t) const override {
    require_nonnegative(t);
    return std::log1p(a_ * t) + b_ * t;
  }
  double g_prime(double t) const override {
    require_positive_arg(t);
    return a_ / (1.0 + a_ * t) + b_;
  }
  double G(double t) const override {
    require_nonnegative(t);
    return stable_L(a_ * t) / a_ + 0.5 * b_ * t * t;
  }
  bool has_closed_form_G() const override { return true; }

 private:
  double a_, b_;
};

// g(t) = t^a * log_c(bt + d); no closed-form G, quadrature fallback.
class PowerLog final : public OrliczFunction {
 public:
  PowerLog(double a, double b, double c, double d)
      : OrliczFunction(format_label("tlog", {a, b, c, d}), a, a + 1.0 / std::log(d)),
        a_(a), b_(b), d_(d),
        inv_ln_c_(1.0 / std::log(c)) {}
  double g(double t) const override {
    require_nonnegative(t);
    if (t == 0.0) return 0.0;
    return std::pow(t, a_) * std::log(b_ * t + d_) * inv_ln_c_;
  }
  double g_prime(double t) const override {
    require_positive_arg(t);
    return (a_ * std::pow(t, a_ - 1.0) * std::log(b_ * t + d_) +
            std::pow(t, a_) * b_ / (b_ * t + d_)) *
           inv_ln_c_;
  }

 private:
  double a_, b_, d_, inv_ln_c_;
};

// g(t) = t^a / log_c(bt + d); no closed-form G, quadrature fallback.
class PowerOverLog final : public OrliczFunction {
 public:
  PowerOverLog(double a, double b, double c, double d)
      : OrliczFunction(format_label("tdivlog", {a, b, c, d}), a - 1.0 / std::log(d), a),
        a_(a), b_(b), d_(d),
        ln_c_(std::log(c)) {}
  double g(double t) const override {
    require_nonnegative(t);
    if (t == 0.0) return 0.0;
    return std::pow(t, a_) * ln_c_ / std::log(b_ * t + d_);
  }
  double g_prime(double t) const override {
    require_positive_arg(t);
    const double ln = std::log(b_ * t + d_);
    return ln_c_ * (a_ * std::pow(t, a_ - 1.0) / ln -
                    std::pow(t, a_) * b_ / ((b_ * t + d_) * ln * ln));
  }

 private:
  double a_, b_, d_, ln_c_;
};

// g(t) = a t^p below the knot t0, b t^q + c above; the parameters must make
// g continuous and C^1 at t0, which the catalog constructor verifies.
class PiecewisePower final : public OrliczFunction {
 public:
  PiecewisePower(double a, double b, double c, double p, double q, double t0)
      : OrliczFunction(format_label("piecewise", {a, b, c, p, q, t0}), std::min(p, q), std::max(p, q)),
        a_(a), b_(b), c_(c), p_(p), q_(q), t0_(t0),
        G_at_knot_(a * std::pow(t0, p + 1.0) / (p + 1.0)) {}
  double g(double t) const override {
    require_nonnegative(t);
    if (t < t0_) return a_ * std::pow(t, p_);
    return b_ * std::pow(t, q_) + c_;
  }
  double g_prime(double t) const override {
    require_positive_arg(t);
    if (t < t0_) return a_ * p_ * std::pow(t, p_ - 1.0);
    return b_ * q_ * std::pow(t, q_ - 1.0);
  }
  double G(double t) const override {
    require_nonnegative(t);
    if (t < t0_) return a_ * std::pow(t, p_ + 1.0) / (p_ + 1.0);
    return G_at_knot_ + b_ * (std::pow(t, q_ + 1.0) - std::pow(t0_, q_ + 1.0)) / (q_ + 1.0) +
           c_ * (t - t0_);
  }
  bool has_closed_form_G() const override { return true; }
  std::vector<double> knots() const override { return {t0_}; }

 private:
  double a_, b_, c_, p_, q_, t0_;
  double G_at_knot_;
};

class PowerNonlinearity final : public Nonlinearity {
 public:
  explicit PowerNonlinearity(double gamma)
      : Nonlinearity(format_label("power-F", {gamma}), gamma - 1.0, gamma - 1.0,
                     /*increasing=*/gamma >= 1.0,
                     /*f_continuous_at_zero=*/gamma >= 1.0),
        gamma_(gamma) {}
  double F(double t) const override {
    if (t < 0.0) throw std::domain_error("Nonlinearity: negative argument");
    return std::pow(t, gamma_);
  }
  double f(double t) const override {
    if (t < 0.0) throw std::domain_error("Nonlinearity: negative argument");
    if (t == 0.0 && !f_continuous_at_zero()) {
      throw std::domain_error("Nonlinearity: f singular at 0 for gamma < 1");
    }
    return gamma_ * std::pow(t, gamma_ - 1.0);
  }

 private:
  double gamma_;
};

std::pair<std::string, std::vector<double>> split_catalog(const std::string& s) {
  const auto colon = s.find(':');
  std::string name = s.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string::npos) {
    std::string rest = s.substr(colon + 1);
    std::istringstream is(rest);
    std::string item;
    while (std::getline(is, item, ',')) {
      size_t used = 0;
      double v = std::stod(item, &used);
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) {
        throw std::invalid_argument("catalog: malformed parameter '" + item + "' in '" + s + "'");
      }
      params.push_back(v);
    }
  }
  return {name, params};
}

bool close_rel(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({std::fabs(a), std::fabs(b), 1e-300});
}

}  // namespace

OrliczFunction::OrliczFunction(std::string label, double delta0, double g0)
    : label_(std::move(label)), delta0_(delta0), g0_(g0) {}

void OrliczFunction::require_nonnegative(double t) {
  if (!(t >= 0.0)) throw std::domain_error("OrliczFunction: negative argument");
}

void OrliczFunction::require_positive_arg(double t) {
  if (!(t > 0.0)) throw std::domain_error("OrliczFunction: g' needs t > 0");
}

double OrliczFunction::G(double t) const {
  require_nonnegative(t);
  {
    std::lock_guard<std::mutex> lock(init_mutex_);
    if (!cached_G_) {
      cached_G_ = std::make_unique<CachedAntiderivative>(
          [this](double s) { return g(s); });
    }
  }
  return cached_G_->value(t);
}

Nonlinearity::Nonlinearity(std::string label, double theta0, double f0, bool increasing,
                           bool f_continuous_at_zero)
    : label_(std::move(label)), theta0_(theta0), f0_(f0), increasing_(increasing),
      f_continuous_at_zero_(f_continuous_at_zero) {}

double invert_g(const OrliczFunction& fn, double s) {
  if (!(s >= 0.0)) throw std::domain_error("invert_g: negative argument");
  if (s == 0.0) return 0.0;
  double hi = 1.0;
  double lo = 0.0;
  if (fn.g(hi) < s) {
    // Geometric bracket growth, capped well inside double range.
    while (fn.g(hi) < s) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e290) {
        throw std::range_error("invert_g: bracket growth cap 1e290 reached for s=" +
                               std::to_string(s));
      }
    }
  }
  // Safeguarded Newton within [lo, hi]; bisection fallback keeps the bracket.
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double gt = fn.g(t);
    if (gt < s) {
      lo = t;
    } else {
      hi = t;
    }
    if (hi - lo <= 1e-13 * hi) break;
    double next = t;
    if (t > 0.0) {
      const double gp = fn.g_prime(t);
      if (std::isfinite(gp) && gp > 0.0) next = t - (gt - s) / gp;
    }
    t = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
  }
  return 0.5 * (lo + hi);
}

ConjugatePair::ConjugatePair(std::shared_ptr<const OrliczFunction> base)
    : base_(std::move(base)),
      cached_Gt_(std::make_unique<CachedAntiderivative>(
          [fn = base_.get()](double s) { return invert_g(*fn, s); })) {}

double ConjugatePair::g_inverse(double s) const { return invert_g(*base_, s); }

double ConjugatePair::G_tilde(double s) const {
  if (!(s >= 0.0)) throw std::domain_error("G_tilde: negative argument");
  return cached_Gt_->value(s);
}

std::shared_ptr<const OrliczFunction> make_orlicz(const std::string& family,
                                                  const std::vector<double>& params) {
  if (family == "plap") {
    require_param_count(family, params, 1);
    if (!(params[0] > 1.0)) reject(family, "p > 1");
    return std::make_shared<PowerLaw>(params[0]);
  }
  if (family == "loglin") {
    require_param_count(family, params, 0);
    return std::make_shared<LogLinear>();
  }
  if (family == "logsum") {
    require_param_count(family, params, 2);
    if (!(params[0] > 0.0)) reject(family, "a > 0");
    if (!(params[1] > 0.0)) reject(family, "b > 0");
    return std::make_shared<LogSum>(params[0], params[1]);
  }
  if (family == "tlog") {
    require_param_count(family, params, 4);
    if (!(params[0] > 0.0)) reject(family, "a > 0");
    if (!(params[1] > 0.0)) reject(family, "b > 0");
    if (!(params[2] > 1.0)) reject(family, "c > 1");
    if (!(params[3] > 1.0)) reject(family, "d > 1");
    return std::make_shared<PowerLog>(params[0], params[1], params[2], params[3]);
  }
  if (family == "tdivlog") {
    require_param_count(family, params, 4);
    if (!(params[1] > 0.0)) reject(family, "b > 0");
    if (!(params[2] > 1.0)) reject(family, "c > 1");
    if (!(params[3] > 1.0)) reject(family, "d > 1");
    if (!(params[0] > 1.0 / std::log(params[3]))) reject(family, "a > 1/ln(d)");
    return std::make_shared<PowerOverLog>(params[0], params[1], params[2], params[3]);
  }
  if (family == "piecewise") {
    require_param_count(family, params, 6);
    const double a = params[0], b = params[1], c = params[2];
    const double p = params[3], q = params[4], t0 = params[5];
    for (double v : params) {
      if (!(v > 0.0)) reject(family, "all of a,b,c,p,q,t0 > 0");
    }
    if (!close_rel(a * std::pow(t0, p), b * std::pow(t0, q) + c, 1e-9)) {
      reject(family, "continuity a*t0^p = b*t0^q + c");
    }
    if (!close_rel(a * p * std::pow(t0, p - 1.0), b * q * std::pow(t0, q - 1.0), 1e-9)) {
      reject(family, "C1 matching a*p*t0^(p-1) = b*q*t0^(q-1)");
    }
    return std::make_shared<PiecewisePower>(a, b, c, p, q, t0);
  }
  throw std::invalid_argument("catalog: unknown family '" + family + "'");
}

std::shared_ptr<const Nonlinearity> make_nonlinearity(const std::string& family,
                                                      const std::vector<double>& params) {
  if (family == "power-F") {
    require_param_count(family, params, 1);
    if (!(params[0] > 0.0)) reject(family, "gamma > 0");
    return std::make_shared<PowerNonlinearity>(params[0]);
  }
  throw std::invalid_argument("catalog: unknown nonlinearity family '" + family + "'");
}

std::shared_ptr<const OrliczFunction> parse_orlicz(const std::string& catalog_string) {
  auto [name, params] = split_catalog(catalog_string);
  return make_orlicz(name, params);
}

std::shared_ptr<const Nonlinearity> parse_nonlinearity(const std::string& catalog_string) {
  auto [name, params] = split_catalog(catalog_string);
  return make_nonlinearity(name, params);
}

namespace {

class ReclaimedExponents final : public OrliczFunction {
 public:
  ReclaimedExponents(std::shared_ptr<const OrliczFunction> base, double delta0, double g0)
      : OrliczFunction(base->label(), delta0, g0), base_(std::move(base)) {}
  double g(double t) const override { return base_->g(t); }
  double g_prime(double t) const override { return base_->g_prime(t); }
  double G(double t) const override { return base_->G(t); }
  bool has_closed_form_G() const override { return base_->has_closed_form_G(); }
  std::vector<double> knots() const override { return base_->knots(); }

 private:
  std::shared_ptr<const OrliczFunction> base_;
};

}  // namespace

std::shared_ptr<const OrliczFunction> with_claimed_exponents(
    std::shared_ptr<const OrliczFunction> base, double delta0, double g0) {
  if (!(delta0 > 0.0) || !(g0 >= delta0))
    throw std::invalid_argument("catalog: claimed exponents need 0 < delta0 <= g0");
  return std::make_shared<ReclaimedExponents>(std::move(base), delta0, g0);
}

}  // namespace fbl
