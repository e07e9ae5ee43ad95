#include "fbl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace fbl {

namespace {

constexpr double kTiny = 1e-300;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo * std::exp(uniform01(rng) * std::log(hi / lo));
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out(n);
  const double r = std::log(hi / lo);
  for (int i = 0; i < n; ++i) {
    out[i] = lo * std::exp(r * i / (n - 1.0));
  }
  return out;
}

class Margin {
 public:
  explicit Margin(std::string name) { rep_.property = std::move(name); }

  // Records the inequality lhs <= rhs at sample (t, s).
  void observe(double lhs, double rhs, double t, double s = 0.0) {
    const double denom = std::max({std::fabs(lhs), std::fabs(rhs), kTiny});
    const double margin = (rhs - lhs) / denom;
    ++rep_.samples;
    if (rep_.samples == 1 || margin < rep_.worst_margin) {
      rep_.worst_margin = margin;
      rep_.witness_t = t;
      rep_.witness_s = s;
    }
  }

  PropertyReport finish(double tol) {
    rep_.passed = rep_.samples == 0 || rep_.worst_margin >= -tol;
    return rep_;
  }

 private:
  PropertyReport rep_;
};

// Ratio checks use g', which is only one-sided at family knots.
bool in_knot_band(double t, const std::vector<double>& knots) {
  for (double k : knots) {
    if (std::fabs(t - k) <= 1e-9 * std::max(1.0, k)) return true;
  }
  return false;
}

}  // namespace

std::vector<PropertyReport> verify_structure(const OrliczFunction& fn,
                                             const Nonlinearity* nl,
                                             const SampleSpec& spec) {
  const double d0 = fn.delta0();
  const double g0 = fn.g0();
  const auto knots = fn.knots();
  std::mt19937_64 rng(spec.seed);

  std::vector<double> ts = log_grid(spec.t_lo, spec.t_hi, spec.log_count);
  for (int i = 0; i < spec.random_count; ++i) {
    ts.push_back(log_uniform(rng, spec.t_lo, spec.t_hi));
  }
  std::vector<double> pair_axis = log_grid(spec.t_lo, spec.t_hi, spec.pair_axis);
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(pair_axis.size() * pair_axis.size() + spec.random_count);
  for (double s : pair_axis) {
    for (double t : pair_axis) pairs.emplace_back(s, t);
  }
  for (int i = 0; i < spec.random_count; ++i) {
    pairs.emplace_back(log_uniform(rng, spec.t_lo, spec.t_hi),
                       log_uniform(rng, spec.t_lo, spec.t_hi));
  }

  std::vector<PropertyReport> out;

  {  // (1.1) delta0 <= t g'(t)/g(t) <= g0
    Margin lo("1.1_lower"), hi("1.1_upper");
    for (double t : ts) {
      if (in_knot_band(t, knots)) continue;
      const double r = t * fn.g_prime(t) / fn.g(t);
      lo.observe(d0, r, t);
      hi.observe(r, g0, t);
    }
    out.push_back(lo.finish(spec.tol));
    out.push_back(hi.finish(spec.tol));
  }
  {  // g increasing, g(0) = 0
    Margin m("g_monotone");
    m.observe(fn.g(0.0), 0.0, 0.0);
    for (size_t i = 0; i + 1 < ts.size() && i + 1 < static_cast<size_t>(spec.log_count); ++i) {
      m.observe(fn.g(ts[i]), fn.g(ts[i + 1]), ts[i]);
    }
    out.push_back(m.finish(spec.tol));
  }
  {  // (g1) min/max power comparison for g(st)
    Margin lo("g1_lower"), hi("g1_upper");
    for (auto [s, t] : pairs) {
      const double bound_lo = std::min(std::pow(s, d0), std::pow(s, g0)) * fn.g(t);
      const double bound_hi = std::max(std::pow(s, d0), std::pow(s, g0)) * fn.g(t);
      const double gst = fn.g(s * t);
      lo.observe(bound_lo, gst, t, s);
      hi.observe(gst, bound_hi, t, s);
    }
    out.push_back(lo.finish(spec.tol));
    out.push_back(hi.finish(spec.tol));
  }
  {  // (G2) t g(t)/(1+g0) <= G(t) <= t g(t)
    Margin lo("G2_lower"), hi("G2_upper");
    for (double t : ts) {
      const double tg = t * fn.g(t);
      const double Gt = fn.G(t);
      lo.observe(tg / (1.0 + g0), Gt, t);
      hi.observe(Gt, tg, t);
    }
    out.push_back(lo.finish(spec.tol));
    out.push_back(hi.finish(spec.tol));
  }
  {  // G convex (midpoint inequality) and G(0) = 0
    Margin m("G_convex");
    m.observe(fn.G(0.0), 0.0, 0.0);
    for (auto [s, t] : pairs) {
      m.observe(fn.G(0.5 * (s + t)), 0.5 * (fn.G(s) + fn.G(t)), t, s);
    }
    out.push_back(m.finish(spec.tol));
  }
  {  // (G3) power comparison for G(st)
    Margin lo("G3_lower"), hi("G3_upper");
    for (auto [s, t] : pairs) {
      const double p_lo = std::min(std::pow(s, d0 + 1.0), std::pow(s, g0 + 1.0));
      const double p_hi = std::max(std::pow(s, d0 + 1.0), std::pow(s, g0 + 1.0));
      const double Gt = fn.G(t);
      const double Gst = fn.G(s * t);
      lo.observe(p_lo * Gt / (1.0 + g0), Gst, t, s);
      hi.observe(Gst, (1.0 + g0) * p_hi * Gt, t, s);
    }
    out.push_back(lo.finish(spec.tol));
    out.push_back(hi.finish(spec.tol));
  }
  {  // (G4) G(a+b) <= 2^{g0}(1+g0)(G(a)+G(b))
    Margin m("G4");
    const double c = std::pow(2.0, g0) * (1.0 + g0);
    for (auto [a, b] : pairs) {
      m.observe(fn.G(a + b), c * (fn.G(a) + fn.G(b)), a, b);
    }
    out.push_back(m.finish(spec.tol));
  }
  {  // (G5) the rescaled family G_s keeps the exponent pinch and G_s(1) in
     // [1/(1+g0), 1]; the ratio part is (1.1) at st, the value part is G2 at s.
    Margin lo("G5_ratio_lower"), hi("G5_ratio_upper");
    Margin vlo("G5_value_lower"), vhi("G5_value_upper");
    for (auto [s, t] : pairs) {
      const double st = s * t;
      if (!in_knot_band(st, knots)) {
        const double r = st * fn.g_prime(st) / fn.g(st);
        lo.observe(d0, r, t, s);
        hi.observe(r, g0, t, s);
      }
    }
    for (double s : ts) {
      const double v = fn.G(s) / (s * fn.g(s));
      vlo.observe(1.0 / (1.0 + g0), v, s);
      vhi.observe(v, 1.0, s);
    }
    out.push_back(lo.finish(spec.tol));
    out.push_back(hi.finish(spec.tol));
    out.push_back(vlo.finish(spec.tol));
    out.push_back(vhi.finish(spec.tol));
  }
  {  // Young inequality with eps = 1 and the conjugate bound (Gt3)
    ConjugatePair conj(
        std::shared_ptr<const OrliczFunction>(&fn, [](const OrliczFunction*) {}));
    Margin young("young_eps1");
    std::vector<double> ab_axis = log_grid(1e-4, 1e3, spec.pair_axis);
    for (double a : ab_axis) {
      for (double b : ab_axis) {
        young.observe(a * b, fn.G(a) + conj.G_tilde(b), a, b);
      }
    }
    for (int i = 0; i < spec.random_count; ++i) {
      const double a = log_uniform(rng, 1e-4, 1e3);
      const double b = log_uniform(rng, 1e-4, 1e3);
      young.observe(a * b, fn.G(a) + conj.G_tilde(b), a, b);
    }
    out.push_back(young.finish(spec.tol));

    Margin gt3("Gt3");
    for (double t : ts) {
      gt3.observe(conj.G_tilde(fn.g(t)), g0 * fn.G(t), t);
    }
    out.push_back(gt3.finish(spec.tol));
  }

  if (nl != nullptr) {
    const double th0 = nl->theta0();
    const double f0 = nl->f0();
    {  // (1.2) 1+theta0 <= t f(t)/F(t) <= 1+f0
      Margin lo("1.2_lower"), hi("1.2_upper");
      for (double t : ts) {
        const double r = t * nl->f(t) / nl->F(t);
        lo.observe(1.0 + th0, r, t);
        hi.observe(r, 1.0 + f0, t);
      }
      out.push_back(lo.finish(spec.tol));
      out.push_back(hi.finish(spec.tol));
    }
    {  // (F1)
      Margin lo("F1_lower"), hi("F1_upper");
      for (auto [s, t] : pairs) {
        const double b_lo = std::min(std::pow(s, 1.0 + th0), std::pow(s, 1.0 + f0));
        const double b_hi = std::max(std::pow(s, 1.0 + th0), std::pow(s, 1.0 + f0));
        const double Ft = nl->F(t);
        const double Fst = nl->F(s * t);
        lo.observe(b_lo * Ft, Fst, t, s);
        hi.observe(Fst, b_hi * Ft, t, s);
      }
      out.push_back(lo.finish(spec.tol));
      out.push_back(hi.finish(spec.tol));
    }
    {  // (F2) F(s+t) <= 2^{1+f0}(F(s)+F(t))
      Margin m("F2");
      const double c = std::pow(2.0, 1.0 + f0);
      for (auto [s, t] : pairs) {
        m.observe(nl->F(s + t), c * (nl->F(s) + nl->F(t)), t, s);
      }
      out.push_back(m.finish(spec.tol));
    }
    {  // (f1)
      Margin lo("f1_lower"), hi("f1_upper");
      const double c_lo = (1.0 + th0) / (1.0 + f0);
      const double c_hi = (1.0 + f0) / (1.0 + th0);
      for (auto [s, t] : pairs) {
        const double b_lo = c_lo * std::min(std::pow(s, th0), std::pow(s, f0));
        const double b_hi = c_hi * std::max(std::pow(s, th0), std::pow(s, f0));
        const double ft = nl->f(t);
        const double fst = nl->f(s * t);
        lo.observe(b_lo * ft, fst, t, s);
        hi.observe(fst, b_hi * ft, t, s);
      }
      out.push_back(lo.finish(spec.tol));
      out.push_back(hi.finish(spec.tol));
    }
    if (th0 < fn.delta0() && f0 < fn.delta0()) {
      // (f2) restated at the sampled-sequence level: f/g and F/G strictly
      // decrease along a log-spaced tail sequence starting at t = 10.
      Margin m("f2_ratio_decay");
      const std::vector<double> seq =
          log_grid(10.0, std::max(spec.t_hi, 1e4), spec.log_count);
      for (size_t i = 0; i + 1 < seq.size(); ++i) {
        m.observe(nl->f(seq[i + 1]) / fn.g(seq[i + 1]), nl->f(seq[i]) / fn.g(seq[i]),
                  seq[i]);
        m.observe(nl->F(seq[i + 1]) / fn.G(seq[i + 1]), nl->F(seq[i]) / fn.G(seq[i]),
                  seq[i]);
      }
      out.push_back(m.finish(spec.tol));
    }
    if (nl->increasing()) {
      // (F4) with the per-pair bound M = max(s, t)
      Margin m("F4");
      for (auto [s, t] : pairs) {
        const double hi = std::max(s, t), lo = std::min(s, t);
        m.observe(nl->F(hi) - nl->F(lo), nl->f(hi) * (hi - lo), lo, hi);
      }
      out.push_back(m.finish(spec.tol));
    } else {
      // (F3) F(s) - F(t) <= F(s-t) for s >= t
      Margin m("F3");
      for (auto [s, t] : pairs) {
        const double hi = std::max(s, t), lo = std::min(s, t);
        m.observe(nl->F(hi) - nl->F(lo), nl->F(hi - lo), lo, hi);
      }
      out.push_back(m.finish(spec.tol));
    }
  }

  return out;
}

QVariationReport verify_q_variation(const OrliczFunction& fn, double tau,
                                    double c0_budget, int t_count, int k_count,
                                    int refine_limit) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("verify_q_variation: tau must lie in (0, 1]");
  }
  auto Q = [&fn](double s) {
    const double v = s * fn.g_prime(s) / fn.g(s);
    if (!std::isfinite(v)) {
      throw std::runtime_error("verify_q_variation: Q non-finite at s=" +
                               std::to_string(s));
    }
    return v;
  };
  // Total variation of Q over [t, t+k] by refined increment sums; this
  // equals the integral of |Q'| for piecewise-monotone Q.
  auto variation = [&](double t, double k) {
    double prev = 0.0;
    for (int m = 64; m <= refine_limit; m *= 2) {
      double tv = 0.0;
      double q0 = Q(t);
      for (int i = 1; i <= m; ++i) {
        const double q1 = Q(t + k * i / m);
        tv += std::fabs(q1 - q0);
        q0 = q1;
      }
      if (m > 64 && std::fabs(tv - prev) <= 1e-4 * std::max(tv, 1e-30)) return tv;
      prev = tv;
    }
    return prev;
  };

  QVariationReport rep;
  const auto t_grid = log_grid(1e-3, 1e3, t_count);
  const auto k_factors = log_grid(1e-3, 10.0, k_count);
  for (double t : t_grid) {
    for (double kf : k_factors) {
      const double k = kf * t;
      const double tv = variation(t, k);
      const double c0 = tv / std::pow(k / t, tau);
      ++rep.samples;
      if (c0 > rep.c0_hat) {
        rep.c0_hat = c0;
        rep.worst_t = t;
        rep.worst_k = k;
      }
    }
  }
  rep.passed = c0_budget <= 0.0 ? true : rep.c0_hat <= c0_budget;
  return rep;
}

std::array<double, 3> p0_candidates(double delta0, double g0, double theta0) {
  return {(1.0 + g0) / (g0 - theta0), (1.0 + delta0) / (delta0 - theta0),
          (1.0 + g0) / g0};
}

double p0_exponent(double delta0, double g0, double theta0, bool cavitation) {
  if (!(theta0 < delta0 && delta0 <= g0)) {
    throw std::domain_error("p0_exponent: requires theta0 < delta0 <= g0");
  }
  const auto c = p0_candidates(delta0, g0, theta0);
  const double m = std::min({c[0], c[1], c[2]});
  return cavitation ? std::min(m, 1.0) : m;
}

}  // namespace fbl
