#include "fbl/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fbl/expression.hpp"
#include "fbl/io.hpp"
#include "fbl/probes.hpp"
#include "fbl/verify.hpp"

namespace fbl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string join_numbers(const std::vector<double>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ";";
    out += format_full(values[k]);
  }
  return out;
}

// Writes files under one run directory and remembers their content hashes
// for the manifest.
class OutputCollector {
 public:
  explicit OutputCollector(std::string dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  void add(const std::string& name, const std::string& content) {
    write_text_file(dir_ + "/" + name, content);
    files_.emplace_back(name, sha256_hex(content));
  }

  // The manifest itself is written without entering the hash list.
  void write_manifest(const std::string& content) const {
    write_text_file(dir_ + "/manifest.txt", content);
  }

  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

 private:
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  const auto dt = std::chrono::steady_clock::now() - t0;
  return std::chrono::duration<double, std::milli>(dt).count();
}

std::string manifest_text(const ConfigFile& cfg, const Problem& p, const SolveOptions& opts,
                          const Solution* sol, const OutputCollector& out,
                          const RunOptions& ro, double wall_ms) {
  std::ostringstream m;
  m << "config_sha256 " << sha256_hex(cfg.serialize()) << "\n";
  m << "deterministic " << (ro.deterministic ? 1 : 0) << "\n";
  m << "wall_ms " << (ro.deterministic ? std::string("0") : format_full(wall_ms)) << "\n";
  m << "growth " << p.growth->label() << "\n";
  m << "absorption " << (p.absorption ? p.absorption->label() : std::string("none")) << "\n";
  m << "lambda_plus " << format_full(p.lambda_plus) << "\n";
  m << "grid " << p.grid.nx;
  if (p.grid.dim() == 2) m << "x" << p.grid.ny;
  m << "\n";
  m << "eps_schedule " << join_numbers(resolved_eps_schedule(p, opts)) << "\n";
  m << "mu_schedule " << join_numbers(resolved_mu_schedule(p, opts)) << "\n";
  if (sol) {
    m << "converged " << (sol->converged ? 1 : 0) << "\n";
    m << "energy " << format_full(sol->energy) << "\n";
    for (const StageTrace& st : sol->stages) {
      m << "stage " << format_full(st.eps) << " " << format_full(st.mu) << " "
        << st.iterations << " " << format_full(st.energy) << " "
        << format_full(st.grad_norm) << "\n";
    }
  }
  for (const auto& [name, sha] : out.files()) m << "file " << name << " " << sha << "\n";
  return m.str();
}

// Compact decimal for filenames and CSV labels (0.9 rather than the full
// 17-digit form).
std::string format_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::optional<GrowthFit> growth_fit_from_config(const ConfigFile& cfg, const Problem& p,
                                                const Solution& sol, double threshold) {
  if (!cfg.has("probe", "growth_center")) return std::nullopt;
  double cx = 0.0;
  double cy = 0.0;
  if (cfg.get_or("probe", "growth_center", "") == "interface") {
    const std::vector<BoundaryPoint> pts = extract_free_boundary(sol.field, threshold);
    if (pts.empty())
      throw std::runtime_error("growth fit: no positivity interface to center on");
    cx = pts.front().x;
    cy = pts.front().y;
  } else {
    const std::vector<double> center = cfg.get_list("probe", "growth_center");
    if (center.empty() || static_cast<int>(center.size()) > p.grid.dim())
      throw ConfigError("config: [probe] growth_center needs one coordinate per dimension");
    cx = center[0];
    cy = center.size() > 1 ? center[1] : 0.0;
  }
  const double r0 = cfg.get_double("probe", "growth_r0");
  const int jmax = cfg.get_int_or("probe", "growth_jmax", 8);
  const GrowthTarget target =
      cfg.get_or("probe", "growth_target", "value") == "gradient" ? GrowthTarget::gradient
                                                                  : GrowthTarget::value;
  GrowthFit raw = dyadic_sup(sol.field, cx, cy, r0, jmax, target);
  const double floor = cfg.get_double_or("probe", "growth_floor", 10.0 * threshold);
  return fit_growth_exponent(std::move(raw), floor);
}

// Runs the instruments requested by the [probe] section, writes their data
// files, and reports whether every expectation stated in the config held.
bool run_probes(const ConfigFile& cfg, const Problem& p, const SolveOptions& opts,
                const Solution& sol, OutputCollector& out) {
  if (!cfg.sections().count("probe")) return true;
  bool ok = true;
  const double eps_final = resolved_eps_schedule(p, opts).back();
  const double threshold = cfg.get_double_or("probe", "fb_threshold", 10.0 * eps_final);

  if (cfg.get_int_or("probe", "fb", 0) == 1 || cfg.has("probe", "fb_expected")) {
    const std::vector<BoundaryPoint> pts = extract_free_boundary(sol.field, threshold);
    std::string csv = "x,y\n";
    for (const BoundaryPoint& bp : pts)
      csv += format_full(bp.x) + "," + format_full(bp.y) + "\n";
    out.add("probe_fb.csv", csv);
    if (cfg.has("probe", "fb_expected")) {
      const std::vector<double> expected = cfg.get_list("probe", "fb_expected");
      const double ex = expected.empty() ? 0.0 : expected[0];
      const double ey = expected.size() > 1 ? expected[1] : 0.0;
      const double grid_h = std::max(p.grid.hx, p.grid.dim() == 2 ? p.grid.hy : 0.0);
      const double tol = cfg.get_double_or("probe", "fb_tol", 2.0 * grid_h);
      bool hit = false;
      for (const BoundaryPoint& bp : pts)
        hit = hit || std::hypot(bp.x - ex, bp.y - ey) <= tol;
      ok = ok && hit;
    }
  }

  const std::optional<GrowthFit> fit = growth_fit_from_config(cfg, p, sol, threshold);
  if (fit) {
    std::string dat = "# radius sup\n";
    for (std::size_t k = 0; k < fit->radii.size(); ++k)
      dat += format_full(fit->radii[k]) + " " + format_full(fit->sup_values[k]) + "\n";
    std::string base = "growth_" + format_short(fit->x0);
    if (p.grid.dim() == 2) base += "_" + format_short(fit->y0);
    out.add(base + ".dat", dat);
    out.add(base + ".gp",
            "set logscale xy\nset xlabel 'r'\nset ylabel 'sup'\n"
            "plot '" + base + ".dat' using 1:2 with linespoints title 'dyadic sup'\n");
    std::string csv = "x0,y0,r0,levels_used,exponent,constant,r_squared\n";
    csv += format_full(fit->x0) + "," + format_full(fit->y0) + "," + format_full(fit->r0) +
           "," + std::to_string(fit->window_hi - fit->window_lo + 1) + "," +
           format_full(fit->fitted_exponent) + "," + format_full(fit->fitted_constant) +
           "," + format_full(fit->r_squared) + "\n";
    out.add("probe_growth.csv", csv);
    if (cfg.has("probe", "growth_expected")) {
      const double expected = cfg.get_double("probe", "growth_expected");
      const double tol = cfg.get_double_or("probe", "growth_tol", 0.1);
      ok = ok && std::fabs(fit->fitted_exponent - expected) <= tol;
    }
  }

  if (cfg.has("probe", "modulus_window")) {
    const std::vector<double> w = cfg.get_list("probe", "modulus_window");
    if (w.size() != static_cast<std::size_t>(2 * p.grid.dim()))
      throw ConfigError("config: [probe] modulus_window needs lo;hi per dimension");
    Rect rect;
    rect.x_lo = w[0];
    rect.x_hi = w[1];
    if (w.size() == 4) {
      rect.y_lo = w[2];
      rect.y_hi = w[3];
    }
    std::vector<double> alphas{0.5};
    if (cfg.has("probe", "modulus_alphas")) alphas = cfg.get_list("probe", "modulus_alphas");
    const ModulusReport rep = modulus_probe(sol.field, rect, alphas);
    std::string csv = "lipschitz,log_lipschitz,margin,pair_count";
    for (const auto& [alpha, semi] : rep.holder) {
      (void)semi;
      csv += ",holder_" + format_short(alpha);
    }
    csv += "\n" + format_full(rep.lipschitz) + "," + format_full(rep.log_lipschitz) + "," +
           format_full(rep.margin) + "," + std::to_string(rep.pair_count);
    for (const auto& [alpha, semi] : rep.holder) {
      (void)alpha;
      csv += "," + format_full(semi);
    }
    csv += "\n";
    out.add("probe_modulus.csv", csv);
  }

  if (cfg.get_int_or("probe", "nonneg", 0) == 1) {
    const double tol = cfg.get_double_or("probe", "nonneg_tol_factor", 1e-8) * p.scale;
    const NonnegativityReport rep = nonnegativity_check(sol.field, tol);
    std::string csv = "passed,min_value,x,y\n";
    csv += std::to_string(rep.passed ? 1 : 0) + "," + format_full(rep.min_value) + "," +
           format_full(rep.x) + "," + format_full(rep.y) + "\n";
    out.add("probe_nonneg.csv", csv);
    ok = ok && rep.passed;
  }

  if (cfg.get_int_or("probe", "el", 0) == 1 || cfg.has("probe", "el_max")) {
    const auto [worst, residual] = el_residual(p, sol.field, threshold);
    (void)residual;
    out.add("probe_el.csv", "max_residual\n" + format_full(worst) + "\n");
    if (cfg.has("probe", "el_max")) ok = ok && worst <= cfg.get_double("probe", "el_max");
  }

  return ok;
}

struct SweepAxis {
  std::string section;
  std::string key;
  std::vector<std::string> values;
};

}  // namespace

Problem problem_from_config(const ConfigFile& cfg) {
  Problem p;
  const int dim = cfg.get_int_or("problem", "dim", 1);
  if (dim != 1 && dim != 2) throw ConfigError("config: [problem] dim must be 1 or 2");
  const double x_lo = cfg.get_double_or("problem", "x_lo", 0.0);
  const double x_hi = cfg.get_double_or("problem", "x_hi", 1.0);
  if (dim == 1) {
    p.grid = Grid::make_1d(x_lo, x_hi, cfg.get_int("problem", "n"));
  } else {
    const double y_lo = cfg.get_double_or("problem", "y_lo", 0.0);
    const double y_hi = cfg.get_double_or("problem", "y_hi", 1.0);
    const int nx = cfg.has("problem", "nx") ? cfg.get_int("problem", "nx")
                                            : cfg.get_int("problem", "n");
    const int ny = cfg.get_int_or("problem", "ny", nx);
    p.grid = Grid::make_2d(x_lo, x_hi, y_lo, y_hi, nx, ny);
  }
  p.growth = parse_orlicz(cfg.get("problem", "G"));
  const std::string absorption = cfg.get_or("problem", "F", "none");
  if (!absorption.empty() && absorption != "none")
    p.absorption = parse_nonlinearity(absorption);
  p.lambda_plus = cfg.get_double_or("problem", "lambda_plus", 0.0);
  if (p.lambda_plus < 0.0)
    throw ConfigError("config: [problem] lambda_plus must be nonnegative");

  const Expression q = Expression::parse(cfg.get_or("problem", "q", "0"));
  const Expression h = Expression::parse(cfg.get_or("problem", "h", "0"));
  const Grid& g = p.grid;
  p.q_cell.resize(g.cell_count());
  p.h_cell.resize(g.cell_count());
  for (int cj = 0; cj < g.cell_ny(); ++cj) {
    for (int ci = 0; ci < g.cell_nx(); ++ci) {
      const double cx = g.x(ci) + 0.5 * g.hx;
      const double cy = g.dim() == 2 ? g.y(cj) + 0.5 * g.hy : 0.0;
      const int c = ci + cj * g.cell_nx();
      p.q_cell[c] = q.eval(cx, cy);
      p.h_cell[c] = h.eval(cx, cy);
    }
  }

  const Expression phi = Expression::parse(cfg.get_or("problem", "phi", "0"));
  p.dirichlet = Field(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) p.dirichlet.at(i, j) = phi.eval(g.x(i), g.y(j));
  p.refresh_scale();
  return p;
}

SolveOptions solve_options_from_config(const ConfigFile& cfg) {
  SolveOptions o;
  if (cfg.has("solve", "eps_schedule")) o.eps_schedule = cfg.get_list("solve", "eps_schedule");
  if (cfg.has("solve", "mu_schedule")) o.mu_schedule = cfg.get_list("solve", "mu_schedule");
  for (std::size_t k = 0; k < o.eps_schedule.size(); ++k) {
    if (o.eps_schedule[k] <= 0.0)
      throw ConfigError("config: [solve] eps_schedule entries must be positive");
    if (k && o.eps_schedule[k] >= o.eps_schedule[k - 1])
      throw ConfigError("config: [solve] eps_schedule must be strictly decreasing");
  }
  for (std::size_t k = 0; k < o.mu_schedule.size(); ++k) {
    if (o.mu_schedule[k] < 0.0)
      throw ConfigError("config: [solve] mu_schedule entries must be nonnegative");
    if (k && o.mu_schedule[k] > o.mu_schedule[k - 1])
      throw ConfigError("config: [solve] mu_schedule must be nonincreasing");
  }
  o.max_iters = cfg.get_int_or("solve", "max_iters", o.max_iters);
  o.energy_tol = cfg.get_double_or("solve", "energy_tol", o.energy_tol);
  o.grad_tol_factor = cfg.get_double_or("solve", "grad_tol_factor", o.grad_tol_factor);
  o.seed = static_cast<std::uint64_t>(cfg.get_double_or("solve", "seed", 0.0));
  o.multistart = cfg.get_int_or("solve", "multistart", -1);
  if (o.multistart < -1 || o.multistart > 1)
    throw ConfigError("config: [solve] multistart must be -1, 0, or 1");
  return o;
}

double predicted_growth_exponent(const Problem& p) {
  if (p.lambda_plus > 0.0) return 1.0;
  if (!p.absorption) return kNaN;
  const double d0 = p.growth->delta0();
  const double g0 = p.growth->g0();
  const double th = p.absorption->theta0();
  if (!(th < d0)) return kNaN;
  const std::array<double, 3> cand = p0_candidates(d0, g0, th);
  bool h_zero = true;
  for (double hv : p.h_cell) h_zero = h_zero && hv == 0.0;
  double value = std::min(cand[0], cand[1]);
  if (!h_zero) value = std::min(value, cand[2]);
  return value;
}

int run_verify(const std::string& growth_catalog, const std::string& absorption_catalog,
               double claimed_delta0, double claimed_g0, const RunOptions& ro) {
  std::shared_ptr<const OrliczFunction> growth = parse_orlicz(growth_catalog);
  if (!std::isnan(claimed_delta0) || !std::isnan(claimed_g0)) {
    const double d0 = std::isnan(claimed_delta0) ? growth->delta0() : claimed_delta0;
    const double g0 = std::isnan(claimed_g0) ? growth->g0() : claimed_g0;
    growth = with_claimed_exponents(growth, d0, g0);
  }
  std::shared_ptr<const Nonlinearity> absorption;
  if (!absorption_catalog.empty() && absorption_catalog != "none")
    absorption = parse_nonlinearity(absorption_catalog);

  const std::vector<PropertyReport> reports =
      verify_structure(*growth, absorption.get(), SampleSpec{});
  std::string csv = "property,samples,worst_margin,witness_t,pass\n";
  bool all_passed = true;
  for (const PropertyReport& r : reports) {
    csv += r.property + "," + std::to_string(r.samples) + "," + format_full(r.worst_margin) +
           "," + format_full(r.witness_t) + "," + (r.passed ? "1" : "0") + "\n";
    all_passed = all_passed && r.passed;
  }
  OutputCollector out(ro.out_dir);
  out.add("verify.csv", csv);
  return all_passed ? 0 : 1;
}

int run_solve(const ConfigFile& cfg, const RunOptions& ro) {
  Problem p = problem_from_config(cfg);
  SolveOptions opts = solve_options_from_config(cfg);
  if (ro.seed_set) opts.seed = ro.seed;
  const auto t0 = std::chrono::steady_clock::now();
  const Solution sol = minimize(p, opts);
  const double wall = elapsed_ms(t0);
  OutputCollector out(ro.out_dir);
  out.add("field.csv", field_to_csv(sol.field));
  const bool probes_ok = run_probes(cfg, p, opts, sol, out);
  out.write_manifest(manifest_text(cfg, p, opts, &sol, out, ro, wall));
  return (sol.converged && probes_ok) ? 0 : 1;
}

int run_probe(const ConfigFile& cfg, const RunOptions& ro) {
  if (!cfg.sections().count("probe"))
    throw ConfigError("config: probe runs need a [probe] section");
  return run_solve(cfg, ro);
}

int run_sweep(const ConfigFile& cfg, const RunOptions& ro) {
  std::vector<SweepAxis> axes;
  if (cfg.sections().count("sweep")) {
    // Section maps are sorted, so axis order (and with it row order) is the
    // lexicographic order of the axis keys.
    for (const auto& [key, value] : cfg.sections().at("sweep")) {
      if (key.rfind("axis.", 0) != 0) continue;
      const std::string rest = key.substr(5);
      const std::size_t dot = rest.find('.');
      if (dot == std::string::npos || dot == 0 || dot + 1 >= rest.size())
        throw ConfigError("config: sweep axes are named axis.<section>.<key>");
      SweepAxis axis{rest.substr(0, dot), rest.substr(dot + 1), split_trimmed(value, ';')};
      if (axis.values.empty())
        throw ConfigError("config: sweep axis " + key + " has no values");
      axes.push_back(std::move(axis));
    }
  }

  long total = 1;
  for (const SweepAxis& axis : axes) total *= static_cast<long>(axis.values.size());
  const long cap = cfg.get_int_or("sweep", "cap", 256);
  if (total > cap)
    throw ConfigError("config: sweep cross product has " + std::to_string(total) +
                      " rows, cap is " + std::to_string(cap));

  struct Row {
    std::string params;
    double energy = kNaN;
    bool converged = false;
    double predicted = kNaN;
    double fitted = kNaN;
    double wall_ms = 0.0;
    std::string status = "ok";
  };
  std::vector<Row> rows(total);
  std::vector<ConfigFile> instances(static_cast<std::size_t>(total), cfg);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    std::string params;
    // Last axis varies fastest.
    std::vector<std::size_t> pos(axes.size(), 0);
    for (std::size_t k = axes.size(); k-- > 0;) {
      pos[k] = static_cast<std::size_t>(rem % static_cast<long>(axes[k].values.size()));
      rem /= static_cast<long>(axes[k].values.size());
    }
    for (std::size_t k = 0; k < axes.size(); ++k) {
      const SweepAxis& axis = axes[k];
      instances[idx].set(axis.section, axis.key, axis.values[pos[k]]);
      if (k) params += ";";
      params += axis.section + "." + axis.key + "=" + axis.values[pos[k]];
    }
    rows[idx].params = params;
  }

  std::atomic<long> next{0};
  auto worker = [&]() {
    for (;;) {
      const long idx = next.fetch_add(1);
      if (idx >= total) return;
      Row& row = rows[idx];
      try {
        const Problem p = problem_from_config(instances[idx]);
        SolveOptions so = solve_options_from_config(instances[idx]);
        if (ro.seed_set) so.seed = ro.seed;
        const auto t0 = std::chrono::steady_clock::now();
        const Solution sol = minimize(p, so);
        row.wall_ms = ro.deterministic ? 0.0 : elapsed_ms(t0);
        row.energy = sol.energy;
        row.converged = sol.converged;
        row.predicted = predicted_growth_exponent(p);
        const double eps_final = resolved_eps_schedule(p, so).back();
        const double threshold =
            instances[idx].get_double_or("probe", "fb_threshold", 10.0 * eps_final);
        const std::optional<GrowthFit> fit =
            growth_fit_from_config(instances[idx], p, sol, threshold);
        if (fit) row.fitted = fit->fitted_exponent;
      } catch (const std::exception& e) {
        row.status = e.what();
      }
    }
  };
  const int jobs = std::clamp(ro.jobs, 1, 64);
  if (jobs == 1 || total <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  auto cell = [](double v) { return std::isnan(v) ? std::string() : format_full(v); };
  std::string csv =
      "index,params,energy,converged,predicted_p0,fitted_p0,abs_error,wall_ms,status\n";
  bool all_ok = true;
  for (long idx = 0; idx < total; ++idx) {
    const Row& row = rows[idx];
    const double err = (std::isnan(row.predicted) || std::isnan(row.fitted))
                           ? kNaN
                           : std::fabs(row.fitted - row.predicted);
    std::string status = row.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    csv += std::to_string(idx) + "," + row.params + "," + cell(row.energy) + "," +
           (row.converged ? "1" : "0") + "," + cell(row.predicted) + "," +
           cell(row.fitted) + "," + cell(err) + "," + format_full(row.wall_ms) + "," +
           status + "\n";
    all_ok = all_ok && row.status == "ok";
  }
  OutputCollector out(ro.out_dir);
  out.add("sweep.csv", csv);
  std::ostringstream m;
  m << "config_sha256 " << sha256_hex(cfg.serialize()) << "\n";
  m << "deterministic " << (ro.deterministic ? 1 : 0) << "\n";
  m << "rows " << total << "\n";
  for (const auto& [name, sha] : out.files()) m << "file " << name << " " << sha << "\n";
  out.write_manifest(m.str());
  return all_ok ? 0 : 1;
}

int run_oracle(const ConfigFile& cfg, const RunOptions& ro) {
  Problem p = problem_from_config(cfg);
  SolveOptions opts = solve_options_from_config(cfg);
  if (ro.seed_set) opts.seed = ro.seed;

  std::vector<double> levels;
  if (cfg.has("oracle", "levels")) {
    levels = cfg.get_list("oracle", "levels");
  } else {
    const int count = cfg.get_int_or("oracle", "level_count", 11);
    if (count < 2) throw ConfigError("config: [oracle] level_count must be at least 2");
    double lo = 0.0, hi = 0.0;
    for (int j = 0; j < p.grid.ny; ++j)
      for (int i = 0; i < p.grid.nx; ++i) {
        if (!p.grid.boundary_node(i, j)) continue;
        lo = std::min(lo, p.dirichlet.at(i, j));
        hi = std::max(hi, p.dirichlet.at(i, j));
      }
    for (int k = 0; k < count; ++k)
      levels.push_back(lo + (hi - lo) * k / static_cast<double>(count - 1));
  }

  const Solution brute = brute_force_minimize(p, levels);
  const Solution sol = minimize(p, opts);
  const double slack = 1e-6 * std::max(1.0, std::fabs(brute.energy));
  const bool pass = sol.energy <= brute.energy + slack;

  std::string csv = "brute_energy,solve_energy,gap,levels,pass\n";
  csv += format_full(brute.energy) + "," + format_full(sol.energy) + "," +
         format_full(sol.energy - brute.energy) + "," + std::to_string(levels.size()) +
         "," + (pass ? "1" : "0") + "\n";
  OutputCollector out(ro.out_dir);
  out.add("oracle.csv", csv);
  out.add("field.csv", field_to_csv(sol.field));
  out.write_manifest(manifest_text(cfg, p, opts, &sol, out, ro, 0.0));
  return pass ? 0 : 1;
}

}  // namespace fbl
