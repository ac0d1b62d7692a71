#include "subfp/experiment.hpp"

#include "subfp/artifacts.hpp"
#include "subfp/decay.hpp"
#include "subfp/evolution.hpp"
#include "subfp/force_field.hpp"
#include "subfp/generator.hpp"
#include "subfp/inequalities.hpp"
#include "subfp/splitting.hpp"
#include "subfp/steady_state.hpp"
#include "subfp/weights.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace subfp {

namespace fs = std::filesystem;

bool ExperimentResult::all_pass() const {
  return std::all_of(certificates.begin(), certificates.end(), [](const Certificate& c) { return c.pass; });
}

Density build_initial(const ExperimentConfig& cfg, const Grid& grid, const Density* G) {
  const Point c(cfg.center, cfg.dim == 2 ? cfg.center_y : 0.0);
  Density f;
  if (cfg.initial_kind == "bump") {
    const double w2 = cfg.width * cfg.width;
    f = Density::sample(grid, [&](const Point& x) { return std::exp(-(x - c).squaredNorm() / (2.0 * w2)); });
  } else if (cfg.initial_kind == "heavy-tail") {
    f = Density::sample(grid, [&](const Point& x) { return std::pow(bracket(x - c), -cfg.exponent); });
  } else if (cfg.initial_kind == "delta") {
    Vector v = Vector::Zero(grid.size());
    int best = 0;
    for (int i = 1; i < grid.size(); ++i)
      if ((grid.center(i) - c).norm() < (grid.center(best) - c).norm()) best = i;
    v[best] = 1.0;
    f = Density(grid, v);
  } else if (cfg.initial_kind == "csv") {
    const auto rows = read_csv(cfg.initial_path);
    if (static_cast<int>(rows.size()) != grid.size())
      throw ConfigError("initial.path", "expected " + std::to_string(grid.size()) + " rows, got " +
                                            std::to_string(rows.size()));
    Vector v(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
      if (rows[i].empty()) throw ConfigError("initial.path", "empty row");
      v[i] = rows[i].back();
    }
    f = Density(grid, v);
  } else {
    throw ConfigError("initial.kind", "unknown kind " + cfg.initial_kind);
  }
  if (cfg.initial_kind != "csv" && f.mass() > 0.0) f = f.scaled(1.0 / f.mass());
  if (cfg.mean_zero) {
    if (!G) throw std::invalid_argument("build_initial: mean_zero needs G");
    f = f - G->scaled(f.mass());
  }
  return f;
}

fs::path experiment_dir(const ExperimentConfig& cfg, const std::string& stem) {
  fs::path name = !cfg.output.empty() ? fs::path(cfg.output)
                  : !stem.empty()     ? fs::path(stem)
                                      : fs::path("run-" + config_hash(cfg));
  const char* env = std::getenv("SUBFP_OUT");
  if (env && *env) return fs::path(env) / (name.is_absolute() ? name.filename() : name);
  if (name.is_absolute()) return name;
  return fs::path("subfp-out") / name;
}

namespace {

Json point_json(const Point& x, int dim) {
  Json j = Json::array();
  for (int k = 0; k < dim; ++k) j.push_back(json_number(x[k]));
  return j;
}

bool has_task(const ExperimentConfig& c, const std::string& t) {
  return std::find(c.tasks.begin(), c.tasks.end(), t) != c.tasks.end();
}

struct Theory {
  bool case1 = false;
  double C_F = 0.0;
  CriticalSigmas sigmas{0.0, 0.0};
  double sigma_used = 0.0;
  double k_star = 0.0;
  std::optional<double> beta_bound;
  std::optional<double> lambda_star;
};

Theory theory_for(const ExperimentConfig& cfg, const ForceField& field) {
  Theory th;
  const auto samples = radial_samples(cfg.dim, 0.1, 100.0, 40);
  if (field.has_potential()) {
    const double err = check_case1_structure(field, samples);
    th.case1 = err <= 1e-6;
  }
  const auto outer = radial_samples(cfg.dim, std::max(1.0, cfg.R0), 1e4, 200);
  th.C_F = std::max(verify_conditions(field, outer, cfg.R0).sup_div_constant, 0.0);
  th.sigmas = critical_sigmas(th.case1 ? ForceCase::case1 : ForceCase::case2, cfg.gamma);
  if (cfg.sigma > 0.0) {
    th.sigma_used = cfg.sigma;
  } else if (th.case1) {
    th.sigma_used = th.sigmas.sigma_B;
  } else {
    const Weight w = build_weight(cfg);
    const double s = w.s() > 0.0 ? w.s() : cfg.gamma;
    th.sigma_used = std::min(th.sigmas.sigma_L, s / (2.0 - cfg.gamma));
  }
  th.k_star = critical_k(cfg.p, cfg.dim, th.C_F);
  if (cfg.family == "polynomial") th.beta_bound = polynomial_beta_bound(cfg.k, th.k_star, cfg.gamma, cfg.theta);
  if (cfg.family == "critical") th.lambda_star = lambda_star(cfg.kappa, cfg.theta, cfg.gamma);
  return th;
}

// Everything later tasks may reuse.
struct Context {
  const ExperimentConfig& cfg;
  fs::path dir;
  ForceField field;
  Generator gen;
  Density G;
  Theory theory;
  std::optional<SpectrumReport> spectrum;
  std::optional<Trajectory> traj;
  std::optional<double> mu;
  ExperimentResult result;
  Json summary = Json::object();

  void certify(const std::string& name, bool pass, const std::string& detail) {
    result.certificates.push_back({name, pass, detail});
  }
  void json(const std::string& file, const Json& j) {
    write_json(dir / file, j);
    result.files.push_back(file);
  }
  void csv(const std::string& file, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows) {
    write_csv(dir / file, header, rows);
    result.files.push_back(file);
  }
  void text(const std::string& file, const std::string& body) {
    write_text(dir / file, body);
    result.files.push_back(file);
  }
};

std::string num(double x) {
  std::ostringstream o;
  o.precision(6);
  o << x;
  return o.str();
}

const Trajectory& trajectory(Context& ctx) {
  if (!ctx.traj) {
    const ExperimentConfig& c = ctx.cfg;
    const Density f0 = build_initial(c, ctx.gen.grid, &ctx.G);
    const auto times = geometric_times(c.t_first, c.t_end, c.t_ratio);
    EvolveOptions opt;
    opt.dt_initial = c.dt;
    ctx.traj = evolve(f0, times, ctx.gen.matrix, opt);
  }
  return *ctx.traj;
}

void task_steady(Context& ctx) {
  const Grid& g = ctx.gen.grid;
  const double res = steady_residual(ctx.gen, ctx.G);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < g.size(); ++i) {
    const Point x = g.center(i);
    if (g.dim() == 1) rows.push_back({x[0], ctx.G[i]});
    else rows.push_back({x[0], x[1], ctx.G[i]});
  }
  ctx.csv("G.csv", g.dim() == 1 ? std::vector<std::string>{"x", "G"} : std::vector<std::string>{"x", "y", "G"},
          rows);

  Json j;
  j["residual"] = json_number(res);
  j["mass"] = json_number(ctx.G.mass());
  j["min"] = json_number(ctx.G.min());
  j["tail_mass_fraction"] = json_number(tail_mass_fraction(ctx.G));
  const double kappa = 0.75 / ctx.cfg.gamma;
  const TailReport tail = tail_bound_check(ctx.G, kappa, ctx.cfg.gamma);
  j["tail_bound"] = {{"kappa", kappa},
                     {"inner_sup", json_number(tail.inner_sup)},
                     {"outer_sup", json_number(tail.outer_sup)},
                     {"ratio", json_number(tail.ratio)},
                     {"pass", tail.pass}};
  if (ctx.field.has_potential()) {
    // e^{-V}/Z_h is the exact discrete equilibrium for gradient and stream-fitted fields
    const Density ref = Density::sample(g, [&](const Point& x) { return std::exp(-ctx.field.potential(x)); });
    const Density refn = ref.scaled(1.0 / ref.mass());
    double err = 0.0;
    for (int i = 0; i < g.size(); ++i) err = std::max(err, std::abs(ctx.G[i] / refn[i] - 1.0));
    j["max_relative_error_vs_exp_minus_V"] = json_number(err);
  }
  ctx.json("steady.json", j);
  const bool pass = res <= 1e-10 && ctx.G.min() > 0.0;
  ctx.certify("steady", pass, "residual " + num(res) + ", min G " + num(ctx.G.min()));
}

const SpectrumReport& spectrum(Context& ctx, int count) {
  if (!ctx.spectrum) ctx.spectrum = rightmost_spectrum(ctx.gen, count, &ctx.G);
  return *ctx.spectrum;
}

void task_spectrum(Context& ctx) {
  const SpectrumReport& s = spectrum(ctx, ctx.cfg.spectrum_count);
  Json ev = Json::array();
  for (size_t k = 0; k < s.eigenvalues.size(); ++k)
    ev.push_back({{"re", json_number(s.eigenvalues[k].real())},
                  {"im", json_number(s.eigenvalues[k].imag())},
                  {"residual", json_number(s.residuals[k])}});
  Json j;
  j["eigenvalues"] = ev;
  j["zero_multiplicity"] = s.zero_multiplicity;
  j["second_singular"] = json_number(s.second_singular);
  j["null_vector_error"] = json_number(s.null_vector_error);
  j["max_other_real"] = json_number(s.max_other_real);
  j["simple_zero"] = s.simple_zero;
  j["pass"] = s.pass;
  ctx.json("spectrum.json", j);
  ctx.certify("spectrum", s.pass,
              "lambda1 " + num(std::abs(s.eigenvalues.front())) + ", max Re others " + num(s.max_other_real));
}

void task_decay_fit(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const Trajectory& tr = trajectory(ctx);
  const NormSpec spec = build_norm(c);
  const DecaySeries spec_series = decay_series(tr, ctx.G, spec);
  const DecaySeries series =
      c.fit_norm == "G" ? decay_series(tr, ctx.G, 2.0, inverse_sqrt_weights(ctx.G), "L^2(G^-1/2)") : spec_series;

  WindowOptions wo;
  wo.burn_fraction = c.burn_fraction;
  if (c.envelope == "stretched") {
    try {
      const SpectrumReport& s = ctx.spectrum ? *ctx.spectrum : spectrum(ctx, 3);
      if (s.eigenvalues.size() > 1 && s.eigenvalues[1].real() < 0.0) wo.spectral_gap = -s.eigenvalues[1].real();
    } catch (const std::exception&) {
      // no gap estimate: the window then ends at the noise floor
    }
  }
  const FitWindow w = select_window(series, wo);

  Json j;
  DecayFit fit;
  DecayEnvelope theory_env;
  std::optional<double> violation;
  const double sigma = ctx.theory.sigma_used;
  if (c.envelope == "stretched") {
    fit = fit_stretched_rate(series, sigma, w);
    theory_env = fit.envelope;
    j["lambda_hat"] = json_number(fit.exponent);
    j["sigma"] = json_number(sigma);
    if (ctx.theory.lambda_star) j["lambda_star"] = json_number(*ctx.theory.lambda_star);
    ctx.certify("decay-fit", fit.exponent > 0.0 && fit.r2 >= c.min_r2,
                "lambda-hat " + num(fit.exponent) + ", R^2 " + num(fit.r2));
  } else {
    fit = fit_polynomial_rate(series, w);
    j["beta_hat"] = json_number(fit.exponent);
    ctx.certify("decay-fit", fit.exponent > 0.0 && fit.r2 >= c.min_r2,
                "beta-hat " + num(fit.exponent) + ", R^2 " + num(fit.r2));
    if (ctx.theory.beta_bound) {
      const double beta = c.beta_factor * *ctx.theory.beta_bound;
      theory_env = DecayEnvelope::polynomial(beta, w.t1);
      const double C = calibrate_envelope(series, theory_env, w.t1);
      violation = envelope_check(series, theory_env, C, w);
      j["envelope"] = {{"beta", json_number(beta)},
                       {"beta_bound", json_number(*ctx.theory.beta_bound)},
                       {"C", json_number(C)},
                       {"max_violation", json_number(*violation)}};
      ctx.certify("envelope", *violation <= 0.0,
                  "beta " + num(beta) + ", max violation " + num(*violation));
    } else {
      theory_env = fit.envelope;
    }
  }
  j["norm"] = series.norm;
  j["window"] = {json_number(w.t1), json_number(w.t2)};
  j["r2"] = json_number(fit.r2);
  j["points"] = fit.points;
  j["intercept"] = json_number(fit.intercept);
  j["max_fit_residual"] = json_number(fit.max_violation);
  j["envelope_kind"] = c.envelope;
  if (wo.spectral_gap) j["spectral_gap"] = json_number(*wo.spectral_gap);

  double bound_ratio = 0.0;
  const double d0 = spec_series.distances.front();
  for (double d : spec_series.distances) bound_ratio = std::max(bound_ratio, d0 > 0.0 ? d / d0 : 0.0);
  j["boundedness"] = {{"norm", spec_series.norm}, {"sup_ratio", json_number(bound_ratio)}};
  ctx.certify("bounded", bound_ratio <= 10.0, "sup ||f(t)||/||f0|| " + num(bound_ratio));
  ctx.json("decay_fit.json", j);
  ctx.summary["fit"] = j;

  std::vector<std::vector<double>> rows;
  for (size_t k = 0; k < series.size(); ++k) {
    const double t = series.times[k], d = series.distances[k];
    rows.push_back({t, d, d > 0.0 ? std::log(d) : -INFINITY, theta_envelope(theory_env, t)});
  }
  ctx.csv("decay.csv", {"t", "d", "log_d", "Theta"}, rows);

  std::vector<std::vector<double>> trows;
  for (size_t k = 0; k < tr.size(); ++k)
    trows.push_back({tr.times[k], tr.densities[k].mass(), tr.densities[k].min(), series.distances[k],
                     spec_series.distances[k]});
  ctx.csv("trajectory.csv", {"t", "mass", "min", "d_fit", "d_spec"}, trows);

  // straight lines in these coordinates are the theoretical envelope shapes
  auto abscissa = [&](double t) { return c.envelope == "stretched" ? std::pow(t, sigma) : std::log1p(t); };
  PlotSeries data{"log d", {}, {}}, line{"fit", {}, {}, true};
  for (size_t k = 0; k < series.size(); ++k) {
    if (series.distances[k] <= 0.0) continue;
    data.x.push_back(abscissa(series.times[k]));
    data.y.push_back(std::log(series.distances[k]));
  }
  for (double t : {w.t1, w.t2}) {
    line.x.push_back(abscissa(t));
    line.y.push_back(fit.intercept - fit.exponent * abscissa(t));
  }
  std::vector<PlotSeries> plot{data, line};
  const std::string xl = c.envelope == "stretched" ? "t^" + num(sigma) : "log(1+t)";
  ctx.text("decay.svg", svg_line_plot("decay in " + series.norm, xl, "log d", plot));
}

void task_entropy(Context& ctx) {
  const Trajectory& tr = trajectory(ctx);
  const EntropySeries sq = entropy_series(tr, ctx.G, entropy_square());
  const EntropySeries ab = entropy_series(tr, ctx.G, entropy_abs());
  std::vector<std::vector<double>> rows;
  for (size_t k = 0; k < sq.times.size(); ++k) rows.push_back({sq.times[k], sq.values[k], ab.values[k]});
  ctx.csv("entropy.csv", {"t", "H_square", "H_abs"}, rows);
  Json j;
  j["square"] = {{"max_increase", json_number(sq.max_increase)}, {"monotone", sq.monotone}};
  j["abs"] = {{"max_increase", json_number(ab.max_increase)}, {"monotone", ab.monotone}};
  ctx.json("entropy.json", j);
  ctx.certify("entropy", sq.monotone, "max increase " + num(sq.max_increase) + " (H0 " + num(sq.values.front()) + ")");
}

double mu(Context& ctx) {
  if (!ctx.mu) ctx.mu = weak_poincare_constant(ctx.G, ctx.cfg.gamma);
  return *ctx.mu;
}

void task_poincare(Context& ctx) {
  const double m = mu(ctx);
  const double unit = weak_poincare_constant(ctx.G, ctx.cfg.gamma, PoincareWeight::unit);
  ctx.json("poincare.json", {{"mu", json_number(m)}, {"mu_unit_weight", json_number(unit)}});
  ctx.summary["poincare"] = {{"mu", json_number(m)}, {"mu_unit_weight", json_number(unit)}};
  ctx.certify("poincare", m > 0.0, "mu " + num(m) + ", unit-weight constant " + num(unit));
}

void task_splitting(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const Weight w = build_weight(c);
  const double a_star = psi0_asymptotic_constant(w, c.p, ctx.field);
  const auto scan = certificate_scan_grid(c.dim, c.scan_radius, c.scan_points);
  Json j;
  j["a_star"] = json_number(a_star);
  j["scan_points"] = static_cast<int>(scan.size());
  SplittingResult r;
  std::string error;
  if (!(a_star > 0.0)) {
    error = "a* is not positive: no dissipative splitting for this weight";
  } else {
    const double a = c.a_factor * a_star;
    j["a_target"] = json_number(a);
    try {
      r = find_splitting_constants(ctx.field, w, c.p, a, scan);
    } catch (const SplittingFailure& f) {
      r = f.result;
      error = f.what();
    }
  }
  j["M"] = json_number(r.M);
  j["R"] = json_number(r.R);
  j["certificate_max"] = json_number(r.certificate_max);
  j["worst_point"] = point_json(r.worst_point, c.dim);
  j["iterations"] = r.iterations;
  j["success"] = r.success;
  if (!error.empty()) j["error"] = error;
  ctx.json("splitting.json", j);
  ctx.summary["splitting"] = j;
  ctx.certify("splitting-scan", r.success && r.certificate_max <= 0.0,
              "M " + num(r.M) + ", R " + num(r.R) + ", certificate max " + num(r.certificate_max));
}

void task_lyapunov(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const double kappa = c.lyap_kappa, gamma = c.gamma;
  const ScalarMap w = [kappa, gamma](const Point& x) { return std::exp(kappa * std::pow(bracket(x), gamma)); };
  auto samples = radial_samples(c.dim, 1e-3, c.scan_radius, 400);
  samples.push_back(Point::Zero());
  const LyapunovReport r = lyapunov_check(ctx.field, w, c.lyap_zeta0, c.lyap_M, c.lyap_R, samples);
  ctx.json("lyapunov.json", {{"kappa", kappa},
                             {"zeta0", json_number(c.lyap_zeta0)},
                             {"M", json_number(c.lyap_M)},
                             {"R", json_number(c.lyap_R)},
                             {"max_violation", json_number(r.max_violation)},
                             {"worst_point", point_json(r.worst, c.dim)}});
  ctx.certify("lyapunov", r.max_violation <= 0.0, "max violation " + num(r.max_violation));
}

void task_nash(Context& ctx) {
  const Grid& g = ctx.gen.grid;
  std::vector<Density> probes = default_probes(g, ctx.cfg.seed);
  probes.push_back(Density::sample(g, [](const Point& x) { return std::exp(-x.squaredNorm() / 2.0); }));
  Json q = Json::array();
  double qmax = 0.0, qmin = INFINITY;
  bool finite = true;
  for (const Density& p : probes) {
    const double v = nash_quotient(p);
    q.push_back(json_number(v));
    finite = finite && std::isfinite(v) && v > 0.0;
    qmax = std::max(qmax, v);
    qmin = std::min(qmin, v);
  }
  ctx.json("nash.json", {{"quotients", q}, {"max", json_number(qmax)}, {"min", json_number(qmin)}});
  ctx.certify("nash", finite, "quotient range [" + num(qmin) + ", " + num(qmax) + "]");
}

void task_interpolation(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  Trajectory local;
  const Trajectory* tr = nullptr;
  if (c.mean_zero) {
    tr = &trajectory(ctx);
  } else {
    ExperimentConfig mz = c;
    mz.mean_zero = true;
    const Density f0 = build_initial(mz, ctx.gen.grid, &ctx.G);
    EvolveOptions opt;
    opt.dt_initial = c.dt;
    local = evolve(f0, geometric_times(c.t_first, c.t_end, c.t_ratio), ctx.gen.matrix, opt);
    tr = &local;
  }
  const double m = mu(ctx);
  const InterpolationReport r = best_interpolation_alpha(*tr, ctx.G, c.gamma, {1.5, 2.0, 3.0, 4.0, 6.0, 8.0}, m);
  ctx.json("interpolation.json", {{"alpha", json_number(r.alpha)},
                                  {"C_alpha", json_number(r.C_alpha)},
                                  {"ratio_spread", json_number(r.ratio_spread)},
                                  {"mu", json_number(m)},
                                  {"max_differential_violation", json_number(r.max_differential_violation)},
                                  {"envelope_constant", json_number(r.envelope_constant)}});
  // (dE1^2/dt + 2 mu E0^2)/(2 mu E0^2) <= 1 means dE1^2/dt <= 0; <= 0 is the full inequality
  const bool pass = std::isfinite(r.C_alpha) && r.max_differential_violation <= 0.0;
  ctx.certify("interpolation", pass,
              "alpha " + num(r.alpha) + ", C_alpha " + num(r.C_alpha) + ", differential " +
                  num(r.max_differential_violation));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const fs::path& dir) {
  validate_config(cfg);
  ForceField field = build_field(cfg);
  const Grid grid = build_grid(cfg.dim, cfg.L, cfg.n);
  if (cfg.initial_kind == "csv" && !fs::exists(cfg.initial_path))
    throw ConfigError("initial.path", "no such file " + cfg.initial_path);

  Context ctx{cfg, dir, field, build_generator(grid, field), Density(), Theory(), {}, {}, {}, {}, {}};
  fs::create_directories(dir);
  ctx.result.dir = dir;
  ctx.text("config.toml", serialize_config(cfg));

  auto run = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw std::runtime_error("task " + name + ": " + e.what());
    }
  };
  run("steady", [&] {
    ctx.G = solve_steady(ctx.gen);
    ctx.theory = theory_for(cfg, ctx.field);
    task_steady(ctx);
  });
  // dependency order after the steady state
  const std::vector<std::pair<std::string, void (*)(Context&)>> order{
      {"spectrum", task_spectrum}, {"decay-fit", task_decay_fit},     {"entropy", task_entropy},
      {"poincare", task_poincare}, {"splitting-scan", task_splitting}, {"lyapunov", task_lyapunov},
      {"nash", task_nash},         {"interpolation", task_interpolation}};
  for (const auto& [name, fn] : order)
    if (has_task(cfg, name)) run(name, [&] { fn(ctx); });

  Json& s = ctx.summary;
  s["config_hash"] = config_hash(cfg);
  s["tasks"] = cfg.tasks;
  Json certs = Json::object();
  for (const Certificate& c : ctx.result.certificates) certs[c.name] = {{"pass", c.pass}, {"detail", c.detail}};
  s["certificates"] = certs;
  s["all_pass"] = ctx.result.all_pass();
  const Theory& th = ctx.theory;
  Json t;
  t["case"] = th.case1 ? "case1" : "case2";
  t["gamma"] = json_number(cfg.gamma);
  t["C_F"] = json_number(th.C_F);
  t["sigma_L"] = json_number(th.sigmas.sigma_L);
  t["sigma_B"] = json_number(th.sigmas.sigma_B);
  t["sigma_used"] = json_number(th.sigma_used);
  t["k_star"] = json_number(th.k_star);
  if (th.beta_bound) t["beta_bound"] = json_number(*th.beta_bound);
  if (th.lambda_star) t["lambda_star"] = json_number(*th.lambda_star);
  s["theory"] = t;
  ctx.json("summary.json", s);
  return ctx.result;
}

std::string emit_report(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("report: no such directory " + dir.string());
  for (const char* f : {"summary.json", "config.toml"})
    if (!fs::exists(dir / f)) throw std::runtime_error("report: missing artifact " + (dir / f).string());
  const Json s = read_json(dir / "summary.json");
  const ExperimentConfig cfg = load_config((dir / "config.toml").string());

  auto val = [](const Json& j) -> std::string {
    if (j.is_number()) return num(j.get<double>());
    if (j.is_string()) return j.get<std::string>();
    return j.dump();
  };
  std::ostringstream o;
  o << "run        " << dir.string() << "\n";
  o << "config     " << s.at("config_hash").get<std::string>();
  if (s.at("config_hash").get<std::string>() != config_hash(cfg)) o << " (config.toml differs!)";
  o << "\n";
  o << "field      " << cfg.field_kind << ", gamma " << num(cfg.gamma) << ", dim " << cfg.dim << ", L "
    << num(cfg.L) << ", n " << cfg.n << "\n";
  o << "norm       L^" << num(cfg.p) << "(" << cfg.family << "^" << num(cfg.theta) << ")\n\n";

  o << "certificates\n";
  for (const auto& [name, c] : s.at("certificates").items())
    o << "  " << (c.at("pass").get<bool>() ? "PASS" : "FAIL") << "  " << name << ": "
      << c.at("detail").get<std::string>() << "\n";
  o << "  overall: " << (s.at("all_pass").get<bool>() ? "PASS" : "FAIL") << "\n\n";

  const Json& th = s.at("theory");
  o << "theory (" << val(th.at("case")) << ")\n";
  o << "  sigma*_L = " << val(th.at("sigma_L")) << ", sigma*_B = " << val(th.at("sigma_B"))
    << " (gamma/(2-gamma) = " << num(cfg.gamma / (2.0 - cfg.gamma)) << ")\n";
  o << "  C_F = " << val(th.at("C_F")) << ", k* = " << val(th.at("k_star")) << "\n";
  if (s.contains("fit")) {
    const Json& f = s.at("fit");
    o << "\nfitted decay in " << val(f.at("norm")) << ", window [" << val(f.at("window")[0]) << ", "
      << val(f.at("window")[1]) << "], R^2 " << val(f.at("r2")) << "\n";
    if (f.contains("lambda_hat")) {
      o << "  lambda-hat = " << val(f.at("lambda_hat")) << " with sigma used " << val(f.at("sigma"))
        << " (critical sigmas " << val(th.at("sigma_L")) << ", " << val(th.at("sigma_B")) << ")\n";
      if (th.contains("lambda_star")) o << "  lambda* = " << val(th.at("lambda_star")) << "\n";
    }
    if (f.contains("beta_hat")) {
      o << "  beta-hat = " << val(f.at("beta_hat"));
      if (th.contains("beta_bound")) o << " vs (k-k*)/(2-gamma) = " << val(th.at("beta_bound"));
      o << "\n";
    }
    if (f.contains("envelope"))
      o << "  envelope beta = " << val(f.at("envelope").at("beta")) << ", max violation "
        << val(f.at("envelope").at("max_violation")) << "\n";
  }
  if (s.contains("splitting")) {
    const Json& sp = s.at("splitting");
    o << "\nsplitting  M = " << val(sp.at("M")) << ", R = " << val(sp.at("R")) << ", certificate max "
      << val(sp.at("certificate_max")) << ", a* = " << val(sp.at("a_star")) << "\n";
  }
  if (s.contains("poincare"))
    o << "\nweak Poincare mu = " << val(s.at("poincare").at("mu")) << "\n";
  return o.str();
}

std::vector<SweepEntry> sweep(const fs::path& dir, int jobs) {
  if (!fs::is_directory(dir)) throw std::runtime_error("sweep: no such directory " + dir.string());
  std::vector<SweepEntry> entries;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".toml") entries.push_back({e.path(), {}, false, {}});
  std::sort(entries.begin(), entries.end(), [](const SweepEntry& a, const SweepEntry& b) { return a.config < b.config; });

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < entries.size(); i = next++) {
      SweepEntry& e = entries[i];
      try {
        ExperimentConfig cfg = load_config(e.config.string());
        ExperimentConfig placement = cfg;
        placement.output.clear();
        e.dir = experiment_dir(placement, e.config.stem().string());
        e.ok = run_experiment(cfg, e.dir).all_pass();
      } catch (const std::exception& ex) {
        e.error = ex.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(entries.size())));
  std::vector<std::thread> pool;
  for (int k = 0; k + 1 < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return entries;
}

}  // namespace subfp
