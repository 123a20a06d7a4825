#include "pitchfork/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pitchfork/attractor.hpp"
#include "pitchfork/errors.hpp"
#include "pitchfork/fokker_planck.hpp"
#include "pitchfork/lyapunov.hpp"
#include "pitchfork/measures.hpp"
#include "pitchfork/noise.hpp"
#include "pitchfork/parallel.hpp"
#include "pitchfork/rng.hpp"
#include "pitchfork/sde.hpp"

namespace pitchfork {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---- schema ---------------------------------------------------------------

enum class FieldType { Double, Integer, Boolean, List, Enum };

struct FieldSpec {
  FieldType type;
  std::string default_value;
  std::string requirement;  // human-readable constraint used in diagnostics
  double lo = 0.0, hi = 0.0;
  bool lo_open = false, hi_open = false, bounded = false;
  std::vector<std::string> choices;
};

const std::map<std::string, FieldSpec>& schema() {
  static const std::map<std::string, FieldSpec> s = [] {
    std::map<std::string, FieldSpec> m;
    auto open_interval = [](const std::string& def, double lo, double hi) {
      FieldSpec f{FieldType::Double, def, "", lo, hi, true, true, true, {}};
      char buf[128];
      std::snprintf(buf, sizeof(buf), "must lie in the open interval (%g,%g)", lo, hi);
      f.requirement = buf;
      return f;
    };
    auto positive = [](const std::string& def) {
      return FieldSpec{FieldType::Double, def, "must be positive", 0.0, 0.0, true, false, true, {}};
    };
    auto nonneg = [](const std::string& def) {
      return FieldSpec{FieldType::Double, def, "must be nonnegative", 0.0, 0.0, false, false, true, {}};
    };
    auto any_real = [](const std::string& def) {
      return FieldSpec{FieldType::Double, def, "", 0.0, 0.0, false, false, false, {}};
    };
    auto pos_int = [](const std::string& def) {
      return FieldSpec{FieldType::Integer, def, "must be a positive integer", 1.0, 0.0,
                       false, false, true, {}};
    };
    auto boolean = [](const std::string& def) {
      return FieldSpec{FieldType::Boolean, def, "must be true or false", 0, 0, false, false, false, {}};
    };
    auto list = [](const std::string& def) {
      return FieldSpec{FieldType::List, def, "must be a comma-separated list of reals",
                       0, 0, false, false, false, {}};
    };

    FieldSpec experiment{FieldType::Enum, "", "", 0, 0, false, false, false,
                         {"path", "attractor", "lyapunov", "ftle", "spectrum", "density",
                          "smallball", "ergodicity", "vicinity"}};
    experiment.requirement =
        "must be one of path, attractor, lyapunov, ftle, spectrum, density, smallball, "
        "ergodicity, vicinity";
    m["experiment"] = experiment;

    m["model.beta"] = any_real("1");
    m["model.cubic"] = boolean("true");
    m["model.x0"] = any_real("0");

    m["noise.alpha"] = open_interval("1.5", 1.0, 2.0);
    m["noise.sigma"] = nonneg("0.5");
    FieldSpec mode{FieldType::Enum, "non_truncated", "must be truncated or non_truncated",
                   0, 0, false, false, false, {"truncated", "non_truncated"}};
    m["noise.mode"] = mode;
    m["noise.small_jump_cutoff"] = open_interval("0.01", 0.0, 1.0);
    m["noise.seed"] = FieldSpec{FieldType::Integer, "42", "must be a nonnegative integer",
                                0.0, 0.0, false, false, true, {}};

    m["grid.dt"] = positive("0.001");
    m["grid.t_start"] = any_real("0");
    m["grid.t_end"] = any_real("1");

    m["pullback.horizon"] = positive("50");
    m["pullback.max_horizon"] = positive("800");
    m["pullback.tolerance"] = positive("1e-8");
    m["pullback.interval_lo"] = any_real("-10");
    m["pullback.interval_hi"] = any_real("10");

    m["run.T"] = positive("1");
    m["run.n_paths"] = pos_int("10000");
    m["run.burn_in"] = nonneg("10");
    m["run.epsilon"] = positive("0.5");
    m["run.epsilons"] = list("0.5,0.75,1.0");
    m["run.horizons"] = list("0.5,1,2");
    m["run.t_checkpoints"] = list("0.25,0.5,0.75,1,1.5,2,2.5,3,3.5");
    m["run.initial_point"] = any_real("5");
    m["run.reference_paths"] = pos_int("10000");

    m["density.halfwidth"] = positive("8");
    m["density.n_points"] = pos_int("4096");
    m["density.residual_tol"] = positive("1e-8");
    m["density.max_cycles"] = pos_int("120");
    m["density.auto_domain"] = boolean("true");
    FieldSpec method{FieldType::Enum, "spectral", "must be spectral or positive_kernel",
                     0, 0, false, false, false, {"spectral", "positive_kernel"}};
    m["density.method"] = method;
    return m;
  }();
  return s;
}

[[noreturn]] void reject(const std::string& key, const std::string& value,
                         const std::string& requirement) {
  throw std::invalid_argument(key + " = " + value + ": " + requirement);
}

// ---- typed view over a validated config ------------------------------------

class Params {
 public:
  explicit Params(const ExperimentConfig& config) : config_(config) {
    for (const auto& [key, value] : config.entries()) {
      const auto it = schema().find(key);
      if (it == schema().end()) throw std::invalid_argument("unknown configuration key '" + key + "'");
      check(key, value, it->second);
    }
    if (!config.has("experiment"))
      throw std::invalid_argument("experiment: missing (choose the analysis to run)");
  }

  std::string raw(const std::string& key) const {
    const auto& e = config_.entries();
    const auto it = e.find(key);
    if (it != e.end()) return it->second;
    return schema().at(key).default_value;
  }

  double real(const std::string& key) const { return std::stod(raw(key)); }
  int64_t integer(const std::string& key) const { return std::stoll(raw(key)); }
  bool boolean(const std::string& key) const { return raw(key) == "true" || raw(key) == "1"; }
  std::string text(const std::string& key) const { return raw(key); }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(raw(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
  }

  NoiseConfig noise() const {
    NoiseConfig n;
    n.alpha = real("noise.alpha");
    n.sigma = real("noise.sigma");
    n.mode = text("noise.mode") == "truncated" ? NoiseMode::Truncated : NoiseMode::NonTruncated;
    n.small_jump_cutoff = real("noise.small_jump_cutoff");
    n.seed = uint64_t(integer("noise.seed"));
    return n;
  }

  ModelParams model() const {
    ModelParams m;
    m.beta = real("model.beta");
    m.cubic = boolean("model.cubic");
    m.noise = noise();
    return m;
  }

  PullbackOptions pullback() const {
    PullbackOptions o;
    o.horizon = real("pullback.horizon");
    o.max_horizon = real("pullback.max_horizon");
    o.tolerance = real("pullback.tolerance");
    o.dt = real("grid.dt");
    o.interval_lo = real("pullback.interval_lo");
    o.interval_hi = real("pullback.interval_hi");
    if (!(o.interval_hi > o.interval_lo))
      reject("pullback.interval_hi", raw("pullback.interval_hi"),
             "must exceed pullback.interval_lo");
    return o;
  }

 private:
  static void check(const std::string& key, const std::string& value, const FieldSpec& spec) {
    const auto fail = [&](const std::string& why) { reject(key, value, why); };
    switch (spec.type) {
      case FieldType::Enum: {
        if (std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end())
          fail(spec.requirement);
        return;
      }
      case FieldType::Boolean: {
        if (value != "true" && value != "false" && value != "0" && value != "1")
          fail(spec.requirement);
        return;
      }
      case FieldType::List: {
        std::stringstream ss(value);
        std::string item;
        int count = 0;
        while (std::getline(ss, item, ',')) {
          item = trim(item);
          if (item.empty()) continue;
          try {
            size_t used = 0;
            (void)std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument("");
          } catch (...) {
            fail(spec.requirement);
          }
          ++count;
        }
        if (count == 0) fail("must contain at least one value");
        return;
      }
      case FieldType::Integer: {
        long long v = 0;
        try {
          size_t used = 0;
          v = std::stoll(value, &used);
          if (used != value.size()) throw std::invalid_argument("");
        } catch (...) {
          fail(spec.requirement);
        }
        if (v < 0 || (spec.bounded && v < (long long)spec.lo)) fail(spec.requirement);
        return;
      }
      case FieldType::Double: {
        double v = 0.0;
        try {
          size_t used = 0;
          v = std::stod(value, &used);
          if (used != value.size()) throw std::invalid_argument("");
        } catch (...) {
          fail("must be a real number");
        }
        if (!spec.bounded) return;
        const bool lo_ok = spec.lo_open ? v > spec.lo : v >= spec.lo;
        const bool hi_ok = !spec.hi_open || v < spec.hi;
        if (!lo_ok || !hi_ok) fail(spec.requirement);
        return;
      }
    }
  }

  const ExperimentConfig& config_;
};

// ---- output helpers ---------------------------------------------------------

class CsvFile {
 public:
  CsvFile(const std::string& path, const std::string& header) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open output file " + path);
    out_ << header << "\n";
  }
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (const double v : values) {
      if (!first) out_ << ',';
      out_ << fmt(v);
      first = false;
    }
    out_ << '\n';
  }
  void raw_row(const std::string& line) { out_ << line << '\n'; }

 private:
  std::ofstream out_;
};

struct Context {
  const Params& params;
  std::string out_dir;
  int threads;
  ReportBundle* bundle;

  std::string file(const std::string& name) const {
    bundle->files.push_back(name);
    return out_dir + "/" + name;
  }
};

// ---- experiments ------------------------------------------------------------

void run_path(const Context& ctx) {
  const Params& P = ctx.params;
  const TimeGrid grid = TimeGrid::with_dt(P.real("grid.t_start"), P.real("grid.t_end"),
                                          P.real("grid.dt"));
  const NoisePath path = sample_path(P.noise(), grid, 0);
  {
    std::ofstream os(ctx.file("path.csv"), std::ios::binary);
    path.write_csv(os);
  }
  const Trajectory traj = integrate(P.model(), path, P.real("model.x0"));
  {
    std::ofstream os(ctx.file("trajectory.csv"), std::ios::binary);
    traj.write_csv(os);
  }
  ctx.bundle->summary["final_x"] = traj.states.back();
  ctx.bundle->summary["max_abs_jump"] = path.max_abs_jump;
}

void run_attractor(const Context& ctx) {
  const Params& P = ctx.params;
  const ModelParams model = P.model();
  const PullbackOptions opts = P.pullback();
  const auto n_paths = uint64_t(P.integer("run.n_paths"));
  std::vector<EnsembleRecord> records(n_paths);
  parallel_for(int64_t(n_paths), ctx.threads, [&](int64_t p) {
    const PullbackResult r = pullback_equilibrium(model, uint64_t(p), opts);
    records[size_t(p)] = {uint64_t(p), r.equilibrium_estimate, r.diameter, r.pullback_horizon,
                          r.collapsed};
  });
  CsvFile csv(ctx.file("attractor.csv"), "path_id,equilibrium,diameter,collapsed");
  uint64_t collapsed = 0;
  double max_diameter = 0.0, mean = 0.0;
  for (const auto& r : records) {
    csv.row({double(r.path_id), r.equilibrium, r.diameter, r.collapsed ? 1.0 : 0.0});
    collapsed += r.collapsed ? 1 : 0;
    max_diameter = std::max(max_diameter, r.diameter);
    mean += r.equilibrium;
  }
  ctx.bundle->summary["collapsed_fraction"] = double(collapsed) / double(n_paths);
  ctx.bundle->summary["max_diameter"] = max_diameter;
  ctx.bundle->summary["mean_equilibrium"] = mean / double(n_paths);
}

void run_lyapunov(const Context& ctx) {
  const Params& P = ctx.params;
  AsymptoticOptions opts;
  opts.burn_in = P.real("run.burn_in");
  opts.pullback = P.pullback();
  const AsymptoticLyapunov result = asymptotic_lyapunov(P.model(), P.real("run.T"), opts);
  CsvFile csv(ctx.file("lyapunov_batches.csv"), "batch,mean");
  for (size_t k = 0; k < result.batch_means.size(); ++k)
    csv.row({double(k), result.batch_means[k]});
  ctx.bundle->summary["estimate"] = result.estimate;
  ctx.bundle->summary["std_error"] = result.std_error;
  ctx.bundle->summary["limit_certified"] = result.limit_certified ? 1.0 : 0.0;
}

void run_ftle(const Context& ctx) {
  const Params& P = ctx.params;
  const FtleDistribution dist = ftle_distribution(P.model(), P.real("run.T"),
                                                  uint64_t(P.integer("run.n_paths")),
                                                  P.pullback(), ctx.threads);
  CsvFile csv(ctx.file("ftle.csv"), "omega_id,T,lambda");
  for (const auto& s : dist.samples) csv.row({double(s.omega_id), s.T, s.value});
  ctx.bundle->summary["p_positive"] = dist.p_positive;
  ctx.bundle->summary["ci_halfwidth"] = dist.ci_halfwidth;
  ctx.bundle->summary["lambda_max"] = dist.values.samples().back();
  ctx.bundle->summary["lambda_min"] = dist.values.samples().front();
}

void run_spectrum(const Context& ctx) {
  const Params& P = ctx.params;
  const SpectrumReport report = dichotomy_spectrum_probe(
      P.model(), P.list("run.horizons"), uint64_t(P.integer("run.n_paths")), P.pullback(),
      ctx.threads);
  CsvFile csv(ctx.file("spectrum.csv"), "T,rate_min,rate_max,n_paths");
  for (const auto& row : report.rows)
    csv.row({row.T, row.rate_min, row.rate_max, double(row.n_paths)});
  ctx.bundle->summary["rate_max_last"] = report.rows.back().rate_max;
  ctx.bundle->summary["rate_min_last"] = report.rows.back().rate_min;
}

void run_density(const Context& ctx) {
  const Params& P = ctx.params;
  const ModelParams model = P.model();
  DensityGrid density;
  try {
    DensitySolverOptions opts;
    opts.residual_tol = P.real("density.residual_tol");
    opts.max_cycles = int(P.integer("density.max_cycles"));
    if (P.text("density.method") == "positive_kernel")
      opts.method = DensityMethod::PositiveKernel;
    if (P.boolean("density.auto_domain") && opts.method == DensityMethod::SpectralMultiplier) {
      density = stationary_density_auto(model);
    } else {
      DensityGridSpec spec{P.real("density.halfwidth"), int(P.integer("density.n_points"))};
      density = stationary_density(model, spec, opts);
    }
  } catch (const SolverError& err) {
    std::ofstream os(ctx.file("residual_history.txt"), std::ios::binary);
    os << "residual\n";
    for (const double r : err.residual_history) os << fmt(r) << "\n";
    throw;
  }
  {
    CsvFile csv(ctx.file("density.csv"), "x,p");
    for (int i = 0; i < density.n_points; ++i)
      csv.row({density.node(i), density.values[size_t(i)]});
  }
  double min_p = density.values[0];
  for (const double v : density.values) min_p = std::min(min_p, v);
  const double lambda_direct = model.beta - 3.0 * density_moment(density, 2);
  // The Dirichlet-form route needs log p, which is meaningless at nodes where
  // a spectral truncated-mode solve bottomed out at the roundoff floor.
  const bool have_dirichlet = min_p > 0.0;
  double lambda_dirichlet = 0.0;
  if (have_dirichlet) lambda_dirichlet = lyapunov_from_density(density).dirichlet;
  {
    std::ofstream os(ctx.file("solver_report.txt"), std::ios::binary);
    os << "halfwidth = " << fmt(density.halfwidth) << "\n";
    os << "n_points = " << density.n_points << "\n";
    os << "iterations = " << density.diagnostics.iterations << "\n";
    os << "max_mass_drift = " << fmt(density.diagnostics.max_mass_drift) << "\n";
    os << "min_p = " << fmt(min_p) << "\n";
    for (int k = 0; k <= 4; ++k)
      os << "moment_" << k << " = " << fmt(density_moment(density, k)) << "\n";
    os << "lambda_direct = " << fmt(lambda_direct) << "\n";
    if (have_dirichlet) os << "lambda_dirichlet = " << fmt(lambda_dirichlet) << "\n";
    else os << "lambda_dirichlet = skipped (density touches the roundoff floor)\n";
    os << "residual_history =";
    for (const double r : density.diagnostics.residual_history) os << " " << fmt(r);
    os << "\n";
  }
  ctx.bundle->summary["lambda_direct"] = lambda_direct;
  if (have_dirichlet) ctx.bundle->summary["lambda_dirichlet"] = lambda_dirichlet;
  ctx.bundle->summary["m2"] = density_moment(density, 2);
  ctx.bundle->summary["min_p"] = min_p;
  ctx.bundle->summary["mass_error"] = std::fabs(density_moment(density, 0) - 1.0);
}

void run_smallball(const Context& ctx) {
  const Params& P = ctx.params;
  const NoiseConfig noise = P.noise();
  const auto n_paths = uint64_t(P.integer("run.n_paths"));
  CsvFile csv(ctx.file("smallball.csv"), "epsilon,T,scaling,estimate,ci_halfwidth");
  std::vector<double> xs, ys;
  for (const double T : P.list("run.horizons")) {
    for (const double eps : P.list("run.epsilons")) {
      const SmallBallEstimate est = small_ball_probability(noise, T, eps, n_paths, ctx.threads);
      const double scaling = T * std::pow(eps, -noise.alpha);
      csv.row({eps, T, scaling, est.estimate, est.ci_halfwidth});
      if (est.estimate > 0.0) {
        xs.push_back(scaling);
        ys.push_back(std::log(est.estimate));
      }
    }
  }
  if (xs.size() >= 2) {
    const LinearFit fit = linear_fit(xs, ys);
    ctx.bundle->summary["slope"] = fit.slope;
    ctx.bundle->summary["intercept"] = fit.intercept;
    ctx.bundle->summary["r_squared"] = fit.r_squared;
  }
}

void run_ergodicity(const Context& ctx) {
  const Params& P = ctx.params;
  const ModelParams model = P.model();
  const auto reference =
      equilibrium_ensemble(model, uint64_t(P.integer("run.reference_paths")), P.pullback(),
                           ctx.threads);
  const EmpiricalMeasure initial(std::vector<double>{P.real("run.initial_point")});
  const DecayReport report =
      ergodicity_decay(model, initial, P.list("run.t_checkpoints"),
                       uint64_t(P.integer("run.n_paths")), reference.measure, ctx.threads);
  {
    CsvFile csv(ctx.file("decay.csv"), "t,w1");
    for (const auto& pt : report.points) csv.row({pt.t, pt.w1});
  }
  {
    std::ofstream os(ctx.file("fit.txt"), std::ios::binary);
    os << "K,c,R2\n" << fmt(report.prefactor) << "," << fmt(report.rate) << ","
       << fmt(report.r_squared) << "\n";
  }
  ctx.bundle->summary["c"] = report.rate;
  ctx.bundle->summary["K"] = report.prefactor;
  ctx.bundle->summary["r_squared"] = report.r_squared;
  ctx.bundle->summary["noise_floor"] = report.noise_floor;
}

void run_vicinity(const Context& ctx) {
  const Params& P = ctx.params;
  const VicinityEstimate est =
      vicinity_probability(P.model(), P.real("run.epsilon"), P.real("run.T"),
                           uint64_t(P.integer("run.n_paths")), P.pullback(), ctx.threads);
  CsvFile csv(ctx.file("vicinity.csv"), "path_id,held");
  for (size_t p = 0; p < est.held.size(); ++p) csv.row({double(p), double(est.held[p])});
  ctx.bundle->summary["estimate"] = est.estimate;
  ctx.bundle->summary["ci_halfwidth"] = est.ci_halfwidth;
}

void write_manifest(const Context& ctx, const ExperimentConfig& config) {
  std::ofstream os(ctx.out_dir + "/manifest.txt", std::ios::binary);
  os << "tool = " << kToolVersion << "\n";
  os << "experiment = " << ctx.params.text("experiment") << "\n";
  os << "seed = " << ctx.params.integer("noise.seed") << "\n";
  os << "threads = " << ctx.threads << "\n";
  os << "wall_time_s = " << fmt(ctx.bundle->wall_time_s) << "\n";
  for (const auto& [key, value] : config.entries()) os << "config." << key << " = " << value << "\n";
  for (const auto& [key, value] : ctx.bundle->summary)
    os << "summary." << key << " = " << fmt(value) << "\n";
}

}  // namespace

// ---- config parsing ---------------------------------------------------------

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  ExperimentConfig config;
  std::stringstream ss(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    const std::string qualified = section.empty() ? key : section + "." + key;
    if (config.entries_.count(qualified))
      throw std::invalid_argument("duplicate configuration key '" + qualified + "'");
    config.entries_[qualified] = value;
  }
  return config;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

bool ExperimentConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string ExperimentConfig::resolve_key(const std::string& name) const {
  if (schema().count(name)) return name;
  std::vector<std::string> matches;
  for (const auto& [key, spec] : schema()) {
    (void)spec;
    const auto dot = key.rfind('.');
    if (dot != std::string::npos && key.substr(dot + 1) == name) matches.push_back(key);
  }
  if (matches.empty())
    throw std::invalid_argument("unknown parameter '" + name + "'");
  if (matches.size() > 1)
    throw std::invalid_argument("parameter '" + name + "' is ambiguous");
  return matches.front();
}

// ---- runners ------------------------------------------------------------------

ReportBundle run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                            int threads) {
  const auto start = std::chrono::steady_clock::now();
  const Params params(config);  // full validation before any computation
  std::filesystem::create_directories(out_dir);
  ReportBundle bundle;
  Context ctx{params, out_dir, resolve_threads(threads), &bundle};
  const std::string experiment = params.text("experiment");
  if (experiment == "path") run_path(ctx);
  else if (experiment == "attractor") run_attractor(ctx);
  else if (experiment == "lyapunov") run_lyapunov(ctx);
  else if (experiment == "ftle") run_ftle(ctx);
  else if (experiment == "spectrum") run_spectrum(ctx);
  else if (experiment == "density") run_density(ctx);
  else if (experiment == "smallball") run_smallball(ctx);
  else if (experiment == "ergodicity") run_ergodicity(ctx);
  else if (experiment == "vicinity") run_vicinity(ctx);
  bundle.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(ctx, config);
  return bundle;
}

ReportBundle run_sweep(const ExperimentConfig& base, const std::string& parameter,
                       const std::vector<double>& values, const std::string& out_dir,
                       int threads) {
  const auto start = std::chrono::steady_clock::now();
  if (values.empty()) throw std::invalid_argument("sweep: values list must not be empty");
  const std::string key = base.resolve_key(parameter);
  const auto spec_it = schema().find(key);
  if (spec_it->second.type != FieldType::Double && spec_it->second.type != FieldType::Integer)
    throw std::invalid_argument("sweep: parameter '" + key + "' is not numeric");
  { const Params check(base); (void)check; }

  std::filesystem::create_directories(out_dir);
  ReportBundle bundle;
  const Params base_params(base);
  const auto base_seed = uint64_t(base_params.integer("noise.seed"));

  struct Row {
    double value;
    std::string status;
    std::map<std::string, double> summary;
  };
  std::vector<Row> rows;
  std::set<std::string> columns;
  for (size_t i = 0; i < values.size(); ++i) {
    ExperimentConfig derived = base;
    derived.set(key, fmt(values[i]));
    // Masked to 63 bits so the value survives a round trip through the
    // signed-integer config field.
    derived.set("noise.seed", std::to_string(derive_seed(base_seed, i) & 0x7fffffffffffffffull));
    const std::string sub = out_dir + "/" + parameter + "_" + fmt(values[i]);
    Row row{values[i], "ok", {}};
    try {
      const ReportBundle r = run_experiment(derived, sub, threads);
      row.summary = r.summary;
      for (const auto& [k, v] : r.summary) {
        (void)v;
        columns.insert(k);
      }
    } catch (const std::exception& err) {
      row.status = "failed";
      std::ofstream os(sub + "_error.txt", std::ios::binary);
      os << err.what() << "\n";
    }
    rows.push_back(std::move(row));
  }

  {
    std::ofstream os(out_dir + "/sweep.csv", std::ios::binary);
    os << "param,value,status";
    for (const auto& c : columns) os << "," << c;
    os << "\n";
    for (const auto& row : rows) {
      os << parameter << "," << fmt(row.value) << "," << row.status;
      for (const auto& c : columns) {
        os << ",";
        const auto it = row.summary.find(c);
        if (it != row.summary.end()) os << fmt(it->second);
      }
      os << "\n";
    }
  }
  bundle.files.push_back("sweep.csv");
  for (const auto& row : rows)
    bundle.summary["failed_values"] += row.status == "failed" ? 1.0 : 0.0;
  bundle.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return bundle;
}

}  // namespace pitchfork
