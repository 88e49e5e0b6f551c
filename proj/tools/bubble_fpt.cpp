// bubble_fpt: calibration, simulation, densities and downside prediction for
// the exponentially-decayed mean-reversion model.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bubble/bubble.hpp"

using namespace bubble;
using json = nlohmann::json;

namespace
{

struct Options
{
  std::string input;
  std::string output;
  std::string json_output;
  std::string quantiles;
  std::string params_file;
  std::uint64_t seed{42};
  std::size_t paths{0};
  double dt{0.0};
  double horizon{0.0};
  std::vector<double> drops;
  std::vector<double> times;
  std::string t1, t2, t3;
  std::optional<double> xr;
  bool validate{false};
  bool long_format{false};

  std::optional<double> epsilon, alpha, c, sigma;
  std::optional<double> x, a, x0;
  std::optional<double> price_now, p0;
  double t_max{50.0};
  std::size_t points{500};
  double u_min{-3.0};
  double u_max{3.0};
};

constexpr double max_cells = 1e8;

/// Writes to --output, or stdout when it is empty.
class Sink
{
public:
  explicit Sink(const std::string & path)
  {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) { throw Error(ErrorKind::invalid_input, "cannot write " + path); }
    }
  }

  std::ostream & stream() { return file_.is_open() ? static_cast<std::ostream &>(file_) : std::cout; }

private:
  std::ofstream file_;
};

double round6(double v) { return io::round_significant(v, 6); }

ModelParams load_params(const Options & o)
{
  double eps = 0.0, alpha = 0.0, c = 0.0, sigma = 1.0;
  bool have_eps = false, have_alpha = false, have_c = false;
  if (!o.params_file.empty()) {
    std::ifstream in(o.params_file);
    if (!in) { throw Error(ErrorKind::invalid_input, "cannot open " + o.params_file); }
    json j;
    try {
      in >> j;
      eps = j.at("epsilon").get<double>();
      alpha = j.at("alpha").get<double>();
      c = j.at("c").get<double>();
      sigma = j.value("sigma", 1.0);
    } catch (const json::exception & e) {
      throw Error(ErrorKind::invalid_input, o.params_file + ": " + e.what());
    }
    have_eps = have_alpha = have_c = true;
  }
  if (o.epsilon) { eps = *o.epsilon, have_eps = true; }
  if (o.alpha) { alpha = *o.alpha, have_alpha = true; }
  if (o.c) { c = *o.c, have_c = true; }
  if (o.sigma) { sigma = *o.sigma; }
  if (!have_eps || !have_alpha || !have_c) {
    throw Error(ErrorKind::invalid_input, "model parameters missing: give --epsilon, --alpha, --c or --params");
  }
  return ModelParams(eps, alpha, c, sigma, o.x0.value_or(0.0), EpsilonRule::allow_zero);
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n, bool include_lo)
{
  detail::require(n >= 1, ErrorKind::invalid_input, "--points must be >= 1");
  std::vector<double> out;
  for (std::size_t k = include_lo ? 0 : 1; k <= n; ++k) {
    out.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n));
  }
  return out;
}

std::size_t step_count(double horizon, double dt)
{
  detail::require(std::isfinite(horizon) && horizon > 0.0, ErrorKind::invalid_input, "--horizon must be > 0");
  detail::require(std::isfinite(dt) && dt > 0.0, ErrorKind::invalid_input, "--dt must be > 0");
  return static_cast<std::size_t>(std::max(1.0, std::round(horizon / dt)));
}

// ---------------------------------------------------------------------------

int cmd_calibrate(const Options & o)
{
  detail::require(!o.input.empty(), ErrorKind::invalid_input, "--input is required");
  detail::require(!o.t1.empty() && !o.t2.empty() && !o.t3.empty(), ErrorKind::invalid_input,
                  "regime dates --t1 --t2 --t3 are required");
  detail::require(o.xr.has_value(), ErrorKind::invalid_input, "--xr (equilibrium level) is required");
  const PriceSeries series = io::ingest_csv(o.input);
  std::vector<std::string> warnings;
  const RegimeSegmentation seg = segmentation_from_dates(series, o.t1, o.t2, o.t3, *o.xr, &warnings);
  CalibrationReport report = calibrate(series, seg);
  warnings.insert(warnings.end(), report.warnings.begin(), report.warnings.end());

  const ModelParams & p = report.params;
  json j = {
      {"epsilon", round6(p.epsilon())},
      {"alpha", round6(p.alpha())},
      {"sigma", round6(p.sigma())},
      {"c", round6(p.c())},
      {"x_r", round6(*o.xr)},
      {"r_bar_I", round6(report.r_bar_I)},
      {"r_bar_III", round6(report.r_bar_III)},
      {"regimes",
       {{"t1", series.dates()[seg.t1]}, {"t2", series.dates()[seg.t2]}, {"t3", series.dates()[seg.t3]}}},
      {"warnings", warnings},
  };
  Sink sink(o.output);
  sink.stream() << j.dump(2) << '\n';
  return 0;
}

int cmd_simulate(const Options & o)
{
  const ModelParams p = load_params(o);
  const double horizon = o.horizon > 0.0 ? o.horizon : 1.0;
  const double dt = o.dt > 0.0 ? o.dt : default_dt;
  const std::size_t n_paths = o.paths > 0 ? o.paths : 100;
  const std::size_t n_steps = step_count(horizon, dt);
  if (static_cast<double>(n_paths) * static_cast<double>(n_steps) > max_cells) {
    throw Error(ErrorKind::invalid_input, "paths x steps = " + std::to_string(n_paths * n_steps) +
                                              " exceeds 1e8; lower --paths, raise --dt or shorten --horizon");
  }
  const double step = horizon / static_cast<double>(n_steps);

  std::vector<std::vector<double>> states(n_paths);
  std::vector<double> times;
  for (std::size_t i = 0; i < n_paths; ++i) {
    const auto noise = NoiseGrid::gaussian(n_steps, step, o.seed, i);
    Trajectory traj = exact_path_extended(p, horizon, n_steps, noise);
    if (i == 0) { times = traj.times; }
    states[i] = std::move(traj.states);
  }

  Sink sink(o.output);
  auto & out = sink.stream();
  if (o.long_format) {
    out << "path,t,x\n";
    for (std::size_t i = 0; i < n_paths; ++i) {
      for (std::size_t k = 0; k <= n_steps; ++k) {
        out << i << ',' << io::format_number(times[k]) << ',' << io::format_number(states[i][k]) << '\n';
      }
    }
  } else {
    out << 't';
    for (std::size_t i = 0; i < n_paths; ++i) { out << ",path_" << i; }
    out << '\n';
    for (std::size_t k = 0; k <= n_steps; ++k) {
      out << io::format_number(times[k]);
      for (std::size_t i = 0; i < n_paths; ++i) { out << ',' << io::format_number(states[i][k]); }
      out << '\n';
    }
  }

  if (!o.quantiles.empty()) {
    io::Table table{{"t", "q05", "q50", "q95"}, {}};
    std::vector<double> column(n_paths);
    auto quantile = [&](double q) {
      // linear interpolation between order statistics
      const double pos = q * static_cast<double>(n_paths - 1);
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const std::size_t hi = std::min(lo + 1, n_paths - 1);
      return column[lo] + (pos - static_cast<double>(lo)) * (column[hi] - column[lo]);
    };
    for (std::size_t k = 0; k <= n_steps; ++k) {
      for (std::size_t i = 0; i < n_paths; ++i) { column[i] = states[i][k]; }
      std::sort(column.begin(), column.end());
      table.rows.push_back({times[k], quantile(0.05), quantile(0.5), quantile(0.95)});
    }
    std::ofstream qf(o.quantiles, std::ios::binary);
    if (!qf) { throw Error(ErrorKind::invalid_input, "cannot write " + o.quantiles); }
    io::write_table(qf, table);
  }
  return 0;
}

int cmd_density(const Options & o)
{
  const ModelParams p = load_params(o);
  detail::require(o.horizon > 0.0, ErrorKind::invalid_input, "--horizon (the time t) must be > 0");
  const double x = o.x.value_or(p.x0());
  const StandardForm sf = scale_to_standard(p);
  std::optional<StationaryLaw> law;
  if (p.c() > 0.0 && p.epsilon() > 0.0) { law.emplace(p); }

  io::Table table{{"u", "density", "abs_error", "low_confidence"}, {}};
  if (law) { table.columns.push_back("stationary"); }
  for (double u : uniform_grid(o.u_min, o.u_max, o.points, true)) {
    const DensityPoint d = density_xt(sf.scale_level(u), o.horizon, sf.params, sf.scale_level(x));
    std::vector<double> row{u, d.value * sf.level_factor, d.abs_error_estimate * sf.level_factor,
                            d.low_confidence ? 1.0 : 0.0};
    if (law) { row.push_back(law->density(u)); }
    table.rows.push_back(std::move(row));
  }
  Sink sink(o.output);
  io::write_table(sink.stream(), table);
  return 0;
}

int cmd_fptd(const Options & o)
{
  const ModelParams p = load_params(o);
  detail::require(o.a.has_value(), ErrorKind::invalid_input, "--a (boundary level) is required");
  const double x = o.x.value_or(p.x0());
  const auto times = uniform_grid(0.0, o.t_max, o.points, false);
  const FptDensityCurve curve = fptd_curve(p, x, *o.a, times);
  io::Table table{{"t", "density", "left_tail", "right_tail"}, {}};
  for (std::size_t k = 0; k < times.size(); ++k) {
    table.rows.push_back({curve.times[k], curve.densities[k], curve.left_tail[k], curve.right_tail[k]});
  }
  Sink sink(o.output);
  io::write_table(sink.stream(), table);
  return 0;
}

double start_level(const Options & o, double * price_now)
{
  if (o.price_now && o.p0) {
    detail::require(*o.price_now > 0.0 && *o.p0 > 0.0, ErrorKind::invalid_input, "prices must be > 0");
    *price_now = *o.price_now;
    return std::log(*o.price_now / *o.p0);
  }
  detail::require(o.x.has_value(), ErrorKind::invalid_input, "give --price-now and --p0, or --x");
  *price_now = o.price_now.value_or(std::exp(*o.x));
  return *o.x;
}

struct PeakError
{
  double time;
  double relative_error;
  double std_error;
};

PeakError peak_error(const ModelParams & p, double x, double a, std::size_t n_paths, std::uint64_t seed)
{
  const BoundaryFrame frame = shift_to_boundary(p, x, a);
  const double t_peak = fptd_peak_time(frame.params, frame.y);
  const ErrorEstimate e = error_estimate(t_peak, frame.params, frame.y, n_paths, t_peak / 400.0, seed);
  const double corrected = std::abs(e.density + e.q_hat);
  return {t_peak, e.relative_error, e.std_error / corrected};
}

int cmd_predict_min(const Options & o)
{
  const ModelParams p = load_params(o);
  const double horizon = o.horizon != 0.0 ? o.horizon : 22.0 / 250.0;
  detail::require(horizon > 0.0, ErrorKind::invalid_input, "--horizon must be > 0");
  double price_now = 0.0;
  const double x = start_level(o, &price_now);
  std::vector<double> drops = o.drops;
  if (drops.empty()) {
    for (int k = 0; k <= 12; ++k) { drops.push_back(0.05 * k); }
  }
  for (double d : drops) {
    detail::require(std::isfinite(d) && d >= 0.0 && d < 1.0, ErrorKind::invalid_input, "drop fractions must lie in [0, 1)");
  }
  const std::size_t n_paths = o.paths > 0 ? o.paths : 20000;

  io::Table table{{"drop", "price_level", "probability"}, {}};
  if (o.validate) { table.columns.push_back("peak_relative_error"); }
  json rows = json::array();
  for (double d : drops) {
    const double a = x + std::log1p(-d);
    const RunningMinProbability prob = running_min_cdf(horizon, a, p, x);
    std::vector<double> row{d, (1.0 - d) * price_now, prob.value};
    json jr = {{"drop", round6(d)},
               {"price_level", round6((1.0 - d) * price_now)},
               {"probability", round6(prob.value)},
               {"probability_pct", io::format_percent(prob.value)},
               {"clamped", prob.clamped}};
    if (o.validate) {
      if (d > 0.0) {
        const PeakError pe = peak_error(p, x, a, n_paths, o.seed);
        row.push_back(pe.relative_error);
        jr["peak_time"] = round6(pe.time);
        jr["peak_relative_error"] = round6(pe.relative_error);
        jr["peak_relative_error_pct"] = io::format_percent(pe.relative_error);
        jr["peak_relative_error_se"] = round6(pe.std_error);
      } else {
        // the passage is immediate, so there is no density peak to check
        row.push_back(0.0);
        jr["peak_relative_error"] = nullptr;
      }
    }
    table.rows.push_back(std::move(row));
    rows.push_back(std::move(jr));
  }

  Sink sink(o.output);
  io::write_table(sink.stream(), table);
  if (!o.json_output.empty()) {
    std::ofstream jf(o.json_output, std::ios::binary);
    if (!jf) { throw Error(ErrorKind::invalid_input, "cannot write " + o.json_output); }
    const json j = {{"horizon", round6(horizon)}, {"x", round6(x)}, {"price_now", round6(price_now)}, {"rows", rows}};
    jf << j.dump(2) << '\n';
  }
  return 0;
}

int cmd_validate(const Options & o)
{
  const ModelParams p = load_params(o);
  const double x = o.x.value_or(1.0);
  const double a = o.a.value_or(0.0);
  std::vector<double> times = o.times;
  if (times.empty()) { times = {0.25, 0.5, 1.0, 2.0}; }
  const std::size_t n_paths = o.paths > 0 ? o.paths : 10000;
  const double dt = o.dt > 0.0 ? o.dt : 1e-3;
  const BoundaryFrame frame = shift_to_boundary(p, x, a);
  const auto estimates = error_estimates(std::span<const double>(times), frame.params, frame.y, n_paths, dt, o.seed);
  json rows = json::array();
  for (const auto & e : estimates) {
    rows.push_back({{"t", round6(e.t)},
                    {"q_hat", round6(e.q_hat)},
                    {"std_error", round6(e.std_error)},
                    {"density", round6(e.density)},
                    {"relative_error", round6(e.relative_error)}});
  }
  const json j = {{"x", round6(x)}, {"a", round6(a)}, {"paths", n_paths}, {"dt", round6(dt)}, {"seed", o.seed},
                  {"rows", rows}};
  Sink sink(o.output);
  sink.stream() << j.dump(2) << '\n';
  return 0;
}

void add_model_flags(CLI::App & app, Options & o)
{
  app.add_option("--epsilon", o.epsilon, "Mean-reversion rate eps >= 0");
  app.add_option("--alpha", o.alpha, "Decay rate alpha > 0");
  app.add_option("--c", o.c, "Equilibrium constant c in [0, 1]");
  app.add_option("--sigma", o.sigma, "Volatility (default 1)");
  app.add_option("--params", o.params_file, "Calibration JSON supplying epsilon, alpha, c, sigma");
  app.add_option("--x0", o.x0, "Initial state for simulate (default 0)");
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Exponentially-decayed mean-reversion bubble model toolkit"};
  app.set_config("--config", "", "Flat 'key = value' configuration file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--input", o.input, "Price CSV with header date,price");
  app.add_option("--output", o.output, "Output file (default stdout)");
  app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
  app.add_option("--paths", o.paths, "Monte Carlo paths");
  app.add_option("--dt", o.dt, "Time step in years");
  app.add_option("--horizon", o.horizon, "Horizon or evaluation time in years");
  app.add_option("--drops", o.drops, "Drop fractions in [0, 1)")->delimiter(',');
  app.add_option("--times", o.times, "Evaluation times for validate")->delimiter(',');
  app.add_option("--t1", o.t1, "End of regime I (date)");
  app.add_option("--t2", o.t2, "End of regime II (date)");
  app.add_option("--t3", o.t3, "End of regime III (date)");
  app.add_option("--xr", o.xr, "Equilibrium log level of regime II");
  app.add_flag("--validate", o.validate, "Add Monte Carlo peak relative errors to predict-min");
  app.add_flag("--long", o.long_format, "Long-format path CSV (path,t,x)");
  app.add_option("--json", o.json_output, "JSON copy of the predict-min table");
  app.add_option("--quantiles", o.quantiles, "5/50/95% envelope CSV for simulate");
  app.add_option("--x", o.x, "Start level");
  app.add_option("--a", o.a, "Boundary level");
  app.add_option("--price-now", o.price_now, "Current price");
  app.add_option("--p0", o.p0, "Normalising price (first price of the calibration series)");
  app.add_option("--t-max", o.t_max, "Largest time of the fptd grid")->capture_default_str();
  app.add_option("--points", o.points, "Grid points for fptd and density")->capture_default_str();
  app.add_option("--u-min", o.u_min, "Lower end of the density grid")->capture_default_str();
  app.add_option("--u-max", o.u_max, "Upper end of the density grid")->capture_default_str();
  add_model_flags(app, o);

  int (*command)(const Options &) = nullptr;
  auto sub = [&](const char * name, const char * help, int (*fn)(const Options &)) {
    app.add_subcommand(name, help)->callback([&command, fn] { command = fn; });
  };
  sub("calibrate", "Estimate (epsilon, alpha, sigma, c) from a price CSV", cmd_calibrate);
  sub("simulate", "Simulate exact paths and their quantile envelope", cmd_simulate);
  sub("density", "Density of X_t on a grid", cmd_density);
  sub("fptd", "First-passage-time density to a lower boundary", cmd_fptd);
  sub("predict-min", "Probabilities that the price falls below given levels", cmd_predict_min);
  sub("validate", "Monte Carlo estimate of the second-order density error", cmd_validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return command(o);
  } catch (const Error & e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
