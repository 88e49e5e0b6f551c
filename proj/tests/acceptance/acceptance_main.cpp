// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "bubble/bubble.hpp"

using namespace bubble;

namespace
{

struct Outcome
{
  bool pass;
  std::string detail;
};

struct Criterion
{
  int id;
  const char * name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char * f, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// 1. downside table reproduction over a horizon sweep
Outcome downside_table()
{
  const double published[] = {69.38, 54.25, 40.19, 27.88, 17.87, 10.38, 5.35, 2.37, 0.86};
  const ModelParams p(0.51, 0.08, 0.69, 0.91);
  const double x = std::log(14371.62 / 433.0);
  const double horizons[] = {22.0 / 250.0, 1.0 / 12.0, 33.0 / 365.0};
  const char * names[] = {"22/250", "1/12", "33/365"};
  double best_err = HUGE_VAL;
  int best = 0;
  std::vector<double> best_rows;
  for (int h = 0; h < 3; ++h) {
    double worst = 0.0;
    std::vector<double> rows;
    for (int i = 0; i < 9; ++i) {
      const double drop = 0.10 + 0.05 * i;
      const double v = 100.0 * running_min_cdf(horizons[h], x + std::log(1.0 - drop), p, x).value;
      rows.push_back(v);
      worst = std::max(worst, std::abs(v - published[i]));
    }
    if (worst < best_err) {
      best_err = worst;
      best = h;
      best_rows = rows;
    }
  }
  std::string detail = std::string("best horizon ") + names[best] + fmt(", max |diff| %.3f pp", best_err);
  if (best_err > 3.0) {
    for (int i = 0; i < 9; ++i) {
      detail += fmt("; %.0f%%: %.2f vs %.2f", 10.0 + 5.0 * i, best_rows[i], published[i]);
    }
  }
  return {best_err <= 3.0, detail};
}

// 2. alpha consistency triple
Outcome alpha_triple()
{
  const double c[] = {0.73, 0.70, 0.69};
  const double xr[] = {0.67, 1.23, 2.30};
  const double expected[] = {0.23, 0.14, 0.08};
  bool ok = true;
  std::string detail;
  for (int i = 0; i < 3; ++i) {
    const double a = estimate_alpha(c[i], xr[i]);
    const double rounded = std::round(a * 100.0) / 100.0;
    ok = ok && std::abs(rounded - expected[i]) < 1e-12;
    detail += (i ? ", " : "") + fmt("%.4f", a);
  }
  return {ok, "alpha = " + detail};
}

// 3. calibration: construct-then-recover on a synthetic series
Outcome calibration_recovery()
{
  const double eps = 0.39, c = 0.73, d = 0.015, xr = 0.67;
  const std::size_t n1 = 200, n2 = 60, n3 = 200;
  const double per_day = 1.0 / (monthly_window * months_per_year);
  std::vector<double> x{0.0};
  for (std::size_t k = 0; k < n1; ++k) { x.push_back(x.back() + eps * (1.0 - c) * per_day); }
  for (std::size_t k = 0; k < n2; ++k) { x.push_back(x.back()); }
  const double start = x.back();
  x.back() += 0.5 * d;
  for (std::size_t k = 1; k <= n3; ++k) {
    x.push_back(start - eps * c * per_day * static_cast<double>(k) + (k % 2 == 0 ? 0.5 : -0.5) * d);
  }
  std::vector<double> prices;
  for (double v : x) { prices.push_back(100.0 * std::exp(v)); }
  const auto r = calibrate(PriceSeries::unlabelled(prices), RegimeSegmentation{n1, n1 + n2, n1 + n2 + n3, xr});
  // regime III daily returns alternate -s +- d, whose sample SD is d sqrt(n / (n - 1))
  const double n = static_cast<double>(n3);
  const double sigma = d * std::sqrt(n / (n - 1.0)) * std::sqrt(sigma_days_per_year);
  const double alpha = -std::log(c) / (2.0 * xr);
  const double worst = std::max({std::abs(r.params.epsilon() - eps), std::abs(r.params.c() - c),
                                 std::abs(r.params.alpha() - alpha), std::abs(r.params.sigma() - sigma)});
  std::string detail = "historical datasets unavailable, synthetic oracle used" +
                       fmt("; recovered (%.6f, %.6f, %.6f, %.6f)", r.params.epsilon(), r.params.alpha(),
                           r.params.sigma(), r.params.c()) +
                       fmt(", max |diff| %.2e", worst);
  return {worst <= 1e-12, detail};
}

// 4. perturbation order
Outcome perturbation_order()
{
  const double eps[] = {0.05, 0.1, 0.2};
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (double e : eps) {
    const ModelParams p(e, 1.0, 0.5);
    const double gap = std::abs(lt_exact(1.0, p, 1.0, 0.0) - lt_perturbed(1.0, p, 1.0));
    const double lx = std::log(e), ly = std::log(gap);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  const double slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
  return {slope >= 1.8 && slope <= 2.2, fmt("log-log slope %.4f", slope)};
}

// 5. transform consistency
Outcome transform_consistency()
{
  const ModelParams p(0.1, 1.0, 0.5);
  double worst = 0.0;
  for (double t : {0.25, 1.0, 4.0}) {
    const double inv = invert_lt([&](std::complex<double> s) { return lt_perturbed(s, p, 1.0); }, t);
    worst = std::max(worst, std::abs(inv - fptd_perturbed(t, p, 1.0)));
  }
  double worst0 = 0.0;
  for (double t : {0.25, 1.0, 4.0}) {
    const double inv = invert_lt([](std::complex<double> s) { return std::exp(-std::sqrt(2.0 * s)); }, t);
    worst0 = std::max(worst0, std::abs(inv - brownian_fpt_density(t, 1.0)));
  }
  return {worst <= 1e-5 && worst0 <= 1e-6, fmt("max |diff| first order %.2e, Brownian %.2e", worst, worst0)};
}

// 6. mass identity
Outcome mass_identity()
{
  const ModelParams p(0.1, 1.0, 0.5);
  const double mass = fptd_total_mass(p, 1.0);
  const double expected = 1.0 + 0.1 * 0.5 * 1.0;
  return {std::abs(mass - expected) <= 1e-4, fmt("mass %.8f vs %.8f", mass, expected)};
}

// 7. simulated passage times against the first-order density
Outcome simulation_oracle()
{
  const ModelParams p(0.1, 1.0, 0.5);
  const std::size_t n = 100000;
  const auto sample = sample_fpt_mc(p, 1.0, 0.0, 5.0, 1e-4, n, 7);
  constexpr int bins = 30;
  const double width = 5.0 / bins;
  std::vector<double> counts(bins, 0.0);
  for (double t : sample.times) {
    if (t > 0.0 && t <= 5.0) { counts[std::min(bins - 1, static_cast<int>(std::ceil(t / width)) - 1)] += 1.0; }
  }
  double worst = 0.0;
  int failures = 0;
  for (int b = 0; b < bins; ++b) {
    const auto q = quad::integrate([&](double t) { return t <= 0.0 ? 0.0 : fptd_perturbed(t, p, 1.0); }, b * width,
                                   (b + 1) * width, {1e-14, 1e-12, 200});
    const double p_hat = counts[b] / n;
    const double se_mc = std::sqrt(std::max(q.value, 1.0 / n) * (1.0 - q.value) / n);
    const double se = std::hypot(se_mc, q.abs_error);
    const double z = std::abs(p_hat - q.value) / se;
    worst = std::max(worst, z);
    failures += z > 3.0 ? 1 : 0;
  }
  return {failures == 0, fmt("worst bin %.2f SE, %.0f bins beyond 3 SE", worst, failures)};
}

// 8. Brownian limit
Outcome brownian_limit()
{
  const auto p = ModelParams::brownian(1.0, 0.5);
  double worst = 0.0;
  for (double t : {0.1, 1.0, 7.0}) {
    worst = std::max(worst, std::abs(fptd_perturbed(t, p, 1.0) - brownian_fpt_density(t, 1.0)));
  }
  for (double beta : {0.1, 1.0, 5.0}) {
    worst = std::max(worst, std::abs(lt_perturbed(beta, p, 1.0) - std::exp(-std::sqrt(2.0 * beta))));
  }
  const auto noise = NoiseGrid::gaussian(1000, 1e-3, 3);
  const auto path = exact_path(p.with_x0(0.4), 1.0, 1000, noise);
  double w = 0.0;
  for (std::size_t k = 1; k <= 1000; ++k) {
    w += noise.increments()[k - 1];
    worst = std::max(worst, std::abs(path.states[k] - (0.4 + w)));
  }
  const double ts[] = {0.5, 1.0};
  for (const auto & e : error_estimates(std::span<const double>(ts), p, 1.0, 1000, 0.01, 5)) {
    worst = std::max(worst, std::abs(e.q_hat));
  }
  return {worst <= 1e-12, fmt("max |diff| %.2e", worst)};
}

// 9. density cross-checks
Outcome density_checks()
{
  int theta_fail = 0;
  double theta_worst = 0.0;
  for (double r : {0.5, 1.0, 2.0, 5.0}) {
    for (double s : {0.5, 1.0, 2.0}) {
      const auto q = theta(r, s);
      const auto m = theta_hat(r, s, 400000, 13);
      const double z = std::abs(q.value - m.value) / std::hypot(q.abs_error_estimate, m.abs_error_estimate);
      theta_worst = std::max(theta_worst, z);
      theta_fail += z > 3.0 ? 1 : 0;
    }
  }
  double norm_worst = 0.0;
  for (double t : {0.5, 1.0, 2.0}) {
    const ModelParams p(0.1, 1.0, 0.5);
    const double mass =
        quad::integrate([&](double u) { return density_xt(u, t, p, 0.0).value; }, -8.0, 10.0, {1e-8, 1e-6, 200}).value;
    norm_worst = std::max(norm_worst, std::abs(mass - 1.0));
  }
  double cdf_worst = 0.0;
  const auto b = ModelParams::brownian(1.0, 0.5);
  for (double u : {-1.0, 0.0, 1.0}) {
    const auto est = cdf_xt_mc(u, 1.0, b, 0.0, 400000, 31);
    cdf_worst = std::max(cdf_worst, std::abs(est.value - normal_cdf(u)) / est.std_error);
  }
  const bool ok = theta_fail == 0 && norm_worst <= 0.02 && cdf_worst <= 3.0;
  return {ok, fmt("theta worst %.2f SE, normalisation %.2e, cdf worst %.2f SE", theta_worst, norm_worst, cdf_worst)};
}

// 10. stationary law
Outcome stationary_law()
{
  const ModelParams p(1.0, 1.0, 0.5);
  const StationaryLaw law(p);
  const double mode = quad::golden_section_max([&](double y) { return law.density(y); }, law.mode() - 3.0,
                                               law.mode() + 3.0, 1e-12);
  const double mode_err = std::abs(mode + std::log(0.5) / 2.0);

  const std::size_t n_paths = 100000;
  const double horizon = 200.0;
  const std::size_t n_steps = 10000;
  std::vector<double> finals(n_paths);
  for_each_block(n_paths, mc_block_size, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto noise = NoiseGrid::gaussian(n_steps, horizon / n_steps, 11, i);
      finals[i] = exact_path(p, horizon, n_steps, noise).states.back();
    }
  });
  const double sd = std::sqrt(law.variance());
  const double lo = law.mean() - 4.0 * sd, hi = law.mean() + 4.0 * sd;
  constexpr int bins = 30;
  const double width = (hi - lo) / bins;
  std::vector<double> counts(bins, 0.0);
  for (double v : finals) {
    if (v >= lo && v < hi) { counts[static_cast<int>((v - lo) / width)] += 1.0; }
  }
  double worst = 0.0;
  int failures = 0;
  for (int b = 0; b < bins; ++b) {
    const double q = law.probability(lo + b * width, lo + (b + 1) * width);
    const double se = std::sqrt(std::max(q, 1.0 / n_paths) * (1.0 - q) / n_paths);
    const double z = std::abs(counts[b] / n_paths - q) / se;
    worst = std::max(worst, z);
    failures += z > 3.0 ? 1 : 0;
  }
  return {mode_err <= 1e-4 && failures == 0,
          fmt("mode error %.2e, histogram worst %.2f SE, %.0f bins beyond 3 SE", mode_err, worst, failures)};
}

// 11. exponential-functional moment
Outcome exponential_moment()
{
  const std::size_t n_paths = 100000;
  const std::size_t n_steps = 1000;
  std::vector<double> values(n_paths);
  for_each_block(n_paths, mc_block_size, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      values[i] = exponential_functional(NoiseGrid::gaussian(n_steps, 1.0 / n_steps, 21, i), 1.0, 0.0).back();
    }
  });
  double sum = 0.0;
  for (double v : values) { sum += v; }
  const double mean = sum / n_paths;
  const double expected = (std::exp(2.0) - 1.0) / 2.0;
  const double rel = std::abs(mean / expected - 1.0);
  return {rel <= 0.02, fmt("mean %.5f vs %.5f, relative %.2e", mean, expected, rel)};
}

// 12. error bound and peak relative errors
Outcome error_bound()
{
  const double eps[] = {0.05, 0.1, 0.2};
  double q[3], se[3];
  for (int i = 0; i < 3; ++i) {
    const auto e = error_estimate(1.0, ModelParams(eps[i], 1.0, 0.5), 1.0, 40000, 0.005, 77);
    q[i] = std::abs(e.q_hat);
    se[i] = e.std_error;
  }
  // least-squares M for |q| = M eps^2, then every point must sit under the bound within 3 SE
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 3; ++i) {
    num += q[i] * eps[i] * eps[i];
    den += std::pow(eps[i], 4);
  }
  const double m = num / den;
  bool bound_ok = true;
  double lo = HUGE_VAL, hi = 0.0;
  for (int i = 0; i < 3; ++i) {
    bound_ok = bound_ok && q[i] <= m * eps[i] * eps[i] + 3.0 * se[i];
    lo = std::min(lo, q[i] / (eps[i] * eps[i]));
    hi = std::max(hi, q[i] / (eps[i] * eps[i]));
  }
  bound_ok = bound_ok && hi / lo < 2.0;

  const ModelParams btc(0.51, 0.08, 0.69, 0.91);
  const double x = std::log(14371.62 / 433.0);
  double worst = 0.0;
  for (int i = 0; i < 9; ++i) {
    const double drop = 0.10 + 0.05 * i;
    const BoundaryFrame frame = shift_to_boundary(btc, x, x + std::log(1.0 - drop));
    const double t_peak = fptd_peak_time(frame.params, frame.y);
    const auto e = error_estimate(t_peak, frame.params, frame.y, 40000, t_peak / 400.0, 101 + i);
    worst = std::max(worst, e.relative_error);
  }
  return {bound_ok && worst <= 0.025,
          fmt("M %.4f, |q|/eps^2 in [%.4f, %.4f], worst peak relative error %.3f%%", m, lo, hi, 100.0 * worst)};
}

}  // namespace

int main()
{
  const std::vector<Criterion> criteria = {
      {1, "downside table reproduction", 10.0, downside_table},
      {2, "alpha consistency triple", 0.001, alpha_triple},
      {3, "calibration recovery", 1.0, calibration_recovery},
      {4, "perturbation order", 1.0, perturbation_order},
      {5, "transform consistency", 1.0, transform_consistency},
      {6, "mass identity", 1.0, mass_identity},
      {7, "simulation oracle", 300.0, simulation_oracle},
      {8, "Brownian limit", 1.0, brownian_limit},
      {9, "density cross-checks", 300.0, density_checks},
      {10, "stationary law", 300.0, stationary_law},
      {11, "exponential functional moment", 60.0, exponential_moment},
      {12, "error bound", 600.0, error_bound},
  };

  int failed = 0;
  for (const auto & c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out{false, ""};
    try {
      out = c.run();
    } catch (const std::exception & e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.budget_s;
    const bool pass = out.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s criterion %2d (%s): %s [%.3f s, budget %g s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), seconds, c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
