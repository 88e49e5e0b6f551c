#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "bubble/density.hpp"
#include "bubble/sde.hpp"

using namespace bubble;

namespace
{

const ModelParams decay(0.1, 1.0, 0.5);

}  // namespace

TEST(Theta, DomainAndFlags)
{
  EXPECT_THROW(theta(0.0, 1.0), Error);
  EXPECT_THROW(theta(1.0, -1.0), Error);
  EXPECT_FALSE(theta(1.0, 1.0).low_confidence);
  EXPECT_TRUE(theta(1.0, 0.05).low_confidence);
}

TEST(Theta, AgreesWithMonteCarlo)
{
  for (double r : {0.5, 1.0, 2.0, 5.0}) {
    for (double s : {0.5, 1.0, 2.0}) {
      const auto q = theta(r, s);
      const auto m = theta_hat(r, s, 400000, 13);
      const double combined = std::hypot(q.abs_error_estimate, m.abs_error_estimate);
      EXPECT_LE(std::abs(q.value - m.value), 3.0 * combined) << r << " " << s;
    }
  }
}

TEST(ThetaHat, VarianceHalvesWithDoubledSamples)
{
  // replicate the estimator to measure its spread directly
  auto spread = [](std::size_t n, std::uint64_t base) {
    constexpr int reps = 200;
    double sum = 0.0, sq = 0.0;
    for (std::uint64_t k = 0; k < reps; ++k) {
      const double v = theta_hat(1.0, 1.0, n, base + k).value;
      sum += v;
      sq += v * v;
    }
    const double mean = sum / reps;
    return (sq - reps * mean * mean) / (reps - 1);
  };
  const double ratio = spread(2000, 1000) / spread(4000, 5000);
  // a 200-replicate variance ratio of this heavy-tailed estimator scatters by about 15%
  EXPECT_GT(ratio, 1.3);
  EXPECT_LT(ratio, 3.0);
  // the reported standard error tracks the same scaling
  const double se_ratio = theta_hat(1.0, 1.0, 100000, 3).abs_error_estimate / theta_hat(1.0, 1.0, 200000, 4).abs_error_estimate;
  EXPECT_NEAR(se_ratio * se_ratio, 2.0, 0.3);
}

TEST(Theta, JointDensityHasUnitMass)
{
  // int int theta(e^z / y, s) (1/y) exp(-(1 + e^{2z}) / (2y)) dy dz = 1 for mu = 0
  const double s = 1.0;
  auto inner = [&](double z) {
    auto f = [&](double log_y) {
      const double y = std::exp(log_y);
      const double w = std::exp(-(1.0 + std::exp(2.0 * z)) / (2.0 * y));
      if (w == 0.0) { return 0.0; }
      return theta(std::exp(z) / y, s).value * w;
    };
    return quad::integrate(f, -8.0, 30.0, {1e-10, 1e-7, 300}).value;
  };
  const double total = quad::integrate(inner, -6.0, 6.0, {1e-8, 1e-6, 200}).value;
  EXPECT_NEAR(total, 1.0, 1e-3);
}

TEST(DensityXt, NonNegativeAndNormalised)
{
  const double t = 1.0;
  const double x = 0.0;
  auto f = [&](double u) { return density_xt(u, t, decay, x).value; };
  for (double u = -4.0; u <= 5.0; u += 0.5) {
    const auto d = density_xt(u, t, decay, x);
    EXPECT_GE(d.value, -d.abs_error_estimate - 1e-12) << u;
    EXPECT_FALSE(d.low_confidence);
  }
  const double mass = quad::integrate(f, x - 6.0, x + 9.0, {1e-8, 1e-6, 200}).value;
  EXPECT_NEAR(mass, 1.0, 0.02);
}

TEST(DensityXt, BrownianLimitIsGaussian)
{
  const auto p = ModelParams::brownian(1.0, 0.5, 0.0);
  for (double u : {-1.0, 0.0, 0.7}) {
    const double expected = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
    EXPECT_NEAR(density_xt(u, 1.0, p, 0.0).value, expected, 1e-5) << u;
  }
}

TEST(DensityXt, FlagsOscillationRegimeAndChecksDomain)
{
  EXPECT_TRUE(density_xt(0.0, 0.05, decay, 0.0).low_confidence);
  EXPECT_THROW(density_xt(0.0, 0.0, decay, 0.0), Error);
  EXPECT_THROW(density_xt(0.0, 1.0, ModelParams(0.1, 1.0, 0.5, 2.0), 0.0), Error);
}

TEST(DensityXt, MatchesSimulatedHistogram)
{
  // exact-path histogram of X_1 on 40 bins
  const std::size_t n_paths = 200000;
  const std::size_t n_steps = 200;
  const double lo = -2.5, hi = 3.0;
  const std::size_t bins = 40;
  const double width = (hi - lo) / bins;
  std::vector<double> counts(bins, 0.0);
  for (std::size_t i = 0; i < n_paths; ++i) {
    const auto noise = NoiseGrid::gaussian(n_steps, 1.0 / n_steps, 55, i);
    const double xt = exact_path(decay, 1.0, n_steps, noise).states.back();
    if (xt >= lo && xt < hi) { counts[static_cast<std::size_t>((xt - lo) / width)] += 1.0; }
  }
  for (std::size_t b = 0; b < bins; ++b) {
    const double a = lo + b * width;
    const double prob = quad::integrate([&](double u) { return density_xt(u, 1.0, decay, 0.0).value; }, a,
                                        a + width, {1e-10, 1e-6, 20})
                            .value;
    const double p_hat = counts[b] / n_paths;
    const double se = std::sqrt(std::max(prob, 1.0 / n_paths) * (1.0 - prob) / n_paths);
    EXPECT_LE(std::abs(p_hat - prob), 3.0 * se + 1e-4) << "bin " << b;
  }
}

TEST(CdfXtMc, BrownianLimitMatchesNormal)
{
  const auto p = ModelParams::brownian(1.0, 0.5, 0.0);
  for (double z : {-1.0, 0.0, 1.0}) {
    const auto est = cdf_xt_mc(z, 1.0, p, 0.0, 400000, 31);
    EXPECT_LE(std::abs(est.value - normal_cdf(z)), 3.0 * est.std_error) << z << " " << est.value;
  }
}

TEST(CdfXtMc, MassAndMonotonicity)
{
  const double t = 1.0;
  const auto far = cdf_xt_mc(10.0 + 6.0, t, decay, 0.0, 200000, 8);
  EXPECT_LE(std::abs(far.value - 1.0), 3.0 * far.std_error);
  const auto a = cdf_xt_mc(-0.5, t, decay, 0.0, 200000, 9);
  const auto b = cdf_xt_mc(0.5, t, decay, 0.0, 200000, 10);
  EXPECT_LE(a.value, b.value + 3.0 * std::hypot(a.std_error, b.std_error));
  const auto again = cdf_xt_mc(0.5, t, decay, 0.0, 200000, 10);
  EXPECT_EQ(b.value, again.value);
}

TEST(Stationary, NormalisedWithModeAtEquilibrium)
{
  const ModelParams p(0.39, 0.23, 0.73);
  const StationaryLaw law(p);
  EXPECT_NEAR(law.probability(law.lower(), law.upper()), 1.0, 1e-6);
  const double mode = quad::golden_section_max([&](double x) { return law.density(x); }, law.mode() - 3.0,
                                               law.mode() + 3.0, 1e-12);
  EXPECT_NEAR(mode, -std::log(0.73) / (2.0 * 0.23), 1e-4);
  EXPECT_GT(law.skewness(), 0.0);
}

TEST(Stationary, DensityFormula)
{
  // unnormalised 1/w(x) = exp(-(eps/alpha) e^{-2 alpha x} - 2 eps c x)
  const ModelParams p(1.0, 1.0, 0.5);
  const auto w_inv = [](double x) { return std::exp(-std::exp(-2.0 * x) - x); };
  const double ratio = stationary_density(0.3, p) / stationary_density(-0.4, p);
  EXPECT_NEAR(ratio, w_inv(0.3) / w_inv(-0.4), 1e-12);
}

TEST(Stationary, NoLawWithoutEquilibrium)
{
  try {
    stationary_density(0.0, ModelParams(0.1, 1.0, 0.0));
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.kind(), ErrorKind::no_stationary_law);
  }
}

TEST(Stationary, VolatilityWidensTheLaw)
{
  const StationaryLaw narrow(ModelParams(1.0, 1.0, 0.5, 1.0));
  const StationaryLaw wide(ModelParams(1.0, 1.0, 0.5, 2.0));
  EXPECT_NEAR(narrow.mode(), wide.mode(), 1e-15);
  EXPECT_GT(wide.variance(), narrow.variance());
}
