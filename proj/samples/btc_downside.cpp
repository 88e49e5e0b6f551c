// One-month downside probabilities for BitCoin at its December 2017 high.

#include <cmath>
#include <cstdio>

#include "bubble/fpt.hpp"

int main()
{
  const bubble::ModelParams p(0.51, 0.08, 0.69, 0.91);
  const double price_now = 14371.62;
  const double x = std::log(price_now / 433.0);
  const double horizon = 1.0 / 12.0;

  std::printf("%6s %12s %10s\n", "drop", "price", "prob %");
  for (int k = 0; k <= 12; ++k) {
    const double d = 0.05 * k;
    const auto prob = bubble::running_min_cdf(horizon, x + std::log1p(-d), p, x);
    std::printf("%5.0f%% %12.2f %10.2f\n", 100.0 * d, (1.0 - d) * price_now, 100.0 * prob.value);
  }
}
