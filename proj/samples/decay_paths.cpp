// Exact and Euler paths driven by the same noise, with the equilibrium level.

#include <cstdio>

#include "bubble/sde.hpp"

int main()
{
  const bubble::ModelParams p(0.1, 1.0, 0.5);
  const double horizon = 20.0;
  const std::size_t n_steps = 2000;
  const auto noise = bubble::NoiseGrid::gaussian(n_steps, horizon / n_steps, 42);
  const auto exact = bubble::exact_path(p, horizon, n_steps, noise);
  const auto euler = bubble::euler_path(p, horizon, n_steps, noise);

  std::printf("# equilibrium level %.4f\n", p.equilibrium_level());
  std::printf("t,exact,euler\n");
  for (std::size_t k = 0; k <= n_steps; k += 20) {
    std::printf("%g,%.6f,%.6f\n", exact.times[k], exact.states[k], euler.states[k]);
  }
}
