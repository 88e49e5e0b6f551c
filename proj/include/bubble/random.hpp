#ifndef BUBBLE_RANDOM_HPP_
#define BUBBLE_RANDOM_HPP_

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>

namespace bubble
{

inline constexpr std::uint64_t splitmix64(std::uint64_t & state) noexcept
{
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/**
 * @brief xoshiro256** generator keyed by (seed, stream).
 *
 * Each Monte Carlo path owns the stream equal to its index, so results do not
 * depend on how paths are distributed over threads. Normals come from the
 * Marsaglia polar method implemented here rather than std::normal_distribution,
 * whose output is library specific.
 */
class Rng
{
public:
  Rng(std::uint64_t seed, std::uint64_t stream) noexcept
  {
    std::uint64_t key = seed;
    const std::uint64_t mixed = splitmix64(key) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL);
    std::uint64_t sm = mixed;
    for (auto & word : s_) { word = splitmix64(sm); }
  }

  std::uint64_t next() noexcept
  {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() noexcept
  {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

private:
  std::array<std::uint64_t, 4> s_{};
  double spare_{0.0};
  bool has_spare_{false};
};

}  // namespace bubble

#endif  // BUBBLE_RANDOM_HPP_
