#ifndef BUBBLE_QUADRATURE_HPP_
#define BUBBLE_QUADRATURE_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace bubble::quad
{

struct Result
{
  double value{0.0};
  double abs_error{0.0};
  /// Integral of |f|, used by callers that need a round-off floor.
  double abs_integral{0.0};
  std::size_t evaluations{0};
  bool converged{true};
};

struct Tolerance
{
  double abs{1e-10};
  double rel{1e-8};
  std::size_t max_intervals{4000};
};

namespace detail
{

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21 abscissae).
inline constexpr std::array<double, 11> kronrod_nodes{
  0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
  0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
  0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
  0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
  0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
  0.0,
};

inline constexpr std::array<double, 11> kronrod_weights{
  0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
  0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
  0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
  0.123491976262065851077208067502644, 0.134709217311473325928054001771707,
  0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
  0.149445554002916905664936468389821,
};

// Gauss weights belong to kronrod_nodes[1], [3], ..., [9].
inline constexpr std::array<double, 5> gauss_weights{
  0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
  0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
  0.295524224714752870173892994651338,
};

struct Segment
{
  double a, b, value, error, abs_value;
  bool operator<(const Segment & o) const { return error < o.error; }
};

template<typename F>
Segment gauss_kronrod_21(F & f, double a, double b)
{
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kronrod_weights[10];
  double gauss = 0.0;
  double abs_sum = std::abs(fc) * kronrod_weights[10];
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kronrod_nodes[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kronrod_weights[j] * (f1 + f2);
    abs_sum += kronrod_weights[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) { gauss += gauss_weights[j / 2] * (f1 + f2); }
  }
  const double value = kronrod * half;
  const double err = std::abs((kronrod - gauss) * half);
  return Segment{a, b, value, err, abs_sum * std::abs(half)};
}

}  // namespace detail

/**
 * @brief Globally adaptive Gauss-Kronrod quadrature on [a, b].
 *
 * The segment with the largest error estimate is bisected until the summed
 * error meets max(tol.abs, tol.rel * |I|) or the interval budget runs out, in
 * which case `converged` is false and the best estimate is still returned.
 * Optional breakpoints split [a, b] up front.
 */
template<typename F>
  requires std::invocable<F &, double>
Result integrate(F && f, double a, double b, Tolerance tol = {}, std::span<const double> breaks = {})
{
  Result out;
  if (a == b) { return out; }
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }

  std::vector<double> points{a};
  for (double p : breaks) {
    if (p > a && p < b) { points.push_back(p); }
  }
  points.push_back(b);
  std::sort(points.begin(), points.end());

  std::priority_queue<detail::Segment> heap;
  double total = 0.0;
  double total_err = 0.0;
  double total_abs = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    auto seg = detail::gauss_kronrod_21(f, points[i], points[i + 1]);
    out.evaluations += 21;
    total += seg.value;
    total_err += seg.error;
    total_abs += seg.abs_value;
    heap.push(seg);
  }

  while (total_err > std::max(tol.abs, tol.rel * std::abs(total))) {
    if (heap.size() >= tol.max_intervals) {
      out.converged = false;
      break;
    }
    const auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      out.converged = false;
      break;
    }
    heap.pop();
    auto left = detail::gauss_kronrod_21(f, worst.a, mid);
    auto right = detail::gauss_kronrod_21(f, mid, worst.b);
    out.evaluations += 42;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    total_abs += left.abs_value + right.abs_value - worst.abs_value;
    heap.push(left);
    heap.push(right);
  }

  // re-sum to shed the drift of the running updates
  total = 0.0;
  total_err = 0.0;
  total_abs = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    total_abs += heap.top().abs_value;
    heap.pop();
  }
  out.value = sign * total;
  out.abs_error = total_err;
  out.abs_integral = total_abs;
  return out;
}

/// Integral over [a, +inf) through the substitution y = a + (1 - Y) / Y.
template<typename F>
Result integrate_to_infinity(F && f, double a, Tolerance tol = {})
{
  auto g = [&](double Y) {
    if (Y <= 0.0) { return 0.0; }
    const double y = a + (1.0 - Y) / Y;
    return f(y) / (Y * Y);
  };
  return integrate(g, 0.0, 1.0, tol);
}

/// Golden-section search for the maximiser of a unimodal f on [lo, hi].
template<typename F>
double golden_section_max(F && f, double lo, double hi, double x_tol = 1e-10)
{
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (std::abs(b - a) > x_tol * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace bubble::quad

#endif  // BUBBLE_QUADRATURE_HPP_
