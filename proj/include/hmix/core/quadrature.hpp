#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmix {

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 0.0;
  std::size_t max_intervals = 2000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  std::size_t intervals = 0;
  std::size_t evaluations = 0;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for nodes kKronrodNodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

// 15-point Kronrod rule with the QUADPACK error heuristic.
template <class F>
Segment gauss_kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  double abs_sum = std::abs(kronrod);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double pair = f1[j] + f2[j];
    kronrod += kKronrodWeights[j] * pair;
    abs_sum += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    asc += kKronrodWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  const double scale = std::abs(half);
  double error = std::abs((kronrod - gauss) * half);
  asc *= scale;
  abs_sum *= scale;
  if (asc != 0.0 && error != 0.0) error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps))
    error = std::max(50.0 * eps * abs_sum, error);
  return {a, b, kronrod * half, error};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [a,b].
///
/// Refines the interval with the largest error estimate until the total
/// estimate drops below max(abs_tol, rel_tol * |value|). When the interval
/// budget runs out, `converged` is false and the best estimate is returned.
template <class F>
QuadratureResult quadrature_1d(F&& f, double a, double b, const QuadratureOptions& options = {}) {
  QuadratureResult result;
  if (a == b) return result;
  if (!(a < b)) throw std::invalid_argument("quadrature_1d: requires a <= b");

  std::priority_queue<detail::Segment> heap;
  auto first = detail::gauss_kronrod15(f, a, b);
  double total = first.value;
  double total_error = first.error;
  heap.push(first);
  result.evaluations = 15;

  auto satisfied = [&] {
    return total_error <= std::max(options.abs_tol, options.rel_tol * std::abs(total));
  };
  while (!satisfied()) {
    if (heap.size() >= options.max_intervals) {
      result.converged = false;
      break;
    }
    const auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      result.converged = false;
      break;
    }
    heap.pop();
    auto left = detail::gauss_kronrod15(f, worst.a, mid);
    auto right = detail::gauss_kronrod15(f, mid, worst.b);
    result.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to shed the drift of the incremental updates.
  result.intervals = heap.size();
  total = 0.0;
  total_error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_error += heap.top().error;
    heap.pop();
  }
  result.value = total;
  result.error = total_error;
  if (result.converged)
    result.converged = total_error <= std::max(options.abs_tol, options.rel_tol * std::abs(total)) * 1.000001;
  return result;
}

/// Iterated quadrature over the ordered simplex lo <= m_1 <= ... <= m_n <= hi.
///
/// The outermost integral runs over m_n on [lo, hi]; each inner variable m_j
/// runs over [lo, m_{j+1}], so the innermost variable is integrated first and
/// the ordering is enforced exactly. `f` receives the full profile.
/// Per-level tolerances are split so the total error stays near `options`.
template <class F>
QuadratureResult integrate_ordered_simplex(F&& f, int n, double lo, double hi,
                                           const QuadratureOptions& options = {}) {
  if (n < 1) throw std::invalid_argument("integrate_ordered_simplex: n must be >= 1");
  std::vector<double> profile(static_cast<std::size_t>(n), lo);
  QuadratureResult summary;
  const double width = std::max(hi - lo, 1e-300);

  // level j integrates over m_j (0-based) with the upper limit fixed by m_{j+1}
  auto integrate_level = [&](auto&& self, int j, double upper) -> double {
    QuadratureOptions level = options;
    level.abs_tol = options.abs_tol / std::pow(width, n - 1 - j) * 0.1;
    auto inner = [&](double m) {
      profile[static_cast<std::size_t>(j)] = m;
      return j == 0 ? f(std::span<const double>(profile)) : self(self, j - 1, m);
    };
    auto r = quadrature_1d(inner, lo, upper, level);
    if (!r.converged) summary.converged = false;
    summary.evaluations += (j == 0) ? r.evaluations : 0;
    return r.value;
  };

  const int top = n - 1;
  auto outer = [&](double m) {
    profile[static_cast<std::size_t>(top)] = m;
    return top == 0 ? f(std::span<const double>(profile)) : integrate_level(integrate_level, top - 1, m);
  };
  auto r = quadrature_1d(outer, lo, hi, options);
  summary.value = r.value;
  summary.error = r.error;
  summary.intervals = r.intervals;
  if (top == 0) summary.evaluations = r.evaluations;
  if (!r.converged) summary.converged = false;
  return summary;
}

}  // namespace hmix
