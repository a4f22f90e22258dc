#include "citeflow/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace citeflow {

namespace {

bool is_constant(std::span<const double> v) {
  for (double x : v) {
    if (x != v[0]) return false;
  }
  return true;
}

struct Moments {
  double mean_x = 0, mean_y = 0;
  double ss_x = 0, ss_y = 0, ss_xy = 0;
};

Moments two_pass_moments(std::span<const double> x, std::span<const double> y) {
  Moments m;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    m.mean_x += x[i];
    m.mean_y += y[i];
  }
  m.mean_x /= static_cast<double>(n);
  m.mean_y /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - m.mean_x;
    const double dy = y[i] - m.mean_y;
    m.ss_x += dx * dx;
    m.ss_y += dy * dy;
    m.ss_xy += dx * dy;
  }
  return m;
}

double clamp_unit(double r) { return std::clamp(r, -1.0, 1.0); }

double clamp_p(double p) {
  if (!(p > 0.0)) return std::numeric_limits<double>::min();
  return std::min(p, 1.0);
}

// Exact two-sided permutation tail for Spearman's rho: enumerate every
// distinct arrangement of the y ranks against the fixed x ranks. Distinct
// arrangements of a multiset are equally weighted among all n! permutations,
// so counting them is equivalent to counting permutations.
double spearman_permutation_p(const std::vector<double>& rx, const std::vector<double>& ry,
                              double observed_abs) {
  const std::size_t n = rx.size();
  double mean_x = 0, mean_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += rx[i];
    mean_y += ry[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double ss_x = 0, ss_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ss_x += (rx[i] - mean_x) * (rx[i] - mean_x);
    ss_y += (ry[i] - mean_y) * (ry[i] - mean_y);
  }
  const double denom = std::sqrt(ss_x * ss_y);

  std::vector<double> perm = ry;
  std::sort(perm.begin(), perm.end());
  std::uint64_t total = 0;
  std::uint64_t hits = 0;
  do {
    double dot = 0;
    for (std::size_t i = 0; i < n; ++i) dot += rx[i] * perm[i];
    const double rho = (dot - static_cast<double>(n) * mean_x * mean_y) / denom;
    ++total;
    if (std::fabs(rho) >= observed_abs - 1e-12) ++hits;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

void check_inputs(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("correlation inputs differ in length");
  if (x.size() < 3) throw std::invalid_argument("correlation needs at least 3 observations");
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return a < b;
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // run [i, j] shares the mean of ranks i+1 .. j+1
    const double rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x > (a + 1.0) / (a + b + 2.0)) {
    return 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);
  }
  const double ln_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double front = std::exp(std::log(x) * a + std::log1p(-x) * b - ln_beta) / a;

  // Lentz's algorithm.
  constexpr double kTiny = 1e-30;
  double f = 1.0, c = 1.0, d = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const int m = i / 2;
    double numerator;
    if (i == 0) {
      numerator = 1.0;
    } else if (i % 2 == 0) {
      numerator = (m * (b - m) * x) / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
    } else {
      numerator = -((a + m) * (a + b + m) * x) / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
    }
    d = 1.0 + numerator * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    c = 1.0 + numerator / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    f *= c * d;
    if (std::fabs(1.0 - c * d) < 1e-12) break;
  }
  return front * (f - 1.0);
}

double student_t_two_sided_p(double t, double nu) {
  if (std::isinf(t)) return std::numeric_limits<double>::min();
  const double x = nu / (nu + t * t);
  return clamp_p(regularized_incomplete_beta(0.5 * nu, 0.5, x));
}

std::optional<CorrelationResult> pearson(std::span<const double> x, std::span<const double> y) {
  check_inputs(x, y);
  if (is_constant(x) || is_constant(y)) return std::nullopt;

  const auto m = two_pass_moments(x, y);
  const double n = static_cast<double>(x.size());
  const double r = clamp_unit(m.ss_xy / std::sqrt(m.ss_x * m.ss_y));

  CorrelationResult result;
  result.statistic = Statistic::Pearson;
  result.value = r;
  result.n = x.size();

  const double t = r * std::sqrt((n - 2.0) / std::max(1.0 - r * r, 0.0));
  result.p_value = student_t_two_sided_p(t, n - 2.0);
  if (x.size() > 3) {
    const double z = std::atanh(r);
    const double half = 1.96 / std::sqrt(n - 3.0);
    result.ci95 = std::make_pair(std::tanh(z - half), std::tanh(z + half));
  }
  return result;
}

std::optional<CorrelationResult> spearman(std::span<const double> x, std::span<const double> y) {
  check_inputs(x, y);
  if (is_constant(x) || is_constant(y)) return std::nullopt;

  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const auto m = two_pass_moments(rx, ry);
  const double n = static_cast<double>(x.size());
  const double rho = clamp_unit(m.ss_xy / std::sqrt(m.ss_x * m.ss_y));

  CorrelationResult result;
  result.statistic = Statistic::Spearman;
  result.value = rho;
  result.n = x.size();

  if (x.size() <= 8) {
    result.p_value = clamp_p(spearman_permutation_p(rx, ry, std::fabs(rho)));
  } else {
    const double t = rho * std::sqrt((n - 2.0) / std::max(1.0 - rho * rho, 0.0));
    result.p_value = student_t_two_sided_p(t, n - 2.0);
  }
  return result;
}

}  // namespace citeflow
