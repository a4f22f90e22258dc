#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace citeflow {

enum class Statistic : std::uint8_t { Spearman, Pearson };

struct CorrelationResult {
  Statistic statistic = Statistic::Spearman;
  double value = 0.0;
  std::uint64_t n = 0;
  std::optional<double> p_value;                    // two-sided, in (0, 1]
  std::optional<std::pair<double, double>> ci95;    // Fisher interval (Pearson only)
};

// 1-based fractional ranks; tied values share the mean rank of their run.
std::vector<double> average_ranks(std::span<const double> values);

// Product-moment correlation with two-pass mean/variance accumulation.
// p-value from the t approximation t = r*sqrt((n-2)/(1-r^2)); 95% CI via
// Fisher z +- 1.96/sqrt(n-3) when n > 3.
// Throws std::invalid_argument on length mismatch or n < 3.
// Returns nullopt when either input is constant (undefined, not zero).
std::optional<CorrelationResult> pearson(std::span<const double> x, std::span<const double> y);

// Rank correlation: Pearson over average ranks, so tie correction is by
// construction. The p-value is the exact permutation tail for n <= 8 and the
// two-sided t approximation otherwise. Same error contract as pearson.
std::optional<CorrelationResult> spearman(std::span<const double> x, std::span<const double> y);

// Two-sided tail probability of Student's t with nu degrees of freedom,
// clamped into (0, 1].
double student_t_two_sided_p(double t, double nu);

// Regularized incomplete beta I_x(a, b), evaluated by Lentz's continued
// fraction.
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace citeflow
