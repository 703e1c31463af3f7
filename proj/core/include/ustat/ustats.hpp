#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "ustat/hoeffding.hpp"
#include "ustat/kernel.hpp"
#include "ustat/stat_kind.hpp"

namespace ustat {

// Direct O(n^2) evaluation of the definition. U°_2 = 0.
double evaluate(StatKind stat, const KernelSpec& k, std::span<const Point> data);

// True when evaluate_fast handles (stat, k): a multiple of the sign kernel,
// or a kernel with a separable factorization.
bool fast_path_supported(StatKind stat, const KernelSpec& k);
// Same value as evaluate; O(n log n) for the sign kernel, O(Cn) for C
// separable terms. Throws unsupported-kernel otherwise (no silent fallback).
double evaluate_fast(StatKind stat, const KernelSpec& k, std::span<const Point> data);

// Statistic of the kernel sgn(x - y) as an exact integer. The _naive variant
// is the O(n^2) definition.
std::int64_t sign_statistic(StatKind stat, std::span<const double> x);
std::int64_t sign_statistic_naive(StatKind stat, std::span<const double> x);

// Number of summands of the cyclic statistic: n * floor((n-1)/2).
std::int64_t cyclic_term_count(std::int64_t n);

double exact_mean(StatKind stat, std::int64_t n, double mu);

struct VarianceFormula {
  double value = 0.0;
  // true when the formula is exact only up to lower-order terms
  bool asymptotic = false;
};

VarianceFormula exact_degenerate_variance(StatKind stat, std::int64_t n, const VarianceComponents& vc,
                                          bool parity_aware = true, double tol = 1e-8);

// Plain sum_{i<j} F(x_i, x_j) over any element type.
template <class T, class F>
double classic_u(const std::vector<T>& xs, F&& f) {
  double s = 0.0;
  for (std::size_t j = 1; j < xs.size(); ++j)
    for (std::size_t i = 0; i < j; ++i) s += f(xs[i], xs[j]);
  return s;
}

struct PairedPoint {
  Point first, second;
};

enum class PairVariant { cyclic, bialt, altsecond };

// stat(f; X) = classic_u(paired, F) + correction
struct PairLift {
  std::function<double(const PairedPoint&, const PairedPoint&)> F;
  std::vector<PairedPoint> paired;
  double correction = 0.0;

  double value() const { return classic_u(paired, F) + correction; }
};

PairLift pair_lift(const KernelSpec& k, PairVariant variant, std::span<const Point> data);

// Ranks sigma must be a permutation of 1..n.
std::int64_t permutation_statistic(StatKind stat, std::span<const int> sigma);

// Exact distribution (value -> count) over S_n, n <= 9.
std::map<std::int64_t, std::int64_t> permutation_distribution(StatKind stat, int n);

}  // namespace ustat
