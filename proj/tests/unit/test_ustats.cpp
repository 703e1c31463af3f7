#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ustat/error.hpp"
#include "ustat/ustats.hpp"

using namespace ustat;

namespace {

std::vector<Point> uniform_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Point> out(n);
  for (auto& p : out) p = Point(u(g));
  return out;
}

// Straight transcription of the definitions, 1-based indices.
double oracle(StatKind stat, const KernelSpec& k, const std::vector<Point>& x) {
  const long n = static_cast<long>(x.size());
  auto X = [&](long i) { return x[static_cast<std::size_t>(i - 1)]; };
  double s = 0.0;
  if (stat == StatKind::cyclic || stat == StatKind::cyclic_sym) {
    for (long i = 1; i <= n; ++i)
      for (long j = 1; 2 * j < n; ++j) {
        const Point a = X(i), b = X((i - 1 + j) % n + 1);
        s += stat == StatKind::cyclic ? k(a, b) : k(a, b) - k(b, a);
      }
    return s;
  }
  for (long i = 1; i <= n; ++i)
    for (long j = i + 1; j <= n; ++j) {
      double sign = 1.0;
      if (stat == StatKind::alt_first) sign = (i + 1) % 2 == 0 ? 1.0 : -1.0;
      if (stat == StatKind::alt_second) sign = j % 2 == 0 ? 1.0 : -1.0;
      if (stat == StatKind::bialt) sign = (i + j) % 2 == 0 ? 1.0 : -1.0;
      s += sign * k(X(i), X(j));
      if (stat == StatKind::full) s += k(X(j), X(i));
    }
  return s;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Evaluate, Examples) {
  const auto ranks = to_points({1, 2, 3});
  EXPECT_EQ(evaluate(StatKind::cyclic, KernelSpec::sign(), ranks), -1.0);
  EXPECT_EQ(evaluate(StatKind::classic, KernelSpec::sign(), ranks), -3.0);
  const auto two = to_points({0.3, 0.8});
  const KernelSpec k = KernelSpec::sum(KernelSpec::product(0.1), KernelSpec::left());
  EXPECT_DOUBLE_EQ(evaluate(StatKind::bialt, k, two), -k(0.3, 0.8));
  EXPECT_EQ(evaluate(StatKind::cyclic, KernelSpec::sign(), two), 0.0);
  EXPECT_EQ(cyclic_term_count(2), 0);
  EXPECT_EQ(cyclic_term_count(6), 12);
  EXPECT_EQ(cyclic_term_count(7), 21);
}

TEST(Evaluate, Errors) {
  EXPECT_THROW(evaluate(StatKind::classic, KernelSpec::sign(), to_points({1.0})), Error);
  try {
    evaluate(StatKind::classic, KernelSpec::bilinear(), to_points({1.0, 2.0}));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::domain_mismatch);
  }
}

TEST(Evaluate, MatchesDefinition) {
  const std::vector<KernelSpec> kernels = {KernelSpec::sign(), KernelSpec::sum(KernelSpec::product(0.4), KernelSpec::left()),
                                           KernelSpec::scale(0.5, KernelSpec::swap(KernelSpec::sign()))};
  for (std::size_t n : {2u, 3u, 4u, 7u, 10u, 13u}) {
    const auto x = uniform_points(n, 100 + n);
    for (const auto& k : kernels)
      for (StatKind s : all_stats())
        EXPECT_NEAR(evaluate(s, k, x), oracle(s, k, x), 1e-12) << stat_name(s) << " n=" << n;
  }
}

TEST(Evaluate, CyclicTermCountMatchesDefinition) {
  for (std::int64_t n = 2; n <= 30; ++n) {
    const auto x = uniform_points(static_cast<std::size_t>(n), 7);
    EXPECT_EQ(evaluate(StatKind::cyclic, KernelSpec::constant(1.0), x), static_cast<double>(cyclic_term_count(n)));
  }
}

TEST(Fast, SignPrefix) {
  const auto all = uniform_points(100000, 42);
  const std::span<const Point> prefix(all.data(), 2000);
  for (StatKind s : all_stats()) {
    ASSERT_TRUE(fast_path_supported(s, KernelSpec::sign()));
    EXPECT_EQ(evaluate_fast(s, KernelSpec::sign(), prefix), evaluate(s, KernelSpec::sign(), prefix)) << stat_name(s);
  }
  // the full vector only needs to finish; compare with integer counts at the end
  std::vector<double> xs(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) xs[i] = all[i][0];
  EXPECT_EQ(evaluate_fast(StatKind::classic, KernelSpec::sign(), all),
            static_cast<double>(sign_statistic(StatKind::classic, xs)));
}

TEST(Fast, SignCountsWithTies) {
  std::mt19937_64 g(9);
  std::uniform_int_distribution<int> d(0, 5);
  for (int r = 0; r < 50; ++r) {
    std::vector<double> x(3 + r % 20);
    for (auto& v : x) v = d(g);
    for (StatKind s : all_stats()) EXPECT_EQ(sign_statistic(s, x), sign_statistic_naive(s, x)) << stat_name(s);
  }
}

TEST(Fast, Separable) {
  const auto x = uniform_points(500, 3);
  double sum = 0.0, sq = 0.0;
  for (const auto& p : x) {
    sum += p[0];
    sq += p[0] * p[0];
  }
  EXPECT_LT(rel_err(evaluate_fast(StatKind::classic, KernelSpec::product(), x), (sum * sum - sq) / 2), 1e-12);
  // alt-second: sum_j (-1)^j x_j * (x_1 + ... + x_{j-1})
  double alt = 0.0, prefix = 0.0;
  for (std::size_t j = 1; j <= x.size(); ++j) {
    alt += (j % 2 == 0 ? 1.0 : -1.0) * x[j - 1][0] * prefix;
    prefix += x[j - 1][0];
  }
  EXPECT_LT(rel_err(evaluate_fast(StatKind::alt_second, KernelSpec::product(), x), alt), 1e-9);
  const KernelSpec k = KernelSpec::sum(KernelSpec::product(0.3), KernelSpec::scale(-2.0, KernelSpec::right()));
  for (StatKind s : all_stats()) EXPECT_LT(rel_err(evaluate_fast(s, k, x), evaluate(s, k, x)), 1e-9) << stat_name(s);
}

TEST(Fast, Unsupported) {
  const KernelSpec k = KernelSpec::sum(KernelSpec::sign(), KernelSpec::product());
  EXPECT_FALSE(fast_path_supported(StatKind::classic, k));
  try {
    evaluate_fast(StatKind::classic, k, uniform_points(10, 1));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unsupported_kernel);
  }
}

TEST(ExactMean, Examples) {
  EXPECT_DOUBLE_EQ(exact_mean(StatKind::cyclic, 5, 0.25), 2.5);
  EXPECT_DOUBLE_EQ(exact_mean(StatKind::bialt, 5, 0.25), -0.5);
  EXPECT_DOUBLE_EQ(exact_mean(StatKind::alt_second, 4, 0.25), 0.5);
  EXPECT_DOUBLE_EQ(exact_mean(StatKind::classic, 10, 0.5), 22.5);
  EXPECT_DOUBLE_EQ(exact_mean(StatKind::full, 10, 0.5), 45.0);
  EXPECT_THROW(exact_mean(StatKind::classic, 1, 0.5), Error);
}

// E over all 2^n outcomes of Bernoulli(1/2) data with kernel xy (mu = 1/4)
TEST(ExactMean, ExhaustiveBernoulli) {
  for (int n : {4, 5, 6}) {
    for (StatKind s : all_stats()) {
      double mean = 0.0;
      for (int mask = 0; mask < (1 << n); ++mask) {
        std::vector<Point> x(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = Point(double((mask >> i) & 1));
        mean += evaluate(s, KernelSpec::product(), x);
      }
      mean /= double(1 << n);
      EXPECT_NEAR(mean, exact_mean(s, n, 0.25), 1e-12) << stat_name(s) << " n=" << n;
    }
  }
}

TEST(ExactVariance, Examples) {
  VarianceComponents sign;
  sign.var_f1 = sign.var_f2 = 1.0 / 3.0;
  sign.var_f12 = 1.0 / 3.0;
  sign.var_f = 1.0;
  EXPECT_NEAR(exact_degenerate_variance(StatKind::cyclic, 5, sign).value, 10.0 / 3.0, 1e-12);
  EXPECT_NEAR(exact_degenerate_variance(StatKind::cyclic, 3, sign).value, 1.0, 1e-12);

  VarianceComponents xy;
  xy.var_f12 = xy.var_f = 1.0;
  EXPECT_DOUBLE_EQ(exact_degenerate_variance(StatKind::classic, 10, xy).value, 45.0);
  EXPECT_FALSE(exact_degenerate_variance(StatKind::classic, 10, xy).asymptotic);
  EXPECT_TRUE(exact_degenerate_variance(StatKind::bialt, 10, xy).asymptotic);

  try {
    exact_degenerate_variance(StatKind::classic, 5, sign);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::regime_mismatch);
  }
}

TEST(ExactVariance, ExhaustiveRademacher) {
  const int n = 10;
  double s1 = 0.0, s2 = 0.0;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<Point> x(n);
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = Point((mask >> i) & 1 ? 1.0 : -1.0);
    const double u = evaluate(StatKind::classic, KernelSpec::product(), x);
    s1 += u;
    s2 += u * u;
  }
  const double N = double(1 << n);
  EXPECT_NEAR(s2 / N - (s1 / N) * (s1 / N), 45.0, 1e-9);
}

TEST(ExactVariance, WritheOverPermutations) {
  for (int n : {3, 4, 5, 6}) {
    const auto dist = permutation_distribution(StatKind::cyclic, n);
    double c = 0, s1 = 0, s2 = 0;
    for (const auto& [v, cnt] : dist) {
      c += double(cnt);
      s1 += double(v * cnt);
      s2 += double(v * v * cnt);
    }
    // every index leads and trails equally often, so the linear parts cancel
    EXPECT_NEAR(s2 / c - (s1 / c) * (s1 / c), double(cyclic_term_count(n)) / 3.0, 1e-12) << n;
  }
}

TEST(PairLift, Identities) {
  std::mt19937_64 g(17);
  std::uniform_int_distribution<int> d(1, 8);
  for (int r = 0; r < 50; ++r) {
    std::vector<double> ranks(8);
    std::iota(ranks.begin(), ranks.end(), 1.0);
    std::shuffle(ranks.begin(), ranks.end(), g);
    const auto x = to_points(ranks);
    EXPECT_EQ(pair_lift(KernelSpec::sign(), PairVariant::cyclic, x).value(), evaluate(StatKind::cyclic, KernelSpec::sign(), x));
  }
  const auto x6 = uniform_points(6, 4);
  EXPECT_NEAR(pair_lift(KernelSpec::product(), PairVariant::bialt, x6).value(),
              evaluate(StatKind::bialt, KernelSpec::product(), x6), 1e-12);
  std::mt19937_64 h(5);
  std::normal_distribution<double> z;
  std::vector<Point> pairs(8);
  for (auto& p : pairs) p = Point(z(h), z(h));
  EXPECT_NEAR(pair_lift(KernelSpec::bilinear(), PairVariant::altsecond, pairs).value(),
              evaluate(StatKind::alt_second, KernelSpec::bilinear(), pairs), 1e-12);
  EXPECT_THROW(pair_lift(KernelSpec::sign(), PairVariant::cyclic, uniform_points(7, 1)), Error);
  EXPECT_THROW(pair_lift(KernelSpec::sign(), PairVariant::cyclic, uniform_points(2, 1)), Error);
}

TEST(PairLift, CorrectionTerms) {
  const auto x = uniform_points(10, 8);
  const KernelSpec k = KernelSpec::sum(KernelSpec::sign(), KernelSpec::product(0.2));
  double diag = 0.0;
  for (std::size_t i = 0; i < x.size(); i += 2) diag += k(x[i], x[i + 1]);
  const auto b = pair_lift(k, PairVariant::bialt, x);
  EXPECT_NEAR(b.correction, -diag, 1e-12);
  EXPECT_NEAR(b.value(), oracle(StatKind::bialt, k, x), 1e-12);
  const auto a = pair_lift(k, PairVariant::altsecond, x);
  EXPECT_NEAR(a.correction, diag, 1e-12);
  EXPECT_NEAR(a.value(), oracle(StatKind::alt_second, k, x), 1e-12);
  EXPECT_EQ(pair_lift(k, PairVariant::cyclic, x).correction, 0.0);
}

TEST(Permutation, Examples) {
  const std::vector<int> id = {1, 2, 3};
  EXPECT_EQ(permutation_statistic(StatKind::cyclic, id), -1);
  const std::map<std::int64_t, std::int64_t> u3 = {{-3, 1}, {-1, 2}, {1, 2}, {3, 1}};
  EXPECT_EQ(permutation_distribution(StatKind::classic, 3), u3);
  const std::map<std::int64_t, std::int64_t> b3 = {{-1, 3}, {1, 3}};
  EXPECT_EQ(permutation_distribution(StatKind::bialt, 3), b3);
  EXPECT_EQ(permutation_distribution(StatKind::cyclic, 3), b3);
}

TEST(Permutation, Errors) {
  for (const std::vector<int>& bad : {std::vector<int>{1, 1, 3}, std::vector<int>{0, 1, 2}, std::vector<int>{1, 2, 4}}) {
    try {
      permutation_statistic(StatKind::classic, bad);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::not_a_permutation);
    }
  }
  EXPECT_THROW(permutation_distribution(StatKind::classic, 10), Error);
}

TEST(Permutation, Multisets) {
  for (int n : {3, 5, 7})
    EXPECT_EQ(permutation_distribution(StatKind::cyclic, n), permutation_distribution(StatKind::bialt, n)) << n;
  for (int n = 3; n <= 6; ++n)
    EXPECT_EQ(permutation_distribution(StatKind::alt_first, n), permutation_distribution(StatKind::classic, n)) << n;
}

TEST(Properties, SymmetricAndReversal) {
  std::mt19937_64 g(23);
  const KernelSpec f = KernelSpec::sum(KernelSpec::sign(), KernelSpec::scale(1.5, KernelSpec::left()));
  const KernelSpec sym = KernelSpec::product(0.3);
  for (int r = 0; r < 40; ++r) {
    const std::size_t n = 3 + static_cast<std::size_t>(r % 12);
    auto x = uniform_points(n, 1000 + static_cast<std::uint64_t>(r));
    double extra = 0.0;
    if (n % 2 == 0)
      for (std::size_t i = 0; i < n / 2; ++i) extra += sym(x[i], x[i + n / 2]);
    EXPECT_NEAR(evaluate(StatKind::cyclic, sym, x), evaluate(StatKind::classic, sym, x) - extra, 1e-12);

    EXPECT_NEAR(evaluate(StatKind::cyclic_sym, f, x),
                evaluate(StatKind::cyclic, KernelSpec::sum(f, KernelSpec::scale(-1.0, KernelSpec::swap(f))), x), 1e-12);

    auto rev = x;
    std::reverse(rev.begin(), rev.end());
    const double sgn = n % 2 == 0 ? 1.0 : -1.0;
    EXPECT_NEAR(evaluate(StatKind::alt_second, f, rev), sgn * evaluate(StatKind::alt_first, KernelSpec::swap(f), x), 1e-12);
  }
}
