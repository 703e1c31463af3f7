#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ustat/error.hpp"
#include "ustat/harness.hpp"
#include "ustat/limitlaws.hpp"

using namespace ustat;

namespace {

double variance(const std::vector<double>& x) {
  double m = 0.0, s = 0.0;
  for (double v : x) m += v;
  m /= double(x.size());
  for (double v : x) s += (v - m) * (v - m);
  return s / double(x.size());
}

double mean(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  return m / double(x.size());
}

// m! [s^m] of -log cos(s), from the power series of cos by L' = c'/c.
std::vector<double> log_sec_cumulants(int max_m) {
  std::vector<double> c(static_cast<std::size_t>(max_m + 1), 0.0);
  double fact = 1.0;
  for (int k = 0; k <= max_m; ++k) {
    if (k > 0) fact *= k;
    if (k % 2 == 0) c[static_cast<std::size_t>(k)] = ((k / 2) % 2 == 0 ? 1.0 : -1.0) / fact;
  }
  // l_k for L = log c: k l_k = k c_k - sum_{j=1}^{k-1} j l_j c_{k-j}
  std::vector<double> l(c.size(), 0.0);
  for (int k = 1; k <= max_m; ++k) {
    double v = k * c[static_cast<std::size_t>(k)];
    for (int j = 1; j < k; ++j) v -= j * l[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(k - j)];
    l[static_cast<std::size_t>(k)] = v / k;
  }
  std::vector<double> out(c.size(), 0.0);
  fact = 1.0;
  for (int k = 1; k <= max_m; ++k) {
    fact *= k;
    out[static_cast<std::size_t>(k)] = -l[static_cast<std::size_t>(k)] * fact;
  }
  return out;
}

}  // namespace

TEST(Sample, Variances) {
  const SeriesTruncation tr{200, TailCompensation::gaussian_tail};
  EXPECT_NEAR(variance(sample(pure_eta(), tr, 1, 100000)), 1.0, 0.03);
  EXPECT_NEAR(variance(sample(pure_xeta(), tr, 2, 100000)), 0.5, 0.02);
  MixtureLaw chi;
  chi.chi = {1.0};
  const auto c = sample(chi, tr, 3, 100000);
  EXPECT_NEAR(mean(c), 0.0, 0.01);
  EXPECT_NEAR(variance(c), 0.5, 0.02);
}

TEST(Sample, TailCompensationRestoresVariance) {
  const auto plain = sample(pure_eta(), {5, TailCompensation::none}, 4, 100000);
  const auto comp = sample(pure_eta(), {5, TailCompensation::gaussian_tail}, 4, 100000);
  EXPECT_NEAR(variance(plain), 1.0 - eta_tail_variance(5), 0.03);
  EXPECT_NEAR(variance(comp), 1.0, 0.03);
  // the truncated series variance plus the tail is exactly 1
  double head = 0.0;
  for (int k = 1; k <= 5; ++k) head += 8.0 / std::pow((2.0 * k - 1.0) * std::numbers::pi, 2);
  EXPECT_NEAR(head + eta_tail_variance(5), 1.0, 1e-12);
  EXPECT_NEAR(2.0 * xeta_tail_variance(7), eta_tail_variance(7), 1e-15);
}

TEST(Sample, ReproducibleAndThreadIndependent) {
  MixtureLaw law;
  law.chi = {0.5, -0.25};
  law.eta = {0.3};
  law.xeta = {0.2};
  law.gaussian_var = 0.1;
  const SeriesTruncation tr{100, TailCompensation::gaussian_tail};
  const auto a = sample(law, tr, 77, 2000, 1);
  EXPECT_EQ(a, sample(law, tr, 77, 2000, 1));
  EXPECT_EQ(a, sample(law, tr, 77, 2000, 3));
  EXPECT_NE(a, sample(law, tr, 78, 2000, 1));
  // sample i does not depend on the count
  const auto b = sample(law, tr, 77, 500, 2);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Cf, Values) {
  EXPECT_NEAR(std::abs(cf(pure_xeta(), 1.0)), 0.80502, 1e-5);
  EXPECT_NEAR(cf(pure_xeta(), 1.0).imag(), 0.0, 1e-15);
  EXPECT_NEAR(cf(pure_eta(), 1.0).real(), 0.64805, 1e-5);
  MixtureLaw chi;
  chi.chi = {1.0};
  EXPECT_EQ(cf(chi, 0.0), std::complex<double>(1.0, 0.0));
  for (double t : {0.1, 1.0, 5.0, 40.0}) EXPECT_LE(std::abs(cf(chi, t)), 1.0);
}

TEST(Cf, BranchContinuity) {
  // two unit chi terms multiply to (1 - it)^{-1} e^{-it}
  MixtureLaw two;
  two.chi = {1.0, 1.0};
  for (double t : {0.5, 3.0, 10.0, 50.0, 400.0}) {
    const std::complex<double> I(0.0, 1.0);
    const std::complex<double> want = std::exp(-I * t) / (1.0 - I * t);
    EXPECT_NEAR(std::abs(cf(two, t) - want), 0.0, 1e-12) << t;
  }
  // a single factor against a path-tracked square root from 0
  MixtureLaw one;
  one.chi = {1.0};
  std::complex<double> root(1.0, 0.0);
  const int steps = 20000;
  const double T = 60.0;
  for (int s = 1; s <= steps; ++s) {
    const double t = T * s / steps;
    const std::complex<double> z(1.0, -t);
    std::complex<double> r = std::sqrt(z);
    if (std::abs(r - root) > std::abs(-r - root)) r = -r;
    root = r;
  }
  const std::complex<double> I(0.0, 1.0);
  EXPECT_NEAR(std::abs(cf(one, T) - std::exp(-0.5 * I * T) / root), 0.0, 1e-10);
}

TEST(Cf, JointBilinear) {
  EXPECT_NEAR(cf_joint_bilinear(1.0, 1.0), 0.51556, 1e-5);
  for (double t : {0.3, 1.0, 2.5}) EXPECT_NEAR(cf_joint_bilinear(0.0, t), 1.0 / std::cosh(t), 1e-14);
  for (double s : {0.0, 0.7, 3.0}) EXPECT_NEAR(cf_joint_bilinear(s, 0.0), 1.0 / std::sqrt(1 + s * s), 1e-14);
  EXPECT_NEAR(cf_joint_bilinear(0.5, 1e-9), cf_joint_bilinear(0.5, 0.0), 1e-12);
}

TEST(Cumulant, Examples) {
  MixtureLaw two;
  two.chi = {2.0};
  EXPECT_DOUBLE_EQ(cumulant(two, 3), 8.0);
  EXPECT_DOUBLE_EQ(cumulant(pure_eta(), 4), 2.0);
  EXPECT_DOUBLE_EQ(cumulant(pure_eta(), 2), 1.0);
  EXPECT_DOUBLE_EQ(cumulant(pure_xeta(), 2), 0.5);
  EXPECT_EQ(cumulant(pure_eta(), 3), 0.0);
  EXPECT_THROW(cumulant(pure_eta(), 0), Error);
  EXPECT_THROW(cumulant(pure_eta(), 13), Error);
  // writhe law: lambda_q = 1/(pi q), q <= 40000, plus the analytic tail for kappa_2
  MixtureLaw w;
  double tail = 0.0;
  for (int q = 1; q <= 40000; ++q) w.eta.push_back(1.0 / (std::numbers::pi * q));
  for (int q = 40001; q <= 4000000; ++q) tail += 1.0 / (std::numbers::pi * std::numbers::pi * double(q) * q);
  EXPECT_NEAR(cumulant(w, 2) + tail, 1.0 / 6.0, 1e-7);
}

TEST(Cumulant, PowerSeriesOracle) {
  const auto k = log_sec_cumulants(12);
  for (int m = 1; m <= 12; ++m) {
    EXPECT_NEAR(cumulant_eta(m), k[static_cast<std::size_t>(m)], 1e-9 * std::max(1.0, std::abs(k[static_cast<std::size_t>(m)])))
        << m;
    EXPECT_NEAR(cumulant_xeta(m), 0.5 * k[static_cast<std::size_t>(m)],
                1e-9 * std::max(1.0, std::abs(k[static_cast<std::size_t>(m)])))
        << m;
  }
  // chi: log E e^{s(Z^2-1)} = -s - log(1-2s)/2, so kappa_m = 2^{m-1}(m-1)!
  double f = 1.0;
  for (int m = 2; m <= 12; ++m) {
    f *= (m - 1);
    EXPECT_DOUBLE_EQ(cumulant_chi(m), std::ldexp(f, m - 1));
  }
  EXPECT_EQ(cumulant_chi(1), 0.0);
}

TEST(Cumulant, Bernoulli) {
  const double want[] = {1.0, -0.5, 1.0 / 6, 0, -1.0 / 30, 0, 1.0 / 42, 0, -1.0 / 30, 0, 5.0 / 66, 0, -691.0 / 2730};
  for (int m = 0; m <= 12; ++m) EXPECT_DOUBLE_EQ(bernoulli_number(m), want[m]);
  EXPECT_THROW(bernoulli_number(13), Error);
}

TEST(Empirical, Errors) {
  std::vector<double> few(100, 1.0);
  try {
    empirical_cumulants(few, 4);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::insufficient_data);
  }
  EXPECT_NO_THROW(empirical_cumulants(few, 3));
  EXPECT_THROW(empirical_cumulants(few, 5), Error);
}

TEST(Empirical, Examples) {
  std::mt19937_64 g(12);
  std::normal_distribution<double> z;
  std::vector<double> normal(1000000), half_chi(1000000);
  for (std::size_t i = 0; i < normal.size(); ++i) {
    normal[i] = z(g);
    const double y = z(g);
    half_chi[i] = 0.5 * (y * y - 1.0);
  }
  const auto kn = empirical_cumulants(normal);
  EXPECT_NEAR(kn[3], 0.0, 0.05);
  EXPECT_NEAR(kn[1], 1.0, 0.01);
  EXPECT_NEAR(empirical_cumulants(half_chi)[2], 1.0, 0.05);
}

TEST(Truncated, HalfAreaCf) {
  const auto x = sample(pure_xeta(), {500, TailCompensation::gaussian_tail}, 9, 100000);
  for (double t : {0.5, 1.0, 2.0}) {
    double re = 0.0;
    for (double v : x) re += std::cos(t * v);
    EXPECT_NEAR(re / double(x.size()), 1.0 / std::sqrt(std::cosh(t)), 0.01) << t;
  }
}

TEST(Truncated, SumProperty) {
  const SeriesTruncation tr{500, TailCompensation::gaussian_tail};
  const auto eta = sample(pure_eta(), tr, 21, 100000);
  MixtureLaw sum, diff;
  sum.xeta = {1.0, 1.0};
  diff.xeta = {1.0, -1.0};
  EXPECT_LT(ks_two_sample(eta, sample(sum, tr, 22, 100000)), 0.01);
  EXPECT_LT(ks_two_sample(eta, sample(diff, tr, 23, 100000)), 0.01);
}
