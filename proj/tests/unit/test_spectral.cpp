#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ustat/error.hpp"
#include "ustat/spectral.hpp"

using namespace ustat;
using std::numbers::pi;

namespace {

// Cyclic Jacobi rotations until the off-diagonal norm is below 1e-12.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += 2 * a(p, q) * a(p, q);
    if (std::sqrt(off) < 1e-12) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> v(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(v.begin(), v.end(), [](double x, double y) { return std::abs(x) > std::abs(y); });
  return v;
}

template <class F>
void expect_code(F&& f, Errc code) {
  try {
    f();
    ADD_FAILURE() << "no exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

double sum_sq(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

TEST(Eig, JacobiOracle) {
  std::mt19937_64 g(1);
  std::normal_distribution<double> z;
  for (int r = 0; r < 5; ++r) {
    Eigen::MatrixXd b(12, 12);
    for (Eigen::Index i = 0; i < 12; ++i)
      for (Eigen::Index j = 0; j < 12; ++j) b(i, j) = z(g);
    NystromMatrix nm;
    nm.a = b + b.transpose();
    nm.tag = Structure::symmetric;
    const auto ours = eig_symmetric(nm).values;
    const auto ref = jacobi_eigenvalues(nm.a);
    ASSERT_EQ(ours.size(), ref.size());
    auto a = ours, c = ref;
    std::sort(a.begin(), a.end());
    std::sort(c.begin(), c.end());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], c[i], 1e-10);
  }
}

TEST(Nystrom, SignKernel) {
  const auto nm = nystrom(KernelSpec::sign(), SpaceSpec::uniform01(), 400);
  EXPECT_EQ(nm.a.rows(), 400);
  EXPECT_EQ(nm.tag, Structure::antisymmetric);
  EXPECT_LT((nm.a + nm.a.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  const auto s = eig(nm);
  EXPECT_EQ(s.mode, Spectrum::Mode::imaginary_pairs);
  ASSERT_GE(s.values.size(), 3u);
  EXPECT_NEAR(s.values[0], 2 / pi, 1e-3);
  EXPECT_NEAR(s.values[1], 2 / (3 * pi), 1e-3);
  EXPECT_NEAR(s.values[2], 2 / (5 * pi), 1e-3);
  for (double v : s.values) EXPECT_GT(v, 0.0);
  // anti case: 2 sum lambda^2 against the integral of f^2 = 1
  EXPECT_NEAR(2 * s.sum_sq(), 1.0, 0.02);
}

TEST(Nystrom, WritheRemainder) {
  const KernelTable t = tabulate(KernelSpec::sign(), quadrature_rule(SpaceSpec::uniform01(), 400));
  const auto s = eig(build_operator(OperatorKind::tc_anti, t));
  ASSERT_GE(s.values.size(), 3u);
  EXPECT_NEAR(s.values[0], 1 / pi, 1e-3);
  EXPECT_NEAR(s.values[1], 1 / (2 * pi), 1e-3);
  EXPECT_NEAR(s.values[2], 1 / (3 * pi), 1e-3);
  // the symmetric part of the sign remainder vanishes
  EXPECT_TRUE(eig_symmetric(build_operator(OperatorKind::tc_sym, t)).values.empty());
}

TEST(Nystrom, RademacherProduct) {
  const auto nm = nystrom(KernelSpec::product(), SpaceSpec::rademacher(), 2);
  ASSERT_EQ(nm.a.rows(), 2);
  EXPECT_EQ(nm.tag, Structure::symmetric);
  EXPECT_NEAR(nm.a(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(nm.a(0, 1), -0.5, 1e-15);
  const auto s = eig_symmetric(nm);
  ASSERT_EQ(s.values.size(), 1u);
  EXPECT_NEAR(s.values[0], 1.0, 1e-14);
}

TEST(Nystrom, RankOne) {
  // phi(x) = sqrt(12)(x - 1/2) has unit norm
  const auto s = eig_symmetric(nystrom(KernelSpec::scale(12.0, KernelSpec::product(0.5)), SpaceSpec::uniform01(), 400));
  ASSERT_EQ(s.values.size(), 1u);
  EXPECT_NEAR(s.values[0], 1.0, 1e-5);
}

TEST(Nystrom, SignBlocks) {
  const auto hs = sign_block_operator(SignBlock::hs, 400);
  EXPECT_EQ(hs.a.rows(), 800);
  const auto s = eig(hs);
  EXPECT_EQ(s.mode, Spectrum::Mode::real_eigen);
  ASSERT_GE(s.values.size(), 4u);
  std::vector<double> top(s.values.begin(), s.values.begin() + 4);
  std::sort(top.begin(), top.end());
  EXPECT_NEAR(top[0], -2 / pi, 2e-3);
  EXPECT_NEAR(top[1], -2 / (3 * pi), 2e-3);
  EXPECT_NEAR(top[2], 2 / (3 * pi), 2e-3);
  EXPECT_NEAR(top[3], 2 / pi, 2e-3);
  // integral of Hs^2 over [0,1]^2 x {1,2}^2 is 4 * 1/4
  EXPECT_NEAR(s.sum_sq(), 1.0, 0.02);

  const auto ha = eig(sign_block_operator(SignBlock::ha, 400));
  EXPECT_EQ(ha.mode, Spectrum::Mode::imaginary_pairs);
  EXPECT_NEAR(ha.values[0], 2 / pi, 2e-3);
}

TEST(Analytic, Catalog) {
  const auto l3 = analytic_spectrum(AnalyticCase::L3, {}, 3);
  EXPECT_EQ(l3.mode, Spectrum::Mode::imaginary_pairs);
  ASSERT_EQ(l3.values.size(), 3u);
  EXPECT_DOUBLE_EQ(l3.values[0], 2 / pi);
  EXPECT_DOUBLE_EQ(l3.values[1], 2 / (3 * pi));
  EXPECT_DOUBLE_EQ(l3.values[2], 2 / (5 * pi));

  AnalyticParams p;
  p.s = 1.0;
  p.tau = 1.0;
  const auto pert = analytic_spectrum(AnalyticCase::ESJ22_perturbed, p, 1);
  ASSERT_EQ(pert.values.size(), 1u);
  EXPECT_NEAR(std::abs(pert.values[0]), 4 / pi, 1e-12);
  EXPECT_NEAR(std::abs(pert.values[0]), 2 * std::abs(analytic_spectrum(AnalyticCase::ESJ22, {}, 1).values[0]), 1e-12);

  const auto e1 = analytic_spectrum(AnalyticCase::E1, {}, 1);
  EXPECT_EQ(e1.mode, Spectrum::Mode::real_eigen);
  EXPECT_EQ(e1.values, std::vector<double>{1.0});

  const auto wr = analytic_spectrum(AnalyticCase::Ewrithe, {}, 2);
  EXPECT_DOUBLE_EQ(wr.values[1], 1 / (2 * pi));

  expect_code([] { parse_analytic_case("L7"); }, Errc::unknown_case);
}

TEST(Analytic, PerturbedAtUnitParamsDoubles) {
  // s = tau = 1 doubles the sign kernel's spectrum
  AnalyticParams p;
  const auto a = analytic_spectrum(AnalyticCase::ESJ22_perturbed, p, 4);
  const auto b = analytic_spectrum(AnalyticCase::ESJ22, {}, 4);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(a.values[i]), 2 * std::abs(b.values[i]), 1e-12);
}

TEST(Lifted, HatOfSignMatchesProductSet) {
  const KernelTable t = tabulate(KernelSpec::sign(), quadrature_rule(SpaceSpec::uniform01(), 32));
  const auto nm = build_operator(OperatorKind::hat, t, 32);
  EXPECT_EQ(nm.tag, Structure::symmetric);
  const auto s = eig_symmetric(nm);
  ASSERT_GE(s.values.size(), 6u);
  const double big = 4 / (pi * pi), small = 4 / (3 * pi * pi);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(s.values[static_cast<std::size_t>(i)]), big, 5e-3) << i;
  for (int i = 4; i < 6; ++i) EXPECT_NEAR(std::abs(s.values[static_cast<std::size_t>(i)]), small, 5e-3) << i;
}

TEST(Lifted, SymmetricKernelSanity) {
  const KernelSpec k = KernelSpec::sum(KernelSpec::product(), KernelSpec::constant(1.0));
  const KernelTable t = tabulate(k, quadrature_rule(SpaceSpec::uniform01(), 32));
  const auto plain = eig_symmetric(build_operator(OperatorKind::plain, t));
  const auto hat = eig_symmetric(build_operator(OperatorKind::hat, t, 32));
  // rank two up to split-diagonal artifacts of order m^-3
  ASSERT_GE(plain.values.size(), 2u);
  ASSERT_GE(hat.values.size(), 2u);
  for (std::size_t i = 0; i < 4; ++i) {
    const double p = i < plain.values.size() ? plain.values[i] : 0.0;
    const double h = i < hat.values.size() ? hat.values[i] : 0.0;
    EXPECT_NEAR(h, p, 5e-3) << i;
  }
  for (std::size_t i = 2; i < plain.values.size(); ++i) EXPECT_LT(std::abs(plain.values[i]), 1e-3);
}

TEST(Lifted, BlockSpectrumIsSymmetric) {
  const KernelSpec k = KernelSpec::sum(KernelSpec::sign(), KernelSpec::sum(KernelSpec::product(0.3), KernelSpec::left()));
  const KernelTable t = tabulate(k, quadrature_rule(SpaceSpec::uniform01(), 16));
  const auto nm = build_operator(OperatorKind::block, t, 16);
  EXPECT_EQ(nm.tag, Structure::block_symmetric);
  auto v = eig(nm, 10000, 0.0).values;
  std::sort(v.begin(), v.end());
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(v[i], -v[v.size() - 1 - i], 1e-6);
}

TEST(Errors, StructureAndSize) {
  expect_code([] { eig_symmetric(nystrom(KernelSpec::sign(), SpaceSpec::uniform01(), 16)); }, Errc::structure_mismatch);
  expect_code([] { eig_antisymmetric(nystrom(KernelSpec::product(), SpaceSpec::uniform01(), 16)); },
              Errc::structure_mismatch);
  expect_code([] { eig(nystrom(KernelSpec::left(), SpaceSpec::uniform01(), 16)); }, Errc::structure_mismatch);
  expect_code([] { nystrom(KernelSpec::sign(), SpaceSpec::uniform01(), 9000); }, Errc::dimension_overflow);
  expect_code([] { nystrom(KernelSpec::sign(), SpaceSpec::uniform01(), 4); }, Errc::invalid_argument);
}

TEST(Law, Writhe) {
  const auto nu = SpaceSpec::uniform01();
  const auto law = limit_law_from_theorem(StatKind::cyclic, project(KernelSpec::sign(), nu), nu);
  EXPECT_EQ(law.scale_exponent, 1.0);
  EXPECT_TRUE(law.chi.empty());
  ASSERT_GE(law.eta.size(), 3u);
  EXPECT_NEAR(law.eta[0], 1 / pi, 1e-3);
  EXPECT_NEAR(law.eta[2], 1 / (3 * pi), 1e-3);
  EXPECT_NEAR(law.variance(), 1.0 / 6.0, 1e-3);
}

TEST(Law, RademacherProduct) {
  const auto nu = SpaceSpec::rademacher();
  const auto law = limit_law_from_theorem(StatKind::classic, project(KernelSpec::product(), nu), nu);
  EXPECT_EQ(law.chi.size(), 1u);
  EXPECT_NEAR(law.chi[0], 1.0, 1e-12);
  EXPECT_NEAR(law.variance(), 0.5, 1e-12);
}

TEST(Law, HalfAreaPair) {
  const auto nu = SpaceSpec::product(SpaceSpec::rademacher(), SpaceSpec::rademacher());
  const KernelSpec k = KernelSpec::sym_part(KernelSpec::bilinear());
  const auto law = limit_law_from_theorem(StatKind::alt_second, project(k, nu), nu);
  ASSERT_EQ(law.xeta.size(), 2u);
  auto x = law.xeta;
  std::sort(x.begin(), x.end());
  EXPECT_NEAR(x[0], -0.5, 1e-12);
  EXPECT_NEAR(x[1], 0.5, 1e-12);
  EXPECT_TRUE(law.chi.empty());
  EXPECT_TRUE(law.eta.empty());
}

TEST(Law, CyclicVarianceIsHalfRemainder) {
  // product(0.5) has vanishing linear parts on uniform, so f1 + f2 = 0
  const auto nu = SpaceSpec::uniform01();
  const KernelSpec k = KernelSpec::sum(KernelSpec::sign(), KernelSpec::product(0.5));
  const auto parts = project(k, nu);
  const auto law = limit_law_from_theorem(StatKind::cyclic, parts, nu);
  EXPECT_FALSE(law.chi.empty());
  EXPECT_FALSE(law.eta.empty());
  const double target = 0.5 * (1.0 / 3.0 + 1.0 / 144.0);
  EXPECT_NEAR(law.variance(), target, 0.02 * target);
  // chi-mixture variance is half the squared sum, area variance the squared sum
  EXPECT_NEAR(law.variance(), law.gaussian_var + law.tail_var + 0.5 * sum_sq(law.chi) + sum_sq(law.eta), 1e-12);
}

TEST(Law, DoublyDegenerateBialt) {
  const auto nu = SpaceSpec::uniform01();
  const KernelSpec k = KernelSpec::sum(KernelSpec::left(), KernelSpec::right());
  const auto parts = project(k, nu);
  const auto even = limit_law_from_theorem(StatKind::bialt, parts, nu, {}, 1e-8, Parity::even);
  const auto odd = limit_law_from_theorem(StatKind::bialt, parts, nu, {}, 1e-8, Parity::odd);
  EXPECT_EQ(even.scale_exponent, 0.5);
  EXPECT_NEAR(even.gaussian_var, 1.0 / 12.0, 1e-5);
  EXPECT_NEAR(odd.gaussian_var, 1.0 / 6.0, 1e-5);
  ASSERT_TRUE(odd.parity.has_value());
  EXPECT_EQ(*odd.parity, Parity::odd);
}

TEST(Law, NondegenerateScale) {
  const auto nu = SpaceSpec::uniform01();
  const auto law = limit_law_from_theorem(StatKind::classic, project(KernelSpec::product(), nu, 4096), nu);
  EXPECT_EQ(law.scale_exponent, 1.5);
  EXPECT_NEAR(law.gaussian_var, 1.0 / 48.0, 1e-6);
}

TEST(Law, AmbiguousRegime) {
  const auto nu = SpaceSpec::uniform01();
  // var f1 = 1e-6 / 12, inside the guard band above 1e-8
  const KernelSpec k = KernelSpec::sum(KernelSpec::product(0.5),
                                       KernelSpec::scale(1e-3, KernelSpec::sum(KernelSpec::left(), KernelSpec::right())));
  expect_code([&] { limit_law_from_theorem(StatKind::classic, project(k, nu), nu); }, Errc::regime_ambiguous);
}
