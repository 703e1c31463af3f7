#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ustat/kernel.hpp"
#include "ustat/space.hpp"
#include "ustat/stat_kind.hpp"

namespace ustat {

// f = mu + f1(x) + f2(y) + f12(x, y). f1, f2 are computed by quadrature on
// demand; f12 is the remainder, so the identity is exact at every point.
class HoeffdingParts {
 public:
  HoeffdingParts(KernelSpec k, MeasureSpec nu, int m_q);

  double mu() const { return mu_; }
  double f1(const Point& x) const;
  double f2(const Point& y) const;
  double f12(const Point& x, const Point& y) const;

  const KernelSpec& kernel() const { return k_; }
  const MeasureSpec& measure() const { return nu_; }
  int resolution() const { return m_q_; }
  const QuadratureRule& rule() const { return rule_; }
  // f1, f2 at the quadrature nodes.
  const std::vector<double>& f1_nodes() const { return f1n_; }
  const std::vector<double>& f2_nodes() const { return f2n_; }

 private:
  KernelSpec k_;
  MeasureSpec nu_;
  int m_q_;
  QuadratureRule rule_;
  double mu_ = 0.0;
  std::vector<double> f1n_, f2n_;
};

HoeffdingParts project(const KernelSpec& k, const MeasureSpec& nu, int m_q = 512);

struct VarianceComponents {
  double var_f1 = 0, var_f2 = 0, cov_f1f2 = 0, var_f12 = 0, var_f1_plus_f2 = 0, var_f = 0;
};

VarianceComponents variance_components(const HoeffdingParts& parts);

enum class Regime { nondegenerate, degenerate, doubly_degenerate };

const char* regime_name(Regime r);

// Regime of one statistic. With strict set, a deciding variance inside the
// guard band [tol, 10 tol] raises regime-ambiguous.
Regime classify(StatKind stat, const VarianceComponents& vc, double tol = 1e-8, bool strict = false);

struct DegeneracyReport {
  Regime classic, cyclic, bialt, alt_second, alt_first;
};

DegeneracyReport degeneracy_class(const HoeffdingParts& parts, double tol = 1e-8);
DegeneracyReport degeneracy_class(const VarianceComponents& vc, double tol = 1e-8);

// Kernel values on the rule's nodes, with the diagonal split applied, and the
// discrete Hoeffding parts derived from that table.
struct KernelTable {
  Eigen::MatrixXd f, f12;
  Eigen::VectorXd f1, f2, w;
  double mu = 0.0;
  // sum_i w_i^2 d_i^2 with d_i = (f(lo_i, hi_i) - f(hi_i, lo_i)) / 2: the part of
  // the antisymmetric Hilbert-Schmidt norm carried by the split diagonal cells
  double diag_anti_sq = 0.0;
};

KernelTable tabulate(const KernelSpec& k, const QuadratureRule& rule);

}  // namespace ustat
