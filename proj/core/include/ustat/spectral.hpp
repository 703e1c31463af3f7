#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "ustat/hoeffding.hpp"
#include "ustat/limitlaws.hpp"
#include "ustat/stat_kind.hpp"

namespace ustat {

enum class Structure { symmetric, antisymmetric, block_symmetric, general };

const char* structure_name(Structure s);

inline constexpr Eigen::Index kMaxNystromSide = 8192;

// Entries w_i^{1/2} K(node_i, node_j) w_j^{1/2}.
struct NystromMatrix {
  Eigen::MatrixXd a;
  Structure tag = Structure::general;
  std::vector<double> weights;
  int m_x = 0, m_t = 1, blocks = 1;
};

Structure detect_structure(const Eigen::MatrixXd& a, double tol = 1e-12);

// Weight-symmetrizes a table of kernel values; the tag is detected.
NystromMatrix nystrom(const Eigen::MatrixXd& values, const Eigen::VectorXd& weights);

enum class OperatorKind { plain, hat, check, block, tc_sym, tc_anti };

const char* operator_name(OperatorKind op);
OperatorKind parse_operator(const std::string& name);

// Operators on the nodes of a tabulated kernel:
//   plain    T_f
//   hat      T of the hat lift on X x [0,1] (m_t midpoints)
//   check    T of the check lift
//   block    1/2 [[-hat f12, check f12], [-check f12, hat f12]]
//   tc_sym   T of the symmetric part of f12
//   tc_anti  T of the antisymmetric part of f12
// Ties t = u in the lifted grids take the average of the t<u and t>u branches.
NystromMatrix build_operator(OperatorKind op, const KernelTable& table, int m_t = 64);

// Convenience: tabulate k on the m-node rule of nu and build the operator.
NystromMatrix nystrom(const KernelSpec& k, const MeasureSpec& nu, int m, OperatorKind op = OperatorKind::plain,
                      int m_t = 64);

enum class SignBlock { hs, ha };

// Block kernels on [0,1] x {1,2} (counting measure on the block index):
//   hs = 1/2 [[-1, sgn(u-t)], [-sgn(u-t), 1]]
//   ha = 1/2 [[-sgn(u-t), 1], [-1, sgn(u-t)]]
NystromMatrix sign_block_operator(SignBlock which, int m);

struct Spectrum {
  enum class Mode { real_eigen, imaginary_pairs };
  Mode mode = Mode::real_eigen;
  // real_eigen: eigenvalues by |lambda| descending; imaginary_pairs: lambda_q > 0 meaning +-i lambda_q
  std::vector<double> values;

  std::vector<std::pair<double, int>> grouped(double tol = 1e-6) const;
  double sum_sq() const;
};

const char* mode_name(Spectrum::Mode m);

Spectrum eig_symmetric(const NystromMatrix& m, int cap = 64, double drop = 1e-8);
Spectrum eig_antisymmetric(const NystromMatrix& m, int cap = 64, double drop = 1e-8);
// Dispatches on the structure tag; general matrices raise structure-mismatch.
Spectrum eig(const NystromMatrix& m, int cap = 64, double drop = 1e-8);

enum class AnalyticCase { L3, LAs, LAa, Ewrithe, E1, ESJ22, ESJ22_perturbed };

AnalyticCase parse_analytic_case(const std::string& name);

struct AnalyticParams {
  double sigma2 = 1.0;  // E1
  double s = 1.0, tau = 1.0;  // ESJ22-perturbed
};

Spectrum analytic_spectrum(AnalyticCase c, const AnalyticParams& p, int K);

struct Resolution {
  int m = 400;         // nodes per continuous factor for operators on X
  int m_x_lifted = 32; // nodes per continuous factor for operators on X x [0,1]
  int m_t = 64;        // nodes on [0,1] for lifted operators
  int cap = 64;        // eigenvalues kept
};

MixtureLaw limit_law_from_theorem(StatKind stat, const HoeffdingParts& parts, const MeasureSpec& nu,
                                  const Resolution& res = {}, double tol = 1e-8, Parity parity = Parity::even);

}  // namespace ustat
