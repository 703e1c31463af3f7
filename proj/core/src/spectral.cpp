#include "ustat/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "ustat/error.hpp"

namespace ustat {

namespace {

constexpr double kPi = std::numbers::pi;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void guard_side(Index side) {
  if (side > kMaxNystromSide)
    throw Error(Errc::dimension_overflow, "Nystrom side " + std::to_string(side) + " exceeds 8192");
}

// Kernel values on the lifted grid (node i, t-slot a) -> row i * m_t + a.
MatrixXd lifted_values(const MatrixXd& K, Lift lift, int m_t) {
  const Index m = K.rows();
  const Index side = m * m_t;
  guard_side(side);
  const double s = lift == Lift::hat ? 1.0 : -1.0;
  MatrixXd out(side, side);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) {
      const double lt = K(i, j), gt = s * K(j, i), eq = 0.5 * (lt + gt);
      for (int a = 0; a < m_t; ++a)
        for (int b = 0; b < m_t; ++b) out(i * m_t + a, j * m_t + b) = a < b ? lt : (a > b ? gt : eq);
    }
  return out;
}

VectorXd lifted_weights(const VectorXd& w, int m_t) {
  VectorXd out(w.size() * m_t);
  for (Index i = 0; i < w.size(); ++i)
    for (int a = 0; a < m_t; ++a) out(i * m_t + a) = w(i) / m_t;
  return out;
}

NystromMatrix weighted(const MatrixXd& values, const VectorXd& weights) {
  guard_side(values.rows());
  const VectorXd r = weights.array().sqrt();
  NystromMatrix nm;
  nm.a = r.asDiagonal() * values * r.asDiagonal();
  nm.tag = detect_structure(nm.a);
  nm.weights.assign(weights.data(), weights.data() + weights.size());
  nm.m_x = static_cast<int>(values.rows());
  return nm;
}

NystromMatrix lifted_operator(const MatrixXd& K, const VectorXd& w, Lift lift, int m_t) {
  if (m_t < 8) throw Error(Errc::invalid_argument, "need m_t >= 8 on [0,1]");
  NystromMatrix nm = weighted(lifted_values(K, lift, m_t), lifted_weights(w, m_t));
  nm.m_x = static_cast<int>(K.rows());
  nm.m_t = m_t;
  return nm;
}

NystromMatrix block_operator(const MatrixXd& K12, const VectorXd& w, int m_t) {
  if (m_t < 8) throw Error(Errc::invalid_argument, "need m_t >= 8 on [0,1]");
  guard_side(2 * K12.rows() * m_t);
  const MatrixXd h = lifted_values(K12, Lift::hat, m_t);
  const MatrixXd c = lifted_values(K12, Lift::check, m_t);
  const Index s = h.rows();
  MatrixXd g(2 * s, 2 * s);
  g.topLeftCorner(s, s) = -0.5 * h;
  g.topRightCorner(s, s) = 0.5 * c;
  g.bottomLeftCorner(s, s) = -0.5 * c;
  g.bottomRightCorner(s, s) = 0.5 * h;
  const VectorXd lw = lifted_weights(w, m_t);
  VectorXd bw(2 * s);
  bw << lw, lw;
  NystromMatrix nm = weighted(g, bw);
  if (nm.tag == Structure::symmetric) nm.tag = Structure::block_symmetric;
  nm.m_x = static_cast<int>(K12.rows());
  nm.m_t = m_t;
  nm.blocks = 2;
  return nm;
}

Spectrum finish_real(std::vector<double> v, int cap, double drop) {
  std::erase_if(v, [&](double x) { return std::abs(x) < drop; });
  std::stable_sort(v.begin(), v.end(), [](double a, double b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
    return a > b;
  });
  if (static_cast<int>(v.size()) > cap) v.resize(cap);
  return {Spectrum::Mode::real_eigen, std::move(v)};
}

}  // namespace

const char* structure_name(Structure s) {
  switch (s) {
    case Structure::symmetric: return "symmetric";
    case Structure::antisymmetric: return "antisymmetric";
    case Structure::block_symmetric: return "block-symmetric";
    case Structure::general: return "general";
  }
  return "?";
}

Structure detect_structure(const MatrixXd& a, double tol) {
  if (a.rows() != a.cols()) return Structure::general;
  const double sym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (sym < tol) return Structure::symmetric;
  const double anti = (a + a.transpose()).cwiseAbs().maxCoeff();
  if (anti < tol) return Structure::antisymmetric;
  return Structure::general;
}

NystromMatrix nystrom(const MatrixXd& values, const VectorXd& weights) {
  if (values.rows() != values.cols() || values.rows() != weights.size())
    throw Error(Errc::invalid_argument, "kernel table and weights disagree in size");
  return weighted(values, weights);
}

const char* operator_name(OperatorKind op) {
  switch (op) {
    case OperatorKind::plain: return "plain";
    case OperatorKind::hat: return "hat";
    case OperatorKind::check: return "check";
    case OperatorKind::block: return "block";
    case OperatorKind::tc_sym: return "tc-sym";
    case OperatorKind::tc_anti: return "tc-anti";
  }
  return "?";
}

OperatorKind parse_operator(const std::string& name) {
  for (auto op : {OperatorKind::plain, OperatorKind::hat, OperatorKind::check, OperatorKind::block,
                  OperatorKind::tc_sym, OperatorKind::tc_anti})
    if (name == operator_name(op)) return op;
  throw Error(Errc::config_error, "unknown operator '" + name + "'");
}

NystromMatrix build_operator(OperatorKind op, const KernelTable& t, int m_t) {
  switch (op) {
    case OperatorKind::plain: return weighted(t.f, t.w);
    case OperatorKind::hat: return lifted_operator(t.f, t.w, Lift::hat, m_t);
    case OperatorKind::check: return lifted_operator(t.f, t.w, Lift::check, m_t);
    case OperatorKind::block: return block_operator(t.f12, t.w, m_t);
    case OperatorKind::tc_sym: {
      NystromMatrix nm = weighted(0.5 * (t.f12 + t.f12.transpose()), t.w);
      nm.tag = Structure::symmetric;
      return nm;
    }
    case OperatorKind::tc_anti: {
      NystromMatrix nm = weighted(0.5 * (t.f12 - t.f12.transpose()), t.w);
      nm.tag = Structure::antisymmetric;
      return nm;
    }
  }
  throw Error(Errc::invalid_argument, "unknown operator");
}

NystromMatrix nystrom(const KernelSpec& k, const MeasureSpec& nu, int m, OperatorKind op, int m_t) {
  if (nu.dim() != k.dim()) throw Error(Errc::domain_mismatch, "measure and kernel dimensions differ");
  if (nu.continuous() && m < 8) throw Error(Errc::invalid_argument, "need m >= 8 per continuous factor");
  const QuadratureRule rule = quadrature_rule(nu, m);
  guard_side(static_cast<Index>(rule.size()));
  return build_operator(op, tabulate(k, rule), m_t);
}

NystromMatrix sign_block_operator(SignBlock which, int m) {
  if (m < 8) throw Error(Errc::invalid_argument, "need m >= 8");
  guard_side(2 * static_cast<Index>(m));
  MatrixXd g(2 * m, 2 * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double sg = i < j ? 1.0 : (i > j ? -1.0 : 0.0);  // sgn(u - t), t = node i, u = node j
      if (which == SignBlock::hs) {
        g(i, j) = -0.5;
        g(i, m + j) = 0.5 * sg;
        g(m + i, j) = -0.5 * sg;
        g(m + i, m + j) = 0.5;
      } else {
        g(i, j) = -0.5 * sg;
        g(i, m + j) = 0.5;
        g(m + i, j) = -0.5;
        g(m + i, m + j) = 0.5 * sg;
      }
    }
  VectorXd w = VectorXd::Constant(2 * m, 1.0 / m);
  NystromMatrix nm = weighted(g, w);
  nm.m_x = m;
  nm.blocks = 2;
  return nm;
}

std::vector<std::pair<double, int>> Spectrum::grouped(double tol) const {
  std::vector<std::pair<double, int>> out;
  for (double v : values) {
    if (!out.empty() && std::abs(out.back().first - v) <= tol * std::max(1.0, std::abs(v)))
      ++out.back().second;
    else
      out.emplace_back(v, 1);
  }
  return out;
}

double Spectrum::sum_sq() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s;
}

const char* mode_name(Spectrum::Mode m) {
  return m == Spectrum::Mode::real_eigen ? "real-eigen" : "imaginary-pairs";
}

Spectrum eig_symmetric(const NystromMatrix& m, int cap, double drop) {
  if (m.tag != Structure::symmetric && m.tag != Structure::block_symmetric)
    throw Error(Errc::structure_mismatch, "eig_symmetric needs a symmetric matrix");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m.a, Eigen::EigenvaluesOnly);
  const VectorXd ev = es.eigenvalues();
  return finish_real(std::vector<double>(ev.data(), ev.data() + ev.size()), cap, drop);
}

Spectrum eig_antisymmetric(const NystromMatrix& m, int cap, double drop) {
  if (m.tag != Structure::antisymmetric)
    throw Error(Errc::structure_mismatch, "eig_antisymmetric needs an antisymmetric matrix");
  const MatrixXd mtm = m.a.transpose() * m.a;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(mtm, Eigen::EigenvaluesOnly);
  const VectorXd ev = es.eigenvalues();
  std::vector<double> sv;
  for (Index i = ev.size() - 1; i >= 0; --i) sv.push_back(std::sqrt(std::max(0.0, ev(i))));
  const double top = sv.empty() ? 0.0 : sv.front();
  Spectrum out{Spectrum::Mode::imaginary_pairs, {}};
  for (std::size_t i = 0; i + 1 < sv.size() && sv[i] >= drop; i += 2) {
    if (std::abs(sv[i] - sv[i + 1]) > 1e-7 * std::max(1.0, top))
      throw Error(Errc::unpaired_singular_value,
                  "singular values " + std::to_string(sv[i]) + " and " + std::to_string(sv[i + 1]) + " do not pair");
    out.values.push_back(0.5 * (sv[i] + sv[i + 1]));
    if (static_cast<int>(out.values.size()) >= cap) break;
  }
  return out;
}

Spectrum eig(const NystromMatrix& m, int cap, double drop) {
  switch (m.tag) {
    case Structure::symmetric:
    case Structure::block_symmetric: return eig_symmetric(m, cap, drop);
    case Structure::antisymmetric: return eig_antisymmetric(m, cap, drop);
    default: throw Error(Errc::structure_mismatch, "operator is neither symmetric nor antisymmetric");
  }
}

AnalyticCase parse_analytic_case(const std::string& name) {
  if (name == "L3") return AnalyticCase::L3;
  if (name == "LAs") return AnalyticCase::LAs;
  if (name == "LAa") return AnalyticCase::LAa;
  if (name == "Ewrithe") return AnalyticCase::Ewrithe;
  if (name == "E1") return AnalyticCase::E1;
  if (name == "ESJ22") return AnalyticCase::ESJ22;
  if (name == "ESJ22-perturbed") return AnalyticCase::ESJ22_perturbed;
  throw Error(Errc::unknown_case, "no analytic spectrum named '" + name + "'");
}

Spectrum analytic_spectrum(AnalyticCase c, const AnalyticParams& p, int K) {
  if (K < 1) throw Error(Errc::invalid_argument, "K must be >= 1");
  Spectrum s;
  switch (c) {
    case AnalyticCase::L3:
    case AnalyticCase::LAa:
      s.mode = Spectrum::Mode::imaginary_pairs;
      for (int k = 1; k <= K; ++k) s.values.push_back(2.0 / ((2.0 * k - 1.0) * kPi));
      return s;
    case AnalyticCase::Ewrithe:
      s.mode = Spectrum::Mode::imaginary_pairs;
      for (int k = 1; k <= K; ++k) s.values.push_back(1.0 / (kPi * k));
      return s;
    case AnalyticCase::E1:
      s.values = {p.sigma2};
      return s;
    case AnalyticCase::LAs:
    case AnalyticCase::ESJ22: {
      std::vector<double> v;
      for (int k = 1; 2 * k - 2 < K; ++k) {
        v.push_back(2.0 / ((2.0 * k - 1.0) * kPi));
        v.push_back(-2.0 / ((2.0 * k - 1.0) * kPi));
      }
      v.resize(K);
      s.values = v;
      return s;
    }
    case AnalyticCase::ESJ22_perturbed: {
      const double a = p.s + p.tau, b = p.s - p.tau;
      if (a * a + b * b == 0.0 || p.tau == 0.0) return s;
      const double w0 = std::acos(2.0 * a * b / (a * a + b * b));
      std::vector<double> v;
      for (int k = -K - 1; k <= K + 1; ++k) {
        const double d = w0 + 2.0 * k * kPi;
        if (d == 0.0) continue;
        v.push_back(2.0 * p.tau / d);
        v.push_back(-2.0 * p.tau / d);
      }
      std::sort(v.begin(), v.end(), [](double x, double y) {
        if (std::abs(x) != std::abs(y)) return std::abs(x) > std::abs(y);
        return x > y;
      });
      v.resize(K);
      s.values = v;
      return s;
    }
  }
  throw Error(Errc::unknown_case, "unknown analytic case");
}

// ---------------------------------------------------------------------------

namespace {

double clamp_tail(double v, double scale) { return v > 1e-12 * std::max(1.0, scale) ? v : 0.0; }

// chi coefficients from a symmetric operator, tail from its Frobenius norm
void chi_from(const NystromMatrix& nm, int cap, MixtureLaw& law) {
  const Spectrum s = eig_symmetric(nm, cap);
  law.chi = s.values;
  const double fro = nm.a.squaredNorm();
  law.tail_var += clamp_tail(0.5 * (fro - s.sum_sq()), fro);
}

void xeta_from(const NystromMatrix& nm, int cap, MixtureLaw& law) {
  const Spectrum s = eig_symmetric(nm, cap);
  law.xeta = s.values;
  const double fro = nm.a.squaredNorm();
  law.tail_var += clamp_tail(0.5 * (fro - s.sum_sq()), fro);
}

// diag_sq: squared norm the midpoint table misses on the diagonal cells
void eta_from(const NystromMatrix& nm, int cap, MixtureLaw& law, double diag_sq) {
  const Spectrum s = eig_antisymmetric(nm, cap);
  law.eta = s.values;
  const double fro = nm.a.squaredNorm() + diag_sq;
  law.tail_var += clamp_tail(0.5 * fro - s.sum_sq(), fro);
}

NystromMatrix as_symmetric(const MatrixXd& v, const VectorXd& w) {
  NystromMatrix nm = weighted(0.5 * (v + v.transpose()), w);
  nm.tag = Structure::symmetric;
  return nm;
}

NystromMatrix as_antisymmetric(const MatrixXd& v, const VectorXd& w) {
  NystromMatrix nm = weighted(0.5 * (v - v.transpose()), w);
  nm.tag = Structure::antisymmetric;
  return nm;
}

// Law of n^{-1}(U_n(g) - E U_n(g)) for a kernel with vanishing linear parts,
// given the table of g12 and the symmetry of g.
void classic_degenerate(const MatrixXd& g12, const VectorXd& w, double diag_sq, Symmetry sym, const KernelSpec& k,
                        const MeasureSpec& nu, const Resolution& res, bool transpose, MixtureLaw& law) {
  if (sym == Symmetry::symmetric) {
    chi_from(as_symmetric(g12, w), res.cap, law);
  } else if (sym == Symmetry::antisymmetric) {
    eta_from(as_antisymmetric(g12, w), res.cap, law, diag_sq);
  } else {
    const KernelTable lt = tabulate(k, quadrature_rule(nu, res.m_x_lifted));
    const MatrixXd f12 = transpose ? MatrixXd(lt.f12.transpose()) : lt.f12;
    chi_from(lifted_operator(f12, lt.w, Lift::hat, res.m_t), res.cap, law);
  }
}

}  // namespace

MixtureLaw limit_law_from_theorem(StatKind stat, const HoeffdingParts& parts, const MeasureSpec& nu,
                                  const Resolution& res, double tol, Parity parity) {
  if (nu.describe() != parts.measure().describe())
    throw Error(Errc::domain_mismatch, "measure differs from the one used for the projection");
  const VarianceComponents vc = variance_components(parts);
  const Regime regime = classify(stat, vc, tol, true);
  MixtureLaw law;

  if (regime == Regime::nondegenerate) {
    law.scale_exponent = 1.5;
    switch (stat) {
      case StatKind::classic: law.gaussian_var = (vc.var_f1 + vc.var_f2 + vc.cov_f1f2) / 3.0; break;
      case StatKind::full: law.gaussian_var = vc.var_f1_plus_f2; break;
      case StatKind::cyclic: law.gaussian_var = 0.25 * vc.var_f1_plus_f2; break;
      case StatKind::alt_second: law.gaussian_var = vc.var_f2 / 3.0; break;
      case StatKind::alt_first: law.gaussian_var = vc.var_f1 / 3.0; break;
      default: break;
    }
    return law;
  }

  if (regime == Regime::doubly_degenerate) {
    law.scale_exponent = 0.5;
    switch (stat) {
      case StatKind::bialt:
        law.parity = parity;
        law.gaussian_var = parity == Parity::even ? 0.5 * (vc.var_f1 + vc.var_f2) : 0.5 * vc.var_f1_plus_f2;
        break;
      case StatKind::alt_second: law.gaussian_var = 0.5 * vc.var_f1; break;
      case StatKind::alt_first: law.gaussian_var = 0.5 * vc.var_f2; break;
      default: break;
    }
    return law;
  }

  law.scale_exponent = 1.0;
  const KernelSpec& k = parts.kernel();
  const QuadratureRule rule = quadrature_rule(nu, res.m);
  guard_side(static_cast<Index>(rule.size()));
  const KernelTable t = tabulate(k, rule);
  const Symmetry sym = k.symmetry();

  switch (stat) {
    case StatKind::classic:
    case StatKind::bialt:
      classic_degenerate(t.f12, t.w, t.diag_anti_sq, sym, k, nu, res, false, law);
      break;
    case StatKind::full:
      chi_from(as_symmetric(2.0 * t.f12, t.w), res.cap, law);
      break;
    case StatKind::cyclic:
      if (sym != Symmetry::antisymmetric) chi_from(as_symmetric(t.f12, t.w), res.cap, law);
      if (sym != Symmetry::symmetric) eta_from(as_antisymmetric(t.f12, t.w), res.cap, law, t.diag_anti_sq);
      break;
    case StatKind::cyclic_sym:
      eta_from(as_antisymmetric(2.0 * t.f12, t.w), res.cap, law, 4.0 * t.diag_anti_sq);
      break;
    case StatKind::alt_second:
    case StatKind::alt_first: {
      const bool tr = stat == StatKind::alt_first;
      const MatrixXd g = tr ? MatrixXd(t.f12.transpose()) : t.f12;
      if (sym == Symmetry::symmetric) {
        xeta_from(as_symmetric(g, t.w), res.cap, law);
      } else if (sym == Symmetry::antisymmetric) {
        eta_from(as_antisymmetric(g, t.w), res.cap, law, t.diag_anti_sq);
      } else {
        const KernelTable lt = tabulate(k, quadrature_rule(nu, res.m_x_lifted));
        const MatrixXd lg = tr ? MatrixXd(lt.f12.transpose()) : lt.f12;
        chi_from(block_operator(lg, lt.w, res.m_t), res.cap, law);
      }
      break;
    }
  }
  return law;
}

}  // namespace ustat
