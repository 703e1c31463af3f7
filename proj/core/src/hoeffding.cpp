#include "ustat/hoeffding.hpp"

#include <cmath>

#include "ustat/error.hpp"

namespace ustat {

namespace {

// Value of f at node pair (i, j); on the diagonal of a split rule this is the
// average over the two centroid points.
double cell(const KernelSpec& k, const QuadratureRule& r, std::size_t i, std::size_t j) {
  if (i == j && r.split_diagonal)
    return 0.5 * (k.eval_unchecked(r.lo[i], r.hi[i]) + k.eval_unchecked(r.hi[i], r.lo[i]));
  return k.eval_unchecked(r.nodes[i], r.nodes[j]);
}

// Single-integral term for x against node j; a tie with a split rule uses the
// same cell average as the double integral.
double term(const KernelSpec& k, const QuadratureRule& r, const Point& x, std::size_t j, bool x_first) {
  if (r.split_diagonal && x == r.nodes[j])
    return 0.5 * (k.eval_unchecked(r.lo[j], r.hi[j]) + k.eval_unchecked(r.hi[j], r.lo[j]));
  return x_first ? k.eval_unchecked(x, r.nodes[j]) : k.eval_unchecked(r.nodes[j], x);
}

}  // namespace

HoeffdingParts::HoeffdingParts(KernelSpec k, MeasureSpec nu, int m_q)
    : k_(std::move(k)), nu_(std::move(nu)), m_q_(m_q) {
  if (nu_.kind() == SpaceSpec::Kind::rank_ordinal)
    throw Error(Errc::unsupported_measure, "rank-ordinal is a permutation mode, not a law");
  if (m_q < 2) throw Error(Errc::invalid_argument, "m_q must be >= 2");
  if (nu_.dim() != k_.dim()) throw Error(Errc::domain_mismatch, "measure and kernel dimensions differ");
  rule_ = quadrature_rule(nu_, m_q);
  const std::size_t m = rule_.size();
  const auto& w = rule_.weights;
  std::vector<double> row(m, 0.0), col(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double v = cell(k_, rule_, i, j);
      row[i] += w[j] * v;
      col[j] += w[i] * v;
    }
  double mu = 0.0;
  for (std::size_t i = 0; i < m; ++i) mu += w[i] * row[i];
  mu_ = mu;
  f1n_.resize(m);
  f2n_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    f1n_[i] = row[i] - mu_;
    f2n_[i] = col[i] - mu_;
  }
}

double HoeffdingParts::f1(const Point& x) const {
  if (x.dim != k_.dim()) throw Error(Errc::domain_mismatch, "point dimension differs from kernel domain");
  double s = 0.0;
  for (std::size_t j = 0; j < rule_.size(); ++j) s += rule_.weights[j] * term(k_, rule_, x, j, true);
  return s - mu_;
}

double HoeffdingParts::f2(const Point& y) const {
  if (y.dim != k_.dim()) throw Error(Errc::domain_mismatch, "point dimension differs from kernel domain");
  double s = 0.0;
  for (std::size_t j = 0; j < rule_.size(); ++j) s += rule_.weights[j] * term(k_, rule_, y, j, false);
  return s - mu_;
}

double HoeffdingParts::f12(const Point& x, const Point& y) const {
  return k_(x, y) - mu_ - f1(x) - f2(y);
}

HoeffdingParts project(const KernelSpec& k, const MeasureSpec& nu, int m_q) {
  return HoeffdingParts(k, nu, m_q);
}

VarianceComponents variance_components(const HoeffdingParts& parts) {
  const auto& r = parts.rule();
  const auto& k = parts.kernel();
  const auto& w = r.weights;
  const auto& f1 = parts.f1_nodes();
  const auto& f2 = parts.f2_nodes();
  const double mu = parts.mu();
  const std::size_t m = r.size();
  VarianceComponents vc;
  for (std::size_t i = 0; i < m; ++i) {
    vc.var_f1 += w[i] * f1[i] * f1[i];
    vc.var_f2 += w[i] * f2[i] * f2[i];
    vc.cov_f1f2 += w[i] * f1[i] * f2[i];
    vc.var_f1_plus_f2 += w[i] * (f1[i] + f2[i]) * (f1[i] + f2[i]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    double s12 = 0.0, sf = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j && r.split_diagonal) {
        for (double v : {k.eval_unchecked(r.lo[i], r.hi[i]), k.eval_unchecked(r.hi[i], r.lo[i])}) {
          const double c = v - mu;
          const double d = c - f1[i] - f2[i];
          s12 += 0.5 * w[j] * d * d;
          sf += 0.5 * w[j] * c * c;
        }
        continue;
      }
      const double c = k.eval_unchecked(r.nodes[i], r.nodes[j]) - mu;
      const double d = c - f1[i] - f2[j];
      s12 += w[j] * d * d;
      sf += w[j] * c * c;
    }
    vc.var_f12 += w[i] * s12;
    vc.var_f += w[i] * sf;
  }
  return vc;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::nondegenerate: return "nondegenerate";
    case Regime::degenerate: return "degenerate";
    case Regime::doubly_degenerate: return "doubly-degenerate";
  }
  return "?";
}

namespace {

// true when v counts as zero
bool is_zero(double v, double tol, bool strict, const char* what) {
  if (strict && v >= tol && v <= 10.0 * tol)
    throw Error(Errc::regime_ambiguous,
                std::string(what) + " lies in the guard band [tol, 10 tol]; raise the resolution");
  return v < tol;
}

}  // namespace

Regime classify(StatKind stat, const VarianceComponents& vc, double tol, bool strict) {
  if (!(tol > 0)) throw Error(Errc::invalid_argument, "tol must be positive");
  bool degenerate = true;
  switch (stat) {
    case StatKind::classic:
      degenerate = is_zero(vc.var_f1, tol, strict, "Var f1") && is_zero(vc.var_f2, tol, strict, "Var f2");
      break;
    case StatKind::cyclic:
    case StatKind::full:
      degenerate = is_zero(vc.var_f1_plus_f2, tol, strict, "Var(f1+f2)");
      break;
    case StatKind::alt_second: degenerate = is_zero(vc.var_f2, tol, strict, "Var f2"); break;
    case StatKind::alt_first: degenerate = is_zero(vc.var_f1, tol, strict, "Var f1"); break;
    case StatKind::bialt:
    case StatKind::cyclic_sym: degenerate = true; break;
  }
  if (!degenerate) return Regime::nondegenerate;
  return is_zero(vc.var_f12, tol, strict, "Var f12") ? Regime::doubly_degenerate : Regime::degenerate;
}

DegeneracyReport degeneracy_class(const VarianceComponents& vc, double tol) {
  return {classify(StatKind::classic, vc, tol), classify(StatKind::cyclic, vc, tol),
          classify(StatKind::bialt, vc, tol), classify(StatKind::alt_second, vc, tol),
          classify(StatKind::alt_first, vc, tol)};
}

DegeneracyReport degeneracy_class(const HoeffdingParts& parts, double tol) {
  return degeneracy_class(variance_components(parts), tol);
}

KernelTable tabulate(const KernelSpec& k, const QuadratureRule& rule) {
  const auto m = static_cast<Eigen::Index>(rule.size());
  KernelTable t;
  t.f.resize(m, m);
  t.w.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    t.w(i) = rule.weights[i];
    for (Eigen::Index j = 0; j < m; ++j) t.f(i, j) = cell(k, rule, i, j);
    if (rule.split_diagonal) {
      const double d = 0.5 * (k.eval_unchecked(rule.lo[i], rule.hi[i]) - k.eval_unchecked(rule.hi[i], rule.lo[i]));
      t.diag_anti_sq += t.w(i) * t.w(i) * d * d;
    }
  }
  t.f1 = t.f * t.w;
  t.f2 = t.f.transpose() * t.w;
  t.mu = t.w.dot(t.f1);
  t.f1.array() -= t.mu;
  t.f2.array() -= t.mu;
  t.f12 = t.f;
  t.f12.array() -= t.mu;
  t.f12.colwise() -= t.f1;
  t.f12.rowwise() -= t.f2.transpose();
  return t;
}

}  // namespace ustat
