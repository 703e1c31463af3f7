#include "ustat/space.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ustat/error.hpp"

namespace ustat {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::domain_mismatch: return "domain-mismatch";
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::unsupported_measure: return "unsupported-measure";
    case Errc::unsupported_kernel: return "unsupported-kernel";
    case Errc::symmetry_violation: return "symmetry-violation";
    case Errc::regime_mismatch: return "regime-mismatch";
    case Errc::regime_ambiguous: return "regime-ambiguous";
    case Errc::structure_mismatch: return "structure-mismatch";
    case Errc::unpaired_singular_value: return "unpaired-singular-value";
    case Errc::unknown_case: return "unknown-case";
    case Errc::dimension_overflow: return "dimension-overflow";
    case Errc::insufficient_data: return "insufficient-data";
    case Errc::not_a_permutation: return "not-a-permutation";
    case Errc::config_error: return "config-error";
  }
  return "error";
}

std::vector<Point> to_points(const std::vector<double>& xs) {
  return std::vector<Point>(xs.begin(), xs.end());
}

SpaceSpec SpaceSpec::uniform01() {
  SpaceSpec s;
  s.kind_ = Kind::unit_interval;
  return s;
}

SpaceSpec SpaceSpec::std_normal() {
  SpaceSpec s;
  s.kind_ = Kind::std_normal;
  return s;
}

SpaceSpec SpaceSpec::rademacher() {
  SpaceSpec s = atoms({-1.0, 1.0}, {0.5, 0.5});
  s.kind_ = Kind::rademacher;
  return s;
}

SpaceSpec SpaceSpec::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::invalid_argument, "bernoulli p outside [0,1]");
  SpaceSpec s = atoms({0.0, 1.0}, {1.0 - p, p});
  std::ostringstream os;
  os.precision(17);
  os << "bernoulli " << p;
  s.label_ = os.str();
  return s;
}

SpaceSpec SpaceSpec::atoms(std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size())
    throw Error(Errc::invalid_argument, "atoms need matching nonempty values and probabilities");
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw Error(Errc::invalid_argument, "negative atom probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw Error(Errc::invalid_argument, "atom probabilities do not sum to 1");
  SpaceSpec s;
  s.kind_ = Kind::atoms;
  s.values_ = std::move(values);
  s.probs_ = std::move(probs);
  return s;
}

SpaceSpec SpaceSpec::product(const SpaceSpec& a, const SpaceSpec& b) {
  if (a.dim() != 1 || b.dim() != 1) throw Error(Errc::invalid_argument, "product spaces nest at most once");
  if (a.kind_ == Kind::rank_ordinal || b.kind_ == Kind::rank_ordinal)
    throw Error(Errc::invalid_argument, "rank-ordinal cannot be a product factor");
  SpaceSpec s;
  s.kind_ = Kind::product;
  s.a_ = std::make_shared<const SpaceSpec>(a);
  s.b_ = std::make_shared<const SpaceSpec>(b);
  return s;
}

SpaceSpec SpaceSpec::rank_ordinal(int n) {
  if (n < 1) throw Error(Errc::invalid_argument, "rank-ordinal needs n >= 1");
  SpaceSpec s;
  s.kind_ = Kind::rank_ordinal;
  s.rank_n_ = n;
  return s;
}

const SpaceSpec& SpaceSpec::factor(int i) const {
  if (kind_ != Kind::product) throw Error(Errc::invalid_argument, "not a product space");
  return i == 0 ? *a_ : *b_;
}

std::string SpaceSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::unit_interval: return "uniform01";
    case Kind::std_normal: return "stdnormal";
    case Kind::rademacher: return "rademacher";
    case Kind::rank_ordinal: os << "ranks " << rank_n_; return os.str();
    case Kind::product: return "product(" + a_->describe() + ", " + b_->describe() + ")";
    case Kind::atoms:
      if (!label_.empty()) return label_;
      os << "atoms [";
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i) os << ", ";
        os << values_[i] << ":" << probs_[i];
      }
      os << "]";
      return os.str();
  }
  return "?";
}

namespace {

struct Rule1 {
  std::vector<double> x, w, lo, hi;
  bool split = false;
};

Rule1 rule1(const SpaceSpec& s, int m) {
  Rule1 r;
  switch (s.kind()) {
    case SpaceSpec::Kind::unit_interval:
    case SpaceSpec::Kind::std_normal: {
      if (m < 2) throw Error(Errc::invalid_argument, "quadrature needs m_q >= 2");
      const bool normal = s.kind() == SpaceSpec::Kind::std_normal;
      boost::math::normal_distribution<double> nd;
      auto map = [&](double u) { return normal ? boost::math::quantile(nd, u) : u; };
      const double h = 1.0 / m;
      r.split = true;
      for (int i = 0; i < m; ++i) {
        const double u = (i + 0.5) * h;
        r.x.push_back(map(u));
        r.w.push_back(h);
        r.lo.push_back(map(u - h / 6.0));
        r.hi.push_back(map(u + h / 6.0));
      }
      return r;
    }
    case SpaceSpec::Kind::atoms:
    case SpaceSpec::Kind::rademacher:
      r.x = s.values();
      r.w = s.probs();
      return r;
    default:
      throw Error(Errc::unsupported_measure, "no quadrature for " + s.describe());
  }
}

}  // namespace

QuadratureRule quadrature_rule(const MeasureSpec& nu, int m_q) {
  QuadratureRule q;
  if (nu.kind() == SpaceSpec::Kind::product) {
    if (m_q < 2) throw Error(Errc::invalid_argument, "quadrature needs m_q >= 2");
    const int per = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(m_q))));
    const Rule1 a = rule1(nu.factor(0), std::max(per, 2));
    const Rule1 b = rule1(nu.factor(1), std::max(per, 2));
    for (std::size_t i = 0; i < a.x.size(); ++i)
      for (std::size_t j = 0; j < b.x.size(); ++j) {
        q.nodes.emplace_back(a.x[i], b.x[j]);
        q.weights.push_back(a.w[i] * b.w[j]);
      }
    return q;
  }
  Rule1 r = rule1(nu, m_q);
  for (double x : r.x) q.nodes.emplace_back(x);
  q.weights = std::move(r.w);
  q.split_diagonal = r.split;
  if (r.split) {
    for (double x : r.lo) q.lo.emplace_back(x);
    for (double x : r.hi) q.hi.emplace_back(x);
  }
  return q;
}

}  // namespace ustat
