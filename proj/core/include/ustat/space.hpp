#pragma once

#include <memory>
#include <string>
#include <vector>

namespace ustat {

// A point of the sample space: a scalar (dim 1) or a pair (dim 2).
struct Point {
  double v[2] = {0.0, 0.0};
  int dim = 1;

  Point() = default;
  Point(double a) : v{a, 0.0}, dim(1) {}  // NOLINT: scalar data converts implicitly
  Point(double a, double b) : v{a, b}, dim(2) {}

  double operator[](int i) const { return v[i]; }
  bool operator==(const Point& o) const {
    return dim == o.dim && v[0] == o.v[0] && (dim == 1 || v[1] == o.v[1]);
  }
};

std::vector<Point> to_points(const std::vector<double>& xs);

class SpaceSpec {
 public:
  enum class Kind { unit_interval, atoms, rademacher, std_normal, product, rank_ordinal };

  static SpaceSpec uniform01();
  static SpaceSpec std_normal();
  static SpaceSpec rademacher();
  static SpaceSpec bernoulli(double p);
  static SpaceSpec atoms(std::vector<double> values, std::vector<double> probs);
  static SpaceSpec product(const SpaceSpec& a, const SpaceSpec& b);
  static SpaceSpec rank_ordinal(int n);

  Kind kind() const { return kind_; }
  int dim() const { return kind_ == Kind::product ? 2 : 1; }
  // Unit interval and std-normal; the quadrature for these is a midpoint rule.
  bool continuous() const { return kind_ == Kind::unit_interval || kind_ == Kind::std_normal; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& probs() const { return probs_; }
  const SpaceSpec& factor(int i) const;
  int rank_n() const { return rank_n_; }
  // Round-trips through parse_measure.
  std::string describe() const;

 private:
  SpaceSpec() = default;
  Kind kind_ = Kind::unit_interval;
  std::vector<double> values_;
  std::vector<double> probs_;
  std::shared_ptr<const SpaceSpec> a_, b_;
  int rank_n_ = 0;
  std::string label_;
};

using MeasureSpec = SpaceSpec;

// Nodes and weights for integrating against a measure. For one-dimensional
// continuous measures the rule is the composite midpoint rule in probability
// space, and a tie x_i = y_i is evaluated at the split points lo[i], hi[i]
// (centroids of the two triangles of the diagonal cell).
struct QuadratureRule {
  std::vector<Point> nodes;
  std::vector<double> weights;
  bool split_diagonal = false;
  std::vector<Point> lo, hi;

  std::size_t size() const { return nodes.size(); }
};

QuadratureRule quadrature_rule(const MeasureSpec& nu, int m_q);

}  // namespace ustat
