#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ustat/space.hpp"

namespace ustat {

enum class Symmetry { symmetric, antisymmetric, general };

const char* symmetry_name(Symmetry s);

// Coordinate factor of a separable kernel: p[index] - shift, or 1 when index < 0.
struct Coord {
  int index = -1;
  double shift = 0.0;
  double operator()(const Point& p) const { return index < 0 ? 1.0 : p.v[index] - shift; }
};

// f(x, y) = coef * a(x) * b(y)
struct SeparableTerm {
  double coef = 1.0;
  Coord a, b;
};

// Immutable composition tree over builtin kernels. Copies share the tree.
class KernelSpec {
 public:
  static KernelSpec sign();                      // sgn(x - y)
  static KernelSpec product(double shift = 0.0); // (x - c)(y - c)
  static KernelSpec bilinear();                  // x1 * y2 on pairs
  static KernelSpec left();                      // x
  static KernelSpec right();                     // y
  static KernelSpec constant(double c, int dim = 1);
  static KernelSpec sum(const KernelSpec& a, const KernelSpec& b);
  static KernelSpec scale(double c, const KernelSpec& k);
  static KernelSpec swap(const KernelSpec& k);
  static KernelSpec sym_part(const KernelSpec& k);
  static KernelSpec antisym_part(const KernelSpec& k);

  // Checks point dimensions against the kernel domain.
  double operator()(const Point& x, const Point& y) const;
  // No dimension checks; for inner loops over validated data.
  double eval_unchecked(const Point& x, const Point& y) const;

  Symmetry symmetry() const;
  int dim() const;
  std::string describe() const;

  // Re-tags a kernel after verifying the claim on the probe grid.
  KernelSpec with_declared_symmetry(Symmetry s) const;

  std::optional<std::vector<SeparableTerm>> separable_terms() const;
  // c when the kernel is c * sgn(x - y) on scalars.
  std::optional<double> sign_coefficient() const;

  struct Node;

 private:
  explicit KernelSpec(std::shared_ptr<const Node> n);
  static KernelSpec make(std::shared_ptr<Node> n);
  std::shared_ptr<const Node> node_;
};

// Probe points used for symmetry verification (10 per dimension).
std::vector<Point> probe_grid(int dim);
// Max |f(x,y) - s f(y,x)| over the probe grid, s = +1 or -1.
double probe_asymmetry(const KernelSpec& k, double s);

double eval_kernel(const KernelSpec& k, const Point& x, const Point& y);
KernelSpec swap_kernel(const KernelSpec& k);
KernelSpec symmetric_part(const KernelSpec& k);
KernelSpec antisymmetric_part(const KernelSpec& k);

enum class Lift { hat, check };

struct LiftedPoint {
  Point x;
  double t = 0.0;
};

class LiftedKernelSpec {
 public:
  LiftedKernelSpec(KernelSpec base, Lift lift) : base_(std::move(base)), lift_(lift) {}
  double operator()(const LiftedPoint& a, const LiftedPoint& b) const;
  const KernelSpec& base() const { return base_; }
  Lift lift() const { return lift_; }
  Symmetry symmetry() const {
    return lift_ == Lift::hat ? Symmetry::symmetric : Symmetry::antisymmetric;
  }

 private:
  KernelSpec base_;
  Lift lift_;
};

LiftedKernelSpec lift_kernel(const KernelSpec& k, Lift which);

}  // namespace ustat
