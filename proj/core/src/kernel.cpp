#include "ustat/kernel.hpp"

#include <cmath>
#include <sstream>

#include "ustat/error.hpp"

namespace ustat {

const char* symmetry_name(Symmetry s) {
  switch (s) {
    case Symmetry::symmetric: return "symmetric";
    case Symmetry::antisymmetric: return "antisymmetric";
    case Symmetry::general: return "general";
  }
  return "?";
}

struct KernelSpec::Node {
  enum class Op { sign, product, bilinear, left, right, constant, sum, scale, swap, sym, antisym };
  Op op = Op::sign;
  double param = 0.0;
  std::shared_ptr<const Node> a, b;
  Symmetry sym = Symmetry::general;
  int dim = 1;
};

namespace {

using Node = KernelSpec::Node;
using Op = Node::Op;

double ev(const Node& n, const Point& x, const Point& y) {
  switch (n.op) {
    case Op::sign: {
      const double d = x.v[0] - y.v[0];
      return d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
    }
    case Op::product: return (x.v[0] - n.param) * (y.v[0] - n.param);
    case Op::bilinear: return x.v[0] * y.v[1];
    case Op::left: return x.v[0];
    case Op::right: return y.v[0];
    case Op::constant: return n.param;
    case Op::sum: return ev(*n.a, x, y) + ev(*n.b, x, y);
    case Op::scale: return n.param * ev(*n.a, x, y);
    case Op::swap: return ev(*n.a, y, x);
    case Op::sym: return 0.5 * (ev(*n.a, x, y) + ev(*n.a, y, x));
    case Op::antisym: return 0.5 * (ev(*n.a, x, y) - ev(*n.a, y, x));
  }
  return 0.0;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string desc(const Node& n) {
  switch (n.op) {
    case Op::sign: return "sign";
    case Op::product: return n.param == 0.0 ? "product" : "product(" + num(n.param) + ")";
    case Op::bilinear: return "bilinear";
    case Op::left: return "left";
    case Op::right: return "right";
    case Op::constant:
      return n.dim == 1 ? "constant(" + num(n.param) + ")"
                        : "constant(" + num(n.param) + ", 2)";
    case Op::sum: return "sum(" + desc(*n.a) + ", " + desc(*n.b) + ")";
    case Op::scale: return "scale(" + num(n.param) + ", " + desc(*n.a) + ")";
    case Op::swap: return "swap(" + desc(*n.a) + ")";
    case Op::sym: return "sym-part(" + desc(*n.a) + ")";
    case Op::antisym: return "antisym-part(" + desc(*n.a) + ")";
  }
  return "?";
}

std::optional<std::vector<SeparableTerm>> sep(const Node& n) {
  using V = std::vector<SeparableTerm>;
  switch (n.op) {
    case Op::sign: return std::nullopt;
    case Op::product: return V{{1.0, {0, n.param}, {0, n.param}}};
    case Op::bilinear: return V{{1.0, {0, 0.0}, {1, 0.0}}};
    case Op::left: return V{{1.0, {0, 0.0}, {}}};
    case Op::right: return V{{1.0, {}, {0, 0.0}}};
    case Op::constant: return V{{n.param, {}, {}}};
    case Op::sum: {
      auto a = sep(*n.a);
      auto b = sep(*n.b);
      if (!a || !b) return std::nullopt;
      a->insert(a->end(), b->begin(), b->end());
      return a;
    }
    case Op::scale: {
      auto a = sep(*n.a);
      if (!a) return std::nullopt;
      for (auto& t : *a) t.coef *= n.param;
      return a;
    }
    case Op::swap: {
      auto a = sep(*n.a);
      if (!a) return std::nullopt;
      for (auto& t : *a) std::swap(t.a, t.b);
      return a;
    }
    case Op::sym:
    case Op::antisym: {
      auto a = sep(*n.a);
      if (!a) return std::nullopt;
      const double s = n.op == Op::sym ? 0.5 : -0.5;
      V out;
      for (const auto& t : *a) out.push_back({0.5 * t.coef, t.a, t.b});
      for (const auto& t : *a) out.push_back({s * t.coef, t.b, t.a});
      return out;
    }
  }
  return std::nullopt;
}

std::optional<double> sign_coef(const Node& n) {
  switch (n.op) {
    case Op::sign: return 1.0;
    case Op::sum: {
      auto a = sign_coef(*n.a);
      auto b = sign_coef(*n.b);
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    case Op::scale: {
      auto a = sign_coef(*n.a);
      if (!a) return std::nullopt;
      return n.param * *a;
    }
    case Op::swap: {
      auto a = sign_coef(*n.a);
      if (!a) return std::nullopt;
      return -*a;
    }
    case Op::antisym: return sign_coef(*n.a);
    case Op::sym: {
      if (!sign_coef(*n.a)) return std::nullopt;
      return 0.0;
    }
    default: return std::nullopt;
  }
}

Symmetry combine(Symmetry a, Symmetry b) { return a == b ? a : Symmetry::general; }

}  // namespace

KernelSpec::KernelSpec(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

KernelSpec KernelSpec::make(std::shared_ptr<Node> n) {
  KernelSpec k(n);
  if (n->sym != Symmetry::general) {
    const double s = n->sym == Symmetry::symmetric ? 1.0 : -1.0;
    if (probe_asymmetry(k, s) > 1e-12)
      throw Error(Errc::symmetry_violation, desc(*n) + " is not " + symmetry_name(n->sym));
  }
  return k;
}

KernelSpec KernelSpec::sign() {
  auto n = std::make_shared<Node>();
  n->op = Op::sign;
  n->sym = Symmetry::antisymmetric;
  return make(n);
}

KernelSpec KernelSpec::product(double shift) {
  auto n = std::make_shared<Node>();
  n->op = Op::product;
  n->param = shift;
  n->sym = Symmetry::symmetric;
  return make(n);
}

KernelSpec KernelSpec::bilinear() {
  auto n = std::make_shared<Node>();
  n->op = Op::bilinear;
  n->dim = 2;
  return make(n);
}

KernelSpec KernelSpec::left() {
  auto n = std::make_shared<Node>();
  n->op = Op::left;
  return make(n);
}

KernelSpec KernelSpec::right() {
  auto n = std::make_shared<Node>();
  n->op = Op::right;
  return make(n);
}

KernelSpec KernelSpec::constant(double c, int dim) {
  if (dim != 1 && dim != 2) throw Error(Errc::invalid_argument, "kernel dimension must be 1 or 2");
  auto n = std::make_shared<Node>();
  n->op = Op::constant;
  n->param = c;
  n->dim = dim;
  n->sym = Symmetry::symmetric;
  return make(n);
}

KernelSpec KernelSpec::sum(const KernelSpec& a, const KernelSpec& b) {
  if (a.dim() != b.dim()) throw Error(Errc::domain_mismatch, "sum of kernels on different domains");
  auto n = std::make_shared<Node>();
  n->op = Op::sum;
  n->a = a.node_;
  n->b = b.node_;
  n->dim = a.dim();
  n->sym = combine(a.symmetry(), b.symmetry());
  return make(n);
}

KernelSpec KernelSpec::scale(double c, const KernelSpec& k) {
  auto n = std::make_shared<Node>();
  n->op = Op::scale;
  n->param = c;
  n->a = k.node_;
  n->dim = k.dim();
  n->sym = k.symmetry();
  return make(n);
}

KernelSpec KernelSpec::swap(const KernelSpec& k) {
  auto n = std::make_shared<Node>();
  n->op = Op::swap;
  n->a = k.node_;
  n->dim = k.dim();
  n->sym = k.symmetry();
  return make(n);
}

KernelSpec KernelSpec::sym_part(const KernelSpec& k) {
  auto n = std::make_shared<Node>();
  n->op = Op::sym;
  n->a = k.node_;
  n->dim = k.dim();
  n->sym = Symmetry::symmetric;
  return make(n);
}

KernelSpec KernelSpec::antisym_part(const KernelSpec& k) {
  auto n = std::make_shared<Node>();
  n->op = Op::antisym;
  n->a = k.node_;
  n->dim = k.dim();
  n->sym = Symmetry::antisymmetric;
  return make(n);
}

double KernelSpec::operator()(const Point& x, const Point& y) const {
  if (x.dim != node_->dim || y.dim != node_->dim)
    throw Error(Errc::domain_mismatch, "point dimension differs from kernel domain");
  return ev(*node_, x, y);
}

double KernelSpec::eval_unchecked(const Point& x, const Point& y) const { return ev(*node_, x, y); }

Symmetry KernelSpec::symmetry() const { return node_->sym; }
int KernelSpec::dim() const { return node_->dim; }
std::string KernelSpec::describe() const { return desc(*node_); }

KernelSpec KernelSpec::with_declared_symmetry(Symmetry s) const {
  auto n = std::make_shared<Node>(*node_);
  n->sym = s;
  return make(n);
}

std::optional<std::vector<SeparableTerm>> KernelSpec::separable_terms() const { return sep(*node_); }
std::optional<double> KernelSpec::sign_coefficient() const {
  if (node_->dim != 1) return std::nullopt;
  return sign_coef(*node_);
}

std::vector<Point> probe_grid(int dim) {
  static const double xs[10] = {-1.3, -0.6, -0.1, 0.0, 0.2, 0.35, 0.5, 0.71, 1.0, 1.8};
  static const double ys[10] = {0.4, -0.9, 1.1, 0.25, -0.3, 0.0, 0.8, -1.6, 0.6, 2.2};
  std::vector<Point> g;
  for (int i = 0; i < 10; ++i) {
    if (dim == 1)
      g.emplace_back(xs[i]);
    else
      g.emplace_back(xs[i], ys[i]);
  }
  return g;
}

double probe_asymmetry(const KernelSpec& k, double s) {
  const auto g = probe_grid(k.dim());
  double worst = 0.0;
  for (const auto& x : g)
    for (const auto& y : g) worst = std::max(worst, std::abs(k.eval_unchecked(x, y) - s * k.eval_unchecked(y, x)));
  return worst;
}

double eval_kernel(const KernelSpec& k, const Point& x, const Point& y) { return k(x, y); }
KernelSpec swap_kernel(const KernelSpec& k) { return KernelSpec::swap(k); }
KernelSpec symmetric_part(const KernelSpec& k) { return KernelSpec::sym_part(k); }
KernelSpec antisymmetric_part(const KernelSpec& k) { return KernelSpec::antisym_part(k); }

double LiftedKernelSpec::operator()(const LiftedPoint& a, const LiftedPoint& b) const {
  if (a.t < b.t) return base_(a.x, b.x);
  if (a.t > b.t) return lift_ == Lift::hat ? base_(b.x, a.x) : -base_(b.x, a.x);
  return 0.0;
}

LiftedKernelSpec lift_kernel(const KernelSpec& k, Lift which) { return LiftedKernelSpec(k, which); }

}  // namespace ustat
