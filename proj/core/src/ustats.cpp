#include "ustat/ustats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ustat/error.hpp"

namespace ustat {

const char* stat_name(StatKind s) {
  switch (s) {
    case StatKind::classic: return "classic";
    case StatKind::cyclic: return "cyclic";
    case StatKind::cyclic_sym: return "cyclic-sym";
    case StatKind::alt_first: return "alt-first";
    case StatKind::alt_second: return "alt-second";
    case StatKind::bialt: return "bialt";
    case StatKind::full: return "full";
  }
  return "?";
}

StatKind parse_stat(const std::string& name) {
  for (StatKind s : all_stats())
    if (name == stat_name(s)) return s;
  if (name == "u" || name == "U") return StatKind::classic;
  if (name == "writhe") return StatKind::cyclic;
  throw Error(Errc::config_error, "unknown statistic '" + name + "'");
}

const std::vector<StatKind>& all_stats() {
  static const std::vector<StatKind> v = {StatKind::classic,    StatKind::cyclic, StatKind::cyclic_sym,
                                          StatKind::alt_first,  StatKind::alt_second, StatKind::bialt,
                                          StatKind::full};
  return v;
}

namespace {

void check_data(const KernelSpec& k, std::span<const Point> data) {
  if (data.size() < 2) throw Error(Errc::invalid_argument, "statistics need n >= 2");
  for (const auto& p : data)
    if (p.dim != k.dim()) throw Error(Errc::domain_mismatch, "data point dimension differs from kernel domain");
}

// Sign of the (i, j) summand, 0-based positions i < j.
template <class F>
double signed_pairs(StatKind stat, std::size_t n, F&& f) {
  double s = 0.0;
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i) {
      // 1-based parities: index i+1, j+1
      const bool i_odd = (i % 2) == 0;
      const bool j_odd = (j % 2) == 0;
      double sg = 1.0;
      switch (stat) {
        case StatKind::alt_first: sg = i_odd ? 1.0 : -1.0; break;
        case StatKind::alt_second: sg = j_odd ? -1.0 : 1.0; break;
        case StatKind::bialt: sg = (i_odd == j_odd) ? 1.0 : -1.0; break;
        default: break;
      }
      s += sg * f(i, j);
    }
  return s;
}

template <class F>
double cyclic_sum(std::size_t n, F&& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 1; 2 * j < n; ++j) s += f(i, (i + j) % n);
  return s;
}

}  // namespace

double evaluate(StatKind stat, const KernelSpec& k, std::span<const Point> data) {
  check_data(k, data);
  const std::size_t n = data.size();
  auto f = [&](std::size_t i, std::size_t j) { return k.eval_unchecked(data[i], data[j]); };
  switch (stat) {
    case StatKind::cyclic: return cyclic_sum(n, f);
    case StatKind::cyclic_sym:
      return cyclic_sum(n, [&](std::size_t i, std::size_t j) { return f(i, j) - f(j, i); });
    case StatKind::full: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j) s += f(i, j);
      return s;
    }
    default: return signed_pairs(stat, n, f);
  }
}

std::int64_t cyclic_term_count(std::int64_t n) { return n * ((n - 1) / 2); }

// ---------------------------------------------------------------------------
// sign kernel

namespace {

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : t_(n + 1, 0) {}
  void add(std::size_t i, std::int64_t v) {
    for (++i; i < t_.size(); i += i & (~i + 1)) t_[i] += v;
  }
  // sum over [0, i)
  std::int64_t prefix(std::size_t i) const {
    std::int64_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += t_[i];
    return s;
  }

 private:
  std::vector<std::int64_t> t_;
};

// Dense ranks 0..R-1, equal values share a rank.
std::vector<std::size_t> dense_ranks(std::span<const double> x, std::size_t& r_count) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  r_count = s.size();
  std::vector<std::size_t> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    r[i] = static_cast<std::size_t>(std::lower_bound(s.begin(), s.end(), x[i]) - s.begin());
  return r;
}

// Strict inversions (i < j, x_i > x_j) by stable merge count.
std::int64_t merge_inversions(std::vector<double>& a, std::vector<double>& tmp, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = merge_inversions(a, tmp, lo, mid) + merge_inversions(a, tmp, mid, hi);
  std::size_t i = lo, j = mid, o = lo;
  while (i < mid && j < hi) {
    if (a[j] < a[i]) {
      inv += static_cast<std::int64_t>(mid - i);
      tmp[o++] = a[j++];
    } else {
      tmp[o++] = a[i++];
    }
  }
  while (i < mid) tmp[o++] = a[i++];
  while (j < hi) tmp[o++] = a[j++];
  std::copy(tmp.begin() + lo, tmp.begin() + hi, a.begin() + lo);
  return inv;
}

std::int64_t sign_classic(std::span<const double> x) {
  const auto n = static_cast<std::int64_t>(x.size());
  std::vector<double> a(x.begin(), x.end()), tmp(a.size());
  const std::int64_t inv = merge_inversions(a, tmp, 0, a.size());
  std::int64_t ties = 0;
  for (std::size_t i = 0; i < a.size();) {
    std::size_t j = i;
    while (j < a.size() && a[j] == a[i]) ++j;
    const auto g = static_cast<std::int64_t>(j - i);
    ties += g * (g - 1) / 2;
    i = j;
  }
  return 2 * inv - (n * (n - 1) / 2 - ties);
}

// Parity-stratified sums S_p(j) = sum_{i<j, parity(i)=p} sgn(x_i - x_j),
// combined per statistic. Parities are of 1-based indices.
std::int64_t sign_alternating(StatKind stat, std::span<const double> x) {
  std::size_t R = 0;
  const auto r = dense_ranks(x, R);
  Fenwick odd(R), even(R);
  std::int64_t n_odd = 0, n_even = 0, total = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const std::int64_t lo_o = odd.prefix(r[j]), le_o = odd.prefix(r[j] + 1);
    const std::int64_t lo_e = even.prefix(r[j]), le_e = even.prefix(r[j] + 1);
    const std::int64_t s_odd = (n_odd - le_o) - lo_o;
    const std::int64_t s_even = (n_even - le_e) - lo_e;
    const bool j_odd = (j % 2) == 0;
    switch (stat) {
      case StatKind::alt_first: total += s_odd - s_even; break;
      case StatKind::alt_second: total += j_odd ? -(s_odd + s_even) : (s_odd + s_even); break;
      case StatKind::bialt: total += j_odd ? (s_odd - s_even) : (s_even - s_odd); break;
      default: total += s_odd + s_even; break;
    }
    if (j_odd) {
      odd.add(r[j], 1);
      ++n_odd;
    } else {
      even.add(r[j], 1);
      ++n_even;
    }
  }
  return total;
}

// U° = U - 2 * (pairs with gap > n/2) - (diameter pairs, n even).
std::int64_t sign_cyclic(std::span<const double> x) {
  const std::size_t n = x.size();
  std::size_t R = 0;
  const auto r = dense_ranks(x, R);
  Fenwick tree(R);
  const std::size_t g = n / 2 + 1;
  std::int64_t far = 0, inserted = 0;
  for (std::size_t b = 0; b < n; ++b) {
    if (b >= g) {
      tree.add(r[b - g], 1);
      ++inserted;
    }
    const std::int64_t lt = tree.prefix(r[b]), le = tree.prefix(r[b] + 1);
    far += (inserted - le) - lt;
  }
  std::int64_t diam = 0;
  if (n % 2 == 0)
    for (std::size_t a = 0; a < n / 2; ++a) diam += (x[a] > x[a + n / 2]) - (x[a] < x[a + n / 2]);
  return sign_classic(x) - 2 * far - diam;
}

int sgn_int(double d) { return (d > 0) - (d < 0); }

}  // namespace

std::int64_t sign_statistic(StatKind stat, std::span<const double> x) {
  if (x.size() < 2) throw Error(Errc::invalid_argument, "statistics need n >= 2");
  switch (stat) {
    case StatKind::classic: return sign_classic(x);
    case StatKind::cyclic: return sign_cyclic(x);
    case StatKind::cyclic_sym: return 2 * sign_cyclic(x);
    case StatKind::full: return 0;
    default: return sign_alternating(stat, x);
  }
}

std::int64_t sign_statistic_naive(StatKind stat, std::span<const double> x) {
  if (x.size() < 2) throw Error(Errc::invalid_argument, "statistics need n >= 2");
  const std::size_t n = x.size();
  auto f = [&](std::size_t i, std::size_t j) { return static_cast<double>(sgn_int(x[i] - x[j])); };
  double v = 0.0;
  switch (stat) {
    case StatKind::cyclic: v = cyclic_sum(n, f); break;
    case StatKind::cyclic_sym: v = 2 * cyclic_sum(n, f); break;
    case StatKind::full: v = 0; break;
    default: v = signed_pairs(stat, n, f); break;
  }
  return static_cast<std::int64_t>(std::llround(v));
}

// ---------------------------------------------------------------------------
// separable kernels

namespace {

double separable_term(StatKind stat, const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double s = 0.0;
  switch (stat) {
    case StatKind::classic: {
      double pa = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        s += b[j] * pa;
        pa += a[j];
      }
      return s;
    }
    case StatKind::alt_first: {
      double pa = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        s += b[j] * pa;
        pa += (j % 2 == 0) ? a[j] : -a[j];
      }
      return s;
    }
    case StatKind::alt_second: {
      double pa = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        s += ((j % 2 == 0) ? -b[j] : b[j]) * pa;
        pa += a[j];
      }
      return s;
    }
    case StatKind::bialt: {
      double pa = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        // (-1)^{i+j} with 1-based i, j equals (-1)^{i0 + j0}
        const double sj = (j % 2 == 0) ? 1.0 : -1.0;
        s += sj * b[j] * pa;
        pa += sj * a[j];
      }
      return s;
    }
    case StatKind::full: {
      double sa = 0.0, sb = 0.0, d = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sa += a[i];
        sb += b[i];
        d += a[i] * b[i];
      }
      return sa * sb - d;
    }
    case StatKind::cyclic:
    case StatKind::cyclic_sym: {
      const std::size_t h = (n - 1) / 2;
      std::vector<double> pb(2 * n + 1, 0.0);
      for (std::size_t t = 0; t < 2 * n; ++t) pb[t + 1] = pb[t] + b[t % n];
      for (std::size_t i = 0; i < n; ++i) s += a[i] * (pb[i + h + 1] - pb[i + 1]);
      return s;
    }
  }
  return s;
}

}  // namespace

bool fast_path_supported(StatKind, const KernelSpec& k) {
  return k.sign_coefficient().has_value() || k.separable_terms().has_value();
}

double evaluate_fast(StatKind stat, const KernelSpec& k, std::span<const Point> data) {
  check_data(k, data);
  if (auto c = k.sign_coefficient()) {
    std::vector<double> x(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) x[i] = data[i].v[0];
    return *c * static_cast<double>(sign_statistic(stat, x));
  }
  auto terms = k.separable_terms();
  if (!terms) throw Error(Errc::unsupported_kernel, "no fast path for " + k.describe());
  const std::size_t n = data.size();
  std::vector<double> a(n), b(n);
  double total = 0.0;
  for (const auto& t : *terms) {
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = t.a(data[i]);
      b[i] = t.b(data[i]);
    }
    double v = separable_term(stat, a, b);
    if (stat == StatKind::cyclic_sym) v -= separable_term(stat, b, a);
    total += t.coef * v;
  }
  return total;
}

// ---------------------------------------------------------------------------
// exact moments

double exact_mean(StatKind stat, std::int64_t n, double mu) {
  if (n < 2) throw Error(Errc::invalid_argument, "exact_mean needs n >= 2");
  const double half = static_cast<double>(n / 2);
  switch (stat) {
    case StatKind::classic: return static_cast<double>(n * (n - 1) / 2) * mu;
    case StatKind::cyclic: return static_cast<double>(cyclic_term_count(n)) * mu;
    case StatKind::cyclic_sym: return 0.0;
    case StatKind::alt_first: return half * mu;
    case StatKind::alt_second: return (n % 2 == 0 ? 1.0 : -1.0) * half * mu;
    case StatKind::bialt: return -half * mu;
    case StatKind::full: return static_cast<double>(n * (n - 1)) * mu;
  }
  return 0.0;
}

VarianceFormula exact_degenerate_variance(StatKind stat, std::int64_t n, const VarianceComponents& vc,
                                          bool parity_aware, double tol) {
  if (n < 2) throw Error(Errc::invalid_argument, "variance formula needs n >= 2");
  const Regime reg = classify(stat, vc, tol);
  if (reg == Regime::nondegenerate)
    throw Error(Errc::regime_mismatch, std::string(stat_name(stat)) + " is nondegenerate for this kernel");
  const double nd = static_cast<double>(n);
  switch (stat) {
    case StatKind::classic: return {static_cast<double>(n * (n - 1) / 2) * vc.var_f, false};
    case StatKind::cyclic: return {static_cast<double>(cyclic_term_count(n)) * vc.var_f12, false};
    case StatKind::bialt:
      if (reg == Regime::doubly_degenerate) {
        if (parity_aware && n % 2 == 1) return {nd * 0.5 * vc.var_f1_plus_f2, true};
        return {nd * 0.5 * (vc.var_f1 + vc.var_f2), parity_aware ? false : n % 2 == 1};
      }
      return {0.5 * nd * nd * vc.var_f12, true};
    case StatKind::alt_second:
      if (reg == Regime::doubly_degenerate) return {nd * 0.5 * vc.var_f1, true};
      return {0.5 * nd * nd * vc.var_f12, true};
    case StatKind::alt_first:
      if (reg == Regime::doubly_degenerate) return {nd * 0.5 * vc.var_f2, true};
      return {0.5 * nd * nd * vc.var_f12, true};
    default:
      throw Error(Errc::invalid_argument,
                  std::string("no variance formula for ") + stat_name(stat) + " from variance components");
  }
}

// ---------------------------------------------------------------------------
// pairing devices

PairLift pair_lift(const KernelSpec& k, PairVariant variant, std::span<const Point> data) {
  check_data(k, data);
  const std::size_t n = data.size();
  if (n % 2 != 0 || n < 4) throw Error(Errc::invalid_argument, "pair_lift needs even n >= 4");
  PairLift out;
  const std::size_t h = n / 2;
  switch (variant) {
    case PairVariant::cyclic:
      for (std::size_t i = 0; i < h; ++i) out.paired.push_back({data[i], data[i + h]});
      out.F = [k](const PairedPoint& x, const PairedPoint& y) {
        return k.eval_unchecked(x.first, y.first) + k.eval_unchecked(y.first, x.second) +
               k.eval_unchecked(x.second, y.second) + k.eval_unchecked(y.second, x.first);
      };
      break;
    case PairVariant::bialt:
    case PairVariant::altsecond: {
      double diag = 0.0;
      for (std::size_t i = 0; i < h; ++i) {
        out.paired.push_back({data[2 * i], data[2 * i + 1]});
        diag += k.eval_unchecked(data[2 * i], data[2 * i + 1]);
      }
      if (variant == PairVariant::bialt) {
        out.correction = -diag;
        out.F = [k](const PairedPoint& x, const PairedPoint& y) {
          return k.eval_unchecked(x.first, y.first) - k.eval_unchecked(x.first, y.second) -
                 k.eval_unchecked(x.second, y.first) + k.eval_unchecked(x.second, y.second);
        };
      } else {
        out.correction = diag;
        out.F = [k](const PairedPoint& x, const PairedPoint& y) {
          return -k.eval_unchecked(x.first, y.first) + k.eval_unchecked(x.first, y.second) -
                 k.eval_unchecked(x.second, y.first) + k.eval_unchecked(x.second, y.second);
        };
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// permutation mode

std::int64_t permutation_statistic(StatKind stat, std::span<const int> sigma) {
  const std::size_t n = sigma.size();
  std::vector<char> seen(n + 1, 0);
  for (int v : sigma) {
    if (v < 1 || static_cast<std::size_t>(v) > n || seen[v])
      throw Error(Errc::not_a_permutation, "sigma is not a permutation of 1..n");
    seen[v] = 1;
  }
  std::vector<double> x(sigma.begin(), sigma.end());
  return sign_statistic_naive(stat, x);
}

std::map<std::int64_t, std::int64_t> permutation_distribution(StatKind stat, int n) {
  if (n < 2 || n > 9) throw Error(Errc::invalid_argument, "permutation enumeration needs 2 <= n <= 9");
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 1);
  std::map<std::int64_t, std::int64_t> dist;
  do {
    ++dist[permutation_statistic(stat, p)];
  } while (std::next_permutation(p.begin(), p.end()));
  return dist;
}

}  // namespace ustat
