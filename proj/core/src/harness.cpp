#include "ustat/harness.hpp"

#include <algorithm>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "parallel.hpp"
#include "ustat/config.hpp"
#include "ustat/error.hpp"
#include "ustat/ustats.hpp"

namespace ustat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double draw_scalar(const MeasureSpec& nu, Stream& g) {
  switch (nu.kind()) {
    case SpaceSpec::Kind::unit_interval: return g.uniform();
    case SpaceSpec::Kind::std_normal: {
      boost::random::normal_distribution<double> normal;
      return normal(g);
    }
    case SpaceSpec::Kind::rademacher: return (g() >> 63) ? 1.0 : -1.0;
    case SpaceSpec::Kind::atoms: {
      const double u = g.uniform();
      const auto& p = nu.probs();
      double c = 0.0;
      for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        c += p[i];
        if (u < c) return nu.values()[i];
      }
      return nu.values().back();
    }
    default: throw Error(Errc::unsupported_measure, "cannot draw a scalar from " + nu.describe());
  }
}

Parity parity_of(int n) { return n % 2 == 0 ? Parity::even : Parity::odd; }

// k1..k4 of xs; orders the sample size cannot support are NaN.
std::vector<double> cumulant_table(std::span<const double> xs) {
  std::vector<double> out(4, kNaN);
  if (xs.size() < 2) return out;
  const int order = xs.size() >= 10000 ? 4 : 3;
  const auto k = empirical_cumulants(xs, order);
  std::copy(k.begin(), k.end(), out.begin());
  return out;
}

std::vector<double> law_cumulant_table(const MixtureLaw& law) {
  std::vector<double> out(4);
  for (int m = 1; m <= 4; ++m) out[m - 1] = cumulant(law, m);
  return out;
}

void mean_var(const std::vector<double>& v, double& mean, double& var) {
  const double n = static_cast<double>(v.size());
  mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  var = v.size() > 1 ? s / (n - 1.0) : 0.0;
}

std::uint64_t limit_seed(std::uint64_t seed) { return mix64(seed ^ 0x6c696d69745f6c61ULL); }

double pow_n(int n, double e) { return std::pow(static_cast<double>(n), e); }

}  // namespace

int default_threads() {
  if (const char* s = std::getenv("USTAT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end != s && *end == '\0' && v >= 1) return static_cast<int>(std::min<long>(v, 256));
  }
  return 1;
}

Point draw_point(const MeasureSpec& nu, Stream& g) {
  if (nu.kind() == SpaceSpec::Kind::product) {
    const double a = draw_scalar(nu.factor(0), g);
    const double b = draw_scalar(nu.factor(1), g);
    return Point(a, b);
  }
  return Point(draw_scalar(nu, g));
}

void draw_points(const MeasureSpec& nu, Stream& g, std::vector<Point>& out) {
  if (nu.kind() == SpaceSpec::Kind::rank_ordinal) {
    // uniform random permutation of 1..n
    const std::size_t n = static_cast<std::size_t>(nu.rank_n());
    if (out.size() != n) throw Error(Errc::invalid_argument, "rank-ordinal data must have size n");
    for (std::size_t i = 0; i < n; ++i) out[i] = Point(static_cast<double>(i + 1));
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(g() % i);
      std::swap(out[i - 1], out[j]);
    }
    return;
  }
  for (auto& p : out) p = draw_point(nu, g);
}

double statistic(StatKind stat, const KernelSpec& k, std::span<const Point> data) {
  return fast_path_supported(stat, k) ? evaluate_fast(stat, k, data) : evaluate(stat, k, data);
}

void ExperimentConfig::validate() const {
  if (stats.empty()) throw Error(Errc::config_error, "no statistics requested");
  if (n_grid.empty()) throw Error(Errc::config_error, "empty n-grid");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2) throw Error(Errc::config_error, "n-grid entries must be >= 2");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw Error(Errc::config_error, "n-grid must be ascending");
  }
  if (reps < 100) throw Error(Errc::config_error, "replication count must be >= 100");
  if (trunc < 1) throw Error(Errc::config_error, "truncation must be >= 1");
  if (m_q < 1) throw Error(Errc::config_error, "m_q must be >= 1");
  if (kernel.dim() != measure.dim()) throw Error(Errc::domain_mismatch, "kernel and measure dimensions differ");
}

ExperimentConfig config_from_json(const std::string& text, const ExperimentConfig& base) {
  ExperimentConfig c = base;
  try {
    const auto j = nlohmann::json::parse(text, nullptr, true, true);
    if (!j.is_object()) throw Error(Errc::config_error, "config must be a JSON object");
    static const std::set<std::string> known = {"name",  "kernel",  "measure", "stats",   "n_grid",
                                                "reps",  "seed",    "trunc",   "threads", "m_q",
                                                "compare_limit", "samples", "summary", "tolerances",
                                                "resolution"};
    for (const auto& [key, _] : j.items())
      if (!known.count(key)) throw Error(Errc::config_error, "unknown config key '" + key + "'");
    c.name = j.value("name", c.name);
    if (j.contains("kernel")) c.kernel = parse_kernel(j.at("kernel").get<std::string>());
    if (j.contains("measure")) c.measure = parse_measure(j.at("measure").get<std::string>());
    if (j.contains("stats")) {
      c.stats.clear();
      for (const auto& s : j.at("stats")) c.stats.push_back(parse_stat(s.get<std::string>()));
    }
    if (j.contains("n_grid")) c.n_grid = j.at("n_grid").get<std::vector<int>>();
    c.reps = j.value("reps", c.reps);
    c.seed = j.value("seed", c.seed);
    c.trunc = j.value("trunc", c.trunc);
    c.threads = j.value("threads", c.threads);
    c.m_q = j.value("m_q", c.m_q);
    c.compare_limit = j.value("compare_limit", c.compare_limit);
    c.samples_path = j.value("samples", c.samples_path);
    c.summary_path = j.value("summary", c.summary_path);
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      c.tol.ks = t.value("ks", c.tol.ks);
      c.tol.regime = t.value("regime", c.tol.regime);
      c.tol.mean_se = t.value("mean_se", c.tol.mean_se);
      c.tol.slln = t.value("slln", c.tol.slln);
    }
    if (j.contains("resolution")) {
      const auto& r = j.at("resolution");
      c.resolution.m = r.value("m", c.resolution.m);
      c.resolution.m_x_lifted = r.value("m_x_lifted", c.resolution.m_x_lifted);
      c.resolution.m_t = r.value("m_t", c.resolution.m_t);
      c.resolution.cap = r.value("cap", c.resolution.cap);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config_error, std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config_error, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str(), base);
}

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["kernel"] = c.kernel.describe();
  j["measure"] = c.measure.describe();
  std::vector<std::string> stats;
  for (auto s : c.stats) stats.emplace_back(stat_name(s));
  j["stats"] = stats;
  j["n_grid"] = c.n_grid;
  j["reps"] = c.reps;
  j["seed"] = c.seed;
  j["trunc"] = c.trunc;
  j["m_q"] = c.m_q;
  j["compare_limit"] = c.compare_limit;
  j["tolerances"] = {{"ks", c.tol.ks}, {"regime", c.tol.regime}, {"mean_se", c.tol.mean_se}, {"slln", c.tol.slln}};
  j["resolution"] = {{"m", c.resolution.m},
                     {"m_x_lifted", c.resolution.m_x_lifted},
                     {"m_t", c.resolution.m_t},
                     {"cap", c.resolution.cap}};
  return j.dump();
}

std::vector<std::vector<double>> simulate(const std::vector<StatKind>& stats, const KernelSpec& k,
                                          const MeasureSpec& nu, int n, int N, std::uint64_t seed, int threads) {
  if (n < 2) throw Error(Errc::invalid_argument, "simulate needs n >= 2");
  if (N < 1) throw Error(Errc::invalid_argument, "simulate needs N >= 1");
  if (k.dim() != nu.dim()) throw Error(Errc::domain_mismatch, "kernel and measure dimensions differ");
  std::vector<std::vector<double>> out(stats.size(), std::vector<double>(N));
  detail::parallel_for(static_cast<std::size_t>(N), threads, [&](std::size_t r) {
    Stream g = derive_stream(seed, static_cast<std::uint64_t>(n), r);
    std::vector<Point> x(n);
    draw_points(nu, g, x);
    for (std::size_t s = 0; s < stats.size(); ++s) out[s][r] = statistic(stats[s], k, x);
  });
  return out;
}

const CellResult& ExperimentReport::cell(StatKind s, int n) const {
  for (const auto& c : cells)
    if (c.stat == s && c.n == n) return c;
  throw Error(Errc::invalid_argument, "no cell for this statistic and n");
}

const StatSummary& ExperimentReport::summary(StatKind s) const {
  for (const auto& c : stats)
    if (c.stat == s) return c;
  throw Error(Errc::invalid_argument, "no summary for this statistic");
}

namespace {

void write_header(std::ostream& os, const ExperimentConfig& cfg) {
  os << "# config " << config_to_json(cfg) << "\n";
  os << "# seed " << cfg.seed << "\n";
}

}  // namespace

void ExperimentReport::write_samples_csv(std::ostream& os) const {
  write_header(os, cfg);
  os << "experiment,stat,n,replication,value\n";
  for (const auto& c : cells)
    for (std::size_t r = 0; r < c.values.size(); ++r)
      os << cfg.name << ',' << stat_name(c.stat) << ',' << c.n << ',' << r << ',' << num(c.values[r]) << '\n';
}

void ExperimentReport::write_summary_csv(std::ostream& os) const {
  write_header(os, cfg);
  for (const auto& s : stats)
    os << "# " << stat_name(s.stat) << " regime=" << regime_name(s.regime) << " scale=" << num(s.scale_exponent)
       << " fitted_exponent=" << num(s.fitted_exponent) << " law=" << s.law.describe() << "\n";
  os << "stat,n,mean,var,ks,k1,k2,k3,k4\n";
  for (const auto& c : cells) {
    os << stat_name(c.stat) << ',' << c.n << ',' << num(c.mean) << ',' << num(c.var) << ',' << num(c.ks);
    for (double k : c.cumulants) os << ',' << num(k);
    os << '\n';
  }
}

double fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(Errc::insufficient_data, "fit needs two or more points");
  double mx = 0, my = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0 && y[i] > 0)) throw Error(Errc::invalid_argument, "log fit needs positive values");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 50 || b.size() < 50) throw Error(Errc::insufficient_data, "KS needs 50 or more values per side");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

ExperimentReport run_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep;
  rep.cfg = cfg;
  const HoeffdingParts parts = project(cfg.kernel, cfg.measure, cfg.m_q);
  const VarianceComponents vc = variance_components(parts);
  const int n_last = cfg.n_grid.back();

  for (auto s : cfg.stats) {
    StatSummary sum;
    sum.stat = s;
    sum.regime = classify(s, vc, cfg.tol.regime, true);
    sum.law = limit_law_from_theorem(s, parts, cfg.measure, cfg.resolution, cfg.tol.regime, parity_of(n_last));
    sum.scale_exponent = sum.law.scale_exponent;
    sum.law_cumulants = law_cumulant_table(sum.law);
    rep.stats.push_back(sum);
  }

  std::vector<std::vector<double>> limits;
  if (cfg.compare_limit)
    for (std::size_t si = 0; si < cfg.stats.size(); ++si)
      limits.push_back(sample(rep.stats[si].law, SeriesTruncation{cfg.trunc, TailCompensation::gaussian_tail},
                              limit_seed(cfg.seed + si), static_cast<std::size_t>(cfg.reps), cfg.threads));

  for (int n : cfg.n_grid) {
    const auto values = simulate(cfg.stats, cfg.kernel, cfg.measure, n, cfg.reps, cfg.seed, cfg.threads);
    for (std::size_t si = 0; si < cfg.stats.size(); ++si) {
      const StatSummary& sum = rep.stats[si];
      CellResult c;
      c.stat = cfg.stats[si];
      c.n = n;
      c.values = values[si];
      mean_var(c.values, c.mean, c.var);
      c.exact_mean = exact_mean(c.stat, n, parts.mu());
      const double se = std::sqrt(c.var / cfg.reps);
      const double diff = c.mean - c.exact_mean;
      if (se > 0) {
        c.mean_z = diff / se;
        c.mean_ok = std::abs(c.mean_z) <= cfg.tol.mean_se;
      } else {
        c.mean_ok = std::abs(diff) <= 1e-9 * std::max(1.0, std::abs(c.exact_mean));
      }
      if (!c.mean_ok)
        rep.failures.push_back(std::string("mean check ") + stat_name(c.stat) + " n=" + std::to_string(n) +
                               " z=" + num(c.mean_z));
      const double scale = pow_n(n, sum.scale_exponent);
      c.normalized.resize(c.values.size());
      for (std::size_t r = 0; r < c.values.size(); ++r) c.normalized[r] = (c.values[r] - c.exact_mean) / scale;
      c.cumulants = cumulant_table(c.normalized);
      if (cfg.compare_limit) c.ks = ks_two_sample(c.normalized, limits[si]);
      rep.cells.push_back(std::move(c));
    }
  }

  for (std::size_t si = 0; si < cfg.stats.size(); ++si) {
    StatSummary& sum = rep.stats[si];
    std::vector<double> ns, vs;
    for (const auto& c : rep.cells)
      if (c.stat == sum.stat && c.var > 0) {
        ns.push_back(c.n);
        vs.push_back(c.var);
      }
    sum.fitted_exponent = ns.size() >= 2 ? fit_exponent(ns, vs) : kNaN;
    const CellResult& last = rep.cell(sum.stat, n_last);
    sum.cumulants = last.cumulants;
    if (cfg.compare_limit) {
      sum.ks = last.ks;
      if (sum.ks > cfg.tol.ks)
        rep.failures.push_back(std::string("ks ") + stat_name(sum.stat) + " n=" + std::to_string(n_last) + " d=" +
                               num(sum.ks));
    }
  }
  return rep;
}

VerifyResult verify_limit(StatKind stat, const KernelSpec& k, const MeasureSpec& nu, int n, int N,
                          std::uint64_t seed, const VerifyOptions& opt) {
  if (N < 50) throw Error(Errc::insufficient_data, "verify needs N >= 50");
  const HoeffdingParts parts = project(k, nu, opt.m_q);
  const Regime reg = classify(stat, variance_components(parts), opt.tol, true);
  if (reg == Regime::nondegenerate)
    throw Error(Errc::regime_mismatch, std::string(stat_name(stat)) + " is nondegenerate for " + k.describe());
  VerifyResult out;
  out.law = limit_law_from_theorem(stat, parts, nu, opt.resolution, opt.tol, parity_of(n));
  const double mean = exact_mean(stat, n, parts.mu());
  const double scale = pow_n(n, out.law.scale_exponent);
  auto values = simulate({stat}, k, nu, n, N, seed, opt.threads);
  out.normalized = std::move(values[0]);
  for (double& v : out.normalized) v = (v - mean) / scale;
  out.limit_sample = sample(out.law, SeriesTruncation{opt.trunc, TailCompensation::gaussian_tail}, limit_seed(seed),
                            static_cast<std::size_t>(N), opt.threads);
  out.ks = ks_two_sample(out.normalized, out.limit_sample);
  out.cumulants = cumulant_table(out.normalized);
  out.law_cumulants = law_cumulant_table(out.law);
  return out;
}

JointCfResult joint_cf_experiment(int n, int N, const std::vector<double>& s_grid, const std::vector<double>& t_grid,
                                  std::uint64_t seed, const MeasureSpec& nu, int threads) {
  if (nu.dim() != 2) throw Error(Errc::domain_mismatch, "the bilinear kernel needs a product measure");
  const KernelSpec fs = KernelSpec::sym_part(KernelSpec::bilinear());
  const KernelSpec fa = KernelSpec::antisym_part(KernelSpec::bilinear());
  JointCfResult out;
  out.ws.resize(N);
  out.wa.resize(N);
  detail::parallel_for(static_cast<std::size_t>(N), threads, [&](std::size_t r) {
    Stream g = derive_stream(seed, static_cast<std::uint64_t>(n), r);
    std::vector<Point> x(n);
    draw_points(nu, g, x);
    out.ws[r] = 2.0 * statistic(StatKind::classic, fs, x) / n;
    out.wa[r] = 2.0 * statistic(StatKind::classic, fa, x) / n;
  });
  for (double s : s_grid)
    for (double t : t_grid) {
      double re = 0.0, im = 0.0;
      for (int r = 0; r < N; ++r) {
        const double a = s * out.ws[r] + t * out.wa[r];
        re += std::cos(a);
        im += std::sin(a);
      }
      re /= N;
      im /= N;
      out.grid.push_back({s, t, re, im, std::hypot(re, im), cf_joint_bilinear(s, t)});
    }
  return out;
}

SllnResult slln_run(StatKind stat, const KernelSpec& k, const MeasureSpec& nu, std::int64_t n_max,
                    std::uint64_t seed, double tol, int m_q) {
  if (n_max < 1000) throw Error(Errc::invalid_argument, "slln needs n_max >= 1000");
  if (k.dim() != nu.dim()) throw Error(Errc::domain_mismatch, "kernel and measure dimensions differ");
  SllnResult out;
  const bool cyc = stat == StatKind::cyclic || stat == StatKind::cyclic_sym;
  const bool alt = stat == StatKind::alt_first || stat == StatKind::alt_second || stat == StatKind::bialt;
  out.asserted = !cyc;
  out.target = (alt || stat == StatKind::cyclic_sym) ? 0.0 : project(k, nu, m_q).mu();

  std::set<std::int64_t> marks;
  for (int e = 1;; ++e) {
    const auto c = static_cast<std::int64_t>(std::ceil(std::pow(10.0, e / 8.0) - 1e-9));
    if (c > n_max) break;
    if (c >= 2) marks.insert(c);
  }
  marks.insert(n_max);

  Stream g = derive_stream(seed, 0x5111, 0);
  std::vector<Point> x(static_cast<std::size_t>(n_max));
  for (auto& p : x) p = draw_point(nu, g);

  auto normalize = [&](double u, std::int64_t n) {
    const double nd = static_cast<double>(n);
    if (cyc) return 2.0 * u / (nd * nd);
    if (stat == StatKind::full) return u / (nd * (nd - 1.0));
    return u / (nd * (nd - 1.0) / 2.0);
  };

  // (-1)^{i+1} and (-1)^j weights on 1-based positions, as in the definitions
  auto w_first = [](std::int64_t i) { return i % 2 == 1 ? 1.0 : -1.0; };
  auto w_second = [](std::int64_t j) { return j % 2 == 0 ? 1.0 : -1.0; };

  const auto terms = k.separable_terms();
  double u = 0.0;
  std::vector<double> A, Aalt, B;
  if (terms) {
    A.assign(terms->size(), 0.0);
    Aalt.assign(terms->size(), 0.0);
    B.assign(terms->size(), 0.0);
  }
  for (std::int64_t j = 1; j <= n_max; ++j) {
    const Point& xj = x[static_cast<std::size_t>(j - 1)];
    if (!cyc) {
      if (terms) {
        double add = 0.0;
        for (std::size_t t = 0; t < terms->size(); ++t) {
          const SeparableTerm& st = (*terms)[t];
          const double bj = st.b(xj), aj = st.a(xj);
          switch (stat) {
            case StatKind::classic: add += st.coef * bj * A[t]; break;
            case StatKind::full: add += st.coef * (bj * A[t] + aj * B[t]); break;
            case StatKind::alt_first: add += st.coef * bj * Aalt[t]; break;
            case StatKind::alt_second: add += w_second(j) * st.coef * bj * A[t]; break;
            case StatKind::bialt: add += w_first(j) * st.coef * bj * Aalt[t]; break;
            default: break;
          }
          A[t] += aj;
          Aalt[t] += w_first(j) * aj;
          B[t] += bj;
        }
        u += add;
      } else {
        double add = 0.0;
        for (std::int64_t i = 1; i < j; ++i) {
          const Point& xi = x[static_cast<std::size_t>(i - 1)];
          double v = k.eval_unchecked(xi, xj);
          switch (stat) {
            case StatKind::full: v += k.eval_unchecked(xj, xi); break;
            case StatKind::alt_first: v *= w_first(i); break;
            case StatKind::alt_second: v *= w_second(j); break;
            case StatKind::bialt: v *= w_first(i) * w_first(j); break;
            default: break;
          }
          add += v;
        }
        u += add;
      }
    }
    if (marks.count(j)) {
      if (cyc) u = statistic(stat, k, std::span<const Point>(x.data(), static_cast<std::size_t>(j)));
      out.trajectory.emplace_back(j, normalize(u, j));
    }
  }
  out.final_value = out.trajectory.back().second;
  out.pass = !out.asserted || std::abs(out.final_value - out.target) < tol;
  return out;
}

// ---------------------------------------------------------------------------
// Exact suite

namespace {

struct Case {
  std::string label;
  KernelSpec k;
  bool integer;
};

bool same(double a, double b, bool integer) {
  if (integer) return a == b;
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<Point> int_data(Stream& g, int n, int lo, int hi) {
  std::vector<Point> x(n);
  for (auto& p : x) p = Point(static_cast<double>(lo + static_cast<int>(g() % static_cast<std::uint64_t>(hi - lo + 1))));
  return x;
}

std::vector<Point> float_data(Stream& g, int n) {
  std::vector<Point> x(n);
  for (auto& p : x) p = Point(g.uniform());
  return x;
}

struct Checker {
  std::vector<ExactCheck>& out;
  void operator()(const std::string& name, double lhs, double rhs, bool integer) {
    ExactCheck c;
    c.name = name;
    c.pass = same(lhs, rhs, integer);
    c.detail = "lhs=" + num(lhs) + " rhs=" + num(rhs);
    out.push_back(std::move(c));
  }
};

double ev(StatKind s, const KernelSpec& k, const std::vector<Point>& x) { return evaluate(s, k, x); }

}  // namespace

std::vector<ExactCheck> run_exact_suite(std::uint64_t seed) {
  std::vector<ExactCheck> out;
  Checker check{out};

  const KernelSpec general = KernelSpec::sum(KernelSpec::product(), KernelSpec::scale(2.0, KernelSpec::left()));
  const std::vector<Case> cases = {
      {"sign", KernelSpec::sign(), true},
      {"general", general, true},
      {"product", KernelSpec::product(1.0), true},
      {"antisym", KernelSpec::antisym_part(KernelSpec::sum(KernelSpec::sign(), general)), false},
      {"general", general, false},
      {"sign", KernelSpec::sign(), false},
  };

  Stream g = derive_stream(seed, 0xe8ac7, 0);
  for (const auto& c : cases) {
    const KernelSpec& k = c.k;
    const std::string tag = c.label + (c.integer ? "/int" : "/float");
    for (int n : {4, 9, 10, 17, 24}) {
      const auto x = c.integer ? int_data(g, n, -3, 3) : float_data(g, n);
      const std::string at = tag + " n=" + std::to_string(n);
      if (n % 2 == 0) {
        check("CUU " + at, pair_lift(k, PairVariant::cyclic, x).value(), ev(StatKind::cyclic, k, x), c.integer);
        check("BUU " + at, pair_lift(k, PairVariant::bialt, x).value(), ev(StatKind::bialt, k, x), c.integer);
        check("AUU " + at, pair_lift(k, PairVariant::altsecond, x).value(), ev(StatKind::alt_second, k, x),
              c.integer);
      }

      // recursions from 2m to 2m+1 points
      if (n % 2 == 1) {
        const int m = (n - 1) / 2;
        const std::vector<Point> head(x.begin(), x.end() - 1);
        const Point& last = x.back();
        double add = 0.0;
        for (int i = 0; i < m; ++i) add += k(x[i], x[i + m]);
        for (int i = 0; i < m; ++i) add += k(last, x[i]);
        for (int i = m; i < 2 * m; ++i) add += k(x[i], last);
        check("aid3 " + at, ev(StatKind::cyclic, k, x), ev(StatKind::cyclic, k, head) + add, c.integer);
        double b = 0.0, a = 0.0;
        for (int i = 0; i < 2 * m; ++i) {
          b += ((i + 1) % 2 == 1 ? 1.0 : -1.0) * k(x[i], last);
          a += k(x[i], last);
        }
        check("Baid3 " + at, ev(StatKind::bialt, k, x), ev(StatKind::bialt, k, head) + b, c.integer);
        check("Aaid3 " + at, ev(StatKind::alt_second, k, x), ev(StatKind::alt_second, k, head) - a, c.integer);
      }

      if (k.symmetry() == Symmetry::symmetric) {
        double rhs = ev(StatKind::classic, k, x);
        if (n % 2 == 0)
          for (int i = 0; i < n / 2; ++i) rhs -= k(x[i], x[i + n / 2]);
        check("Rsymm " + at, ev(StatKind::cyclic, k, x), rhs, c.integer);
      }

      check("RUcc " + at, ev(StatKind::cyclic_sym, k, x),
            ev(StatKind::cyclic, KernelSpec::sum(k, KernelSpec::scale(-1.0, KernelSpec::swap(k))), x), c.integer);

      std::vector<Point> rev(x.rbegin(), x.rend());
      check("fi2 " + at, ev(StatKind::alt_second, k, rev),
            (n % 2 == 0 ? 1.0 : -1.0) * ev(StatKind::alt_first, KernelSpec::swap(k), x), c.integer);

      if (k.symmetry() == Symmetry::antisymmetric && n % 2 == 1) {
        std::vector<Point> y(n);
        for (int i = 0; i < n; ++i) y[i] = x[(2 * i + 1) % n];
        check("PC=B pointwise " + at, ev(StatKind::cyclic, k, y), ev(StatKind::bialt, k, x), c.integer);
      }

      for (auto s : all_stats())
        if (fast_path_supported(s, k))
          check(std::string("fast path ") + stat_name(s) + " " + at, evaluate_fast(s, k, x), ev(s, k, x), c.integer);
    }
  }

  // integer sign statistics: fast and naive counts agree on ties and large n
  for (int n : {2, 3, 7, 50, 301}) {
    std::vector<double> xs(n);
    for (auto& v : xs) v = static_cast<double>(static_cast<int>(g() % 11));
    for (auto s : all_stats())
      check(std::string("sign count ") + stat_name(s) + " n=" + std::to_string(n),
            static_cast<double>(sign_statistic(s, xs)), static_cast<double>(sign_statistic_naive(s, xs)), true);
  }
  return out;
}

std::vector<ExactCheck> run_permutation_suite() {
  std::vector<ExactCheck> out;
  auto dist_text = [](const std::map<std::int64_t, std::int64_t>& d) {
    std::string s = "{";
    for (const auto& [v, c] : d) s += (s.size() > 1 ? ", " : "") + std::to_string(v) + ":" + std::to_string(c);
    return s + "}";
  };
  auto add = [&](const std::string& name, const std::map<std::int64_t, std::int64_t>& a,
                 const std::map<std::int64_t, std::int64_t>& b) {
    out.push_back({name, a == b, dist_text(a) + " vs " + dist_text(b)});
  };
  for (int n : {3, 5, 7})
    add("PC=B multiset n=" + std::to_string(n), permutation_distribution(StatKind::bialt, n),
        permutation_distribution(StatKind::cyclic, n));
  for (int n = 3; n <= 6; ++n)
    add("Chebikin multiset n=" + std::to_string(n), permutation_distribution(StatKind::alt_first, n),
        permutation_distribution(StatKind::classic, n));
  add("bialt S3", permutation_distribution(StatKind::bialt, 3), {{-1, 3}, {1, 3}});

  // Var over S_n, compared as exact integers: n!^2 Var = n! S2 - S1^2
  auto writhe_var = [&](int n, std::int64_t num_, std::int64_t den) {
    std::int64_t total = 0, s1 = 0, s2 = 0;
    for (const auto& [v, c] : permutation_distribution(StatKind::cyclic, n)) {
      total += c;
      s1 += v * c;
      s2 += v * v * c;
    }
    const std::int64_t scaled = total * s2 - s1 * s1;  // total^2 * Var
    const bool ok = scaled * den == num_ * total * total;
    out.push_back({"writhe variance S" + std::to_string(n), ok,
                   "n!^2 Var=" + std::to_string(scaled) + " n!=" + std::to_string(total) + " expected " +
                       std::to_string(num_) + "/" + std::to_string(den)});
  };
  writhe_var(5, 10, 3);
  writhe_var(3, 1, 1);
  return out;
}

}  // namespace ustat
