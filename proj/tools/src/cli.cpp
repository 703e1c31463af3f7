#include "ustat_cli/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <variant>

#include "CLI11.hpp"
#include "json.hpp"
#include "ustat/config.hpp"
#include "ustat/error.hpp"
#include "ustat/harness.hpp"
#include "ustat/ustats.hpp"

namespace ustat::cli {

namespace {

using json = nlohmann::ordered_json;

enum class Format { csv, jsonl };

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> cols;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;
};

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void emit(std::ostream& os, Format f, const json& resolved, const Table& t) {
  if (f == Format::csv) {
    os << "# config " << resolved.dump() << "\n";
    os << "# seed " << resolved.value("seed", std::uint64_t{0}) << "\n";
    for (const auto& n : t.notes) os << "# " << n << "\n";
    for (std::size_t c = 0; c < t.cols.size(); ++c) os << (c ? "," : "") << t.cols[c];
    os << "\n";
    for (const auto& r : t.rows) {
      for (std::size_t c = 0; c < r.size(); ++c) {
        if (c) os << ',';
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>) os << fmt_double(v);
              else if constexpr (std::is_same_v<T, std::string>) os << csv_field(v);
              else os << v;
            },
            r[c]);
      }
      os << "\n";
    }
    return;
  }
  os << json{{"config", resolved}, {"seed", resolved.value("seed", std::uint64_t{0})}}.dump() << "\n";
  for (const auto& n : t.notes) os << json{{"note", n}}.dump() << "\n";
  for (const auto& r : t.rows) {
    json o = json::object();
    for (std::size_t c = 0; c < r.size(); ++c)
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              if (std::isnan(v)) o[t.cols[c]] = nullptr;
              else o[t.cols[c]] = v;
            } else {
              o[t.cols[c]] = v;
            }
          },
          r[c]);
    os << o.dump() << "\n";
  }
}

// Flag bindings: a flag fills its variable; a config key of the same name
// (dashes as underscores) fills it when the flag is absent.
using Target = std::variant<int*, std::int64_t*, std::uint64_t*, double*, std::string*, bool*, std::vector<int>*,
                            std::vector<double>*, std::vector<std::string>*>;

struct Binding {
  std::string key;
  CLI::Option* opt;
  Target target;
};

std::string key_of(const std::string& flag) {
  const std::string first = flag.substr(0, flag.find(','));
  std::string k = first.substr(first.find_first_not_of('-'));
  for (char& c : k)
    if (c == '-') c = '_';
  return k;
}

class Command {
 public:
  Command(CLI::App& parent, const std::string& name, const std::string& help) : app_(parent.add_subcommand(name, help)) {}

  CLI::App* app() const { return app_; }

  template <class T>
  CLI::Option* bind(const std::string& flag, T& var, const std::string& help) {
    CLI::Option* o = app_->add_option(flag, var, help)->capture_default_str();
    if constexpr (requires { var.size(); } && !std::is_same_v<T, std::string>) o->delimiter(',');
    binds_.push_back({key_of(flag), o, Target(&var)});
    return o;
  }

  CLI::Option* flag(const std::string& flag, bool& var, const std::string& help) {
    CLI::Option* o = app_->add_flag(flag, var, help);
    binds_.push_back({key_of(flag), o, Target(&var)});
    return o;
  }

  void apply_config(const json& cfg) const {
    for (const auto& [key, value] : cfg.items()) {
      if (key == "seed" || key == "threads" || key == "format" || key == "out") continue;
      const Binding* b = find(key == "measure" ? "dist" : key);
      if (!b) throw Error(Errc::config_error, "unknown config key '" + key + "' for " + app_->get_name());
      if (b->opt->count() > 0) continue;
      std::visit([&](auto* p) { *p = value.get<std::remove_pointer_t<decltype(p)>>(); }, b->target);
    }
  }

  void resolved(json& out) const {
    for (const auto& b : binds_) std::visit([&](auto* p) { out[b.key] = *p; }, b.target);
  }

 private:
  const Binding* find(const std::string& key) const {
    for (const auto& b : binds_)
      if (b.key == key) return &b;
    return nullptr;
  }

  CLI::App* app_;
  std::vector<Binding> binds_;
};

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Cyclic and alternating U-statistics toolkit", "ustat");
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "csv", out_path, config_path;
  std::uint64_t seed = 1;
  int threads = default_threads();
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "jsonl"}))->capture_default_str();
  app.add_option("--out", out_path, "Output file (default stdout)");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed")->capture_default_str();
  auto* threads_opt = app.add_option("--threads", threads, "Worker cap (default from USTAT_THREADS)")
                          ->check(CLI::PositiveNumber)
                          ->capture_default_str();
  app.add_option("--config", config_path, "JSON config; flags given on the command line take precedence");

  // decompose
  Command dec(app, "decompose", "Hoeffding decomposition, variance components and regimes");
  std::string dec_kernel = "product", dec_dist = "uniform01";
  int dec_mq = 512;
  double dec_tol = 1e-8;
  dec.bind("--kernel", dec_kernel, "Kernel expression");
  dec.bind("--dist", dec_dist, "Measure expression");
  dec.bind("--m-q", dec_mq, "Quadrature nodes per continuous factor");
  dec.bind("--tol", dec_tol, "Degeneracy tolerance");

  // spectrum
  Command spe(app, "spectrum", "Nystrom spectrum of a kernel operator, or an analytic spectrum");
  std::string sp_kernel = "sign", sp_dist = "uniform01", sp_operator = "plain", sp_analytic, sp_block;
  int sp_m = 400, sp_mt = 64, sp_top = 10, sp_K = 64;
  double sp_sigma2 = 1.0, sp_s = 1.0, sp_tau = 1.0;
  spe.bind("--kernel", sp_kernel, "Kernel expression");
  spe.bind("--dist", sp_dist, "Measure expression");
  spe.bind("--operator", sp_operator, "plain, hat, check, block, tc-sym or tc-anti");
  spe.bind("--m", sp_m, "Nodes per continuous factor");
  spe.bind("--m-t", sp_mt, "Nodes on the auxiliary [0,1] coordinate of lifted operators");
  spe.bind("--top", sp_top, "Number of eigenvalues reported");
  spe.bind("--analytic", sp_analytic, "Analytic case: L3, LAs, LAa, Ewrithe, E1, ESJ22, ESJ22-perturbed");
  spe.bind("--K", sp_K, "Terms of an analytic spectrum");
  spe.bind("--sigma2", sp_sigma2, "E1 variance parameter");
  spe.bind("--s", sp_s, "ESJ22-perturbed s");
  spe.bind("--tau", sp_tau, "ESJ22-perturbed tau");
  spe.bind("--block", sp_block, "Sign block operator hs or ha (ignores --kernel)");

  // simulate
  Command sim(app, "simulate", "Monte Carlo convergence study over an n-grid");
  std::string sim_kernel = "product", sim_dist = "uniform01", sim_samples, sim_name = "convergence";
  std::vector<std::string> sim_stats = {"classic"};
  std::vector<int> sim_grid = {250, 500, 1000, 2000};
  int sim_reps = 2000, sim_trunc = 2000, sim_mq = 512;
  double sim_ks = 0.06, sim_mean_se = 4.0, sim_regime = 1e-8;
  bool sim_no_limit = false;
  sim.bind("--name", sim_name, "Experiment name");
  sim.bind("--kernel", sim_kernel, "Kernel expression");
  sim.bind("--dist", sim_dist, "Measure expression");
  sim.bind("--stats", sim_stats, "Statistics, comma separated");
  sim.bind("--n-grid", sim_grid, "Ascending sample sizes, comma separated");
  sim.bind("--reps", sim_reps, "Replications per cell");
  sim.bind("--trunc", sim_trunc, "Series truncation K for limit samples");
  sim.bind("--m-q", sim_mq, "Quadrature nodes for the projection");
  sim.bind("--ks-tol", sim_ks, "KS threshold at the largest n");
  sim.bind("--mean-se", sim_mean_se, "Mean check in standard errors");
  sim.bind("--regime-tol", sim_regime, "Degeneracy tolerance");
  sim.bind("--samples", sim_samples, "Write raw replication values to this CSV");
  sim.flag("--no-limit", sim_no_limit, "Skip the comparison with the limit law");

  // limit-sample
  Command ls(app, "limit-sample", "Draw from a limit law");
  std::string ls_law = "eta";
  std::int64_t ls_count = 10000;
  int ls_K = 2000;
  bool ls_no_tail = false;
  ls.bind("--law", ls_law, "eta, xeta, chi, writhe or a JSON law object");
  ls.bind("--count,--n", ls_count, "Number of samples");
  ls.bind("--K,--trunc", ls_K, "Series truncation");
  ls.flag("--no-tail", ls_no_tail, "Drop the Gaussian tail compensation");

  // limit-cf
  Command lc(app, "limit-cf", "Characteristic function of a limit law");
  std::string lc_law = "eta";
  std::vector<double> lc_t = {0.0, 0.5, 1.0, 2.0};
  lc.bind("--law", lc_law, "eta, xeta, chi, writhe or a JSON law object");
  lc.bind("--t", lc_t, "Arguments, comma separated");

  // verify
  Command ver(app, "verify", "KS distance and cumulants of a normalized statistic vs its limit law");
  std::string v_stat = "cyclic", v_kernel = "sign", v_dist = "uniform01";
  int v_n = 2001, v_reps = 4000, v_trunc = 2000, v_mq = 512, v_m = 400, v_cap = 64;
  double v_ks = 0.06, v_tol = 1e-8;
  ver.bind("--stat", v_stat, "Statistic");
  ver.bind("--kernel", v_kernel, "Kernel expression");
  ver.bind("--dist", v_dist, "Measure expression");
  ver.bind("--n", v_n, "Sample size");
  ver.bind("--reps", v_reps, "Replications (and limit-law samples)");
  ver.bind("--trunc", v_trunc, "Series truncation K");
  ver.bind("--m-q", v_mq, "Quadrature nodes for the projection");
  ver.bind("--m", v_m, "Nodes for the operator spectrum");
  ver.bind("--cap", v_cap, "Eigenvalues kept in the law");
  ver.bind("--ks-tol", v_ks, "KS threshold");
  ver.bind("--tol", v_tol, "Degeneracy tolerance");

  // joint-cf
  Command jc(app, "joint-cf", "Empirical joint cf of the symmetric and antisymmetric bilinear statistics");
  std::string jc_dist = "product(rademacher, rademacher)";
  int jc_n = 2000, jc_reps = 10000;
  std::vector<double> jc_s = {0.0, 1.0}, jc_t = {0.0, 1.0};
  jc.bind("--dist", jc_dist, "Product measure");
  jc.bind("--n", jc_n, "Sample size");
  jc.bind("--reps", jc_reps, "Replications");
  jc.bind("--s", jc_s, "s grid");
  jc.bind("--t", jc_t, "t grid");

  // perm-exact
  Command pe(app, "perm-exact", "Exact distribution of a sign statistic over all permutations");
  std::string pe_stat = "cyclic";
  int pe_n = 5;
  pe.bind("--stat", pe_stat, "Statistic");
  pe.bind("--n", pe_n, "Permutation size (2..9)");

  // slln
  Command sl(app, "slln", "Single growing sample path at logarithmic checkpoints");
  std::string sl_stat = "classic", sl_kernel = "product", sl_dist = "uniform01";
  std::int64_t sl_nmax = 100000;
  double sl_tol = 0.05;
  int sl_mq = 512;
  sl.bind("--stat", sl_stat, "Statistic");
  sl.bind("--kernel", sl_kernel, "Kernel expression");
  sl.bind("--dist", sl_dist, "Measure expression");
  sl.bind("--n-max", sl_nmax, "Final sample size");
  sl.bind("--tol", sl_tol, "Allowed final deviation from the target");
  sl.bind("--m-q", sl_mq, "Quadrature nodes for the mean");

  // exact
  Command ex(app, "exact", "Exact identity and permutation suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const std::vector<const Command*> commands = {&dec, &spe, &sim, &ls, &lc, &ver, &jc, &pe, &sl, &ex};
  const Command* cmd = nullptr;
  for (const Command* c : commands)
    if (c->app()->parsed()) cmd = c;

  try {
    json cfg_json;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw Error(Errc::config_error, "cannot read config file " + config_path);
      try {
        cfg_json = json::parse(in, nullptr, true, true);
      } catch (const json::exception& e) {
        throw Error(Errc::config_error, std::string("malformed config: ") + e.what());
      }
      if (!cfg_json.is_object()) throw Error(Errc::config_error, "config must be a JSON object");
      try {
        if (cfg_json.contains("seed") && seed_opt->count() == 0) seed = cfg_json["seed"].get<std::uint64_t>();
        if (cfg_json.contains("threads") && threads_opt->count() == 0) threads = cfg_json["threads"].get<int>();
        cmd->apply_config(cfg_json);
      } catch (const json::exception& e) {
        throw Error(Errc::config_error, std::string("bad config value: ") + e.what());
      }
    }
    const Format fmt = format == "jsonl" ? Format::jsonl : Format::csv;

    json resolved;
    resolved["command"] = cmd->app()->get_name();
    resolved["seed"] = seed;
    cmd->resolved(resolved);

    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path);
      if (!file) throw Error(Errc::config_error, "cannot write " + out_path);
    }
    std::ostream& os = out_path.empty() ? out : file;

    Table t;
    bool ok = true;
    const std::string name = cmd->app()->get_name();

    if (name == "decompose") {
      const KernelSpec k = parse_kernel(dec_kernel);
      const MeasureSpec nu = parse_measure(dec_dist);
      const HoeffdingParts parts = project(k, nu, dec_mq);
      const VarianceComponents vc = variance_components(parts);
      t.cols = {"quantity", "value"};
      t.rows = {{std::string("symmetry"), std::string(symmetry_name(k.symmetry()))},
                {std::string("mu"), parts.mu()},
                {std::string("var_f1"), vc.var_f1},
                {std::string("var_f2"), vc.var_f2},
                {std::string("cov_f1f2"), vc.cov_f1f2},
                {std::string("var_f12"), vc.var_f12},
                {std::string("var_f1_plus_f2"), vc.var_f1_plus_f2},
                {std::string("var_f"), vc.var_f}};
      for (auto s : all_stats())
        t.rows.push_back({std::string("regime_") + stat_name(s), std::string(regime_name(classify(s, vc, dec_tol)))});
    } else if (name == "spectrum") {
      Spectrum sp;
      if (!sp_analytic.empty()) {
        sp = analytic_spectrum(parse_analytic_case(sp_analytic), AnalyticParams{sp_sigma2, sp_s, sp_tau}, sp_K);
      } else {
        NystromMatrix m;
        if (!sp_block.empty()) {
          if (sp_block != "hs" && sp_block != "ha") throw Error(Errc::config_error, "--block must be hs or ha");
          m = sign_block_operator(sp_block == "hs" ? SignBlock::hs : SignBlock::ha, sp_m);
        } else {
          m = nystrom(parse_kernel(sp_kernel), parse_measure(sp_dist), sp_m, parse_operator(sp_operator), sp_mt);
        }
        sp = eig(m, std::max(sp_top, 1));
        t.notes.push_back(std::string("structure ") + structure_name(m.tag) + " side " + std::to_string(m.a.rows()));
        t.notes.push_back("frobenius_sq " + fmt_double(m.a.squaredNorm()));
      }
      t.cols = {"index", "lambda", "mode"};
      const std::size_t top = std::min<std::size_t>(sp.values.size(), static_cast<std::size_t>(std::max(sp_top, 0)));
      for (std::size_t i = 0; i < top; ++i)
        t.rows.push_back({static_cast<std::int64_t>(i + 1), sp.values[i], std::string(mode_name(sp.mode))});
    } else if (name == "simulate") {
      ExperimentConfig cfg;
      cfg.name = sim_name;
      cfg.kernel = parse_kernel(sim_kernel);
      cfg.measure = parse_measure(sim_dist);
      cfg.stats.clear();
      for (const auto& s : sim_stats) cfg.stats.push_back(parse_stat(s));
      cfg.n_grid = sim_grid;
      cfg.reps = sim_reps;
      cfg.seed = seed;
      cfg.trunc = sim_trunc;
      cfg.threads = threads;
      cfg.m_q = sim_mq;
      cfg.compare_limit = !sim_no_limit;
      cfg.tol.ks = sim_ks;
      cfg.tol.mean_se = sim_mean_se;
      cfg.tol.regime = sim_regime;
      cfg.samples_path = sim_samples;
      cfg.validate();
      const ExperimentReport rep = run_convergence(cfg);
      for (const auto& s : rep.stats)
        t.notes.push_back(std::string(stat_name(s.stat)) + " regime=" + regime_name(s.regime) +
                          " scale=" + fmt_double(s.scale_exponent) + " fitted_exponent=" +
                          fmt_double(s.fitted_exponent) + " law=" + s.law.describe());
      for (const auto& f : rep.failures) t.notes.push_back("FAIL " + f);
      t.cols = {"stat", "n", "mean", "var", "ks", "k1", "k2", "k3", "k4"};
      for (const auto& c : rep.cells) {
        std::vector<Cell> row = {std::string(stat_name(c.stat)), static_cast<std::int64_t>(c.n), c.mean, c.var, c.ks};
        for (double k : c.cumulants) row.emplace_back(k);
        t.rows.push_back(std::move(row));
      }
      if (!sim_samples.empty()) {
        std::ofstream sf(sim_samples);
        if (!sf) throw Error(Errc::config_error, "cannot write " + sim_samples);
        rep.write_samples_csv(sf);
      }
      ok = rep.pass();
    } else if (name == "limit-sample") {
      if (ls_count < 1) throw Error(Errc::invalid_argument, "--count must be positive");
      const MixtureLaw law = parse_law(ls_law);
      const auto xs = sample(law, SeriesTruncation{ls_K, ls_no_tail ? TailCompensation::none : TailCompensation::gaussian_tail},
                             seed, static_cast<std::size_t>(ls_count), threads);
      t.notes.push_back("law " + law.describe());
      t.cols = {"value"};
      for (double x : xs) t.rows.push_back({x});
    } else if (name == "limit-cf") {
      const MixtureLaw law = parse_law(lc_law);
      t.notes.push_back("law " + law.describe());
      t.cols = {"t", "re", "im", "modulus"};
      for (double x : lc_t) {
        const auto z = cf(law, x);
        t.rows.push_back({x, z.real(), z.imag(), std::abs(z)});
      }
    } else if (name == "verify") {
      VerifyOptions opt;
      opt.threads = threads;
      opt.trunc = v_trunc;
      opt.m_q = v_mq;
      opt.resolution.m = v_m;
      opt.resolution.cap = v_cap;
      opt.tol = v_tol;
      const auto r = verify_limit(parse_stat(v_stat), parse_kernel(v_kernel), parse_measure(v_dist), v_n, v_reps, seed, opt);
      ok = r.ks < v_ks;
      t.notes.push_back("law " + r.law.describe());
      t.notes.push_back("ks " + fmt_double(r.ks) + (ok ? " < " : " >= ") + fmt_double(v_ks) + (ok ? " PASS" : " FAIL"));
      t.cols = {"quantity", "empirical", "limit"};
      t.rows.push_back({std::string("ks"), r.ks, v_ks});
      for (int m = 0; m < 4; ++m)
        t.rows.push_back({"k" + std::to_string(m + 1), r.cumulants[m], r.law_cumulants[m]});
    } else if (name == "joint-cf") {
      const auto r = joint_cf_experiment(jc_n, jc_reps, jc_s, jc_t, seed, parse_measure(jc_dist), threads);
      t.cols = {"s", "t", "re", "im", "modulus", "analytic"};
      for (const auto& p : r.grid) t.rows.push_back({p.s, p.t, p.re, p.im, p.modulus, p.analytic});
    } else if (name == "perm-exact") {
      t.cols = {"value", "count"};
      for (const auto& [v, c] : permutation_distribution(parse_stat(pe_stat), pe_n))
        t.rows.push_back({static_cast<std::int64_t>(v), static_cast<std::int64_t>(c)});
    } else if (name == "slln") {
      const auto r = slln_run(parse_stat(sl_stat), parse_kernel(sl_kernel), parse_measure(sl_dist), sl_nmax, seed,
                              sl_tol, sl_mq);
      t.notes.push_back("target " + fmt_double(r.target) + " final " + fmt_double(r.final_value) +
                        (r.asserted ? (r.pass ? " PASS" : " FAIL") : " (observation only)"));
      t.cols = {"n", "value"};
      for (const auto& [n, v] : r.trajectory) t.rows.push_back({static_cast<std::int64_t>(n), v});
      ok = r.pass;
    } else if (name == "exact") {
      auto checks = run_exact_suite();
      for (auto& c : run_permutation_suite()) checks.push_back(std::move(c));
      t.cols = {"check", "pass", "detail"};
      for (const auto& c : checks) {
        t.rows.push_back({c.name, static_cast<std::int64_t>(c.pass), c.detail});
        ok = ok && c.pass;
      }
    }

    emit(os, fmt, resolved, t);
    if (!ok) {
      err << name << ": assertion failed\n";
      return 1;
    }
    return 0;
  } catch (const Error& e) {
    err << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace ustat::cli
