#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ustat/hoeffding.hpp"
#include "ustat/kernel.hpp"
#include "ustat/limitlaws.hpp"
#include "ustat/rng.hpp"
#include "ustat/spectral.hpp"
#include "ustat/stat_kind.hpp"

namespace ustat {

// Thread count from USTAT_THREADS, else 1.
int default_threads();

Point draw_point(const MeasureSpec& nu, Stream& g);
void draw_points(const MeasureSpec& nu, Stream& g, std::vector<Point>& out);

// evaluate_fast when supported, evaluate otherwise.
double statistic(StatKind stat, const KernelSpec& k, std::span<const Point> data);

struct Tolerances {
  double ks = 0.06;
  double regime = 1e-8;
  double mean_se = 4.0;  // empirical mean within this many standard errors
  double slln = 0.05;
};

struct ExperimentConfig {
  std::string name = "convergence";
  KernelSpec kernel = KernelSpec::product();
  MeasureSpec measure = SpaceSpec::uniform01();
  std::vector<StatKind> stats = {StatKind::classic};
  std::vector<int> n_grid = {250, 500, 1000, 2000};
  int reps = 2000;
  std::uint64_t seed = 1;
  int trunc = 2000;
  Tolerances tol;
  int threads = 1;
  int m_q = 512;
  Resolution resolution;
  bool compare_limit = true;
  std::string samples_path, summary_path;

  void validate() const;
};

// JSON with keys name, kernel, measure, stats, n_grid, reps, seed, trunc,
// threads, m_q, compare_limit, samples, summary and a nested tolerances
// object {ks, regime, mean_se, slln}. Missing keys keep their defaults.
ExperimentConfig config_from_json(const std::string& text, const ExperimentConfig& base = {});
ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base = {});
std::string config_to_json(const ExperimentConfig& cfg);

// Raw statistic values for N replications; replication r uses data stream
// derive_stream(seed, n, r), shared by all requested statistics.
std::vector<std::vector<double>> simulate(const std::vector<StatKind>& stats, const KernelSpec& k,
                                          const MeasureSpec& nu, int n, int N, std::uint64_t seed, int threads = 1);

struct CellResult {
  StatKind stat;
  int n = 0;
  double mean = 0, var = 0, exact_mean = 0;
  double mean_z = 0;  // (mean - exact_mean) / standard error
  bool mean_ok = true;
  double ks = -1.0;                // vs the limit-law sample; -1 when not compared
  std::vector<double> cumulants;   // k1..k4 of normalized, NaN where unavailable
  std::vector<double> values;      // raw statistic
  std::vector<double> normalized;  // (value - exact_mean) / n^scale
};

struct StatSummary {
  StatKind stat;
  Regime regime = Regime::nondegenerate;
  double scale_exponent = 1.0;
  double fitted_exponent = 0.0;
  double ks = -1.0;  // -1 when not compared
  std::vector<double> cumulants, law_cumulants;  // k1..k4, NaN where unavailable
  MixtureLaw law;
};

struct ExperimentReport {
  ExperimentConfig cfg;
  std::vector<CellResult> cells;
  std::vector<StatSummary> stats;
  std::vector<std::string> failures;

  bool pass() const { return failures.empty(); }
  const CellResult& cell(StatKind s, int n) const;
  const StatSummary& summary(StatKind s) const;
  // header: experiment,stat,n,replication,value
  void write_samples_csv(std::ostream& os) const;
  // header: stat,n,mean,var,ks,k1,k2,k3,k4
  void write_summary_csv(std::ostream& os) const;
};

ExperimentReport run_convergence(const ExperimentConfig& cfg);

// Least-squares slope of log y on log x.
double fit_exponent(const std::vector<double>& x, const std::vector<double>& y);

double ks_two_sample(std::span<const double> a, std::span<const double> b);

struct VerifyOptions {
  int threads = 1;
  int trunc = 2000;
  int m_q = 512;
  Resolution resolution;
  double tol = 1e-8;
};

struct VerifyResult {
  double ks = 0.0;
  std::vector<double> cumulants, law_cumulants;
  MixtureLaw law;
  std::vector<double> normalized, limit_sample;
};

VerifyResult verify_limit(StatKind stat, const KernelSpec& k, const MeasureSpec& nu, int n, int N,
                          std::uint64_t seed, const VerifyOptions& opt = {});

struct JointCfPoint {
  double s = 0, t = 0, re = 0, im = 0, modulus = 0, analytic = 0;
};

struct JointCfResult {
  std::vector<JointCfPoint> grid;
  std::vector<double> ws, wa;  // 2 U_n(fs) / n and 2 U_n(fa) / n per replication
};

JointCfResult joint_cf_experiment(int n, int N, const std::vector<double>& s_grid, const std::vector<double>& t_grid,
                                  std::uint64_t seed, const MeasureSpec& nu = SpaceSpec::product(
                                                          SpaceSpec::rademacher(), SpaceSpec::rademacher()),
                                  int threads = 1);

struct SllnResult {
  std::vector<std::pair<std::int64_t, double>> trajectory;
  double final_value = 0, target = 0;
  bool asserted = false;  // false for the cyclic statistics (observation only)
  bool pass = true;
};

SllnResult slln_run(StatKind stat, const KernelSpec& k, const MeasureSpec& nu, std::int64_t n_max,
                    std::uint64_t seed, double tol = 0.05, int m_q = 512);

struct ExactCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Pairing identities, recursions, reductions, reversal and the permutation
// multiset equalities; integer data must match exactly.
std::vector<ExactCheck> run_exact_suite(std::uint64_t seed = 20240601);
std::vector<ExactCheck> run_permutation_suite();

}  // namespace ustat
