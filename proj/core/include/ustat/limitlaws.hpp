#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ustat/stat_kind.hpp"

namespace ustat {

// W = N(0, gaussian_var + tail_var)
//   + sum_r chi[r]/2 * (zeta_r^2 - 1)
//   + sum_q eta[q] * eta_q        (eta_q: stochastic area, cf 1/cosh t)
//   + sum_r xeta[r] * xeta_r      (xeta_r: half-area, cf cosh(t)^{-1/2})
// tail_var is the Gaussian stand-in for spectrum terms beyond the report cap.
struct MixtureLaw {
  double gaussian_var = 0.0;
  std::vector<double> chi, eta, xeta;
  double tail_var = 0.0;
  double scale_exponent = 1.0;  // 1.5, 1 or 0.5
  std::optional<Parity> parity;

  double variance() const;
  std::string describe() const;
};

MixtureLaw pure_eta();
MixtureLaw pure_xeta();

enum class TailCompensation { none, gaussian_tail };

struct SeriesTruncation {
  int K_terms = 2000;
  TailCompensation tail = TailCompensation::gaussian_tail;
};

// Variance of the series terms beyond K for one eta or one xeta.
double eta_tail_variance(int K);
double xeta_tail_variance(int K);

// Sample i uses streams derive_stream(seed, component, i); the result does
// not depend on the thread count.
std::vector<double> sample(const MixtureLaw& law, const SeriesTruncation& trunc, std::uint64_t seed,
                           std::size_t count, int threads = 1);

// Each factor (1 - i lambda t)^{-1/2} is taken on the principal branch; its
// base has real part 1, so the principal root is continuous in t and the
// product of per-factor roots is the branch continued from t = 0.
std::complex<double> cf(const MixtureLaw& law, double t);

// (cosh^2 t + s^2 sinh^2(t) / t^2)^{-1/2}
double cf_joint_bilinear(double s, double t);

double bernoulli_number(int m);  // B_0..B_12, B_1 = -1/2
double cumulant_chi(int m);      // zeta^2 - 1
double cumulant_eta(int m);
double cumulant_xeta(int m);
double cumulant(const MixtureLaw& law, int m);

// Central-moment estimates of kappa_1..kappa_max_order (max_order <= 4).
// Order 4 needs at least 1e4 samples.
std::vector<double> empirical_cumulants(std::span<const double> xs, int max_order = 4);

}  // namespace ustat
