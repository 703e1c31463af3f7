#include "ustat/limitlaws.hpp"

#include <boost/math/special_functions/trigamma.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "parallel.hpp"
#include "ustat/error.hpp"
#include "ustat/rng.hpp"

namespace ustat {

namespace {

constexpr double kPi = std::numbers::pi;

enum Component : std::uint64_t { kGauss = 0, kChi = 1, kEta = 2, kXeta = 3 };

double sum_sq(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

}  // namespace

double MixtureLaw::variance() const {
  return gaussian_var + tail_var + 0.5 * sum_sq(chi) + sum_sq(eta) + 0.5 * sum_sq(xeta);
}

std::string MixtureLaw::describe() const {
  std::ostringstream os;
  os.precision(10);
  auto list = [&](const char* name, const std::vector<double>& v) {
    os << name << "=[";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << "] ";
  };
  os << "gaussian_var=" << gaussian_var << " ";
  list("chi", chi);
  list("eta", eta);
  list("xeta", xeta);
  os << "tail_var=" << tail_var << " scale=n^" << scale_exponent;
  if (parity) os << " parity=" << (*parity == Parity::even ? "even" : "odd");
  return os.str();
}

MixtureLaw pure_eta() {
  MixtureLaw l;
  l.eta = {1.0};
  return l;
}

MixtureLaw pure_xeta() {
  MixtureLaw l;
  l.xeta = {1.0};
  return l;
}

// sum_{k>K} 1/(2k-1)^2 = trigamma(K + 1/2) / 4; eta terms have variance
// 8/((2k-1)pi)^2 and xeta terms half that.
double eta_tail_variance(int K) { return 2.0 * boost::math::trigamma(K + 0.5) / (kPi * kPi); }
double xeta_tail_variance(int K) { return boost::math::trigamma(K + 0.5) / (kPi * kPi); }

std::vector<double> sample(const MixtureLaw& law, const SeriesTruncation& trunc, std::uint64_t seed,
                           std::size_t count, int threads) {
  if (trunc.K_terms < 1) throw Error(Errc::invalid_argument, "K_terms must be >= 1");
  const int K = trunc.K_terms;
  std::vector<double> c(K);
  for (int k = 1; k <= K; ++k) c[k - 1] = 1.0 / ((2.0 * k - 1.0) * kPi);
  double gvar = law.gaussian_var + law.tail_var;
  if (trunc.tail == TailCompensation::gaussian_tail)
    gvar += sum_sq(law.eta) * eta_tail_variance(K) + sum_sq(law.xeta) * xeta_tail_variance(K);
  const double gsd = std::sqrt(gvar);

  std::vector<double> out(count);
  detail::parallel_for(count, threads, [&](std::size_t i) {
    boost::random::normal_distribution<double> normal;
    boost::random::exponential_distribution<double> expo;
    double w = 0.0;
    if (gsd > 0) {
      Stream g = derive_stream(seed, kGauss, i);
      w += gsd * normal(g);
    }
    if (!law.chi.empty()) {
      Stream g = derive_stream(seed, kChi, i);
      for (double lam : law.chi) {
        const double z = normal(g);
        w += 0.5 * lam * (z * z - 1.0);
      }
    }
    if (!law.eta.empty()) {
      // zeta_1^2 + zeta_2^2 is 2 Exp(1) in law
      Stream g = derive_stream(seed, kEta, i);
      for (double lam : law.eta) {
        double s = 0.0;
        for (int k = 0; k < K; ++k) {
          const double e1 = expo(g), e2 = expo(g);
          s += c[k] * (e1 - e2);
        }
        w += 2.0 * lam * s;
      }
    }
    if (!law.xeta.empty()) {
      Stream g = derive_stream(seed, kXeta, i);
      for (double lam : law.xeta) {
        double s = 0.0;
        for (int k = 0; k < K; ++k) {
          const double z1 = normal(g), z2 = normal(g);
          s += c[k] * (z1 * z1 - z2 * z2);
        }
        w += lam * s;
      }
    }
    out[i] = w;
  });
  return out;
}

std::complex<double> cf(const MixtureLaw& law, double t) {
  using C = std::complex<double>;
  const C I(0.0, 1.0);
  C lg = -0.5 * (law.gaussian_var + law.tail_var) * t * t;
  for (double lam : law.chi) lg += -0.5 * I * lam * t - 0.5 * std::log(C(1.0, -lam * t));
  for (double lam : law.eta) lg -= log_cosh(lam * t);
  for (double lam : law.xeta) lg -= 0.5 * log_cosh(lam * t);
  return std::exp(lg);
}

double cf_joint_bilinear(double s, double t) {
  const double r = t == 0.0 ? 1.0 : std::sinh(t) / t;
  const double c = std::cosh(t);
  return 1.0 / std::sqrt(c * c + s * s * r * r);
}

double bernoulli_number(int m) {
  static const double B[13] = {1.0,          -0.5, 1.0 / 6.0, 0.0, -1.0 / 30.0, 0.0, 1.0 / 42.0,
                               0.0,          -1.0 / 30.0, 0.0, 5.0 / 66.0, 0.0, -691.0 / 2730.0};
  if (m < 0 || m > 12) throw Error(Errc::invalid_argument, "Bernoulli table covers B_0..B_12");
  return B[m];
}

namespace {
void check_order(int m) {
  if (m < 1 || m > 12) throw Error(Errc::invalid_argument, "cumulant order must be in 1..12");
}
}  // namespace

double cumulant_chi(int m) {
  check_order(m);
  if (m == 1) return 0.0;
  return std::ldexp(std::tgamma(static_cast<double>(m)), m - 1);
}

double cumulant_eta(int m) {
  check_order(m);
  if (m % 2 == 1) return 0.0;
  const double p = std::ldexp(1.0, m);
  return p * (p - 1.0) / m * std::abs(bernoulli_number(m));
}

double cumulant_xeta(int m) { return 0.5 * cumulant_eta(m); }

double cumulant(const MixtureLaw& law, int m) {
  check_order(m);
  double k = 0.0;
  for (double lam : law.chi) k += std::pow(0.5 * lam, m) * cumulant_chi(m);
  for (double lam : law.eta) k += std::pow(lam, m) * cumulant_eta(m);
  for (double lam : law.xeta) k += std::pow(lam, m) * cumulant_xeta(m);
  if (m == 2) k += law.gaussian_var + law.tail_var;
  return k;
}

std::vector<double> empirical_cumulants(std::span<const double> xs, int max_order) {
  if (max_order < 1 || max_order > 4) throw Error(Errc::invalid_argument, "max_order must be in 1..4");
  const std::size_t need = max_order == 4 ? 10000 : 2;
  if (xs.size() < need) throw Error(Errc::insufficient_data, "too few samples for the requested order");
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - mean, d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  std::vector<double> k = {mean, m2, m3, m4 - 3.0 * m2 * m2};
  k.resize(max_order);
  return k;
}

}  // namespace ustat
