#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "zerolab/bergman.hpp"
#include "zerolab/calculus.hpp"
#include "zerolab/projective.hpp"

namespace zerolab {

enum class MeasureMode { FS, Perturbed };

/// Sampling specification for the product measure on the section spaces.
///
/// One perturbation u is shared by all wedge factors, so the density of
/// (omega_FS + dd^c u)^N against omega_FS^N is a determinant. Without an
/// explicit `perturbation` the standard family
/// u(v) = (c_p / 2) |v_{bump_index}|^2 / |v|^2 is used; its Levi form lies in
/// [-c_p, c_p] relative to omega_FS.
struct MeasureSpec {
  MeasureMode mode = MeasureMode::FS;
  double c_p = 0.0;
  double rho = 0.5;
  int bump_index = 0;
  std::function<double(const ProjectivePoint&)> perturbation;  ///< optional override

  /// The perturbation on P^N (the zero function in FS mode).
  PointFunction function() const;
};

struct SectionSample {
  std::vector<CVector> tuple;  ///< one unit coefficient vector per slot
  double importance_weight = 1.0;
  double log_density_diag = 0.0;  ///< sum of log perturbation weights
};

/// Standard complex Gaussian in C^{d+1}, normalized.
CVector sample_fs_section(int d, std::mt19937_64& rng);

/// det(I + 2 H) with H the complex Hessian of u at [v] in the centred chart
/// (the FS metric tensor there is I/2). Throws NonPositiveDensity.
double perturbation_weight(const MeasureSpec& spec, const CVector& v);

/// Independent FS draws per slot, weighted by the product of perturbation
/// weights (1 in FS mode).
SectionSample sample_sigma_p(std::span<const BergmanBasis> bases, const MeasureSpec& spec, std::mt19937_64& rng);
SectionSample sample_sigma_p(std::span<const int> dims, const MeasureSpec& spec, std::mt19937_64& rng);

/// (sum w)^2 / sum w^2.
double effective_sample_size(std::span<const double> weights);

struct WeightedDraw {
  CVector v;
  double weight = 1.0;
};
/// A weighted sampler on P^N.
using MeasureSampler = std::function<WeightedDraw(std::mt19937_64&)>;

MeasureSampler fs_sampler(int N);
MeasureSampler perturbed_sampler(int N, MeasureSpec spec);

/// A probe phi with max phi = 0 and dd^c phi >= -omega_FS on P^N.
struct Probe {
  std::string name;
  std::function<double(const CVector&)> phi;  ///< on unit vectors
  CVector maximizer;                          ///< a point where phi = 0
  bool smooth = false;
};

/// Versioned probe family "probes-v1" on P^N: log(|l|/|z|) for coordinate and
/// diagonal forms, max of two such terms, half-weight logs and bumps
/// c (|<a,z>|^2/|z|^2 - 1) with c <= 1/2.
std::vector<Probe> standard_probes(int N);
inline constexpr const char* kProbeVersion = "probes-v1";

/// Spot check of membership: phi <= 0 on random points, phi(maximizer) = 0,
/// and for smooth probes the Levi form is >= -omega_FS (finite differences).
bool check_probe_membership(const Probe& probe, int N, int samples, std::uint64_t seed);

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
  long nsamples = 0;
};

struct ModerateEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  long nsamples = 0;
  double ess = 0.0;
  double tail_index = 0.0;  ///< Hill estimate from the top sqrt(n) terms
  bool divergent = false;   ///< tail index below kDivergenceTailIndex
  std::vector<double> running;  ///< self-normalized means at n/8, n/4, n/2, n
};

/// A tail index below 1 means an infinite mean; below 2 an infinite variance.
/// The flag is raised between the two so that a finite-mean integrand with
/// an infinite variance (like alpha = 1 below) is not flagged.
inline constexpr double kDivergenceTailIndex = 1.5;

/// Self-normalized estimate of int exp(-alpha phi) d sigma with delta-method
/// error. Draw i uses substream(seed, 0, i).
ModerateEstimate moderate_integral(const MeasureSampler& sampler, const std::function<double(const CVector&)>& phi,
                                   double alpha, long nsamples, std::uint64_t seed);

/// Growth of the moderate integral of the perturbed measure on P^N with the
/// shrinking exponent alpha0 (rho/4)^N, maximized over the probe family.
/// beta0_hat is fitted at the smallest N; `holds` says the remaining N stay
/// below beta0_hat * N within three standard errors.
struct GrowthFit {
  std::vector<int> N;
  std::vector<double> alpha;
  std::vector<Estimate> integral;
  double beta0_hat = 0.0;
  bool holds = false;
};

GrowthFit moderate_growth_fit(std::span<const int> Ns, const MeasureSpec& spec, double alpha0, long nsamples,
                              std::uint64_t seed);

struct CapacityEstimate {
  Estimate R;              ///< max over probes of -int phi d sigma
  std::string R_probe;
  Estimate S;              ///< max over probes of |int (phi - int phi omega^N) d sigma|
  std::vector<double> t;
  std::vector<Estimate> Delta;  ///< max over probes of sigma(phi - int phi d sigma < -t)
};

CapacityEstimate estimate_capacity_constants(const MeasureSampler& sampler, int N, std::span<const Probe> probes,
                                             std::span<const double> t_list, long nsamples, std::uint64_t seed);

/// sigma-mass of {dist(x, {l = 0}) < delta}.
Estimate hyperplane_neighborhood_mass(const MeasureSampler& sampler, const CVector& form, double delta, long nsamples,
                                      std::uint64_t seed);

/// Kolmogorov-Smirnov statistic of the sample against a continuous CDF and
/// its asymptotic p-value.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);

}  // namespace zerolab
