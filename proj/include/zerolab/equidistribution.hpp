#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zerolab/bergman.hpp"
#include "zerolab/measures.hpp"
#include "zerolab/metrics.hpp"
#include "zerolab/polynomials.hpp"
#include "zerolab/testform.hpp"

namespace zerolab {

/// (1/p^m) sum mult * u(x) over the zero set. Throws IncompleteZeroSet in
/// strict mode when the multiplicities miss the Bezout total.
double zero_current_pair(const ZeroSet& zeros, const TestForm& u, int p, int m, bool strict = true);

/// <c_1(L_1,h_1) ^ ... ^ c_1(L_m,h_m), u> for m = n.
///
/// m = 1 is curvature_pair. For m = 2 on P^2 the smooth curvature forms are
/// omega (I + 2 H_k) in the centred chart and the wedge density against
/// omega^2 is (a11 b22 + a22 b11 - a12 b21 - a21 b12) / 2.
/// Throws UnsupportedSingularWedge for m = 2 with a pole, ValidationError
/// when m != n or m > 2.
double curvature_target(std::span<const MetricWeight> metrics, const TestForm& u, const QuadratureGrid& grid);

/// Pointwise density of c_1(L_1,h_1) ^ c_1(L_2,h_2) against omega^2 on P^2.
double mixed_curvature_density(const MetricWeight& h1, const MetricWeight& h2, const ProjectivePoint& x);

/// Zero set of the sections picked by a sample: P^1 uses the basis divisor,
/// P^2 the common zeros of the two sections.
ZeroSet sample_zero_set(const SectionSample& sample, std::span<const BergmanBasis> bases);

struct DiscrepancyResult {
  double value = 0.0;
  std::string argmax;  ///< dictionary member attaining the max
  bool failed = false;
  std::string failure;  ///< error code of a solver failure
  ZeroSet zeros;
};

/// max over the dictionary of |zero pairing - target| / C^2 norm, with the
/// targets precomputed per member. Solver errors (and incomplete zero sets
/// in strict mode) are returned as failures rather than thrown.
DiscrepancyResult discrepancy(const SectionSample& sample, std::span<const BergmanBasis> bases,
                              std::span<const double> targets, const Dictionary& dictionary, bool strict = true);

/// Convenience overload computing the targets on `grid`.
DiscrepancyResult discrepancy(const SectionSample& sample, std::span<const BergmanBasis> bases,
                              std::span<const MetricWeight> metrics, const Dictionary& dictionary,
                              const QuadratureGrid& grid, bool strict = true);

struct ConstantsReport {
  int p = 0;
  int m = 1;
  std::vector<int> d_kp;
  int d_0p = 0;
  double log_c0p = 0.0;
  double c0p = 1.0;
  double mass = 1.0;             ///< intersection number of the normalized classes
  double mass_quadrature = 1.0;  ///< the same mass by quadrature
  double d_p = 0.0;
  double delta_p = 0.0;
  double r_bound = 1.0;
  double R_hat = 0.0;
  std::string R_source;  ///< "measured" or "fs_bound"
  double epsilon = 0.0;
  double eta = 0.0;
  /// (c_0p)^{-d_0p} against the multinomial d_0p! / prod d_kp!, both as logs.
  double log_multinomial = 0.0;
};

/// d_p = p^m * mass, delta_p = (p^{m-1} / c_0p) sum_k (d_kp / d_0p) * mass
/// of the wedge without slot k, c_0p from the multinomial identity by
/// log-factorials, r_bound = max d_0p / d_kp, eta = eps d_p / delta_p - 3 R.
/// Without a measured R (negative `R_measured`) the FS-type bound
/// r (1 + log d_0p) / 2 is used.
ConstantsReport dinh_sibony_constants(int p, std::span<const int> d_kp, double epsilon, double R_measured = -1.0);
ConstantsReport dinh_sibony_constants(int p, std::span<const BergmanBasis> bases, std::span<const MetricWeight> metrics,
                                      double epsilon, const QuadratureGrid& grid, double R_measured = -1.0);

nlohmann::json to_json(const ConstantsReport& r);

/// lambda_p = a log p or p^b.
struct LambdaRule {
  enum class Kind { Log, Power };
  Kind kind = Kind::Log;
  double coefficient = 4.0;
  double operator()(int p) const;
};

struct ExperimentConfig {
  int n = 1;
  int m = 1;
  std::vector<int> p_list;
  std::vector<MetricWeight> metrics;  ///< one per slot
  MeasureSpec measure;
  std::string dictionary = "v1";
  long nsamples = 100;
  LambdaRule lambda_rule;
  double threshold_c = 1.0;
  std::uint64_t seed = 0;
  bool deterministic = true;
  int resolution = 24;  ///< minimum grid resolution; raised to p + 8
  bool strict = true;
  unsigned threads = 0;
  std::filesystem::path cache_dir;
  double atom_radius = 0.1;  ///< radius for the zero fraction around the first pole
};

struct ExperimentRecord {
  int p = 0;
  long nsamples = 0;
  std::vector<double> discrepancies;  ///< successful samples, in index order
  std::vector<double> weights;        ///< importance weights, same order
  double mean = 0.0;
  double median = 0.0;
  std::vector<double> quantile_levels;
  std::vector<double> quantiles;
  double lambda_p = 0.0;
  double threshold = 0.0;  ///< threshold_c * lambda_p / p
  double exceptional_fraction = 0.0;
  long failures = 0;
  std::vector<std::string> failure_codes;
  long incomplete = 0;
  /// Weighted mean fraction of zeros within atom_radius of the first pole
  /// (NaN without poles).
  double atom_fraction = 0.0;
  double atom_fraction_stderr = 0.0;
  int dimension = 0;
  double gram_condition = 1.0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

/// Weighted quantile with the lower-median convention.
double weighted_quantile(std::span<const double> values, std::span<const double> weights, double level);

/// Throws ValidationError listing every violation of the config.
void validate(const ExperimentConfig& config);

/// The bases of all slots at level p (grid resolution max(resolution, p+8)).
std::vector<BergmanBasis> bases_for(const ExperimentConfig& config, int p, const QuadratureGrid& grid);
QuadratureGrid grid_for(const ExperimentConfig& config, int p);
Dictionary dictionary_for(const ExperimentConfig& config);

/// Sample i at level p draws from substream(seed, p, i).
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config);

}  // namespace zerolab
