#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "zerolab/metrics.hpp"
#include "zerolab/polynomials.hpp"
#include "zerolab/projective.hpp"
#include "zerolab/testform.hpp"

namespace zerolab {

/// Smallest integer k with k > p*lambda - 1: |s|^2 dist^{-2 p lambda} is
/// area integrable iff 2 ord - 2 p lambda > -2. At the integer edge
/// p*lambda in Z this gives k = p*lambda.
int min_vanishing_order(int p, double lambda);

struct VanishingOrder {
  CVector form;  ///< unit linear form of the pole
  double lambda = 0.0;
  int order = 0;
};

std::vector<VanishingOrder> min_vanishing_orders(int p, const MetricWeight& h);

/// Orthonormal basis of the L^2 Bergman space of O(p) with weight h^p.
///
/// Sections are stored as D * q where D = prod l_i^{k_i} is the fixed divisor
/// forced by the poles and q ranges over degree p - sum k_i. `coefficients`
/// holds the orthonormal q's in the quotient monomial basis, one per column.
struct BergmanBasis {
  int p = 0;
  int n = 1;
  MetricWeight metric{1};
  int resolution = 0;
  std::vector<VanishingOrder> orders;      ///< every pole with its forced order
  std::vector<VanishingOrder> base_locus;  ///< poles with k_i >= 1
  HomogeneousPolynomial fixed_divisor;
  int quotient_degree = 0;
  std::vector<int> admissible;  ///< quotient monomial indices spanning the space
  CMatrix coefficients;
  double gram_condition = 1.0;

  int dimension() const { return static_cast<int>(coefficients.cols()); }
  int d_kp() const { return dimension() - 1; }

  /// q = sum c_j q_j for coefficients c in the orthonormal basis.
  HomogeneousPolynomial quotient_section(const CVector& c) const;
  /// The full section D * q of O(p).
  HomogeneousPolynomial section(const CVector& c) const;

  /// Zero divisor of sum c_j S_j on P^1: base-locus points with their forced
  /// orders plus the roots of the quotient.
  ZeroSet zeros_p1(const CVector& c) const;

  /// log(|D(x)|^2 e^{-2 p phi_g(x)}); -inf on the base locus.
  double log_divisor_weight(const ProjectivePoint& x) const;
  /// Values q_j(x) at the unit representative.
  CVector quotient_values(const ProjectivePoint& x) const;
  bool on_base_locus(const ProjectivePoint& x, double tol = 1e-14) const;
};

/// Throws IllConditionedGram (condition after diagonal scaling > 1e10 or an
/// eigenvalue below 1e-12 of the largest) and EmptySpace.
BergmanBasis build_basis(int p, const MetricWeight& h, const QuadratureGrid& grid);

/// Max |<S_i,S_j> - delta_ij| on the given grid.
double orthonormality_residual(const BergmanBasis& b, const QuadratureGrid& grid);

/// Bergman kernel sum_j |S_j(x)|^2_{h^p}; 0 on the base locus.
double bergman_kernel_at(const BergmanBasis& b, const ProjectivePoint& x);

/// <gamma_p, u> = p <c_1(L,h), u> + (1/2) int log P dd^c u ^ omega^{n-1}.
/// Throws QuadratureDivergence near the base locus.
double fs_current_pair(const BergmanBasis& b, const TestForm& u, const QuadratureGrid& grid);

/// Kodaira map [S_0(x) : ... : S_d(x)]. Throws BaseLocusPoint.
ProjectivePoint kodaira_map(const BergmanBasis& b, const ProjectivePoint& x);

/// p^n / c <= d_kp <= c p^n.
bool dimension_bounds_hold(const BergmanBasis& b, double c);

// Basis cache: magic "ZLBASIS", version, then p, n, resolution, metric hash,
// vanishing orders, condition number and the coefficient matrix.
void save_basis(const BergmanBasis& b, const std::filesystem::path& path);
/// Throws CacheError when the file does not match (p, metric, resolution).
BergmanBasis load_basis(const std::filesystem::path& path, int p, const MetricWeight& h, int resolution);
/// Build-or-load keyed by (p, metric hash, grid resolution). Empty dir
/// disables the cache.
BergmanBasis cached_basis(const std::filesystem::path& cache_dir, int p, const MetricWeight& h,
                          const QuadratureGrid& grid);

/// d_kp, dimension, gram_condition and base locus for reports.
nlohmann::json to_json(const BergmanBasis& b);

}  // namespace zerolab
