#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "zerolab/projective.hpp"

namespace zerolab {

using Exponents = std::array<int, 3>;

/// Number of monomials of degree p in n+1 variables, binomial(n+p, n).
int monomial_count(int n, int p);

/// Exponent vectors of degree-p monomials in graded-lexicographic order:
/// z_0^p first, then z_0^{p-1} z_1, z_0^{p-1} z_2, ... Unused trailing
/// exponents are zero (n = 1 uses the first two slots).
const std::vector<Exponents>& monomials(int n, int p);

int monomial_index(int n, int p, const Exponents& e);

/// Values of all degree-p monomials at z (no normalization applied).
CVector monomial_values(int n, int p, const CVector& z);

/// A section of O(p) on P^n (n = 1, 2) in the monomial basis.
class HomogeneousPolynomial {
 public:
  HomogeneousPolynomial() = default;
  /// Throws DimensionMismatch unless coeffs.size() == binomial(n+p, n).
  HomogeneousPolynomial(int n, int degree, CVector coeffs, bool allow_zero = false);

  static HomogeneousPolynomial zero(int n, int degree);
  static HomogeneousPolynomial linear(const CVector& form);

  int n() const { return n_; }
  int degree() const { return degree_; }
  const CVector& coeffs() const { return coeffs_; }
  double coeff_norm() const { return coeffs_.norm(); }
  bool is_zero() const { return coeffs_.cwiseAbs().maxCoeff() == 0.0; }

  cplx coeff(const Exponents& e) const { return coeffs_[monomial_index(n_, degree_, e)]; }

 private:
  int n_ = 1;
  int degree_ = 0;
  CVector coeffs_;
};

HomogeneousPolynomial operator*(const HomogeneousPolynomial& f, const HomogeneousPolynomial& g);
HomogeneousPolynomial operator+(const HomogeneousPolynomial& f, const HomogeneousPolynomial& g);
HomogeneousPolynomial operator*(cplx s, const HomogeneousPolynomial& f);

/// f(z) for an arbitrary (non-normalized) coordinate vector.
cplx evaluate_raw(const HomogeneousPolynomial& f, const CVector& z);
/// Value at the unit-norm representative; |evaluate| is projectively
/// well defined. Throws DimensionMismatch.
cplx evaluate(const HomogeneousPolynomial& f, const ProjectivePoint& x);
/// Holomorphic gradient df/dz_i at z.
CVector gradient(const HomogeneousPolynomial& f, const CVector& z);

/// g(z) = f(U z).
HomogeneousPolynomial compose(const HomogeneousPolynomial& f, const CMatrix& unitary);

/// Product of the linear forms vanishing at the given points of P^1
/// (form b z_0 - a z_1 for the point [a : b]).
HomogeneousPolynomial from_roots_p1(std::span<const ProjectivePoint> roots);

struct WeightedPoint {
  ProjectivePoint point;
  int multiplicity = 1;
};

/// Zero divisor: distinct points with multiplicities and the Bezout number
/// the defining system should reach.
struct ZeroSet {
  std::vector<WeightedPoint> points;
  int expected_total = 0;

  int total_multiplicity() const;
  bool complete() const { return total_multiplicity() == expected_total; }
};

inline constexpr double kClusterTolerance = 1e-8;

/// Zeros of a binary form: companion-matrix eigenvalues in the chart
/// z_0 != 0, leading-coefficient deficiency at [0:1], Newton polishing in the
/// better-conditioned chart, clustering at chordal distance 1e-8 with
/// multiplicities verified by vanishing Taylor coefficients.
/// Throws ZeroPolynomial and InvalidDimension (n != 1).
ZeroSet roots_p1(const HomogeneousPolynomial& f);

/// Common zeros of two degree-p forms on P^2 by Sylvester resultant
/// elimination in a randomly rotated frame, back-substitution and projective
/// Newton polishing to residual <= tol (relative to coefficient norms).
/// Throws SharedFactor when the resultant vanishes identically and
/// NewtonDivergence when a zero cannot be polished after all retries.
ZeroSet common_zeros_p2(const HomogeneousPolynomial& f, const HomogeneousPolynomial& g, double tol = 1e-10,
                        std::uint64_t rotation_seed = 0x5eed);

void to_json(nlohmann::json& j, const HomogeneousPolynomial& f);
void from_json(const nlohmann::json& j, HomogeneousPolynomial& f);

}  // namespace zerolab
