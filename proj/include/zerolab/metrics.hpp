#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "zerolab/error.hpp"
#include "zerolab/projective.hpp"
#include "zerolab/testform.hpp"

namespace zerolab {

/// lambda * log(|l(z)| / |z|) with l a unit linear form, lambda in (0, 1).
struct SingularTerm {
  CVector form;
  double lambda = 0.0;
};

/// Declared Hoelder-with-singularities constants:
/// |phi(z) - phi(w)| <= c dist(z,w)^nu / min(dist(z,A), dist(w,A))^delta.
struct HoelderParams {
  double c = 1.0;
  double nu = 1.0;
  double delta = 1.0;
};

enum class SmoothKind { Zero, Quadratic };

/// Hermitian metric on O(1) written as h_FS e^{-2 phi_g}, with
/// phi_g = smooth part + sum of log poles along hyperplanes.
///
/// The smooth part is either zero or the quadratic form z^* Q z / |z|^2 for a
/// Hermitian Q.
class MetricWeight {
 public:
  explicit MetricWeight(int n = 1);

  /// Throws DimensionMismatch, ValidationError for a non-Hermitian Q.
  MetricWeight& set_quadratic(const CMatrix& q);
  /// Normalizes the form. Throws DimensionMismatch, ValidationError unless
  /// lambda is in (0,1) and the total stays below 1.
  MetricWeight& add_singular(const CVector& form, double lambda);

  int n() const { return n_; }
  SmoothKind smooth_kind() const { return kind_; }
  const CMatrix& quadratic() const { return q_; }
  const std::vector<SingularTerm>& singular_terms() const { return terms_; }
  std::vector<CVector> singular_forms() const;
  double lambda_total() const;
  bool is_fs() const { return kind_ == SmoothKind::Zero && terms_.empty(); }

  double positivity_margin = 0.5;
  HoelderParams hoelder;

  double smooth_part(const ProjectivePoint& x) const;
  /// Chordal distance to A; 1 when there are no singular terms.
  double distance_to_singular(const ProjectivePoint& x) const;

  /// Stable hash of the defining data (dimension, smooth part, poles).
  std::uint64_t hash() const;

 private:
  int n_;
  SmoothKind kind_ = SmoothKind::Zero;
  CMatrix q_;
  std::vector<SingularTerm> terms_;
};

/// phi_g(x); exactly -infinity on A.
double weight_at(const MetricWeight& h, const ProjectivePoint& x);

/// <c_1(L,h), u> = int u omega^n + int phi_g dd^c u ^ omega^{n-1}.
/// Throws QuadratureDivergence when a node is within the guard radius of A.
double curvature_pair(const MetricWeight& h, const TestForm& u, const QuadratureGrid& grid);

/// P^1 only: (1 - sum lambda) int u omega + sum lambda u(a_i) + int phi_s dd^c u.
double curvature_pair_closed_form(const MetricWeight& h, const TestForm& u, const QuadratureGrid& grid);

struct PositivityReport {
  double epsilon_hat = 0.0;
  ProjectivePoint witness;
  bool passed = false;  ///< epsilon_hat >= declared positivity_margin
};

class NonPositiveError : public Error {
 public:
  NonPositiveError(const ProjectivePoint& witness, double epsilon_hat);
  const ProjectivePoint& witness() const { return witness_; }
  double epsilon_hat() const { return epsilon_hat_; }

 private:
  ProjectivePoint witness_;
  double epsilon_hat_;
};

/// Smallest eigenvalue over grid nodes of the absolutely continuous part of
/// c_1(L,h) relative to omega_FS, by finite differences. Throws
/// NonPositiveError (code NonPositive) when it is <= 0.
PositivityReport check_positivity(const MetricWeight& h, const QuadratureGrid& grid);

struct HoelderReport {
  bool passed = true;
  double worst_ratio = 0.0;  ///< max of lhs / rhs over all pairs
  ProjectivePoint worst_a, worst_b;
  explicit operator bool() const { return passed; }
};

/// Tests the declared constants on random pairs, half of them drawn close to
/// A. Needs samples >= 100.
HoelderReport check_hoelder(const MetricWeight& h, int samples, std::uint64_t rng_seed);

/// Returns one message per violation: poles of different slots must not
/// share a locus (proportional forms).
std::vector<std::string> general_position_violations(std::span<const MetricWeight> metrics);

}  // namespace zerolab
