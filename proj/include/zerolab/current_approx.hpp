#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zerolab/measures.hpp"
#include "zerolab/polynomials.hpp"
#include "zerolab/projective.hpp"
#include "zerolab/testform.hpp"

namespace zerolab {

enum class TargetKind { FS, Atoms, Circle, Mixture };

struct Atom {
  ProjectivePoint point;
  double weight = 0.0;
};

/// A positive closed (1,1) current of mass 1 on P^1, written as
/// fs_weight * omega_FS + sum of atoms + circle_weight * (uniform measure on
/// the circle |z_1 / z_0| = circle_radius).
struct TargetCurrent {
  double fs_weight = 0.0;
  std::vector<Atom> atoms;
  double circle_weight = 0.0;
  double circle_radius = 1.0;

  static TargetCurrent fs();
  static TargetCurrent atom(const ProjectivePoint& a);
  static TargetCurrent atom_list(std::vector<Atom> atoms);
  static TargetCurrent circle(double radius = 1.0);

  TargetKind kind() const;
  double mass() const;
  /// Throws MassMismatch unless the mass is 1 within 1e-6, ValidationError on
  /// negative weights or a non-positive radius.
  void validate() const;

  /// <T, u>; the circle average uses a 1024-point trapezoid rule.
  double pair(const TestForm& u) const;
  double pair(const PointFunction& u) const;

  /// One point drawn from T.
  ProjectivePoint draw(std::mt19937_64& rng) const;
};

std::string to_string(TargetKind kind);

/// int log(chordal dist(x, y)) d(T - omega_FS)(y), before max-normalization.
/// Closed forms: int log dist(x, .) d omega_FS = -1/2, and the circle term is
/// log max(r |x_0|, |x_1|) - log|x| - log(1 + r^2) / 2.
double raw_potential(const TargetCurrent& target, const ProjectivePoint& x);

struct Potential {
  std::vector<double> values;  ///< psi at the grid nodes, max = 0
  double offset = 0.0;         ///< psi = raw_potential - offset
  double operator()(const TargetCurrent& target, const ProjectivePoint& x) const {
    return raw_potential(target, x) - offset;
  }
};

/// psi with dd^c psi + omega_FS = T on the grid, max-normalized over the grid
/// nodes and the atoms' antipodes. Throws MassMismatch, InvalidDimension.
Potential potential_from_current(const TargetCurrent& target, const QuadratureGrid& grid);

enum class RootStrategy { Iid, Stratified };

struct ApproximationRecord {
  int p = 0;
  RootStrategy strategy = RootStrategy::Iid;
  HomogeneousPolynomial g;  ///< product of the linear factors
  std::vector<ProjectivePoint> roots;
  double l1_potential_error = 0.0;  ///< int |(1/p) log|g|_FS - psi_raw| omega_FS
  std::vector<std::string> member_names;
  std::vector<double> weak_distances;  ///< |<(1/p)[g=0] - T, u>| / C^2 norm
  double weak_distance = 0.0;          ///< max over the dictionary
  /// Circle targets: median and max chordal distance of the roots to the
  /// nearest point r e^{2 pi i k / p}, and max distance to the circle itself.
  double median_distance_to_reference = 0.0;
  double max_distance_to_circle = 0.0;
  double concentration_radius = 0.0;  ///< delta_p = p^{-2}
};

/// Chordal distance from x to the circle |z_1 / z_0| = r.
double distance_to_circle(const ProjectivePoint& x, double r);

/// Draws p roots from T, i.i.d. or stratified (largest-remainder allocation
/// across components, jittered equal-angle strata on the circle, stratified
/// |z_0|^2 with jittered angles for omega_FS), and evaluates the record on
/// `grid` against `dictionary`.
ApproximationRecord roots_from_measure(const TargetCurrent& target, int p, RootStrategy strategy, std::uint64_t seed,
                                       const QuadratureGrid& grid, const Dictionary& dictionary);

/// The section of O(p) in the FS-orthonormal monomial frame
/// sqrt((p+1)!/(j!(p-j)!)) z_0^{p-j} z_1^j, and back.
CVector fs_coordinates(const HomogeneousPolynomial& g);
HomogeneousPolynomial section_from_fs_coordinates(const CVector& c);

/// Mixture sampler on P H^0(P^1, O(p)), in FS coordinates: with probability
/// 1 - 1/p^2 a draw inside the chordal delta-ball around [g_p] (a Gaussian
/// pushed smoothly into the ball), otherwise an FS draw.
MeasureSampler concentrated_sampler(const ApproximationRecord& record, double delta);
MeasureSampler concentrated_sampler(const ApproximationRecord& record);

nlohmann::json to_json(const ApproximationRecord& r);

}  // namespace zerolab
