#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace zerolab {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// A point of P^n stored as a unit-norm representative in C^{n+1}.
///
/// The phase of the representative is arbitrary; every quantity the library
/// derives from a point (distances, |s(x)|, weights) is phase invariant.
class ProjectivePoint {
 public:
  ProjectivePoint() = default;
  /// Normalizes `coords`. Throws InvalidDimension for fewer than two
  /// coordinates or a (numerically) zero vector.
  explicit ProjectivePoint(CVector coords);
  ProjectivePoint(std::initializer_list<cplx> coords);

  int dim() const { return static_cast<int>(z_.size()) - 1; }
  const CVector& coords() const { return z_; }
  cplx operator[](int i) const { return z_[i]; }

  /// Index of the coordinate of largest modulus; the point lies in the
  /// closed polydisc chart of that coordinate.
  int dominant_chart() const;

 private:
  CVector z_;
};

/// |<a,b>| with unit representatives, in [0,1].
double overlap(const ProjectivePoint& a, const ProjectivePoint& b);

/// Equality up to phase: |<a,b>| = 1 within `tol`.
bool projectively_equal(const ProjectivePoint& a, const ProjectivePoint& b, double tol = 1e-10);

/// Chordal distance sqrt(1 - |<a,b>|^2), the sine of the Fubini-Study angle.
/// Throws DimensionMismatch.
double fs_distance(const ProjectivePoint& a, const ProjectivePoint& b);

/// Chordal distance from x to the hyperplane {l(z) = sum l_i z_i = 0}; for
/// n = 1 this is the distance to the single zero of l.
double distance_to_hyperplane(const ProjectivePoint& x, const CVector& form);

/// Haar-distributed unitary matrix.
CMatrix random_unitary(int size, std::mt19937_64& rng);

/// Unitary whose first column is conj(form)/|form|, so that l(U x) is a
/// multiple of x_0. Used to align a hyperplane with a coordinate hyperplane.
CMatrix unitary_aligning_form(const CVector& form);

ProjectivePoint apply_unitary(const CMatrix& unitary, const ProjectivePoint& x);

/// Lift of affine chart coordinates: inserts 1 at position `chart` and
/// normalizes.
ProjectivePoint lift_chart(int chart, const CVector& t);

/// Affine chart coordinates z_j / z_chart for j != chart.
CVector chart_coords(int chart, const ProjectivePoint& x);

/// Discrete probability measure approximating the normalized Fubini-Study
/// volume omega_FS^n on P^n (n = 1, 2).
///
/// Layout: P^n is cut into the n+1 closed polydiscs {|z_j| <= |z_c| for all j};
/// on each, every affine coordinate is integrated on a polar product grid
/// (Gauss-Legendre in w with r = w^2, uniform in angle). Cells are exact, so
/// the integrand only has to be smooth on each closed polydisc.
class QuadratureGrid {
 public:
  int n = 0;
  int resolution = 0;
  std::vector<ProjectivePoint> points;
  std::vector<double> weights;
  std::vector<int> charts;  ///< polydisc index of every node
  CMatrix frame;            ///< unitary applied to the reference grid
  /// Process-unique tag set by the builders; keys per-grid caches of derived
  /// data. Hand-assembled grids keep 0 and are never cached against.
  std::uint64_t id = 0;

  std::size_t size() const { return points.size(); }

  double integrate(std::span<const double> values) const;
  double integrate(const std::function<double(const ProjectivePoint&)>& f) const;
  std::vector<double> sample(const std::function<double(const ProjectivePoint&)>& f) const;
};

/// Builds the grid. `singular_forms` are the linear forms whose zero loci are
/// declared singular: the grid is rotated so the first locus sits at a polar
/// centre, and no node is closer than 1e-6 (chordally) to any locus.
/// Throws InvalidDimension (n not in {1,2}) and ResolutionTooSmall (< 8).
QuadratureGrid build_quadrature(int n, int resolution, std::span<const CVector> singular_forms = {});

inline constexpr double kGridGuardRadius = 1e-6;

std::uint64_t next_grid_id();

// Binary cache. Header: magic "ZLGRID", version, n, resolution, count.
void save_grid(const QuadratureGrid& grid, const std::filesystem::path& path);
QuadratureGrid load_grid(const std::filesystem::path& path);

/// Cache lookup keyed by (n, resolution) plus a frame key when the grid is
/// adapted to singular loci. An empty cache_dir disables caching.
QuadratureGrid cached_quadrature(const std::filesystem::path& cache_dir, int n, int resolution,
                                 std::span<const CVector> singular_forms = {});

}  // namespace zerolab
