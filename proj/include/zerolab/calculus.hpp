#pragma once

#include <functional>

#include "zerolab/projective.hpp"

namespace zerolab {

using PointFunction = std::function<double(const ProjectivePoint&)>;

inline constexpr double kFiniteDifferenceStep = 1e-4;

/// Unitary-centred affine chart at x: t -> [x + sum_a t_a e_a] with e_a an
/// orthonormal basis of x^perp. At t = 0 the Fubini-Study metric tensor of
/// the normalized form is I/2, which makes relative curvature quantities
/// read off directly.
class CenteredChart {
 public:
  explicit CenteredChart(const ProjectivePoint& x);

  int dim() const { return static_cast<int>(tangent_.cols()); }
  ProjectivePoint at(const CVector& t) const;
  /// Point displaced by `lambda` along the tangent direction `xi`.
  ProjectivePoint along(const CVector& xi, cplx lambda) const;

 private:
  CVector center_;
  CMatrix tangent_;
};

/// Levi form sum H_{ab} xi_a conj(xi_b) of f at x along xi, by the
/// five-point Laplacian in the complex line through xi (step h).
double levi_form(const PointFunction& f, const CenteredChart& chart, const CVector& xi, double f0,
                 double h = kFiniteDifferenceStep);

/// Complex Hessian (d^2 f / dt_a d conj t_b) in the centred chart at x, by
/// central differences and polarization (4 n^2 + 1 evaluations).
CMatrix complex_hessian(const PointFunction& f, const ProjectivePoint& x, double h = kFiniteDifferenceStep);

/// dd^c f / omega_FS on P^1: 2 d^2f/dt dt-bar in the centred chart.
double fs_laplacian_p1(const PointFunction& f, const ProjectivePoint& x, double h = kFiniteDifferenceStep);

/// Real gradient norm and max |Hessian entry| in the centred chart.
struct DerivativeBounds {
  double gradient = 0.0;
  double hessian = 0.0;
};
DerivativeBounds derivative_bounds(const PointFunction& f, const ProjectivePoint& x, double h = kFiniteDifferenceStep);

}  // namespace zerolab
