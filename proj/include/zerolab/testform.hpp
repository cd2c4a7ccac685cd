#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "zerolab/calculus.hpp"
#include "zerolab/projective.hpp"

namespace zerolab {

/// Values of a test function and of its curvature density on one grid.
struct GridData {
  std::vector<double> values;
  std::vector<double> ddc;  ///< dd^c u ^ omega^{n-1} / omega^n at every node
};

/// A smooth real test function on P^n with cached derived data.
///
/// Copies share the cache. The curvature density is computed by finite
/// differences in the centred chart: on P^1 it is 2 u_{t tbar}, on P^2 the
/// trace of the complex Hessian.
class TestForm {
 public:
  TestForm(std::string name, int n, PointFunction value, bool constant = false);

  const std::string& name() const { return name_; }
  int n() const { return n_; }
  bool is_constant() const { return constant_; }
  double operator()(const ProjectivePoint& x) const { return value_(x); }
  const PointFunction& function() const { return value_; }

  double ddc_density(const ProjectivePoint& x) const;

  /// Cached for grids with a nonzero id.
  const GridData& on(const QuadratureGrid& grid) const;

  /// max over a fixed probe grid of |u|, |grad u| and the largest Hessian
  /// entry, in centred-chart coordinates. Never below max |u| sampled.
  double c2_norm() const;

 private:
  struct Cache;
  std::string name_;
  int n_;
  PointFunction value_;
  bool constant_;
  std::shared_ptr<Cache> cache_;
};

/// A fixed, versioned list of test forms.
struct Dictionary {
  std::string version;
  std::vector<TestForm> members;

  /// Content hash over version, dimension and member names (hex).
  std::string hash() const;
};

/// |<a,z>|^2 / |z|^2 for a unit vector a.
double coordinate_bump(const CVector& a, const ProjectivePoint& x);

/// Dictionary "v1". On P^1: the constant, the three sphere coordinates, two
/// quadratics in them and four bumps at the vertices of a tetrahedron; each
/// `focus` point adds a bump |<a,z>|^16 centred there. On P^2: the constant,
/// coordinate moduli, cross terms, a square and three localized bumps.
Dictionary dictionary_v1(int n, std::span<const ProjectivePoint> focus = {});

}  // namespace zerolab
