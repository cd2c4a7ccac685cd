#include "zerolab/testform.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>

namespace zerolab {

struct TestForm::Cache {
  std::mutex mutex;
  std::map<std::uint64_t, std::unique_ptr<GridData>> grids;
  std::optional<double> c2;
};

TestForm::TestForm(std::string name, int n, PointFunction value, bool constant)
    : name_(std::move(name)), n_(n), value_(std::move(value)), constant_(constant), cache_(std::make_shared<Cache>()) {}

double TestForm::ddc_density(const ProjectivePoint& x) const {
  if (constant_) return 0.0;
  const CenteredChart chart(x);
  const double f0 = value_(x);
  double trace = 0.0;
  for (int a = 0; a < n_; ++a) trace += levi_form(value_, chart, CVector::Unit(n_, a), f0);
  return 2.0 * trace / n_;
}

namespace {

GridData compute(const TestForm& u, const QuadratureGrid& grid) {
  GridData d;
  d.values.reserve(grid.size());
  d.ddc.reserve(grid.size());
  for (const auto& x : grid.points) {
    d.values.push_back(u(x));
    d.ddc.push_back(u.ddc_density(x));
  }
  return d;
}

}  // namespace

const GridData& TestForm::on(const QuadratureGrid& grid) const {
  std::lock_guard lock(cache_->mutex);
  // id 0 grids share one slot that is recomputed on every call.
  auto& slot = cache_->grids[grid.id];
  if (!slot || grid.id == 0) slot = std::make_unique<GridData>(compute(*this, grid));
  return *slot;
}

double TestForm::c2_norm() const {
  std::lock_guard lock(cache_->mutex);
  if (cache_->c2) return *cache_->c2;
  const QuadratureGrid probe = build_quadrature(n_, 8);
  const std::size_t stride = n_ == 1 ? 1 : 16;
  double norm = 0.0;
  for (std::size_t i = 0; i < probe.size(); i += stride) {
    const auto& x = probe.points[i];
    norm = std::max(norm, std::abs(value_(x)));
    if (constant_) continue;
    const DerivativeBounds b = derivative_bounds(value_, x);
    norm = std::max({norm, b.gradient, b.hessian});
  }
  cache_->c2 = norm;
  return norm;
}

std::string Dictionary::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  };
  mix(version);
  for (const auto& m : members) mix(std::to_string(m.n()) + ":" + m.name());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double coordinate_bump(const CVector& a, const ProjectivePoint& x) { return std::norm(a.dot(x.coords())); }

namespace {

ProjectivePoint bloch_point(double sx, double sy, double sz) {
  const double r = std::sqrt(sx * sx + sy * sy + sz * sz);
  const double theta = std::acos(sz / r), phi = std::atan2(sy, sx);
  // sphere_x = 2 Re(z0 conj z1), sphere_y = 2 Im(z0 conj z1), sphere_z = |z0|^2 - |z1|^2.
  return ProjectivePoint{std::cos(theta / 2), std::polar(std::sin(theta / 2), -phi)};
}

double sphere_x(const ProjectivePoint& x) { return 2.0 * (x[0] * std::conj(x[1])).real(); }
double sphere_y(const ProjectivePoint& x) { return 2.0 * (x[0] * std::conj(x[1])).imag(); }
double sphere_z(const ProjectivePoint& x) { return std::norm(x[0]) - std::norm(x[1]); }

PointFunction bump(const CVector& a, int power) {
  return [a, power](const ProjectivePoint& x) { return std::pow(coordinate_bump(a, x), power); };
}

CVector unit(std::initializer_list<cplx> c) {
  return ProjectivePoint(CVector(Eigen::Map<const CVector>(c.begin(), static_cast<Eigen::Index>(c.size())))).coords();
}

}  // namespace

Dictionary dictionary_v1(int n, std::span<const ProjectivePoint> focus) {
  Dictionary d;
  d.version = "v1";
  auto& m = d.members;
  m.emplace_back("one", n, [](const ProjectivePoint&) { return 1.0; }, true);
  if (n == 1) {
    m.emplace_back("sphere_x", 1, sphere_x);
    m.emplace_back("sphere_y", 1, sphere_y);
    m.emplace_back("sphere_z", 1, sphere_z);
    m.emplace_back("sphere_z_sq", 1, [](const ProjectivePoint& x) { return std::pow(sphere_z(x), 2); });
    m.emplace_back("sphere_xz", 1, [](const ProjectivePoint& x) { return sphere_x(x) * sphere_z(x); });
    const std::array<std::array<double, 3>, 4> tetra{{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}};
    for (std::size_t k = 0; k < tetra.size(); ++k) {
      const ProjectivePoint a = bloch_point(tetra[k][0], tetra[k][1], tetra[k][2]);
      m.emplace_back("tetra_bump_" + std::to_string(k), 1, bump(a.coords(), 4));
    }
  } else if (n == 2) {
    m.emplace_back("abs_z0_sq", 2, [](const ProjectivePoint& x) { return std::norm(x[0]); });
    m.emplace_back("abs_z1_sq", 2, [](const ProjectivePoint& x) { return std::norm(x[1]); });
    m.emplace_back("re_z0_z1", 2, [](const ProjectivePoint& x) { return 2.0 * (x[0] * std::conj(x[1])).real(); });
    m.emplace_back("im_z1_z2", 2, [](const ProjectivePoint& x) { return 2.0 * (x[1] * std::conj(x[2])).imag(); });
    m.emplace_back("abs_z0_4", 2, [](const ProjectivePoint& x) { return std::pow(std::norm(x[0]), 2); });
    m.emplace_back("abs_z0_z1_sq", 2, [](const ProjectivePoint& x) { return 4.0 * std::norm(x[0] * x[1]); });
    const std::array<CVector, 3> centres{unit({1.0, 1.0, 1.0}), unit({1.0, -1.0, cplx(0, 1)}),
                                         unit({1.0, cplx(0, 2), -1.0})};
    for (std::size_t k = 0; k < centres.size(); ++k)
      m.emplace_back("bump_" + std::to_string(k), 2, bump(centres[k], 4));
  }
  for (std::size_t k = 0; k < focus.size(); ++k)
    m.emplace_back("focus_bump_" + std::to_string(k), n, bump(focus[k].coords(), 8));
  return d;
}

}  // namespace zerolab
