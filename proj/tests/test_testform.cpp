#include <doctest.h>

#include <cmath>
#include <random>

#include "zerolab/testform.hpp"

using namespace zerolab;

TEST_SUITE("testform") {
  TEST_CASE("curvature density of coordinate bumps") {
    // For u = |<a,z>|^2/|z|^2 the centred-chart Hessian is b b^* - |<a,x>|^2 I,
    // so dd^c u ^ omega^{n-1} / omega^n = (2/n)(1 - (n+1) u).
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (int n : {1, 2}) {
      CVector a(n + 1);
      for (int i = 0; i <= n; ++i) a[i] = cplx(g(rng), g(rng));
      a.normalize();
      TestForm u("bump", n, [a](const ProjectivePoint& x) { return coordinate_bump(a, x); });
      for (int k = 0; k < 20; ++k) {
        CVector z(n + 1);
        for (int i = 0; i <= n; ++i) z[i] = cplx(g(rng), g(rng));
        const ProjectivePoint x(z);
        const double expected = 2.0 / n * (1.0 - (n + 1) * coordinate_bump(a, x));
        CHECK(std::abs(u.ddc_density(x) - expected) < 1e-6);
      }
    }
  }

  TEST_CASE("dd^c integrates to zero and is symmetric") {
    auto grid = build_quadrature(1, 24);
    const auto dict = dictionary_v1(1);
    for (const auto& u : dict.members) {
      const auto& du = u.on(grid);
      CHECK(std::abs(grid.integrate(du.ddc)) < 1e-6);
      for (const auto& v : dict.members) {
        const auto& dv = v.on(grid);
        double uv = 0, vu = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          uv += grid.weights[i] * du.values[i] * dv.ddc[i];
          vu += grid.weights[i] * dv.values[i] * du.ddc[i];
        }
        CHECK(std::abs(uv - vu) < 1e-3);
      }
    }
  }

  TEST_CASE("dictionary v1 shape and norms") {
    auto d1 = dictionary_v1(1);
    auto d2 = dictionary_v1(2);
    CHECK(d1.members.size() == 10);
    CHECK(d2.members.size() == 10);
    CHECK(d1.hash() == dictionary_v1(1).hash());
    CHECK(d1.hash() != d2.hash());
    std::vector<ProjectivePoint> focus{ProjectivePoint{0.0, 1.0}};
    auto df = dictionary_v1(1, focus);
    CHECK(df.members.size() == 11);
    CHECK(df.members.back()(focus[0]) == doctest::Approx(1.0));
    auto grid = build_quadrature(1, 16);
    for (const auto& u : df.members) {
      double mx = 0;
      for (const auto& x : grid.points) mx = std::max(mx, std::abs(u(x)));
      CHECK(u.c2_norm() >= mx - 1e-12);
      CHECK(u.c2_norm() > 0.0);
    }
  }

  TEST_CASE("grid data is cached per grid") {
    auto g1 = build_quadrature(1, 8), g2 = build_quadrature(1, 8);
    auto d = dictionary_v1(1);
    const auto& a = d.members[3].on(g1);
    const auto& b = d.members[3].on(g1);
    CHECK(&a == &b);
    CHECK(&d.members[3].on(g2) != &a);
  }
}
