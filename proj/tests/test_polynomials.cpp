#include <doctest.h>

#include <cmath>
#include <random>

#include "zerolab/error.hpp"
#include "zerolab/polynomials.hpp"

using namespace zerolab;

namespace {

HomogeneousPolynomial poly1(std::initializer_list<cplx> c) {
  CVector v(static_cast<Eigen::Index>(c.size()));
  int i = 0;
  for (cplx x : c) v[i++] = x;
  return HomogeneousPolynomial(1, static_cast<int>(c.size()) - 1, v);
}

HomogeneousPolynomial random_poly(int n, int p, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector c(monomial_count(n, p));
  for (int i = 0; i < c.size(); ++i) c[i] = cplx(g(rng), g(rng));
  return HomogeneousPolynomial(n, p, c);
}

bool has_point(const ZeroSet& zs, const ProjectivePoint& x, int mult, double tol = 1e-8) {
  for (const auto& wp : zs.points)
    if (fs_distance(wp.point, x) < tol && wp.multiplicity == mult) return true;
  return false;
}

double max_residual(const HomogeneousPolynomial& f, const ZeroSet& zs) {
  double r = 0.0;
  for (const auto& wp : zs.points) r = std::max(r, std::abs(evaluate(f, wp.point)) / f.coeff_norm());
  return r;
}

}  // namespace

TEST_SUITE("polynomials") {
  TEST_CASE("monomial order and counts") {
    CHECK(monomial_count(1, 5) == 6);
    CHECK(monomial_count(2, 4) == 15);
    const auto& m = monomials(2, 2);
    CHECK(m[0] == Exponents{2, 0, 0});
    CHECK(m[1] == Exponents{1, 1, 0});
    CHECK(m[2] == Exponents{1, 0, 1});
    CHECK(m[3] == Exponents{0, 2, 0});
    for (int p : {1, 3, 6})
      for (int n : {1, 2}) {
        const auto& mons = monomials(n, p);
        for (std::size_t i = 0; i < mons.size(); ++i) CHECK(monomial_index(n, p, mons[i]) == static_cast<int>(i));
      }
    CHECK_THROWS_AS(HomogeneousPolynomial(1, 2, CVector::Ones(2)), Error);
    CHECK_THROWS_AS(HomogeneousPolynomial(1, 2, CVector::Zero(3)), Error);
  }

  TEST_CASE("evaluation examples") {
    auto f = poly1({0.0, 1.0, 0.0});  // z0 z1
    CHECK(std::abs(evaluate(f, ProjectivePoint{1.0, 1.0}) - 0.5) < 1e-15);
    CHECK(std::abs(evaluate(f, ProjectivePoint{1.0, 0.0})) == 0.0);
    auto g = poly1({1.0, 0.0, 1.0});  // z0^2 + z1^2
    CHECK(std::abs(evaluate(g, ProjectivePoint{1.0, cplx(0, 1)})) < 1e-15);
    CHECK_THROWS_AS(evaluate(g, ProjectivePoint{1.0, 0.0, 0.0}), Error);
  }

  TEST_CASE("gradient matches finite differences and Euler identity") {
    std::mt19937_64 rng(3);
    auto f = random_poly(2, 4, rng);
    CVector z(3);
    z << cplx(0.3, 0.1), cplx(-0.5, 0.7), cplx(0.2, -0.4);
    const CVector g = gradient(f, z);
    CHECK(std::abs(cplx(g.transpose() * z) - 4.0 * evaluate_raw(f, z)) < 1e-12);  // sum z_i df/dz_i = p f
    for (int i = 0; i < 3; ++i) {
      CVector zp = z, zm = z;
      zp[i] += 1e-6;
      zm[i] -= 1e-6;
      CHECK(std::abs((evaluate_raw(f, zp) - evaluate_raw(f, zm)) / 2e-6 - g[i]) < 1e-6);
    }
  }

  TEST_CASE("composition and products") {
    std::mt19937_64 rng(5);
    auto f = random_poly(2, 3, rng);
    auto h = random_poly(2, 2, rng);
    const CMatrix u = random_unitary(3, rng);
    const auto fu = compose(f, u);
    const auto fh = f * h;
    CVector z(3);
    z << 0.2, cplx(0.1, 0.9), -0.4;
    CHECK(std::abs(evaluate_raw(fu, z) - evaluate_raw(f, CVector(u * z))) < 1e-12);
    CHECK(std::abs(evaluate_raw(fh, z) - evaluate_raw(f, z) * evaluate_raw(h, z)) < 1e-12);
    nlohmann::json j = f;
    auto back = j.get<HomogeneousPolynomial>();
    CHECK(back.coeffs() == f.coeffs());
    CHECK(back.degree() == 3);
  }

  TEST_CASE("roots_p1 examples") {
    auto a = roots_p1(poly1({0.0, 1.0, 0.0}));
    CHECK(a.points.size() == 2);
    CHECK(has_point(a, ProjectivePoint{1.0, 0.0}, 1));
    CHECK(has_point(a, ProjectivePoint{0.0, 1.0}, 1));

    auto b = roots_p1(poly1({1.0, -2.0, 1.0}));  // (z1 - z0)^2
    REQUIRE(b.points.size() == 1);
    CHECK(has_point(b, ProjectivePoint{1.0, 1.0}, 2));

    auto c = roots_p1(poly1({1.0, 0.0, 0.0, 0.0}));  // z0^3
    REQUIRE(c.points.size() == 1);
    CHECK(has_point(c, ProjectivePoint{0.0, 1.0}, 3));

    CHECK_THROWS_AS(roots_p1(HomogeneousPolynomial::zero(1, 3)), Error);
  }

  TEST_CASE("roots_p1 recovers products of linear factors with multiplicity") {
    std::vector<ProjectivePoint> roots{ProjectivePoint{1.0, cplx(0.3, 0.4)}, ProjectivePoint{1.0, cplx(0.3, 0.4)},
                                       ProjectivePoint{1.0, cplx(0.3, 0.4)}, ProjectivePoint{cplx(0.2, 0.1), 1.0},
                                       ProjectivePoint{1.0, 2.0}};
    auto zs = roots_p1(from_roots_p1(roots));
    CHECK(zs.total_multiplicity() == 5);
    CHECK(has_point(zs, roots[0], 3, 1e-4));
    CHECK(has_point(zs, roots[3], 1));
    CHECK(has_point(zs, roots[4], 1));
  }

  TEST_CASE("Bezout count, residual and equivariance on P1") {
    std::mt19937_64 rng(17);
    int failures = 0;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      auto f = random_poly(1, 1 + k % 8, rng);
      auto zs = roots_p1(f);
      if (!zs.complete()) ++failures;
      worst = std::max(worst, max_residual(f, zs));
    }
    CHECK(failures == 0);
    CHECK(worst <= 1e-8);

    auto f = random_poly(1, 12, rng);
    const CMatrix u = random_unitary(2, rng);
    // g(z) = f(U^-1 z) has roots U(roots of f).
    auto g = compose(f, CMatrix(u.adjoint()));
    auto rf = roots_p1(f), rg = roots_p1(g);
    for (const auto& wp : rf.points) CHECK(has_point(rg, apply_unitary(u, wp.point), wp.multiplicity));
  }

  TEST_CASE("common zeros on P2: examples") {
    auto lin = [](cplx a, cplx b, cplx c) {
      CVector v(3);
      v << a, b, c;
      return HomogeneousPolynomial::linear(v);
    };
    auto zs = common_zeros_p2(lin(1, 0, 0), lin(0, 1, 0));
    REQUIRE(zs.points.size() == 1);
    CHECK(has_point(zs, ProjectivePoint{0.0, 0.0, 1.0}, 1));

    auto f = lin(1, 0, 0) * lin(0, 1, 0);
    auto g = lin(1, 0, -1) * lin(0, 1, -1);
    auto z4 = common_zeros_p2(f, g);
    CHECK(z4.total_multiplicity() == 4);
    CHECK(has_point(z4, ProjectivePoint{0.0, 1.0, 0.0}, 1));
    CHECK(has_point(z4, ProjectivePoint{0.0, 1.0, 1.0}, 1));
    CHECK(has_point(z4, ProjectivePoint{1.0, 0.0, 1.0}, 1));
    CHECK(has_point(z4, ProjectivePoint{1.0, 0.0, 0.0}, 1));

    try {
      common_zeros_p2(lin(1, 0, 0) * lin(1, 0, 0), lin(1, 0, 0) * lin(0, 1, 0));
      FAIL("expected SharedFactor");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SharedFactor);
    }
  }

  TEST_CASE("common zeros on P2: tangency gives a double point") {
    // The line z0 = 0 is tangent to the conic z0 z2 = z1^2 at [0:0:1].
    CVector c(6);
    c << 0, 0, 1, -1, 0, 0;  // z0 z2 - z1^2
    HomogeneousPolynomial conic(2, 2, c);
    CVector l1(3), l2(3);
    l1 << 1, 0, 0;
    l2 << 0.3, 0.5, 0.7;
    auto zs = common_zeros_p2(conic, HomogeneousPolynomial::linear(l1) * HomogeneousPolynomial::linear(l2));
    CHECK(zs.total_multiplicity() == 4);
    CHECK(has_point(zs, ProjectivePoint{0.0, 0.0, 1.0}, 2, 1e-4));
  }

  TEST_CASE("Bezout count on P2 for random pairs up to degree 8") {
    std::mt19937_64 rng(23);
    for (int p = 1; p <= 8; ++p) {
      const int trials = p <= 4 ? 200 : 20;
      int failures = 0;
      double worst = 0.0;
      for (int k = 0; k < trials; ++k) {
        auto f = random_poly(2, p, rng), g = random_poly(2, p, rng);
        try {
          auto zs = common_zeros_p2(f, g);
          if (zs.total_multiplicity() != p * p) ++failures;
          worst = std::max({worst, max_residual(f, zs), max_residual(g, zs)});
        } catch (const Error&) {
          ++failures;
        }
      }
      INFO("p = " << p);
      CHECK(failures == 0);
      CHECK(worst <= 1e-8);
    }
  }

  TEST_CASE("common zeros are equivariant") {
    std::mt19937_64 rng(29);
    auto f = random_poly(2, 3, rng), g = random_poly(2, 3, rng);
    const CMatrix u = random_unitary(3, rng);
    const CMatrix uinv = u.adjoint();
    auto a = common_zeros_p2(f, g);
    auto b = common_zeros_p2(compose(f, uinv), compose(g, uinv));
    for (const auto& wp : a.points) CHECK(has_point(b, apply_unitary(u, wp.point), 1));
  }
}
