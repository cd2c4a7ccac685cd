#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "zerolab/current_approx.hpp"
#include "zerolab/error.hpp"

using namespace zerolab;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// <dd^c psi, u> = int psi dd^c u, against <T - omega_FS, u>.
void check_potential_consistency(const TargetCurrent& t, const QuadratureGrid& grid) {
  const Potential psi = potential_from_current(t, grid);
  const Dictionary dict = dictionary_v1(1);
  int checked = 0;
  for (const auto& u : dict.members) {
    if (u.is_constant()) continue;
    const GridData& d = u.on(grid);
    long double lhs = 0.0L;
    for (std::size_t i = 0; i < grid.size(); ++i) lhs += grid.weights[i] * psi.values[i] * d.ddc[i];
    const double rhs = t.pair(u) - grid.integrate(u.function());
    INFO(u.name() << " kind " << to_string(t.kind()));
    CHECK(std::abs(static_cast<double>(lhs) - rhs) < 1e-2);
    if (++checked == 5) break;
  }
}

}  // namespace

TEST_SUITE("current_approx") {
  TEST_CASE("target currents") {
    CHECK(TargetCurrent::fs().kind() == TargetKind::FS);
    CHECK(TargetCurrent::circle().kind() == TargetKind::Circle);
    CHECK(TargetCurrent::atom(ProjectivePoint{1.0, 0.0}).kind() == TargetKind::Atoms);
    TargetCurrent mix;
    mix.fs_weight = 0.5;
    mix.circle_weight = 0.3;
    mix.atoms = {{ProjectivePoint{1.0, 2.0}, 0.2}};
    CHECK(mix.kind() == TargetKind::Mixture);
    CHECK_NOTHROW(mix.validate());
    mix.fs_weight = 0.6;
    try {
      mix.validate();
      FAIL("expected MassMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MassMismatch);
    }
  }

  TEST_CASE("potential of omega_FS vanishes") {
    const auto grid = build_quadrature(1, 16);
    const auto psi = potential_from_current(TargetCurrent::fs(), grid);
    for (double v : psi.values) CHECK(std::abs(v) < 1e-15);
  }

  TEST_CASE("potential of a point mass") {
    const ProjectivePoint a{1.0, 0.0};
    const std::vector<CVector> forms{CVector::Unit(2, 1)};
    const auto grid = build_quadrature(1, 48, forms);
    const auto t = TargetCurrent::atom(a);
    const auto psi = potential_from_current(t, grid);
    for (std::size_t i = 0; i < grid.size(); i += 37)
      CHECK(psi.values[i] == doctest::Approx(std::log(fs_distance(grid.points[i], a))).epsilon(1e-12));
    check_potential_consistency(t, grid);
  }

  TEST_CASE("circle potential matches its radial closed form") {
    for (double r : {1.0, 0.5, 2.0}) {
      const auto t = TargetCurrent::circle(r);
      std::mt19937_64 rng(4);
      for (int k = 0; k < 10; ++k) {
        const ProjectivePoint x(sample_fs_section(1, rng));
        // Direct superposition of log dist over the circle.
        long double avg = 0.0L;
        const int nodes = 1 << 14;
        for (int j = 0; j < nodes; ++j)
          avg += std::log(fs_distance(x, ProjectivePoint{1.0, std::polar(r, 2.0 * std::numbers::pi * (j + 0.5) / nodes)}));
        CHECK(raw_potential(t, x) == doctest::Approx(static_cast<double>(avg / nodes) + 0.5).epsilon(1e-6));
      }
      // Constant inside and outside in the radial variable, up to log|t|.
      const ProjectivePoint inner{1.0, 0.1 * r}, inner2{1.0, std::polar(0.3 * r, 1.0)};
      CHECK(raw_potential(t, inner) + 0.5 * std::log1p(0.01 * r * r) ==
            doctest::Approx(raw_potential(t, inner2) + 0.5 * std::log1p(0.09 * r * r)));
    }
    check_potential_consistency(TargetCurrent::circle(), build_quadrature(1, 64));
  }

  TEST_CASE("mixture potential consistency") {
    TargetCurrent mix;
    mix.fs_weight = 0.4;
    mix.circle_weight = 0.35;
    mix.circle_radius = 0.7;
    const ProjectivePoint a{1.0, cplx(-1.0, 0.5)};
    mix.atoms = {{a, 0.25}};
    CVector form(2);
    form << a[1], -a[0];
    check_potential_consistency(mix, build_quadrature(1, 64, std::vector<CVector>{form}));
  }

  TEST_CASE("point mass target gives the point exactly") {
    const ProjectivePoint a{cplx(0.6, 0.1), 0.8};
    const auto grid = build_quadrature(1, 24);
    const auto rec = roots_from_measure(TargetCurrent::atom(a), 12, RootStrategy::Iid, 1, grid, dictionary_v1(1));
    REQUIRE(rec.roots.size() == 12);
    for (const auto& r : rec.roots) CHECK(projectively_equal(r, a));
    CHECK(rec.weak_distance < 1e-12);
    CHECK(rec.l1_potential_error < 1e-12);
    const auto zs = roots_p1(rec.g);
    CHECK(zs.total_multiplicity() == 12);
  }

  TEST_CASE("stratified circle roots approach the roots of unity") {
    const auto grid = build_quadrature(1, 32);
    const auto dict = dictionary_v1(1);
    std::vector<double> med;
    std::vector<double> weak;
    for (int p : {10, 20, 40}) {
      std::vector<double> pooled, w;
      for (int trial = 0; trial < 40; ++trial) {
        const auto rec = roots_from_measure(TargetCurrent::circle(), p, RootStrategy::Stratified, 100 + trial, grid, dict);
        CHECK(rec.roots.size() == static_cast<std::size_t>(p));
        CHECK(rec.max_distance_to_circle <= 1e-12);
        pooled.push_back(rec.median_distance_to_reference);
        w.push_back(rec.weak_distance);
      }
      med.push_back(median(pooled));
      weak.push_back(median(w));
    }
    for (int k = 1; k < 3; ++k) {
      CHECK(med[k] / med[k - 1] == doctest::Approx(0.5).epsilon(0.3));
      CHECK(weak[k] <= weak[k - 1]);
    }
    // Roots of g recomputed by the solver stay on the circle.
    const auto rec = roots_from_measure(TargetCurrent::circle(), 20, RootStrategy::Stratified, 7, grid, dict);
    const auto zs = roots_p1(rec.g);
    CHECK(zs.complete());
    for (const auto& z : zs.points) CHECK(distance_to_circle(z.point, 1.0) < 1e-9);
  }

  TEST_CASE("FS target: empirical potentials converge") {
    const auto grid = build_quadrature(1, 32);
    const auto dict = dictionary_v1(1);
    std::vector<double> e10, e40;
    for (int trial = 0; trial < 50; ++trial) {
      e10.push_back(roots_from_measure(TargetCurrent::fs(), 10, RootStrategy::Iid, trial, grid, dict).l1_potential_error);
      e40.push_back(roots_from_measure(TargetCurrent::fs(), 40, RootStrategy::Iid, trial, grid, dict).l1_potential_error);
    }
    CHECK(median(e40) < median(e10));
  }

  TEST_CASE("weak convergence for every target kind") {
    const auto grid = build_quadrature(1, 32);
    const auto dict = dictionary_v1(1);
    TargetCurrent mix;
    mix.fs_weight = 0.5;
    mix.circle_weight = 0.25;
    mix.atoms = {{ProjectivePoint{1.0, 0.5}, 0.25}};
    TargetCurrent two_atoms = TargetCurrent::atom_list({{ProjectivePoint{1.0, 0.0}, 0.5}, {ProjectivePoint{0.0, 1.0}, 0.5}});
    for (const auto& t : {TargetCurrent::fs(), TargetCurrent::circle(2.0), two_atoms, mix}) {
      double previous = 1e9;
      for (int p : {10, 20, 40}) {
        std::vector<double> w;
        for (int trial = 0; trial < 30; ++trial)
          w.push_back(roots_from_measure(t, p, RootStrategy::Stratified, trial, grid, dict).weak_distance);
        const double m = median(w);
        INFO(to_string(t.kind()) << " p " << p << " median " << m);
        CHECK(m <= previous + 1e-12);
        previous = m;
      }
    }
  }

  TEST_CASE("FS coordinates round trip") {
    std::mt19937_64 rng(8);
    const CVector c = sample_fs_section(6, rng);
    const auto g = section_from_fs_coordinates(c);
    CHECK((fs_coordinates(g) - c).norm() < 1e-13);
  }

  TEST_CASE("concentrated sampler") {
    const auto grid = build_quadrature(1, 24);
    const auto dict = dictionary_v1(1);
    for (int p : {4, 10, 20}) {
      const auto rec = roots_from_measure(TargetCurrent::circle(), p, RootStrategy::Stratified, 3, grid, dict);
      const auto sampler = concentrated_sampler(rec);
      const CVector centre = fs_coordinates(rec.g).normalized();
      const ProjectivePoint c(centre);
      std::mt19937_64 rng(p);
      const int n = 20000;
      int outside = 0;
      for (int i = 0; i < n; ++i) {
        const auto d = sampler(rng);
        CHECK(d.weight == 1.0);
        if (fs_distance(ProjectivePoint(d.v), c) >= rec.concentration_radius) ++outside;
      }
      const double q = 1.0 / (p * p);
      const double freq = static_cast<double>(outside) / n;
      CHECK(freq <= q + 3.0 * std::sqrt(q * (1 - q) / n));
      CHECK(freq >= q - 4.0 * std::sqrt(q * (1 - q) / n));
    }
  }

  TEST_CASE("zeros of concentrated draws stay close to the target zeros") {
    const auto grid = build_quadrature(1, 24);
    const auto dict = dictionary_v1(1);
    const int p = 10;
    const auto rec = roots_from_measure(TargetCurrent::circle(), p, RootStrategy::Stratified, 5, grid, dict);
    const auto sampler = concentrated_sampler(rec);
    std::mt19937_64 rng(2);
    int close = 0, total = 0;
    for (int i = 0; i < 200; ++i) {
      const auto d = sampler(rng);
      const auto zs = roots_p1(section_from_fs_coordinates(d.v));
      double worst = 0.0;
      for (const auto& u : dict.members) {
        double s = 0.0, s0 = 0.0;
        for (const auto& z : zs.points) s += z.multiplicity * u(z.point);
        for (const auto& r : rec.roots) s0 += u(r);
        worst = std::max(worst, std::abs(s - s0) / p / u.c2_norm());
      }
      ++total;
      if (worst < 0.02) ++close;
    }
    CHECK(close >= total - 8);
  }
}
