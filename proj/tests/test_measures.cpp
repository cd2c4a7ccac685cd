#include <doctest.h>

#include <cmath>

#include "zerolab/error.hpp"
#include "zerolab/measures.hpp"

using namespace zerolab;

TEST_SUITE("measures") {
  TEST_CASE("FS sections are unit vectors with uniform second moments") {
    std::mt19937_64 rng(11);
    for (int d : {1, 3, 6}) {
      double m0 = 0.0;
      const int n = 20000;
      for (int i = 0; i < n; ++i) {
        const CVector v = sample_fs_section(d, rng);
        CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-14));
        m0 += std::norm(v[0]);
      }
      CHECK(m0 / n == doctest::Approx(1.0 / (d + 1)).epsilon(0.03));
    }
  }

  TEST_CASE("overlap with a fixed form has the FS law, in any rotated frame") {
    std::mt19937_64 rng(5);
    for (int d : {1, 2, 4}) {
      const CMatrix U = random_unitary(d + 1, rng);
      const CVector e = U.col(0);
      std::vector<double> s;
      for (int i = 0; i < 4000; ++i) s.push_back(std::abs(e.dot(sample_fs_section(d, rng))));
      const auto ks = ks_test(s, [d](double x) { return 1.0 - std::pow(1.0 - x * x, d); });
      CHECK(ks.p_value > 1e-3);
    }
  }

  TEST_CASE("ks test rejects a wrong law") {
    std::mt19937_64 rng(2);
    std::vector<double> s;
    for (int i = 0; i < 4000; ++i) s.push_back(std::abs(sample_fs_section(2, rng)[0]));
    CHECK(ks_test(s, [](double x) { return x; }).p_value < 1e-6);
  }

  TEST_CASE("standard perturbation weight matches its closed form on P1") {
    MeasureSpec spec;
    spec.mode = MeasureMode::Perturbed;
    spec.c_p = 0.4;
    std::mt19937_64 rng(9);
    for (int i = 0; i < 50; ++i) {
      const CVector v = sample_fs_section(1, rng);
      CHECK(perturbation_weight(spec, v) == doctest::Approx(1.0 + 0.4 * (1.0 - 2.0 * std::norm(v[0]))).epsilon(1e-6));
    }
  }

  TEST_CASE("perturbation weights stay in their band and average to one") {
    for (int N : {1, 2, 3}) {
      MeasureSpec spec;
      spec.mode = MeasureMode::Perturbed;
      spec.c_p = 0.3;
      spec.bump_index = N;
      const auto sampler = perturbed_sampler(N, spec);
      std::mt19937_64 rng(100 + N);
      double sum = 0.0;
      std::vector<double> ws;
      for (int i = 0; i < 6000; ++i) {
        const double w = sampler(rng).weight;
        CHECK(w >= std::pow(0.7, N) - 1e-6);
        CHECK(w <= std::pow(1.3, N) + 1e-6);
        sum += w;
        ws.push_back(w);
      }
      CHECK(sum / ws.size() == doctest::Approx(1.0).epsilon(0.02));
      const double ess = effective_sample_size(ws);
      CHECK(ess > 0.8 * ws.size());
      CHECK(ess <= ws.size() + 1e-9);
    }
  }

  TEST_CASE("overly strong perturbation is rejected") {
    MeasureSpec spec;
    spec.mode = MeasureMode::Perturbed;
    spec.perturbation = [](const ProjectivePoint& x) { return 2.0 * std::norm(x[0]); };
    // 1 + 4 (1 - 2|v0|^2) < 0 near v0 = 1.
    CHECK_THROWS_AS(perturbation_weight(spec, CVector::Unit(2, 0)), Error);
    try {
      perturbation_weight(spec, CVector::Unit(2, 0));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonPositiveDensity);
    }
  }

  TEST_CASE("sigma_p product weights") {
    MeasureSpec spec;
    spec.mode = MeasureMode::Perturbed;
    spec.c_p = 0.2;
    std::mt19937_64 rng(3);
    const std::vector<int> dims{2, 3, 4};
    const auto s = sample_sigma_p(dims, spec, rng);
    REQUIRE(s.tuple.size() == 3);
    CHECK(s.tuple[2].size() == 4);
    CHECK(std::log(s.importance_weight) == doctest::Approx(s.log_density_diag));
    spec.mode = MeasureMode::FS;
    CHECK(sample_sigma_p(dims, spec, rng).importance_weight == 1.0);
  }

  TEST_CASE("probe family membership") {
    for (int N : {1, 2, 3}) {
      for (const auto& probe : standard_probes(N)) {
        INFO(probe.name);
        CHECK(check_probe_membership(probe, N, 200, 17));
      }
    }
    Probe bad{"too_convex", [](const CVector& z) { return 3.0 * (std::norm(z[0]) - 1.0); }, CVector::Unit(2, 0), true};
    CHECK_FALSE(check_probe_membership(bad, 1, 200, 17));
  }

  TEST_CASE("moderate integral of log|z0| under FS on P1") {
    const auto phi = [](const CVector& z) { return std::log(std::abs(z[0])); };
    const auto fs = fs_sampler(1);
    const auto a0 = moderate_integral(fs, phi, 0.0, 1000, 1);
    CHECK(a0.value == 1.0);
    CHECK_FALSE(a0.divergent);

    // |z0|^2 is uniform, so the integral of |z0|^{-a} is 1 / (1 - a/2).
    const auto a1 = moderate_integral(fs, phi, 1.0, 200000, 2);
    CHECK(a1.value == doctest::Approx(2.0).epsilon(0.025));
    CHECK_FALSE(a1.divergent);
    CHECK(a1.tail_index == doctest::Approx(2.0).epsilon(0.5));
    CHECK(a1.running.size() == 4);

    const auto half = moderate_integral(fs, phi, 0.5, 50000, 3);
    CHECK(half.value == doctest::Approx(4.0 / 3.0).epsilon(0.01));

    const auto a2 = moderate_integral(fs, phi, 2.0, 200000, 4);
    CHECK(a2.divergent);
  }

  TEST_CASE("moderate integral is reproducible from the seed") {
    const auto phi = [](const CVector& z) { return std::log(std::abs(z[1])); };
    MeasureSpec spec;
    spec.mode = MeasureMode::Perturbed;
    spec.c_p = 0.25;
    const auto a = moderate_integral(perturbed_sampler(2, spec), phi, 0.7, 3000, 77);
    const auto b = moderate_integral(perturbed_sampler(2, spec), phi, 0.7, 3000, 77);
    CHECK(a.value == b.value);
    CHECK(a.stderr_ == b.stderr_);
  }

  TEST_CASE("capacity constants of FS on P1") {
    const auto probes = standard_probes(1);
    const std::vector<double> ts{0.0, 0.5, 1.0, 1.5, 2.0};
    const auto c = estimate_capacity_constants(fs_sampler(1), 1, probes, ts, 100000, 8);
    CHECK(c.R.value == doctest::Approx(0.5).epsilon(0.04));
    // sigma is the volume form itself, so the centred integral vanishes.
    CHECK(c.S.value < 0.02);
    CHECK(c.Delta[0].value <= 1.0);
    for (std::size_t k = 1; k < ts.size(); ++k) CHECK(c.Delta[k].value <= c.Delta[k - 1].value + 1e-12);
    // The log probes dominate for t >= 1: mass of {|z0|^2 < e^{-1-2t}}.
    for (std::size_t k = 2; k < ts.size(); ++k) {
      const double exact = std::exp(-2.0 * ts[k] - 1.0);
      CHECK(std::abs(c.Delta[k].value - exact) < 4.0 * std::sqrt(exact / 100000.0) + 2e-3);
    }
    const double slope = (std::log(c.Delta[4].value) - std::log(c.Delta[2].value)) / (ts[4] - ts[2]);
    CHECK(slope < 0.0);
    CHECK(slope == doctest::Approx(-2.0).epsilon(0.2));
  }

  TEST_CASE("capacity R of FS on higher P^N respects the log bound") {
    for (int N : {2, 4}) {
      const auto probes = standard_probes(N);
      const std::vector<double> ts{1.0};
      const auto c = estimate_capacity_constants(fs_sampler(N), N, probes, ts, 20000, 21);
      CHECK(c.R.value <= 0.5 * (1.0 + std::log(static_cast<double>(N))) + 0.02);
      CHECK(c.R.value > 0.0);
    }
  }

  TEST_CASE("hyperplane neighbourhood mass scales like delta^2") {
    for (int N : {1, 3}) {
      const CVector e = CVector::Unit(N + 1, 0);
      const auto big = hyperplane_neighborhood_mass(fs_sampler(N), e, 0.2, 200000, 1);
      const auto small = hyperplane_neighborhood_mass(fs_sampler(N), e, 0.05, 200000, 2);
      CHECK(big.value == doctest::Approx(1.0 - std::pow(1.0 - 0.04, N)).epsilon(0.05));
      const double slope = std::log(big.value / small.value) / std::log(0.2 / 0.05);
      CHECK(slope == doctest::Approx(2.0).epsilon(0.15));
    }
  }

  TEST_CASE("perturbed moderate growth is at most linear in N") {
    MeasureSpec spec;
    spec.c_p = 0.2;
    spec.rho = 0.5;
    const std::vector<int> Ns{5, 10, 20, 30};
    const auto fit = moderate_growth_fit(Ns, spec, 0.5, 2000, 12);
    REQUIRE(fit.integral.size() == 4);
    for (const auto& e : fit.integral) CHECK(e.value >= 1.0);
    CHECK(fit.beta0_hat > 0.0);
    CHECK(fit.holds);
  }
}
