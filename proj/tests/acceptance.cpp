// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Pipelines run through the same config parser and command
// layer as the CLI.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "zerolab/bergman.hpp"
#include "zerolab/commands.hpp"
#include "zerolab/config.hpp"
#include "zerolab/equidistribution.hpp"
#include "zerolab/measures.hpp"
#include "zerolab/parallel.hpp"

using namespace zerolab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double row(const CommandResult& r, int p, const std::string& stat) {
  for (const auto& x : r.rows)
    if (x.p == p && x.statistic == stat) return x.value;
  throw Error(ErrorCode::ValidationError, "missing row " + std::to_string(p) + "," + stat);
}

double row_se(const CommandResult& r, int p, const std::string& stat) {
  for (const auto& x : r.rows)
    if (x.p == p && x.statistic == stat) return x.stderr_;
  throw Error(ErrorCode::ValidationError, "missing row " + std::to_string(p) + "," + stat);
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// 1. FS Bergman kernel constant, dim = p + 1, dimension bounds with C = 2.
Outcome bergman_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = execute(parse_config("[run]\ncommand = bergman\nn = 1\np_list = 5, 10, 20\n"));
  const double secs = seconds_since(t0);
  bool ok = res.thresholds_passed && secs <= 60.0;
  std::string d;
  for (int p : {5, 10, 20}) {
    const double ratio = row(res, p, "kernel_max_over_min_minus_1");
    const double dim = row(res, p, "dimension");
    ok = ok && ratio <= 1e-5 && dim == p + 1 && row(res, p, "dimension_bounds_c2") == 1.0;
    d += fmt("p=%d ratio=%.2e dim=%g; ", p, ratio, dim);
  }
  return {ok, d + fmt("%.1fs", secs)};
}

// 2. dim = 11 - k_min with k_min the least k for which |z|^{2k - 2 p lambda}
// is locally integrable in one complex variable: 2k - 2 p lambda > -2.
Outcome singular_dimension_law() {
  const int p = 10;
  bool ok = true;
  std::string d;
  const std::pair<double, int> cases[] = {{0.25, 9}, {0.3, 8}};
  for (const auto& [lambda, expected_dim] : cases) {
    // p * lambda is 5/2 or 3; integer arithmetic on 20 * lambda avoids the
    // rounding of 10 * 0.3.
    const int twice_pl = static_cast<int>(std::lround(2 * p * lambda));
    int k = 0;
    while (!(2 * k - twice_pl > -2)) ++k;
    const std::string text = "[run]\ncommand = bergman\nn = 1\np_list = 10\n[metric.1]\nsingular.1 = 1, -2 @ " +
                             std::to_string(lambda) + "\n";
    const RunConfig cfg = parse_config(text);
    const auto& h = cfg.experiment.metrics[0];
    const auto grid = grid_for(cfg.experiment, p);
    const auto b = build_basis(p, h, grid);
    // The declared pole is the zero of z0 - 2 z1, i.e. [2:1].
    const ProjectivePoint pole(CVector{{cplx(2.0), cplx(1.0)}});
    bool locus = b.base_locus.size() == 1 && b.on_base_locus(pole);
    if (locus) {
      const CVector form = b.base_locus[0].form;
      locus = std::abs(form[0] * cplx(2.0) + form[1]) <= 1e-12 && b.base_locus[0].order == k;
    }
    // Every section vanishes at the pole to order k: the section along the
    // affine line through the pole is O(t^k).
    double worst = 0.0;
    for (int j = 0; j < b.dimension(); ++j) {
      const auto s = b.section(b.coefficients.col(j));
      // Small enough for the next Taylor term, large enough that |s| ~ t^k
      // stays well above rounding.
      const double t = std::pow(10.0, -9.0 / k);
      const double near = std::abs(evaluate_raw(s, CVector{{cplx(2.0 + t), cplx(1.0)}}));
      const double far = std::abs(evaluate_raw(s, CVector{{cplx(2.0 + 10 * t), cplx(1.0)}}));
      worst = std::max(worst, std::abs(std::log10(far / near) - k));
    }
    ok = ok && k == 11 - expected_dim && b.dimension() == 11 - k && locus && worst < 0.05;
    d += fmt("lambda=%g k_min=%d dim=%d base_locus_ok=%d order_slope_err=%.3f; ", lambda, k, b.dimension(), locus,
             worst);
  }
  return {ok, d};
}

// 3. E <[S_p = 0], u> = <gamma_p, u> / p within 3 standard errors.
Outcome expectation_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = parse_config("[run]\nn = 1\np_list = 10\nnsamples = 2000\nseed = 2024\n");
  const auto& x = cfg.experiment;
  const int p = 10;
  const auto grid = grid_for(x, p);
  const auto bases = bases_for(x, p, grid);
  const Dictionary dict = dictionary_for(x);
  const auto n = static_cast<std::size_t>(x.nsamples);
  std::vector<std::vector<double>> vals(dict.members.size(), std::vector<double>(n));
  parallel_for(n, [&](std::size_t i) {
    auto rng = substream(x.seed, p, i);
    const auto zs = sample_zero_set(sample_sigma_p(bases, x.measure, rng), bases);
    for (std::size_t k = 0; k < dict.members.size(); ++k) vals[k][i] = zero_current_pair(zs, dict.members[k], p, 1);
  });
  bool ok = true;
  double worst = 0.0;
  std::string worst_name;
  for (std::size_t k = 0; k < dict.members.size(); ++k) {
    double mean = 0, var = 0;
    for (double v : vals[k]) mean += v;
    mean /= n;
    for (double v : vals[k]) var += (v - mean) * (v - mean);
    const double se = std::sqrt(var / (n - 1) / n);
    const double expected = fs_current_pair(bases[0], dict.members[k], grid) / p;
    // Constant members have se = 0; allow rounding there.
    const double z = se > 0 ? std::abs(mean - expected) / se : (std::abs(mean - expected) <= 1e-9 ? 0.0 : 1e9);
    if (z > worst) worst = z, worst_name = dict.members[k].name();
    ok = ok && z <= 3.0;
  }
  const double secs = seconds_since(t0);
  return {ok && secs <= 300.0, fmt("%zu members, worst |z|=%.2f (%s), %.1fs", dict.members.size(), worst,
                                   worst_name.c_str(), secs)};
}

// 4. median / (log p / p) inside one factor-3 band over p = 5..40.
Outcome equidistribution_rate() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto res =
      execute(parse_config("[run]\ncommand = equidist\nn = 1\np_list = 5, 10, 20, 40\nnsamples = 200\nseed = 4\n"));
  const double secs = seconds_since(t0);
  std::string d;
  for (int p : {5, 10, 20, 40}) d += fmt("p=%d m/(logp/p)=%.4f; ", p, row(res, p, "median_over_logp_over_p"));
  const double band = row(res, 0, "rate_band_ratio");
  return {band <= 3.0 && secs <= 600.0, d + fmt("max/min=%.2f, %.1fs", band, secs)};
}

// 5. Zero fraction near the pole = lambda +- 0.05, smooth ball mass <= 0.02.
Outcome atom_concentration() {
  const auto res = execute(parse_config(
      "[run]\ncommand = equidist\nn = 1\np_list = 40\nnsamples = 500\nseed = 5\natom_radius = 0.1\n"
      "[metric.1]\nsingular.1 = 0, 1 @ 0.3\n"));
  const double f = row(res, 40, "atom_fraction");
  const double smooth = row(res, 40, "smooth_ball_mass");
  const double oracle = 0.3 + smooth;
  return {std::abs(f - 0.3) <= 0.05 && smooth <= 0.02,
          fmt("fraction=%.4f (se %.4f), atom mass 0.3 + smooth ball mass %.4f = %.4f", f,
              row_se(res, 40, "atom_fraction"), smooth, oracle)};
}

// 6. Bezout count 16 on P^2 for p = 4; failures must be flagged.
Outcome bezout_general_position() {
  const RunConfig cfg = parse_config(
      "[run]\ncommand = sample\nn = 2\nm = 2\np_list = 4\nnsamples = 1000\nseed = 6\n"
      "[metric.1]\nsmooth = quadratic\nquadratic = 0.05 0 0; 0 0 0; 0 0 0\n"
      "[metric.2]\nsmooth = quadratic\nquadratic = 0 0 0; 0 0.03 0.01i; 0 -0.01i 0\n");
  const auto& x = cfg.experiment;
  const int p = 4;
  const auto grid = grid_for(x, p);
  const auto bases = bases_for(x, p, grid);
  const auto n = static_cast<std::size_t>(x.nsamples);
  std::vector<int> status(n);  // 0 full count, 1 flagged error, 2 silent short count
  parallel_for(n, [&](std::size_t i) {
    auto rng = substream(x.seed, p, i);
    const auto s = sample_sigma_p(bases, x.measure, rng);
    try {
      const auto zs = sample_zero_set(s, bases);
      status[i] = zs.total_multiplicity() == 16 && zs.expected_total == 16 ? 0 : 2;
    } catch (const Error&) {
      status[i] = 1;
    }
  });
  const long full = std::count(status.begin(), status.end(), 0);
  const long flagged = std::count(status.begin(), status.end(), 1);
  const long silent = std::count(status.begin(), status.end(), 2);
  return {full >= 999 && silent == 0, fmt("total multiplicity 16 in %ld/1000, flagged %ld, silent short %ld", full,
                                          flagged, silent)};
}

// 7. int exp(-phi) d omega_FS = 2 for phi = log(|z0|/|z|), divergence at
// alpha = 2, growth of the perturbed family with one fitted beta0.
Outcome moderate_integral_check() {
  const auto res = execute(parse_config(
      "[run]\ncommand = moderate\nnsamples = 200000\nseed = 7\n[measure]\nmode = fs\nN = 1\nprobe = log_z0\n"
      "alpha = 1, 2\n"));
  const double v = row(res, 1, "moderate_integral@alpha=1");
  const bool div1 = row(res, 1, "divergent@alpha=1") != 0.0;
  const bool div2 = row(res, 1, "divergent@alpha=2") != 0.0;
  const auto g = execute(parse_config(
      "[run]\ncommand = moderate\nnsamples = 20000\nseed = 7\nalpha0 = 0.5\n[measure]\nmode = perturbed\nc_p = 0.5\n"
      "rho = 0.5\ngrowth_N = 5, 10, 20, 30\nalpha = 1\n"));
  const bool holds = row(g, 0, "growth_holds") == 1.0;
  std::string d = fmt("alpha=1: %.4f +- %.4f (closed form 2), divergent(1)=%d divergent(2)=%d; growth beta0_hat=%.3f", v,
                      row_se(res, 1, "moderate_integral@alpha=1"), div1, div2, row(g, 0, "beta0_hat"));
  for (int N : {5, 10, 20, 30}) d += fmt(" I_%d=%.6f", N, row(g, N, "growth_integral"));
  return {std::abs(v - 2.0) <= 0.05 && !div1 && div2 && holds, d};
}

// 8. R = 1/2 on (P^1, FS, FS), Delta(t) decays log-linearly.
Outcome capacity_constants() {
  const auto res = execute(parse_config(
      "[run]\ncommand = moderate\nnsamples = 200000\nseed = 8\n[measure]\nmode = fs\nN = 1\nalpha = 1\n"
      "t_list = 0, 0.5, 1, 1.5, 2, 2.5, 3\n"));
  const double R = row(res, 1, "R_hat");
  const double bound = row(res, 1, "R_fs_bound");
  std::vector<double> t{0, 0.5, 1, 1.5, 2, 2.5, 3}, y;
  for (double s : t) {
    char key[32];
    std::snprintf(key, sizeof key, "Delta_hat@t=%g", s);
    y.push_back(std::log(row(res, 1, key)));
  }
  const double tm = std::accumulate(t.begin(), t.end(), 0.0) / t.size();
  const double ym = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < t.size(); ++i) sxy += (t[i] - tm) * (y[i] - ym), sxx += (t[i] - tm) * (t[i] - tm);
  const double slope = sxy / sxx;
  return {std::abs(R - 0.5) <= 0.02 && std::abs(R - bound) <= 0.02 && slope < 0,
          fmt("R_hat=%.4f, bound (1+log N)/2=%.4f, log Delta slope=%.3f", R, bound, slope)};
}

// 9. c_0p = 1/sqrt(2) for m = 2, d = 1; delta_p p / d_p bounded on P^2;
// d_p = p on P^1.
Outcome dinh_sibony() {
  const auto c = execute(parse_config("[run]\ncommand = constants\nn = 2\nm = 2\np_list = 1\nd_kp = 1, 1\n"));
  const double c0p = row(c, 1, "c_0p");
  // With equal slot dimensions d, c_0p^{-2d} = binom(2d, d) <= 4^d, so
  // delta_p p / d_p = 1 / c_0p lies in [1, 2].
  const auto q = execute(parse_config("[run]\ncommand = constants\nn = 2\nm = 2\np_list = 2, 3, 4, 5, 6, 7, 8\n"));
  bool bounded = true;
  std::string d = fmt("c_0p=%.15f (|err| %.1e); delta_p p/d_p:", c0p, std::abs(c0p - 1 / std::sqrt(2.0)));
  for (int p = 2; p <= 8; ++p) {
    const double v = row(q, p, "delta_p_times_p_over_d_p");
    bounded = bounded && v >= 1.0 && v <= 2.0;
    d += fmt(" %.4f", v);
  }
  const auto l = execute(parse_config("[run]\ncommand = constants\nn = 1\np_list = 3, 5, 10, 20\n"));
  bool dp = true;
  for (int p : {3, 5, 10, 20}) dp = dp && row(l, p, "d_p") == p;
  d += fmt("; P^1 d_p == p: %d", dp);
  return {std::abs(c0p - 1 / std::sqrt(2.0)) <= 1e-12 && bounded && dp, d};
}

// 10. Threshold C lambda_p / p with C fitted at p = 10 on a pilot run.
Outcome exceptional_decay() {
  RunConfig pilot = parse_config("[run]\nn = 1\np_list = 10\nnsamples = 200\nseed = 100\nlambda_coef = 4\n");
  const auto pr = run_experiment(pilot.experiment).front();
  std::vector<double> scaled;
  for (double v : pr.discrepancies) scaled.push_back(v / (pr.lambda_p / 10.0));
  const double C = weighted_quantile(scaled, pr.weights, 0.9);
  RunConfig cfg = parse_config("[run]\nn = 1\np_list = 10, 20, 40\nnsamples = 200\nseed = 10\nlambda_coef = 4\n");
  cfg.experiment.threshold_c = C;
  const auto recs = run_experiment(cfg.experiment);
  bool mono = true;
  std::string d = fmt("C=%.4f;", C);
  for (std::size_t k = 0; k < recs.size(); ++k) {
    d += fmt(" p=%d frac=%.3f", recs[k].p, recs[k].exceptional_fraction);
    if (k > 0) mono = mono && recs[k].exceptional_fraction <= recs[k - 1].exceptional_fraction;
  }
  return {mono && recs.back().exceptional_fraction <= 0.05, d};
}

// 11. Circle target: distance to the reference roots halves per doubling of
// p; concentrated sampler within its 1/p^2 budget.
Outcome circle_pipeline() {
  const auto res = execute(parse_config(
      "[run]\ncommand = approx\nn = 1\np_list = 10, 20, 40\nnsamples = 20000\nseed = 11\n"
      "[target]\nkind = circle\ncircle_radius = 1\nstrategy = stratified\ntrials = 40\n"));
  bool ok = res.thresholds_passed;
  std::string d;
  double prev = 0.0;
  for (int p : {10, 20, 40}) {
    const double m = row(res, p, "median_distance_to_reference_roots");
    const double circ = row(res, p, "max_distance_to_circle");
    const double q = row(res, p, "concentrated_exceptional_frequency");
    const double budget = 1.0 / (p * p);
    const double se = std::sqrt(budget * (1 - budget) / 20000);
    ok = ok && circ <= 1e-12 && q <= budget + 3 * se;
    d += fmt("p=%d median=%.4f circle=%.1e q=%.5f (<= %.5f)", p, m, circ, q, budget + 3 * se);
    if (prev > 0) {
      const double ratio = m / prev;
      ok = ok && std::abs(ratio - 0.5) <= 0.15;
      d += fmt(" ratio=%.3f", ratio);
    }
    d += "; ";
    prev = m;
  }
  return {ok, d};
}

// 12. Byte-identical CSV across reruns, for every command family.
Outcome determinism() {
  const std::vector<std::string> docs = {
      "[run]\ncommand = equidist\nn = 1\np_list = 5, 10\nnsamples = 30\nseed = 12\ndeterministic = true\n",
      "[run]\ncommand = approx\nn = 1\np_list = 10\nnsamples = 2000\nseed = 12\n[target]\nkind = circle\ntrials = 4\n",
      "[run]\ncommand = moderate\nnsamples = 5000\nseed = 12\n[measure]\nmode = perturbed\nc_p = 0.3\nalpha = 1\n"
      "t_list = 0, 1\n",
      "[run]\ncommand = sample\nn = 2\nm = 2\np_list = 3\nnsamples = 40\nseed = 12\n",
  };
  const fs::path root = fs::temp_directory_path() / ("zerolab_acceptance_" + std::to_string(::getpid()));
  bool ok = true;
  int k = 0;
  for (const auto& doc : docs) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      RunConfig c = parse_config(doc);
      c.out_dir = root / (std::to_string(k) + "_" + std::to_string(rep));
      c.experiment.threads = rep == 0 ? 1 : 0;
      run_command(c);
      const std::string csv = slurp(c.out_dir / c.csv_name);
      if (rep == 0) first = csv;
      else ok = ok && csv == first && !csv.empty();
    }
    ++k;
  }
  fs::remove_all(root);
  return {ok, fmt("%zu configs, two runs each (1 thread vs all)", docs.size())};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"bergman_exactness", bergman_exactness},
      {"singular_dimension_law", singular_dimension_law},
      {"expectation_oracle", expectation_oracle},
      {"equidistribution_rate", equidistribution_rate},
      {"atom_mass_concentration", atom_concentration},
      {"bezout_general_position", bezout_general_position},
      {"moderate_measure_integral", moderate_integral_check},
      {"capacity_constants", capacity_constants},
      {"dinh_sibony_constants", dinh_sibony},
      {"exceptional_set_decay", exceptional_decay},
      {"circle_target_pipeline", circle_pipeline},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
