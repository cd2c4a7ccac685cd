#include "zerolab/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "zerolab/bergman.hpp"
#include "zerolab/calculus.hpp"
#include "zerolab/current_approx.hpp"
#include "zerolab/equidistribution.hpp"
#include "zerolab/error.hpp"
#include "zerolab/measures.hpp"
#include "zerolab/parallel.hpp"

namespace zerolab {

namespace {

using Rows = std::vector<CsvRow>;

void fail(CommandResult& r, const std::string& why) {
  r.thresholds_passed = false;
  r.threshold_failures.push_back(why);
}

std::string tag(const std::string& base, const std::string& key, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s@%s=%g", base.c_str(), key.c_str(), v);
  return buf;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

CommandResult cmd_bergman(const RunConfig& cfg) {
  const auto& x = cfg.experiment;
  CommandResult res;
  nlohmann::json levels = nlohmann::json::array();
  const TestForm u("abs_z1_sq", x.n, [](const ProjectivePoint& y) { return std::norm(y[1]); });
  for (int p : x.p_list) {
    const QuadratureGrid grid = grid_for(x, p);
    const QuadratureGrid fine = build_quadrature(x.n, 2 * grid.resolution, x.metrics[0].singular_forms());
    const auto bases = bases_for(x, p, grid);
    nlohmann::json level{{"p", p}, {"slots", nlohmann::json::array()}};
    for (std::size_t k = 0; k < bases.size(); ++k) {
      const auto& b = bases[k];
      const std::string pre = bases.size() > 1 ? "slot" + std::to_string(k + 1) + "." : "";
      double kmin = std::numeric_limits<double>::infinity(), kmax = 0.0;
      for (const auto& pt : grid.points) {
        if (b.on_base_locus(pt)) continue;
        const double v = bergman_kernel_at(b, pt);
        kmin = std::min(kmin, v);
        kmax = std::max(kmax, v);
      }
      const double ratio = kmax / kmin - 1.0;
      const std::vector<MetricWeight> one_slot{x.metrics[k]};
      const double current_err =
          x.n == 1 ? std::abs(fs_current_pair(b, u, grid) / p - curvature_target(one_slot, u, grid))
                   : std::numeric_limits<double>::quiet_NaN();
      Rows rows{{p, pre + "dimension", static_cast<double>(b.dimension()), 0, 0},
                {p, pre + "d_kp", static_cast<double>(b.d_kp()), 0, 0},
                {p, pre + "quotient_degree", static_cast<double>(b.quotient_degree), 0, 0},
                {p, pre + "base_locus_size", static_cast<double>(b.base_locus.size()), 0, 0},
                {p, pre + "gram_condition", b.gram_condition, 0, 0},
                {p, pre + "kernel_max_over_min_minus_1", ratio, 0, static_cast<long>(grid.size())},
                {p, pre + "orthonormality_residual", orthonormality_residual(b, fine), 0, static_cast<long>(fine.size())},
                {p, pre + "dimension_bounds_c2", dimension_bounds_hold(b, 2.0) ? 1.0 : 0.0, 0, 0},
                {p, pre + "fs_current_error_abs_z1_sq", current_err, 0, 0}};
      for (const auto& o : b.orders) rows.push_back({p, pre + "min_vanishing_order", static_cast<double>(o.order), 0, 0});
      res.rows.insert(res.rows.end(), rows.begin(), rows.end());
      if (x.metrics[k].is_fs()) {
        const int expected = x.n == 1 ? p + 1 : (p + 1) * (p + 2) / 2;
        if (b.dimension() != expected) fail(res, "p=" + std::to_string(p) + ": FS dimension is not (p+n choose n)");
        if (ratio > 1e-5) fail(res, "p=" + std::to_string(p) + ": FS Bergman kernel is not constant within 1e-5");
      }
      level["slots"].push_back(to_json(b));
    }
    levels.push_back(level);
  }
  res.summary["levels"] = levels;
  return res;
}

CommandResult cmd_sample(const RunConfig& cfg) {
  const auto& x = cfg.experiment;
  CommandResult res;
  for (int p : x.p_list) {
    const QuadratureGrid grid = grid_for(x, p);
    const auto bases = bases_for(x, p, grid);
    const auto n = static_cast<std::size_t>(x.nsamples);
    std::vector<double> w(n), logd(n), complete(n), total(n);
    parallel_for(
        n,
        [&](std::size_t i) {
          auto rng = substream(x.seed, static_cast<std::uint64_t>(p), i);
          const auto s = sample_sigma_p(bases, x.measure, rng);
          w[i] = s.importance_weight;
          logd[i] = s.log_density_diag;
          try {
            const auto zs = sample_zero_set(s, bases);
            complete[i] = zs.complete() ? 1.0 : 0.0;
            total[i] = zs.total_multiplicity();
          } catch (const Error&) {
            complete[i] = 0.0;
            total[i] = 0.0;
          }
        },
        x.threads);
    const double mw = std::accumulate(w.begin(), w.end(), 0.0) / n;
    const double ml = std::accumulate(logd.begin(), logd.end(), 0.0) / n;
    const double mc = std::accumulate(complete.begin(), complete.end(), 0.0) / n;
    const double mt = std::accumulate(total.begin(), total.end(), 0.0) / n;
    const long ns = x.nsamples;
    res.rows.push_back({p, "mean_importance_weight", mw, 0, ns});
    res.rows.push_back({p, "effective_sample_size", effective_sample_size(w), 0, ns});
    res.rows.push_back({p, "mean_log_density", ml, 0, ns});
    res.rows.push_back({p, "complete_fraction", mc, std::sqrt(mc * (1 - mc) / n), ns});
    res.rows.push_back({p, "mean_total_multiplicity", mt, 0, ns});
    res.rows.push_back({p, "dimension", static_cast<double>(bases[0].dimension()), 0, 0});
  }
  return res;
}

CommandResult cmd_equidist(const RunConfig& cfg) {
  const auto& x = cfg.experiment;
  CommandResult res;
  const auto records = run_experiment(x);
  nlohmann::json recs = nlohmann::json::array();
  std::vector<double> rate;
  const auto& h0 = x.metrics[0];
  for (const auto& r : records) {
    const long ns = static_cast<long>(r.discrepancies.size());
    const double lp = std::log(static_cast<double>(r.p)) / r.p;
    Rows rows{{r.p, "mean", r.mean, 0, ns},
              {r.p, "median", r.median, 0, ns},
              {r.p, "median_over_logp_over_p", r.median / lp, 0, ns},
              {r.p, "exceptional_fraction", r.exceptional_fraction, std::sqrt(r.exceptional_fraction * (1 - r.exceptional_fraction) / std::max(1L, ns)), ns},
              {r.p, "lambda_p", r.lambda_p, 0, 0},
              {r.p, "threshold", r.threshold, 0, 0},
              {r.p, "failures", static_cast<double>(r.failures), 0, r.nsamples},
              {r.p, "incomplete", static_cast<double>(r.incomplete), 0, r.nsamples},
              {r.p, "dimension", static_cast<double>(r.dimension), 0, 0},
              {r.p, "gram_condition", r.gram_condition, 0, 0}};
    for (std::size_t k = 0; k < r.quantiles.size(); ++k)
      rows.push_back({r.p, tag("quantile", "q", r.quantile_levels[k]), r.quantiles[k], 0, ns});
    if (std::isfinite(r.atom_fraction)) {
      rows.push_back({r.p, "atom_fraction", r.atom_fraction, r.atom_fraction_stderr, ns});
      rows.push_back({r.p, "atom_mass", h0.singular_terms().front().lambda, 0, 0});
      // Absolutely continuous part of c_1 inside the ball, by quadrature.
      const QuadratureGrid grid = grid_for(x, r.p);
      const CVector form = h0.singular_terms().front().form;
      const double ac = 1.0 - h0.lambda_total();
      const PointFunction smooth = [&h0](const ProjectivePoint& y) { return h0.smooth_part(y); };
      long double mass = 0.0L;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (distance_to_hyperplane(grid.points[i], form) >= x.atom_radius) continue;
        double density = ac;
        if (h0.smooth_kind() == SmoothKind::Quadratic) density += 2.0 * complex_hessian(smooth, grid.points[i]).trace().real();
        mass += grid.weights[i] * density;
      }
      rows.push_back({r.p, "smooth_ball_mass", static_cast<double>(mass), 0, static_cast<long>(grid.size())});
    }
    res.rows.insert(res.rows.end(), rows.begin(), rows.end());
    rate.push_back(r.median / lp);
    if (r.failures > cfg.max_failure_fraction * r.nsamples)
      fail(res, "p=" + std::to_string(r.p) + ": " + std::to_string(r.failures) + " solver failures");
    nlohmann::json j{{"p", r.p},
                     {"nsamples", r.nsamples},
                     {"mean", json_number(r.mean)},
                     {"median", json_number(r.median)},
                     {"quantile_levels", r.quantile_levels},
                     {"quantiles", r.quantiles},
                     {"exceptional_fraction", r.exceptional_fraction},
                     {"lambda_p", r.lambda_p},
                     {"threshold", r.threshold},
                     {"failures", r.failures},
                     {"failure_codes", r.failure_codes},
                     {"incomplete", r.incomplete},
                     {"atom_fraction", json_number(r.atom_fraction)},
                     {"dimension", r.dimension},
                     {"seed", r.seed},
                     {"discrepancies", r.discrepancies}};
    if (!x.deterministic) j["wall_seconds"] = r.wall_seconds;
    recs.push_back(j);
  }
  if (rate.size() >= 2) {
    const auto [lo, hi] = std::minmax_element(rate.begin(), rate.end());
    const double band = *hi / *lo;
    res.rows.push_back({0, "rate_band_ratio", band, 0, 0});
    if (cfg.rate_band > 0 && band > cfg.rate_band) fail(res, "median / (log p / p) leaves the configured band");
  }
  res.summary["records"] = recs;
  return res;
}

CommandResult cmd_moderate(const RunConfig& cfg) {
  const auto& x = cfg.experiment;
  CommandResult res;
  const int N = cfg.moderate_N;
  const MeasureSampler sampler = x.measure.mode == MeasureMode::FS ? fs_sampler(N) : perturbed_sampler(N, x.measure);
  const auto probes = standard_probes(N);
  const auto probe = std::find_if(probes.begin(), probes.end(), [&](const Probe& p) { return p.name == cfg.probe; });
  nlohmann::json mods = nlohmann::json::array();
  for (double a : cfg.alpha) {
    const auto m = moderate_integral(sampler, probe->phi, a, x.nsamples, x.seed);
    res.rows.push_back({N, tag("moderate_integral", "alpha", a), m.value, m.stderr_, m.nsamples});
    res.rows.push_back({N, tag("tail_index", "alpha", a), m.tail_index, 0, m.nsamples});
    res.rows.push_back({N, tag("divergent", "alpha", a), m.divergent ? 1.0 : 0.0, 0, m.nsamples});
    res.rows.push_back({N, tag("ess", "alpha", a), m.ess, 0, m.nsamples});
    mods.push_back({{"alpha", a},
                    {"value", json_number(m.value)},
                    {"stderr", json_number(m.stderr_)},
                    {"tail_index", json_number(m.tail_index)},
                    {"divergent", m.divergent},
                    {"running", m.running}});
  }
  res.summary["moderate"] = mods;
  if (!cfg.t_list.empty()) {
    const auto c = estimate_capacity_constants(sampler, N, probes, cfg.t_list, x.nsamples, x.seed);
    res.rows.push_back({N, "R_hat", c.R.value, c.R.stderr_, c.R.nsamples});
    res.rows.push_back({N, "R_fs_bound", 0.5 * (1.0 + std::log(static_cast<double>(N))), 0, 0});
    res.rows.push_back({N, "S_hat", c.S.value, c.S.stderr_, c.S.nsamples});
    for (std::size_t k = 0; k < c.t.size(); ++k)
      res.rows.push_back({N, tag("Delta_hat", "t", c.t[k]), c.Delta[k].value, c.Delta[k].stderr_, c.Delta[k].nsamples});
    res.summary["capacity"] = {{"R_probe", c.R_probe}, {"probe_version", kProbeVersion}};
  }
  if (!cfg.growth_N.empty()) {
    const auto g = moderate_growth_fit(cfg.growth_N, x.measure, cfg.alpha0, x.nsamples, x.seed);
    for (std::size_t k = 0; k < g.N.size(); ++k) {
      res.rows.push_back({g.N[k], "growth_integral", g.integral[k].value, g.integral[k].stderr_, g.integral[k].nsamples});
      res.rows.push_back({g.N[k], "growth_alpha", g.alpha[k], 0, 0});
      res.rows.push_back({g.N[k], "hypothesis_rho4_pow_N_times_N", std::pow(x.measure.rho / 4.0, g.N[k]) * g.N[k], 0, 0});
    }
    res.rows.push_back({0, "beta0_hat", g.beta0_hat, 0, 0});
    res.rows.push_back({0, "growth_holds", g.holds ? 1.0 : 0.0, 0, 0});
    if (!g.holds) fail(res, "moderate integral grows faster than beta0_hat * N");
  }
  return res;
}

CommandResult cmd_constants(const RunConfig& cfg) {
  const auto& x = cfg.experiment;
  CommandResult res;
  nlohmann::json reports = nlohmann::json::array();
  for (int p : x.p_list) {
    ConstantsReport rep;
    if (!cfg.d_kp.empty()) {
      rep = dinh_sibony_constants(p, cfg.d_kp, cfg.epsilon);
    } else {
      const QuadratureGrid grid = grid_for(x, p);
      const auto bases = bases_for(x, p, grid);
      rep = dinh_sibony_constants(p, bases, x.metrics, cfg.epsilon, grid);
    }
    if (cfg.measure_R) {
      // R of the FS measure on the section space P^{d_0p}.
      const auto probes = standard_probes(rep.d_0p);
      const auto c = estimate_capacity_constants(fs_sampler(rep.d_0p), rep.d_0p, probes, {}, x.nsamples, x.seed);
      rep.R_hat = c.R.value;
      rep.R_source = "measured";
      rep.eta = rep.epsilon * rep.d_p / rep.delta_p - 3.0 * rep.R_hat;
    }
    res.rows.push_back({p, "d_0p", static_cast<double>(rep.d_0p), 0, 0});
    res.rows.push_back({p, "c_0p", rep.c0p, 0, 0});
    res.rows.push_back({p, "log_c_0p", rep.log_c0p, 0, 0});
    res.rows.push_back({p, "d_p", rep.d_p, 0, 0});
    res.rows.push_back({p, "delta_p", rep.delta_p, 0, 0});
    res.rows.push_back({p, "delta_p_times_p_over_d_p", rep.delta_p * p / rep.d_p, 0, 0});
    res.rows.push_back({p, "r_bound", rep.r_bound, 0, 0});
    res.rows.push_back({p, "R_hat", rep.R_hat, 0, 0});
    res.rows.push_back({p, "eta", rep.eta, 0, 0});
    res.rows.push_back({p, "mass_quadrature", rep.mass_quadrature, 0, 0});
    // The asymptotic hypotheses have no explicit cutoff; report the ratios.
    const int min_l = *std::min_element(rep.d_kp.begin(), rep.d_kp.end());
    const double log_ratio = rep.r_bound * std::log(static_cast<double>(rep.d_0p)) / min_l;
    const double decay_ratio = std::pow(x.measure.rho / 4.0, min_l) * rep.d_0p;
    res.rows.push_back({p, "hypothesis_r_log_l_over_min_lk", log_ratio, 0, 0});
    res.rows.push_back({p, "hypothesis_rho4_pow_min_lk_times_l", decay_ratio, 0, 0});
    if (rep.c0p < cfg.c0) fail(res, "p=" + std::to_string(p) + ": c_0p below the configured c0");
    auto j = to_json(rep);
    j["hypothesis_ratios"] = {{"r_log_l_over_min_lk", log_ratio}, {"rho4_pow_min_lk_times_l", decay_ratio}};
    reports.push_back(j);
  }
  res.summary["constants"] = reports;
  return res;
}

CommandResult cmd_approx(const RunConfig& cfg) {
  const auto& x = cfg.experiment;
  CommandResult res;
  const QuadratureGrid grid = build_quadrature(1, std::max(32, x.resolution));
  const Dictionary dict = dictionary_v1(1);
  nlohmann::json levels = nlohmann::json::array();
  for (int p : x.p_list) {
    std::vector<ApproximationRecord> recs(static_cast<std::size_t>(cfg.trials));
    parallel_for(
        recs.size(),
        [&](std::size_t t) {
          recs[t] = roots_from_measure(cfg.target, p, cfg.strategy, substream_seed(x.seed, static_cast<std::uint64_t>(p), t),
                                       grid, dict);
        },
        x.threads);
    std::vector<double> weak, l1, ref, circ;
    for (const auto& r : recs) {
      weak.push_back(r.weak_distance);
      l1.push_back(r.l1_potential_error);
      ref.push_back(r.median_distance_to_reference);
      circ.push_back(r.max_distance_to_circle);
    }
    const long trials = cfg.trials;
    res.rows.push_back({p, "median_weak_distance", median_of(weak), 0, trials});
    res.rows.push_back({p, "median_l1_potential_error", median_of(l1), 0, trials});
    if (cfg.target.kind() == TargetKind::Circle) {
      res.rows.push_back({p, "median_distance_to_reference_roots", median_of(ref), 0, trials});
      res.rows.push_back({p, "max_distance_to_circle", *std::max_element(circ.begin(), circ.end()), 0, trials});
    }

    // Concentrated sampler around the first trial's section.
    const auto sampler = concentrated_sampler(recs.front());
    const CVector centre = fs_coordinates(recs.front().g).normalized();
    const ProjectivePoint c(centre);
    const auto n = static_cast<std::size_t>(x.nsamples);
    std::vector<char> outside(n);
    parallel_for(
        n,
        [&](std::size_t i) {
          auto rng = substream(x.seed ^ 0xc011ull, static_cast<std::uint64_t>(p), i);
          outside[i] = fs_distance(ProjectivePoint(sampler(rng).v), c) >= recs.front().concentration_radius;
        },
        x.threads);
    const double q = std::accumulate(outside.begin(), outside.end(), 0.0) / n;
    const double budget = 1.0 / (static_cast<double>(p) * p);
    const double se = std::sqrt(budget * (1 - budget) / n);
    res.rows.push_back({p, "concentrated_exceptional_frequency", q, std::sqrt(q * (1 - q) / n), x.nsamples});
    res.rows.push_back({p, "exceptional_budget", budget, 0, 0});
    res.rows.push_back({p, "concentration_radius", recs.front().concentration_radius, 0, 0});
    if (q > budget + 3.0 * se) fail(res, "p=" + std::to_string(p) + ": concentrated sampler exceeds its 1/p^2 budget");
    levels.push_back({{"p", p}, {"first_trial", to_json(recs.front())}});
  }
  res.summary["levels"] = levels;
  res.summary["target_kind"] = to_string(cfg.target.kind());
  return res;
}

}  // namespace

CommandResult execute(const RunConfig& config) {
  validate(config);
  switch (config.command) {
    case Command::Bergman: return cmd_bergman(config);
    case Command::Sample: return cmd_sample(config);
    case Command::Equidist: return cmd_equidist(config);
    case Command::Moderate: return cmd_moderate(config);
    case Command::Constants: return cmd_constants(config);
    case Command::Approx: return cmd_approx(config);
  }
  throw Error(ErrorCode::ValidationError, "unknown command");
}

int run_command(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  CommandResult res = execute(config);
  const std::string hash = config_hash(config);
  const std::uint64_t seed = config.experiment.seed;
  write_atomic(config.out_dir / config.csv_name, render_csv(res.rows, seed, hash));

  const Dictionary dict = dictionary_for(config.experiment);
  nlohmann::json doc{{"schema_version", kSchemaVersion},
                     {"tool", "zerolab"},
                     {"command", to_string(config.command)},
                     {"config_hash", hash},
                     {"seed", seed},
                     {"config", print_config(config)},
                     {"dictionary_version", dict.version},
                     {"dictionary_hash", dict.hash()},
                     {"probe_version", kProbeVersion},
                     {"thresholds_passed", res.thresholds_passed},
                     {"threshold_failures", res.threshold_failures},
                     {"results", res.summary}};
  if (!config.experiment.deterministic)
    doc["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_atomic(config.out_dir / config.json_name, doc.dump(2) + "\n");
  return res.thresholds_passed ? kExitOk : kExitThreshold;
}

nlohmann::json error_json(const std::exception& e) {
  nlohmann::json j{{"schema_version", kSchemaVersion}, {"error", "Unknown"}, {"message", e.what()}};
  if (const auto* err = dynamic_cast<const Error*>(&e)) j["error"] = std::string(to_string(err->code()));
  if (const auto* v = dynamic_cast<const ValidationErrors*>(&e)) j["issues"] = v->issues();
  if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
    j["line"] = p->line();
    j["column"] = p->column();
  }
  return j;
}

}  // namespace zerolab
