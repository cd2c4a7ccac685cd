#include "zerolab/equidistribution.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "zerolab/calculus.hpp"
#include "zerolab/error.hpp"
#include "zerolab/parallel.hpp"

namespace zerolab {

double zero_current_pair(const ZeroSet& zeros, const TestForm& u, int p, int m, bool strict) {
  if (strict && !zeros.complete())
    throw Error(ErrorCode::IncompleteZeroSet, "zero set has total multiplicity " +
                                                  std::to_string(zeros.total_multiplicity()) + ", expected " +
                                                  std::to_string(zeros.expected_total));
  long double acc = 0.0L;
  for (const auto& z : zeros.points) acc += static_cast<long double>(z.multiplicity) * u(z.point);
  return static_cast<double>(acc / std::pow(static_cast<long double>(p), m));
}

double mixed_curvature_density(const MetricWeight& h1, const MetricWeight& h2, const ProjectivePoint& x) {
  auto levi = [&x](const MetricWeight& h) -> CMatrix {
    CMatrix a = CMatrix::Identity(2, 2);
    if (h.smooth_kind() == SmoothKind::Zero) return a;
    return a + 2.0 * complex_hessian([&h](const ProjectivePoint& y) { return h.smooth_part(y); }, x);
  };
  const CMatrix a = levi(h1), b = levi(h2);
  return 0.5 * (a(0, 0) * b(1, 1) + a(1, 1) * b(0, 0) - a(0, 1) * b(1, 0) - a(1, 0) * b(0, 1)).real();
}

double curvature_target(std::span<const MetricWeight> metrics, const TestForm& u, const QuadratureGrid& grid) {
  const int m = static_cast<int>(metrics.size());
  if (m < 1 || m > 2 || m != grid.n)
    throw Error(ErrorCode::ValidationError, "curvature targets need m = n in {1, 2}, got m = " + std::to_string(m) +
                                                " on P^" + std::to_string(grid.n));
  if (m == 1) return curvature_pair(metrics[0], u, grid);
  for (const auto& h : metrics)
    if (!h.singular_terms().empty())
      throw Error(ErrorCode::UnsupportedSingularWedge, "wedge of two curvature currents with poles");
  const GridData& d = u.on(grid);
  long double acc = 0.0L;
  for (std::size_t i = 0; i < grid.size(); ++i)
    acc += static_cast<long double>(grid.weights[i]) * d.values[i] *
           mixed_curvature_density(metrics[0], metrics[1], grid.points[i]);
  return static_cast<double>(acc);
}

ZeroSet sample_zero_set(const SectionSample& sample, std::span<const BergmanBasis> bases) {
  if (sample.tuple.size() != bases.size())
    throw Error(ErrorCode::DimensionMismatch, "sample has " + std::to_string(sample.tuple.size()) + " slots for " +
                                                  std::to_string(bases.size()) + " bases");
  if (bases.size() == 1 && bases[0].n == 1) return bases[0].zeros_p1(sample.tuple[0]);
  if (bases.size() == 2 && bases[0].n == 2)
    return common_zeros_p2(bases[0].section(sample.tuple[0]), bases[1].section(sample.tuple[1]));
  throw Error(ErrorCode::InvalidDimension, "zero solver supports (n, m) = (1, 1) and (2, 2)");
}

DiscrepancyResult discrepancy(const SectionSample& sample, std::span<const BergmanBasis> bases,
                              std::span<const double> targets, const Dictionary& dictionary, bool strict) {
  DiscrepancyResult r;
  try {
    r.zeros = sample_zero_set(sample, bases);
  } catch (const Error& e) {
    r.failed = true;
    r.failure = std::string(to_string(e.code()));
    return r;
  }
  if (strict && !r.zeros.complete()) {
    r.failed = true;
    r.failure = std::string(to_string(ErrorCode::IncompleteZeroSet));
    return r;
  }
  const int p = bases[0].p;
  const int m = static_cast<int>(bases.size());
  r.value = -1.0;
  for (std::size_t k = 0; k < dictionary.members.size(); ++k) {
    const TestForm& u = dictionary.members[k];
    const double d = std::abs(zero_current_pair(r.zeros, u, p, m, false) - targets[k]) / u.c2_norm();
    if (d > r.value) {
      r.value = d;
      r.argmax = u.name();
    }
  }
  return r;
}

DiscrepancyResult discrepancy(const SectionSample& sample, std::span<const BergmanBasis> bases,
                              std::span<const MetricWeight> metrics, const Dictionary& dictionary,
                              const QuadratureGrid& grid, bool strict) {
  std::vector<double> targets;
  for (const auto& u : dictionary.members) targets.push_back(curvature_target(metrics, u, grid));
  return discrepancy(sample, bases, targets, dictionary, strict);
}

ConstantsReport dinh_sibony_constants(int p, std::span<const int> d_kp, double epsilon, double R_measured) {
  if (d_kp.empty()) throw Error(ErrorCode::ValidationError, "constants need at least one slot");
  for (int d : d_kp)
    if (d < 1) throw Error(ErrorCode::EmptySpace, "every slot needs d_kp >= 1");
  ConstantsReport r;
  r.p = p;
  r.m = static_cast<int>(d_kp.size());
  r.epsilon = epsilon;
  r.d_kp.assign(d_kp.begin(), d_kp.end());
  r.d_0p = std::accumulate(r.d_kp.begin(), r.d_kp.end(), 0);
  r.log_multinomial = std::lgamma(r.d_0p + 1.0);
  for (int d : r.d_kp) r.log_multinomial -= std::lgamma(d + 1.0);
  r.log_c0p = -r.log_multinomial / r.d_0p;
  r.c0p = std::exp(r.log_c0p);

  // Every slot carries a normalized class of O(1), so each wedge has mass 1.
  r.mass = 1.0;
  r.mass_quadrature = std::numeric_limits<double>::quiet_NaN();
  r.d_p = std::pow(static_cast<double>(p), r.m) * r.mass;
  double sum = 0.0;
  for (int d : r.d_kp) sum += static_cast<double>(d) / r.d_0p * r.mass;
  r.delta_p = std::pow(static_cast<double>(p), r.m - 1) / r.c0p * sum;
  r.r_bound = 0.0;
  for (int d : r.d_kp) r.r_bound = std::max(r.r_bound, static_cast<double>(r.d_0p) / d);
  if (R_measured >= 0.0) {
    r.R_hat = R_measured;
    r.R_source = "measured";
  } else {
    r.R_hat = 0.5 * r.r_bound * (1.0 + std::log(static_cast<double>(r.d_0p)));
    r.R_source = "fs_bound";
  }
  r.eta = epsilon * r.d_p / r.delta_p - 3.0 * r.R_hat;
  return r;
}

ConstantsReport dinh_sibony_constants(int p, std::span<const BergmanBasis> bases, std::span<const MetricWeight> metrics,
                                      double epsilon, const QuadratureGrid& grid, double R_measured) {
  std::vector<int> dims;
  for (const auto& b : bases) dims.push_back(b.d_kp());
  ConstantsReport r = dinh_sibony_constants(p, dims, epsilon, R_measured);
  const TestForm one("one", grid.n, [](const ProjectivePoint&) { return 1.0; }, true);
  r.mass_quadrature = curvature_target(metrics, one, grid);
  return r;
}

nlohmann::json to_json(const ConstantsReport& r) {
  return {{"p", r.p},
          {"m", r.m},
          {"d_kp", r.d_kp},
          {"d_0p", r.d_0p},
          {"c_0p", r.c0p},
          {"log_c_0p", r.log_c0p},
          {"log_multinomial", r.log_multinomial},
          {"mass", r.mass},
          {"mass_quadrature", r.mass_quadrature},
          {"d_p", r.d_p},
          {"delta_p", r.delta_p},
          {"r_bound", r.r_bound},
          {"R_hat", r.R_hat},
          {"R_source", r.R_source},
          {"epsilon", r.epsilon},
          {"eta", r.eta}};
}

double LambdaRule::operator()(int p) const {
  return kind == Kind::Log ? coefficient * std::log(static_cast<double>(p))
                           : std::pow(static_cast<double>(p), coefficient);
}

double weighted_quantile(std::span<const double> values, std::span<const double> weights, double level) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double acc = 0.0;
  for (std::size_t i : order) {
    acc += weights[i];
    if (acc >= level * total * (1.0 - 1e-12)) return values[i];
  }
  return values[order.back()];
}

void validate(const ExperimentConfig& c) {
  std::vector<std::string> issues;
  if (c.n < 1 || c.n > 2) issues.push_back("n must be 1 or 2");
  if (c.m < 1) issues.push_back("m must be >= 1");
  if (c.m > c.n) issues.push_back("m <= n violated (m = " + std::to_string(c.m) + ", n = " + std::to_string(c.n) + ")");
  else if (c.m < c.n) issues.push_back("n - m > 0 (test forms of positive bidegree) is not supported");
  if (c.p_list.empty()) issues.push_back("p_list is empty");
  if (!std::is_sorted(c.p_list.begin(), c.p_list.end()) ||
      std::adjacent_find(c.p_list.begin(), c.p_list.end()) != c.p_list.end())
    issues.push_back("p_list must be strictly ascending");
  if (!c.p_list.empty() && c.p_list.front() < 1) issues.push_back("p_list entries must be >= 1");
  if (c.nsamples < 1) issues.push_back("nsamples must be >= 1");
  if (static_cast<int>(c.metrics.size()) != c.m)
    issues.push_back("expected " + std::to_string(c.m) + " metric slots, got " + std::to_string(c.metrics.size()));
  for (std::size_t k = 0; k < c.metrics.size(); ++k)
    if (c.metrics[k].n() != c.n) issues.push_back("metric." + std::to_string(k + 1) + " lives on the wrong P^n");
  for (auto& msg : general_position_violations(c.metrics)) issues.push_back("general position: " + msg);
  if (c.m == 2)
    for (std::size_t k = 0; k < c.metrics.size(); ++k)
      if (!c.metrics[k].singular_terms().empty())
        issues.push_back("metric." + std::to_string(k + 1) + ": poles are unsupported for m = 2");
  if (c.dictionary != "v1") issues.push_back("unknown dictionary version '" + c.dictionary + "'");
  if (c.lambda_rule.kind == LambdaRule::Kind::Power && !(c.lambda_rule.coefficient < c.n))
    issues.push_back("lambda_p = p^b needs b < n");
  if (!(c.lambda_rule.coefficient > 0)) issues.push_back("lambda coefficient must be positive");
  if (!(c.threshold_c > 0)) issues.push_back("threshold_c must be positive");
  if (c.measure.mode == MeasureMode::Perturbed && !(c.measure.c_p >= 0 && c.measure.c_p < 1))
    issues.push_back("measure c_p must lie in [0, 1)");
  if (c.resolution < 8) issues.push_back("resolution must be >= 8");
  if (!(c.atom_radius > 0 && c.atom_radius < 1)) issues.push_back("atom_radius must lie in (0, 1)");
  if (!issues.empty()) throw ValidationErrors(std::move(issues));
}

namespace {

std::vector<CVector> all_singular_forms(const ExperimentConfig& c) {
  std::vector<CVector> forms;
  for (const auto& h : c.metrics)
    for (auto& f : h.singular_forms()) forms.push_back(f);
  return forms;
}

ProjectivePoint pole_point_p1(const CVector& form) { return ProjectivePoint{form[1], -form[0]}; }

}  // namespace

QuadratureGrid grid_for(const ExperimentConfig& c, int p) {
  const int res = std::max(c.resolution, c.n == 1 ? p + 8 : p + 6);
  const auto forms = all_singular_forms(c);
  return cached_quadrature(c.cache_dir, c.n, res, forms);
}

std::vector<BergmanBasis> bases_for(const ExperimentConfig& c, int p, const QuadratureGrid& grid) {
  std::vector<BergmanBasis> out;
  for (const auto& h : c.metrics) out.push_back(cached_basis(c.cache_dir, p, h, grid));
  return out;
}

Dictionary dictionary_for(const ExperimentConfig& c) {
  std::vector<ProjectivePoint> focus;
  if (c.n == 1)
    for (const auto& f : all_singular_forms(c)) focus.push_back(pole_point_p1(f));
  return dictionary_v1(c.n, focus);
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config) {
  validate(config);
  const Dictionary dict = dictionary_for(config);
  for (const auto& u : dict.members) (void)u.c2_norm();
  const auto forms = all_singular_forms(config);
  std::vector<ExperimentRecord> records;
  for (int p : config.p_list) {
    const auto start = std::chrono::steady_clock::now();
    const QuadratureGrid grid = grid_for(config, p);
    const std::vector<BergmanBasis> bases = bases_for(config, p, grid);
    std::vector<double> targets;
    for (const auto& u : dict.members) targets.push_back(curvature_target(config.metrics, u, grid));

    const auto n = static_cast<std::size_t>(config.nsamples);
    std::vector<DiscrepancyResult> results(n);
    std::vector<double> weights(n, 1.0);
    parallel_for(
        n,
        [&](std::size_t i) {
          auto rng = substream(config.seed, static_cast<std::uint64_t>(p), i);
          const SectionSample s = sample_sigma_p(bases, config.measure, rng);
          weights[i] = s.importance_weight;
          results[i] = discrepancy(s, bases, targets, dict, config.strict);
        },
        config.threads);

    ExperimentRecord rec;
    rec.p = p;
    rec.nsamples = config.nsamples;
    rec.seed = config.seed;
    rec.lambda_p = config.lambda_rule(p);
    rec.threshold = config.threshold_c * rec.lambda_p / p;
    rec.dimension = bases[0].dimension();
    for (const auto& b : bases) rec.gram_condition = std::max(rec.gram_condition, b.gram_condition);
    std::vector<double> atom;
    std::vector<double> atom_w;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = results[i];
      if (r.failed) {
        ++rec.failures;
        rec.failure_codes.push_back(r.failure);
        if (r.failure == to_string(ErrorCode::IncompleteZeroSet)) ++rec.incomplete;
        continue;
      }
      if (!r.zeros.complete()) ++rec.incomplete;
      rec.discrepancies.push_back(r.value);
      rec.weights.push_back(weights[i]);
      if (config.n == 1 && !forms.empty()) {
        int near = 0;
        for (const auto& z : r.zeros.points)
          if (distance_to_hyperplane(z.point, forms.front()) < config.atom_radius) near += z.multiplicity;
        atom.push_back(static_cast<double>(near) / p);
        atom_w.push_back(weights[i]);
      }
    }
    const double total_w = std::accumulate(rec.weights.begin(), rec.weights.end(), 0.0);
    if (!rec.discrepancies.empty()) {
      double mean = 0.0, exc = 0.0;
      for (std::size_t i = 0; i < rec.discrepancies.size(); ++i) {
        mean += rec.weights[i] * rec.discrepancies[i];
        if (rec.discrepancies[i] > rec.threshold) exc += rec.weights[i];
      }
      rec.mean = mean / total_w;
      rec.exceptional_fraction = std::clamp(exc / total_w, 0.0, 1.0);
      rec.quantile_levels = {0.1, 0.25, 0.5, 0.75, 0.9};
      for (double q : rec.quantile_levels) rec.quantiles.push_back(weighted_quantile(rec.discrepancies, rec.weights, q));
      rec.median = rec.quantiles[2];
    } else {
      rec.mean = rec.median = std::numeric_limits<double>::quiet_NaN();
    }
    if (atom.empty()) {
      rec.atom_fraction = rec.atom_fraction_stderr = std::numeric_limits<double>::quiet_NaN();
    } else {
      double sw = 0.0, s = 0.0;
      for (std::size_t i = 0; i < atom.size(); ++i) {
        sw += atom_w[i];
        s += atom_w[i] * atom[i];
      }
      rec.atom_fraction = s / sw;
      double var = 0.0;
      for (std::size_t i = 0; i < atom.size(); ++i) var += std::pow(atom_w[i] * (atom[i] - rec.atom_fraction), 2);
      rec.atom_fraction_stderr = std::sqrt(var) / sw;
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace zerolab
