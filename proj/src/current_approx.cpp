#include "zerolab/current_approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "zerolab/error.hpp"
#include "zerolab/parallel.hpp"

namespace zerolab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kCircleNodes = 1024;

ProjectivePoint circle_point(double r, double theta) { return ProjectivePoint{1.0, std::polar(r, theta)}; }

const QuadratureGrid& fs_pairing_grid() {
  static const QuadratureGrid grid = build_quadrature(1, 48);
  return grid;
}

}  // namespace

TargetCurrent TargetCurrent::fs() {
  TargetCurrent t;
  t.fs_weight = 1.0;
  return t;
}

TargetCurrent TargetCurrent::atom(const ProjectivePoint& a) { return atom_list({{a, 1.0}}); }

TargetCurrent TargetCurrent::atom_list(std::vector<Atom> atoms) {
  TargetCurrent t;
  t.atoms = std::move(atoms);
  return t;
}

TargetCurrent TargetCurrent::circle(double radius) {
  TargetCurrent t;
  t.circle_weight = 1.0;
  t.circle_radius = radius;
  return t;
}

TargetKind TargetCurrent::kind() const {
  const int parts = (fs_weight > 0) + (!atoms.empty()) + (circle_weight > 0);
  if (parts > 1) return TargetKind::Mixture;
  if (!atoms.empty()) return TargetKind::Atoms;
  if (circle_weight > 0) return TargetKind::Circle;
  return TargetKind::FS;
}

std::string to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::FS: return "fs";
    case TargetKind::Atoms: return "atoms";
    case TargetKind::Circle: return "circle";
    case TargetKind::Mixture: return "mixture";
  }
  return "unknown";
}

double TargetCurrent::mass() const {
  double m = fs_weight + circle_weight;
  for (const auto& a : atoms) m += a.weight;
  return m;
}

void TargetCurrent::validate() const {
  bool negative = fs_weight < 0 || circle_weight < 0;
  for (const auto& a : atoms) {
    negative = negative || a.weight < 0;
    if (a.point.dim() != 1) throw Error(ErrorCode::InvalidDimension, "target atoms must lie on P^1");
  }
  if (negative) throw Error(ErrorCode::ValidationError, "target weights must be nonnegative");
  if (circle_weight > 0 && !(circle_radius > 0)) throw Error(ErrorCode::ValidationError, "circle radius must be positive");
  if (std::abs(mass() - 1.0) > 1e-6)
    throw Error(ErrorCode::MassMismatch, "target current has mass " + std::to_string(mass()) + ", expected 1");
}

double TargetCurrent::pair(const PointFunction& u) const {
  long double acc = 0.0L;
  if (fs_weight > 0) acc += fs_weight * fs_pairing_grid().integrate(u);
  for (const auto& a : atoms) acc += a.weight * u(a.point);
  if (circle_weight > 0) {
    long double c = 0.0L;
    for (int k = 0; k < kCircleNodes; ++k) c += u(circle_point(circle_radius, kTwoPi * k / kCircleNodes));
    acc += circle_weight * c / kCircleNodes;
  }
  return static_cast<double>(acc);
}

double TargetCurrent::pair(const TestForm& u) const { return pair(u.function()); }

ProjectivePoint TargetCurrent::draw(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double r = unif(rng) * mass();
  if (r < fs_weight) return ProjectivePoint(sample_fs_section(1, rng));
  r -= fs_weight;
  for (const auto& a : atoms) {
    if (r < a.weight) return a.point;
    r -= a.weight;
  }
  if (circle_weight > 0) return circle_point(circle_radius, kTwoPi * unif(rng));
  return atoms.empty() ? ProjectivePoint(sample_fs_section(1, rng)) : atoms.back().point;
}

double raw_potential(const TargetCurrent& target, const ProjectivePoint& x) {
  if (x.dim() != 1) throw Error(ErrorCode::InvalidDimension, "potentials are implemented on P^1");
  // Total mass 1 against int log dist d omega_FS = -1/2.
  double psi = 0.5 - 0.5 * target.fs_weight;
  for (const auto& a : target.atoms) psi += a.weight * std::log(fs_distance(x, a.point));
  if (target.circle_weight > 0) {
    const double r = target.circle_radius;
    psi += target.circle_weight *
           (std::log(std::max(r * std::abs(x[0]), std::abs(x[1]))) - 0.5 * std::log1p(r * r));
  }
  return psi;
}

Potential potential_from_current(const TargetCurrent& target, const QuadratureGrid& grid) {
  target.validate();
  if (grid.n != 1) throw Error(ErrorCode::InvalidDimension, "potentials are implemented on P^1");
  Potential pot;
  pot.values.resize(grid.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    pot.values[i] = raw_potential(target, grid.points[i]);
    best = std::max(best, pot.values[i]);
  }
  std::vector<ProjectivePoint> candidates{ProjectivePoint{1.0, 0.0}, ProjectivePoint{0.0, 1.0}};
  for (const auto& a : target.atoms) candidates.push_back(ProjectivePoint{std::conj(-a.point[1]), std::conj(a.point[0])});
  for (const auto& c : candidates) best = std::max(best, raw_potential(target, c));
  pot.offset = best;
  for (double& v : pot.values) v -= best;
  return pot;
}

double distance_to_circle(const ProjectivePoint& x, double r) {
  // 1 - (|x_0| + r |x_1|)^2 / (1 + r^2) = (r |x_0| - |x_1|)^2 / (1 + r^2) for unit x.
  return std::abs(r * std::abs(x[0]) - std::abs(x[1])) / std::sqrt(1.0 + r * r);
}

namespace {

// Largest-remainder allocation of p points to the component weights.
std::vector<int> allocate(const std::vector<double>& w, int p) {
  std::vector<int> counts(w.size());
  std::vector<std::pair<double, std::size_t>> rem;
  int used = 0;
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double exact = w[k] / total * p;
    counts[k] = static_cast<int>(std::floor(exact));
    used += counts[k];
    rem.push_back({exact - counts[k], k});
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int k = 0; k < p - used; ++k) ++counts[rem[static_cast<std::size_t>(k)].second];
  return counts;
}

std::vector<ProjectivePoint> stratified_roots(const TargetCurrent& t, int p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> w{t.fs_weight};
  for (const auto& a : t.atoms) w.push_back(a.weight);
  w.push_back(t.circle_weight);
  const auto counts = allocate(w, p);
  std::vector<ProjectivePoint> roots;
  for (int j = 0; j < counts.front(); ++j) {
    // |z_0|^2 is uniform under omega_FS.
    const double u = (j + unif(rng)) / counts.front();
    roots.push_back(ProjectivePoint{std::sqrt(u), std::polar(std::sqrt(1.0 - u), kTwoPi * unif(rng))});
  }
  for (std::size_t k = 0; k < t.atoms.size(); ++k)
    for (int j = 0; j < counts[k + 1]; ++j) roots.push_back(t.atoms[k].point);
  const int nc = counts.back();
  for (int j = 0; j < nc; ++j) roots.push_back(circle_point(t.circle_radius, kTwoPi * (j + unif(rng)) / nc));
  return roots;
}

}  // namespace

ApproximationRecord roots_from_measure(const TargetCurrent& target, int p, RootStrategy strategy, std::uint64_t seed,
                                       const QuadratureGrid& grid, const Dictionary& dictionary) {
  target.validate();
  if (p < 1) throw Error(ErrorCode::ValidationError, "p must be >= 1");
  ApproximationRecord rec;
  rec.p = p;
  rec.strategy = strategy;
  rec.concentration_radius = 1.0 / (static_cast<double>(p) * p);
  auto rng = substream(seed, static_cast<std::uint64_t>(p), 0);
  if (strategy == RootStrategy::Stratified) {
    rec.roots = stratified_roots(target, p, rng);
  } else {
    for (int j = 0; j < p; ++j) rec.roots.push_back(target.draw(rng));
  }
  rec.g = from_roots_p1(rec.roots);

  // (1/p) log(|g|/|z|^p) = (1/p) sum log dist(x, r_j); add 1/2 for the raw normalization.
  long double l1 = 0.0L;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& x = grid.points[i];
    double emp = 0.5;
    for (const auto& r : rec.roots) emp += std::log(fs_distance(x, r)) / p;
    l1 += grid.weights[i] * std::abs(emp - raw_potential(target, x));
  }
  rec.l1_potential_error = static_cast<double>(l1);

  for (const auto& u : dictionary.members) {
    long double s = 0.0L;
    for (const auto& r : rec.roots) s += u(r);
    const double d = std::abs(static_cast<double>(s / p) - target.pair(u)) / u.c2_norm();
    rec.member_names.push_back(u.name());
    rec.weak_distances.push_back(d);
    rec.weak_distance = std::max(rec.weak_distance, d);
  }

  if (target.kind() == TargetKind::Circle) {
    std::vector<double> dist;
    for (const auto& r : rec.roots) {
      double best = 1.0;
      for (int k = 0; k < p; ++k) best = std::min(best, fs_distance(r, circle_point(target.circle_radius, kTwoPi * k / p)));
      dist.push_back(best);
      rec.max_distance_to_circle = std::max(rec.max_distance_to_circle, distance_to_circle(r, target.circle_radius));
    }
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2), dist.end());
    rec.median_distance_to_reference = dist[dist.size() / 2];
  }
  return rec;
}

CVector fs_coordinates(const HomogeneousPolynomial& g) {
  if (g.n() != 1) throw Error(ErrorCode::InvalidDimension, "FS coordinates are implemented on P^1");
  const int p = g.degree();
  CVector c(p + 1);
  for (int j = 0; j <= p; ++j)
    c[j] = g.coeffs()[j] * std::exp(0.5 * (std::lgamma(j + 1.0) + std::lgamma(p - j + 1.0) - std::lgamma(p + 2.0)));
  return c;
}

HomogeneousPolynomial section_from_fs_coordinates(const CVector& c) {
  const int p = static_cast<int>(c.size()) - 1;
  CVector g(p + 1);
  for (int j = 0; j <= p; ++j)
    g[j] = c[j] * std::exp(0.5 * (std::lgamma(p + 2.0) - std::lgamma(j + 1.0) - std::lgamma(p - j + 1.0)));
  return HomogeneousPolynomial(1, p, g);
}

MeasureSampler concentrated_sampler(const ApproximationRecord& record, double delta) {
  const int p = record.p;
  const CVector centre = fs_coordinates(record.g).normalized();
  const double escape = 1.0 / (static_cast<double>(p) * p);
  return [p, centre, delta, escape](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (unif(rng) < escape) return WeightedDraw{sample_fs_section(p, rng), 1.0};
    const CVector gauss = sample_fs_section(p, rng) * std::sqrt(static_cast<double>(p + 1));
    CVector xi = gauss - centre * centre.dot(gauss);
    const double s = xi.norm();
    // The chordal distance of [centre + xi] is |xi| / sqrt(1 + |xi|^2) < delta.
    if (s > 0) xi *= delta * std::tanh(s / std::sqrt(static_cast<double>(p))) / s;
    return WeightedDraw{(centre + xi).normalized(), 1.0};
  };
}

MeasureSampler concentrated_sampler(const ApproximationRecord& record) {
  return concentrated_sampler(record, record.concentration_radius);
}

nlohmann::json to_json(const ApproximationRecord& r) {
  nlohmann::json roots = nlohmann::json::array();
  for (const auto& x : r.roots) roots.push_back({{x[0].real(), x[0].imag()}, {x[1].real(), x[1].imag()}});
  nlohmann::json weak = nlohmann::json::object();
  for (std::size_t k = 0; k < r.member_names.size(); ++k) weak[r.member_names[k]] = r.weak_distances[k];
  return {{"p", r.p},
          {"strategy", r.strategy == RootStrategy::Iid ? "iid" : "stratified"},
          {"g", r.g},
          {"roots", roots},
          {"l1_potential_error", r.l1_potential_error},
          {"weak_distances", weak},
          {"weak_distance", r.weak_distance},
          {"median_distance_to_reference", r.median_distance_to_reference},
          {"max_distance_to_circle", r.max_distance_to_circle},
          {"concentration_radius", r.concentration_radius}};
}

}  // namespace zerolab
