#include "zerolab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "zerolab/error.hpp"
#include "zerolab/parallel.hpp"

namespace zerolab {

PointFunction MeasureSpec::function() const {
  if (mode == MeasureMode::FS) return [](const ProjectivePoint&) { return 0.0; };
  if (perturbation) return perturbation;
  const double c = c_p;
  const int idx = bump_index;
  return [c, idx](const ProjectivePoint& x) { return 0.5 * c * std::norm(x[idx % (x.dim() + 1)]); };
}

CVector sample_fs_section(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVector v(d + 1);
  for (int i = 0; i <= d; ++i) {
    const double re = g(rng), im = g(rng);
    v[i] = cplx(re, im);
  }
  return v.normalized();
}

double perturbation_weight(const MeasureSpec& spec, const CVector& v) {
  if (spec.mode == MeasureMode::FS || (!spec.perturbation && spec.c_p == 0.0)) return 1.0;
  const ProjectivePoint x(v);
  const CMatrix h = complex_hessian(spec.function(), x);
  const CMatrix m = CMatrix::Identity(h.rows(), h.cols()) + 2.0 * h;
  const double det = m.determinant().real();
  if (!(det > 0.0))
    throw Error(ErrorCode::NonPositiveDensity,
                "perturbed Monge-Ampere density " + std::to_string(det) + " <= 0: u exceeds its declared psh modulus");
  return det;
}

SectionSample sample_sigma_p(std::span<const int> dims, const MeasureSpec& spec, std::mt19937_64& rng) {
  SectionSample s;
  for (int d : dims) {
    CVector v = sample_fs_section(d - 1, rng);
    if (spec.mode == MeasureMode::Perturbed) {
      const double w = perturbation_weight(spec, v);
      s.importance_weight *= w;
      s.log_density_diag += std::log(w);
    }
    s.tuple.push_back(std::move(v));
  }
  return s;
}

SectionSample sample_sigma_p(std::span<const BergmanBasis> bases, const MeasureSpec& spec, std::mt19937_64& rng) {
  std::vector<int> dims;
  for (const auto& b : bases) dims.push_back(b.dimension());
  return sample_sigma_p(dims, spec, rng);
}

double effective_sample_size(std::span<const double> weights) {
  double s = 0.0, s2 = 0.0;
  for (double w : weights) {
    s += w;
    s2 += w * w;
  }
  return s2 > 0 ? s * s / s2 : 0.0;
}

MeasureSampler fs_sampler(int N) {
  return [N](std::mt19937_64& rng) { return WeightedDraw{sample_fs_section(N, rng), 1.0}; };
}

MeasureSampler perturbed_sampler(int N, MeasureSpec spec) {
  return [N, spec](std::mt19937_64& rng) {
    CVector v = sample_fs_section(N, rng);
    const double w = perturbation_weight(spec, v);
    return WeightedDraw{std::move(v), w};
  };
}

namespace {

CVector basis_vector(int size, int i) { return CVector::Unit(size, i); }

CVector unit_form(std::initializer_list<std::pair<int, cplx>> entries, int size) {
  CVector v = CVector::Zero(size);
  for (auto [i, c] : entries) v[i] = c;
  return v.normalized();
}

double log_modulus(const CVector& form, const CVector& z) {
  return std::log(std::abs(cplx(form.transpose() * z)));
}

}  // namespace

std::vector<Probe> standard_probes(int N) {
  const int size = N + 1;
  std::vector<Probe> out;
  auto log_probe = [&](const std::string& name, const CVector& form, double coef) {
    // max of log|l(z)| is 0, attained at z = conj(l).
    out.push_back({name, [form, coef](const CVector& z) { return coef * log_modulus(form, z); }, form.conjugate(), false});
  };
  log_probe("log_z0", basis_vector(size, 0), 1.0);
  log_probe("log_zN", basis_vector(size, N), 1.0);
  log_probe("log_diag", unit_form({{0, 1.0}, {N, 1.0}}, size), 1.0);
  log_probe("log_twist", unit_form({{0, 1.0}, {N, cplx(0, 1)}}, size), 1.0);
  log_probe("half_log_z0", basis_vector(size, 0), 0.5);
  {
    const CVector a = basis_vector(size, 0), b = basis_vector(size, N);
    out.push_back({"max_log_z0_zN",
                   [a, b](const CVector& z) { return std::max(log_modulus(a, z), log_modulus(b, z)); }, a, false});
  }
  auto bump_probe = [&](const std::string& name, const CVector& a, double c) {
    out.push_back({name, [a, c](const CVector& z) { return c * (std::norm(a.dot(z)) / z.squaredNorm() - 1.0); }, a,
                   true});
  };
  bump_probe("bump_z0", basis_vector(size, 0), 0.5);
  bump_probe("bump_diag", unit_form({{0, 1.0}, {N, cplx(0, -1)}}, size), 0.5);
  return out;
}

bool check_probe_membership(const Probe& probe, int N, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  if (std::abs(probe.phi(probe.maximizer.normalized())) > 1e-12) return false;
  const PointFunction f = [&probe](const ProjectivePoint& x) { return probe.phi(x.coords()); };
  for (int i = 0; i < samples; ++i) {
    const CVector v = sample_fs_section(N, rng);
    if (probe.phi(v) > 1e-12) return false;
    if (probe.smooth) {
      const CMatrix h = complex_hessian(f, ProjectivePoint(v));
      // Relative to omega_FS the Levi form is 2H.
      const double lmin = Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues()[0];
      if (2.0 * lmin < -1.0 - 1e-4) return false;
    }
  }
  return true;
}

namespace {

struct Draws {
  std::vector<CVector> v;
  std::vector<double> w;
};

Draws draw_all(const MeasureSampler& sampler, long n, std::uint64_t seed, std::uint64_t stream) {
  Draws d;
  d.v.resize(static_cast<std::size_t>(n));
  d.w.resize(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    auto rng = substream(seed, stream, i);
    WeightedDraw wd = sampler(rng);
    d.v[i] = std::move(wd.v);
    d.w[i] = wd.weight;
  });
  return d;
}

Estimate ratio_estimate(std::span<const double> w, std::span<const double> f) {
  long double sw = 0, swf = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    sw += w[i];
    swf += static_cast<long double>(w[i]) * f[i];
  }
  Estimate e;
  e.nsamples = static_cast<long>(w.size());
  e.value = static_cast<double>(swf / sw);
  long double var = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const long double r = static_cast<long double>(w[i]) * (f[i] - e.value);
    var += r * r;
  }
  e.stderr_ = static_cast<double>(std::sqrt(var) / sw);
  return e;
}

double hill_tail_index(std::vector<double> y) {
  const std::size_t k = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(y.size()))));
  if (k < 2) return std::numeric_limits<double>::infinity();
  std::partial_sort(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(k + 1), y.end(), std::greater<>());
  const double ref = y[k];
  if (!(ref > 0.0)) return std::numeric_limits<double>::infinity();
  double h = 0.0;
  for (std::size_t i = 0; i < k; ++i) h += std::log(y[i] / ref);
  h /= static_cast<double>(k);
  return h > 0 ? 1.0 / h : std::numeric_limits<double>::infinity();
}

}  // namespace

ModerateEstimate moderate_integral(const MeasureSampler& sampler, const std::function<double(const CVector&)>& phi,
                                   double alpha, long nsamples, std::uint64_t seed) {
  ModerateEstimate out;
  out.nsamples = nsamples;
  if (alpha == 0.0) {
    out.value = 1.0;
    out.ess = static_cast<double>(nsamples);
    out.tail_index = std::numeric_limits<double>::infinity();
    out.running.assign(4, 1.0);
    return out;
  }
  const Draws d = draw_all(sampler, nsamples, seed, 0);
  std::vector<double> f(d.v.size()), y(d.v.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = std::exp(-alpha * phi(d.v[i]));
    y[i] = d.w[i] * f[i];
  }
  const Estimate e = ratio_estimate(d.w, f);
  out.value = e.value;
  out.stderr_ = e.stderr_;
  out.ess = effective_sample_size(d.w);
  for (long frac : {8, 4, 2, 1}) {
    const std::size_t m = static_cast<std::size_t>(nsamples / frac);
    out.running.push_back(ratio_estimate(std::span(d.w).first(m), std::span(f).first(m)).value);
  }
  out.tail_index = hill_tail_index(y);
  out.divergent = !std::isfinite(out.value) || out.tail_index < kDivergenceTailIndex;
  return out;
}

GrowthFit moderate_growth_fit(std::span<const int> Ns, const MeasureSpec& spec, double alpha0, long nsamples,
                              std::uint64_t seed) {
  if (Ns.empty()) throw Error(ErrorCode::ValidationError, "growth fit needs at least one N");
  GrowthFit fit;
  for (int N : Ns) {
    MeasureSpec s = spec;
    s.mode = MeasureMode::Perturbed;
    const double alpha = alpha0 * std::pow(spec.rho / 4.0, N);
    const Draws d = draw_all(perturbed_sampler(N, s), nsamples, seed, static_cast<std::uint64_t>(N));
    Estimate best{-1.0, 0.0, nsamples};
    std::vector<double> f(d.v.size());
    for (const auto& probe : standard_probes(N)) {
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(-alpha * probe.phi(d.v[i]));
      const Estimate e = ratio_estimate(d.w, f);
      if (e.value > best.value) best = e;
    }
    fit.N.push_back(N);
    fit.alpha.push_back(alpha);
    fit.integral.push_back(best);
  }
  fit.beta0_hat = fit.integral.front().value / fit.N.front();
  fit.holds = true;
  for (std::size_t k = 1; k < fit.N.size(); ++k)
    if (fit.integral[k].value > fit.beta0_hat * fit.N[k] + 3.0 * fit.integral[k].stderr_) fit.holds = false;
  return fit;
}

CapacityEstimate estimate_capacity_constants(const MeasureSampler& sampler, int N, std::span<const Probe> probes,
                                             std::span<const double> t_list, long nsamples, std::uint64_t seed) {
  if (probes.empty()) throw Error(ErrorCode::ValidationError, "probe family is empty");
  const Draws d = draw_all(sampler, nsamples, seed, 0);
  const Draws vol = draw_all(fs_sampler(N), nsamples, seed, 1);
  CapacityEstimate out;
  out.t.assign(t_list.begin(), t_list.end());
  out.Delta.assign(t_list.size(), Estimate{});
  out.R.value = -std::numeric_limits<double>::infinity();
  out.S.value = -1.0;
  std::vector<double> f(d.v.size()), g(vol.v.size()), ind(d.v.size());
  for (const auto& probe : probes) {
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = probe.phi(d.v[i]);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = probe.phi(vol.v[i]);
    const Estimate mean = ratio_estimate(d.w, f);
    const Estimate fs_mean = ratio_estimate(vol.w, g);
    if (-mean.value > out.R.value) {
      out.R = {-mean.value, mean.stderr_, nsamples};
      out.R_probe = probe.name;
    }
    const double s = std::abs(mean.value - fs_mean.value);
    if (s > out.S.value) out.S = {s, std::hypot(mean.stderr_, fs_mean.stderr_), nsamples};
    for (std::size_t k = 0; k < t_list.size(); ++k) {
      for (std::size_t i = 0; i < f.size(); ++i) ind[i] = f[i] - mean.value < -t_list[k] ? 1.0 : 0.0;
      const Estimate p = ratio_estimate(d.w, ind);
      if (p.value > out.Delta[k].value || out.Delta[k].nsamples == 0) out.Delta[k] = p;
    }
  }
  return out;
}

Estimate hyperplane_neighborhood_mass(const MeasureSampler& sampler, const CVector& form, double delta, long nsamples,
                                      std::uint64_t seed) {
  const Draws d = draw_all(sampler, nsamples, seed, 0);
  std::vector<double> ind(d.v.size());
  const double fn = form.norm();
  for (std::size_t i = 0; i < ind.size(); ++i)
    ind[i] = std::abs(cplx(form.transpose() * d.v[i])) / fn < delta ? 1.0 : 0.0;
  return ratio_estimate(d.w, ind);
}

KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    dmax = std::max({dmax, f - i / n, (i + 1) / n - f});
  }
  const double sn = std::sqrt(n);
  const double lambda = (sn + 0.12 + 0.11 / sn) * dmax;
  double q = 0.0;
  for (int j = 1; j <= 100; ++j) q += 2.0 * (j % 2 ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
  return {dmax, std::clamp(q, 0.0, 1.0)};
}

}  // namespace zerolab
