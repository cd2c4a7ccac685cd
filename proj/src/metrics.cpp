#include "zerolab/metrics.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "zerolab/calculus.hpp"

namespace zerolab {

MetricWeight::MetricWeight(int n) : n_(n), q_(CMatrix::Zero(n + 1, n + 1)) {
  if (n != 1 && n != 2) throw Error(ErrorCode::InvalidDimension, "metrics are supported on P^1 and P^2");
}

MetricWeight& MetricWeight::set_quadratic(const CMatrix& q) {
  if (q.rows() != n_ + 1 || q.cols() != n_ + 1) throw Error(ErrorCode::DimensionMismatch, "quadratic form size");
  if ((q - q.adjoint()).norm() > 1e-12 * (1.0 + q.norm()))
    throw Error(ErrorCode::ValidationError, "quadratic smooth part must be Hermitian");
  q_ = 0.5 * (q + q.adjoint());
  kind_ = q_.norm() == 0.0 ? SmoothKind::Zero : SmoothKind::Quadratic;
  return *this;
}

MetricWeight& MetricWeight::add_singular(const CVector& form, double lambda) {
  if (form.size() != n_ + 1) throw Error(ErrorCode::DimensionMismatch, "singular form size");
  if (!(form.norm() > 0.0)) throw Error(ErrorCode::ValidationError, "singular form is zero");
  if (!(lambda > 0.0 && lambda < 1.0)) throw Error(ErrorCode::ValidationError, "pole coefficient must lie in (0,1)");
  if (lambda_total() + lambda >= 1.0) throw Error(ErrorCode::ValidationError, "pole coefficients must sum below 1");
  // Unit forms are kept as given so printed configs reload bit-exactly.
  const double norm = form.norm();
  const bool unit = std::abs(norm - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon();
  terms_.push_back({unit ? form : CVector(form / norm), lambda});
  return *this;
}

std::vector<CVector> MetricWeight::singular_forms() const {
  std::vector<CVector> out;
  for (const auto& t : terms_) out.push_back(t.form);
  return out;
}

double MetricWeight::lambda_total() const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.lambda;
  return s;
}

double MetricWeight::smooth_part(const ProjectivePoint& x) const {
  if (kind_ == SmoothKind::Zero) return 0.0;
  return x.coords().dot(q_ * x.coords()).real();
}

double MetricWeight::distance_to_singular(const ProjectivePoint& x) const {
  double d = 1.0;
  for (const auto& t : terms_) d = std::min(d, distance_to_hyperplane(x, t.form));
  return d;
}

std::uint64_t MetricWeight::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  auto mix_double = [&](double v) {
    if (v == 0.0) v = 0.0;  // fold -0
    mix(&v, sizeof v);
  };
  mix(&n_, sizeof n_);
  const int kind = static_cast<int>(kind_);
  mix(&kind, sizeof kind);
  if (kind_ == SmoothKind::Quadratic)
    for (int i = 0; i < q_.size(); ++i) {
      mix_double(q_.data()[i].real());
      mix_double(q_.data()[i].imag());
    }
  for (const auto& t : terms_) {
    for (int i = 0; i < t.form.size(); ++i) {
      mix_double(t.form[i].real());
      mix_double(t.form[i].imag());
    }
    mix_double(t.lambda);
  }
  return h;
}

double weight_at(const MetricWeight& h, const ProjectivePoint& x) {
  double v = h.smooth_part(x);
  for (const auto& t : h.singular_terms()) {
    const double a = std::abs(cplx(t.form.transpose() * x.coords()));
    if (a == 0.0) return -std::numeric_limits<double>::infinity();
    v += t.lambda * std::log(a);
  }
  return v;
}

namespace {

void check_guard(const MetricWeight& h, const QuadratureGrid& grid) {
  if (grid.n != h.n()) throw Error(ErrorCode::DimensionMismatch, "grid and metric dimensions differ");
  if (h.singular_terms().empty()) return;
  for (const auto& x : grid.points)
    if (h.distance_to_singular(x) < kGridGuardRadius)
      throw Error(ErrorCode::QuadratureDivergence, "grid node inside the guard radius of the singular locus");
}

}  // namespace

double curvature_pair(const MetricWeight& h, const TestForm& u, const QuadratureGrid& grid) {
  check_guard(h, grid);
  const GridData& d = u.on(grid);
  long double acc = 0.0L;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double phi = weight_at(h, grid.points[i]);
    const double term = d.values[i] + phi * d.ddc[i];
    if (!std::isfinite(term)) throw Error(ErrorCode::QuadratureDivergence, "non-finite curvature integrand");
    acc += static_cast<long double>(grid.weights[i]) * term;
  }
  return static_cast<double>(acc);
}

double curvature_pair_closed_form(const MetricWeight& h, const TestForm& u, const QuadratureGrid& grid) {
  if (h.n() != 1) throw Error(ErrorCode::InvalidDimension, "closed-form curvature pairing exists on P^1 only");
  const GridData& d = u.on(grid);
  long double vol = 0.0L, smooth = 0.0L;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    vol += static_cast<long double>(grid.weights[i]) * d.values[i];
    smooth += static_cast<long double>(grid.weights[i]) * h.smooth_part(grid.points[i]) * d.ddc[i];
  }
  double out = (1.0 - h.lambda_total()) * static_cast<double>(vol) + static_cast<double>(smooth);
  for (const auto& t : h.singular_terms()) {
    const ProjectivePoint a{t.form[1], -t.form[0]};
    out += t.lambda * u(a);
  }
  return out;
}

NonPositiveError::NonPositiveError(const ProjectivePoint& witness, double epsilon_hat)
    : Error(ErrorCode::NonPositive,
            [&] {
              std::ostringstream os;
              os << "curvature margin " << epsilon_hat << " at witness [";
              for (int i = 0; i < witness.coords().size(); ++i)
                os << (i ? " : " : "") << witness[i].real() << (witness[i].imag() < 0 ? "" : "+")
                   << witness[i].imag() << "i";
              os << "]";
              return os.str();
            }()),
      witness_(witness),
      epsilon_hat_(epsilon_hat) {}

PositivityReport check_positivity(const MetricWeight& h, const QuadratureGrid& grid) {
  if (grid.n != h.n()) throw Error(ErrorCode::DimensionMismatch, "grid and metric dimensions differ");
  const double base = 1.0 - h.lambda_total();
  PositivityReport rep;
  rep.epsilon_hat = std::numeric_limits<double>::infinity();
  if (h.smooth_kind() == SmoothKind::Zero) {
    rep.epsilon_hat = base;
    rep.witness = grid.points.front();
  } else {
    const PointFunction phi = [&h](const ProjectivePoint& x) { return h.smooth_part(x); };
    for (const auto& x : grid.points) {
      const CMatrix hess = complex_hessian(phi, x);
      // Relative eigenvalues against omega_FS are those of 2H in the centred chart.
      const double lmin = Eigen::SelfAdjointEigenSolver<CMatrix>(hess, Eigen::EigenvaluesOnly).eigenvalues()[0];
      const double eps = base + 2.0 * lmin;
      if (eps < rep.epsilon_hat) {
        rep.epsilon_hat = eps;
        rep.witness = x;
      }
    }
  }
  if (!(rep.epsilon_hat > 0.0)) throw NonPositiveError(rep.witness, rep.epsilon_hat);
  rep.passed = rep.epsilon_hat >= h.positivity_margin;
  return rep;
}

namespace {

CVector gaussian_vector(int size, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector v(size);
  for (int i = 0; i < size; ++i) v[i] = cplx(g(rng), g(rng));
  return v;
}

// A random point on {l = 0}.
CVector point_on_locus(const CVector& form, std::mt19937_64& rng) {
  const CVector normal = form.conjugate();
  CVector v = gaussian_vector(static_cast<int>(form.size()), rng);
  v -= normal * (normal.dot(v));
  return v.normalized();
}

}  // namespace

HoelderReport check_hoelder(const MetricWeight& h, int samples, std::uint64_t rng_seed) {
  if (samples < 100) throw Error(ErrorCode::ValidationError, "check_hoelder needs at least 100 samples");
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int size = h.n() + 1;
  const auto& terms = h.singular_terms();
  const auto& hp = h.hoelder;
  HoelderReport rep;
  for (int s = 0; s < samples; ++s) {
    CVector z, w;
    if (terms.empty() || s % 2 == 0) {
      z = gaussian_vector(size, rng);
      // Mix far pairs with close ones so both scales of dist(z,w) are seen.
      w = s % 4 < 2 ? gaussian_vector(size, rng) : CVector(z.normalized() + std::pow(10.0, -4 * unif(rng)) *
                                                                              gaussian_vector(size, rng));
    } else {
      const auto& term = terms[static_cast<std::size_t>(s / 2) % terms.size()];
      const CVector a = point_on_locus(term.form, rng);
      const double r1 = std::pow(10.0, -5 * unif(rng));
      z = a + r1 * gaussian_vector(size, rng);
      w = z.normalized() + r1 * std::pow(10.0, -2 * unif(rng)) * gaussian_vector(size, rng);
    }
    const ProjectivePoint pz(z), pw(w);
    const double dz = h.distance_to_singular(pz), dw = h.distance_to_singular(pw);
    if (dz == 0.0 || dw == 0.0) continue;
    const double lhs = std::abs(weight_at(h, pz) - weight_at(h, pw));
    const double dist = fs_distance(pz, pw);
    const double rhs = hp.c * std::pow(dist, hp.nu) / std::pow(std::min(dz, dw), hp.delta);
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_a = pz;
      rep.worst_b = pw;
    }
  }
  rep.passed = rep.worst_ratio <= 1.0;
  return rep;
}

std::vector<std::string> general_position_violations(std::span<const MetricWeight> metrics) {
  std::vector<std::string> out;
  for (std::size_t a = 0; a < metrics.size(); ++a)
    for (std::size_t b = a + 1; b < metrics.size(); ++b)
      for (const auto& ta : metrics[a].singular_terms())
        for (const auto& tb : metrics[b].singular_terms()) {
          if (ta.form.size() != tb.form.size()) continue;
          if (std::abs(ta.form.dot(tb.form)) > 1.0 - 1e-10)
            out.push_back("general position: slots " + std::to_string(a + 1) + " and " + std::to_string(b + 1) +
                          " share a singular locus");
        }
  return out;
}

}  // namespace zerolab
