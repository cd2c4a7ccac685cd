#include "zerolab/polynomials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>

#include "zerolab/error.hpp"

namespace zerolab {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

int monomial_count(int n, int p) {
  if (n == 1) return p + 1;
  if (n == 2) return (p + 1) * (p + 2) / 2;
  throw Error(ErrorCode::InvalidDimension, "polynomials are supported on P^1 and P^2");
}

const std::vector<Exponents>& monomials(int n, int p) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::vector<Exponents>> cache;
  std::lock_guard lock(mutex);
  auto [it, inserted] = cache.try_emplace({n, p});
  if (inserted) {
    auto& list = it->second;
    if (n == 1) {
      for (int k = 0; k <= p; ++k) list.push_back({p - k, k, 0});
    } else if (n == 2) {
      for (int a0 = p; a0 >= 0; --a0)
        for (int a1 = p - a0; a1 >= 0; --a1) list.push_back({a0, a1, p - a0 - a1});
    } else {
      cache.erase(it);
      throw Error(ErrorCode::InvalidDimension, "polynomials are supported on P^1 and P^2");
    }
  }
  return it->second;
}

int monomial_index(int n, int p, const Exponents& e) {
  if (n == 1) return e[1];
  const int s = p - e[0];
  return s * (s + 1) / 2 + (s - e[1]);
}

CVector monomial_values(int n, int p, const CVector& z) {
  const auto& mons = monomials(n, p);
  std::vector<std::vector<cplx>> pw(n + 1, std::vector<cplx>(p + 1));
  for (int i = 0; i <= n; ++i) {
    pw[i][0] = 1.0;
    for (int k = 1; k <= p; ++k) pw[i][k] = pw[i][k - 1] * z[i];
  }
  CVector out(static_cast<Eigen::Index>(mons.size()));
  for (std::size_t m = 0; m < mons.size(); ++m) {
    cplx v = pw[0][mons[m][0]] * pw[1][mons[m][1]];
    if (n == 2) v *= pw[2][mons[m][2]];
    out[static_cast<Eigen::Index>(m)] = v;
  }
  return out;
}

HomogeneousPolynomial::HomogeneousPolynomial(int n, int degree, CVector coeffs, bool allow_zero)
    : n_(n), degree_(degree), coeffs_(std::move(coeffs)) {
  if (n != 1 && n != 2) throw Error(ErrorCode::InvalidDimension, "polynomials are supported on P^1 and P^2");
  if (degree < 0) throw Error(ErrorCode::DimensionMismatch, "negative degree");
  if (coeffs_.size() != monomial_count(n, degree))
    throw Error(ErrorCode::DimensionMismatch, "coefficient vector length must be binomial(n+p, n)");
  if (!allow_zero && degree > 0 && is_zero()) throw Error(ErrorCode::ZeroPolynomial, "identically zero polynomial");
}

HomogeneousPolynomial HomogeneousPolynomial::zero(int n, int degree) {
  return HomogeneousPolynomial(n, degree, CVector::Zero(monomial_count(n, degree)), true);
}

HomogeneousPolynomial HomogeneousPolynomial::linear(const CVector& form) {
  const int n = static_cast<int>(form.size()) - 1;
  CVector c(n + 1);
  // Degree-1 graded-lex order is z_0, z_1, z_2.
  for (int i = 0; i <= n; ++i) c[i] = form[i];
  return HomogeneousPolynomial(n, 1, std::move(c));
}

HomogeneousPolynomial operator*(const HomogeneousPolynomial& f, const HomogeneousPolynomial& g) {
  if (f.n() != g.n()) throw Error(ErrorCode::DimensionMismatch, "product of polynomials on different spaces");
  const int n = f.n(), p = f.degree() + g.degree();
  const auto& mf = monomials(n, f.degree());
  const auto& mg = monomials(n, g.degree());
  CVector out = CVector::Zero(monomial_count(n, p));
  for (std::size_t i = 0; i < mf.size(); ++i) {
    const cplx a = f.coeffs()[static_cast<Eigen::Index>(i)];
    if (a == cplx(0)) continue;
    for (std::size_t j = 0; j < mg.size(); ++j) {
      const Exponents e{mf[i][0] + mg[j][0], mf[i][1] + mg[j][1], mf[i][2] + mg[j][2]};
      out[monomial_index(n, p, e)] += a * g.coeffs()[static_cast<Eigen::Index>(j)];
    }
  }
  return HomogeneousPolynomial(n, p, std::move(out), true);
}

HomogeneousPolynomial operator+(const HomogeneousPolynomial& f, const HomogeneousPolynomial& g) {
  if (f.n() != g.n() || f.degree() != g.degree()) throw Error(ErrorCode::DimensionMismatch, "sum of unlike polynomials");
  return HomogeneousPolynomial(f.n(), f.degree(), f.coeffs() + g.coeffs(), true);
}

HomogeneousPolynomial operator*(cplx s, const HomogeneousPolynomial& f) {
  return HomogeneousPolynomial(f.n(), f.degree(), s * f.coeffs(), true);
}

cplx evaluate_raw(const HomogeneousPolynomial& f, const CVector& z) {
  if (z.size() != f.n() + 1) throw Error(ErrorCode::DimensionMismatch, "evaluation point dimension");
  return f.coeffs().transpose() * monomial_values(f.n(), f.degree(), z);
}

cplx evaluate(const HomogeneousPolynomial& f, const ProjectivePoint& x) { return evaluate_raw(f, x.coords()); }

CVector gradient(const HomogeneousPolynomial& f, const CVector& z) {
  const int n = f.n(), p = f.degree();
  CVector g = CVector::Zero(n + 1);
  if (p == 0) return g;
  const CVector lower = monomial_values(n, p - 1, z);
  const auto& mons = monomials(n, p);
  for (std::size_t m = 0; m < mons.size(); ++m) {
    const cplx c = f.coeffs()[static_cast<Eigen::Index>(m)];
    if (c == cplx(0)) continue;
    for (int i = 0; i <= n; ++i) {
      if (mons[m][i] == 0) continue;
      Exponents e = mons[m];
      e[i] -= 1;
      g[i] += c * static_cast<double>(mons[m][i]) * lower[monomial_index(n, p - 1, e)];
    }
  }
  return g;
}

HomogeneousPolynomial compose(const HomogeneousPolynomial& f, const CMatrix& unitary) {
  const int n = f.n(), p = f.degree();
  if (unitary.rows() != n + 1 || unitary.cols() != n + 1) throw Error(ErrorCode::DimensionMismatch, "unitary size");
  // powers[i][k] = ((U w)_i)^k as polynomials in w.
  std::vector<std::vector<HomogeneousPolynomial>> powers(n + 1);
  for (int i = 0; i <= n; ++i) {
    powers[i].push_back(HomogeneousPolynomial(n, 0, CVector::Ones(1), true));
    const CVector row = unitary.row(i).transpose();
    const HomogeneousPolynomial lin(n, 1, row, true);
    for (int k = 1; k <= p; ++k) powers[i].push_back(powers[i].back() * lin);
  }
  const auto& mons = monomials(n, p);
  CVector out = CVector::Zero(monomial_count(n, p));
  for (std::size_t m = 0; m < mons.size(); ++m) {
    const cplx c = f.coeffs()[static_cast<Eigen::Index>(m)];
    if (c == cplx(0)) continue;
    HomogeneousPolynomial term = powers[0][mons[m][0]] * powers[1][mons[m][1]];
    if (n == 2) term = term * powers[2][mons[m][2]];
    out += c * term.coeffs();
  }
  return HomogeneousPolynomial(n, p, std::move(out), true);
}

HomogeneousPolynomial from_roots_p1(std::span<const ProjectivePoint> roots) {
  HomogeneousPolynomial g(1, 0, CVector::Ones(1), true);
  for (const auto& r : roots) {
    CVector form(2);
    form << r[1], -r[0];
    g = g * HomogeneousPolynomial(1, 1, form, true);
  }
  return g;
}

int ZeroSet::total_multiplicity() const {
  int total = 0;
  for (const auto& wp : points) total += wp.multiplicity;
  return total;
}

namespace {

// Parlett-Reinsch balancing (radix 2) in place.
void balance(CMatrix& a) {
  const int n = static_cast<int>(a.rows());
  bool done = false;
  for (int sweep = 0; sweep < 100 && !done; ++sweep) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      double g = r / 2.0;
      while (c < g) {
        f *= 2.0;
        c *= 4.0;
      }
      g = r * 2.0;
      while (c > g) {
        f /= 2.0;
        c /= 4.0;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.col(i) *= f;
        a.row(i) /= f;
      }
    }
  }
}

// Roots of sum_k q[k] t^k with q[0] != 0 and q[D] != 0.
std::vector<cplx> companion_roots(const std::vector<cplx>& q) {
  const int deg = static_cast<int>(q.size()) - 1;
  if (deg < 1) return {};
  if (deg == 1) return {-q[0] / q[1]};
  const double rho = std::pow(std::abs(q[0]) / std::abs(q[deg]), 1.0 / deg);
  // Monic polynomial in tau = t / rho.
  std::vector<cplx> a(deg);
  for (int j = 0; j < deg; ++j) a[j] = q[j] * std::pow(rho, j - deg) / q[deg];
  CMatrix comp = CMatrix::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -a[i];
  balance(comp);
  Eigen::ComplexEigenSolver<CMatrix> es(comp, false);
  std::vector<cplx> out;
  out.reserve(deg);
  for (int i = 0; i < deg; ++i) out.push_back(rho * es.eigenvalues()[i]);
  return out;
}

cplx horner(const std::vector<cplx>& q, cplx t, cplx* deriv) {
  cplx v = 0.0, d = 0.0;
  for (int k = static_cast<int>(q.size()) - 1; k >= 0; --k) {
    d = d * t + v;
    v = v * t + q[k];
  }
  if (deriv) *deriv = d;
  return v;
}

// Newton in the chart where the root is bounded: t for |t| <= 1, s = 1/t
// otherwise. Steps are only accepted while the residual decreases.
cplx polish(const std::vector<cplx>& q, const std::vector<cplx>& q_rev, cplx t) {
  const bool inverted = std::abs(t) > 1.0;
  const auto& poly = inverted ? q_rev : q;
  cplx x = inverted ? 1.0 / t : t;
  cplx d;
  double res = std::abs(horner(poly, x, &d));
  for (int it = 0; it < 12 && res > 0.0; ++it) {
    if (d == cplx(0)) break;
    const cplx step = horner(poly, x, &d) / d;
    if (!std::isfinite(std::abs(step)) || std::abs(step) > 0.1 * (1.0 + std::abs(x))) break;
    const cplx y = x - step;
    cplx dy;
    const double ry = std::abs(horner(poly, y, &dy));
    if (!(ry < res)) break;
    x = y;
    res = ry;
    d = dy;
  }
  return inverted ? (x == cplx(0) ? std::numeric_limits<double>::infinity() : 1.0 / x) : x;
}

struct Cluster {
  std::vector<std::size_t> members;
  int multiplicity = 0;
};

ProjectivePoint centroid(const std::vector<WeightedPoint>& pts, const std::vector<std::size_t>& members) {
  const CVector& ref = pts[members.front()].point.coords();
  CVector acc = CVector::Zero(ref.size());
  for (std::size_t m : members) {
    const CVector& z = pts[m].point.coords();
    const cplx ph = ref.dot(z);
    const cplx align = std::abs(ph) > 0 ? std::conj(ph) / std::abs(ph) : cplx(1.0);
    acc += static_cast<double>(pts[m].multiplicity) * align * z;
  }
  return ProjectivePoint(acc);
}

// Coefficients of lambda -> f(c + lambda e) with their rounding scale.
void line_taylor(const HomogeneousPolynomial& f, const CVector& c, const CVector& e, std::vector<cplx>& b,
                 std::vector<double>& babs) {
  const int p = f.degree();
  b.assign(p + 1, 0.0);
  babs.assign(p + 1, 0.0);
  // Expand (c0 + l e0)^{p-k} (c1 + l e1)^k.
  for (int k = 0; k <= p; ++k) {
    const cplx ck = f.coeffs()[k];
    if (ck == cplx(0)) continue;
    std::vector<cplx> poly{1.0};
    std::vector<double> pabs{1.0};
    auto mul = [&](cplx u, cplx v) {
      std::vector<cplx> next(poly.size() + 1, 0.0);
      std::vector<double> nabs(poly.size() + 1, 0.0);
      for (std::size_t i = 0; i < poly.size(); ++i) {
        next[i] += poly[i] * u;
        next[i + 1] += poly[i] * v;
        nabs[i] += pabs[i] * std::abs(u);
        nabs[i + 1] += pabs[i] * std::abs(v);
      }
      poly.swap(next);
      pabs.swap(nabs);
    };
    for (int i = 0; i < p - k; ++i) mul(c[0], e[0]);
    for (int i = 0; i < k; ++i) mul(c[1], e[1]);
    for (int j = 0; j <= p; ++j) {
      b[j] += ck * poly[j];
      babs[j] += std::abs(ck) * pabs[j];
    }
  }
}

// The members of a cluster of total multiplicity m are consistent with one
// m-fold zero when the low Taylor coefficients along the chart line through
// the centroid are as small as m nearby roots force them to be.
bool multiplicity_verified(const HomogeneousPolynomial& f, const std::vector<WeightedPoint>& pts,
                           const std::vector<std::size_t>& members, int m) {
  if (m <= 1) return true;
  if (m > f.degree()) return false;
  const ProjectivePoint c = centroid(pts, members);
  CVector e(2);
  e << -std::conj(c[1]), std::conj(c[0]);
  std::vector<cplx> b;
  std::vector<double> babs;
  line_taylor(f, c.coords(), e, b, babs);
  double rho = 0.0;
  for (std::size_t idx : members) {
    const CVector& z = pts[idx].point.coords();
    const cplx den = c.coords().dot(z);
    if (std::abs(den) < 0.5) return false;
    rho = std::max(rho, std::abs(e.dot(z) / den));
  }
  const double eps = std::numeric_limits<double>::epsilon();
  for (int j = 0; j < m; ++j) {
    const double bound = 4.0 * binomial(m, j) * std::pow(rho, m - j) * std::abs(b[m]) + 64.0 * eps * babs[j] +
                         64.0 * eps * babs[m] * std::pow(rho, m - j);
    if (std::abs(b[j]) > bound) return false;
  }
  return true;
}

std::vector<WeightedPoint> cluster_points(const HomogeneousPolynomial& f, std::vector<WeightedPoint> pts) {
  const std::size_t count = pts.size();
  // Single linkage at the primary tolerance.
  std::vector<std::size_t> parent(count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = i + 1; j < count; ++j)
      if (fs_distance(pts[i].point, pts[j].point) <= kClusterTolerance) parent[find(i)] = find(j);

  std::map<std::size_t, Cluster> groups;
  for (std::size_t i = 0; i < count; ++i) {
    auto& g = groups[find(i)];
    g.members.push_back(i);
    g.multiplicity += pts[i].multiplicity;
  }
  std::vector<Cluster> clusters;
  for (auto& [root, g] : groups) {
    if (g.members.size() > 1 && !multiplicity_verified(f, pts, g.members, g.multiplicity)) {
      for (std::size_t m : g.members) clusters.push_back({{m}, pts[m].multiplicity});
    } else {
      clusters.push_back(std::move(g));
    }
  }

  // Second pass: eigenvalues of an m-fold root scatter like eps^(1/m), so
  // nearby clusters are merged when the Taylor test confirms it.
  constexpr double kMergeRadius = 1e-4;
  for (bool merged = true; merged;) {
    merged = false;
    double best = kMergeRadius;
    std::size_t bi = 0, bj = 0;
    std::vector<ProjectivePoint> cents;
    for (const auto& cl : clusters) cents.push_back(centroid(pts, cl.members));
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double d = fs_distance(cents[i], cents[j]);
        if (d <= best) {
          std::vector<std::size_t> joint = clusters[i].members;
          joint.insert(joint.end(), clusters[j].members.begin(), clusters[j].members.end());
          if (multiplicity_verified(f, pts, joint, clusters[i].multiplicity + clusters[j].multiplicity)) {
            best = d;
            bi = i;
            bj = j;
            merged = true;
          }
        }
      }
    if (merged) {
      clusters[bi].members.insert(clusters[bi].members.end(), clusters[bj].members.begin(), clusters[bj].members.end());
      clusters[bi].multiplicity += clusters[bj].multiplicity;
      clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    }
  }

  std::vector<WeightedPoint> out;
  for (const auto& cl : clusters) out.push_back({centroid(pts, cl.members), cl.multiplicity});
  return out;
}

}  // namespace

ZeroSet roots_p1(const HomogeneousPolynomial& f) {
  if (f.n() != 1) throw Error(ErrorCode::InvalidDimension, "roots_p1 needs a binary form");
  if (f.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "identically zero polynomial");
  const int p = f.degree();
  ZeroSet zs;
  zs.expected_total = p;
  if (p == 0) return zs;

  const CVector& c = f.coeffs();
  const double cut = 1e-15 * c.norm();
  int low = 0;  // vanishing order at [1:0]
  while (low <= p && std::abs(c[low]) <= cut) ++low;
  int high = 0;  // leading deficiency: vanishing order at [0:1]
  while (high <= p && std::abs(c[p - high]) <= cut) ++high;

  std::vector<WeightedPoint> pts;
  if (low > 0) pts.push_back({ProjectivePoint{1.0, 0.0}, low});
  if (high > 0) pts.push_back({ProjectivePoint{0.0, 1.0}, high});

  std::vector<cplx> q;
  for (int k = low; k <= p - high; ++k) q.push_back(c[k]);
  std::vector<cplx> q_rev(q.rbegin(), q.rend());
  for (cplx t : companion_roots(q)) {
    t = polish(q, q_rev, t);
    if (!std::isfinite(std::abs(t))) {
      pts.push_back({ProjectivePoint{0.0, 1.0}, 1});
    } else if (std::abs(t) <= 1.0) {
      pts.push_back({ProjectivePoint{1.0, t}, 1});
    } else {
      pts.push_back({ProjectivePoint{1.0 / t, 1.0}, 1});
    }
  }
  zs.points = cluster_points(f, std::move(pts));
  return zs;
}

namespace {

struct NewtonResult {
  ProjectivePoint point;
  bool converged = false;
  bool singular = false;
};

NewtonResult projective_newton(const HomogeneousPolynomial& f, const HomogeneousPolynomial& g, CVector z, double tol) {
  const double nf = f.coeff_norm(), ng = g.coeff_norm();
  z.normalize();
  NewtonResult out;
  Eigen::Matrix2cd jac;
  for (int it = 0; it < 100; ++it) {
    const cplx fz = evaluate_raw(f, z) / nf;
    const cplx gz = evaluate_raw(g, z) / ng;
    const CMatrix q = unitary_aligning_form(z.conjugate()).rightCols(2);
    jac.row(0) = (gradient(f, z).transpose() * q) / nf;
    jac.row(1) = (gradient(g, z).transpose() * q) / ng;
    const double res = std::max(std::abs(fz), std::abs(gz));
    if (res <= tol && it > 0) {
      out.converged = true;
      break;
    }
    Eigen::Vector2cd rhs(-fz, -gz);
    Eigen::Vector2cd step = jac.jacobiSvd(Eigen::ComputeFullU | Eigen::ComputeFullV).solve(rhs);
    const double sn = step.norm();
    if (!std::isfinite(sn)) break;
    if (sn > 0.5) step *= 0.5 / sn;
    z = (z + q * step).normalized();
    if (res <= tol) {
      out.converged = true;
      break;
    }
  }
  out.point = ProjectivePoint(z);
  const Eigen::JacobiSVD<Eigen::Matrix2cd> svd(jac);
  const auto sv = svd.singularValues();
  out.singular = !(sv[1] > 1e-6 * sv[0]);
  return out;
}

struct RetryableFailure {};

ZeroSet solve_rotated(const HomogeneousPolynomial& f, const HomogeneousPolynomial& g, double tol) {
  const int p = f.degree(), q = g.degree();
  const int bezout = p * q;
  const auto& mf = monomials(2, p);
  const auto& mg = monomials(2, q);
  const int size = p + q;
  const int samples = bezout + 1;

  // Values of the y = w_2 coefficients at (1, x).
  auto y_coeffs = [](const HomogeneousPolynomial& h, const std::vector<Exponents>& mons, cplx x0, cplx x1) {
    std::vector<cplx> a(h.degree() + 1, 0.0);
    for (std::size_t m = 0; m < mons.size(); ++m)
      a[mons[m][2]] += h.coeffs()[static_cast<Eigen::Index>(m)] * std::pow(x0, mons[m][0]) * std::pow(x1, mons[m][1]);
    return a;
  };

  std::vector<cplx> values(samples);
  double max_rel = 0.0;
  for (int k = 0; k < samples; ++k) {
    const cplx x = std::polar(1.0, 2.0 * std::numbers::pi * k / samples);
    const auto a = y_coeffs(f, mf, 1.0, x);
    const auto b = y_coeffs(g, mg, 1.0, x);
    CMatrix syl = CMatrix::Zero(size, size);
    for (int r = 0; r < q; ++r)
      for (int j = 0; j <= p; ++j) syl(r, r + j) = a[p - j];
    for (int r = 0; r < p; ++r)
      for (int j = 0; j <= q; ++j) syl(q + r, r + j) = b[q - j];
    values[k] = syl.partialPivLu().determinant();
    double hadamard = 1.0;
    for (int r = 0; r < size; ++r) hadamard *= syl.row(r).norm();
    max_rel = std::max(max_rel, std::abs(values[k]) / hadamard);
  }
  if (max_rel < 1e-13) throw Error(ErrorCode::SharedFactor, "resultant vanishes identically: common component");

  CVector res(samples);
  for (int j = 0; j < samples; ++j) {
    cplx acc = 0.0;
    for (int k = 0; k < samples; ++k) acc += values[k] * std::polar(1.0, -2.0 * std::numbers::pi * j * k / samples);
    res[j] = acc / static_cast<double>(samples);
  }
  const ZeroSet fibers = roots_p1(HomogeneousPolynomial(1, bezout, res, true));

  ZeroSet out;
  out.expected_total = bezout;
  std::vector<bool> singular_flags;
  for (const auto& fiber : fibers.points) {
    const cplx u0 = fiber.point[0], u1 = fiber.point[1];
    const auto a = y_coeffs(f, mf, u0, u1);
    CVector ycoef(p + 1);
    for (int j = 0; j <= p; ++j) ycoef[j] = a[j];
    if (ycoef.cwiseAbs().maxCoeff() == 0.0) throw RetryableFailure{};
    const ZeroSet ys = roots_p1(HomogeneousPolynomial(1, p, ycoef, true));
    struct Candidate {
      CVector z;
      double score;
    };
    std::vector<Candidate> cands;
    for (const auto& y : ys.points) {
      CVector z(3);
      z << y.point[0] * u0, y.point[0] * u1, y.point[1];
      z.normalize();
      cands.push_back({z, std::abs(evaluate_raw(g, z)) / g.coeff_norm()});
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& l, const Candidate& r) { return l.score < r.score; });
    int need = fiber.multiplicity;
    for (const auto& cand : cands) {
      if (need == 0) break;
      const NewtonResult nr = projective_newton(f, g, cand.z, tol);
      if (!nr.converged) continue;
      bool duplicate = false;
      for (const auto& found : out.points)
        if (fs_distance(found.point, nr.point) <= kClusterTolerance * 100) duplicate = true;
      if (duplicate) continue;
      const int mult = nr.singular ? need : 1;
      out.points.push_back({nr.point, mult});
      singular_flags.push_back(nr.singular);
      need -= mult;
    }
    if (need != 0) throw RetryableFailure{};
  }
  if (out.total_multiplicity() != bezout) throw RetryableFailure{};
  return out;
}

}  // namespace

ZeroSet common_zeros_p2(const HomogeneousPolynomial& f, const HomogeneousPolynomial& g, double tol,
                        std::uint64_t rotation_seed) {
  if (f.n() != 2 || g.n() != 2) throw Error(ErrorCode::InvalidDimension, "common_zeros_p2 needs forms on P^2");
  if (f.is_zero() || g.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "identically zero polynomial");
  if (f.degree() < 1 || g.degree() < 1) throw Error(ErrorCode::DimensionMismatch, "degrees must be positive");
  std::mt19937_64 rng(rotation_seed);
  for (int attempt = 0; attempt < 4; ++attempt) {
    const CMatrix u = random_unitary(3, rng);
    try {
      ZeroSet zs = solve_rotated(compose(f, u), compose(g, u), tol);
      for (auto& wp : zs.points) wp.point = apply_unitary(u, wp.point);
      return zs;
    } catch (const RetryableFailure&) {
      continue;
    }
  }
  throw Error(ErrorCode::NewtonDivergence, "common zeros could not be polished to tolerance after 4 rotations");
}

void to_json(nlohmann::json& j, const HomogeneousPolynomial& f) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (int i = 0; i < f.coeffs().size(); ++i) coeffs.push_back({f.coeffs()[i].real(), f.coeffs()[i].imag()});
  j = nlohmann::json{{"n", f.n()}, {"degree", f.degree()}, {"coeffs", coeffs}};
}

void from_json(const nlohmann::json& j, HomogeneousPolynomial& f) {
  const int n = j.at("n").get<int>();
  const int p = j.at("degree").get<int>();
  const auto& arr = j.at("coeffs");
  CVector c(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i)
    c[static_cast<Eigen::Index>(i)] = cplx(arr[i].at(0).get<double>(), arr[i].at(1).get<double>());
  f = HomogeneousPolynomial(n, p, std::move(c), true);
}

}  // namespace zerolab
