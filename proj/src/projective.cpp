#include "zerolab/projective.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "zerolab/error.hpp"

namespace zerolab {

ProjectivePoint::ProjectivePoint(CVector coords) : z_(std::move(coords)) {
  if (z_.size() < 2) throw Error(ErrorCode::InvalidDimension, "projective point needs >= 2 coordinates");
  const double norm = z_.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw Error(ErrorCode::InvalidDimension, "zero or non-finite coordinate vector");
  // Already-unit input (e.g. reloaded from a cache) is kept bit for bit.
  if (std::abs(norm - 1.0) > 4 * std::numeric_limits<double>::epsilon()) z_ /= norm;
}

ProjectivePoint::ProjectivePoint(std::initializer_list<cplx> coords)
    : ProjectivePoint(CVector(Eigen::Map<const CVector>(coords.begin(), static_cast<Eigen::Index>(coords.size())))) {}

int ProjectivePoint::dominant_chart() const {
  Eigen::Index idx = 0;
  z_.cwiseAbs().maxCoeff(&idx);
  return static_cast<int>(idx);
}

double overlap(const ProjectivePoint& a, const ProjectivePoint& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "points live in different projective spaces");
  return std::min(1.0, std::abs(a.coords().dot(b.coords())));
}

bool projectively_equal(const ProjectivePoint& a, const ProjectivePoint& b, double tol) {
  return fs_distance(a, b) <= tol;
}

double fs_distance(const ProjectivePoint& a, const ProjectivePoint& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "points live in different projective spaces");
  // Norm of the component of b orthogonal to a; stable for nearby points,
  // unlike sqrt(1 - |<a,b>|^2).
  const cplx proj = a.coords().dot(b.coords());
  const double d = (b.coords() - proj * a.coords()).norm();
  return std::min(1.0, d);
}

double distance_to_hyperplane(const ProjectivePoint& x, const CVector& form) {
  if (form.size() != x.coords().size()) throw Error(ErrorCode::DimensionMismatch, "linear form size");
  return std::min(1.0, std::abs(cplx(form.transpose() * x.coords())) / form.norm());
}

CMatrix random_unitary(int size, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix a(size, size);
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i) a(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(a);
  CMatrix q = qr.householderQ() * CMatrix::Identity(size, size);
  const CMatrix& r = qr.matrixQR();
  // Phase correction makes the distribution Haar.
  for (int j = 0; j < size; ++j) {
    const cplx d = r(j, j);
    const double ad = std::abs(d);
    if (ad > 0) q.col(j) *= d / ad;
  }
  return q;
}

CMatrix unitary_aligning_form(const CVector& form) {
  const int size = static_cast<int>(form.size());
  CMatrix basis = CMatrix::Identity(size, size);
  basis.col(0) = form.conjugate() / form.norm();
  // Gram-Schmidt completion against the standard basis, skipping the
  // direction closest to the first column.
  Eigen::Index skip = 0;
  form.cwiseAbs().maxCoeff(&skip);
  int col = 1;
  for (int e = 0; e < size && col < size; ++e) {
    if (e == skip) continue;
    CVector v = CVector::Unit(size, e);
    for (int k = 0; k < col; ++k) v -= basis.col(k).dot(v) * basis.col(k);
    basis.col(col++) = v.normalized();
  }
  return basis;
}

ProjectivePoint apply_unitary(const CMatrix& unitary, const ProjectivePoint& x) {
  return ProjectivePoint(CVector(unitary * x.coords()));
}

ProjectivePoint lift_chart(int chart, const CVector& t) {
  CVector z(t.size() + 1);
  for (int j = 0, k = 0; j < z.size(); ++j) z[j] = (j == chart) ? cplx(1.0) : t[k++];
  return ProjectivePoint(std::move(z));
}

CVector chart_coords(int chart, const ProjectivePoint& x) {
  const CVector& z = x.coords();
  CVector t(z.size() - 1);
  for (int j = 0, k = 0; j < z.size(); ++j)
    if (j != chart) t[k++] = z[j] / z[chart];
  return t;
}

double QuadratureGrid::integrate(std::span<const double> values) const {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < weights.size(); ++i) acc += static_cast<long double>(weights[i]) * values[i];
  return static_cast<double>(acc);
}

double QuadratureGrid::integrate(const std::function<double(const ProjectivePoint&)>& f) const {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < weights.size(); ++i) acc += static_cast<long double>(weights[i]) * f(points[i]);
  return static_cast<double>(acc);
}

std::vector<double> QuadratureGrid::sample(const std::function<double(const ProjectivePoint&)>& f) const {
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = f(points[i]);
  return out;
}

namespace {

// Gauss-Legendre nodes and weights on (0, 1).
void gauss_legendre01(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(order);
  weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

// One polar factor: (t, measure r dr dtheta) pairs on the unit disc, r = w^2.
struct DiscNode {
  cplx t;
  double weight;
};

std::vector<DiscNode> disc_nodes(int resolution) {
  std::vector<double> w, gw;
  gauss_legendre01(resolution, w, gw);
  const int n_theta = 2 * resolution;
  const double dtheta = 2.0 * std::numbers::pi / n_theta;
  std::vector<DiscNode> out;
  out.reserve(static_cast<std::size_t>(resolution) * n_theta);
  for (int i = 0; i < resolution; ++i) {
    const double r = w[i] * w[i];
    const double jac = 2.0 * w[i] * r;  // r dr = 2 w^3 dw
    for (int j = 0; j < n_theta; ++j) {
      const double theta = dtheta * (j + 0.5);
      out.push_back({std::polar(r, theta), gw[i] * jac * dtheta});
    }
  }
  return out;
}

QuadratureGrid reference_grid(int n, int resolution) {
  QuadratureGrid grid;
  grid.n = n;
  grid.resolution = resolution;
  const auto disc = disc_nodes(resolution);
  const double pi = std::numbers::pi;
  if (n == 1) {
    for (int chart = 0; chart < 2; ++chart) {
      for (const auto& node : disc) {
        const double r2 = std::norm(node.t);
        CVector t(1);
        t[0] = node.t;
        grid.points.push_back(lift_chart(chart, t));
        grid.weights.push_back(node.weight / (pi * (1.0 + r2) * (1.0 + r2)));
        grid.charts.push_back(chart);
      }
    }
  } else {
    for (int chart = 0; chart < 3; ++chart) {
      for (const auto& a : disc) {
        for (const auto& b : disc) {
          const double s = 1.0 + std::norm(a.t) + std::norm(b.t);
          CVector t(2);
          t[0] = a.t;
          t[1] = b.t;
          grid.points.push_back(lift_chart(chart, t));
          grid.weights.push_back(2.0 / (pi * pi) * a.weight * b.weight / (s * s * s));
          grid.charts.push_back(chart);
        }
      }
    }
  }
  long double total = 0.0L;
  for (double w : grid.weights) total += w;
  for (double& w : grid.weights) w = static_cast<double>(w / total);
  grid.frame = CMatrix::Identity(n + 1, n + 1);
  return grid;
}

bool violates_guard(const QuadratureGrid& grid, std::span<const CVector> forms) {
  for (const auto& x : grid.points)
    for (const auto& f : forms)
      if (distance_to_hyperplane(x, f) < kGridGuardRadius) return true;
  return false;
}

}  // namespace

std::uint64_t next_grid_id() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

QuadratureGrid build_quadrature(int n, int resolution, std::span<const CVector> singular_forms) {
  if (n != 1 && n != 2) throw Error(ErrorCode::InvalidDimension, "quadrature grids exist for n = 1, 2 only");
  if (resolution < 8) throw Error(ErrorCode::ResolutionTooSmall, "resolution must be >= 8");
  for (const auto& f : singular_forms)
    if (f.size() != n + 1) throw Error(ErrorCode::DimensionMismatch, "singular form size");

  QuadratureGrid ref = reference_grid(n, resolution);
  if (singular_forms.empty()) {
    ref.id = next_grid_id();
    return ref;
  }

  CMatrix frame = unitary_aligning_form(singular_forms.front());
  // The reference grid keeps nodes off {z_0 = 0}; other loci are generic.
  // If one nevertheless passes through a node, tilt the frame slightly.
  for (int attempt = 0; attempt < 8; ++attempt) {
    QuadratureGrid grid = ref;
    grid.frame = frame;
    for (auto& x : grid.points) x = apply_unitary(frame, x);
    if (!violates_guard(grid, singular_forms)) {
      grid.id = next_grid_id();
      return grid;
    }
    const double angle = 1e-3 * (attempt + 1);
    CMatrix tilt = CMatrix::Identity(n + 1, n + 1);
    tilt(n - 1, n - 1) = tilt(n, n) = std::cos(angle);
    tilt(n - 1, n) = -std::sin(angle);
    tilt(n, n - 1) = std::sin(angle);
    frame = frame * tilt;
  }
  throw Error(ErrorCode::QuadratureDivergence, "could not place grid nodes outside the singular guard radius");
}

namespace {

constexpr char kGridMagic[8] = {'Z', 'L', 'G', 'R', 'I', 'D', '\0', '\0'};
constexpr std::uint32_t kGridVersion = 1;

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error(ErrorCode::CacheError, "truncated grid cache");
  return v;
}

}  // namespace

void save_grid(const QuadratureGrid& grid, const std::filesystem::path& path) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp);
    out.write(kGridMagic, sizeof(kGridMagic));
    put(out, kGridVersion);
    put(out, static_cast<std::uint32_t>(grid.n));
    put(out, static_cast<std::uint32_t>(grid.resolution));
    put(out, static_cast<std::uint64_t>(grid.size()));
    for (int i = 0; i < grid.frame.size(); ++i) put(out, grid.frame.data()[i]);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (int k = 0; k <= grid.n; ++k) put(out, grid.points[i][k]);
      put(out, grid.weights[i]);
      put(out, static_cast<std::int32_t>(grid.charts[i]));
    }
  }
  std::filesystem::rename(tmp, path);
}

QuadratureGrid load_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::CacheError, "cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kGridMagic, sizeof(magic)) != 0) throw Error(ErrorCode::CacheError, "bad grid magic");
  if (get<std::uint32_t>(in) != kGridVersion) throw Error(ErrorCode::CacheError, "grid cache version mismatch");
  QuadratureGrid grid;
  grid.n = static_cast<int>(get<std::uint32_t>(in));
  grid.resolution = static_cast<int>(get<std::uint32_t>(in));
  const auto count = get<std::uint64_t>(in);
  if (grid.n != 1 && grid.n != 2) throw Error(ErrorCode::CacheError, "bad grid dimension");
  grid.frame.resize(grid.n + 1, grid.n + 1);
  for (int i = 0; i < grid.frame.size(); ++i) grid.frame.data()[i] = get<cplx>(in);
  grid.points.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    CVector z(grid.n + 1);
    for (int k = 0; k <= grid.n; ++k) z[k] = get<cplx>(in);
    grid.points.emplace_back(std::move(z));
    grid.weights.push_back(get<double>(in));
    grid.charts.push_back(get<std::int32_t>(in));
  }
  grid.id = next_grid_id();
  return grid;
}

QuadratureGrid cached_quadrature(const std::filesystem::path& cache_dir, int n, int resolution,
                                 std::span<const CVector> singular_forms) {
  if (cache_dir.empty()) return build_quadrature(n, resolution, singular_forms);
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& f : singular_forms)
    for (int i = 0; i < f.size(); ++i) {
      const cplx c = f[i];
      unsigned char bytes[sizeof(cplx)];
      std::memcpy(bytes, &c, sizeof(cplx));
      for (unsigned char b : bytes) h = (h ^ b) * 1099511628211ULL;
    }
  std::ostringstream name;
  name << "grid_n" << n << "_r" << resolution;
  if (!singular_forms.empty()) name << "_f" << std::hex << h;
  name << ".bin";
  const auto path = cache_dir / name.str();
  if (std::filesystem::exists(path)) {
    try {
      QuadratureGrid g = load_grid(path);
      if (g.n == n && g.resolution == resolution) return g;
    } catch (const Error&) {
      // Stale or corrupt entries are rebuilt below.
    }
  }
  QuadratureGrid g = build_quadrature(n, resolution, singular_forms);
  std::filesystem::create_directories(cache_dir);
  save_grid(g, path);
  return g;
}

}  // namespace zerolab
