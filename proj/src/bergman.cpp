#include "zerolab/bergman.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "zerolab/error.hpp"
#include "zerolab/parallel.hpp"

namespace zerolab {

int min_vanishing_order(int p, double lambda) {
  if (lambda <= 0.0) return 0;
  const double x = p * lambda;
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, x)) return static_cast<int>(r);
  return static_cast<int>(std::floor(x));
}

std::vector<VanishingOrder> min_vanishing_orders(int p, const MetricWeight& h) {
  std::vector<VanishingOrder> out;
  for (const auto& t : h.singular_terms()) out.push_back({t.form, t.lambda, min_vanishing_order(p, t.lambda)});
  return out;
}

HomogeneousPolynomial BergmanBasis::quotient_section(const CVector& c) const {
  return HomogeneousPolynomial(n, quotient_degree, coefficients * c, true);
}

HomogeneousPolynomial BergmanBasis::section(const CVector& c) const { return fixed_divisor * quotient_section(c); }

ZeroSet BergmanBasis::zeros_p1(const CVector& c) const {
  if (n != 1) throw Error(ErrorCode::InvalidDimension, "zeros_p1 needs a basis on P^1");
  ZeroSet zs;
  if (quotient_degree > 0) zs = roots_p1(quotient_section(c));
  for (const auto& bl : base_locus) zs.points.push_back({ProjectivePoint{bl.form[1], -bl.form[0]}, bl.order});
  zs.expected_total = p;
  return zs;
}

namespace {

// Per-pole exponent 2k - 2 p lambda, snapped to 0 at the integer edge.
double log_coefficient(int p, const VanishingOrder& o) {
  const double c = 2.0 * o.order - 2.0 * p * o.lambda;
  return std::abs(c) < 1e-9 ? 0.0 : c;
}

}  // namespace

double BergmanBasis::log_divisor_weight(const ProjectivePoint& x) const {
  double v = -2.0 * p * metric.smooth_part(x);
  for (const auto& o : orders) {
    const double c = log_coefficient(p, o);
    if (c == 0.0) continue;
    const double a = std::abs(cplx(o.form.transpose() * x.coords()));
    if (a == 0.0) return c > 0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    v += c * std::log(a);
  }
  return v;
}

CVector BergmanBasis::quotient_values(const ProjectivePoint& x) const {
  return monomial_values(n, quotient_degree, x.coords());
}

bool BergmanBasis::on_base_locus(const ProjectivePoint& x, double tol) const {
  for (const auto& bl : base_locus)
    if (distance_to_hyperplane(x, bl.form) <= tol) return true;
  return false;
}

namespace {

void fill_structure(BergmanBasis& b, int p, const MetricWeight& h) {
  b.p = p;
  b.n = h.n();
  b.metric = h;
  b.orders = min_vanishing_orders(p, h);
  b.base_locus.clear();
  int total = 0;
  HomogeneousPolynomial d(h.n(), 0, CVector::Ones(1), true);
  for (const auto& o : b.orders) {
    if (o.order == 0) continue;
    b.base_locus.push_back(o);
    total += o.order;
    const HomogeneousPolynomial lin(h.n(), 1, o.form, true);
    for (int k = 0; k < o.order; ++k) d = d * lin;
  }
  if (total > p) throw Error(ErrorCode::EmptySpace, "forced vanishing exceeds the degree: no admissible section");
  b.fixed_divisor = d;
  b.quotient_degree = p - total;
  b.admissible.resize(static_cast<std::size_t>(monomial_count(h.n(), b.quotient_degree)));
  for (std::size_t i = 0; i < b.admissible.size(); ++i) b.admissible[i] = static_cast<int>(i);
}

CMatrix gram_matrix(const BergmanBasis& b, const QuadratureGrid& grid) {
  const int mq = static_cast<int>(b.admissible.size());
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (grid.size() + kChunk - 1) / kChunk;
  std::vector<CMatrix> partial(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = c * kChunk, end = std::min(grid.size(), begin + kChunk);
    CMatrix v(static_cast<Eigen::Index>(end - begin), mq);
    Eigen::VectorXd w(static_cast<Eigen::Index>(end - begin));
    for (std::size_t i = begin; i < end; ++i) {
      const auto& x = grid.points[i];
      v.row(static_cast<Eigen::Index>(i - begin)) = b.quotient_values(x).transpose();
      const double lw = b.log_divisor_weight(x);
      if (!std::isfinite(lw))
        throw Error(ErrorCode::QuadratureDivergence, "grid node on the singular locus while assembling the Gram matrix");
      w[static_cast<Eigen::Index>(i - begin)] = grid.weights[i] * std::exp(lw);
    }
    partial[c] = v.adjoint() * w.asDiagonal() * v;
  });
  CMatrix g = CMatrix::Zero(mq, mq);
  for (const auto& part : partial) g += part;
  return 0.5 * (g + g.adjoint());
}

}  // namespace

BergmanBasis build_basis(int p, const MetricWeight& h, const QuadratureGrid& grid) {
  if (p < 1) throw Error(ErrorCode::DimensionMismatch, "power p must be >= 1");
  if (grid.n != h.n()) throw Error(ErrorCode::DimensionMismatch, "grid and metric dimensions differ");
  BergmanBasis b;
  fill_structure(b, p, h);
  b.resolution = grid.resolution;
  if (b.admissible.empty()) throw Error(ErrorCode::EmptySpace, "no admissible monomial");

  const CMatrix g = gram_matrix(b, grid);
  // Diagonal (Jacobi) scaling first: monomial norms span many orders of
  // magnitude even for the exact FS Gram matrix.
  const Eigen::VectorXd s = g.diagonal().real().cwiseSqrt().cwiseInverse();
  const CMatrix gs = s.asDiagonal() * g * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gs);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double lmax = ev.maxCoeff(), lmin = ev.minCoeff();
  b.gram_condition = lmin > 0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(lmin > 1e-12 * lmax) || b.gram_condition > 1e10) {
    std::ostringstream os;
    os << "Gram condition " << b.gram_condition << " at p = " << p << ", resolution " << grid.resolution;
    throw Error(ErrorCode::IllConditionedGram, os.str());
  }
  b.coefficients = s.asDiagonal() * es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal();
  return b;
}

double orthonormality_residual(const BergmanBasis& b, const QuadratureGrid& grid) {
  const CMatrix g = gram_matrix(b, grid);
  const CMatrix m = b.coefficients.adjoint() * g * b.coefficients;
  return (m - CMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

double bergman_kernel_at(const BergmanBasis& b, const ProjectivePoint& x) {
  if (b.on_base_locus(x, 0.0)) return 0.0;
  const double lw = b.log_divisor_weight(x);
  if (lw == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::exp(lw) * (b.coefficients.transpose() * b.quotient_values(x)).squaredNorm();
}

double fs_current_pair(const BergmanBasis& b, const TestForm& u, const QuadratureGrid& grid) {
  const double curvature = curvature_pair(b.metric, u, grid);
  const GridData& d = u.on(grid);
  long double acc = 0.0L;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& x = grid.points[i];
    const double log_p = b.log_divisor_weight(x) + std::log((b.coefficients.transpose() * b.quotient_values(x)).squaredNorm());
    const double term = log_p * d.ddc[i];
    if (!std::isfinite(term)) throw Error(ErrorCode::QuadratureDivergence, "log Bergman kernel not finite at a grid node");
    acc += static_cast<long double>(grid.weights[i]) * term;
  }
  return b.p * curvature + 0.5 * static_cast<double>(acc);
}

ProjectivePoint kodaira_map(const BergmanBasis& b, const ProjectivePoint& x) {
  if (b.on_base_locus(x)) throw Error(ErrorCode::BaseLocusPoint, "Kodaira map is undefined on the base locus");
  // The common factor D(x) e^{-p phi(x)} drops out projectively.
  return ProjectivePoint(CVector(b.coefficients.transpose() * b.quotient_values(x)));
}

bool dimension_bounds_hold(const BergmanBasis& b, double c) {
  const double pn = std::pow(static_cast<double>(b.p), b.n);
  return pn / c <= b.d_kp() && b.d_kp() <= c * pn;
}

namespace {

constexpr char kBasisMagic[8] = {'Z', 'L', 'B', 'A', 'S', 'I', 'S', '\0'};
constexpr std::uint32_t kBasisVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw Error(ErrorCode::CacheError, "truncated basis cache file");
  return v;
}

}  // namespace

void save_basis(const BergmanBasis& b, const std::filesystem::path& path) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    os.write(kBasisMagic, sizeof kBasisMagic);
    put(os, kBasisVersion);
    put(os, static_cast<std::int32_t>(b.p));
    put(os, static_cast<std::int32_t>(b.n));
    put(os, static_cast<std::int32_t>(b.resolution));
    put(os, b.metric.hash());
    put(os, static_cast<std::uint32_t>(b.orders.size()));
    for (const auto& o : b.orders) put(os, static_cast<std::int32_t>(o.order));
    put(os, b.gram_condition);
    put(os, static_cast<std::int64_t>(b.coefficients.rows()));
    put(os, static_cast<std::int64_t>(b.coefficients.cols()));
    for (Eigen::Index j = 0; j < b.coefficients.cols(); ++j)
      for (Eigen::Index i = 0; i < b.coefficients.rows(); ++i) {
        put(os, b.coefficients(i, j).real());
        put(os, b.coefficients(i, j).imag());
      }
    if (!os) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

BergmanBasis load_basis(const std::filesystem::path& path, int p, const MetricWeight& h, int resolution) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::CacheError, "cannot open " + path.string());
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kBasisMagic, sizeof magic) != 0) throw Error(ErrorCode::CacheError, "bad magic");
  if (get<std::uint32_t>(is) != kBasisVersion) throw Error(ErrorCode::CacheError, "unsupported basis cache version");
  const int fp = get<std::int32_t>(is), fn = get<std::int32_t>(is), fres = get<std::int32_t>(is);
  const auto fhash = get<std::uint64_t>(is);
  if (fp != p || fn != h.n() || fres != resolution || fhash != h.hash())
    throw Error(ErrorCode::CacheError, "basis cache key mismatch");
  BergmanBasis b;
  fill_structure(b, p, h);
  b.resolution = resolution;
  const auto count = get<std::uint32_t>(is);
  if (count != b.orders.size()) throw Error(ErrorCode::CacheError, "pole count mismatch");
  for (auto& o : b.orders)
    if (get<std::int32_t>(is) != o.order) throw Error(ErrorCode::CacheError, "vanishing order mismatch");
  b.gram_condition = get<double>(is);
  const auto rows = get<std::int64_t>(is), cols = get<std::int64_t>(is);
  if (rows != static_cast<std::int64_t>(b.admissible.size()) || cols < 1 || cols > rows)
    throw Error(ErrorCode::CacheError, "coefficient shape mismatch");
  b.coefficients.resize(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = get<double>(is), im = get<double>(is);
      b.coefficients(i, j) = cplx(re, im);
    }
  return b;
}

BergmanBasis cached_basis(const std::filesystem::path& cache_dir, int p, const MetricWeight& h,
                          const QuadratureGrid& grid) {
  if (cache_dir.empty()) return build_basis(p, h, grid);
  std::filesystem::create_directories(cache_dir);
  char name[96];
  std::snprintf(name, sizeof name, "basis_p%d_m%016llx_r%d.bin", p, static_cast<unsigned long long>(h.hash()),
                grid.resolution);
  const auto path = cache_dir / name;
  if (std::filesystem::exists(path)) {
    try {
      return load_basis(path, p, h, grid.resolution);
    } catch (const Error&) {
      // Stale or foreign file: rebuild and overwrite.
    }
  }
  BergmanBasis b = build_basis(p, h, grid);
  save_basis(b, path);
  return b;
}

nlohmann::json to_json(const BergmanBasis& b) {
  auto complex_list = [](const CVector& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v[i].real(), v[i].imag()});
    return a;
  };
  nlohmann::json locus = nlohmann::json::array();
  for (const auto& bl : b.base_locus) {
    nlohmann::json e{{"form", complex_list(bl.form)}, {"lambda", bl.lambda}, {"order", bl.order}};
    if (b.n == 1) {
      const ProjectivePoint a{bl.form[1], -bl.form[0]};
      e["point"] = complex_list(a.coords());
    }
    locus.push_back(e);
  }
  return nlohmann::json{{"p", b.p},
                        {"n", b.n},
                        {"dimension", b.dimension()},
                        {"d_kp", b.d_kp()},
                        {"gram_condition", b.gram_condition},
                        {"resolution", b.resolution},
                        {"base_locus", locus}};
}

}  // namespace zerolab
