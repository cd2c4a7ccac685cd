#include "zerolab/calculus.hpp"

#include <cmath>

namespace zerolab {

CenteredChart::CenteredChart(const ProjectivePoint& x) : center_(x.coords()) {
  const int size = static_cast<int>(center_.size());
  // Unitary completion with first column x; the remaining columns span x^perp.
  CMatrix q = unitary_aligning_form(center_.conjugate());
  tangent_ = q.rightCols(size - 1);
}

ProjectivePoint CenteredChart::at(const CVector& t) const {
  return ProjectivePoint(CVector(center_ + tangent_ * t));
}

ProjectivePoint CenteredChart::along(const CVector& xi, cplx lambda) const {
  return ProjectivePoint(CVector(center_ + tangent_ * (lambda * xi)));
}

double levi_form(const PointFunction& f, const CenteredChart& chart, const CVector& xi, double f0, double h) {
  const double sum = f(chart.along(xi, cplx(h, 0))) + f(chart.along(xi, cplx(-h, 0))) +
                     f(chart.along(xi, cplx(0, h))) + f(chart.along(xi, cplx(0, -h)));
  return (sum - 4.0 * f0) / (4.0 * h * h);
}

CMatrix complex_hessian(const PointFunction& f, const ProjectivePoint& x, double h) {
  const CenteredChart chart(x);
  const int n = chart.dim();
  const double f0 = f(x);
  CMatrix hess = CMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a) hess(a, a) = levi_form(f, chart, CVector::Unit(n, a), f0, h);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      CVector xi = CVector::Unit(n, a) + CVector::Unit(n, b);
      const double re = 0.5 * (levi_form(f, chart, xi, f0, h) - hess(a, a).real() - hess(b, b).real());
      xi[b] = cplx(0, 1);
      const double im = 0.5 * (levi_form(f, chart, xi, f0, h) - hess(a, a).real() - hess(b, b).real());
      hess(a, b) = cplx(re, im);
      hess(b, a) = std::conj(hess(a, b));
    }
  }
  return hess;
}

double fs_laplacian_p1(const PointFunction& f, const ProjectivePoint& x, double h) {
  const CenteredChart chart(x);
  CVector xi(1);
  xi[0] = 1.0;
  return 2.0 * levi_form(f, chart, xi, f(x), h);
}

DerivativeBounds derivative_bounds(const PointFunction& f, const ProjectivePoint& x, double h) {
  const CenteredChart chart(x);
  const int n = chart.dim();
  const int m = 2 * n;
  const double f0 = f(x);
  auto eval = [&](const Eigen::VectorXd& s) {
    CVector t(n);
    for (int a = 0; a < n; ++a) t[a] = cplx(s[2 * a], s[2 * a + 1]);
    return f(chart.at(t));
  };
  Eigen::VectorXd grad(m);
  Eigen::MatrixXd hess(m, m);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(m, i) * h;
    const double fp = eval(e), fm = eval(-e);
    grad[i] = (fp - fm) / (2 * h);
    hess(i, i) = (fp - 2 * f0 + fm) / (h * h);
  }
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      Eigen::VectorXd ei = Eigen::VectorXd::Unit(m, i) * h, ej = Eigen::VectorXd::Unit(m, j) * h;
      hess(i, j) = hess(j, i) = (eval(ei + ej) - eval(ei - ej) - eval(ej - ei) + eval(-ei - ej)) / (4 * h * h);
    }
  return {grad.norm(), hess.cwiseAbs().maxCoeff()};
}

}  // namespace zerolab
