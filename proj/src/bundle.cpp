#include "ncgeo/bundle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace ncgeo {

namespace {

Matrix conj_by(const Matrix& v, const Matrix& m) { return v * m * v.adjoint(); }

Matrix exp_sigma3(double f) {
  Matrix e(2, 2);
  e << std::exp(I * f), 0.0, 0.0, std::exp(-I * f);
  return e;
}

}  // namespace

int ChartGrid::samples() const {
  int s = 1;
  for (int sz : size) s *= sz;
  return s;
}

int ChartGrid::flatten(const std::vector<int>& c) const {
  int idx = 0;
  for (int axis = 0; axis < dims; ++axis) idx = idx * size[axis] + c[axis];
  return idx;
}

std::vector<int> ChartGrid::unflatten(int idx) const {
  std::vector<int> c(dims);
  for (int axis = dims - 1; axis >= 0; --axis) {
    c[axis] = idx % size[axis];
    idx /= size[axis];
  }
  return c;
}

double ChartGrid::coordinate(int idx, int axis) const {
  return origin[axis] + unflatten(idx)[axis] * step[axis];
}

int ChartGrid::shifted(int idx, int axis, int offset) const {
  auto c = unflatten(idx);
  int v = c[axis] + offset;
  if (periodic[axis]) {
    v = ((v % size[axis]) + size[axis]) % size[axis];
  } else if (v < 0 || v >= size[axis]) {
    return -1;
  }
  c[axis] = v;
  return flatten(c);
}

bool ChartGrid::fd_interior(int idx, int margin) const {
  const auto c = unflatten(idx);
  for (int axis = 0; axis < dims; ++axis) {
    if (periodic[axis]) continue;
    if (c[axis] < margin || c[axis] >= size[axis] - margin) return false;
  }
  return true;
}

ChartedBundle circle_bundle(int P, int B, int winding, std::uint64_t seed) {
  if (P % 2 != 0 || P < 8 || B < 1 || 4 * B >= P)
    throw std::invalid_argument("circle_bundle: need even P >= 8 and 0 < 4B < P");
  ChartedBundle bundle;
  bundle.n = 2;
  const double s = 2.0 * M_PI / P;
  const int len = P / 2 + 2 * B + 1;

  ChartGrid arc;
  arc.dims = 1;
  arc.size = {len};
  arc.origin = {-B * s};
  arc.step = {s};
  arc.periodic = {false};
  bundle.manifold.chart1 = arc;
  bundle.manifold.chart2 = arc;  // parameter tau = t - pi

  Rng rng(seed);
  const Matrix V = rng.special_unitary(2);
  bundle.conjugator = V;
  const double w = winding;

  const ChartedManifold geom = bundle.manifold;  // grids only, for captures
  auto t_of = [geom](int chart, int idx) {
    return geom.chart(chart).coordinate(idx, 0) + (chart == 1 ? M_PI : 0.0);
  };
  auto g_of_t = [V, w](double t) { return conj_by(V, exp_sigma3(w * t)); };

  // Overlap components around t = pi and around t = 0 (through the wrap).
  for (int j = P / 2 - B; j <= P / 2 + B; ++j) {
    OverlapSample ov;
    ov.idx1 = j + B;
    ov.idx2 = j - P / 2 + B;
    ov.jac12 = RealMatrix::Identity(1, 1);
    bundle.manifold.overlap.push_back(ov);
  }
  for (int j = P - B; j <= P + B; ++j) {
    OverlapSample ov;
    ov.idx1 = j - P + B;
    ov.idx2 = j - P / 2 + B;
    ov.jac12 = RealMatrix::Identity(1, 1);
    bundle.manifold.overlap.push_back(ov);
  }
  Matrix sigma3(2, 2);
  sigma3 << 1, 0, 0, -1;
  bundle.transition.dg.resize(1);
  for (const auto& ov : bundle.manifold.overlap) {
    const double t = bundle.manifold.chart1.coordinate(ov.idx1, 0);
    bundle.transition.g.push_back(g_of_t(t));
    bundle.transition.dg[0].push_back(conj_by(V, (I * w) * sigma3) * g_of_t(t));
  }

  bundle.f_at = [t_of, w](int chart, int idx) { return w * t_of(chart, idx); };
  bundle.df_at = [w](int, int, int) { return w; };
  bundle.g_at = [g_of_t, t_of](int chart, int idx) { return g_of_t(t_of(chart, idx)); };
  bundle.dg_at = [V, w, g_of_t, t_of, sigma3](int chart, int, int idx) -> Matrix {
    return conj_by(V, (I * w) * sigma3) * g_of_t(t_of(chart, idx));
  };
  bundle.global_coords = [t_of](int chart, int idx) {
    RealVector v(1);
    v(0) = t_of(chart, idx);
    return v;
  };
  bundle.global_jacobian = [](int, int) { return RealMatrix::Identity(1, 1); };
  return bundle;
}

ChartedBundle sphere_bundle(int L, int B, int P, int winding, double theta_amp,
                            std::uint64_t seed) {
  if (L < 2 || B < 1 || B >= L || P < 4 || P % 2 != 0)
    throw std::invalid_argument("sphere_bundle: need L > B >= 1 and even P >= 4");
  ChartedBundle bundle;
  bundle.n = 2;
  const double st = M_PI / (2.0 * L), sp = 2.0 * M_PI / P;

  ChartGrid cap;
  cap.dims = 2;
  cap.size = {L + B + 1, P};
  cap.origin = {0.0, 0.0};
  cap.step = {st, sp};
  cap.periodic = {false, true};
  bundle.manifold.chart1 = cap;
  bundle.manifold.chart2 = cap;

  Rng rng(seed);
  const Matrix V = rng.special_unitary(2);
  bundle.conjugator = V;
  const double w = winding;
  Matrix sigma3(2, 2);
  sigma3 << 1, 0, 0, -1;

  const ChartedManifold geom_grids{cap, cap, {}};
  // Global angles (theta, phi) of a sample; chart 2 sits at theta2 = pi -
  // theta1, phi2 = -phi1.
  auto angles = [geom_grids](int chart, int idx, double& theta, double& phi) {
    const ChartGrid& grid = geom_grids.chart(chart);
    theta = grid.coordinate(idx, 0);
    phi = grid.coordinate(idx, 1);
    if (chart == 1) {
      theta = M_PI - theta;
      phi = -phi;
    }
  };
  auto f_of = [w, theta_amp](double theta, double phi) {
    return w * phi + theta_amp * std::cos(theta);
  };
  auto g_of = [V, f_of](double theta, double phi) {
    return conj_by(V, exp_sigma3(f_of(theta, phi)));
  };

  for (int j = L - B; j <= L + B; ++j)
    for (int p = 0; p < P; ++p) {
      OverlapSample ov;
      ov.idx1 = bundle.manifold.chart1.flatten({j, p});
      ov.idx2 = bundle.manifold.chart2.flatten({2 * L - j, (P - p) % P});
      ov.jac12 = -RealMatrix::Identity(2, 2);
      bundle.manifold.overlap.push_back(ov);
      bundle.transition.g.push_back(g_of(j * st, p * sp));
    }
  bundle.transition.dg.resize(2);
  const Matrix is3 = conj_by(V, I * sigma3);
  for (const auto& ov : bundle.manifold.overlap) {
    const double theta = bundle.manifold.chart1.coordinate(ov.idx1, 0);
    const double phi = bundle.manifold.chart1.coordinate(ov.idx1, 1);
    const Matrix g = g_of(theta, phi);
    bundle.transition.dg[0].push_back((-theta_amp * std::sin(theta)) * is3 * g);
    bundle.transition.dg[1].push_back(w * is3 * g);
  }

  bundle.f_at = [angles, f_of](int chart, int idx) {
    double theta, phi;
    angles(chart, idx, theta, phi);
    return f_of(theta, phi);
  };
  bundle.df_at = [angles, w, theta_amp](int chart, int axis, int idx) {
    double theta, phi;
    angles(chart, idx, theta, phi);
    // d f / d (own chart axis); d theta1/d theta2 = d phi1/d phi2 = -1.
    const double sign = chart == 0 ? 1.0 : -1.0;
    return sign * (axis == 0 ? -theta_amp * std::sin(theta) : w);
  };
  bundle.g_at = [angles, g_of](int chart, int idx) {
    double theta, phi;
    angles(chart, idx, theta, phi);
    return g_of(theta, phi);
  };
  bundle.dg_at = [angles, g_of, is3, w, theta_amp](int chart, int axis, int idx) {
    double theta, phi;
    angles(chart, idx, theta, phi);
    const double sign = chart == 0 ? 1.0 : -1.0;
    const double df = axis == 0 ? -theta_amp * std::sin(theta) : w;
    return Matrix(sign * df * is3 * g_of(theta, phi));
  };
  bundle.global_coords = [angles](int chart, int idx) {
    double theta, phi;
    angles(chart, idx, theta, phi);
    RealVector v(2);
    v << theta, phi;
    return v;
  };
  bundle.global_jacobian = [](int chart, int) {
    return RealMatrix(chart == 0 ? RealMatrix::Identity(2, 2)
                                 : RealMatrix(-RealMatrix::Identity(2, 2)));
  };
  return bundle;
}

// ---- residuals ----------------------------------------------------------------

double section_residual(const ChartedBundle& b, const GluedSection& s) {
  double worst = 0.0;
  for (std::size_t r = 0; r < b.manifold.overlap.size(); ++r) {
    const auto& ov = b.manifold.overlap[r];
    const Matrix& g = b.transition.g[r];
    worst =
        std::max(worst, max_abs(s.a2[ov.idx2] - g.inverse() * s.a1[ov.idx1] * g));
  }
  return worst;
}

double derivation_residual(const ChartedBundle& b, const GluedDerivation& d) {
  const int dims = b.manifold.chart1.dims;
  double worst = 0.0;
  for (std::size_t r = 0; r < b.manifold.overlap.size(); ++r) {
    const auto& ov = b.manifold.overlap[r];
    const Matrix& g = b.transition.g[r];
    const Matrix gi = g.inverse();
    for (int c2 = 0; c2 < dims; ++c2) {
      double v = 0.0;
      for (int c1 = 0; c1 < dims; ++c1) v += ov.jac12(c2, c1) * d.X.x1[c1](ov.idx1);
      worst = std::max(worst, std::abs(d.X.x2[c2](ov.idx2) - v));
    }
    Matrix xg = Matrix::Zero(b.n, b.n);
    for (int c1 = 0; c1 < dims; ++c1)
      xg += d.X.x1[c1](ov.idx1) * b.transition.dg[c1][r];
    worst = std::max(
        worst, max_abs(d.gamma2[ov.idx2] - gi * d.gamma1[ov.idx1] * g - gi * xg));
  }
  return worst;
}

double connection_residual(const ChartedBundle& b, const LocalConnection& c) {
  const int dims = b.manifold.chart1.dims;
  double worst = 0.0;
  for (std::size_t r = 0; r < b.manifold.overlap.size(); ++r) {
    const auto& ov = b.manifold.overlap[r];
    const Matrix& g = b.transition.g[r];
    const Matrix gi = g.inverse();
    const RealMatrix jinv = ov.jac12.inverse();
    for (int c2 = 0; c2 < dims; ++c2) {
      Matrix expect = Matrix::Zero(b.n, b.n);
      for (int c1 = 0; c1 < dims; ++c1)
        expect += jinv(c1, c2) *
                  (gi * c.A1[c1][ov.idx1] * g + gi * b.transition.dg[c1][r]);
      worst = std::max(worst, max_abs(c.A2[c2][ov.idx2] - expect));
    }
  }
  return worst;
}

// ---- operations ----------------------------------------------------------------

const GluedVectorField& rho(const GluedDerivation& d) { return d.X; }

namespace {

ChartField contract(const ChartedBundle& b, int chart, const ChartOneForm& A,
                    const ChartScalarField& X) {
  const int samples = b.manifold.chart(chart).samples();
  const int dims = b.manifold.chart(chart).dims;
  ChartField out(samples, Matrix::Zero(b.n, b.n));
  for (int idx = 0; idx < samples; ++idx)
    for (int c = 0; c < dims; ++c) out[idx] += X[c](idx) * A[c][idx];
  return out;
}

// 4th-order central difference along an axis; zero where the stencil does
// not fit (callers mask such samples out).
Matrix fd4(const ChartGrid& grid, const ChartField& f, int idx, int axis) {
  const int p1 = grid.shifted(idx, axis, 1), p2 = grid.shifted(idx, axis, 2);
  const int m1 = grid.shifted(idx, axis, -1), m2 = grid.shifted(idx, axis, -2);
  if (p1 < 0 || p2 < 0 || m1 < 0 || m2 < 0)
    return Matrix::Zero(f[idx].rows(), f[idx].cols());
  return (-f[p2] + 8.0 * f[p1] - 8.0 * f[m1] + f[m2]) / (12.0 * grid.step[axis]);
}

}  // namespace

GluedSection alpha_eval(const ChartedBundle& b, const LocalConnection& conn,
                        const GluedDerivation& d, double tol) {
  if (connection_residual(b, conn) > tol)
    throw gluing_error("alpha_eval: local connection violates its gluing relation");
  if (derivation_residual(b, d) > tol)
    throw gluing_error("alpha_eval: derivation violates its gluing relation");
  GluedSection out;
  out.a1 = contract(b, 0, conn.A1, d.X.x1);
  out.a2 = contract(b, 1, conn.A2, d.X.x2);
  for (int idx = 0; idx < b.manifold.chart1.samples(); ++idx)
    out.a1[idx] -= d.gamma1[idx];
  for (int idx = 0; idx < b.manifold.chart2.samples(); ++idx)
    out.a2[idx] -= d.gamma2[idx];
  return out;
}

GluedSection global_curvature(const ChartedBundle& b, const LocalConnection& conn,
                              const GluedDerivation& d1, const GluedDerivation& d2) {
  GluedSection out;
  for (int chart = 0; chart < 2; ++chart) {
    const ChartGrid& grid = b.manifold.chart(chart);
    const ChartOneForm& A = chart == 0 ? conn.A1 : conn.A2;
    const ChartScalarField& X = chart == 0 ? d1.X.x1 : d1.X.x2;
    const ChartScalarField& Y = chart == 0 ? d2.X.x1 : d2.X.x2;
    const ChartField ax = contract(b, chart, A, X);
    const ChartField ay = contract(b, chart, A, Y);
    ChartField f(grid.samples(), Matrix::Zero(b.n, b.n));
    for (int idx = 0; idx < grid.samples(); ++idx) {
      Matrix v = commutator(ax[idx], ay[idx]);
      if (grid.fd_interior(idx)) {
        for (int c = 0; c < grid.dims; ++c)
          for (int e = c + 1; e < grid.dims; ++e) {
            const Matrix curl = fd4(grid, A[e], idx, c) - fd4(grid, A[c], idx, e);
            v += curl * (X[c](idx) * Y[e](idx) - X[e](idx) * Y[c](idx));
          }
      }
      f[idx] = v;
    }
    (chart == 0 ? out.a1 : out.a2) = std::move(f);
  }
  return out;
}

LocalConnection gauge_transform_alpha(const ChartedBundle& b,
                                      const GluedGaugeField& u,
                                      const LocalConnection& conn) {
  LocalConnection out;
  for (int chart = 0; chart < 2; ++chart) {
    const ChartGrid& grid = b.manifold.chart(chart);
    const ChartField& uv = chart == 0 ? u.v1 : u.v2;
    const ChartOneForm& du = chart == 0 ? u.dv1 : u.dv2;
    const ChartOneForm& A = chart == 0 ? conn.A1 : conn.A2;
    ChartOneForm res(grid.dims, ChartField(grid.samples()));
    for (int idx = 0; idx < grid.samples(); ++idx) {
      const Matrix uh = uv[idx].adjoint();
      if (max_abs(uh * uv[idx] - Matrix::Identity(b.n, b.n)) > 1e-10 ||
          std::abs(uv[idx].determinant() - Complex(1.0)) > 1e-10)
        throw std::invalid_argument("gauge_transform_alpha: u must be special unitary");
      for (int c = 0; c < grid.dims; ++c)
        res[c][idx] = uh * A[c][idx] * uv[idx] + uh * du[c][idx];
    }
    (chart == 0 ? out.A1 : out.A2) = std::move(res);
  }
  return out;
}

LocalConnection gauge_transform_alpha_fd(const ChartedBundle& b,
                                         const GluedSection& u,
                                         const LocalConnection& conn) {
  GluedGaugeField uu;
  uu.v1 = u.a1;
  uu.v2 = u.a2;
  for (int chart = 0; chart < 2; ++chart) {
    const ChartGrid& grid = b.manifold.chart(chart);
    const ChartField& v = chart == 0 ? uu.v1 : uu.v2;
    ChartOneForm dv(grid.dims, ChartField(grid.samples()));
    for (int idx = 0; idx < grid.samples(); ++idx)
      for (int c = 0; c < grid.dims; ++c) dv[c][idx] = fd4(grid, v, idx, c);
    (chart == 0 ? uu.dv1 : uu.dv2) = std::move(dv);
  }
  return gauge_transform_alpha(b, uu, conn);
}

LocalConnection delta_alpha(const ChartedBundle& b, const GluedGaugeField& xi,
                            const LocalConnection& conn) {
  LocalConnection out;
  for (int chart = 0; chart < 2; ++chart) {
    const ChartGrid& grid = b.manifold.chart(chart);
    const ChartField& v = chart == 0 ? xi.v1 : xi.v2;
    const ChartOneForm& dv = chart == 0 ? xi.dv1 : xi.dv2;
    const ChartOneForm& A = chart == 0 ? conn.A1 : conn.A2;
    ChartOneForm res(grid.dims, ChartField(grid.samples()));
    for (int idx = 0; idx < grid.samples(); ++idx)
      for (int c = 0; c < grid.dims; ++c)
        res[c][idx] = dv[c][idx] + commutator(A[c][idx], v[idx]);
    (chart == 0 ? out.A1 : out.A2) = std::move(res);
  }
  return out;
}

// ---- generators -----------------------------------------------------------------

LocalConnection random_connection(const ChartedBundle& b, std::uint64_t seed,
                                  double amp) {
  Rng rng(seed);
  const int dims = b.manifold.chart1.dims;
  LocalConnection conn;
  conn.A1.assign(dims, ChartField(b.manifold.chart1.samples()));
  conn.A2.assign(dims, ChartField(b.manifold.chart2.samples()));
  for (int c = 0; c < dims; ++c) {
    for (auto& m : conn.A1[c]) m = rng.antihermitian_traceless(b.n, amp);
    for (auto& m : conn.A2[c]) m = rng.antihermitian_traceless(b.n, amp);
  }
  for (std::size_t r = 0; r < b.manifold.overlap.size(); ++r) {
    const auto& ov = b.manifold.overlap[r];
    const Matrix& g = b.transition.g[r];
    const Matrix gi = g.inverse();
    const RealMatrix jinv = ov.jac12.inverse();
    for (int c2 = 0; c2 < dims; ++c2) {
      Matrix v = Matrix::Zero(b.n, b.n);
      for (int c1 = 0; c1 < dims; ++c1)
        v += jinv(c1, c2) *
             (gi * conn.A1[c1][ov.idx1] * g + gi * b.transition.dg[c1][r]);
      conn.A2[c2][ov.idx2] = v;
    }
  }
  return conn;
}

GluedVectorField random_vector_field(const ChartedBundle& b, std::uint64_t seed,
                                     double amp) {
  Rng rng(seed);
  const int dims = b.manifold.chart1.dims;
  GluedVectorField X;
  X.x1.assign(dims, RealVector::Zero(b.manifold.chart1.samples()));
  X.x2.assign(dims, RealVector::Zero(b.manifold.chart2.samples()));
  for (int c = 0; c < dims; ++c) {
    for (int i = 0; i < X.x1[c].size(); ++i) X.x1[c](i) = amp * rng.gaussian();
    for (int i = 0; i < X.x2[c].size(); ++i) X.x2[c](i) = amp * rng.gaussian();
  }
  for (const auto& ov : b.manifold.overlap)
    for (int c2 = 0; c2 < dims; ++c2) {
      double v = 0.0;
      for (int c1 = 0; c1 < dims; ++c1) v += ov.jac12(c2, c1) * X.x1[c1](ov.idx1);
      X.x2[c2](ov.idx2) = v;
    }
  return X;
}

GluedDerivation random_derivation(const ChartedBundle& b,
                                  const GluedVectorField& X, std::uint64_t seed,
                                  bool real, double amp) {
  Rng rng(seed);
  GluedDerivation d;
  d.X = X;
  d.gamma1.resize(b.manifold.chart1.samples());
  d.gamma2.resize(b.manifold.chart2.samples());
  for (auto& m : d.gamma1)
    m = real ? rng.antihermitian_traceless(b.n, amp) : rng.traceless(b.n, amp);
  for (auto& m : d.gamma2)
    m = real ? rng.antihermitian_traceless(b.n, amp) : rng.traceless(b.n, amp);
  const int dims = b.manifold.chart1.dims;
  for (std::size_t r = 0; r < b.manifold.overlap.size(); ++r) {
    const auto& ov = b.manifold.overlap[r];
    const Matrix& g = b.transition.g[r];
    const Matrix gi = g.inverse();
    Matrix xg = Matrix::Zero(b.n, b.n);
    for (int c1 = 0; c1 < dims; ++c1)
      xg += X.x1[c1](ov.idx1) * b.transition.dg[c1][r];
    d.gamma2[ov.idx2] = gi * d.gamma1[ov.idx1] * g + gi * xg;
  }
  return d;
}

GluedDerivation lift_derivation(const ChartedBundle& b, const LocalConnection& conn,
                                const GluedVectorField& X) {
  GluedDerivation d;
  d.X = X;
  d.gamma1 = contract(b, 0, conn.A1, X.x1);
  d.gamma2 = contract(b, 1, conn.A2, X.x2);
  return d;
}

namespace {

// Smooth global scalar: trig field in the global angles with an integer
// frequency on the periodic axis. Chart derivatives via the global
// Jacobian.
struct GlobalScalar {
  double a0, f0, p0, p1;
  int m;

  // The circle's single global angle wraps, so its frequency must be an
  // integer; the sphere's theta does not wrap.
  static GlobalScalar random(Rng& rng, bool first_axis_wraps) {
    const double f0 =
        first_axis_wraps ? double(rng.integer(1, 2)) : rng.real(0.5, 1.5);
    return {rng.real(0.3, 1.0), f0, rng.real(0.0, 6.28), rng.real(0.0, 6.28),
            rng.integer(1, 2)};
  }
  double value(const RealVector& gc) const {
    double v = a0 * std::sin(f0 * gc(0) + p0);
    if (gc.size() > 1) v *= std::cos(m * gc(1) + p1);
    return v;
  }
  RealVector global_grad(const RealVector& gc) const {
    RealVector g(gc.size());
    if (gc.size() == 1) {
      g(0) = a0 * f0 * std::cos(f0 * gc(0) + p0);
    } else {
      g(0) = a0 * f0 * std::cos(f0 * gc(0) + p0) * std::cos(m * gc(1) + p1);
      g(1) = -a0 * std::sin(f0 * gc(0) + p0) * m * std::sin(m * gc(1) + p1);
    }
    return g;
  }
};

}  // namespace

GluedVectorField smooth_vector_field(const ChartedBundle& b, std::uint64_t seed,
                                     double amp) {
  Rng rng(seed);
  const int dims = b.manifold.chart1.dims;
  // Global components in the global-angle frame; chart components follow by
  // the inverse Jacobian (X^chart = J_chart^-1 X^global with J = d global /
  // d chart, which is its own inverse for these instances).
  const bool wraps = dims == 1;
  std::vector<GlobalScalar> comp;
  for (int c = 0; c < dims; ++c) comp.push_back(GlobalScalar::random(rng, wraps));
  GluedVectorField X;
  X.x1.assign(dims, RealVector::Zero(b.manifold.chart1.samples()));
  X.x2.assign(dims, RealVector::Zero(b.manifold.chart2.samples()));
  for (int chart = 0; chart < 2; ++chart) {
    auto& x = chart == 0 ? X.x1 : X.x2;
    const int samples = b.manifold.chart(chart).samples();
    for (int idx = 0; idx < samples; ++idx) {
      const RealVector gc = b.global_coords(chart, idx);
      const RealMatrix jac = b.global_jacobian(chart, idx);  // d global/d chart
      RealVector vg(dims);
      for (int c = 0; c < dims; ++c) vg(c) = amp * comp[c].value(gc);
      const RealVector vc = jac.inverse() * vg;
      for (int c = 0; c < dims; ++c) x[c](idx) = vc(c);
    }
  }
  return X;
}

LocalConnection smooth_connection(const ChartedBundle& b, std::uint64_t seed,
                                  double amp) {
  Rng rng(seed);
  const int dims = b.manifold.chart1.dims;
  const Matrix& V = b.conjugator;
  Matrix s1(2, 2), s2(2, 2), s3(2, 2);
  s1 << 0, 1, 1, 0;
  s2 << 0, -I, I, 0;
  s3 << 1, 0, 0, -1;
  const Matrix k3 = conj_by(V, I * s3);
  const Matrix k1 = conj_by(V, I * s1);
  const Matrix k2 = conj_by(V, I * s2);

  // Chart 1 carries A1 = p * k3 + q * k1; the gluing relation then fixes
  // A2 = Jinv (g^-1 A1 g + g^-1 dg). Conjugation by g rotates the (k1, k2)
  // plane by the angle 2f and fixes k3, so A2 is analytic as well:
  //   A2 = Jinv [ (p + df) k3 + q (cos 2f k1 + sin 2f k2) ].
  const bool wraps = dims == 1;
  std::vector<GlobalScalar> p, q;
  for (int c = 0; c < dims; ++c) {
    p.push_back(GlobalScalar::random(rng, wraps));
    q.push_back(GlobalScalar::random(rng, wraps));
  }

  LocalConnection conn;
  conn.A1.assign(dims, ChartField(b.manifold.chart1.samples()));
  conn.A2.assign(dims, ChartField(b.manifold.chart2.samples()));
  for (int chart = 0; chart < 2; ++chart) {
    const int samples = b.manifold.chart(chart).samples();
    auto& A = chart == 0 ? conn.A1 : conn.A2;
    for (int idx = 0; idx < samples; ++idx) {
      const RealVector gc = b.global_coords(chart, idx);
      const RealMatrix jac = b.global_jacobian(chart, idx);
      if (chart == 0) {
        for (int c = 0; c < dims; ++c) {
          A[c][idx] = Matrix::Zero(2, 2);
          for (int e = 0; e < dims; ++e)
            A[c][idx] += jac(e, c) * (amp * p[e].value(gc) * k3 +
                                      amp * q[e].value(gc) * k1);
        }
      } else {
        const double f = b.f_at(chart, idx);
        const Matrix rot = std::cos(2 * f) * k1 + std::sin(2 * f) * k2;
        for (int c = 0; c < dims; ++c) {
          Matrix v = Matrix::Zero(2, 2);
          for (int e = 0; e < dims; ++e)
            v += jac(e, c) * (amp * p[e].value(gc) * k3 + amp * q[e].value(gc) * rot);
          // inhomogeneous term g^-1 dg = i df sigma3-direction
          v += b.df_at(chart, c, idx) * k3;
          A[c][idx] = v;
        }
      }
    }
  }
  return conn;
}

GluedGaugeField smooth_infinitesimal_gauge(const ChartedBundle& b,
                                           std::uint64_t seed, double amp) {
  Rng rng(seed);
  const int dims = b.manifold.chart1.dims;
  const GlobalScalar psi = GlobalScalar::random(rng, b.manifold.chart1.dims == 1);
  const Matrix k3 = conj_by(b.conjugator, I * Matrix({{1.0, 0.0}, {0.0, -1.0}}));

  GluedGaugeField xi;
  for (int chart = 0; chart < 2; ++chart) {
    const int samples = b.manifold.chart(chart).samples();
    auto& v = chart == 0 ? xi.v1 : xi.v2;
    auto& dv = chart == 0 ? xi.dv1 : xi.dv2;
    v.assign(samples, Matrix::Zero(2, 2));
    dv.assign(dims, ChartField(samples, Matrix::Zero(2, 2)));
    for (int idx = 0; idx < samples; ++idx) {
      const RealVector gc = b.global_coords(chart, idx);
      const RealMatrix jac = b.global_jacobian(chart, idx);
      v[idx] = amp * psi.value(gc) * k3;
      const RealVector grad = jac.transpose() * psi.global_grad(gc);
      for (int c = 0; c < dims; ++c) dv[c][idx] = amp * grad(c) * k3;
    }
  }
  return xi;
}

GluedGaugeField exponentiate_gauge(const ChartedBundle& b,
                                   const GluedGaugeField& xi, double t) {
  // Commuting-family data (xi parallel to a fixed direction pointwise), so
  // d exp(t xi) = t (d xi) exp(t xi).
  const int dims = b.manifold.chart1.dims;
  GluedGaugeField u;
  for (int chart = 0; chart < 2; ++chart) {
    const ChartField& v = chart == 0 ? xi.v1 : xi.v2;
    const ChartOneForm& dv = chart == 0 ? xi.dv1 : xi.dv2;
    auto& uv = chart == 0 ? u.v1 : u.v2;
    auto& du = chart == 0 ? u.dv1 : u.dv2;
    const int samples = static_cast<int>(v.size());
    uv.assign(samples, Matrix::Identity(b.n, b.n));
    du.assign(dims, ChartField(samples, Matrix::Zero(b.n, b.n)));
    for (int idx = 0; idx < samples; ++idx) {
      uv[idx] = (t * v[idx]).exp();
      for (int c = 0; c < dims; ++c) du[c][idx] = t * dv[c][idx] * uv[idx];
    }
  }
  return u;
}

GluedGaugeField smooth_gauge_section(const ChartedBundle& b, std::uint64_t seed,
                                     double amp) {
  return exponentiate_gauge(b, smooth_infinitesimal_gauge(b, seed, amp), 1.0);
}

double masked_overlap_residual(const ChartedBundle& b, const GluedSection& s) {
  double worst = 0.0;
  for (std::size_t r = 0; r < b.manifold.overlap.size(); ++r) {
    const auto& ov = b.manifold.overlap[r];
    if (!b.manifold.chart1.fd_interior(ov.idx1) ||
        !b.manifold.chart2.fd_interior(ov.idx2))
      continue;
    const Matrix& g = b.transition.g[r];
    worst =
        std::max(worst, max_abs(s.a2[ov.idx2] - g.inverse() * s.a1[ov.idx1] * g));
  }
  return worst;
}

double masked_difference(const ChartedBundle& b, const GluedSection& s,
                         const GluedSection& t) {
  double worst = 0.0;
  for (int idx = 0; idx < b.manifold.chart1.samples(); ++idx)
    if (b.manifold.chart1.fd_interior(idx))
      worst = std::max(worst, max_abs(s.a1[idx] - t.a1[idx]));
  for (int idx = 0; idx < b.manifold.chart2.samples(); ++idx)
    if (b.manifold.chart2.fd_interior(idx))
      worst = std::max(worst, max_abs(s.a2[idx] - t.a2[idx]));
  return worst;
}

}  // namespace ncgeo
