#include "ncgeo/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

#include "ncgeo/connections.hpp"

namespace ncgeo {

int worker_threads() {
  if (const char* env = std::getenv("NCGEO_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

int chunk_count(int total) { return std::min(total, 64); }

void parallel_chunks(int total, const std::function<void(int, int, int)>& fn) {
  const int chunks = chunk_count(total);
  if (chunks <= 0) return;
  const int threads = std::min(worker_threads(), chunks);
  auto chunk_range = [&](int c, int& begin, int& end) {
    begin = static_cast<int>(static_cast<long>(total) * c / chunks);
    end = static_cast<int>(static_cast<long>(total) * (c + 1) / chunks);
  };
  if (threads == 1) {
    for (int c = 0; c < chunks; ++c) {
      int begin, end;
      chunk_range(c, begin, end);
      fn(c, begin, end);
    }
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t]() {
      for (int c = t; c < chunks; c += threads) {
        int begin, end;
        chunk_range(c, begin, end);
        fn(c, begin, end);
      }
    });
  for (auto& th : pool) th.join();
}

Lattice::Lattice(int d_, int n_, double h_) {
  if (d_ < 1 || n_ < 2 || h_ <= 0.0)
    throw std::invalid_argument("Lattice: need d >= 1, N >= 2, h > 0");
  d = d_;
  sites_per_axis = n_;
  spacing = h_;
  sites_ = 1;
  stride_.resize(d);
  for (int axis = 0; axis < d; ++axis) {
    stride_[axis] = sites_;
    sites_ *= sites_per_axis;
  }
  vol_ = std::pow(sites_per_axis * spacing, d);
}

int Lattice::shift(int site, int axis, int step) const {
  const int n = sites_per_axis;
  const int c = (site / stride_[axis]) % n;
  const int cc = ((c + step) % n + n) % n;
  return site + (cc - c) * stride_[axis];
}

FieldConfig FieldConfig::zero(const Lattice& lat, const LieBasisPtr& basis,
                              double mass) {
  if (mass <= 0.0) throw std::invalid_argument("FieldConfig: mass must be positive");
  FieldConfig f;
  f.lattice = lat;
  f.basis = basis;
  f.mass = mass;
  const int n = basis->n;
  f.a.assign(static_cast<std::size_t>(lat.sites()) * lat.d, Matrix::Zero(n, n));
  f.b.assign(static_cast<std::size_t>(lat.sites()) * basis->dim(),
             Matrix::Zero(n, n));
  return f;
}

FieldConfig FieldConfig::constant_b(const Lattice& lat, const LieBasisPtr& basis,
                                    double mass, double t) {
  FieldConfig f = zero(lat, basis, mass);
  for (int site = 0; site < lat.sites(); ++site)
    for (int k = 0; k < basis->dim(); ++k) f.b_at(site, k) = t * basis->E[k];
  return f;
}

double FieldConfig::field_constraint_residual() const {
  double worst = 0.0;
  for (const auto& m : a) {
    worst = std::max(worst, max_abs(m + m.adjoint()));
    worst = std::max(worst, std::abs(m.trace()));
  }
  for (const auto& m : b) worst = std::max(worst, max_abs(m - m.adjoint()));
  return worst;
}

namespace {

inline int pair_index(int a, int b, int total) {
  // index of (a < b) in the lexicographic list of increasing pairs
  return a * total - a * (a + 1) / 2 + (b - a - 1);
}

}  // namespace

CurvatureComponents curvature_components(const FieldConfig& f) {
  const Lattice& lat = f.lattice;
  const int d = lat.d, K = f.basis->dim(), n = f.basis->n;
  const int fpairs = d * (d - 1) / 2, vpairs = K * (K - 1) / 2;
  const double inv2h = 0.5 / lat.spacing;
  CurvatureComponents out;
  out.d = d;
  out.K = K;
  out.F.assign(static_cast<std::size_t>(lat.sites()) * fpairs, Matrix::Zero(n, n));
  out.Db.assign(static_cast<std::size_t>(lat.sites()) * d * K, Matrix::Zero(n, n));
  out.V.assign(static_cast<std::size_t>(lat.sites()) * vpairs, Matrix::Zero(n, n));

  parallel_chunks(lat.sites(), [&](int, int begin, int end) {
    for (int site = begin; site < end; ++site) {
      for (int mu = 0; mu < d; ++mu)
        for (int nu = mu + 1; nu < d; ++nu) {
          Matrix fmn =
              inv2h * (f.a_at(lat.shift(site, mu, +1), nu) -
                       f.a_at(lat.shift(site, mu, -1), nu)) -
              inv2h * (f.a_at(lat.shift(site, nu, +1), mu) -
                       f.a_at(lat.shift(site, nu, -1), mu)) +
              commutator(f.a_at(site, mu), f.a_at(site, nu));
          out.F[static_cast<std::size_t>(site) * fpairs + pair_index(mu, nu, d)] =
              std::move(fmn);
        }
      for (int mu = 0; mu < d; ++mu)
        for (int k = 0; k < K; ++k)
          out.Db[static_cast<std::size_t>(site) * d * K + mu * K + k] =
              inv2h * (f.b_at(lat.shift(site, mu, +1), k) -
                       f.b_at(lat.shift(site, mu, -1), k)) +
              commutator(f.a_at(site, mu), f.b_at(site, k));
      for (int k = 0; k < K; ++k)
        for (int l = k + 1; l < K; ++l) {
          Matrix v = commutator(f.b_at(site, k), f.b_at(site, l));
          for (int m = 0; m < K; ++m) v -= f.basis->C[m](k, l) * f.b_at(site, m);
          out.V[static_cast<std::size_t>(site) * vpairs + pair_index(k, l, K)] =
              std::move(v);
        }
    }
  });
  return out;
}

double ymh_action(const FieldConfig& f) {
  const Lattice& lat = f.lattice;
  const int d = lat.d, K = f.basis->dim();
  const int fpairs = d * (d - 1) / 2, vpairs = K * (K - 1) / 2;
  const double m2 = f.mass * f.mass, m4 = m2 * m2;
  const CurvatureComponents c = curvature_components(f);

  std::vector<double> partial(chunk_count(lat.sites()), 0.0);
  parallel_chunks(lat.sites(), [&](int chunk, int begin, int end) {
    double sum = 0.0;
    for (int site = begin; site < end; ++site) {
      double density = 0.0;
      for (int p = 0; p < fpairs; ++p)
        density += 0.5 * c.F[static_cast<std::size_t>(site) * fpairs + p].squaredNorm();
      for (int i = 0; i < d * K; ++i)
        density += m2 * c.Db[static_cast<std::size_t>(site) * d * K + i].squaredNorm();
      for (int p = 0; p < vpairs; ++p)
        density += 0.5 * m4 * c.V[static_cast<std::size_t>(site) * vpairs + p].squaredNorm();
      sum += density;
    }
    partial[chunk] = sum;
  });
  double total = 0.0;
  for (double p : partial) total += p;  // fixed order: deterministic
  return std::pow(lat.spacing, d) * total;
}

RealVector pack_coordinates(const FieldConfig& f) {
  const Lattice& lat = f.lattice;
  const int d = lat.d, K = f.basis->dim(), N = K;
  const int a_len = lat.sites() * d * N;
  const int b_len = lat.sites() * K * (N + 1);
  RealVector x(a_len + b_len);
  for (int site = 0; site < lat.sites(); ++site) {
    for (int mu = 0; mu < d; ++mu) {
      // a = sum alpha^k (i E_k): alpha = coordinates of -i a in the E basis
      const Vector coords = f.basis->coordinates(-I * f.a_at(site, mu));
      for (int k = 0; k < N; ++k) x((site * d + mu) * N + k) = coords(k).real();
    }
    for (int k = 0; k < K; ++k) {
      const Matrix& bk = f.b_at(site, k);
      const Vector coords = f.basis->coordinates(bk);
      const int base = a_len + (site * K + k) * (N + 1);
      for (int j = 0; j < N; ++j) x(base + j) = coords(j).real();
      x(base + N) = (bk.trace() / double(f.basis->n)).real();
    }
  }
  return x;
}

FieldConfig unpack_coordinates(const FieldConfig& like, const RealVector& x) {
  const Lattice& lat = like.lattice;
  const int d = lat.d, K = like.basis->dim(), N = K, n = like.basis->n;
  const int a_len = lat.sites() * d * N;
  FieldConfig f = FieldConfig::zero(lat, like.basis, like.mass);
  for (int site = 0; site < lat.sites(); ++site) {
    for (int mu = 0; mu < d; ++mu) {
      Matrix m = Matrix::Zero(n, n);
      for (int k = 0; k < N; ++k)
        m += x((site * d + mu) * N + k) * (I * like.basis->E[k]);
      f.a_at(site, mu) = m;
    }
    for (int k = 0; k < K; ++k) {
      const int base = a_len + (site * K + k) * (N + 1);
      Matrix m = Matrix::Zero(n, n);
      for (int j = 0; j < N; ++j) m += x(base + j) * like.basis->E[j];
      m += x(base + N) * Matrix::Identity(n, n);
      f.b_at(site, k) = m;
    }
  }
  return f;
}

ActionGradient action_gradient(const FieldConfig& f, bool with_a, bool with_b) {
  const Lattice& lat = f.lattice;
  const int d = lat.d, K = f.basis->dim(), N = K, n = f.basis->n;
  const int fpairs = d * (d - 1) / 2, vpairs = K * (K - 1) / 2;
  const double m2 = f.mass * f.mass, m4 = m2 * m2;
  const double hd = std::pow(lat.spacing, d);
  const CurvatureComponents c = curvature_components(f);

  // Adjoint fields; F and V are consulted in both index orders via signs.
  auto f_adj = [&](int site, int mu, int nu) -> Matrix {
    if (mu == nu) return Matrix::Zero(n, n);
    const double sign = mu < nu ? 1.0 : -1.0;
    const Matrix& m = c.F[static_cast<std::size_t>(site) * fpairs +
                          pair_index(std::min(mu, nu), std::max(mu, nu), d)];
    return sign * m.adjoint();
  };
  auto db_adj = [&](int site, int mu, int k) -> Matrix {
    return c.Db[static_cast<std::size_t>(site) * d * K + mu * K + k].adjoint();
  };
  auto v_adj = [&](int site, int k, int l) -> Matrix {
    if (k == l) return Matrix::Zero(n, n);
    const double sign = k < l ? 1.0 : -1.0;
    const Matrix& m = c.V[static_cast<std::size_t>(site) * vpairs +
                          pair_index(std::min(k, l), std::max(k, l), K)];
    return sign * m.adjoint();
  };

  const int a_len = lat.sites() * d * N;
  const int b_len = lat.sites() * K * (N + 1);
  RealVector grad = RealVector::Zero(a_len + b_len);
  const double inv2h = 0.5 / lat.spacing;

  parallel_chunks(lat.sites(), [&](int, int begin, int end) {
    for (int site = begin; site < end; ++site) {
      if (with_a) {
        for (int nu = 0; nu < d; ++nu) {
          Matrix h_a = Matrix::Zero(n, n);
          for (int mu = 0; mu < d; ++mu) {
            if (mu == nu) continue;
            const Matrix dmu_fadj = inv2h * (f_adj(lat.shift(site, mu, +1), mu, nu) -
                                             f_adj(lat.shift(site, mu, -1), mu, nu));
            h_a += -dmu_fadj + commutator(f_adj(site, mu, nu), f.a_at(site, mu));
          }
          for (int k = 0; k < K; ++k)
            h_a += 2.0 * m2 * commutator(f.b_at(site, k), db_adj(site, nu, k));
          for (int k = 0; k < N; ++k)
            grad((site * d + nu) * N + k) =
                hd * ((I * f.basis->E[k]) * h_a).trace().real();
        }
      }
      if (with_b) {
        for (int k = 0; k < K; ++k) {
          Matrix h_b = Matrix::Zero(n, n);
          for (int mu = 0; mu < d; ++mu) {
            const Matrix dmu_dbadj = inv2h * (db_adj(lat.shift(site, mu, +1), mu, k) -
                                              db_adj(lat.shift(site, mu, -1), mu, k));
            h_b += 2.0 * m2 *
                   (-dmu_dbadj + commutator(db_adj(site, mu, k), f.a_at(site, mu)));
          }
          Matrix quartic = Matrix::Zero(n, n);
          for (int l = 0; l < K; ++l)
            quartic += commutator(f.b_at(site, l), v_adj(site, k, l));
          Matrix ct = Matrix::Zero(n, n);
          for (int p = 0; p < K; ++p)
            for (int l = 0; l < K; ++l) {
              const Complex cc = f.basis->C[k](p, l);
              if (cc != Complex(0.0)) ct += cc * v_adj(site, p, l);
            }
          h_b += m4 * (quartic - 0.5 * ct);
          const int base = a_len + (site * K + k) * (N + 1);
          for (int j = 0; j < N; ++j)
            grad(base + j) = hd * (f.basis->E[j] * h_b).trace().real();
          grad(base + N) = hd * h_b.trace().real();
        }
      }
    }
  });

  ActionGradient out;
  out.coords = std::move(grad);
  out.norm = out.coords.norm();
  out.direction = unpack_coordinates(f, out.coords);
  return out;
}

LieRep average_higgs(const FieldConfig& f) {
  const int K = f.basis->dim(), n = f.basis->n;
  LieRep rep;
  rep.basis = f.basis;
  rep.r = n;
  rep.A.assign(K, Matrix::Zero(n, n));
  for (int site = 0; site < f.lattice.sites(); ++site)
    for (int k = 0; k < K; ++k) rep.A[k] += f.b_at(site, k);
  for (auto& a : rep.A) a /= double(f.lattice.sites());
  return rep;
}

std::string classify_higgs(const FieldConfig& f, double tol) {
  const LieRep avg = average_higgs(f);
  for (const auto& orbit : classify_flat(f.basis->n, f.basis))
    if (reps_equivalent(avg, orbit.representative.as_rep(), tol).equivalent)
      return orbit.label;
  return "";
}

MinimizeResult minimize(const FieldConfig& f0, const MinimizeOptions& opts) {
  MinimizeResult res;
  FieldConfig current = f0;
  RealVector x = pack_coordinates(current);
  double action = ymh_action(current);
  double step = opts.initial_step;
  constexpr double armijo = 1e-4;

  for (int iter = 0; iter <= opts.max_steps; ++iter) {
    const ActionGradient g = action_gradient(current, opts.optimize_a, opts.optimize_b);
    res.trace.push_back({iter, action, g.norm});
    if (action <= opts.action_tol || g.norm <= opts.gradient_tol) {
      res.converged = true;
      break;
    }
    if (iter == opts.max_steps) break;

    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      const RealVector x_try = x - step * g.coords;
      const FieldConfig f_try = unpack_coordinates(current, x_try);
      const double a_try = ymh_action(f_try);
      if (a_try <= action - armijo * step * g.norm * g.norm) {
        x = x_try;
        current = f_try;
        action = a_try;
        step = std::min(step * 1.5, 1e3);
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;  // line search exhausted: report best so far
  }

  res.config = current;
  res.final_action = action;
  res.final_gradient_norm = res.trace.empty() ? 0.0 : res.trace.back().gradient_norm;
  const LieRep avg = average_higgs(current);
  res.rep_residual = avg.closure_residual();
  if (res.converged) res.rep_class = classify_higgs(current);
  return res;
}

FieldConfig gauge_transform_fields(const std::vector<Matrix>& u,
                                   const FieldConfig& f) {
  const Lattice& lat = f.lattice;
  const int n = f.basis->n, d = lat.d, K = f.basis->dim();
  if (static_cast<int>(u.size()) != lat.sites())
    throw std::invalid_argument("gauge_transform_fields: one unitary per site");
  for (const auto& m : u) {
    if (max_abs(m.adjoint() * m - Matrix::Identity(n, n)) > 1e-10 ||
        std::abs(m.determinant() - Complex(1.0)) > 1e-10)
      throw std::invalid_argument("gauge_transform_fields: u must be special unitary");
  }
  FieldConfig out = FieldConfig::zero(lat, f.basis, f.mass);
  parallel_chunks(lat.sites(), [&](int, int begin, int end) {
    for (int site = begin; site < end; ++site) {
      const Matrix uh = u[site].adjoint();
      for (int mu = 0; mu < d; ++mu) {
        const Matrix du = (0.5 / lat.spacing) *
                          (u[lat.shift(site, mu, +1)] - u[lat.shift(site, mu, -1)]);
        // The lattice derivative breaks antihermiticity at O(h^2); project
        // back so the field constraints stay exact.
        out.a_at(site, mu) = traceless_part(
            antihermitian_part(uh * f.a_at(site, mu) * u[site] + uh * du));
      }
      for (int k = 0; k < K; ++k) out.b_at(site, k) = uh * f.b_at(site, k) * u[site];
    }
  });
  return out;
}

}  // namespace ncgeo
