#include "ncgeo/reduction.hpp"

#include <Eigen/SVD>

#include <cmath>

#include "ncgeo/lie_basis.hpp"

namespace ncgeo {

namespace {

Vector vec(const Matrix& m) {
  Vector v(m.size());
  int k = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) v(k++) = m(i, j);
  return v;
}

Matrix unvec(const Vector& v, int rows, int cols) {
  Matrix m(rows, cols);
  int k = 0;
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = v(k++);
  return m;
}

// distance of x from the complex span of the basis vectors (least squares)
double span_residual(const Matrix& basis_cols, const Vector& x) {
  if (basis_cols.cols() == 0) return x.norm();
  const Vector c =
      basis_cols.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(x);
  return (basis_cols * c - x).cwiseAbs().maxCoeff();
}

}  // namespace

double ReductionData::lambda_residual() const {
  double worst = 0.0;
  for (int a = 0; a < h0.dim; ++a)
    for (int b = 0; b < h0.dim; ++b) {
      Matrix rhs = Matrix::Zero(n, n);
      for (int c = 0; c < h0.dim; ++c) rhs += h0.f[c](a, b) * lambda[c];
      worst = std::max(worst, max_abs(commutator(lambda[a], lambda[b]) - rhs));
    }
  return worst;
}

double ReductionData::action_residual() const {
  double worst = 0.0;
  for (int a = 0; a < h0.dim; ++a)
    for (int b = 0; b < h0.dim; ++b) {
      RealMatrix rhs = RealMatrix::Zero(lm_dim, lm_dim);
      for (int c = 0; c < h0.dim; ++c) rhs += h0.f[c](a, b) * lm_action[c];
      const RealMatrix lhs =
          lm_action[a] * lm_action[b] - lm_action[b] * lm_action[a];
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  return worst;
}

void ReductionData::validate(double tol) const {
  if (static_cast<int>(lambda.size()) != h0.dim ||
      static_cast<int>(lm_action.size()) != h0.dim)
    throw std::invalid_argument("ReductionData: one lambda and one action per generator");
  if (h0.dim > 0 && h0.jacobi_residual() > std::max(tol, 1e-10))
    throw std::invalid_argument("ReductionData: h0 is not a Lie algebra");
  if (lambda_residual() > tol)
    throw std::invalid_argument("ReductionData: lambda is not a homomorphism");
  if (action_residual() > tol)
    throw std::invalid_argument("ReductionData: module action breaks the brackets");
}

std::vector<Matrix> centralizer_W(const ReductionData& rd, double rel_tol) {
  rd.validate();
  const auto w = commutant(rd.lambda, rd.n, rel_tol);
  if (algebra_closure_residual(w, rd.n) > 1e-12)
    throw std::runtime_error("centralizer_W: commutant is not closed under products");
  return w;
}

double algebra_closure_residual(const std::vector<Matrix>& w_basis, int n) {
  if (w_basis.empty()) return 0.0;
  Matrix cols(n * n, w_basis.size());
  for (std::size_t i = 0; i < w_basis.size(); ++i) cols.col(i) = vec(w_basis[i]);
  double worst = span_residual(cols, vec(Matrix::Identity(n, n)));
  for (const auto& a : w_basis)
    for (const auto& b : w_basis)
      worst = std::max(worst, span_residual(cols, vec(a * b)));
  return worst;
}

ReductiveSplit reductive_complement(const std::vector<Matrix>& ambient,
                                    const std::vector<Matrix>& sub, int n) {
  if (sub.empty()) throw std::invalid_argument("reductive_complement: empty subalgebra");
  // Trace form on the real span. Degeneracy on the subalgebra means no
  // orthogonal reductive split exists for this form.
  const int s = static_cast<int>(sub.size());
  RealMatrix gram(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) gram(i, j) = (sub[i] * sub[j]).trace().real();
  Eigen::JacobiSVD<RealMatrix> svd(gram);
  if (svd.singularValues().minCoeff() <
      1e-10 * std::max(1.0, svd.singularValues().maxCoeff()))
    throw std::invalid_argument(
        "reductive_complement: trace form degenerates on the subalgebra");

  // Solve B(v, sub_i) = 0 over real coefficients in the ambient basis.
  const int a = static_cast<int>(ambient.size());
  RealMatrix system(s, a);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < a; ++j) system(i, j) = (sub[i] * ambient[j]).trace().real();
  Eigen::JacobiSVD<RealMatrix> nsvd(system, Eigen::ComputeFullV);
  const auto& sv = nsvd.singularValues();
  const double cutoff = (sv.size() ? sv(0) : 0.0) * tol_rank;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  const RealMatrix null = nsvd.matrixV().rightCols(a - rank);

  ReductiveSplit out;
  for (Eigen::Index c = 0; c < null.cols(); ++c) {
    Matrix m = Matrix::Zero(n, n);
    for (int j = 0; j < a; ++j) m += null(j, c) * ambient[j];
    out.complement.push_back(m);
  }
  for (const auto& m : out.complement)
    for (const auto& x : sub)
      out.orthogonality =
          std::max(out.orthogonality, std::abs((x * m).trace().real()));
  // bracket stability: [sub, complement] inside span(complement)
  if (!out.complement.empty()) {
    Matrix cols(n * n, out.complement.size());
    for (std::size_t i = 0; i < out.complement.size(); ++i)
      cols.col(i) = vec(out.complement[i]);
    for (const auto& x : sub)
      for (const auto& m : out.complement)
        out.stability = std::max(out.stability, span_residual(cols, vec(commutator(x, m))));
  }
  return out;
}

std::vector<InvariantMap> invariant_maps_F(const ReductionData& rd,
                                           double rel_tol) {
  rd.validate();
  const int n = rd.n, n2 = n * n, D = rd.lm_dim;
  if (rd.h0.dim == 0) {
    // no constraint: all of Hom(l+m, M_n)
    std::vector<InvariantMap> all;
    for (int v = 0; v < D; ++v)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          InvariantMap f{std::vector<Matrix>(D, Matrix::Zero(n, n))};
          f.images[v](i, j) = 1.0;
          all.push_back(std::move(f));
        }
    return all;
  }
  // Unknown f as a (n^2 D)-vector; blocks indexed by (generator, module slot):
  // sum_w R_a(w, u) f_w - [lambda_a, f_u] = 0.
  Matrix system(rd.h0.dim * D * n2, D * n2);
  system.setZero();
  const Matrix id = Matrix::Identity(n, n);
  auto kron = [n](const Matrix& x, const Matrix& y) {
    Matrix k(n * n, n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) k.block(i * n, j * n, n, n) = x(i, j) * y;
    return k;
  };
  for (int a = 0; a < rd.h0.dim; ++a) {
    const Matrix ad_lambda =
        kron(id, rd.lambda[a]) - kron(rd.lambda[a].transpose(), id);
    for (int u = 0; u < D; ++u) {
      const int row0 = (a * D + u) * n2;
      for (int w = 0; w < D; ++w) {
        const double r = rd.lm_action[a](w, u);
        if (r != 0.0)
          system.block(row0, w * n2, n2, n2) +=
              r * Matrix::Identity(n2, n2);
      }
      system.block(row0, u * n2, n2, n2) -= ad_lambda;
    }
  }
  const Matrix ns = null_space(system, rel_tol);
  std::vector<InvariantMap> out;
  for (Eigen::Index c = 0; c < ns.cols(); ++c) {
    InvariantMap f{std::vector<Matrix>(D)};
    for (int v = 0; v < D; ++v) f.images[v] = unvec(ns.col(c).segment(v * n2, n2), n, n);
    out.push_back(std::move(f));
  }
  return out;
}

ReducedDims reduced_space_dims(const ReductionData& rd, const PointAction& act,
                               double rel_tol) {
  ReducedDims out;
  const int n = rd.n;
  const auto w_basis = centralizer_W(rd);
  const int wd = static_cast<int>(w_basis.size());
  const int kz = act.kz.dim;
  if (act.k_dim < 0 || act.k_dim > kz)
    throw std::invalid_argument("reduced_space_dims: k block out of range");
  const int z_dim = kz - act.k_dim;
  if (static_cast<int>(act.z_matrices.size()) != z_dim)
    throw std::invalid_argument("reduced_space_dims: one matrix per z0 generator");

  // --- basic one-forms in W (x) Lambda^1 (k+z0)* over a point --------------
  if (kz == 0) {
    out.basic_one_forms = 0;
  } else {
    // W-coordinates of the action of each generator on W (ad for z0, zero
    // for k over a point).
    Matrix wcols(n * n, wd);
    for (int i = 0; i < wd; ++i) wcols.col(i) = vec(w_basis[i]);
    const auto wsolver = wcols.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV);
    std::vector<Matrix> act_w(kz, Matrix::Zero(wd, wd));
    for (int u = act.k_dim; u < kz; ++u) {
      const Matrix& z = act.z_matrices[u - act.k_dim];
      for (int i = 0; i < wd; ++i) {
        const Matrix bracket_zi = commutator(z, w_basis[i]);
        const Vector coeffs = wsolver.solve(vec(bracket_zi));
        if ((wcols * coeffs - vec(bracket_zi)).cwiseAbs().maxCoeff() > 1e-8)
          throw std::invalid_argument(
              "reduced_space_dims: z0 does not preserve the centralizer");
        act_w[u].col(i) = coeffs;
      }
    }
    // unknowns: omega in W (x) Lambda^1, coordinates x(j, v) over wd x kz.
    // horizontal: omega(u) = 0 per generator; invariant: L_u omega = 0 with
    // (L_u omega)(v) = act_w[u] omega(v) - omega([u, v]).
    const int unknowns = wd * kz;
    Matrix system((kz + kz * kz) * wd, unknowns);
    system.setZero();
    int row = 0;
    for (int u = 0; u < kz; ++u) {  // interior products
      for (int j = 0; j < wd; ++j) system(row + j, j * kz + u) = 1.0;
      row += wd;
    }
    for (int u = 0; u < kz; ++u)
      for (int v = 0; v < kz; ++v) {  // Lie derivatives, evaluated on e_v
        for (int j = 0; j < wd; ++j)
          for (int jj = 0; jj < wd; ++jj)
            system.block(row, 0, wd, unknowns)(j, jj * kz + v) +=
                act_w[u](j, jj);
        for (int w2 = 0; w2 < kz; ++w2) {
          const double f = act.kz.f[w2](u, v);
          if (f != 0.0)
            for (int j = 0; j < wd; ++j) system(row + j, j * kz + w2) -= f;
        }
        row += wd;
      }
    out.basic_one_forms = static_cast<int>(null_space(system, rel_tol).cols());
  }

  // --- invariants of F ------------------------------------------------------
  const auto f_basis = invariant_maps_F(rd);
  const int fd = static_cast<int>(f_basis.size());
  if (kz == 0 || fd == 0) {
    out.invariant_maps = fd;
    return out;
  }
  const int amb = rd.lm_dim * n * n;
  Matrix stacked(kz * amb, fd);
  stacked.setZero();
  for (int u = 0; u < kz; ++u)
    for (int c = 0; c < fd; ++c) {
      // (L_u f)(e_v) = -f([u, e_v]) + [z_u, f(e_v)]
      std::vector<Matrix> lf(rd.lm_dim, Matrix::Zero(n, n));
      if (u < act.k_dim && !act.k_on_lm.empty()) {
        const RealMatrix& R = act.k_on_lm[u];
        for (int v = 0; v < rd.lm_dim; ++v)
          for (int w2 = 0; w2 < rd.lm_dim; ++w2)
            lf[v] -= R(w2, v) * f_basis[c].images[w2];
      }
      if (u >= act.k_dim) {
        const Matrix& z = act.z_matrices[u - act.k_dim];
        for (int v = 0; v < rd.lm_dim; ++v)
          lf[v] += commutator(z, f_basis[c].images[v]);
      }
      for (int v = 0; v < rd.lm_dim; ++v)
        stacked.col(c).segment(u * amb + v * n * n, n * n) = vec(lf[v]);
    }
  out.invariant_maps = static_cast<int>(null_space(stacked, rel_tol).cols());
  return out;
}

}  // namespace ncgeo
