#include "ncgeo/lie_basis.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <set>

namespace ncgeo {

Matrix null_space(const Matrix& m, double rel_tol) {
  if (m.rows() == 0) return Matrix::Identity(m.cols(), m.cols());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = (sv.size() > 0 ? sv(0) : 0.0) * rel_tol;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

Eigen::Index numeric_rank(const Matrix& m, double rel_tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  const double cutoff = sv(0) * rel_tol;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return rank;
}

Vector LieBasis::coordinates(const Matrix& gamma) const {
  const int N = dim();
  Vector rhs(N);
  for (int l = 0; l < N; ++l) rhs(l) = (gamma * E[l]).trace() / double(n);
  // n g_{kl} c^k = Tr(gamma E_l) / ... with g as defined: c = g^-1 rhs.
  Vector c(N);
  RealVector re = g_inv * rhs.real();
  RealVector im = g_inv * rhs.imag();
  for (int k = 0; k < N; ++k) c(k) = Complex(re(k), im(k));
  return c;
}

double LieBasis::closure_residual() const {
  const int N = dim();
  double worst = 0.0;
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l) {
      Matrix rhs = Matrix::Zero(n, n);
      for (int m = 0; m < N; ++m) rhs += C[m](k, l) * E[m];
      worst = std::max(worst, max_abs(commutator(E[k], E[l]) - rhs));
    }
  return worst;
}

LieBasisPtr build_su_basis(int n) {
  if (n < 2) throw std::invalid_argument("build_su_basis: n must be >= 2");
  auto basis = std::make_shared<LieBasis>();
  basis->n = n;
  auto unit = [n](int i, int j) {
    Matrix m = Matrix::Zero(n, n);
    m(i, j) = 1.0;
    return m;
  };
  // Symmetric pairs, antisymmetric pairs, then diagonal matrices.
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) basis->E.push_back(unit(j, k) + unit(k, j));
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      basis->E.push_back(-I * (unit(j, k) - unit(k, j)));
  for (int l = 1; l < n; ++l) {
    Matrix m = Matrix::Zero(n, n);
    for (int j = 0; j < l; ++j) m(j, j) = 1.0;
    m(l, l) = -double(l);
    basis->E.push_back(std::sqrt(2.0 / (l * (l + 1.0))) * m);
  }

  const int N = basis->dim();
  basis->g = RealMatrix(N, N);
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l) {
      const Complex t = (basis->E[k] * basis->E[l]).trace() / double(n);
      basis->g(k, l) = t.real();
    }
  basis->g_inv = basis->g.inverse();
  basis->sqrt_abs_det_g = std::sqrt(std::abs(basis->g.determinant()));

  // C^m_{kl} from Tr([E_k,E_l] E_p) = n C^m_{kl} g_{mp}.
  basis->C.assign(N, Matrix::Zero(N, N));
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l) {
      const Vector c = basis->coordinates(commutator(basis->E[k], basis->E[l]));
      for (int m = 0; m < N; ++m) basis->C[m](k, l) = c(m);
    }
  return basis;
}

double LieRep::closure_residual() const {
  const int N = basis->dim();
  double worst = 0.0;
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l) {
      Matrix rhs = Matrix::Zero(r, r);
      for (int m = 0; m < N; ++m) rhs += basis->C[m](k, l) * A[m];
      worst = std::max(worst, max_abs(commutator(A[k], A[l]) - rhs));
    }
  return worst;
}

LieRep sl2_irrep(double j, const LieBasisPtr& basis) {
  if (basis->n != 2) throw std::invalid_argument("sl2_irrep: needs the n=2 basis");
  const double twoj = 2.0 * j;
  if (j < 0 || std::abs(twoj - std::round(twoj)) > 1e-12)
    throw std::invalid_argument("sl2_irrep: j must be a nonnegative half-integer");
  const int r = static_cast<int>(std::round(twoj)) + 1;

  // Angular-momentum matrices in the |j, m> basis, m = j .. -j.
  Matrix jz = Matrix::Zero(r, r), jp = Matrix::Zero(r, r);
  for (int a = 0; a < r; ++a) jz(a, a) = j - a;
  for (int a = 1; a < r; ++a) {
    const double m = j - a;
    jp(a - 1, a) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  const Matrix jm = jp.adjoint();
  LieRep rep;
  rep.basis = basis;
  rep.r = r;
  rep.A = {(jp + jm), -I * (jp - jm), 2.0 * jz};  // A_k = 2 J_k
  return rep;
}

LieRep direct_sum(const std::vector<LieRep>& reps) {
  if (reps.empty()) throw std::invalid_argument("direct_sum: empty list");
  for (const auto& rep : reps)
    if (rep.basis->n != reps.front().basis->n)
      throw std::invalid_argument("direct_sum: mismatched source bases");
  int total = 0;
  for (const auto& rep : reps) total += rep.r;
  LieRep out;
  out.basis = reps.front().basis;
  out.r = total;
  const int N = out.basis->dim();
  out.A.assign(N, Matrix::Zero(total, total));
  for (int k = 0; k < N; ++k) {
    int off = 0;
    for (const auto& rep : reps) {
      out.A[k].block(off, off, rep.r, rep.r) = rep.A[k];
      off += rep.r;
    }
  }
  return out;
}

std::vector<Matrix> commutant(const std::vector<Matrix>& S, int n, double rel_tol) {
  for (const auto& s : S)
    if (s.rows() != n || s.cols() != n)
      throw std::invalid_argument("commutant: matrices must be n x n");
  if (S.empty()) {
    std::vector<Matrix> all;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Matrix m = Matrix::Zero(n, n);
        m(i, j) = 1.0;
        all.push_back(m);
      }
    return all;
  }
  // vec(xs - sx) = (s^T kron 1 - 1 kron s) vec(x), column-major vec.
  const int n2 = n * n;
  Matrix system(static_cast<int>(S.size()) * n2, n2);
  const Matrix id = Matrix::Identity(n, n);
  auto kron = [n](const Matrix& a, const Matrix& b) {
    Matrix k(n * n, n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) k.block(i * n, j * n, n, n) = a(i, j) * b;
    return k;
  };
  for (std::size_t s = 0; s < S.size(); ++s)
    system.middleRows(static_cast<int>(s) * n2, n2) =
        kron(S[s].transpose(), id) - kron(id, S[s]);
  const Matrix ns = null_space(system, rel_tol);
  std::vector<Matrix> out;
  for (Eigen::Index c = 0; c < ns.cols(); ++c) {
    Matrix m(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) m(i, j) = ns(j * n + i, c);
    out.push_back(m);
  }
  return out;
}

Matrix casimir(const LieRep& rep) {
  const int N = rep.basis->dim();
  Matrix c = Matrix::Zero(rep.r, rep.r);
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l)
      c += rep.basis->g_inv(k, l) * rep.A[k] * rep.A[l];
  return c;
}

namespace {

std::vector<Complex> sorted_spectrum(const Matrix& m) {
  Eigen::ComplexEigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  std::vector<Complex> ev(es.eigenvalues().data(),
                          es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) {
    if (std::abs(a.real() - b.real()) > 1e-9) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return ev;
}

bool spectra_match(const Matrix& a, const Matrix& b, double tol) {
  const auto ea = sorted_spectrum(a), eb = sorted_spectrum(b);
  for (std::size_t i = 0; i < ea.size(); ++i)
    if (std::abs(ea[i] - eb[i]) > tol) return false;
  return true;
}

}  // namespace

EquivalenceResult reps_equivalent(const LieRep& a, const LieRep& b, double tol,
                                  std::uint64_t seed) {
  if (a.r != b.r) return {false, std::nullopt};
  if (a.basis->n != b.basis->n)
    throw std::invalid_argument("reps_equivalent: mismatched source bases");
  const int r = a.r;
  const int N = a.basis->dim();

  // Necessary condition: the Casimir spectra of equivalent reps coincide.
  if (!spectra_match(casimir(a), casimir(b), std::max(tol, 1e-6) * 10))
    return {false, std::nullopt};

  // Intertwiner system (A_k^T kron 1 - 1 kron B_k) vec(T) = 0.
  const int r2 = r * r;
  Matrix system(N * r2, r2);
  const Matrix id = Matrix::Identity(r, r);
  auto kron = [r](const Matrix& x, const Matrix& y) {
    Matrix k(r * r, r * r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) k.block(i * r, j * r, r, r) = x(i, j) * y;
    return k;
  };
  for (int k = 0; k < N; ++k)
    system.middleRows(k * r2, r2) =
        kron(a.A[k].transpose(), id) - kron(id, b.A[k]);

  // Null-space threshold scaled by the requested tolerance so that nearly
  // converged numerical reps can still be classified. The floor at 1 makes
  // a rep within tol of zero count as zero.
  Eigen::JacobiSVD<Matrix> svd(system, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double scale = std::max(sv.size() > 0 ? sv(0) : 0.0, 1.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > scale * tol) ++rank;
  const Eigen::Index dim = r2 - rank;
  if (dim == 0) return {false, std::nullopt};
  const Matrix basis_vecs = svd.matrixV().rightCols(dim);

  auto unvec = [r](const Vector& v) {
    Matrix m(r, r);
    for (int j = 0; j < r; ++j)
      for (int i = 0; i < r; ++i) m(i, j) = v(j * r + i);
    return m;
  };

  // Invertibles are dense in the solution space whenever one exists, so a
  // few random samples suffice.
  Rng rng(seed);
  for (int attempt = 0; attempt < 32; ++attempt) {
    Vector combo = Vector::Zero(r2);
    for (Eigen::Index c = 0; c < dim; ++c)
      combo += rng.complex_gaussian() * basis_vecs.col(c);
    Matrix t = unvec(combo);
    t /= t.norm();
    if (std::abs(t.determinant()) > 1e-8) return {true, t};
  }
  return {false, std::nullopt};
}

std::vector<std::vector<int>> integer_partitions(int r) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  // Weakly decreasing parts via depth-first enumeration.
  auto rec = [&](auto&& self, int remaining, int max_part) -> void {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
      cur.push_back(p);
      self(self, remaining - p, p);
      cur.pop_back();
    }
  };
  rec(rec, r, r);
  return out;
}

}  // namespace ncgeo
