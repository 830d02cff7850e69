#include "ncgeo/forms.hpp"

#include <Eigen/SVD>

#include <bit>
#include <cmath>

namespace ncgeo {

namespace {

int popcount(std::uint32_t m) { return std::popcount(m); }

std::vector<int> mask_indices(std::uint32_t mask) {
  std::vector<int> idx;
  for (int k = 0; mask; ++k, mask >>= 1)
    if (mask & 1u) idx.push_back(k);
  return idx;
}

}  // namespace

int merge_sign(std::uint32_t a, std::uint32_t b) {
  // Inversions between sorted tuple a followed by sorted tuple b.
  int inversions = 0;
  for (std::uint32_t bb = b; bb;) {
    const int j = std::countr_zero(bb);
    bb &= bb - 1;
    inversions += popcount(a >> (j + 1));
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

const Matrix& MatrixForm::at(std::uint32_t mask) const {
  auto it = coeff.find(mask);
  if (it != coeff.end()) return it->second;
  static thread_local Matrix zero;
  zero = Matrix::Zero(rows, rows);
  return zero;
}

void MatrixForm::add(std::uint32_t mask, const Matrix& m) {
  auto it = coeff.find(mask);
  if (it == coeff.end())
    coeff.emplace(mask, m);
  else
    it->second += m;
}

double MatrixForm::norm() const {
  double worst = 0.0;
  for (const auto& [mask, m] : coeff) worst = std::max(worst, max_abs(m));
  return worst;
}

MatrixForm& MatrixForm::prune(double tol) {
  for (auto it = coeff.begin(); it != coeff.end();)
    it = (max_abs(it->second) <= tol) ? coeff.erase(it) : std::next(it);
  return *this;
}

MatrixForm MatrixForm::operator+(const MatrixForm& other) const {
  if (degree != other.degree || rows != other.rows)
    throw std::invalid_argument("MatrixForm: degree/size mismatch in sum");
  MatrixForm out = *this;
  for (const auto& [mask, m] : other.coeff) out.add(mask, m);
  return out;
}

MatrixForm MatrixForm::operator-(const MatrixForm& other) const {
  return *this + other * Complex(-1.0);
}

MatrixForm MatrixForm::operator*(Complex scale) const {
  MatrixForm out = *this;
  for (auto& [mask, m] : out.coeff) m *= scale;
  return out;
}

Matrix MatrixForm::evaluate(const std::vector<InnerDerivation>& args) const {
  if (static_cast<int>(args.size()) != degree)
    throw std::invalid_argument("MatrixForm::evaluate: argument count != degree");
  if (degree == 0) {
    auto it = coeff.find(0);
    return it == coeff.end() ? Matrix::Zero(rows, rows) : it->second;
  }
  const int N = basis->dim();
  Matrix coords(N, degree);
  for (int j = 0; j < degree; ++j) coords.col(j) = args[j].coordinates(*basis);

  Matrix out = Matrix::Zero(rows, rows);
  Matrix minor(degree, degree);
  for (const auto& [mask, c] : coeff) {
    const auto idx = mask_indices(mask);
    for (int i = 0; i < degree; ++i)
      for (int j = 0; j < degree; ++j) minor(i, j) = coords(idx[i], j);
    out += minor.determinant() * c;
  }
  return out;
}

MatrixForm wedge(const MatrixForm& w, const MatrixForm& e) {
  if (w.basis != e.basis)
    throw std::invalid_argument("wedge: forms over different bases");
  MatrixForm out = MatrixForm::zero(w.basis, w.degree + e.degree, w.rows);
  if (out.degree > w.basis->dim()) return out;  // zero form past top degree
  for (const auto& [ma, ca] : w.coeff)
    for (const auto& [mb, cb] : e.coeff) {
      if (ma & mb) continue;
      out.add(ma | mb, double(merge_sign(ma, mb)) * (ca * cb));
    }
  return out.prune();
}

MatrixForm differential(const MatrixForm& w) {
  const LieBasis& B = *w.basis;
  const int N = B.dim();
  MatrixForm out = MatrixForm::zero(w.basis, w.degree + 1, w.rows);
  if (out.degree > N) return out;

  for (const auto& [mask, a] : w.coeff) {
    // (d'a) theta^K with d'a = [E_l, a] theta^l.
    for (int l = 0; l < N; ++l) {
      const std::uint32_t lm = 1u << l;
      if (mask & lm) continue;
      out.add(lm | mask, double(merge_sign(lm, mask)) * commutator(B.E[l], a));
    }
    // a d'(theta^K) as a graded derivation over the factors of theta^K,
    // with d'theta^k = -C^k_{lm} theta^l theta^m summed over l < m.
    const auto idx = mask_indices(mask);
    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
      const int k = idx[pos];
      const std::uint32_t rest = mask & ~(1u << k);
      const double pos_sign = (pos % 2 == 0) ? 1.0 : -1.0;
      for (int l = 0; l < N; ++l) {
        if (rest & (1u << l)) continue;
        for (int m = l + 1; m < N; ++m) {
          if (rest & (1u << m)) continue;
          const Complex c = B.C[k](l, m);
          if (c == Complex(0.0)) continue;
          const std::uint32_t pair = (1u << l) | (1u << m);
          out.add(pair | rest,
                  pos_sign * double(merge_sign(pair, rest)) * (-c) * a);
        }
      }
    }
  }
  return out.prune();
}

Matrix koszul_differential_eval(const MatrixForm& w,
                                const std::vector<InnerDerivation>& args) {
  const int p = w.degree;
  if (static_cast<int>(args.size()) != p + 1)
    throw std::invalid_argument("koszul_differential_eval: needs degree+1 arguments");
  Matrix out = Matrix::Zero(w.rows, w.rows);
  std::vector<InnerDerivation> sub;
  for (int i = 0; i <= p; ++i) {
    sub.clear();
    for (int j = 0; j <= p; ++j)
      if (j != i) sub.push_back(args[j]);
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    out += sign * commutator(args[i].gamma, w.evaluate(sub));
  }
  for (int i = 0; i <= p; ++i)
    for (int j = i + 1; j <= p; ++j) {
      sub.clear();
      sub.push_back(bracket(args[i], args[j]));
      for (int l = 0; l <= p; ++l)
        if (l != i && l != j) sub.push_back(args[l]);
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;  // (-1)^{i+j} 1-based
      out += sign * w.evaluate(sub);
    }
  return out;
}

MatrixForm canonical_theta(const LieBasisPtr& basis) {
  MatrixForm f = MatrixForm::zero(basis, 1, basis->n);
  for (int k = 0; k < basis->dim(); ++k) f.coeff[1u << k] = basis->E[k];
  return f;
}

MatrixForm interior(const InnerDerivation& x, const MatrixForm& w) {
  if (w.degree == 0) return MatrixForm::zero(w.basis, 0, w.rows);
  const Vector coords = x.coordinates(*w.basis);
  MatrixForm out = MatrixForm::zero(w.basis, w.degree - 1, w.rows);
  if (w.degree == 0) return out;
  for (const auto& [mask, c] : w.coeff) {
    const auto idx = mask_indices(mask);
    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
      const Complex xc = coords(idx[pos]);
      if (xc == Complex(0.0)) continue;
      const double sign = (pos % 2 == 0) ? 1.0 : -1.0;
      out.add(mask & ~(1u << idx[pos]), sign * xc * c);
    }
  }
  return out.prune();
}

MatrixForm lie_derivative(const InnerDerivation& x, const MatrixForm& w) {
  if (w.degree == 0) return interior(x, differential(w));  // i_X vanishes on degree 0
  return interior(x, differential(w)) + differential(interior(x, w));
}

Complex nc_integrate(const MatrixForm& w) {
  const int N = w.basis->dim();
  if (w.degree != N) return 0.0;
  auto it = w.coeff.find((1u << N) - 1u);
  if (it == w.coeff.end()) return 0.0;
  return it->second.trace() / (double(w.basis->n) * w.basis->sqrt_abs_det_g);
}

std::vector<int> cohomology_dims(const LieBasisPtr& basis, double rel_tol) {
  const int n = basis->n;
  if (n > 3)
    throw capacity_error("cohomology_dims: full complex materialized only for n <= 3");
  const int N = basis->dim();
  const int n2 = n * n;

  // Enumerate the monomial masks per degree.
  std::vector<std::vector<std::uint32_t>> masks(N + 1);
  std::vector<std::map<std::uint32_t, int>> mask_pos(N + 1);
  for (std::uint32_t m = 0; m < (1u << N); ++m) {
    const int p = popcount(m);
    mask_pos[p][m] = static_cast<int>(masks[p].size());
    masks[p].push_back(m);
  }

  auto dim_of = [&](int p) { return static_cast<int>(masks[p].size()) * n2; };

  // d' assembled degree by degree from its action on single-term forms.
  std::vector<Eigen::Index> rank(N + 1, 0);
  std::vector<int> kernel(N + 1, 0);
  for (int p = 0; p <= N; ++p) {
    if (p == N) {
      kernel[p] = dim_of(p);
      rank[p] = 0;
      continue;
    }
    Matrix D = Matrix::Zero(dim_of(p + 1), dim_of(p));
    for (std::size_t mi = 0; mi < masks[p].size(); ++mi)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          MatrixForm f = MatrixForm::zero(basis, p, n);
          Matrix unit = Matrix::Zero(n, n);
          unit(i, j) = 1.0;
          f.coeff[masks[p][mi]] = unit;
          const MatrixForm df = differential(f);
          const int col = static_cast<int>(mi) * n2 + i * n + j;
          for (const auto& [omask, om] : df.coeff) {
            const int orow0 = mask_pos[p + 1].at(omask) * n2;
            for (int a = 0; a < n; ++a)
              for (int b = 0; b < n; ++b) D(orow0 + a * n + b, col) = om(a, b);
          }
        }
    if (D.rows() == 0 || D.cols() == 0) {
      rank[p] = 0;
      kernel[p] = dim_of(p);
    } else {
      Eigen::BDCSVD<Matrix> svd(D);
      const auto& sv = svd.singularValues();
      const double cutoff = (sv.size() ? sv(0) : 0.0) * rel_tol;
      Eigen::Index r = 0;
      for (Eigen::Index s = 0; s < sv.size(); ++s)
        if (sv(s) > cutoff) ++r;
      rank[p] = r;
      kernel[p] = dim_of(p) - static_cast<int>(r);
    }
  }

  std::vector<int> dims(N + 1, 0);
  for (int p = 0; p <= N; ++p)
    dims[p] = kernel[p] - static_cast<int>(p > 0 ? rank[p - 1] : 0);

  // Euler-characteristic cross-check guards the rank thresholds.
  long chi_complex = 0, chi_h = 0;
  for (int p = 0; p <= N; ++p) {
    const long sign = (p % 2 == 0) ? 1 : -1;
    chi_complex += sign * dim_of(p);
    chi_h += sign * dims[p];
  }
  if (chi_complex != chi_h)
    throw std::runtime_error("cohomology_dims: Euler characteristic mismatch");
  return dims;
}

}  // namespace ncgeo
