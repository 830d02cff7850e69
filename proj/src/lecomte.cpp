#include "ncgeo/lecomte.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace ncgeo {

namespace {

std::vector<int> mask_indices(std::uint32_t mask) {
  std::vector<int> idx;
  for (int k = 0; mask; ++k, mask >>= 1)
    if (mask & 1u) idx.push_back(k);
  return idx;
}

// sign of inserting index a into the increasing tuple `rest`
double insert_sign(int a, std::uint32_t rest) {
  const int below = std::popcount(rest & ((1u << a) - 1u));
  return below % 2 == 0 ? 1.0 : -1.0;
}

}  // namespace

RealVector LieStructure::bracket(const RealVector& x, const RealVector& y) const {
  RealVector out = RealVector::Zero(dim);
  for (int c = 0; c < dim; ++c) out(c) = x.dot(f[c] * y);
  return out;
}

double LieStructure::jacobi_residual() const {
  double worst = 0.0;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int q = 0; q < dim; ++q)
        for (int p = 0; p < dim; ++p) {
          double sum = 0.0;
          for (int m = 0; m < dim; ++m)
            sum += f[m](a, b) * f[p](m, q) + f[m](b, q) * f[p](m, a) +
                   f[m](q, a) * f[p](m, b);
          worst = std::max(worst, std::abs(sum));
        }
  return worst;
}

double LieSES::ideal_residual() const {
  double worst = 0.0;
  for (int a = 0; a < g.dim; ++a)
    for (int b = 0; b < i_dim; ++b)
      for (int c = i_dim; c < g.dim; ++c)
        worst = std::max(worst, std::abs(g.f[c](a, b)));
  return worst;
}

LieStructure LieSES::quotient() const {
  const int h = h_dim();
  LieStructure out;
  out.dim = h;
  out.f.assign(h, RealMatrix::Zero(h, h));
  for (int c = 0; c < h; ++c)
    for (int a = 0; a < h; ++a)
      for (int b = 0; b < h; ++b)
        out.f[c](a, b) = g.f[i_dim + c](i_dim + a, i_dim + b);
  return out;
}

void LieSES::validate(double tol) const {
  if (i_dim < 0 || i_dim > g.dim)
    throw std::invalid_argument("LieSES: ideal dimension out of range");
  if (g.jacobi_residual() > tol)
    throw std::invalid_argument("LieSES: Jacobi identity fails");
  if (ideal_residual() > tol)
    throw std::invalid_argument("LieSES: first block is not an ideal");
  if (quotient().jacobi_residual() > tol)
    throw std::invalid_argument("LieSES: induced quotient bracket is not Lie");
}

Splitting Splitting::natural(const LieSES& s) {
  Splitting phi;
  phi.phi = RealMatrix::Zero(s.g.dim, s.h_dim());
  phi.phi.bottomRows(s.h_dim()).setIdentity();
  return phi;
}

Splitting Splitting::perturbed(const LieSES& s, const RealMatrix& lambda) {
  if (lambda.rows() != s.i_dim || lambda.cols() != s.h_dim())
    throw std::invalid_argument("Splitting::perturbed: lambda must be i_dim x h_dim");
  Splitting phi = natural(s);
  phi.phi.topRows(s.i_dim) += lambda;
  return phi;
}

double Splitting::section_residual(const LieSES& s) const {
  return (phi.bottomRows(s.h_dim()) - RealMatrix::Identity(s.h_dim(), s.h_dim()))
      .cwiseAbs()
      .maxCoeff();
}

RealVector Cochain::at(std::uint32_t mask) const {
  auto it = c.find(mask);
  return it == c.end() ? RealVector::Zero(vdim) : it->second;
}

void Cochain::add(std::uint32_t mask, const RealVector& v) {
  auto it = c.find(mask);
  if (it == c.end())
    c.emplace(mask, v);
  else
    it->second += v;
}

double Cochain::norm() const {
  double worst = 0.0;
  for (const auto& [mask, v] : c)
    worst = std::max(worst, v.cwiseAbs().maxCoeff());
  return worst;
}

Cochain chevalley_d(const LieStructure& h, const Cochain& w) {
  Cochain out = Cochain::zero(w.p + 1, w.hdim, w.vdim);
  if (out.p > w.hdim) return out;
  for (std::uint32_t mask = 0; mask < (1u << w.hdim); ++mask) {
    if (std::popcount(mask) != static_cast<unsigned>(out.p)) continue;
    const auto idx = mask_indices(mask);
    RealVector value = RealVector::Zero(w.vdim);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = i + 1; j < idx.size(); ++j) {
        const double pos_sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;  // (-1)^{i+j}, 1-based
        const std::uint32_t rest = mask & ~((1u << idx[i]) | (1u << idx[j]));
        for (int cidx = 0; cidx < w.hdim; ++cidx) {
          const double fc = h.f[cidx](idx[i], idx[j]);
          if (fc == 0.0 || (rest & (1u << cidx))) continue;
          value += pos_sign * fc * insert_sign(cidx, rest) *
                   w.at(rest | (1u << cidx));
        }
      }
    if (value.cwiseAbs().maxCoeff() > 0.0) out.c.emplace(mask, value);
  }
  return out;
}

Cochain phi_bracket(const LieSES& s, const Splitting& phi, const Cochain& w) {
  // [phi, w](x_0,...,x_p) = sum_i (-1)^i [phi(x_i), w(..hat i..)]
  Cochain out = Cochain::zero(w.p + 1, w.hdim, s.g.dim);
  if (out.p > w.hdim) return out;
  for (std::uint32_t mask = 0; mask < (1u << w.hdim); ++mask) {
    if (std::popcount(mask) != static_cast<unsigned>(out.p)) continue;
    const auto idx = mask_indices(mask);
    RealVector value = RealVector::Zero(s.g.dim);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      const RealVector px = phi.phi.col(idx[i]);
      value += sign * s.g.bracket(px, w.at(mask & ~(1u << idx[i])));
    }
    if (value.cwiseAbs().maxCoeff() > 0.0) out.c.emplace(mask, value);
  }
  return out;
}

Cochain lecomte_obstruction(const LieSES& s, const Splitting& phi) {
  s.validate();
  if (phi.section_residual(s) > tol_exact)
    throw std::invalid_argument("lecomte_obstruction: phi is not a section");
  const int h = s.h_dim();
  const LieStructure hq = s.quotient();
  Cochain r = Cochain::zero(2, h, s.g.dim);
  for (int x = 0; x < h; ++x)
    for (int y = x + 1; y < h; ++y) {
      RealVector hxy = RealVector::Zero(h);
      for (int c = 0; c < h; ++c) hxy(c) = hq.f[c](x, y);
      const RealVector value =
          -phi.phi * hxy + s.g.bracket(phi.phi.col(x), phi.phi.col(y));
      r.c.emplace((1u << x) | (1u << y), value);
    }
  return r;
}

double ideal_membership_residual(const LieSES& s, const Cochain& r) {
  double worst = 0.0;
  for (const auto& [mask, v] : r.c)
    for (int c = s.i_dim; c < s.g.dim; ++c)
      worst = std::max(worst, std::abs(v(c)));
  return worst;
}

double bianchi_residual(const LieSES& s, const Splitting& phi) {
  const Cochain r = lecomte_obstruction(s, phi);
  const Cochain dr = chevalley_d(s.quotient(), r);
  const Cochain br = phi_bracket(s, phi, r);
  double worst = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << r.hdim); ++mask) {
    if (std::popcount(mask) != 3u) continue;
    const RealVector v = dr.at(mask) + br.at(mask);
    if (v.size() > 0 && v.cwiseAbs().maxCoeff() > worst)
      worst = v.cwiseAbs().maxCoeff();
  }
  return worst;
}

Cochain characteristic_form(const SequencePolynomial& P, const LieSES& s,
                            const Splitting& phi) {
  const int h = s.h_dim();
  const int degree = 2 * P.q;
  Cochain out = Cochain::zero(degree, h, 1);
  if (degree > h) return out;  // zero form past the top degree
  const Cochain r = lecomte_obstruction(s, phi);

  std::vector<int> perm(degree);
  for (std::uint32_t mask = 0; mask < (1u << h); ++mask) {
    if (std::popcount(mask) != static_cast<unsigned>(degree)) continue;
    const auto idx = mask_indices(mask);
    std::iota(perm.begin(), perm.end(), 0);
    double acc = 0.0;
    double nperm = 0.0;
    do {
      // permutation sign by inversion count
      int inv = 0;
      for (int i = 0; i < degree; ++i)
        for (int j = i + 1; j < degree; ++j)
          if (perm[i] > perm[j]) ++inv;
      const double sign = inv % 2 == 0 ? 1.0 : -1.0;
      std::vector<RealVector> args;
      args.reserve(P.q);
      double pair_sign = 1.0;
      for (int k = 0; k < P.q; ++k) {
        int a = idx[perm[2 * k]], b = idx[perm[2 * k + 1]];
        double local = 1.0;
        if (a > b) {
          std::swap(a, b);
          local = -1.0;
        }
        pair_sign *= local;
        args.push_back(r.at((1u << a) | (1u << b)).head(s.i_dim));
      }
      acc += sign * pair_sign * P.eval(args);
      nperm += 1.0;
    } while (std::next_permutation(perm.begin(), perm.end()));
    RealVector v(1);
    v(0) = acc / nperm;
    if (std::abs(v(0)) > 0.0) out.c.emplace(mask, v);
  }
  return out;
}

double exactness_residual(const LieStructure& h, const Cochain& target) {
  const int p = target.p;
  if (p == 0) return target.norm();
  // assemble d : Lambda^{p-1} -> Lambda^p over masks
  std::vector<std::uint32_t> dom, cod;
  for (std::uint32_t mask = 0; mask < (1u << h.dim); ++mask) {
    const int pc = std::popcount(mask);
    if (pc == p - 1) dom.push_back(mask);
    if (pc == p) cod.push_back(mask);
  }
  RealMatrix D = RealMatrix::Zero(cod.size(), dom.size());
  for (std::size_t col = 0; col < dom.size(); ++col) {
    Cochain basis = Cochain::zero(p - 1, h.dim, 1);
    RealVector one(1);
    one(0) = 1.0;
    basis.c.emplace(dom[col], one);
    const Cochain db = chevalley_d(h, basis);
    for (std::size_t row = 0; row < cod.size(); ++row)
      D(row, col) = db.at(cod[row])(0);
  }
  RealVector rhs = RealVector::Zero(cod.size());
  for (std::size_t row = 0; row < cod.size(); ++row) rhs(row) = target.at(cod[row])(0);
  if (dom.empty()) return rhs.size() ? rhs.cwiseAbs().maxCoeff() : 0.0;
  const RealVector beta =
      D.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
  return (D * beta - rhs).cwiseAbs().maxCoeff();
}

LieSES direct_sum_sequence() {
  LieSES s;
  s.i_dim = 3;
  s.g.dim = 5;
  s.g.f.assign(5, RealMatrix::Zero(5, 5));
  // su(2)-type ideal: [x_a, x_b] = eps_abc x_c on the first three slots
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        const int eps = (a - b) * (b - c) * (c - a) / 2;  // Levi-Civita on 0..2
        if (eps != 0) s.g.f[c](a, b) = eps;
      }
  return s;
}

LieSES heisenberg_sequence() {
  LieSES s;
  s.i_dim = 1;
  s.g.dim = 3;
  s.g.f.assign(3, RealMatrix::Zero(3, 3));
  // basis (Z, X, Y) with [X, Y] = Z
  s.g.f[0](1, 2) = 1.0;
  s.g.f[0](2, 1) = -1.0;
  return s;
}

std::pair<LieSES, SequencePolynomial> solvable_sequence(std::uint64_t seed,
                                                        int h_dim) {
  if (h_dim < 1 || h_dim > 3)
    throw std::invalid_argument("solvable_sequence: h_dim in 1..3");
  Rng rng(seed);
  // strictly upper-triangular N1 and polynomials in it commute
  RealMatrix n1 = RealMatrix::Zero(3, 3);
  n1(0, 1) = rng.real(0.5, 1.5);
  n1(0, 2) = rng.real(-1.0, 1.0);
  n1(1, 2) = rng.real(0.5, 1.5);
  std::vector<RealMatrix> act{n1};
  for (int r = 1; r < h_dim; ++r)
    act.push_back(rng.real(0.5, 1.5) * n1 + rng.real(-1.0, 1.0) * n1 * n1);

  LieSES s;
  s.i_dim = 3;
  s.g.dim = 3 + h_dim;
  s.g.f.assign(s.g.dim, RealMatrix::Zero(s.g.dim, s.g.dim));
  for (int r = 0; r < h_dim; ++r)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        s.g.f[b](3 + r, a) = act[r](b, a);
        s.g.f[b](a, 3 + r) = -act[r](b, a);
      }

  // adapted polynomial: a left null vector of every action
  Matrix stacked(3 * h_dim, 3);
  for (int r = 0; r < h_dim; ++r)
    stacked.middleRows(3 * r, 3) = act[r].transpose().cast<Complex>();
  const Matrix ns = null_space(stacked);
  if (ns.cols() == 0)
    throw std::runtime_error("solvable_sequence: no invariant functional");
  RealVector pvec = ns.col(0).real();
  pvec /= pvec.norm();
  SequencePolynomial P;
  P.q = 1;
  P.eval = [pvec](const std::vector<RealVector>& args) {
    return pvec.dot(args.at(0));
  };
  return {s, P};
}

SequencePolynomial coordinate_polynomial(int index) {
  SequencePolynomial P;
  P.q = 1;
  P.eval = [index](const std::vector<RealVector>& args) {
    return args.at(0)(index);
  };
  return P;
}

std::vector<RealVector> invariant_functionals(const LieSES& s, double rel_tol) {
  // rows: p(ad_{e_a} e_v) = 0 for every generator a of g and v of i
  Matrix system(s.g.dim * s.i_dim, s.i_dim);
  for (int a = 0; a < s.g.dim; ++a)
    for (int v = 0; v < s.i_dim; ++v)
      for (int c = 0; c < s.i_dim; ++c)
        system(a * s.i_dim + v, c) = s.g.f[c](a, v);
  const Matrix ns = null_space(system, rel_tol);
  std::vector<RealVector> out;
  for (Eigen::Index c = 0; c < ns.cols(); ++c) {
    RealVector p = ns.col(c).real();
    if (p.norm() > 0) p /= p.norm();
    out.push_back(p);
  }
  return out;
}

SequencePolynomial functional_polynomial(const RealVector& p) {
  SequencePolynomial P;
  P.q = 1;
  P.eval = [p](const std::vector<RealVector>& args) { return p.dot(args.at(0)); };
  return P;
}

Complex InvariantPolynomial::operator()(const std::vector<Matrix>& args) const {
  if (static_cast<int>(args.size()) != q)
    throw std::invalid_argument("InvariantPolynomial: wrong argument count");
  std::vector<int> perm(q);
  std::iota(perm.begin(), perm.end(), 0);
  Complex acc = 0.0;
  double nperm = 0.0;
  do {
    Matrix prod = args[perm[0]];
    for (int k = 1; k < q; ++k) prod = prod * args[perm[k]];
    acc += prod.trace();
    nperm += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc / nperm;
}

InvariantPolynomial symmetrized_trace(int q, int n) {
  if (q < 1) throw std::invalid_argument("symmetrized_trace: q must be positive");
  return {q, n};
}

double chern_density(const std::vector<Matrix>& f_pairs, int base_dim, int q) {
  if (q != 1 && q != 2)
    throw std::invalid_argument("chern_density: q = 1, 2 supported");
  if (base_dim != 2 * q)
    throw std::invalid_argument("chern_density: base dimension must be 2q");
  const int npairs = base_dim * (base_dim - 1) / 2;
  if (static_cast<int>(f_pairs.size()) != npairs)
    throw std::invalid_argument("chern_density: wrong number of components");
  for (const auto& f : f_pairs)
    if (!is_antihermitian(f, 1e-8))
      throw std::invalid_argument("chern_density: F must be antihermitean");

  auto f_at = [&](int mu, int nu) -> Matrix {
    if (mu == nu) return Matrix::Zero(f_pairs[0].rows(), f_pairs[0].cols());
    const double sign = mu < nu ? 1.0 : -1.0;
    const int a = std::min(mu, nu), b = std::max(mu, nu);
    return sign * f_pairs[a * base_dim - a * (a + 1) / 2 + (b - a - 1)];
  };

  Complex total = 0.0;
  if (q == 1) {
    total = f_at(0, 1).trace();  // (1/2) sum_{S2} sign Tr F
  } else {
    std::vector<int> perm{0, 1, 2, 3};
    do {
      int inv = 0;
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
          if (perm[i] > perm[j]) ++inv;
      const double sign = inv % 2 == 0 ? 1.0 : -1.0;
      const Matrix x = f_at(perm[0], perm[1]), y = f_at(perm[2], perm[3]);
      total += sign * 0.5 * (x.trace() * y.trace() - (x * y).trace());
    } while (std::next_permutation(perm.begin(), perm.end()));
    total /= 4.0;  // 2^{-q}
  }
  const Complex norm = std::pow(I / (2.0 * M_PI), q);
  const Complex value = norm * total;
  if (std::abs(value.imag()) > 1e-10 * (1.0 + std::abs(value.real())))
    throw std::runtime_error("chern_density: density is not real");
  return value.real();
}

double chern_weil_number(const CurvatureSamples& data, int q) {
  if (data.base_dim != 2 * q)
    throw std::invalid_argument("chern_weil_number: base dimension must be 2q");
  if (data.weight.size() != data.F.size())
    throw std::invalid_argument("chern_weil_number: one weight per sample");
  double total = 0.0;
  for (std::size_t s = 0; s < data.F.size(); ++s)
    total += data.weight[s] * chern_density(data.F[s], data.base_dim, q);
  return total;
}

CurvatureSamples instanton_radial_samples(int M, double R, double rho) {
  // anti-self-dual 't Hooft tensor
  double eta[3][4][4] = {};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        const int eps = (a - b) * (b - c) * (c - a) / 2;
        if (eps != 0) eta[a][b][c] = eps;
      }
    eta[a][a][3] = -1.0;
    eta[a][3][a] = 1.0;
  }
  Matrix sigma[3];
  sigma[0] = Matrix(2, 2);
  sigma[0] << 0, 1, 1, 0;
  sigma[1] = Matrix(2, 2);
  sigma[1] << 0, -I, I, 0;
  sigma[2] = Matrix(2, 2);
  sigma[2] << 1, 0, 0, -1;

  CurvatureSamples out;
  out.n = 2;
  out.base_dim = 4;
  const double dr = R / M;
  for (int i = 0; i < M; ++i) {
    const double r = (i + 0.5) * dr;
    const double profile = -4.0 * rho * rho / std::pow(r * r + rho * rho, 2);
    std::vector<Matrix> f;
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = mu + 1; nu < 4; ++nu) {
        Matrix m = Matrix::Zero(2, 2);
        for (int a = 0; a < 3; ++a)
          m += profile * eta[a][mu][nu] * (sigma[a] / (2.0 * I));
        f.push_back(m);
      }
    out.F.push_back(std::move(f));
    out.weight.push_back(2.0 * M_PI * M_PI * r * r * r * dr);
  }
  return out;
}

double instanton_number_truncated(double R, double rho) {
  auto antider = [rho](double u) {
    return 0.5 * (-0.5 / std::pow(u + rho * rho, 2) +
                  (rho * rho / 3.0) / std::pow(u + rho * rho, 3));
  };
  return 12.0 * std::pow(rho, 4) * (antider(R * R) - antider(0.0));
}

}  // namespace ncgeo
