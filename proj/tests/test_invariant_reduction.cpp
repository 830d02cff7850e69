#include <doctest.h>

#include <cmath>

#include "ncgeo/lie_basis.hpp"
#include "ncgeo/reduction.hpp"

using namespace ncgeo;

namespace {

LieStructure so3_structure() {
  LieStructure h;
  h.dim = 3;
  h.f.assign(3, RealMatrix::Zero(3, 3));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        const int eps = (a - b) * (b - c) * (c - a) / 2;
        if (eps != 0) h.f[c](a, b) = eps;
      }
  return h;
}

std::vector<Matrix> pauli() {
  Matrix s1(2, 2), s2(2, 2), s3(2, 2);
  s1 << 0, 1, 1, 0;
  s2 << 0, -I, I, 0;
  s3 << 1, 0, 0, -1;
  return {s1, s2, s3};
}

// su(2) fundamental with [L_a, L_b] = eps_abc L_c.
std::vector<Matrix> su2_fundamental() {
  auto s = pauli();
  return {-0.5 * I * s[0], -0.5 * I * s[1], -0.5 * I * s[2]};
}

std::vector<RealMatrix> adjoint_action() {
  const LieStructure h = so3_structure();
  std::vector<RealMatrix> R(3, RealMatrix::Zero(3, 3));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) R[a](c, b) = h.f[c](a, b);
  return R;
}

ReductionData su2_fundamental_adjoint() {
  ReductionData rd;
  rd.n = 2;
  rd.h0 = so3_structure();
  rd.lambda = su2_fundamental();
  rd.lm_dim = 3;
  rd.lm_action = adjoint_action();
  return rd;
}

// Multiplicity count of spin-j irreps from the Casimir spectrum of a real
// representation with eps structure constants.
std::map<int, int> casimir_multiplicities(const std::vector<Matrix>& rho) {
  const int d = static_cast<int>(rho[0].rows());
  Matrix cas = Matrix::Zero(d, d);
  for (const auto& r : rho) cas -= r * r;  // -sum rho_a^2 has spectrum j(j+1)
  Eigen::ComplexEigenSolver<Matrix> es(cas, false);
  std::map<int, int> counts;  // keyed by 2j
  for (Eigen::Index i = 0; i < d; ++i) {
    const double c = es.eigenvalues()(i).real();
    const double j = 0.5 * (std::sqrt(1.0 + 4.0 * c) - 1.0);
    counts[static_cast<int>(std::lround(2.0 * j))]++;
  }
  for (auto& [twoj, cnt] : counts) cnt /= twoj + 1;  // dimension of each block
  return counts;
}

int schur_hom_count(const std::vector<Matrix>& rho_a,
                    const std::vector<Matrix>& rho_b) {
  const auto ma = casimir_multiplicities(rho_a);
  const auto mb = casimir_multiplicities(rho_b);
  int total = 0;
  for (const auto& [twoj, cnt] : ma) {
    auto it = mb.find(twoj);
    if (it != mb.end()) total += cnt * it->second;
  }
  return total;
}

}  // namespace

TEST_CASE("centralizers") {
  SUBCASE("trivial action centralizes everything") {
    ReductionData rd;
    rd.n = 2;
    rd.h0.dim = 0;
    rd.lm_dim = 1;
    CHECK(centralizer_W(rd).size() == 4);
  }
  SUBCASE("su(2) fundamental has a trivial centralizer") {
    const auto w = centralizer_W(su2_fundamental_adjoint());
    REQUIRE(w.size() == 1);
    CHECK(max_abs(traceless_part(w[0])) < 1e-10);
  }
  SUBCASE("2 + 1 block action in M_3 centralizes the two blocks") {
    ReductionData rd;
    rd.n = 3;
    rd.h0 = so3_structure();
    rd.lm_dim = 1;
    rd.lm_action.assign(3, RealMatrix::Zero(1, 1));
    const auto fund = su2_fundamental();
    for (int a = 0; a < 3; ++a) {
      Matrix m = Matrix::Zero(3, 3);
      m.block(0, 0, 2, 2) = fund[a];
      rd.lambda.push_back(m);
    }
    const auto w = centralizer_W(rd);
    CHECK(w.size() == 2);
    CHECK(algebra_closure_residual(w, 3) < 1e-12);
  }
  SUBCASE("invalid lambda rejected") {
    ReductionData rd = su2_fundamental_adjoint();
    rd.lambda[0] *= 2.0;  // breaks the homomorphism property
    CHECK_THROWS_AS(centralizer_W(rd), std::invalid_argument);
  }
}

TEST_CASE("reductive complements") {
  const auto s = pauli();
  std::vector<Matrix> su2{I * s[0], I * s[1], I * s[2]};

  SUBCASE("subalgebra equals ambient: zero complement") {
    const auto split = reductive_complement(su2, su2, 2);
    CHECK(split.complement.empty());
  }
  SUBCASE("su(2) over u(1): the two rotating directions") {
    const auto split = reductive_complement(su2, {su2[2]}, 2);
    REQUIRE(split.complement.size() == 2);
    CHECK(split.orthogonality <= 1e-12);
    CHECK(split.stability <= 1e-12);
  }
  SUBCASE("su(3) over an su(2) block: dimension 5") {
    auto b3 = build_su_basis(3);
    std::vector<Matrix> su3;
    for (const auto& e : b3->E) su3.push_back(I * e);
    std::vector<Matrix> sub;
    const auto fund = su2_fundamental();
    for (int a = 0; a < 3; ++a) {
      Matrix m = Matrix::Zero(3, 3);
      m.block(0, 0, 2, 2) = fund[a];
      sub.push_back(m);
    }
    const auto split = reductive_complement(su3, sub, 3);
    CHECK(split.complement.size() == 5);
    CHECK(split.orthogonality <= 1e-12);
    CHECK(split.stability <= 1e-12);
  }
  SUBCASE("degenerate trace form fails loudly") {
    Matrix nil = Matrix::Zero(2, 2);
    nil(0, 1) = 1.0;
    CHECK_THROWS_AS(reductive_complement(su2, {nil}, 2), std::invalid_argument);
  }
}

TEST_CASE("invariant map spaces") {
  SUBCASE("no isotropy: all linear maps") {
    ReductionData rd;
    rd.n = 2;
    rd.h0.dim = 0;
    rd.lm_dim = 3;
    CHECK(invariant_maps_F(rd).size() == 3u * 4u);
  }
  SUBCASE("adjoint module against the fundamental: Schur count") {
    const ReductionData rd = su2_fundamental_adjoint();
    const auto f = invariant_maps_F(rd);
    // independent oracle: decompose both sides into irreducibles and count
    std::vector<Matrix> ad_on_m2;  // action on M_2 by commutators, as matrices
    for (int a = 0; a < 3; ++a) {
      Matrix m(4, 4);
      const Matrix id = Matrix::Identity(2, 2);
      // vec([L, x]) = (1 kron L - L^T kron 1) vec(x)
      for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i)
          for (int jj = 0; jj < 2; ++jj)
            for (int ii = 0; ii < 2; ++ii) {
              const Complex v = (i == ii ? 0.0 : 0.0);
              (void)v;
              m(j * 2 + i, jj * 2 + ii) =
                  (jj == j ? rd.lambda[a](i, ii) : Complex(0.0)) -
                  (ii == i ? rd.lambda[a](jj, j) : Complex(0.0));
            }
      ad_on_m2.push_back(m);
    }
    std::vector<Matrix> lm_complex;
    for (const auto& r : adjoint_action()) lm_complex.push_back(r.cast<Complex>());
    const int expected = schur_hom_count(lm_complex, ad_on_m2);
    CHECK(static_cast<int>(f.size()) == expected);
    CHECK(expected == 1);  // M_2 = spin0 + spin1, adjoint = spin1
    // the invariant map is v_a -> c sigma_a
    const auto s = pauli();
    const Matrix ratio = f[0].images[0];
    double worst = 0.0;
    for (int a = 0; a < 3; ++a)
      worst = std::max(worst,
                       max_abs(f[0].images[a] - (ratio(0, 1) / s[0](0, 1)) * s[a]));
    CHECK(worst < 1e-9);
  }
  SUBCASE("trivial one-dimensional module: F = W") {
    ReductionData rd = su2_fundamental_adjoint();
    rd.lm_dim = 1;
    rd.lm_action.assign(3, RealMatrix::Zero(1, 1));
    CHECK(invariant_maps_F(rd).size() == 1);
  }
}

TEST_CASE("reduced dimensions over a point") {
  SUBCASE("no residual symmetry: (0, dim F)") {
    const ReductionData rd = su2_fundamental_adjoint();
    PointAction act;
    act.kz.dim = 0;
    const auto dims = reduced_space_dims(rd, act);
    CHECK(dims.basic_one_forms == 0);
    CHECK(dims.invariant_maps == 1);
  }
  SUBCASE("u(1) acting trivially on W: horizontality kills the 1-forms") {
    ReductionData rd = su2_fundamental_adjoint();
    PointAction act;
    act.kz.dim = 1;
    act.kz.f.assign(1, RealMatrix::Zero(1, 1));
    act.k_dim = 0;
    act.z_matrices = {I * Matrix::Identity(2, 2)};  // central, trivial action
    const auto dims = reduced_space_dims(rd, act);
    CHECK(dims.basic_one_forms == 0);
    CHECK(dims.invariant_maps == 1);  // [i1, f(v)] = 0
  }
  SUBCASE("k = so(3) acting through the adjoint module") {
    ReductionData rd = su2_fundamental_adjoint();
    PointAction act;
    act.kz = so3_structure();
    act.k_dim = 3;
    act.k_on_lm = adjoint_action();
    const auto dims = reduced_space_dims(rd, act);
    CHECK(dims.basic_one_forms == 0);
    // the single intertwiner v -> sigma_v is killed: L_k f = -f([k, v]) != 0
    CHECK(dims.invariant_maps == 0);
  }
}

TEST_CASE("dimensions are invariant under a change of h0 basis") {
  Rng rng(307);
  const ReductionData rd = su2_fundamental_adjoint();
  const auto w0 = centralizer_W(rd).size();
  const auto f0 = invariant_maps_F(rd).size();
  for (int trial = 0; trial < 5; ++trial) {
    // random invertible real change of basis S: x'_a = S(b, a) x_b
    RealMatrix S(3, 3);
    do {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) S(i, j) = rng.gaussian();
    } while (std::abs(S.determinant()) < 0.3);
    const RealMatrix Sinv = S.inverse();
    ReductionData rdp = rd;
    for (int a = 0; a < 3; ++a) {
      rdp.lambda[a] = Matrix::Zero(2, 2);
      rdp.lm_action[a] = RealMatrix::Zero(3, 3);
      for (int b = 0; b < 3; ++b) {
        rdp.lambda[a] += S(b, a) * rd.lambda[b];
        rdp.lm_action[a] += S(b, a) * rd.lm_action[b];
      }
    }
    for (int c = 0; c < 3; ++c) {
      rdp.h0.f[c] = RealMatrix::Zero(3, 3);
      for (int e = 0; e < 3; ++e)
        rdp.h0.f[c] += Sinv(c, e) * (S.transpose() * rd.h0.f[e] * S);
    }
    rdp.validate(1e-9);
    CHECK(centralizer_W(rdp).size() == w0);
    CHECK(invariant_maps_F(rdp).size() == f0);
  }
}
