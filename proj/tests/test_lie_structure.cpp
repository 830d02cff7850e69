#include <doctest.h>

#include <cmath>
#include <set>

#include "ncgeo/lie_basis.hpp"

using namespace ncgeo;

namespace {

Matrix pauli(int k) {
  Matrix m(2, 2);
  switch (k) {
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -I, I, 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

double jacobi_residual(const LieBasis& b) {
  const int N = b.dim();
  double worst = 0.0;
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l)
      for (int q = 0; q < N; ++q)
        for (int p = 0; p < N; ++p) {
          Complex sum = 0.0;
          for (int m = 0; m < N; ++m)
            sum += b.C[m](k, l) * b.C[p](m, q) + b.C[m](l, q) * b.C[p](m, k) +
                   b.C[m](q, k) * b.C[p](m, l);
          worst = std::max(worst, std::abs(sum));
        }
  return worst;
}

}  // namespace

TEST_CASE("su(2) basis is the Pauli family with identity metric") {
  auto b = build_su_basis(2);
  REQUIRE(b->dim() == 3);
  for (int k = 0; k < 3; ++k) CHECK(max_abs(b->E[k] - pauli(k + 1)) < 1e-15);
  CHECK((b->g - RealMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(b->sqrt_abs_det_g - 1.0) < 1e-14);
  // [sigma_1, sigma_2] = 2 i sigma_3
  CHECK(std::abs(b->C[2](0, 1) - Complex(0, 2)) < 1e-13);
}

TEST_CASE("basis invariants hold for n = 2, 3, 4") {
  for (int n : {2, 3, 4}) {
    auto b = build_su_basis(n);
    REQUIRE(static_cast<int>(b->E.size()) == n * n - 1);
    for (const auto& e : b->E) {
      CHECK(is_hermitian(e, 1e-14));
      CHECK(std::abs(e.trace()) < 1e-14);
    }
    CHECK(b->closure_residual() <= 1e-12);
    // structure constants are purely imaginary and antisymmetric in (k,l)
    double re_worst = 0.0, anti_worst = 0.0;
    for (int m = 0; m < b->dim(); ++m) {
      re_worst = std::max(re_worst, b->C[m].real().cwiseAbs().maxCoeff());
      anti_worst = std::max(anti_worst,
                            max_abs(b->C[m] + b->C[m].transpose()));
    }
    CHECK(re_worst < 1e-13);
    CHECK(anti_worst < 1e-13);
    // g positive definite
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(b->g);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("Jacobi identity on structure constants") {
  CHECK(jacobi_residual(*build_su_basis(2)) < 1e-10);
  CHECK(jacobi_residual(*build_su_basis(3)) < 1e-10);
}

TEST_CASE("build_su_basis rejects n < 2") {
  CHECK_THROWS_AS(build_su_basis(1), std::invalid_argument);
}

TEST_CASE("sl2 irreps") {
  auto b = build_su_basis(2);
  SUBCASE("j = 0 is the zero representation") {
    auto rep = sl2_irrep(0, b);
    REQUIRE(rep.r == 1);
    for (const auto& a : rep.A) CHECK(max_abs(a) == 0.0);
  }
  SUBCASE("j = 1/2 gives the Pauli matrices") {
    auto rep = sl2_irrep(0.5, b);
    REQUIRE(rep.r == 2);
    for (int k = 0; k < 3; ++k) CHECK(max_abs(rep.A[k] - pauli(k + 1)) < 1e-13);
  }
  SUBCASE("closure residual for j up to 5/2") {
    for (double j : {0.5, 1.0, 1.5, 2.0, 2.5}) {
      auto rep = sl2_irrep(j, b);
      CHECK(rep.r == static_cast<int>(2 * j + 1));
      CHECK(rep.closure_residual() <= 1e-12);
    }
  }
  SUBCASE("invalid j rejected") {
    CHECK_THROWS_AS(sl2_irrep(0.3, b), std::invalid_argument);
    CHECK_THROWS_AS(sl2_irrep(-0.5, b), std::invalid_argument);
  }
}

TEST_CASE("direct sums") {
  auto b = build_su_basis(2);
  SUBCASE("two trivial summands") {
    auto rep = direct_sum({sl2_irrep(0, b), sl2_irrep(0, b)});
    CHECK(rep.r == 2);
    for (const auto& a : rep.A) CHECK(max_abs(a) == 0.0);
  }
  SUBCASE("spin-1/2 plus trivial") {
    auto rep = direct_sum({sl2_irrep(0.5, b), sl2_irrep(0, b)});
    CHECK(rep.r == 3);
    CHECK(rep.closure_residual() <= 1e-12);
  }
  SUBCASE("empty list rejected") {
    CHECK_THROWS_AS(direct_sum({}), std::invalid_argument);
  }
}

TEST_CASE("commutant") {
  SUBCASE("empty constraint set gives all of M_2") {
    CHECK(commutant({}, 2).size() == 4);
  }
  SUBCASE("Pauli matrices have trivial commutant") {
    auto c = commutant({pauli(1), pauli(2), pauli(3)}, 2);
    REQUIRE(c.size() == 1);
    CHECK(max_abs(traceless_part(c[0])) < 1e-10);  // multiple of identity
  }
  SUBCASE("diag(1,-1) commutant is the diagonal algebra") {
    auto c = commutant({pauli(3)}, 2);
    CHECK(c.size() == 2);
    for (const auto& m : c) {
      CHECK(std::abs(m(0, 1)) < 1e-10);
      CHECK(std::abs(m(1, 0)) < 1e-10);
    }
  }
  SUBCASE("dimension invariant under simultaneous conjugation") {
    Rng rng(7);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<Matrix> S{rng.matrix(3, 3), rng.matrix(3, 3)};
      const Matrix p = rng.invertible(3);
      std::vector<Matrix> Sc;
      for (const auto& s : S) Sc.push_back(p.inverse() * s * p);
      CHECK(commutant(S, 3).size() == commutant(Sc, 3).size());
    }
  }
}

TEST_CASE("representation equivalence") {
  auto b = build_su_basis(2);
  const auto half = sl2_irrep(0.5, b);

  SUBCASE("a representation is equivalent to itself") {
    auto res = reps_equivalent(half, half);
    REQUIRE(res.equivalent);
    REQUIRE(res.intertwiner.has_value());
    const Matrix& t = *res.intertwiner;
    for (int k = 0; k < 3; ++k)
      CHECK(max_abs(t * half.A[k] - half.A[k] * t) < 1e-9);
  }
  SUBCASE("conjugated representation is equivalent") {
    Rng rng(11);
    const Matrix p = rng.invertible(2);
    LieRep conj = half;
    for (auto& a : conj.A) a = p.inverse() * a * p;
    CHECK(reps_equivalent(half, conj).equivalent);
  }
  SUBCASE("spin-1/2 vs trivial-plus-trivial are inequivalent") {
    auto zeros = direct_sum({sl2_irrep(0, b), sl2_irrep(0, b)});
    CHECK_FALSE(reps_equivalent(half, zeros).equivalent);
  }
  SUBCASE("dimension mismatch is an immediate false") {
    CHECK_FALSE(reps_equivalent(half, sl2_irrep(1.0, b)).equivalent);
  }
  SUBCASE("equivalence relation on a random sample") {
    Rng rng(13);
    std::vector<LieRep> sample{
        direct_sum({sl2_irrep(0.5, b), sl2_irrep(0, b)}),
        sl2_irrep(1.0, b),
        direct_sum({sl2_irrep(0, b), sl2_irrep(0, b), sl2_irrep(0, b)})};
    // add a conjugate of each
    const std::size_t base = sample.size();
    for (std::size_t i = 0; i < base; ++i) {
      const Matrix p = rng.invertible(3);
      LieRep conj = sample[i];
      for (auto& a : conj.A) a = p.inverse() * a * p;
      sample.push_back(conj);
    }
    for (std::size_t i = 0; i < sample.size(); ++i) {
      CHECK(reps_equivalent(sample[i], sample[i]).equivalent);  // reflexive
      for (std::size_t j = 0; j < sample.size(); ++j) {
        const bool ij = reps_equivalent(sample[i], sample[j]).equivalent;
        const bool ji = reps_equivalent(sample[j], sample[i]).equivalent;
        CHECK(ij == ji);  // symmetric
      }
    }
    // transitivity over the conjugate pairs
    for (std::size_t i = 0; i < base; ++i)
      CHECK(reps_equivalent(sample[i], sample[i + base]).equivalent);
  }
}

TEST_CASE("equivalence classes of direct sums count integer partitions") {
  auto b = build_su_basis(2);
  for (int r = 1; r <= 4; ++r) {
    const auto parts = integer_partitions(r);
    std::vector<LieRep> reps;
    for (const auto& part : parts) {
      std::vector<LieRep> blocks;
      for (int d : part) blocks.push_back(sl2_irrep((d - 1) / 2.0, b));
      reps.push_back(direct_sum(blocks));
    }
    int classes = 0;
    for (std::size_t i = 0; i < reps.size(); ++i) {
      bool seen = false;
      for (std::size_t j = 0; j < i && !seen; ++j)
        seen = reps_equivalent(reps[i], reps[j]).equivalent;
      if (!seen) ++classes;
    }
    CHECK(classes == static_cast<int>(parts.size()));
  }
  CHECK(integer_partitions(1).size() == 1);
  CHECK(integer_partitions(4).size() == 5);
  CHECK(integer_partitions(6).size() == 11);
}
