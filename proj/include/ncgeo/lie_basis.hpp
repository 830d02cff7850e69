#ifndef NCGEO_LIE_BASIS_HPP
#define NCGEO_LIE_BASIS_HPP

#include <memory>
#include <optional>
#include <vector>

#include "ncgeo/types.hpp"

namespace ncgeo {

/// Hermitean basis E_k of sl_n together with its structure constants
/// [E_k, E_l] = C^m_{kl} E_m and the metric g_{kl} = (1/n) Tr(E_k E_l).
/// This is the ground truth every other component consumes. The basis
/// derivations of M_n are realized as ad_{E_k}, with theta^l the dual
/// basis of 1-forms: theta^l(ad_{E_k}) = delta^l_k.
struct LieBasis {
  int n = 0;
  std::vector<Matrix> E;         // n^2 - 1 hermitean traceless matrices
  std::vector<Matrix> C;         // C[m](k, l) = C^m_{kl}, purely imaginary
  RealMatrix g;                  // (1/n) Tr(E_k E_l), symmetric positive definite
  RealMatrix g_inv;
  double sqrt_abs_det_g = 0.0;

  int dim() const { return n * n - 1; }

  /// C^m_{kl} for all m as a vector.
  Vector structure_vector(int k, int l) const {
    Vector v(dim());
    for (int m = 0; m < dim(); ++m) v(m) = C[m](k, l);
    return v;
  }

  /// Coordinates c with gamma_traceless = sum_k c^k E_k. The trace part of
  /// gamma never contributes since the E_k are traceless.
  Vector coordinates(const Matrix& gamma) const;

  /// max_{k,l} |[E_k,E_l] - C^m_{kl} E_m|
  double closure_residual() const;
};

using LieBasisPtr = std::shared_ptr<const LieBasis>;

/// Generalized Gell-Mann basis of sl_n: symmetric off-diagonal pairs in
/// lexicographic order, then antisymmetric pairs, then the diagonal family.
/// For n = 2 this is exactly (sigma_1, sigma_2, sigma_3).
LieBasisPtr build_su_basis(int n);

/// A family A_k in M_r with the same index structure as a LieBasis; it is a
/// representation of sl_n exactly when [A_k, A_l] = C^m_{kl} A_m.
struct LieRep {
  LieBasisPtr basis;
  int r = 0;
  std::vector<Matrix> A;

  /// max |[A_k,A_l] - C^m_{kl} A_m|; zero (to tolerance) iff representation.
  double closure_residual() const;
};

/// Spin-j matrices scaled so that [A_k, A_l] = C^m_{kl} A_m with the Pauli
/// structure constants (A_k = 2 J_k in the usual angular-momentum basis).
LieRep sl2_irrep(double j, const LieBasisPtr& basis);

LieRep direct_sum(const std::vector<LieRep>& reps);

/// Linearly independent spanning set of {x : [x, s] = 0 for all s in S},
/// computed from the null space of the stacked commutator maps.
std::vector<Matrix> commutant(const std::vector<Matrix>& S, int n,
                              double rel_tol = tol_rank);

struct EquivalenceResult {
  bool equivalent = false;
  std::optional<Matrix> intertwiner;  // invertible T with T A_k = B_k T
};

/// Decides whether two representations lie on the same gauge orbit, i.e.
/// whether an invertible intertwiner exists. A Casimir-spectrum prefilter
/// rules out inequivalent pairs exactly; the search for an invertible
/// element of the intertwiner space is randomized but seeded.
EquivalenceResult reps_equivalent(const LieRep& a, const LieRep& b,
                                  double tol = 1e-9,
                                  std::uint64_t seed = default_seed);

/// Quadratic Casimir sum_{k,l} (g^-1)^{kl} A_k A_l of a representation.
Matrix casimir(const LieRep& rep);

/// Integer partitions of r as weakly decreasing part lists.
std::vector<std::vector<int>> integer_partitions(int r);

}  // namespace ncgeo

#endif
