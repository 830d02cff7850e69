#ifndef NCGEO_CONNECTIONS_HPP
#define NCGEO_CONNECTIONS_HPP

#include <string>
#include <vector>

#include "ncgeo/forms.hpp"
#include "ncgeo/lie_basis.hpp"

namespace ncgeo {

/// Noncommutative connection on the right module M_{r,n}, stored relative to
/// the canonical flat connection as A = A_k theta^k with A_k in M_r.
struct ConnectionForm {
  LieBasisPtr basis;
  int r = 0;
  std::vector<Matrix> A;  // n^2 - 1 components, r x r

  static ConnectionForm zero(const LieBasisPtr& basis, int r) {
    return {basis, r, std::vector<Matrix>(basis->dim(), Matrix::Zero(r, r))};
  }
  static ConnectionForm from_rep(const LieRep& rep) {
    return {rep.basis, rep.r, rep.A};
  }
  LieRep as_rep() const { return {basis, r, A}; }
};

/// Gauge group element: an invertible r x r matrix acting by left
/// multiplication on the module.
struct GaugeElement {
  int r = 0;
  Matrix u;
  bool unitary_flag = false;

  static GaugeElement unitary(const Matrix& u);
  static GaugeElement invertible(const Matrix& u);
};

/// Curvature F on increasing pairs (k < l): [A_k, A_l] - C^m_{kl} A_m.
/// Vanishes exactly when A is a Lie algebra representation.
MatrixForm curvature(const ConnectionForm& conn);

/// Curvature d'w + w^2 of a full connection 1-form on the module A itself.
MatrixForm one_form_curvature(const MatrixForm& omega);

/// Full connection 1-form omega = -itheta + A of an r = n connection.
MatrixForm full_one_form(const ConnectionForm& conn);

/// Gauge action w -> g^-1 w g + g^-1 d'g on a degree-1 form over M_n.
MatrixForm gauge_transform(const MatrixForm& omega, const GaugeElement& g);

/// Compatibility with the canonical Hermitean structure <m1,m2> = m1* m2:
/// the full connection 1-form must be antihermitean on every real basis
/// derivation, which in the stored components reduces to each A_k being
/// hermitean.
struct HermiteanCheck {
  bool compatible = false;
  double residual = 0.0;  // max_k |A_k - A_k*|
};
HermiteanCheck check_hermitean_compat(const ConnectionForm& conn,
                                      double tol = tol_algebraic);

/// One flat gauge orbit: the partition of r labelling the block
/// decomposition into irreducibles, plus a representative connection.
struct FlatOrbit {
  std::vector<int> partition;
  std::string label;  // e.g. "2+1+1"
  ConnectionForm representative;
};

/// All gauge orbits of flat connections on M_{r,2}: one per integer
/// partition of r, built from direct sums of spin-j blocks. Flatness and
/// pairwise inequivalence are verified on every representative.
std::vector<FlatOrbit> classify_flat(int r, const LieBasisPtr& basis);

/// Whether (l1 w1 + l2 w2)^u equals l1 w1^u + l2 w2^u; true exactly on the
/// affine line l1 + l2 = 1 (and degenerate cases where d'u drops out).
bool affine_gauge_check(const MatrixForm& w1, const MatrixForm& w2, double l1,
                        double l2, const GaugeElement& u,
                        double tol = tol_algebraic);

}  // namespace ncgeo

#endif
