#ifndef NCGEO_FORMS_HPP
#define NCGEO_FORMS_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "ncgeo/lie_basis.hpp"
#include "ncgeo/types.hpp"

namespace ncgeo {

/// An inner derivation ad_gamma : a -> [gamma, a] with traceless gamma.
struct InnerDerivation {
  Matrix gamma;

  static InnerDerivation from(const Matrix& g) { return {traceless_part(g)}; }

  /// Coordinates x with gamma = x^k E_k, so theta^l(ad_gamma) = x^l.
  Vector coordinates(const LieBasis& basis) const { return basis.coordinates(gamma); }
};

inline InnerDerivation bracket(const InnerDerivation& x, const InnerDerivation& y) {
  return {commutator(x.gamma, y.gamma)};
}

/// Element of the graded algebra M_r (x) Lambda^* sl_n^*: matrix-valued
/// coefficients over strictly increasing index tuples, stored sparsely as
/// bitmasks over the n^2-1 basis 1-forms theta^k. Coefficients outside
/// increasing tuples are implied by antisymmetry, never stored.
struct MatrixForm {
  LieBasisPtr basis;
  int degree = 0;
  int rows = 0;                           // coefficient size r (r = n for algebra forms)
  std::map<std::uint32_t, Matrix> coeff;  // popcount(mask) == degree

  static MatrixForm zero(const LieBasisPtr& basis, int degree, int rows) {
    return {basis, degree, rows, {}};
  }
  static MatrixForm scalar(const LieBasisPtr& basis, const Matrix& a) {
    MatrixForm f{basis, 0, static_cast<int>(a.rows()), {}};
    f.coeff[0] = a;
    return f;
  }

  const Matrix& at(std::uint32_t mask) const;  // zero matrix if absent
  void add(std::uint32_t mask, const Matrix& m);

  double norm() const;  // max over stored coefficients of max-abs entry
  MatrixForm& prune(double tol = 0.0);

  MatrixForm operator+(const MatrixForm& other) const;
  MatrixForm operator-(const MatrixForm& other) const;
  MatrixForm operator*(Complex scale) const;

  /// Evaluation on derivations: the basis monomial theta^{k_1}..theta^{k_p}
  /// evaluates on (X_1,...,X_p) as det of the coordinate minor.
  Matrix evaluate(const std::vector<InnerDerivation>& args) const;
};

/// Sign of merging two disjoint increasing tuples, and of extracting one
/// index from an increasing tuple; both as (-1)^(inversion count).
int merge_sign(std::uint32_t a, std::uint32_t b);

/// Product of Def "shuffle sum" type: coefficients multiply as matrices,
/// index monomials anticommute. Degrees past n^2-1 give the zero form.
MatrixForm wedge(const MatrixForm& w, const MatrixForm& e);

/// Differential in closed form: d'a = [E_k, a] theta^k on degree zero,
/// d'theta^k = -(1/2) C^k_{lm} theta^l theta^m, extended as a graded
/// derivation. Agrees with the Koszul formula on derivation arguments.
MatrixForm differential(const MatrixForm& w);

/// Independent evaluation of (d'w)(X_1,...,X_{p+1}) by the Koszul formula;
/// never uses the closed-form rules above.
Matrix koszul_differential_eval(const MatrixForm& w,
                                const std::vector<InnerDerivation>& args);

/// The canonical 1-form itheta with itheta(ad_gamma) = gamma - Tr(gamma)/n;
/// in components itheta = E_k theta^k. Satisfies d'(itheta) = (itheta)^2
/// and d'a = [itheta, a] on degree zero.
MatrixForm canonical_theta(const LieBasisPtr& basis);

/// Interior product i_X: degree -1 antiderivation, zero on degree 0.
MatrixForm interior(const InnerDerivation& x, const MatrixForm& w);

/// Lie derivative L_X = i_X d' + d' i_X.
MatrixForm lie_derivative(const InnerDerivation& x, const MatrixForm& w);

/// Noncommutative integration: (1/n) Tr(a) on a top form a sqrt|g|
/// theta^1..theta^{n^2-1}, zero in every other degree. Vanishes on
/// differentials.
Complex nc_integrate(const MatrixForm& w);

/// Dimensions of ker d'/im d' per degree on the full complex
/// M_n (x) Lambda^* sl_n^*, by numeric rank. Requires n <= 3.
std::vector<int> cohomology_dims(const LieBasisPtr& basis,
                                 double rel_tol = 1e-8);

}  // namespace ncgeo

#endif
