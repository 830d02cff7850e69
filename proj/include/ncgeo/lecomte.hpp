#ifndef NCGEO_LECOMTE_HPP
#define NCGEO_LECOMTE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "ncgeo/types.hpp"

namespace ncgeo {

/// Structure tensor of a finite-dimensional real Lie algebra:
/// [e_a, e_b] = f^c_{ab} e_c.
struct LieStructure {
  int dim = 0;
  std::vector<RealMatrix> f;  // f[c](a, b)

  RealVector bracket(const RealVector& x, const RealVector& y) const;
  double jacobi_residual() const;
};

/// Short exact sequence 0 -> i -> g -> h -> 0; the first i_dim basis
/// vectors of g span the ideal, the rest project to a basis of h.
struct LieSES {
  LieStructure g;
  int i_dim = 0;

  int h_dim() const { return g.dim - i_dim; }
  /// Components of [g, i] outside i (zero for a genuine ideal).
  double ideal_residual() const;
  /// Induced structure tensor on h = g / i.
  LieStructure quotient() const;
  void validate(double tol = tol_exact) const;
};

/// Vector-space section phi : h -> g of the projection.
struct Splitting {
  RealMatrix phi;  // g_dim x h_dim; bottom h_dim rows must be the identity

  static Splitting natural(const LieSES& s);
  /// Natural splitting perturbed by an i-valued map lambda (i_dim x h_dim).
  static Splitting perturbed(const LieSES& s, const RealMatrix& lambda);
  double section_residual(const LieSES& s) const;
};

/// Element of Lambda^p h* (x) R^v, stored over increasing index masks.
struct Cochain {
  int p = 0, hdim = 0, vdim = 0;
  std::map<std::uint32_t, RealVector> c;

  static Cochain zero(int p, int hdim, int vdim) { return {p, hdim, vdim, {}}; }
  RealVector at(std::uint32_t mask) const;
  void add(std::uint32_t mask, const RealVector& v);
  double norm() const;
};

/// Chevalley differential for the trivial representation on the values.
Cochain chevalley_d(const LieStructure& h, const Cochain& w);

/// [phi, w] for a 1-form phi and a p-form w, both g-valued.
Cochain phi_bracket(const LieSES& s, const Splitting& phi, const Cochain& w);

/// The obstruction R_phi(x, y) = -phi([x, y]) + [phi x, phi y], a 2-form
/// with values in g that in fact lands in the ideal i.
Cochain lecomte_obstruction(const LieSES& s, const Splitting& phi);

/// Largest g-component of R outside the ideal (zero up to roundoff).
double ideal_membership_residual(const LieSES& s, const Cochain& r);

/// | d_h R_phi + [phi, R_phi] |.
double bianchi_residual(const LieSES& s, const Splitting& phi);

/// Symmetric q-linear ad-invariant map on i-coordinates, adapted to a
/// sequence (scalar values).
struct SequencePolynomial {
  int q = 1;
  std::function<double(const std::vector<RealVector>&)> eval;
};

/// epsilon . P(R_phi (x) ... (x) R_phi), a closed 2q-form on h.
Cochain characteristic_form(const SequencePolynomial& P, const LieSES& s,
                            const Splitting& phi);

/// Least-squares solve of d beta = target on Lambda^(p-1) h*; returns the
/// residual (solvable differences certify splitting independence).
double exactness_residual(const LieStructure& h, const Cochain& target);

// Built-in test sequences.
LieSES direct_sum_sequence();  // su(2) ideal, abelian 2-dim quotient
LieSES heisenberg_sequence();  // center ideal, [X, Y] = Z
/// Abelian 3-dim ideal acted on by h_dim commuting nilpotent matrices of an
/// abelian quotient. The second return is an adapted degree-1 polynomial.
std::pair<LieSES, SequencePolynomial> solvable_sequence(std::uint64_t seed,
                                                        int h_dim = 2);

/// Degree-1 polynomial picking one i-coordinate.
SequencePolynomial coordinate_polynomial(int index);

/// Basis of the ad-invariant linear functionals on the ideal: p with
/// p([x, v]) = 0 for every x in g and v in i. These are the degree-1
/// polynomials adapted to the sequence (empty for a perfect ideal).
std::vector<RealVector> invariant_functionals(const LieSES& s,
                                              double rel_tol = tol_rank);

/// The adapted degree-1 polynomial built on a functional vector.
SequencePolynomial functional_polynomial(const RealVector& p);

// ---- invariant polynomials on matrices and Chern-Weil numerics --------------

/// Fully symmetrized trace monomial P(a_1,...,a_q) = (1/q!) sum_perm
/// Tr(a_p1 ... a_pq).
struct InvariantPolynomial {
  int q = 1;
  int n = 2;
  Complex operator()(const std::vector<Matrix>& args) const;
};
InvariantPolynomial symmetrized_trace(int q, int n);

/// Curvature samples over a gridded 2q-dimensional base: antihermitean
/// F_{mu nu} per increasing pair, plus a quadrature weight per sample.
struct CurvatureSamples {
  int n = 2;
  int base_dim = 4;
  std::vector<double> weight;
  std::vector<std::vector<Matrix>> F;  // [sample][pair (mu < nu)]
};

/// Chern density c_q(F) at one sample, real by antihermiticity.
double chern_density(const std::vector<Matrix>& f_pairs, int base_dim, int q);

/// Weighted sum of the density over the samples; near an integer for
/// genuine bundle data. Supports q = 1, 2.
double chern_weil_number(const CurvatureSamples& data, int q);

/// Instanton curvature sampled on M midpoint shells of [0, R] with the
/// spherical measure folded into the weights; size parameter rho.
CurvatureSamples instanton_radial_samples(int M, double R, double rho);

/// Exact value of the same truncated integral from the 1-D antiderivative.
double instanton_number_truncated(double R, double rho);

}  // namespace ncgeo

#endif
