#include "ncgeo/connections.hpp"

#include <sstream>

namespace ncgeo {

GaugeElement GaugeElement::unitary(const Matrix& u) {
  const Matrix defect = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
  if (max_abs(defect) > tol_exact)
    throw std::invalid_argument("GaugeElement::unitary: u*u != 1");
  return {static_cast<int>(u.rows()), u, true};
}

GaugeElement GaugeElement::invertible(const Matrix& u) {
  if (std::abs(u.determinant()) < 1e-12)
    throw std::invalid_argument("GaugeElement::invertible: singular matrix");
  return {static_cast<int>(u.rows()), u, false};
}

MatrixForm curvature(const ConnectionForm& conn) {
  const int N = conn.basis->dim();
  MatrixForm f = MatrixForm::zero(conn.basis, 2, conn.r);
  for (int k = 0; k < N; ++k)
    for (int l = k + 1; l < N; ++l) {
      Matrix sum = commutator(conn.A[k], conn.A[l]);
      for (int m = 0; m < N; ++m) sum -= conn.basis->C[m](k, l) * conn.A[m];
      f.add((1u << k) | (1u << l), sum);
    }
  return f.prune();
}

MatrixForm one_form_curvature(const MatrixForm& omega) {
  return differential(omega) + wedge(omega, omega);
}

MatrixForm full_one_form(const ConnectionForm& conn) {
  if (conn.r != conn.basis->n)
    throw std::invalid_argument("full_one_form: defined on the r = n module only");
  MatrixForm w = canonical_theta(conn.basis) * Complex(-1.0);
  for (int k = 0; k < conn.basis->dim(); ++k) w.add(1u << k, conn.A[k]);
  return w;
}

MatrixForm gauge_transform(const MatrixForm& omega, const GaugeElement& g) {
  if (omega.degree != 1)
    throw std::invalid_argument("gauge_transform: expects a 1-form");
  if (std::abs(g.u.determinant()) < 1e-12)
    throw std::invalid_argument("gauge_transform: singular gauge element");
  const Matrix g_inv = g.u.inverse();
  MatrixForm out = MatrixForm::zero(omega.basis, 1, omega.rows);
  const int N = omega.basis->dim();
  for (int k = 0; k < N; ++k) {
    const Matrix wk = omega.at(1u << k);
    // d'g has components [E_k, g] on the basis derivations.
    out.coeff[1u << k] =
        g_inv * wk * g.u + g_inv * commutator(omega.basis->E[k], g.u);
  }
  return out.prune();
}

HermiteanCheck check_hermitean_compat(const ConnectionForm& conn, double tol) {
  double worst = 0.0;
  for (const auto& a : conn.A) worst = std::max(worst, max_abs(a - a.adjoint()));
  return {worst <= tol, worst};
}

std::vector<FlatOrbit> classify_flat(int r, const LieBasisPtr& basis) {
  if (basis->n != 2)
    throw capacity_error("classify_flat: orbit enumeration implemented for n = 2");
  if (r < 1 || r > 6)
    throw capacity_error("classify_flat: r must be in 1..6");
  std::vector<FlatOrbit> orbits;
  for (const auto& partition : integer_partitions(r)) {
    std::vector<LieRep> blocks;
    for (int d : partition) blocks.push_back(sl2_irrep((d - 1) / 2.0, basis));
    const LieRep rep = direct_sum(blocks);
    std::ostringstream label;
    for (std::size_t i = 0; i < partition.size(); ++i)
      label << (i ? "+" : "") << partition[i];
    FlatOrbit orbit{partition, label.str(), ConnectionForm::from_rep(rep)};
    if (curvature(orbit.representative).norm() > tol_exact)
      throw std::runtime_error("classify_flat: representative is not flat");
    orbits.push_back(std::move(orbit));
  }
  // Representatives of distinct partitions must be pairwise inequivalent.
  for (std::size_t i = 0; i < orbits.size(); ++i)
    for (std::size_t j = i + 1; j < orbits.size(); ++j)
      if (reps_equivalent(orbits[i].representative.as_rep(),
                          orbits[j].representative.as_rep())
              .equivalent)
        throw std::runtime_error("classify_flat: orbits collapsed");
  return orbits;
}

bool affine_gauge_check(const MatrixForm& w1, const MatrixForm& w2, double l1,
                        double l2, const GaugeElement& u, double tol) {
  const MatrixForm combo = w1 * Complex(l1) + w2 * Complex(l2);
  const MatrixForm lhs = gauge_transform(combo, u);
  const MatrixForm rhs =
      gauge_transform(w1, u) * Complex(l1) + gauge_transform(w2, u) * Complex(l2);
  return (lhs - rhs).norm() <= tol;
}

}  // namespace ncgeo
