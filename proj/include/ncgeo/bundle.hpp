#ifndef NCGEO_BUNDLE_HPP
#define NCGEO_BUNDLE_HPP

#include <functional>
#include <vector>

#include "ncgeo/types.hpp"

namespace ncgeo {

/// Rectangular parameter grid of one chart (1-D arc or 2-D cap).
struct ChartGrid {
  int dims = 0;
  std::vector<int> size;        // samples per axis
  std::vector<double> origin;   // coordinate of sample 0 per axis
  std::vector<double> step;     // spacing per axis
  std::vector<bool> periodic;   // axis wraps

  int samples() const;
  int flatten(const std::vector<int>& c) const;
  std::vector<int> unflatten(int idx) const;
  double coordinate(int idx, int axis) const;
  /// Neighbor along an axis; -1 when it falls off a non-periodic edge.
  int shifted(int idx, int axis, int offset) const;
  /// Whether the 4th-order stencil fits in every axis at this sample.
  bool fd_interior(int idx, int margin = 2) const;
};

/// A point of the two-chart overlap: paired sample indices and the chart
/// transition Jacobian d(xi_2)/d(xi_1) at that point.
struct OverlapSample {
  int idx1 = 0, idx2 = 0;
  RealMatrix jac12;
};

struct ChartedManifold {
  ChartGrid chart1, chart2;
  std::vector<OverlapSample> overlap;

  const ChartGrid& chart(int c) const { return c == 0 ? chart1 : chart2; }
};

/// SU(n) transition data on the overlap: g12 per sample plus its analytic
/// partial derivatives with respect to the chart-1 coordinates.
struct TransitionData {
  std::vector<Matrix> g;                 // per overlap sample
  std::vector<std::vector<Matrix>> dg;   // [axis1][overlap sample]
};

/// Two-chart manifold with SU(2) transition data of the abelian form
/// g12 = V exp(i f sigma_3) V*. The closures expose f, the global angles
/// and the transition over full charts; the closed-form generators below
/// use them to build exactly glued smooth test data.
struct ChartedBundle {
  int n = 2;
  ChartedManifold manifold;
  TransitionData transition;
  Matrix conjugator;  // V

  std::function<Matrix(int chart, int idx)> g_at;
  std::function<Matrix(int chart, int axis, int idx)> dg_at;
  std::function<double(int chart, int idx)> f_at;
  std::function<double(int chart, int axis, int idx)> df_at;
  // Global angle coordinates of a sample and d(global)/d(chart axis).
  std::function<RealVector(int chart, int idx)> global_coords;
  std::function<RealMatrix(int chart, int idx)> global_jacobian;
};

/// Circle covered by two arcs; transition exp(i sigma_3 w t) conjugated by
/// a fixed special unitary. P samples around, B-sample overlap half-width.
ChartedBundle circle_bundle(int P, int B, int winding,
                            std::uint64_t seed = default_seed);

/// 2-sphere covered by two polar caps over an equatorial band. Theta grid
/// of L+B+1 rows per cap (spacing pi/2L), P periodic phi columns;
/// transition exp(i sigma_3 (w phi + amp cos theta)) conjugated by a fixed
/// special unitary.
ChartedBundle sphere_bundle(int L, int B, int P, int winding, double theta_amp,
                            std::uint64_t seed = default_seed);

using ChartField = std::vector<Matrix>;                 // per sample
using ChartOneForm = std::vector<ChartField>;           // [axis][sample]
using ChartScalarField = std::vector<RealVector>;       // [axis](sample)

struct GluedSection {
  ChartField a1, a2;
};

struct GluedVectorField {
  ChartScalarField x1, x2;  // real components per axis
};

/// Derivation: projectable vector field plus per-chart inner parts with the
/// inhomogeneous gluing rule gamma2 = g^-1 gamma1 g + g^-1 (X . g).
struct GluedDerivation {
  GluedVectorField X;
  ChartField gamma1, gamma2;
};

/// Local 1-forms of an ordinary connection, A2 = g^-1 A1 g + g^-1 dg.
struct LocalConnection {
  ChartOneForm A1, A2;
};

/// Unitary (or infinitesimal) gauge data with analytic chart derivatives.
struct GluedGaugeField {
  ChartField v1, v2;
  ChartOneForm dv1, dv2;
};

// ---- residuals of the gluing relations --------------------------------------

double section_residual(const ChartedBundle& b, const GluedSection& s);
double derivation_residual(const ChartedBundle& b, const GluedDerivation& d);
double connection_residual(const ChartedBundle& b, const LocalConnection& c);

// ---- operations --------------------------------------------------------------

/// Projection of a derivation to its vector field on the base.
const GluedVectorField& rho(const GluedDerivation& d);

/// alpha(X + ad_gamma) = A(X) - gamma per chart. Inputs must satisfy their
/// gluing relations (checked to `tol`, gluing_error otherwise); the output
/// then glues homogeneously.
GluedSection alpha_eval(const ChartedBundle& b, const LocalConnection& conn,
                        const GluedDerivation& d, double tol = tol_algebraic);

/// Curvature F(X, Y) = dA(X,Y) + [A(X), A(Y)] per chart, 4th-order finite
/// differences for dA. Only samples with full stencils are meaningful; use
/// the masked comparison helpers below.
GluedSection global_curvature(const ChartedBundle& b, const LocalConnection& conn,
                              const GluedDerivation& d1, const GluedDerivation& d2);

/// A -> u* A u + u* du with analytic derivatives of u.
LocalConnection gauge_transform_alpha(const ChartedBundle& b,
                                      const GluedGaugeField& u,
                                      const LocalConnection& conn);

/// Same, deriving du by 4th-order finite differences from samples of u.
LocalConnection gauge_transform_alpha_fd(const ChartedBundle& b,
                                         const GluedSection& u,
                                         const LocalConnection& conn);

/// Infinitesimal gauge transformation of the connection data: the 1-form
/// d xi + [A, xi] per chart, matching d/dt|_0 of the transform by exp(t xi).
LocalConnection delta_alpha(const ChartedBundle& b, const GluedGaugeField& xi,
                            const LocalConnection& conn);

// ---- generators for test data -------------------------------------------------

/// Random glued connection data; not smooth (pointwise algebra only).
LocalConnection random_connection(const ChartedBundle& b, std::uint64_t seed,
                                  double amp = 0.5);

/// Random projectable vector field, not smooth.
GluedVectorField random_vector_field(const ChartedBundle& b, std::uint64_t seed,
                                     double amp = 1.0);

/// Random glued derivation over a given vector field; real = antihermitean
/// inner parts.
GluedDerivation random_derivation(const ChartedBundle& b,
                                  const GluedVectorField& X, std::uint64_t seed,
                                  bool real = true, double amp = 0.5);

/// The horizontal lift of X through the connection: gamma_i = A_i(X), so
/// that alpha of the lift vanishes.
GluedDerivation lift_derivation(const ChartedBundle& b, const LocalConnection& conn,
                                const GluedVectorField& X);

/// Smooth global objects in closed form, adapted to the abelian-direction
/// transition: exactly glued, analytic derivatives, moderate high-order
/// derivatives (suitable for tight finite-difference tolerances).
GluedVectorField smooth_vector_field(const ChartedBundle& b, std::uint64_t seed,
                                     double amp = 1.0);
LocalConnection smooth_connection(const ChartedBundle& b, std::uint64_t seed,
                                  double amp = 0.1);
/// Infinitesimal gauge xi = psi(x) V (i sigma_3) V*: glued, commuting with
/// its derivatives on both charts.
GluedGaugeField smooth_infinitesimal_gauge(const ChartedBundle& b,
                                           std::uint64_t seed, double amp = 0.1);
/// exp(t xi) with analytic derivatives (commuting-family data only).
GluedGaugeField exponentiate_gauge(const ChartedBundle& b,
                                   const GluedGaugeField& xi, double t);
GluedGaugeField smooth_gauge_section(const ChartedBundle& b, std::uint64_t seed,
                                     double amp = 0.1);

/// Gluing residual of a section restricted to overlap samples where both
/// charts admit the full stencil (where curvature values are valid).
double masked_overlap_residual(const ChartedBundle& b, const GluedSection& s);
/// Max difference over all stencil-valid samples of both charts.
double masked_difference(const ChartedBundle& b, const GluedSection& s,
                         const GluedSection& t);

}  // namespace ncgeo

#endif
