#ifndef NCGEO_LATTICE_HPP
#define NCGEO_LATTICE_HPP

#include <functional>
#include <vector>

#include "ncgeo/lie_basis.hpp"
#include "ncgeo/types.hpp"

namespace ncgeo {

/// Flat periodic torus, N sites per axis, spacing h.
struct Lattice {
  int d = 0;
  int sites_per_axis = 0;
  double spacing = 1.0;

  Lattice() = default;
  Lattice(int d_, int n_, double h_);

  int sites() const { return sites_; }
  double volume() const { return vol_; }
  int shift(int site, int axis, int step) const;  // periodic neighbor

 private:
  int sites_ = 0;
  double vol_ = 0.0;
  std::vector<int> stride_;
};

/// Field content of the trivial endomorphism algebra on the lattice: a
/// gauge field a_mu (antihermitean traceless per site and direction) and a
/// Higgs field b_k (hermitean per site and inner index), plus the mass
/// scale weighting the inner sector.
struct FieldConfig {
  Lattice lattice;
  LieBasisPtr basis;
  double mass = 1.0;
  std::vector<Matrix> a;  // site * d + mu
  std::vector<Matrix> b;  // site * (n^2-1) + k

  static FieldConfig zero(const Lattice& lat, const LieBasisPtr& basis,
                          double mass);
  /// Constant Higgs field b_k(x) = t E_k, zero gauge field.
  static FieldConfig constant_b(const Lattice& lat, const LieBasisPtr& basis,
                                double mass, double t);

  const Matrix& a_at(int site, int mu) const { return a[site * lattice.d + mu]; }
  Matrix& a_at(int site, int mu) { return a[site * lattice.d + mu]; }
  const Matrix& b_at(int site, int k) const { return b[site * basis->dim() + k]; }
  Matrix& b_at(int site, int k) { return b[site * basis->dim() + k]; }

  double field_constraint_residual() const;  // hermiticity/tracelessness drift
};

/// The three curvature blocks of the mixed calculus: outer-outer F, mixed
/// Db, and inner-inner V.
struct CurvatureComponents {
  int d = 0, K = 0;
  std::vector<Matrix> F;   // site * npairs + pair(mu<nu)
  std::vector<Matrix> Db;  // site * (d*K) + mu*K + k
  std::vector<Matrix> V;   // site * kpairs + pair(k<l)

  const Matrix& f_at(int site, int pair) const { return F[site * (d * (d - 1) / 2) + pair]; }
  const Matrix& db_at(int site, int mu, int k) const { return Db[site * (d * K) + mu * K + k]; }
  const Matrix& v_at(int site, int pair) const { return V[site * (K * (K - 1) / 2) + pair]; }
};

/// F_{mu nu} = d_mu a_nu - d_nu a_mu + [a_mu, a_nu] (central differences),
/// Db_{mu k} = d_mu b_k + [a_mu, b_k], V_{kl} = [b_k, b_l] - C^m_{kl} b_m.
CurvatureComponents curvature_components(const FieldConfig& f);

/// Lattice action h^d sum_x Tr{ 1/4 sum F F* + m^2 sum Db Db* +
/// m^4/4 sum V V* } with all index pairs counted in both orders.
double ymh_action(const FieldConfig& f);

/// Analytic gradient with respect to the real coordinates of a (in the
/// i E_k basis) and b (in the E_k, 1 basis). Matches central finite
/// differences of ymh_action.
struct ActionGradient {
  RealVector coords;        // packed, same layout as pack_coordinates
  double norm = 0.0;        // euclidean norm of coords
  FieldConfig direction;    // the gradient assembled back into field shape
};
ActionGradient action_gradient(const FieldConfig& f, bool with_a = true,
                               bool with_b = true);

RealVector pack_coordinates(const FieldConfig& f);
FieldConfig unpack_coordinates(const FieldConfig& like, const RealVector& x);

/// Gradient descent with Armijo backtracking. The trace is monotone
/// nonincreasing in the action.
struct MinimizeOptions {
  int max_steps = 20000;
  double action_tol = 1e-10;
  double gradient_tol = 1e-9;
  double initial_step = 0.25;
  bool optimize_a = true;
  bool optimize_b = true;
};
struct TracePoint {
  int step;
  double action;
  double gradient_norm;
};
struct MinimizeResult {
  FieldConfig config;
  std::vector<TracePoint> trace;
  bool converged = false;
  double final_action = 0.0;
  double final_gradient_norm = 0.0;
  std::string rep_class;        // partition label of the limiting b, or ""
  double rep_residual = 0.0;    // representation defect of the averaged b
};
MinimizeResult minimize(const FieldConfig& f0, const MinimizeOptions& opts = {});

/// Site-averaged Higgs field as a candidate representation.
LieRep average_higgs(const FieldConfig& f);

/// Classify a converged Higgs field against the enumerated flat classes of
/// dimension n; returns the partition label or "" if nothing matches.
std::string classify_higgs(const FieldConfig& f, double tol = 1e-3);

/// a -> u* a u + u* d_mu u (projected back to antihermitean traceless),
/// b -> u* b u, with per-site special unitary u.
FieldConfig gauge_transform_fields(const std::vector<Matrix>& u,
                                   const FieldConfig& f);

/// Number of worker threads: NCGEO_THREADS if set, else hardware count.
int worker_threads();

/// Chunked parallel loop with a fixed chunk layout, so that reductions
/// assembled per chunk are bitwise deterministic for any thread count.
void parallel_chunks(int total, const std::function<void(int, int, int)>& fn);
// fn(chunk_index, begin, end); chunk count is fixed independent of threads.
int chunk_count(int total);

}  // namespace ncgeo

#endif
