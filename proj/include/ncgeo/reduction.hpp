#ifndef NCGEO_REDUCTION_HPP
#define NCGEO_REDUCTION_HPP

#include <vector>

#include "ncgeo/lecomte.hpp"
#include "ncgeo/types.hpp"

namespace ncgeo {

/// Pointwise data of a symmetric reduction: the isotropy algebra h0 with a
/// matrix realization lambda in M_n (antihermitean), and an auxiliary
/// h0-module with a real action tensor.
struct ReductionData {
  int n = 0;
  LieStructure h0;                     // abstract structure tensor
  std::vector<Matrix> lambda;          // lambda_* images of the h0 basis
  int lm_dim = 0;
  std::vector<RealMatrix> lm_action;   // action of each h0 generator on l+m

  /// Homomorphism defects of lambda and of the module action.
  double lambda_residual() const;
  double action_residual() const;
  void validate(double tol = tol_exact) const;
};

/// Basis of the centralizer W of lambda(h0) in M_n, verified closed under
/// the matrix product and containing the identity.
std::vector<Matrix> centralizer_W(const ReductionData& rd,
                                  double rel_tol = tol_rank);

/// How far a product of W-basis elements leaves the span of W.
double algebra_closure_residual(const std::vector<Matrix>& w_basis, int n);

struct ReductiveSplit {
  std::vector<Matrix> complement;
  double orthogonality = 0.0;   // trace-form pairing with the subalgebra
  double stability = 0.0;       // [sub, complement] outside the complement
};

/// Trace-orthogonal complement of a subalgebra inside an ambient matrix Lie
/// algebra, with [sub, complement] stability verified. Fails when the trace
/// form degenerates on the subalgebra.
ReductiveSplit reductive_complement(const std::vector<Matrix>& ambient,
                                    const std::vector<Matrix>& sub, int n);

/// A linear map l+m -> M_n given by its images on the module basis.
struct InvariantMap {
  std::vector<Matrix> images;
};

/// Basis of F = { f : f([x, v]) = [lambda x, f(v)] }, via the null space of
/// the stacked intertwining blocks.
std::vector<InvariantMap> invariant_maps_F(const ReductionData& rd,
                                           double rel_tol = tol_rank);

/// Pointwise action of k + z0 used by reduced_space_dims: k generators act
/// on the module only, z0 generators through matrices in M_n.
struct PointAction {
  LieStructure kz;                     // abstract structure, k block first
  int k_dim = 0;
  std::vector<RealMatrix> k_on_lm;     // per k generator (may be empty: trivial)
  std::vector<Matrix> z_matrices;      // per z0 generator
};

struct ReducedDims {
  int basic_one_forms = 0;  // basic degree-1 component of W x Lambda(k+z0)*
  int invariant_maps = 0;   // k+z0 invariants inside F
};

/// Dimensions of the reduced connection data over a point: the basic
/// one-form component of W (x) Lambda^*(k+z0)* and the invariants of F.
ReducedDims reduced_space_dims(const ReductionData& rd, const PointAction& act,
                               double rel_tol = tol_rank);

}  // namespace ncgeo

#endif
