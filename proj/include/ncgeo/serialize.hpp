#ifndef NCGEO_SERIALIZE_HPP
#define NCGEO_SERIALIZE_HPP

#include <json.hpp>

#include "ncgeo/connections.hpp"
#include "ncgeo/forms.hpp"
#include "ncgeo/lecomte.hpp"
#include "ncgeo/lie_basis.hpp"
#include "ncgeo/reduction.hpp"

namespace ncgeo {

using Json = nlohmann::json;

// Matrices are row-major arrays of [re, im] pairs.
Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json to_json(const RealMatrix& m);
RealMatrix real_matrix_from_json(const Json& j);

Json to_json(const LieBasis& b);

Json to_json(const LieRep& rep);
LieRep rep_from_json(const Json& j);

Json to_json(const MatrixForm& f);  // degree + (indices, matrix) terms
MatrixForm form_from_json(const Json& j, const LieBasisPtr& basis);

Json to_json(const ConnectionForm& conn);
ConnectionForm connection_from_json(const Json& j);

LieSES ses_from_json(const Json& j);

CurvatureSamples curvature_samples_from_json(const Json& j);

ReductionData reduction_from_json(const Json& j);
PointAction point_action_from_json(const Json& j, int kz_hint = 0);

}  // namespace ncgeo

#endif
