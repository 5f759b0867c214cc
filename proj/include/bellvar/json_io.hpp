#pragma once

// JSON import/export. Complex numbers are [re, im] pairs; matrices are
// row-major arrays of rows. Imported states and decompositions are not
// validated here so that `validate` can report on broken inputs.

#include "json.hpp"

#include "bellvar/optimize.hpp"
#include "bellvar/qstate.hpp"
#include "bellvar/sampler.hpp"

namespace bellvar {

using Json = nlohmann::json;

Json matrix_to_json(const Matrix4c& m);
/// Accepts 4 rows of 4 pairs, or a flat row-major list of 16 pairs.
Matrix4c matrix_from_json(const Json& j);
Json amplitudes_to_json(const Vector4c& v);
Vector4c amplitudes_from_json(const Json& j);

void to_json(Json& j, const QubitPairState& state);
void to_json(Json& j, const Decomposition& d);
void to_json(Json& j, const DecompositionReport& r);
void to_json(Json& j, const Observable& o);
void to_json(Json& j, const MeasurementSettings& s);
void to_json(Json& j, const InequalityReport& r);
void to_json(Json& j, const Eq7Report& r);
void to_json(Json& j, const OptimizerConfig& c);
void to_json(Json& j, const ViolationResult& r);
void to_json(Json& j, const SampleEstimate& e);

/// {"matrix": ...}; a decomposition document is accepted as well.
QubitPairState state_from_json(const Json& j);
/// {"terms": [{"weight", "amplitudes"}], "matrix"?, "label"?}. Without
/// "matrix" the source is the mixture of the terms.
Decomposition decomposition_from_json(const Json& j);
MeasurementSettings settings_from_json(const Json& j);
/// Missing fields keep their defaults.
OptimizerConfig config_from_json(const Json& j);

Json read_json_file(const std::string& path);

} // namespace bellvar
