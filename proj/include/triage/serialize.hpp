#pragma once

#include "triage/enrich.hpp"
#include "triage/features.hpp"
#include "triage/forest.hpp"
#include "triage/model.hpp"
#include "triage/probe.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace triage {

// Structured-text forms. Readers throw Error(validation) on documents that do
// not match the schema.

nlohmann::json to_json(const ProbeRecord& r);
ProbeRecord probe_record_from_json(const nlohmann::json& j);

/// Object keyed by feature key; Missing is null.
nlohmann::json to_json(const FeatureVector& v);
FeatureVector feature_vector_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CmsInfo& c);

nlohmann::json to_json(const HyperParams& p);
HyperParams hyper_params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Prediction& p);
Prediction prediction_from_json(const nlohmann::json& j);

/// CSV cell for one feature value: booleans `true`/`false`, numbers in
/// shortest round-trip form, Missing as an empty cell, sets joined by `|`
/// (an empty set is a lone `|`).
std::string to_cell(const FeatureValue& v);
FeatureValue value_from_cell(FeatureId id, std::string_view cell);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace triage
