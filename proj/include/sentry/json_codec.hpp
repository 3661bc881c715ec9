#pragma once

// nlohmann/json codecs for the domain types that cross the wire or land
// in the audit log. ordered_json keeps field order stable so transcripts
// and logs are byte-reproducible.

#include <string>

#include <json.hpp>

#include "sentry/model.hpp"
#include "sentry/pdp.hpp"

namespace sentry {

using Json = nlohmann::ordered_json;

Json resource_to_json(const ResourceDescriptor& resource);
ResourceDescriptor resource_from_json(const Json& j);  // throws std::invalid_argument

Json decision_to_json(const Decision& decision);
Decision decision_from_json(const Json& j);

Json request_to_json(const AccessRequest& request);
AccessRequest request_from_json(const Json& j);

Json trace_to_json(const EvaluationTrace& trace);

}  // namespace sentry
