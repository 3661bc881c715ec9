#include "sentry/json_codec.hpp"

#include <stdexcept>

namespace sentry {

namespace {

std::string require_string(const Json& j, const char* field) {
  const auto it = j.find(field);
  if (it == j.end() || !it->is_string()) {
    throw std::invalid_argument(std::string("missing or non-string field '") +
                                field + "'");
  }
  return it->get<std::string>();
}

}  // namespace

Json resource_to_json(const ResourceDescriptor& resource) {
  Json attrs = Json::object();
  for (const auto& [name, value] : resource.attributes) attrs[name] = value;
  return Json{{"type", resource.resource_type}, {"attributes", attrs}};
}

ResourceDescriptor resource_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("resource must be an object");
  ResourceDescriptor resource;
  resource.resource_type = require_string(j, "type");
  if (!is_lower_identifier(resource.resource_type)) {
    throw std::invalid_argument("resource type must be a lowercase identifier");
  }
  if (const auto it = j.find("attributes"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) {
      throw std::invalid_argument("resource attributes must be an object");
    }
    for (const auto& [name, value] : it->items()) {
      if (!is_lower_identifier(name)) {
        throw std::invalid_argument("attribute name '" + name +
                                    "' is not a lowercase identifier");
      }
      if (!value.is_string()) {
        throw std::invalid_argument("attribute '" + name + "' must be a string");
      }
      resource.attributes[name] = value.get<std::string>();
    }
  }
  return resource;
}

Json decision_to_json(const Decision& decision) {
  Json j{{"effect", to_string(decision.effect)},
         {"reason", to_string(decision.reason)}};
  if (decision.matched_rule_id) {
    j["rule_id"] = *decision.matched_rule_id;
  } else {
    j["rule_id"] = nullptr;
  }
  return j;
}

Decision decision_from_json(const Json& j) {
  const auto effect = parse_effect(require_string(j, "effect"));
  const auto reason = parse_reason(require_string(j, "reason"));
  if (!effect || !reason) throw std::invalid_argument("unknown effect or reason");
  Decision decision;
  decision.effect = *effect;
  decision.reason = *reason;
  if (const auto it = j.find("rule_id"); it != j.end() && it->is_string()) {
    decision.matched_rule_id = it->get<std::string>();
  }
  return decision;
}

Json request_to_json(const AccessRequest& request) {
  Json j{{"request_id", request.request_id},
         {"agent", request.agent_id}};
  if (request.task_id) {
    j["task_id"] = *request.task_id;
  } else {
    j["task_id"] = nullptr;
  }
  j["operation"] = to_string(request.operation);
  j["resource"] = resource_to_json(request.resource);
  j["timestamp"] = request.timestamp;
  return j;
}

AccessRequest request_from_json(const Json& j) {
  AccessRequest request;
  request.request_id = require_string(j, "request_id");
  request.agent_id = require_string(j, "agent");
  if (const auto it = j.find("task_id"); it != j.end() && it->is_string()) {
    request.task_id = it->get<std::string>();
  }
  const auto op = parse_operation(require_string(j, "operation"));
  if (!op) throw std::invalid_argument("unknown operation");
  request.operation = *op;
  const auto res = j.find("resource");
  if (res == j.end()) throw std::invalid_argument("missing field 'resource'");
  request.resource = resource_from_json(*res);
  if (const auto it = j.find("timestamp"); it != j.end() && it->is_number()) {
    request.timestamp = it->get<Timestamp>();
  }
  return request;
}

Json trace_to_json(const EvaluationTrace& trace) {
  Json entries = Json::array();
  for (const auto& entry : trace.entries) {
    entries.push_back(Json{{"rule_id", entry.rule_id},
                           {"matched", entry.matched},
                           {"effect", to_string(entry.effect)}});
  }
  return Json{{"entries", entries}, {"final", decision_to_json(trace.final)}};
}

}  // namespace sentry
