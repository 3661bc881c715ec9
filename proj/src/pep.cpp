#include "sentry/pep.hpp"

#include "sentry/pdp.hpp"
#include "sentry/policy_gen.hpp"

namespace sentry {

namespace {

std::string string_field(const Json& j, const char* field) {
  const auto it = j.find(field);
  if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw std::invalid_argument(std::string("missing field '") + field + "'");
  }
  return it->get<std::string>();
}

}  // namespace

PepService::PepService(TemplateLibrary library, NowFn now,
                       std::shared_ptr<AuditLog> audit, std::uint64_t task_id_seed)
    : library_(std::move(library)),
      now_(std::move(now)),
      audit_(std::move(audit)),
      ids_(task_id_seed) {}

std::string PepService::handle_line(const std::string& line) {
  Json message;
  try {
    message = Json::parse(line);
  } catch (const Json::parse_error&) {
    return error_response(nullptr, "bad_request", "envelope is not valid JSON").dump();
  }
  return handle_message(message).dump();
}

Json PepService::handle_message(const Json& message) {
  Json id = nullptr;
  if (message.is_object()) {
    if (const auto it = message.find("id"); it != message.end() && it->is_string()) {
      id = *it;
    }
  }
  try {
    return dispatch(message, id);
  } catch (const std::invalid_argument& e) {
    return error_response(id, "bad_request", e.what());
  } catch (const std::exception& e) {
    // fail closed: an internal fault is an error response, never an Allow
    return error_response(id, "internal_error", e.what());
  }
}

Json PepService::dispatch(const Json& message, const Json& id) {
  sweep_expired();

  if (!message.is_object()) {
    return error_response(id, "bad_request", "envelope must be a JSON object");
  }
  const auto type_it = message.find("type");
  if (type_it == message.end() || !type_it->is_string()) {
    return error_response(id, "bad_request", "envelope has no type");
  }
  const std::string type = type_it->get<std::string>();

  const bool audit_down = audit_->failed();
  if (audit_down && type != "task.complete") {
    return error_response(id, "internal_error",
                          "audit log unavailable, refusing to adjudicate");
  }

  if (type == "task.start") return handle_task_start(message, id);
  if (type == "action") return handle_action(message, id, false);
  if (type == "query.explain") return handle_action(message, id, true);
  if (type == "task.complete") return handle_task_complete(message, id);
  return error_response(id, "bad_request", "unknown envelope type '" + type + "'");
}

Json PepService::handle_task_start(const Json& message, const Json& id) {
  const std::string agent = string_field(message, "agent");
  if (!is_agent_id(agent)) throw std::invalid_argument("invalid agent id");
  const std::string command = string_field(message, "command");
  const Timestamp now = now_();

  Interpretation interp;
  try {
    interp = interpret(command, library_, now, ids_);
  } catch (const InterpretError& e) {
    const char* code = e.code() == InterpretError::Code::NoTemplateMatch
                           ? "no_template_match"
                           : "missing_parameter";
    return error_response(id, code, e.what());
  }

  PolicySet policy = generate_policy_set(*interp.tmpl, interp.context, now);
  const std::string task_id = interp.context.task_id;
  try {
    registry_.start_task(interp.context, policy);
  } catch (const LifecycleError& e) {
    return error_response(id, "duplicate_task", e.what());
  }

  const std::string policy_text = serialize_policy_set(policy);
  audit_->append({0, now, AuditKind::TaskStart, std::nullopt, std::nullopt,
                  task_id, policy_text});
  return Json{{"type", "task.started"},
              {"id", id},
              {"task_id", task_id},
              {"policy", policy_text}};
}

Json PepService::handle_action(const Json& message, const Json& id,
                               bool explain_query) {
  if (!id.is_string()) throw std::invalid_argument("missing field 'id'");

  AccessRequest request;
  request.request_id = id.get<std::string>();
  request.agent_id = string_field(message, "agent");
  if (!is_agent_id(request.agent_id)) throw std::invalid_argument("invalid agent id");
  if (const auto it = message.find("task_id"); it != message.end() && it->is_string() &&
      !it->get<std::string>().empty()) {
    request.task_id = it->get<std::string>();
  }
  const auto op = parse_operation(string_field(message, "operation"));
  if (!op) throw std::invalid_argument("unknown operation verb");
  request.operation = *op;
  const auto resource_it = message.find("resource");
  if (resource_it == message.end()) {
    throw std::invalid_argument("missing field 'resource'");
  }
  request.resource = resource_from_json(*resource_it);
  const Timestamp now = now_();
  request.timestamp = now;

  if (!explain_query) {
    const Decision decision = evaluate(request, registry_, now);
    audit_->append({0, now, AuditKind::Action, request, decision,
                    request.task_id, ""});
    Json response{{"type", "decision"}, {"id", id}};
    response.update(decision_to_json(decision));
    return response;
  }

  const EvaluationTrace trace = explain(request, registry_, now);
  audit_->append({0, now, AuditKind::Action, request, trace.final,
                  request.task_id, "query.explain"});
  Json response{{"type", "trace"}, {"id", id}};
  response.update(trace_to_json(trace));
  return response;
}

Json PepService::handle_task_complete(const Json& message, const Json& id) {
  const std::string task_id = string_field(message, "task_id");
  const Timestamp now = now_();
  try {
    registry_.complete_task(task_id, now);
  } catch (const LifecycleError& e) {
    const char* code = e.code() == LifecycleError::Code::UnknownTask
                           ? "unknown_task"
                           : "task_already_finished";
    return error_response(id, code, e.what());
  }
  audit_->append({0, now, AuditKind::TaskComplete, std::nullopt, std::nullopt,
                  task_id, "completed"});
  return Json{{"type", "task.completed"}, {"id", id}};
}

std::vector<std::string> PepService::sweep_expired() {
  const Timestamp now = now_();
  std::vector<std::string> expired = registry_.expire_tasks(now);
  for (const auto& task_id : expired) {
    audit_->append({0, now, AuditKind::TaskExpire, std::nullopt, std::nullopt,
                    task_id, "ttl expired"});
  }
  return expired;
}

Json PepService::error_response(const Json& id, const std::string& code,
                                const std::string& detail) {
  audit_->append({0, now_(), AuditKind::Error, std::nullopt, std::nullopt,
                  std::nullopt, code + ": " + detail});
  return Json{{"type", "error"}, {"id", id}, {"code", code}};
}

}  // namespace sentry
