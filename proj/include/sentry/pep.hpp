#pragma once

// The policy enforcement point: handles one newline-delimited JSON
// envelope at a time, consults the decision point against a fresh
// registry snapshot and appends exactly one audit record per message
// before the response is produced. Errors never turn into an Allow.
//
// Envelopes:
//   -> {"type":"task.start","id":..,"agent":..,"command":..}
//   <- {"type":"task.started","id":..,"task_id":..,"policy":..} | error
//   -> {"type":"action","id":..,"agent":..,"task_id":..,"operation":..,"resource":{..}}
//   <- {"type":"decision","id":..,"effect":..,"reason":..,"rule_id":..}
//   -> {"type":"query.explain", same fields as action}
//   <- {"type":"trace","id":..,"entries":[..],"final":{..}}
//   -> {"type":"task.complete","id":..,"task_id":..}
//   <- {"type":"task.completed","id":..} | error
//   <- {"type":"error","id":..,"code":..}
//
// If the audit log fails, grant and adjudication messages are refused
// (internal_error); task.complete still runs since revocation only ever
// reduces privilege.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sentry/audit.hpp"
#include "sentry/clock.hpp"
#include "sentry/interpreter.hpp"
#include "sentry/json_codec.hpp"
#include "sentry/lifecycle.hpp"

namespace sentry {

class PepService {
 public:
  PepService(TemplateLibrary library, NowFn now, std::shared_ptr<AuditLog> audit,
             std::uint64_t task_id_seed);

  // One request line in, one response line out (no trailing newline).
  std::string handle_line(const std::string& line);

  Json handle_message(const Json& message);

  // Eager expiry sweep; one task_expire audit record per transitioned
  // task. Runs automatically at the start of every message.
  std::vector<std::string> sweep_expired();

  TaskRegistry& registry() { return registry_; }
  const TemplateLibrary& library() const { return library_; }
  AuditLog& audit() { return *audit_; }

 private:
  Json dispatch(const Json& message, const Json& id);
  Json handle_task_start(const Json& message, const Json& id);
  Json handle_action(const Json& message, const Json& id, bool explain_query);
  Json handle_task_complete(const Json& message, const Json& id);
  Json error_response(const Json& id, const std::string& code,
                      const std::string& detail);

  TemplateLibrary library_;
  NowFn now_;
  std::shared_ptr<AuditLog> audit_;
  TaskIdGenerator ids_;
  TaskRegistry registry_;
};

}  // namespace sentry
