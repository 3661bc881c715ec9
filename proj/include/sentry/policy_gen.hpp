#pragma once

// The policy generation engine: instantiate a template into a concrete,
// TTL-bounded PolicySet for one task. Generation can specialize constraint
// values but never adds rules or verbs, so the output's scope is contained
// by the template's.

#include <stdexcept>
#include <string>
#include <vector>

#include "sentry/dsl.hpp"
#include "sentry/model.hpp"

namespace sentry {

class GenerateError : public std::runtime_error {
 public:
  enum class Code { UnboundPlaceholder, IntentMismatch };

  GenerateError(Code code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Code code() const { return code_; }

 private:
  Code code_;
};

// Rules are copied in template order with every {param} replaced by its
// value from ctx.parameters. rule_id becomes <task_id>/r<index> (0-based),
// the validity window is [now, now + ttl * 1000).
PolicySet generate_policy_set(const TaskTemplate& tmpl, const TaskContext& ctx,
                              Timestamp now);

struct Violation {
  enum class Code { WindowNotOrdered, DuplicateRuleId, EmptyOperations };

  Code code;
  std::string detail;

  bool operator==(const Violation&) const = default;
};

// Empty result iff the PolicySet invariants hold: ordered validity window,
// distinct rule ids, non-empty operation sets. Violations are returned,
// never thrown.
std::vector<Violation> check_well_formed(const PolicySet& set);

}  // namespace sentry
