#pragma once

// Core domain types for task-scoped access control: rules, resources,
// requests and decisions, plus the matching predicates everything else
// builds on. All types are immutable value types once constructed and
// the matching functions are pure, so they are safe to use from any
// number of threads.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sentry {

using Timestamp = std::int64_t;     // milliseconds since epoch (logical clock)
using DurationSecs = std::int64_t;  // whole seconds

// Closed verb vocabulary. Unknown verbs are rejected at parse time; `send`
// is deliberately distinct from `write` so a policy can allow form writes
// while denying email sends.
enum class Operation { Read, Write, Send, Execute, List, Delete };

inline constexpr Operation kAllOperations[] = {
    Operation::Read,  Operation::Write, Operation::Send,
    Operation::Execute, Operation::List, Operation::Delete,
};

std::string_view to_string(Operation op);
std::optional<Operation> parse_operation(std::string_view text);

enum class Effect { Allow, Deny };

std::string_view to_string(Effect effect);
std::optional<Effect> parse_effect(std::string_view text);

// Why a request was allowed or denied. Closed enumeration so audit
// analysis stays mechanical.
enum class Reason {
  ExplicitAllow,
  ExplicitDeny,
  DefaultDeny,
  TaskUnknown,
  TaskInactive,
  Expired,
  NoTaskBound,
};

std::string_view to_string(Reason reason);
std::optional<Reason> parse_reason(std::string_view text);

// One attribute constraint inside a resource pattern.
//
// Suffix comparison is case-insensitive and ignores a single leading '@'
// in the constraint value, so "@x.com" matches any attribute value whose
// tail is "x.com" (e.g. "service@app-x.com"). Exact is byte equality.
struct AttributeConstraint {
  enum class Kind { Exact, Suffix, Wildcard };

  Kind kind{Kind::Wildcard};
  std::string value;  // empty iff Wildcard

  static AttributeConstraint exact(std::string v);
  static AttributeConstraint suffix(std::string v);
  static AttributeConstraint wildcard();

  bool matches(std::string_view attribute_value) const;

  bool operator==(const AttributeConstraint&) const = default;
};

// A concrete resource as observed at request time, e.g.
// email{from: "service@app-x.com"}.
struct ResourceDescriptor {
  std::string resource_type;                     // lowercase identifier
  std::map<std::string, std::string> attributes; // name -> value

  bool operator==(const ResourceDescriptor&) const = default;
};

inline constexpr std::string_view kWildcard = "*";

// A resource pattern inside a policy rule. A wildcard type with zero
// constraints matches every well-formed descriptor. A constraint naming
// an attribute the descriptor does not carry fails the match: missing
// metadata never widens access.
struct ResourcePattern {
  std::string resource_type{kWildcard};  // lowercase identifier or "*"
  std::map<std::string, AttributeConstraint> constraints;

  bool operator==(const ResourcePattern&) const = default;
};

// Structured user intent: what the interpreter derived from one command.
struct TaskContext {
  std::string task_id;
  std::string intent;                             // template name
  std::map<std::string, std::string> parameters;
  Timestamp issued_at{0};
  DurationSecs ttl{0};  // > 0

  bool operator==(const TaskContext&) const = default;
};

struct PolicyRule {
  std::string rule_id;                 // unique within its PolicySet
  std::optional<std::string> agent;    // nullopt matches any agent
  ResourcePattern resource;
  std::set<Operation> operations;      // non-empty
  Effect effect{Effect::Deny};

  bool operator==(const PolicyRule&) const = default;
};

// The temporary rule collection granted for one task, valid only inside
// its half-open window [valid_from, valid_until).
struct PolicySet {
  std::string task_id;
  std::vector<PolicyRule> rules;  // order is evaluation order
  Timestamp valid_from{0};
  Timestamp valid_until{0};

  bool operator==(const PolicySet&) const = default;
};

// One mediated agent action.
struct AccessRequest {
  std::string request_id;
  std::string agent_id;
  std::optional<std::string> task_id;  // absent -> no ambient authority
  Operation operation{Operation::Read};
  ResourceDescriptor resource;
  Timestamp timestamp{0};

  bool operator==(const AccessRequest&) const = default;
};

// The adjudication of one request.
// Invariants: effect == Allow iff reason == ExplicitAllow;
// matched_rule_id present iff reason is ExplicitAllow or ExplicitDeny.
struct Decision {
  Effect effect{Effect::Deny};
  Reason reason{Reason::DefaultDeny};
  std::optional<std::string> matched_rule_id;

  static Decision allow(std::string rule_id);
  static Decision explicit_deny(std::string rule_id);
  static Decision deny(Reason reason);  // non-explicit reasons only

  bool operator==(const Decision&) const = default;
};

// True iff the pattern's type matches the descriptor's type and every
// constraint is satisfied by a present attribute. Total and pure.
bool matches_pattern(const ResourcePattern& pattern,
                     const ResourceDescriptor& descriptor);

// True iff the rule's agent pattern, operation set and resource pattern
// all cover the request. Task binding is the decision point's job.
bool rule_matches(const PolicyRule& rule, const AccessRequest& request);

// Identifier helpers shared by the parser and the wire layer.
bool is_lower_identifier(std::string_view text);   // [a-z_][a-z0-9_]*
bool is_agent_id(std::string_view text);           // non-empty, no whitespace
std::string to_lower(std::string_view text);

}  // namespace sentry
