#include "sentry/model.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace sentry {

std::string_view to_string(Operation op) {
  switch (op) {
    case Operation::Read: return "read";
    case Operation::Write: return "write";
    case Operation::Send: return "send";
    case Operation::Execute: return "execute";
    case Operation::List: return "list";
    case Operation::Delete: return "delete";
  }
  return "read";
}

std::optional<Operation> parse_operation(std::string_view text) {
  for (Operation op : kAllOperations) {
    if (text == to_string(op)) return op;
  }
  return std::nullopt;
}

std::string_view to_string(Effect effect) {
  return effect == Effect::Allow ? "allow" : "deny";
}

std::optional<Effect> parse_effect(std::string_view text) {
  if (text == "allow") return Effect::Allow;
  if (text == "deny") return Effect::Deny;
  return std::nullopt;
}

std::string_view to_string(Reason reason) {
  switch (reason) {
    case Reason::ExplicitAllow: return "explicit_allow";
    case Reason::ExplicitDeny: return "explicit_deny";
    case Reason::DefaultDeny: return "default_deny";
    case Reason::TaskUnknown: return "task_unknown";
    case Reason::TaskInactive: return "task_inactive";
    case Reason::Expired: return "expired";
    case Reason::NoTaskBound: return "no_task_bound";
  }
  return "default_deny";
}

std::optional<Reason> parse_reason(std::string_view text) {
  static constexpr Reason all[] = {
      Reason::ExplicitAllow, Reason::ExplicitDeny, Reason::DefaultDeny,
      Reason::TaskUnknown,   Reason::TaskInactive, Reason::Expired,
      Reason::NoTaskBound,
  };
  for (Reason r : all) {
    if (text == to_string(r)) return r;
  }
  return std::nullopt;
}

AttributeConstraint AttributeConstraint::exact(std::string v) {
  if (v.empty()) throw std::invalid_argument("Exact constraint needs a value");
  return AttributeConstraint{Kind::Exact, std::move(v)};
}

AttributeConstraint AttributeConstraint::suffix(std::string v) {
  if (v.empty()) throw std::invalid_argument("Suffix constraint needs a value");
  return AttributeConstraint{Kind::Suffix, std::move(v)};
}

AttributeConstraint AttributeConstraint::wildcard() {
  return AttributeConstraint{Kind::Wildcard, ""};
}

namespace {

bool iends_with(std::string_view text, std::string_view tail) {
  if (tail.size() > text.size()) return false;
  const std::string_view got = text.substr(text.size() - tail.size());
  return std::equal(got.begin(), got.end(), tail.begin(), tail.end(),
                    [](unsigned char a, unsigned char b) {
                      return std::tolower(a) == std::tolower(b);
                    });
}

}  // namespace

bool AttributeConstraint::matches(std::string_view attribute_value) const {
  switch (kind) {
    case Kind::Wildcard:
      return true;
    case Kind::Exact:
      return attribute_value == value;
    case Kind::Suffix: {
      std::string_view tail = value;
      if (!tail.empty() && tail.front() == '@') tail.remove_prefix(1);
      return iends_with(attribute_value, tail);
    }
  }
  return false;
}

Decision Decision::allow(std::string rule_id) {
  return Decision{Effect::Allow, Reason::ExplicitAllow, std::move(rule_id)};
}

Decision Decision::explicit_deny(std::string rule_id) {
  return Decision{Effect::Deny, Reason::ExplicitDeny, std::move(rule_id)};
}

Decision Decision::deny(Reason reason) {
  if (reason == Reason::ExplicitAllow || reason == Reason::ExplicitDeny) {
    throw std::invalid_argument("explicit reasons carry a rule id");
  }
  return Decision{Effect::Deny, reason, std::nullopt};
}

bool matches_pattern(const ResourcePattern& pattern,
                     const ResourceDescriptor& descriptor) {
  if (pattern.resource_type != kWildcard &&
      pattern.resource_type != descriptor.resource_type) {
    return false;
  }
  for (const auto& [name, constraint] : pattern.constraints) {
    const auto it = descriptor.attributes.find(name);
    if (it == descriptor.attributes.end()) return false;
    if (!constraint.matches(it->second)) return false;
  }
  return true;
}

bool rule_matches(const PolicyRule& rule, const AccessRequest& request) {
  if (rule.agent && *rule.agent != request.agent_id) return false;
  if (!rule.operations.contains(request.operation)) return false;
  return matches_pattern(rule.resource, request.resource);
}

bool is_lower_identifier(std::string_view text) {
  if (text.empty()) return false;
  if (!(std::islower(static_cast<unsigned char>(text[0])) || text[0] == '_')) {
    return false;
  }
  return std::all_of(text.begin(), text.end(), [](unsigned char c) {
    return std::islower(c) || std::isdigit(c) || c == '_';
  });
}

bool is_agent_id(std::string_view text) {
  if (text.empty()) return false;
  return std::none_of(text.begin(), text.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

}  // namespace sentry
