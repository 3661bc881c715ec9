#include "sentry/policy_gen.hpp"

#include <set>

namespace sentry {

PolicySet generate_policy_set(const TaskTemplate& tmpl, const TaskContext& ctx,
                              Timestamp now) {
  if (ctx.intent != tmpl.name) {
    throw GenerateError(GenerateError::Code::IntentMismatch,
                        "context intent '" + ctx.intent +
                            "' does not name template '" + tmpl.name + "'");
  }

  PolicySet set;
  set.task_id = ctx.task_id;
  set.valid_from = now;
  set.valid_until = now + ctx.ttl * 1000;

  for (std::size_t i = 0; i < tmpl.rule_templates.size(); ++i) {
    PolicyRule rule = tmpl.rule_templates[i];
    rule.rule_id = ctx.task_id + "/r" + std::to_string(i);
    for (auto& [attr, constraint] : rule.resource.constraints) {
      if (constraint.kind == AttributeConstraint::Kind::Wildcard) continue;
      try {
        constraint.value = expand_placeholders(constraint.value, ctx.parameters);
      } catch (const UnboundPlaceholder& e) {
        throw GenerateError(GenerateError::Code::UnboundPlaceholder,
                            "rule " + rule.rule_id + " attribute '" + attr +
                                "': parameter '" + e.param() + "' is not bound");
      }
    }
    set.rules.push_back(std::move(rule));
  }
  return set;
}

std::vector<Violation> check_well_formed(const PolicySet& set) {
  std::vector<Violation> out;
  if (set.valid_from >= set.valid_until) {
    out.push_back({Violation::Code::WindowNotOrdered,
                   "valid_from " + std::to_string(set.valid_from) +
                       " is not before valid_until " +
                       std::to_string(set.valid_until)});
  }
  std::set<std::string> ids;
  for (const auto& rule : set.rules) {
    if (!ids.insert(rule.rule_id).second) {
      out.push_back({Violation::Code::DuplicateRuleId,
                     "rule id '" + rule.rule_id + "' appears more than once"});
    }
    if (rule.operations.empty()) {
      out.push_back({Violation::Code::EmptyOperations,
                     "rule '" + rule.rule_id + "' has no operations"});
    }
  }
  return out;
}

}  // namespace sentry
