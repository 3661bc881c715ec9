#include "sentry/pdp.hpp"

namespace sentry {

namespace {

// Steps 1-4 of the decision procedure. Returns false when rule evaluation
// (step 5) still has to run.
bool pre_rule_decision(const AccessRequest& request, const TaskRecord* record,
                       Timestamp now, Decision* out) {
  if (!request.task_id || request.task_id->empty()) {
    *out = Decision::deny(Reason::NoTaskBound);
    return true;
  }
  if (record == nullptr) {
    *out = Decision::deny(Reason::TaskUnknown);
    return true;
  }
  if (record->status == TaskStatus::Completed) {
    *out = Decision::deny(Reason::TaskInactive);
    return true;
  }
  if (record->status == TaskStatus::Expired) {
    *out = Decision::deny(Reason::Expired);
    return true;
  }
  if (now < record->policy.valid_from || now >= record->policy.valid_until) {
    *out = Decision::deny(Reason::Expired);
    return true;
  }
  return false;
}

}  // namespace

Decision evaluate_record(const AccessRequest& request, const TaskRecord* record,
                         Timestamp now) {
  Decision decision;
  if (pre_rule_decision(request, record, now, &decision)) return decision;

  const PolicyRule* first_allow = nullptr;
  for (const auto& rule : record->policy.rules) {
    if (!rule_matches(rule, request)) continue;
    if (rule.effect == Effect::Deny) {
      return Decision::explicit_deny(rule.rule_id);  // deny overrides
    }
    if (first_allow == nullptr) first_allow = &rule;
  }
  if (first_allow != nullptr) return Decision::allow(first_allow->rule_id);
  return Decision::deny(Reason::DefaultDeny);
}

Decision evaluate(const AccessRequest& request, const TaskRegistry& registry,
                  Timestamp now) {
  std::shared_ptr<const TaskRecord> record;
  if (request.task_id && !request.task_id->empty()) {
    record = registry.snapshot(*request.task_id);
  }
  return evaluate_record(request, record.get(), now);
}

EvaluationTrace explain_record(const AccessRequest& request,
                               const TaskRecord* record, Timestamp now) {
  EvaluationTrace trace;
  trace.request_id = request.request_id;

  Decision early;
  if (pre_rule_decision(request, record, now, &early)) {
    trace.final = early;
    return trace;
  }

  // Unlike evaluate_record this walks every rule, so the two paths can be
  // cross-checked against each other.
  const EvaluationTrace::Entry* first_deny = nullptr;
  const EvaluationTrace::Entry* first_allow = nullptr;
  trace.entries.reserve(record->policy.rules.size());
  for (const auto& rule : record->policy.rules) {
    trace.entries.push_back(
        {rule.rule_id, rule_matches(rule, request), rule.effect});
  }
  for (const auto& entry : trace.entries) {
    if (!entry.matched) continue;
    if (entry.effect == Effect::Deny && first_deny == nullptr) first_deny = &entry;
    if (entry.effect == Effect::Allow && first_allow == nullptr) first_allow = &entry;
  }
  if (first_deny != nullptr) {
    trace.final = Decision::explicit_deny(first_deny->rule_id);
  } else if (first_allow != nullptr) {
    trace.final = Decision::allow(first_allow->rule_id);
  } else {
    trace.final = Decision::deny(Reason::DefaultDeny);
  }
  return trace;
}

EvaluationTrace explain(const AccessRequest& request, const TaskRegistry& registry,
                        Timestamp now) {
  std::shared_ptr<const TaskRecord> record;
  if (request.task_id && !request.task_id->empty()) {
    record = registry.snapshot(*request.task_id);
  }
  return explain_record(request, record.get(), now);
}

}  // namespace sentry
