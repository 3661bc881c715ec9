#pragma once

// The policy decision point. Adjudication is total: every failure mode is
// a Deny with a reason, never an exception. Decision procedure:
//
//   1. no task binding on the request        -> Deny(no_task_bound)
//   2. task id unknown to the registry       -> Deny(task_unknown)
//   3. task Completed                        -> Deny(task_inactive)
//      task Expired                          -> Deny(expired)
//   4. now outside [valid_from, valid_until) -> Deny(expired)
//   5. over rules where rule_matches holds: any Deny wins (first by list
//      order), else the first Allow, else Deny(default_deny).
//
// Only the policy set bound to the request's task is ever consulted.

#include <string>
#include <vector>

#include "sentry/lifecycle.hpp"
#include "sentry/model.hpp"

namespace sentry {

// Per-rule evaluation record for audit and the explain query. Entries
// cover every rule of the consulted policy set, in order; the early deny
// paths (steps 1-4) produce no entries.
struct EvaluationTrace {
  struct Entry {
    std::string rule_id;
    bool matched{false};
    Effect effect{Effect::Deny};

    bool operator==(const Entry&) const = default;
  };

  std::string request_id;
  std::vector<Entry> entries;
  Decision final;

  bool operator==(const EvaluationTrace&) const = default;
};

// Core adjudication against one obtained snapshot (nullptr = unknown task).
Decision evaluate_record(const AccessRequest& request, const TaskRecord* record,
                         Timestamp now);

// Resolves the request's task binding through the registry (one snapshot
// per call) and adjudicates. Pure with respect to the registry.
Decision evaluate(const AccessRequest& request, const TaskRegistry& registry,
                  Timestamp now);

EvaluationTrace explain_record(const AccessRequest& request,
                               const TaskRecord* record, Timestamp now);

EvaluationTrace explain(const AccessRequest& request, const TaskRegistry& registry,
                        Timestamp now);

}  // namespace sentry
