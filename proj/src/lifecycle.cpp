#include "sentry/lifecycle.hpp"

#include <algorithm>

namespace sentry {

std::string_view to_string(TaskStatus status) {
  switch (status) {
    case TaskStatus::Active: return "active";
    case TaskStatus::Completed: return "completed";
    case TaskStatus::Expired: return "expired";
  }
  return "active";
}

TaskRegistry::TaskRegistry(std::size_t retention_cap) : cap_(retention_cap) {}

std::shared_ptr<const TaskRecord> TaskRegistry::start_task(TaskContext ctx,
                                                           PolicySet policy) {
  if (policy.task_id != ctx.task_id) {
    throw LifecycleError(LifecycleError::Code::TaskMismatch,
                         "policy set is bound to task '" + policy.task_id +
                             "', not '" + ctx.task_id + "'");
  }
  std::lock_guard lock(mu_);
  if (records_.contains(ctx.task_id)) {
    throw LifecycleError(LifecycleError::Code::DuplicateTask,
                         "task '" + ctx.task_id + "' is already registered");
  }
  auto record = std::make_shared<const TaskRecord>(
      TaskRecord{std::move(ctx), std::move(policy), TaskStatus::Active, std::nullopt});
  const std::string& id = record->context.task_id;
  records_.emplace(id, record);
  arrival_order_.push_back(id);
  evict_locked();
  return record;
}

std::shared_ptr<const TaskRecord> TaskRegistry::complete_task(
    const std::string& task_id, Timestamp now) {
  std::lock_guard lock(mu_);
  const auto it = records_.find(task_id);
  if (it == records_.end()) {
    throw LifecycleError(LifecycleError::Code::UnknownTask,
                         "unknown task '" + task_id + "'");
  }
  if (it->second->status != TaskStatus::Active) {
    throw LifecycleError(LifecycleError::Code::AlreadyFinished,
                         "task '" + task_id + "' is already " +
                             std::string(to_string(it->second->status)));
  }
  auto updated = std::make_shared<const TaskRecord>(
      TaskRecord{it->second->context, it->second->policy, TaskStatus::Completed, now});
  it->second = updated;
  return updated;
}

std::vector<std::string> TaskRegistry::expire_tasks(Timestamp now) {
  std::lock_guard lock(mu_);
  std::vector<std::string> expired;
  for (auto& [id, record] : records_) {
    if (record->status != TaskStatus::Active) continue;
    if (now < record->policy.valid_until) continue;
    record = std::make_shared<const TaskRecord>(
        TaskRecord{record->context, record->policy, TaskStatus::Expired, now});
    expired.push_back(id);
  }
  return expired;
}

std::shared_ptr<const TaskRecord> TaskRegistry::snapshot(
    const std::string& task_id) const {
  std::lock_guard lock(mu_);
  const auto it = records_.find(task_id);
  return it == records_.end() ? nullptr : it->second;
}

std::size_t TaskRegistry::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

void TaskRegistry::evict_locked() {
  while (records_.size() > cap_) {
    // FIFO over arrival order, preferring finished records; an Active
    // record is only evicted when nothing finished remains.
    auto victim = arrival_order_.end();
    for (auto it = arrival_order_.begin(); it != arrival_order_.end(); ++it) {
      const auto rec = records_.find(*it);
      if (rec == records_.end()) continue;
      if (rec->second->status != TaskStatus::Active) {
        victim = it;
        break;
      }
      if (victim == arrival_order_.end()) victim = it;
    }
    if (victim == arrival_order_.end()) return;
    records_.erase(*victim);
    arrival_order_.erase(victim);
  }
}

}  // namespace sentry
