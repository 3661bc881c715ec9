#pragma once

// Task registry: permissions live exactly as long as the task. Records
// are immutable snapshots replaced on every transition, so a snapshot a
// reader obtained never observes a later mutation. Mutations are
// serialized behind one mutex. Finished records are retained for audit,
// bounded by a FIFO retention cap.

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sentry/model.hpp"

namespace sentry {

enum class TaskStatus { Active, Completed, Expired };

std::string_view to_string(TaskStatus status);

struct TaskRecord {
  TaskContext context;
  PolicySet policy;
  TaskStatus status{TaskStatus::Active};
  std::optional<Timestamp> completed_at;  // present iff status != Active
};

class LifecycleError : public std::runtime_error {
 public:
  enum class Code { DuplicateTask, UnknownTask, AlreadyFinished, TaskMismatch };

  LifecycleError(Code code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Code code() const { return code_; }

 private:
  Code code_;
};

class TaskRegistry {
 public:
  static constexpr std::size_t kDefaultRetentionCap = 10000;

  explicit TaskRegistry(std::size_t retention_cap = kDefaultRetentionCap);

  // Registers the task as Active; immediately visible to evaluation.
  // Throws DuplicateTask / TaskMismatch (policy bound to another task id).
  std::shared_ptr<const TaskRecord> start_task(TaskContext ctx, PolicySet policy);

  // Active -> Completed. Throws UnknownTask / AlreadyFinished.
  std::shared_ptr<const TaskRecord> complete_task(const std::string& task_id,
                                                  Timestamp now);

  // Transitions every Active task whose window has closed (now >=
  // valid_until) to Expired; returns the ids transitioned, in id order.
  std::vector<std::string> expire_tasks(Timestamp now);

  // Point-in-time view; nullptr when the task id is unknown.
  std::shared_ptr<const TaskRecord> snapshot(const std::string& task_id) const;

  std::size_t size() const;

 private:
  void evict_locked();

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const TaskRecord>> records_;
  std::deque<std::string> arrival_order_;
  std::size_t cap_;
};

}  // namespace sentry
