#pragma once

// Append-only audit log, one JSON object per line (NDJSON). Sequence
// numbers start at 1 and are strictly increasing with no gaps within a
// log. A sink write failure latches the log into a failed state; the
// enforcement point treats that as a signal to refuse further
// adjudications rather than proceed unrecorded.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sentry/model.hpp"

namespace sentry {

enum class AuditKind { Action, TaskStart, TaskComplete, TaskExpire, Interpret, Error };

std::string_view to_string(AuditKind kind);
std::optional<AuditKind> parse_audit_kind(std::string_view text);

struct AuditRecord {
  std::uint64_t sequence_number{0};
  Timestamp timestamp{0};
  AuditKind kind{AuditKind::Action};
  std::optional<AccessRequest> request;   // required for kind == Action
  std::optional<Decision> decision;       // required for kind == Action
  std::optional<std::string> task_id;
  std::string detail;
};

std::string encode_audit_record(const AuditRecord& record);
AuditRecord decode_audit_record(const std::string& line);  // throws std::invalid_argument

// Where encoded lines go. append_line returns false on storage failure.
class AuditSink {
 public:
  virtual ~AuditSink() = default;
  virtual bool append_line(const std::string& line) = 0;
};

class FileAuditSink : public AuditSink {
 public:
  explicit FileAuditSink(const std::string& path);

  bool ok() const { return ok_; }
  bool append_line(const std::string& line) override;

 private:
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> file_;
  bool ok_;
};

class MemoryAuditSink : public AuditSink {
 public:
  bool append_line(const std::string& line) override;
  std::vector<std::string> lines() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::string> lines_;
};

class AuditLog {
 public:
  explicit AuditLog(std::shared_ptr<AuditSink> sink);

  // Assigns the sequence number, encodes and appends. Appends are totally
  // ordered across threads. Returns the assigned sequence number.
  std::uint64_t append(AuditRecord record);

  bool failed() const;

 private:
  mutable std::mutex mu_;
  std::shared_ptr<AuditSink> sink_;
  std::uint64_t next_sequence_ = 1;
  bool failed_ = false;
};

}  // namespace sentry
