#include "sentry/audit.hpp"

#include <cstdio>
#include <stdexcept>

#include "sentry/json_codec.hpp"

namespace sentry {

std::string_view to_string(AuditKind kind) {
  switch (kind) {
    case AuditKind::Action: return "action";
    case AuditKind::TaskStart: return "task_start";
    case AuditKind::TaskComplete: return "task_complete";
    case AuditKind::TaskExpire: return "task_expire";
    case AuditKind::Interpret: return "interpret";
    case AuditKind::Error: return "error";
  }
  return "action";
}

std::optional<AuditKind> parse_audit_kind(std::string_view text) {
  static constexpr AuditKind all[] = {
      AuditKind::Action,    AuditKind::TaskStart, AuditKind::TaskComplete,
      AuditKind::TaskExpire, AuditKind::Interpret, AuditKind::Error,
  };
  for (AuditKind k : all) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

std::string encode_audit_record(const AuditRecord& record) {
  Json j{{"sequence_number", record.sequence_number},
         {"timestamp", record.timestamp},
         {"kind", to_string(record.kind)}};
  if (record.task_id) j["task_id"] = *record.task_id;
  if (record.request) j["request"] = request_to_json(*record.request);
  if (record.decision) j["decision"] = decision_to_json(*record.decision);
  j["detail"] = record.detail;
  return j.dump();
}

AuditRecord decode_audit_record(const std::string& line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(std::string("not a JSON record: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("audit record must be an object");

  AuditRecord record;
  const auto seq = j.find("sequence_number");
  if (seq == j.end() || !seq->is_number_unsigned()) {
    throw std::invalid_argument("missing sequence_number");
  }
  record.sequence_number = seq->get<std::uint64_t>();
  const auto ts = j.find("timestamp");
  if (ts == j.end() || !ts->is_number()) {
    throw std::invalid_argument("missing timestamp");
  }
  record.timestamp = ts->get<Timestamp>();
  const auto kind_it = j.find("kind");
  if (kind_it == j.end() || !kind_it->is_string()) {
    throw std::invalid_argument("missing kind");
  }
  const auto kind = parse_audit_kind(kind_it->get<std::string>());
  if (!kind) throw std::invalid_argument("unknown audit kind");
  record.kind = *kind;

  if (const auto it = j.find("task_id"); it != j.end() && it->is_string()) {
    record.task_id = it->get<std::string>();
  }
  if (const auto it = j.find("request"); it != j.end() && it->is_object()) {
    record.request = request_from_json(*it);
  }
  if (const auto it = j.find("decision"); it != j.end() && it->is_object()) {
    record.decision = decision_from_json(*it);
  }
  if (const auto it = j.find("detail"); it != j.end() && it->is_string()) {
    record.detail = it->get<std::string>();
  }
  if (record.kind == AuditKind::Action && (!record.request || !record.decision)) {
    throw std::invalid_argument("action record without request and decision");
  }
  return record;
}

FileAuditSink::FileAuditSink(const std::string& path)
    : file_(std::fopen(path.c_str(), "ab"), &std::fclose), ok_(file_ != nullptr) {}

bool FileAuditSink::append_line(const std::string& line) {
  if (!ok_) return false;
  if (std::fwrite(line.data(), 1, line.size(), file_.get()) != line.size() ||
      std::fputc('\n', file_.get()) == EOF ||
      std::fflush(file_.get()) != 0) {
    ok_ = false;
    return false;
  }
  return true;
}

bool MemoryAuditSink::append_line(const std::string& line) {
  std::lock_guard lock(mu_);
  lines_.push_back(line);
  return true;
}

std::vector<std::string> MemoryAuditSink::lines() const {
  std::lock_guard lock(mu_);
  return lines_;
}

AuditLog::AuditLog(std::shared_ptr<AuditSink> sink) : sink_(std::move(sink)) {}

std::uint64_t AuditLog::append(AuditRecord record) {
  std::lock_guard lock(mu_);
  record.sequence_number = next_sequence_;
  if (!sink_ || !sink_->append_line(encode_audit_record(record))) {
    failed_ = true;
    return 0;
  }
  return next_sequence_++;
}

bool AuditLog::failed() const {
  std::lock_guard lock(mu_);
  return failed_;
}

}  // namespace sentry
