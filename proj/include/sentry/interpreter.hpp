#pragma once

// Translates a natural-language user command into a structured TaskContext
// by matching against the template library. Matching is deterministic
// regex-template matching, first match in library order wins; an unmatched
// command yields an error, never a permissive fallback.

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sentry/dsl.hpp"
#include "sentry/model.hpp"

namespace sentry {

struct TemplateLibrary {
  std::vector<TaskTemplate> templates;  // order defines match precedence

  static TemplateLibrary from_source(std::string_view source) {
    return TemplateLibrary{parse_template_library(source)};
  }

  const TaskTemplate* find(std::string_view name) const {
    for (const auto& tpl : templates) {
      if (tpl.name == name) return &tpl;
    }
    return nullptr;
  }
};

class InterpretError : public std::runtime_error {
 public:
  enum class Code { NoTemplateMatch, MissingParameter };

  InterpretError(Code code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Code code() const { return code_; }

 private:
  Code code_;
};

// Process-unique task ids of the form task-<counter>-<suffix>. The suffix
// is derived from (seed, counter), so a fixed seed gives a reproducible
// id stream regardless of thread interleaving.
class TaskIdGenerator {
 public:
  TaskIdGenerator();  // randomly seeded
  explicit TaskIdGenerator(std::uint64_t seed);

  std::string next();

 private:
  std::uint64_t seed_;
  std::atomic<std::uint64_t> counter_{0};
};

struct Interpretation {
  const TaskTemplate* tmpl;  // points into the library
  TaskContext context;
};

// Returns the first template (library order) whose trigger matches the
// whole command case-insensitively. Parameters come from named capture
// groups first, then from literal defaults for unbound parameters;
// defaults may reference earlier parameters via {name}.
Interpretation interpret(std::string_view command, const TemplateLibrary& library,
                         Timestamp now, TaskIdGenerator& ids);

}  // namespace sentry
