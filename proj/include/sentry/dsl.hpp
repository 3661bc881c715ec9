#pragma once

// Line-oriented textual format for task templates and instantiated policy
// sets. The grammar is deliberately small so policy files stay diffable
// and auditable:
//
//   template <name>
//     trigger <regex with named groups>
//     param <name> [= "<literal-default>"]
//     ttl <seconds>
//     <allow|deny> <agent-id|*> <verb[,verb...]> <type|*>( [<attr> = <constraint>, ...] )
//   end
//
//   policyset <task_id>
//   valid <from_ms> <until_ms>
//   <rule lines as above>
//   end
//
// Constraints: "literal" (exact), endswith "suffix" (suffix), * (any).
// Template constraint values may embed {param} placeholders; instantiated
// policy sets must be placeholder-free. '#' starts a comment, blank lines
// are ignored. Rule ids are positional and never serialized: the parser
// assigns <task_id>/r<index> when reading a policy set back.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sentry/model.hpp"
#include "sentry/trigger.hpp"

namespace sentry {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

// Raised when a {param} placeholder survives in an instantiated policy set.
class PlaceholderNotAllowed : public ParseError {
 public:
  using ParseError::ParseError;
};

// A predefined security template a policy set is instantiated from.
struct TaskTemplate {
  struct Param {
    std::string name;
    std::optional<std::string> default_value;  // may reference earlier params

    bool operator==(const Param&) const = default;
  };

  std::string name;
  std::string trigger;  // anchored regex source, matched case-insensitively
  std::vector<Param> params;
  DurationSecs ttl{0};
  std::vector<PolicyRule> rule_templates;  // rule_id empty; values may hold {param}

  CompiledTrigger compiled;  // built at parse time

  bool structurally_equal(const TaskTemplate& other) const;
};

std::vector<TaskTemplate> parse_template_library(std::string_view source);
std::string serialize_template_library(const std::vector<TaskTemplate>& templates);

PolicySet parse_policy_set(std::string_view source);

// Canonical form: rules in list order, constraint attributes sorted by
// name, operations in the fixed verb order, one declaration per line.
// Structurally equal sets serialize to identical bytes.
std::string serialize_policy_set(const PolicySet& set);

// {param} placeholder helpers shared by the interpreter and the policy
// generator. Literal braces are not part of the value syntax.
class UnboundPlaceholder : public std::runtime_error {
 public:
  explicit UnboundPlaceholder(std::string param);
  const std::string& param() const { return param_; }

 private:
  std::string param_;
};

// Returns placeholder names in order of appearance. Throws ParseError on
// malformed braces (unterminated, empty or nested).
std::vector<std::string> scan_placeholders(std::string_view value);

// Replaces every {name} with params.at(name). Throws UnboundPlaceholder
// for a name missing from the map.
std::string expand_placeholders(std::string_view value,
                                const std::map<std::string, std::string>& params);

}  // namespace sentry
