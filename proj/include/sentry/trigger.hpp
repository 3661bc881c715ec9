#pragma once

#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace sentry {

// A compiled template trigger. Triggers are written with Python-style
// named groups ((?P<name>...) or (?<name>...)), which std::regex does not
// understand, so compilation rewrites them to plain capture groups and
// records the name of each group index. A leading (?i) is accepted and
// stripped; triggers always match case-insensitively against the whole
// command.
struct CompiledTrigger {
  std::string source;                    // original trigger text
  std::regex pattern;                    // icase, translated
  std::vector<std::string> group_names;  // index i -> name of group i+1 ("" if unnamed)
};

// Throws std::invalid_argument on a malformed named group or a pattern
// std::regex rejects.
CompiledTrigger compile_trigger(std::string_view source);

}  // namespace sentry
