#include "sentry/trigger.hpp"

#include <cctype>
#include <stdexcept>

namespace sentry {

namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

CompiledTrigger compile_trigger(std::string_view source) {
  std::string_view body = source;
  while (body.substr(0, 4) == "(?i)") body.remove_prefix(4);

  std::string translated;
  translated.reserve(body.size());
  std::vector<std::string> names;
  bool in_class = false;

  for (std::size_t i = 0; i < body.size();) {
    const char c = body[i];
    if (c == '\\') {
      if (i + 1 >= body.size()) {
        throw std::invalid_argument("trigger ends with a dangling backslash");
      }
      translated.append(body.substr(i, 2));
      i += 2;
      continue;
    }
    if (in_class) {
      if (c == ']') in_class = false;
      translated.push_back(c);
      ++i;
      continue;
    }
    if (c == '[') {
      in_class = true;
      translated.push_back(c);
      ++i;
      continue;
    }
    if (c != '(') {
      translated.push_back(c);
      ++i;
      continue;
    }

    // '(' outside a class: capture group, named group or (?...) construct.
    std::size_t name_start = 0;
    if (body.substr(i, 4).substr(0, 3) == "(?P" && i + 3 < body.size() &&
        body[i + 3] == '<') {
      name_start = i + 4;
    } else if (body.substr(i, 3).substr(0, 2) == "(?" && i + 2 < body.size() &&
               body[i + 2] == '<' && i + 3 < body.size() &&
               body[i + 3] != '=' && body[i + 3] != '!') {
      name_start = i + 3;
    }

    if (name_start != 0) {
      std::size_t j = name_start;
      while (j < body.size() && is_name_char(body[j])) ++j;
      if (j == name_start || j >= body.size() || body[j] != '>') {
        throw std::invalid_argument("malformed named group in trigger");
      }
      names.emplace_back(body.substr(name_start, j - name_start));
      translated.push_back('(');
      i = j + 1;
      continue;
    }

    if (i + 1 < body.size() && body[i + 1] == '?') {
      // non-capturing group, lookaround, etc: copy verbatim
      translated.push_back(c);
      ++i;
      continue;
    }

    names.emplace_back();  // unnamed capture group
    translated.push_back('(');
    ++i;
  }

  CompiledTrigger out;
  out.source = std::string(source);
  out.group_names = std::move(names);
  try {
    out.pattern = std::regex(translated, std::regex::ECMAScript | std::regex::icase);
  } catch (const std::regex_error& e) {
    throw std::invalid_argument(std::string("invalid trigger regex: ") + e.what());
  }
  return out;
}

}  // namespace sentry
