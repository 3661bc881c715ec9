#include "sentry/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace sentry {

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ":" +
                         std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

UnboundPlaceholder::UnboundPlaceholder(std::string param)
    : std::runtime_error("unbound placeholder {" + param + "}"),
      param_(std::move(param)) {}

namespace {

bool is_placeholder_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_placeholder_name(std::string_view name) {
  if (name.empty()) return false;
  if (std::isdigit(static_cast<unsigned char>(name[0]))) return false;
  return std::all_of(name.begin(), name.end(), is_placeholder_name_char);
}

// ---------------------------------------------------------------------------
// line tokenizer
// ---------------------------------------------------------------------------

struct Token {
  enum class Kind { Word, String, LParen, RParen, Equals, Comma, Star };
  Kind kind;
  std::string text;
  int col;  // 1-based
};

bool is_word_char(char c) {
  if (std::isspace(static_cast<unsigned char>(c))) return false;
  switch (c) {
    case '(':
    case ')':
    case '=':
    case ',':
    case '"':
    case '#':
    case '*':
      return false;
    default:
      return true;
  }
}

std::vector<Token> tokenize_line(std::string_view line, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#') break;  // comment to end of line
    const int col = static_cast<int>(i) + 1;
    switch (c) {
      case '(': out.push_back({Token::Kind::LParen, "(", col}); ++i; continue;
      case ')': out.push_back({Token::Kind::RParen, ")", col}); ++i; continue;
      case '=': out.push_back({Token::Kind::Equals, "=", col}); ++i; continue;
      case ',': out.push_back({Token::Kind::Comma, ",", col}); ++i; continue;
      case '*': out.push_back({Token::Kind::Star, "*", col}); ++i; continue;
      default: break;
    }
    if (c == '"') {
      std::string value;
      ++i;
      bool closed = false;
      while (i < line.size()) {
        const char d = line[i];
        if (d == '\\') {
          if (i + 1 >= line.size()) {
            throw ParseError(line_no, static_cast<int>(i) + 1,
                             "dangling escape in string");
          }
          const char e = line[i + 1];
          if (e != '"' && e != '\\') {
            throw ParseError(line_no, static_cast<int>(i) + 1,
                             std::string("unsupported escape '\\") + e + "'");
          }
          value.push_back(e);
          i += 2;
          continue;
        }
        if (d == '"') {
          closed = true;
          ++i;
          break;
        }
        value.push_back(d);
        ++i;
      }
      if (!closed) throw ParseError(line_no, col, "unterminated string");
      out.push_back({Token::Kind::String, std::move(value), col});
      continue;
    }
    std::string word;
    while (i < line.size() && is_word_char(line[i])) {
      word.push_back(line[i]);
      ++i;
    }
    out.push_back({Token::Kind::Word, std::move(word), col});
  }
  return out;
}

class TokenCursor {
 public:
  TokenCursor(std::vector<Token> tokens, int line_no)
      : tokens_(std::move(tokens)), line_(line_no) {}

  bool done() const { return pos_ >= tokens_.size(); }
  const Token* peek() const { return done() ? nullptr : &tokens_[pos_]; }

  const Token& take(Token::Kind kind, const std::string& what) {
    const Token* t = peek();
    if (t == nullptr) throw ParseError(line_, end_col(), "expected " + what);
    if (t->kind != kind) {
      throw ParseError(line_, t->col, "expected " + what + ", found '" + t->text + "'");
    }
    ++pos_;
    return *t;
  }

  const Token& take_any(const std::string& what) {
    const Token* t = peek();
    if (t == nullptr) throw ParseError(line_, end_col(), "expected " + what);
    ++pos_;
    return *t;
  }

  void expect_done() {
    if (const Token* t = peek()) {
      throw ParseError(line_, t->col, "unexpected trailing '" + t->text + "'");
    }
  }

  int line() const { return line_; }
  int end_col() const {
    return tokens_.empty() ? 1 : tokens_.back().col + static_cast<int>(tokens_.back().text.size());
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int line_;
};

std::int64_t parse_int_token(const Token& tok, int line_no) {
  std::int64_t value = 0;
  const auto* begin = tok.text.data();
  const auto* end = begin + tok.text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line_no, tok.col, "expected an integer, found '" + tok.text + "'");
  }
  return value;
}

// ---------------------------------------------------------------------------
// rule lines
// ---------------------------------------------------------------------------

void check_value_placeholders(const std::string& value, bool allow_placeholders,
                              int line_no, int col) {
  if (allow_placeholders) {
    try {
      scan_placeholders(value);  // validates brace syntax
    } catch (const ParseError& e) {
      throw ParseError(line_no, col, e.message());
    }
    return;
  }
  if (value.find('{') != std::string::npos ||
      value.find('}') != std::string::npos) {
    throw PlaceholderNotAllowed(line_no, col,
                                "placeholders are not allowed in an instantiated policy set");
  }
}

PolicyRule parse_rule_line(TokenCursor& cur, Effect effect, bool allow_placeholders) {
  PolicyRule rule;
  rule.effect = effect;

  const Token& agent = cur.take_any("an agent id or '*'");
  if (agent.kind == Token::Kind::Star) {
    rule.agent = std::nullopt;
  } else if (agent.kind == Token::Kind::Word && is_agent_id(agent.text)) {
    rule.agent = agent.text;
  } else {
    throw ParseError(cur.line(), agent.col, "expected an agent id or '*'");
  }

  for (;;) {
    const Token& verb = cur.take(Token::Kind::Word, "an operation verb");
    const auto op = parse_operation(verb.text);
    if (!op) {
      throw ParseError(cur.line(), verb.col, "unknown operation verb '" + verb.text + "'");
    }
    rule.operations.insert(*op);
    if (cur.peek() != nullptr && cur.peek()->kind == Token::Kind::Comma) {
      cur.take(Token::Kind::Comma, "','");
      continue;
    }
    break;
  }

  const Token& rtype = cur.take_any("a resource type or '*'");
  if (rtype.kind == Token::Kind::Star) {
    rule.resource.resource_type = std::string(kWildcard);
  } else if (rtype.kind == Token::Kind::Word && is_lower_identifier(rtype.text)) {
    rule.resource.resource_type = rtype.text;
  } else {
    throw ParseError(cur.line(), rtype.col,
                     "expected a lowercase resource type or '*', found '" + rtype.text + "'");
  }

  cur.take(Token::Kind::LParen, "'('");
  if (cur.peek() != nullptr && cur.peek()->kind == Token::Kind::RParen) {
    cur.take(Token::Kind::RParen, "')'");
    cur.expect_done();
    return rule;
  }
  for (;;) {
    const Token& attr = cur.take(Token::Kind::Word, "an attribute name");
    if (!is_lower_identifier(attr.text)) {
      throw ParseError(cur.line(), attr.col,
                       "attribute names are lowercase identifiers, found '" + attr.text + "'");
    }
    if (rule.resource.constraints.contains(attr.text)) {
      throw ParseError(cur.line(), attr.col, "duplicate constraint on '" + attr.text + "'");
    }
    cur.take(Token::Kind::Equals, "'='");

    const Token& val = cur.take_any("a constraint");
    AttributeConstraint constraint;
    if (val.kind == Token::Kind::Star) {
      constraint = AttributeConstraint::wildcard();
    } else if (val.kind == Token::Kind::String) {
      if (val.text.empty()) {
        throw ParseError(cur.line(), val.col, "constraint value must be non-empty");
      }
      check_value_placeholders(val.text, allow_placeholders, cur.line(), val.col);
      constraint = AttributeConstraint::exact(val.text);
    } else if (val.kind == Token::Kind::Word && val.text == "endswith") {
      const Token& suffix = cur.take(Token::Kind::String, "a quoted suffix");
      if (suffix.text.empty()) {
        throw ParseError(cur.line(), suffix.col, "constraint value must be non-empty");
      }
      check_value_placeholders(suffix.text, allow_placeholders, cur.line(), suffix.col);
      constraint = AttributeConstraint::suffix(suffix.text);
    } else {
      throw ParseError(cur.line(), val.col,
                       "expected \"literal\", endswith \"suffix\" or '*'");
    }
    rule.resource.constraints.emplace(attr.text, std::move(constraint));

    const Token& sep = cur.take_any("',' or ')'");
    if (sep.kind == Token::Kind::Comma) continue;
    if (sep.kind == Token::Kind::RParen) break;
    throw ParseError(cur.line(), sep.col, "expected ',' or ')'");
  }
  cur.expect_done();
  return rule;
}

// Splits source into (line_no, text) pairs, keeping original numbering.
std::vector<std::pair<int, std::string>> split_lines(std::string_view source) {
  std::vector<std::pair<int, std::string>> out;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= source.size()) {
    std::size_t nl = source.find('\n', start);
    if (nl == std::string_view::npos) nl = source.size();
    ++line_no;
    out.emplace_back(line_no, std::string(source.substr(start, nl - start)));
    if (nl == source.size()) break;
    start = nl + 1;
  }
  return out;
}

std::string first_word(const std::string& line, std::size_t* rest_pos) {
  std::size_t i = 0;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  std::size_t begin = i;
  while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  if (rest_pos != nullptr) *rest_pos = i;
  return line.substr(begin, i - begin);
}

std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

std::string quote(std::string_view value) {
  std::string out = "\"";
  for (char c : value) {
    if (c == '\\' || c == '"') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_rule_line(const PolicyRule& rule) {
  std::string line(to_string(rule.effect));
  line += ' ';
  line += rule.agent ? *rule.agent : std::string(kWildcard);
  line += ' ';
  bool first = true;
  for (Operation op : kAllOperations) {  // fixed verb order keeps output canonical
    if (!rule.operations.contains(op)) continue;
    if (!first) line += ',';
    line += to_string(op);
    first = false;
  }
  line += ' ';
  line += rule.resource.resource_type;
  line += '(';
  first = true;
  for (const auto& [name, constraint] : rule.resource.constraints) {
    if (!first) line += ", ";
    first = false;
    line += name;
    line += " = ";
    switch (constraint.kind) {
      case AttributeConstraint::Kind::Exact:
        line += quote(constraint.value);
        break;
      case AttributeConstraint::Kind::Suffix:
        line += "endswith ";
        line += quote(constraint.value);
        break;
      case AttributeConstraint::Kind::Wildcard:
        line += '*';
        break;
    }
  }
  line += ')';
  return line;
}

}  // namespace

std::vector<std::string> scan_placeholders(std::string_view value) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < value.size();) {
    const char c = value[i];
    if (c == '}') {
      throw ParseError(0, static_cast<int>(i) + 1, "'}' without a matching '{'");
    }
    if (c != '{') {
      ++i;
      continue;
    }
    const std::size_t close = value.find_first_of("{}", i + 1);
    if (close == std::string_view::npos || value[close] != '}') {
      throw ParseError(0, static_cast<int>(i) + 1, "unterminated '{' placeholder");
    }
    const std::string_view name = value.substr(i + 1, close - i - 1);
    if (!is_placeholder_name(name)) {
      throw ParseError(0, static_cast<int>(i) + 1,
                       "invalid placeholder name '{" + std::string(name) + "}'");
    }
    names.emplace_back(name);
    i = close + 1;
  }
  return names;
}

std::string expand_placeholders(std::string_view value,
                                const std::map<std::string, std::string>& params) {
  std::string out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size();) {
    const char c = value[i];
    if (c != '{') {
      out.push_back(c);
      ++i;
      continue;
    }
    const std::size_t close = value.find('}', i + 1);
    const std::string name(value.substr(i + 1, close - i - 1));
    const auto it = params.find(name);
    if (it == params.end()) throw UnboundPlaceholder(name);
    out += it->second;
    i = close + 1;
  }
  return out;
}

bool TaskTemplate::structurally_equal(const TaskTemplate& other) const {
  return name == other.name && trigger == other.trigger &&
         params == other.params && ttl == other.ttl &&
         rule_templates == other.rule_templates;
}

std::vector<TaskTemplate> parse_template_library(std::string_view source) {
  std::vector<TaskTemplate> templates;
  std::set<std::string> seen_names;

  TaskTemplate current;
  bool in_template = false;
  bool have_trigger = false;
  bool have_ttl = false;
  int template_line = 0;

  auto finish = [&](int line_no) {
    if (!have_trigger) {
      throw ParseError(line_no, 1, "template '" + current.name + "' has no trigger");
    }
    if (!have_ttl) {
      throw ParseError(line_no, 1, "template '" + current.name + "' has no ttl");
    }
    std::set<std::string> declared;
    for (const auto& p : current.params) declared.insert(p.name);
    auto check_declared = [&](const std::string& value) {
      for (const auto& name : scan_placeholders(value)) {
        if (!declared.contains(name)) {
          throw ParseError(line_no, 1,
                           "placeholder {" + name + "} does not name a declared parameter");
        }
      }
    };
    for (const auto& p : current.params) {
      if (p.default_value) check_declared(*p.default_value);
    }
    for (const auto& rule : current.rule_templates) {
      for (const auto& [attr, constraint] : rule.resource.constraints) {
        (void)attr;
        if (constraint.kind != AttributeConstraint::Kind::Wildcard) {
          check_declared(constraint.value);
        }
      }
    }
    templates.push_back(std::move(current));
    current = TaskTemplate{};
    in_template = false;
    have_trigger = false;
    have_ttl = false;
  };

  for (const auto& [line_no, raw] : split_lines(source)) {
    std::size_t rest_pos = 0;
    const std::string head = first_word(raw, &rest_pos);
    if (head.empty() || head[0] == '#') continue;

    if (!in_template) {
      if (head != "template") {
        throw ParseError(line_no, 1, "expected 'template', found '" + head + "'");
      }
      TokenCursor cur(tokenize_line(raw, line_no), line_no);
      cur.take(Token::Kind::Word, "'template'");
      const Token& name = cur.take(Token::Kind::Word, "a template name");
      cur.expect_done();
      if (!seen_names.insert(name.text).second) {
        throw ParseError(line_no, name.col, "duplicate template name '" + name.text + "'");
      }
      current.name = name.text;
      in_template = true;
      template_line = line_no;
      continue;
    }

    if (head == "trigger") {
      // the regex may contain '#', '(' and quotes, so take the raw remainder
      if (have_trigger) {
        throw ParseError(line_no, 1, "template has more than one trigger");
      }
      const std::string expr = trim(std::string_view(raw).substr(rest_pos));
      if (expr.empty()) throw ParseError(line_no, 1, "trigger needs a regex");
      try {
        current.compiled = compile_trigger(expr);
      } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, 1, e.what());
      }
      current.trigger = expr;
      have_trigger = true;
      continue;
    }

    TokenCursor cur(tokenize_line(raw, line_no), line_no);
    if (head == "param") {
      cur.take(Token::Kind::Word, "'param'");
      const Token& name = cur.take(Token::Kind::Word, "a parameter name");
      if (!is_placeholder_name(name.text)) {
        throw ParseError(line_no, name.col, "invalid parameter name '" + name.text + "'");
      }
      for (const auto& p : current.params) {
        if (p.name == name.text) {
          throw ParseError(line_no, name.col, "duplicate parameter '" + name.text + "'");
        }
      }
      TaskTemplate::Param param{name.text, std::nullopt};
      if (!cur.done()) {
        cur.take(Token::Kind::Equals, "'='");
        const Token& def = cur.take(Token::Kind::String, "a quoted default");
        try {
          scan_placeholders(def.text);
        } catch (const ParseError& e) {
          throw ParseError(line_no, def.col, e.message());
        }
        param.default_value = def.text;
        cur.expect_done();
      }
      current.params.push_back(std::move(param));
      continue;
    }
    if (head == "ttl") {
      if (have_ttl) throw ParseError(line_no, 1, "template has more than one ttl");
      cur.take(Token::Kind::Word, "'ttl'");
      const Token& value = cur.take(Token::Kind::Word, "a ttl in seconds");
      const std::int64_t ttl = parse_int_token(value, line_no);
      if (ttl <= 0) throw ParseError(line_no, value.col, "ttl must be positive");
      cur.expect_done();
      current.ttl = ttl;
      have_ttl = true;
      continue;
    }
    if (head == "allow" || head == "deny") {
      cur.take(Token::Kind::Word, "an effect");
      current.rule_templates.push_back(parse_rule_line(
          cur, head == "allow" ? Effect::Allow : Effect::Deny,
          /*allow_placeholders=*/true));
      continue;
    }
    if (head == "end") {
      cur.take(Token::Kind::Word, "'end'");
      cur.expect_done();
      finish(line_no);
      continue;
    }
    throw ParseError(line_no, 1, "unexpected '" + head + "' inside template");
  }

  if (in_template) {
    throw ParseError(template_line, 1,
                     "template '" + current.name + "' is missing 'end'");
  }
  return templates;
}

std::string serialize_template_library(const std::vector<TaskTemplate>& templates) {
  std::string out;
  bool first = true;
  for (const auto& tpl : templates) {
    if (!first) out += '\n';
    first = false;
    out += "template " + tpl.name + '\n';
    out += "  trigger " + tpl.trigger + '\n';
    for (const auto& p : tpl.params) {
      out += "  param " + p.name;
      if (p.default_value) out += " = " + quote(*p.default_value);
      out += '\n';
    }
    out += "  ttl " + std::to_string(tpl.ttl) + '\n';
    for (const auto& rule : tpl.rule_templates) {
      out += "  " + format_rule_line(rule) + '\n';
    }
    out += "end\n";
  }
  return out;
}

PolicySet parse_policy_set(std::string_view source) {
  PolicySet set;
  enum class State { Header, Valid, Rules, Done };
  State state = State::Header;

  for (const auto& [line_no, raw] : split_lines(source)) {
    const std::string head = first_word(raw, nullptr);
    if (head.empty() || head[0] == '#') continue;

    TokenCursor cur(tokenize_line(raw, line_no), line_no);
    switch (state) {
      case State::Header: {
        if (head != "policyset") {
          throw ParseError(line_no, 1, "expected 'policyset', found '" + head + "'");
        }
        cur.take(Token::Kind::Word, "'policyset'");
        const Token& id = cur.take(Token::Kind::Word, "a task id");
        cur.expect_done();
        set.task_id = id.text;
        state = State::Valid;
        break;
      }
      case State::Valid: {
        if (head != "valid") {
          throw ParseError(line_no, 1, "expected 'valid <from_ms> <until_ms>'");
        }
        cur.take(Token::Kind::Word, "'valid'");
        const Token& from = cur.take(Token::Kind::Word, "valid_from");
        const Token& until = cur.take(Token::Kind::Word, "valid_until");
        cur.expect_done();
        set.valid_from = parse_int_token(from, line_no);
        set.valid_until = parse_int_token(until, line_no);
        if (set.valid_from >= set.valid_until) {
          throw ParseError(line_no, from.col, "validity window must be ordered");
        }
        state = State::Rules;
        break;
      }
      case State::Rules: {
        if (head == "end") {
          cur.take(Token::Kind::Word, "'end'");
          cur.expect_done();
          state = State::Done;
          break;
        }
        if (head != "allow" && head != "deny") {
          throw ParseError(line_no, 1, "expected a rule line or 'end'");
        }
        cur.take(Token::Kind::Word, "an effect");
        PolicyRule rule = parse_rule_line(
            cur, head == "allow" ? Effect::Allow : Effect::Deny,
            /*allow_placeholders=*/false);
        rule.rule_id = set.task_id + "/r" + std::to_string(set.rules.size());
        set.rules.push_back(std::move(rule));
        break;
      }
      case State::Done:
        throw ParseError(line_no, 1, "content after 'end'");
    }
  }

  if (state == State::Header) throw ParseError(1, 1, "empty policy set");
  if (state == State::Valid) throw ParseError(1, 1, "policy set has no 'valid' line");
  if (state == State::Rules) throw ParseError(1, 1, "policy set is missing 'end'");
  return set;
}

std::string serialize_policy_set(const PolicySet& set) {
  std::string out = "policyset " + set.task_id + '\n';
  out += "valid " + std::to_string(set.valid_from) + ' ' +
         std::to_string(set.valid_until) + '\n';
  for (const auto& rule : set.rules) {
    out += format_rule_line(rule) + '\n';
  }
  out += "end\n";
  return out;
}

}  // namespace sentry
