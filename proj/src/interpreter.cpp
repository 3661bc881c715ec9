#include "sentry/interpreter.hpp"

#include <random>

namespace sentry {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string hex8(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(8, '0');
  for (int i = 7; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace

TaskIdGenerator::TaskIdGenerator() : seed_(std::random_device{}()) {
  seed_ = splitmix64(seed_ ^ (seed_ << 32));
}

TaskIdGenerator::TaskIdGenerator(std::uint64_t seed) : seed_(seed) {}

std::string TaskIdGenerator::next() {
  const std::uint64_t n = counter_.fetch_add(1, std::memory_order_relaxed) + 1;
  return "task-" + std::to_string(n) + "-" + hex8(splitmix64(seed_ ^ n));
}

Interpretation interpret(std::string_view command, const TemplateLibrary& library,
                         Timestamp now, TaskIdGenerator& ids) {
  const std::string text(command);
  for (const auto& tpl : library.templates) {
    std::smatch match;
    if (!std::regex_match(text, match, tpl.compiled.pattern)) continue;

    TaskContext ctx;
    ctx.intent = tpl.name;
    ctx.issued_at = now;
    ctx.ttl = tpl.ttl;

    // named capture groups bind first
    for (std::size_t i = 0; i < tpl.compiled.group_names.size(); ++i) {
      const std::string& name = tpl.compiled.group_names[i];
      if (name.empty()) continue;
      const auto& group = match[i + 1];
      if (group.matched) ctx.parameters[name] = group.str();
    }

    // then literal defaults, in declaration order
    for (const auto& param : tpl.params) {
      if (ctx.parameters.contains(param.name)) continue;
      if (!param.default_value) {
        throw InterpretError(InterpretError::Code::MissingParameter,
                             "parameter '" + param.name + "' of template '" +
                                 tpl.name + "' has neither a capture nor a default");
      }
      try {
        ctx.parameters[param.name] =
            expand_placeholders(*param.default_value, ctx.parameters);
      } catch (const UnboundPlaceholder& e) {
        throw InterpretError(InterpretError::Code::MissingParameter,
                             "default of parameter '" + param.name +
                                 "' references unbound parameter '" + e.param() + "'");
      }
    }

    ctx.task_id = ids.next();
    return Interpretation{&tpl, std::move(ctx)};
  }
  throw InterpretError(InterpretError::Code::NoTemplateMatch,
                       "no template trigger matches the command");
}

}  // namespace sentry
