#include "primnav/interpreter/eval.hpp"

#include <cstdlib>

namespace primnav::interp {

namespace {

// Operand during evaluation: number, boolean or text.
using Operand = std::variant<double, bool, std::string>;

class ExprParser {
 public:
  ExprParser(std::string_view s, const Lookup& lookup) : s_(s), lookup_(lookup) {}

  Operand run() {
    Operand v = parse_or();
    skip_ws();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw EvalError("eval: " + msg + " at offset " + std::to_string(pos_));
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool keyword(std::string_view kw) {
    skip_ws();
    if (s_.substr(pos_, kw.size()) != kw) return false;
    const std::size_t end = pos_ + kw.size();
    if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) return false;
    pos_ = end;
    return true;
  }
  bool symbol(std::string_view sym) {
    skip_ws();
    if (s_.substr(pos_, sym.size()) != sym) return false;
    pos_ += sym.size();
    return true;
  }

  bool as_bool(const Operand& v) const {
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    if (const auto* d = std::get_if<double>(&v)) return *d != 0.0;
    return !std::get<std::string>(v).empty();
  }
  double as_number(const Operand& v) const {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
    fail("text used in arithmetic");
  }

  Operand parse_or() {
    Operand v = parse_and();
    while (keyword("or")) {
      Operand r = parse_and();
      v = as_bool(v) || as_bool(r);
    }
    return v;
  }
  Operand parse_and() {
    Operand v = parse_not();
    while (keyword("and")) {
      Operand r = parse_not();
      v = as_bool(v) && as_bool(r);
    }
    return v;
  }
  Operand parse_not() {
    if (keyword("not")) return !as_bool(parse_not());
    return parse_cmp();
  }
  Operand parse_cmp() {
    Operand l = parse_sum();
    static constexpr std::string_view ops[] = {"<=", ">=", "==", "!=", "<", ">"};
    for (auto op : ops) {
      if (!symbol(op)) continue;
      Operand r = parse_sum();
      if (op == "==" || op == "!=") {
        bool eq;
        if (std::holds_alternative<std::string>(l) || std::holds_alternative<std::string>(r))
          eq = l == r;
        else
          eq = as_number(l) == as_number(r);
        return op == "==" ? eq : !eq;
      }
      const double a = as_number(l), b = as_number(r);
      if (op == "<") return a < b;
      if (op == ">") return a > b;
      if (op == "<=") return a <= b;
      return a >= b;
    }
    return l;
  }
  Operand parse_sum() {
    Operand v = parse_term();
    for (;;) {
      if (symbol("+")) v = as_number(v) + as_number(parse_term());
      else if (symbol("-")) v = as_number(v) - as_number(parse_term());
      else return v;
    }
  }
  Operand parse_term() {
    Operand v = parse_unary();
    for (;;) {
      if (symbol("*")) {
        v = as_number(v) * as_number(parse_unary());
      } else if (symbol("/")) {
        const double d = as_number(parse_unary());
        if (d == 0.0) fail("division by zero");
        v = as_number(v) / d;
      } else {
        return v;
      }
    }
  }
  Operand parse_unary() {
    if (symbol("-")) return -as_number(parse_unary());
    return parse_atom();
  }
  Operand parse_atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Operand v = parse_or();
      if (!symbol(")")) fail("expected ')'");
      return v;
    }
    if (c == '\'' || c == '"') {
      const std::size_t close = s_.find(c, pos_ + 1);
      if (close == std::string_view::npos) fail("unterminated string");
      std::string text(s_.substr(pos_ + 1, close - pos_ - 1));
      pos_ = close + 1;
      return text;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      const std::string copy(s_.substr(pos_));
      const double d = std::strtod(copy.c_str(), &end);
      const std::size_t used = static_cast<std::size_t>(end - copy.c_str());
      if (used == 0) fail("malformed number");
      pos_ += used;
      return d;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string id(s_.substr(start, pos_ - start));
      if (id == "True" || id == "true") return true;
      if (id == "False" || id == "false") return false;
      if (id == "and" || id == "or" || id == "not") fail("misplaced '" + id + "'");
      auto v = lookup_(id);
      if (!v) fail("'" + id + "' is not bound");
      return from_value(*v, id);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Operand from_value(const Value& v, const std::string& id) const {
    switch (v.kind()) {
      case ValueKind::kNumber: return v.number();
      case ValueKind::kBoolean: return v.boolean();
      case ValueKind::kText:
      case ValueKind::kAnswer: return v.text();
      case ValueKind::kDetections: return static_cast<double>(v.detections().size());
      case ValueKind::kNavOutcome: return v.truthy();
      default: fail("'" + id + "' is a " + to_string(v.kind()) + " and cannot be used in an expression");
    }
  }

  std::string_view s_;
  const Lookup& lookup_;
  std::size_t pos_ = 0;
};

}  // namespace

Value evaluate_expression(std::string_view expr, const Lookup& lookup) {
  const Operand v = ExprParser(expr, lookup).run();
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  return Text{std::get<std::string>(v)};
}

}  // namespace primnav::interp
