#include "primnav/interpreter/program.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <map>
#include <optional>

namespace primnav::interp {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class LineParser {
 public:
  LineParser(std::string_view text, int line) : s_(text), line_(line) {}

  // Statement (if any) plus a comment (own-line or trailing).
  std::pair<std::optional<Statement>, std::optional<Comment>> run() {
    skip_ws();
    if (done()) return {};
    if (peek() == '#') return {std::nullopt, comment()};

    Statement st;
    st.line = line_;
    const int first_col = col();
    std::string first = ident("expected a variable or module name");
    skip_ws();
    if (!done() && peek() == '=') {
      ++pos_;
      skip_ws();
      st.output_var = std::move(first);
      st.module_name = ident("expected a module name");
    } else if (!done() && peek() == '(') {
      st.module_name = std::move(first);
    } else {
      fail(done() ? first_col : col(), "missing '=' after '" + first + "'");
    }
    skip_ws();
    if (done() || peek() != '(') fail(col(), "expected '(' after module name");
    const int open_col = col();
    ++pos_;
    skip_ws();
    if (!done() && peek() == ')') {
      ++pos_;
    } else {
      for (;;) {
        skip_ws();
        if (done()) fail(open_col, "unclosed '('");
        const int key_col = col();
        std::string key = ident("expected an argument name");
        skip_ws();
        if (done() || peek() != '=') fail(col(), "missing '=' after argument '" + key + "'");
        ++pos_;
        skip_ws();
        if (done()) fail(open_col, "unclosed '('");
        ArgValue v = value();
        if (st.find_arg(key)) fail(key_col, "duplicate argument '" + key + "'");
        st.args.push_back({std::move(key), std::move(v)});
        skip_ws();
        if (done()) fail(open_col, "unclosed '('");
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        if (peek() == ')') {
          ++pos_;
          break;
        }
        fail(col(), "expected ',' or ')'");
      }
    }
    skip_ws();
    std::optional<Comment> trailing;
    if (!done()) {
      if (peek() != '#') fail(col(), "unexpected text after ')'");
      trailing = comment();
    }
    return {std::move(st), std::move(trailing)};
  }

 private:
  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  int col() const { return static_cast<int>(pos_) + 1; }
  void skip_ws() {
    while (!done() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }
  [[noreturn]] void fail(int column, std::string msg) const { throw ParseError({{line_, column, std::move(msg)}}); }

  Comment comment() {
    ++pos_;  // '#'
    std::string_view rest = s_.substr(pos_);
    while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) rest.remove_prefix(1);
    while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\t' || rest.back() == '\r')) rest.remove_suffix(1);
    pos_ = s_.size();
    return {line_, std::string(rest)};
  }

  std::string ident(const char* what) {
    if (done() || !ident_start(peek())) fail(col(), what);
    const std::size_t start = pos_;
    while (!done() && ident_char(peek())) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  ArgValue value() {
    const char c = peek();
    if (c == '\'' || c == '"') return quoted(c);
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') return number();
    if (ident_start(c)) {
      std::string id = ident("expected a value");
      if (id == "True" || id == "true") return true;
      if (id == "False" || id == "false") return false;
      return VarRef{std::move(id)};
    }
    fail(col(), std::string("unexpected character '") + c + "'");
  }

  std::string quoted(char q) {
    const int open = col();
    ++pos_;
    std::string out;
    for (;;) {
      if (done()) fail(open, "unterminated string");
      char c = peek();
      ++pos_;
      if (c == q) return out;
      if (c == '\\') {
        if (done()) fail(open, "unterminated string");
        c = peek();
        ++pos_;
        if (c == 'n') c = '\n';
        else if (c == 't') c = '\t';
      }
      out.push_back(c);
    }
  }

  double number() {
    const int start_col = col();
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    if (peek() == '-' || peek() == '+') ++pos_;
    std::size_t n = digits();
    if (!done() && peek() == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) fail(start_col, "malformed number");
    if (!done() && (peek() == 'e' || peek() == 'E')) {
      ++pos_;
      if (!done() && (peek() == '-' || peek() == '+')) ++pos_;
      if (digits() == 0) fail(start_col, "malformed number");
    }
    if (!done() && ident_char(peek())) fail(col(), "malformed number");
    std::string text(s_.substr(start, pos_ - start));
    if (text.front() == '+') text.erase(0, 1);
    return std::strtod(text.c_str(), nullptr);
  }

  std::string_view s_;
  int line_;
  std::size_t pos_ = 0;
};

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

}  // namespace

const Arg* Statement::find_arg(std::string_view name) const {
  for (const auto& a : args)
    if (a.name == name) return &a;
  return nullptr;
}

bool same_structure(const Program& a, const Program& b) {
  return a.statements == b.statements && a.comments == b.comments;
}

std::string to_string(const ParseIssue& issue) {
  std::string s = "line " + std::to_string(issue.line);
  if (issue.column > 0) s += ", column " + std::to_string(issue.column);
  return s + ": " + issue.message;
}

namespace {
std::string join_issues(const std::vector<ParseIssue>& issues) {
  std::string s;
  for (const auto& i : issues) {
    if (!s.empty()) s += "; ";
    s += to_string(i);
  }
  return s;
}
}  // namespace

ParseError::ParseError(std::vector<ParseIssue> is) : FormatError(join_issues(is)), issues(std::move(is)) {}

ParsedLine parse_line(std::string_view text, int line) {
  auto [st, comment] = LineParser(text, line).run();
  if (st) return std::move(*st);
  if (comment) return std::move(*comment);
  return Blank{};
}

Program parse_program(std::string_view text) {
  Program prog;
  prog.source_text = std::string(text);
  std::vector<ParseIssue> issues;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    try {
      auto [st, comment] = LineParser(lines[i], line).run();
      if (st) prog.statements.push_back(std::move(*st));
      if (comment) prog.comments.push_back(std::move(*comment));
    } catch (const ParseError& e) {
      issues.insert(issues.end(), e.issues.begin(), e.issues.end());
    }
  }

  std::map<std::string, int> defined;
  for (const auto& b : kBuiltinNames) defined[b] = 0;
  for (const auto& st : prog.statements) {
    for (const auto& a : st.args) {
      if (const auto* ref = std::get_if<VarRef>(&a.value); ref && !defined.count(ref->name))
        issues.push_back({st.line, 0, "'" + ref->name + "' is used before it is defined"});
    }
    if (st.output_var.empty()) continue;
    auto it = defined.find(st.output_var);
    if (it != defined.end()) {
      if (it->second == 0)
        issues.push_back({st.line, 0, "cannot assign to builtin '" + st.output_var + "'"});
      else
        issues.push_back({st.line, 0,
                          "duplicate output variable '" + st.output_var + "' (first assigned on line " +
                              std::to_string(it->second) + ")"});
      continue;
    }
    defined[st.output_var] = st.line;
  }
  if (!issues.empty()) {
    std::stable_sort(issues.begin(), issues.end(), [](const auto& a, const auto& b) { return a.line < b.line; });
    throw ParseError(std::move(issues));
  }
  return prog;
}

std::string format_arg_value(const ArgValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) {
    std::string out = "'";
    for (char c : *s) {
      if (c == '\'' || c == '\\') out.push_back('\\');
      if (c == '\n') {
        out += "\\n";
        continue;
      }
      if (c == '\t') {
        out += "\\t";
        continue;
      }
      out.push_back(c);
    }
    return out + "'";
  }
  if (const auto* d = std::get_if<double>(&v)) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, *d);
    return std::string(buf, res.ptr);
  }
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "True" : "False";
  return std::get<VarRef>(v).name;
}

std::string format_statement(const Statement& s) {
  std::string out;
  if (!s.output_var.empty()) out = s.output_var + " = ";
  out += s.module_name + "(";
  for (std::size_t i = 0; i < s.args.size(); ++i) {
    if (i) out += ", ";
    out += s.args[i].name + "=" + format_arg_value(s.args[i].value);
  }
  return out + ")";
}

std::string pretty_print(const Program& program) {
  std::map<int, std::string> lines;
  int last = 0;
  for (const auto& s : program.statements) {
    lines[s.line] = format_statement(s);
    last = std::max(last, s.line);
  }
  for (const auto& c : program.comments) {
    auto& l = lines[c.line];
    l += l.empty() ? "# " + c.text : "  # " + c.text;
    last = std::max(last, c.line);
  }
  std::string out;
  for (int i = 1; i <= last; ++i) {
    auto it = lines.find(i);
    if (it != lines.end()) out += it->second;
    out += '\n';
  }
  return out;
}

}  // namespace primnav::interp
