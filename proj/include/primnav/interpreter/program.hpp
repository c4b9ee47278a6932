#pragma once

#include <string>
#include <variant>
#include <vector>

#include "primnav/common.hpp"

namespace primnav::interp {

struct VarRef {
  std::string name;
  friend bool operator==(const VarRef&, const VarRef&) = default;
};

// Literal text, number, boolean, or a reference to a bound variable.
using ArgValue = std::variant<std::string, double, bool, VarRef>;

struct Arg {
  std::string name;
  ArgValue value;
  friend bool operator==(const Arg&, const Arg&) = default;
};

struct Statement {
  std::string output_var;  // empty for bare calls such as return(...)
  std::string module_name;
  std::vector<Arg> args;
  int line = 0;

  const Arg* find_arg(std::string_view name) const;
  friend bool operator==(const Statement&, const Statement&) = default;
};

struct Comment {
  int line = 0;
  std::string text;
  friend bool operator==(const Comment&, const Comment&) = default;
};

struct Program {
  std::vector<Statement> statements;
  std::vector<Comment> comments;
  std::string source_text;
};

// Structural equality: statements (including lines) and comments, not the source bytes.
bool same_structure(const Program& a, const Program& b);

inline const std::vector<std::string> kBuiltinNames = {"obs", "goal"};

struct ParseIssue {
  int line = 0;
  int column = 0;  // 1-based; 0 when the issue concerns the whole line
  std::string message;
  friend bool operator==(const ParseIssue&, const ParseIssue&) = default;
};

std::string to_string(const ParseIssue& issue);

struct ParseError : FormatError {
  explicit ParseError(std::vector<ParseIssue> issues);
  std::vector<ParseIssue> issues;
};

struct Blank {
  friend bool operator==(const Blank&, const Blank&) = default;
};

using ParsedLine = std::variant<Statement, Comment, Blank>;

// One source line. A statement with a trailing comment comes back as the statement;
// use parse_program to keep the comment too. Throws ParseError.
ParsedLine parse_line(std::string_view text, int line = 1);

// Parses every line, then checks define-before-use and unique outputs. All issues are
// collected and thrown together as one ParseError.
Program parse_program(std::string_view text);

// Canonical text. Every statement and comment stays on its original line (a comment
// sharing a line with a statement trails it), gaps become blank lines.
std::string pretty_print(const Program& program);
std::string format_statement(const Statement& s);
std::string format_arg_value(const ArgValue& v);

}  // namespace primnav::interp
