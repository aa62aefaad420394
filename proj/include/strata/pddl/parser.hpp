#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "strata/core/error.hpp"
#include "strata/core/util.hpp"
#include "strata/pddl/ast.hpp"

namespace strata::pddl {

namespace detail {

enum class TokKind { LParen, RParen, Symbol, Keyword, Variable, String, Dash, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  int line = 1;
  int column = 1;
};

inline bool is_symbol_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

/// Tokenizer for the Appendix-style PDDL subset. Identifiers are
/// case-insensitive and normalized to lowercase; string contents are kept
/// verbatim.
class Lexer {
 public:
  explicit Lexer(std::string_view text, int line_offset = 0)
      : text_(text), line_(1 + line_offset) {
    advance();
  }

  const Token& peek() const { return current_; }
  const Token& peek2() {
    if (!has_next_) {
      next_ = lex();
      has_next_ = true;
    }
    return next_;
  }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const Token& at, const std::string& message) const {
    std::string shown = at.kind == TokKind::End ? "<end of input>" : at.text;
    throw Error(ErrorCode::SyntaxError,
                message + " at line " + std::to_string(at.line) + ", column " +
                    std::to_string(at.column) + " (got '" + shown + "')")
        .with_location(at.line, at.column);
  }

 private:
  void advance() {
    if (has_next_) {
      current_ = next_;
      has_next_ = false;
    } else {
      current_ = lex();
    }
  }

  Token lex() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      bump();
    }
    Token tok;
    tok.line = line_;
    tok.column = column_;
    if (pos_ >= text_.size()) {
      tok.kind = TokKind::End;
      return tok;
    }
    char c = text_[pos_];
    if (c == '(') {
      bump();
      tok.kind = TokKind::LParen;
      tok.text = "(";
      return tok;
    }
    if (c == ')') {
      bump();
      tok.kind = TokKind::RParen;
      tok.text = ")";
      return tok;
    }
    if (c == '"') {
      bump();
      std::string value;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) bump();
        value += text_[pos_];
        bump();
      }
      if (pos_ >= text_.size()) fail(tok, "unterminated string");
      bump();  // closing quote
      tok.kind = TokKind::String;
      tok.text = value;
      return tok;
    }
    if (c == '?') {
      bump();
      std::string name = lex_symbol_chars();
      if (name.empty()) fail(tok, "expected variable name after '?'");
      tok.kind = TokKind::Variable;
      tok.text = to_lower(name);
      return tok;
    }
    if (c == ':') {
      bump();
      std::string name = lex_symbol_chars();
      if (name.empty()) fail(tok, "expected keyword name after ':'");
      tok.kind = TokKind::Keyword;
      tok.text = to_lower(name);
      return tok;
    }
    if (is_symbol_char(c)) {
      std::string name = lex_symbol_chars();
      if (name == "-") {
        tok.kind = TokKind::Dash;
        tok.text = "-";
        return tok;
      }
      tok.kind = TokKind::Symbol;
      tok.text = to_lower(name);
      return tok;
    }
    tok.text = std::string(1, c);
    fail(tok, "unexpected character");
  }

  std::string lex_symbol_chars() {
    std::string out;
    while (pos_ < text_.size() && is_symbol_char(text_[pos_])) {
      out += text_[pos_];
      bump();
    }
    return out;
  }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  Token current_;
  Token next_;
  bool has_next_ = false;
};

constexpr int kMaxFormulaDepth = 128;

/// Parses one literal or connective into `out`, flattening nested (and ...)
/// groups. `negated` tracks whether we are under a (not ...).
inline void parse_condition(Lexer& lex, std::vector<Literal>& out, bool negated,
                            int depth) {
  if (depth > kMaxFormulaDepth) lex.fail(lex.peek(), "formula nesting too deep");
  Token open = lex.take();
  if (open.kind != TokKind::LParen) lex.fail(open, "expected '('");
  const Token& head = lex.peek();
  if (head.kind == TokKind::Symbol && head.text == "and") {
    if (negated) lex.fail(head, "'and' is not allowed under 'not'");
    lex.take();
    while (lex.peek().kind != TokKind::RParen) {
      if (lex.peek().kind == TokKind::End) lex.fail(lex.peek(), "unterminated 'and'");
      parse_condition(lex, out, false, depth + 1);
    }
    lex.take();  // ')'
    return;
  }
  if (head.kind == TokKind::Symbol && head.text == "not") {
    if (negated) lex.fail(head, "nested 'not' is not allowed");
    lex.take();
    parse_condition(lex, out, true, depth + 1);
    if (lex.peek().kind != TokKind::RParen) lex.fail(lex.peek(), "expected ')' after 'not'");
    lex.take();
    return;
  }
  if (head.kind != TokKind::Symbol) lex.fail(head, "expected predicate name");
  Literal lit;
  lit.predicate = lex.take().text;
  lit.negated = negated;
  while (lex.peek().kind != TokKind::RParen) {
    const Token& t = lex.peek();
    if (t.kind == TokKind::Variable) {
      lit.args.push_back(Term{lex.take().text, true, false});
    } else if (t.kind == TokKind::Symbol) {
      lit.args.push_back(Term{lex.take().text, false, false});
    } else if (t.kind == TokKind::String) {
      lit.args.push_back(Term{lex.take().text, false, true});
    } else {
      lex.fail(t, "expected term or ')'");
    }
  }
  lex.take();  // ')'
  out.push_back(std::move(lit));
}

inline std::vector<Parameter> parse_parameter_list(Lexer& lex) {
  Token open = lex.take();
  if (open.kind != TokKind::LParen) lex.fail(open, "expected '(' after :parameters");
  std::vector<Parameter> params;
  while (lex.peek().kind != TokKind::RParen) {
    Token var = lex.take();
    if (var.kind != TokKind::Variable) lex.fail(var, "expected parameter variable");
    Parameter p;
    p.name = var.text;
    if (lex.peek().kind == TokKind::Dash) {
      lex.take();
      Token type = lex.take();
      if (type.kind != TokKind::Symbol) lex.fail(type, "expected type name after '-'");
      p.type = type.text;
    }
    params.push_back(std::move(p));
  }
  lex.take();  // ')'
  return params;
}

inline void check_bound_variables(const ActionSchema& schema, const Lexer& lex,
                                  const Token& at) {
  auto declared = [&](const std::string& name) {
    for (const Parameter& p : schema.params)
      if (p.name == name) return true;
    return false;
  };
  auto scan = [&](const std::vector<Literal>& body) {
    for (const Literal& lit : body)
      for (const Term& t : lit.args)
        if (t.is_variable && !declared(t.value))
          throw Error(ErrorCode::UnboundVariable,
                      "variable '?" + t.value + "' in action '" + schema.name +
                          "' is not declared in :parameters")
              .with_location(at.line, at.column);
  };
  (void)lex;
  scan(schema.preconditions);
  scan(schema.effects);
}

inline ActionSchema parse_action_block(Lexer& lex) {
  Token kw = lex.take();
  if (kw.kind != TokKind::Keyword || kw.text != "action")
    lex.fail(kw, "expected ':action'");
  Token name = lex.take();
  if (name.kind != TokKind::Symbol) lex.fail(name, "expected action name");
  ActionSchema schema;
  schema.name = name.text;
  bool saw_params = false, saw_pre = false, saw_eff = false;
  for (;;) {
    const Token& t = lex.peek();
    if (t.kind == TokKind::RParen) {
      lex.take();
      break;
    }
    // The Appendix domain examples omit the closing paren of an action
    // block before the next "(:action"; accept that shape.
    if (t.kind == TokKind::End) break;
    if (t.kind == TokKind::LParen && lex.peek2().kind == TokKind::Keyword &&
        lex.peek2().text == "action")
      break;
    if (t.kind != TokKind::Keyword) lex.fail(t, "expected ':parameters', ':precondition', ':effect' or ')'");
    if (t.text == "parameters") {
      if (saw_params) lex.fail(t, "duplicate :parameters");
      saw_params = true;
      lex.take();
      schema.params = parse_parameter_list(lex);
    } else if (t.text == "precondition") {
      if (saw_pre) lex.fail(t, "duplicate :precondition");
      saw_pre = true;
      lex.take();
      parse_condition(lex, schema.preconditions, false, 0);
    } else if (t.text == "effect") {
      if (saw_eff) lex.fail(t, "duplicate :effect");
      saw_eff = true;
      lex.take();
      parse_condition(lex, schema.effects, false, 0);
    } else {
      lex.fail(t, "unknown action field ':" + t.text + "'");
    }
  }
  check_bound_variables(schema, lex, name);
  return schema;
}

}  // namespace detail

/// Parses a sequence of (:action ...) blocks in the Appendix surface syntax.
/// The initial state defaults to {(on-homepage)}.
inline DomainFile parse_domain(std::string_view text) {
  detail::Lexer lex(text);
  DomainFile domain;
  while (lex.peek().kind != detail::TokKind::End) {
    detail::Token open = lex.take();
    if (open.kind != detail::TokKind::LParen) lex.fail(open, "expected '(:action'");
    ActionSchema schema = detail::parse_action_block(lex);
    if (domain.find(schema.name) != nullptr) {
      throw Error(ErrorCode::DuplicateAction,
                  "action '" + schema.name + "' is defined more than once")
          .with_location(open.line, open.column);
    }
    domain.schemas.push_back(std::move(schema));
  }
  return domain;
}

/// Parses a plan: one ground action per line, with an optional "N." or "N)"
/// prefix. Empty input yields an empty plan.
inline std::vector<GroundAction> parse_plan(std::string_view text) {
  std::vector<GroundAction> plan;
  std::vector<std::string> lines = split_lines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    int line_no = static_cast<int>(i) + 1;
    std::string_view line = trim_view(lines[i]);
    if (line.empty()) continue;
    size_t p = 0;
    while (p < line.size() && std::isdigit(static_cast<unsigned char>(line[p]))) ++p;
    if (p > 0 && p < line.size() && (line[p] == '.' || line[p] == ')')) {
      line = trim_view(line.substr(p + 1));
    }
    detail::Lexer lex(line, line_no - 1);
    detail::Token open = lex.take();
    if (open.kind != detail::TokKind::LParen) lex.fail(open, "expected '('");
    detail::Token name = lex.take();
    if (name.kind != detail::TokKind::Symbol) lex.fail(name, "expected action name");
    GroundAction action;
    action.schema_name = name.text;
    while (lex.peek().kind != detail::TokKind::RParen) {
      const detail::Token& t = lex.peek();
      if (t.kind == detail::TokKind::Symbol) {
        action.args.push_back(PlanArg{lex.take().text, false});
      } else if (t.kind == detail::TokKind::String) {
        action.args.push_back(PlanArg{lex.take().text, true});
      } else if (t.kind == detail::TokKind::Variable) {
        lex.fail(t, "variables are not allowed in a ground plan");
      } else {
        lex.fail(t, "expected argument or ')'");
      }
    }
    lex.take();  // ')'
    if (lex.peek().kind != detail::TokKind::End)
      lex.fail(lex.peek(), "unexpected trailing text after action");
    plan.push_back(std::move(action));
  }
  return plan;
}

}  // namespace strata::pddl
