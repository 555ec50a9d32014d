#pragma once

// Text form of symbolic templates.
//
//   template  := stmt+ "Facts:" fact_list "." "Question:" question ["Label:" label]
//   stmt      := "If" op "(" cond ("," cond)* ")" "," "then" UPPER "."
//   op        := "all" | "any"
//   cond      := ["not"] UPPER
//   fact_list := fact ("," fact)*
//   fact      := ["not"] lower
//   question  := "Is" lower "correct?"
//   label     := relation ["," "if" UPPER ("," UPPER)*] ["."]
//
// Line breaks are ordinary whitespace. Keywords are matched without regard
// to case; variables are a single letter plus optional digits. The
// unsatisfied-condition list after "if" in the label line is informational:
// it is checked for syntax but not stored, since it follows from the facts.

#include <cctype>
#include <cstddef>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "condlogic/error.hpp"
#include "condlogic/template.hpp"

namespace condlogic {

namespace dsl_detail {

enum class TokenKind { Word, Punct, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const auto c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = col;
    if (std::isalpha(c)) {
      std::size_t j = i;
      while (j < src.size() && std::isalpha(static_cast<unsigned char>(src[j]))) ++j;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      tok.kind = TokenKind::Word;
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (c == '(' || c == ')' || c == ',' || c == '.' || c == ':' || c == '?') {
      tok.kind = TokenKind::Punct;
      tok.text = std::string(1, static_cast<char>(c));
      advance(1);
    } else {
      throw ParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", line, col);
    }
    out.push_back(std::move(tok));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : tokens_(tokenize(src)) {}

  Template parse() {
    Template t;
    std::map<std::string, Token> declared;  // every upper-case variable seen so far
    std::set<std::string> condition_vars;

    do {
      t.groups.push_back(statement(declared, condition_vars));
    } while (peek_keyword("if"));

    expect_keyword("Facts");
    expect_punct(":");
    std::set<std::string> fact_vars;
    if (!peek_punct(".")) {
      do {
        TemplateFact f;
        if (peek_keyword("not")) {
          next();
          f.negated = true;
        }
        const Token& v = variable(false, "fact variable");
        if (!condition_vars.count(upper_var(v.text))) {
          fail("fact '" + v.text + "' refers to unknown condition '" + upper_var(v.text) + "'", v);
        }
        if (!fact_vars.insert(v.text).second) fail("fact '" + v.text + "' is listed twice", v);
        f.var = v.text;
        t.facts.push_back(std::move(f));
      } while (accept_punct(","));
    }
    expect_punct(".");

    expect_keyword("Question");
    expect_punct(":");
    expect_keyword("Is");
    const Token question = variable(false, "question variable");
    t.question_var = question.text;
    expect_keyword("correct");
    expect_punct("?");

    if (peek_keyword("Label")) {
      next();
      expect_punct(":");
      const Token& rel = expect_word("label");
      const auto target = target_relation_from_string(lowered(rel.text));
      if (!target) fail("unknown label '" + rel.text + "'", rel);
      t.target = target;
      if (accept_punct(",")) {
        expect_keyword("if");
        do {
          const Token& v = variable(true, "condition variable");
          if (!condition_vars.count(v.text)) fail("label names unknown condition '" + v.text + "'", v);
        } while (accept_punct(","));
      }
      accept_punct(".");
    }

    if (peek().kind != TokenKind::End) fail("unexpected '" + peek().text + "' after template", peek());

    const bool matches_result = relevant_group(t).has_value();
    if (t.target == TargetRelation::Irrelevant) {
      if (matches_result) fail("question '" + t.question_var + "' matches a result but the label is irrelevant", question);
      if (condition_vars.count(upper_var(t.question_var))) {
        fail("question '" + t.question_var + "' refers to a condition", question);
      }
    } else if (!matches_result) {
      fail("question refers to unknown result '" + upper_var(t.question_var) + "'", question);
    }
    return t;
  }

 private:
  TemplateGroup statement(std::map<std::string, Token>& declared, std::set<std::string>& condition_vars) {
    TemplateGroup g;
    expect_keyword("if");
    const Token& op = expect_word("operator");
    if (iequals(op.text, "all")) {
      g.op = GroupOperator::All;
    } else if (iequals(op.text, "any")) {
      g.op = GroupOperator::Any;
    } else {
      fail("unknown operator '" + op.text + "' (expected 'all' or 'any')", op);
    }
    expect_punct("(");
    do {
      TemplateCondition c;
      if (peek_keyword("not")) {
        next();
        c.negated = true;
      }
      const Token& v = variable(true, "condition variable");
      declare(declared, v);
      condition_vars.insert(v.text);
      c.var = v.text;
      g.conditions.push_back(std::move(c));
    } while (accept_punct(","));
    expect_punct(")");
    expect_punct(",");
    expect_keyword("then");
    const Token& result = variable(true, "result variable");
    declare(declared, result);
    g.consequent = result.text;
    expect_punct(".");
    return g;
  }

  void declare(std::map<std::string, Token>& declared, const Token& v) {
    if (auto it = declared.find(v.text); it != declared.end()) {
      fail("variable '" + v.text + "' already used at line " + std::to_string(it->second.line), v);
    }
    declared.emplace(v.text, v);
  }

  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (t.kind != TokenKind::End) ++pos_;
    return t;
  }

  bool peek_keyword(std::string_view kw) const {
    return peek().kind == TokenKind::Word && iequals(peek().text, kw);
  }
  bool peek_punct(std::string_view p) const { return peek().kind == TokenKind::Punct && peek().text == p; }

  bool accept_punct(std::string_view p) {
    if (!peek_punct(p)) return false;
    next();
    return true;
  }

  void expect_keyword(std::string_view kw) {
    if (!peek_keyword(kw)) fail("expected '" + std::string(kw) + "', found " + describe(peek()), peek());
    next();
  }

  void expect_punct(std::string_view p) {
    if (!peek_punct(p)) fail("expected '" + std::string(p) + "', found " + describe(peek()), peek());
    next();
  }

  const Token& expect_word(std::string_view what) {
    if (peek().kind != TokenKind::Word) fail("expected " + std::string(what) + ", found " + describe(peek()), peek());
    return next();
  }

  const Token& variable(bool upper, std::string_view what) {
    if (peek().kind != TokenKind::Word || !is_variable(peek().text, upper)) {
      fail("expected " + std::string(what) + ", found " + describe(peek()), peek());
    }
    return next();
  }

  static std::string describe(const Token& t) {
    return t.kind == TokenKind::End ? std::string("end of input") : "'" + t.text + "'";
  }

  static std::string lowered(std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
  }

  [[noreturn]] static void fail(const std::string& msg, const Token& at) {
    throw ParseError(msg, at.line, at.column);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace dsl_detail

inline Template parse_template_dsl(std::string_view text) { return dsl_detail::Parser(text).parse(); }

inline std::string render_template_dsl(const Template& t) {
  std::ostringstream os;
  for (const auto& g : t.groups) {
    os << "If " << to_string(g.op) << " (";
    for (std::size_t i = 0; i < g.conditions.size(); ++i) {
      if (i) os << ", ";
      if (g.conditions[i].negated) os << "not ";
      os << g.conditions[i].var;
    }
    os << "), then " << g.consequent << ".\n";
  }
  os << "Facts: ";
  for (std::size_t i = 0; i < t.facts.size(); ++i) {
    if (i) os << ", ";
    if (t.facts[i].negated) os << "not ";
    os << t.facts[i].var;
  }
  os << ".\nQuestion: Is " << t.question_var << " correct?";
  if (t.target) {
    os << "\nLabel: " << to_string(*t.target);
    std::vector<std::string> unsatisfied;
    try {
      unsatisfied = solve_template(t).unsatisfied;
    } catch (const Error&) {
      // an inconsistent template still renders; the suffix is informational
    }
    for (std::size_t i = 0; i < unsatisfied.size(); ++i) os << (i ? ", " : ", if ") << unsatisfied[i];
  }
  return os.str();
}

}  // namespace condlogic
