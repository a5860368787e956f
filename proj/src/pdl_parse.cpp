#include <cctype>
#include <optional>

#include "pfmc/error.hpp"
#include "pfmc/pdl.hpp"

namespace pfmc::pdl {

namespace {

enum class Tok { ident, quoted, punct, end };

struct Token {
  Tok kind;
  std::string text;
  int line;
};

bool ident_char(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || c == '\'' || c == '.' || c == '~' || c == '$' ||
         c == '@' || c == ':' || u >= 0x80;
}

std::vector<Token> lex(std::string_view s) {
  static const char* const puncts[] = {"<=>", "=>", "^-1", "!", "&", "|", "<", ">", "[", "]",
                                       "(",   ")",  ";",   "+", "*", "?", "="};
  std::vector<Token> out;
  int line = 1;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == '"') {
      std::string text;
      ++i;
      while (i < s.size() && s[i] != '"') {
        if (s[i] == '\\' && i + 1 < s.size()) ++i;
        if (s[i] == '\n') throw ParseError("unterminated quoted atom", line);
        text += s[i++];
      }
      if (i >= s.size()) throw ParseError("unterminated quoted atom", line);
      ++i;
      if (text.empty()) throw ParseError("empty quoted atom", line);
      out.push_back({Tok::quoted, text, line});
    } else if (ident_char(c)) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      out.push_back({Tok::ident, std::string(s.substr(i, j - i)), line});
      i = j;
    } else {
      bool matched = false;
      for (const char* p : puncts) {
        std::string_view pv(p);
        if (s.substr(i, pv.size()) == pv) {
          out.push_back({Tok::punct, std::string(pv), line});
          i += pv.size();
          matched = true;
          break;
        }
      }
      if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", line);
    }
  }
  out.push_back({Tok::end, "", line});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const MacroEnv& defs) : toks_(lex(text)), env_(defs) {}

  // (let NAME = expr ;)* expr [;]
  Formula file() {
    while (peek_ident("let")) {
      int line = cur().line;
      ++pos_;
      if (cur().kind != Tok::ident) throw ParseError("expected macro name after 'let'", line);
      std::string name = cur().text;
      if (builtin(name)) throw ParseError("cannot redefine built-in '" + name + "'", line);
      ++pos_;
      expect("=");
      in_let_ = true;
      Formula body = expr();
      in_let_ = false;
      expect(";");
      env_[name] = body;
    }
    Formula f = expr();
    if (peek_punct(";")) ++pos_;
    if (cur().kind != Tok::end) throw ParseError("unexpected '" + cur().text + "'", cur().line);
    return f;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  bool peek_punct(const char* p) const { return cur().kind == Tok::punct && cur().text == p; }
  bool peek_ident(const char* p) const { return cur().kind == Tok::ident && cur().text == p; }

  void expect(const char* p) {
    if (!peek_punct(p)) {
      std::string got = cur().kind == Tok::end ? "end of input" : "'" + cur().text + "'";
      throw ParseError(std::string("expected '") + p + "' but found " + got, cur().line);
    }
    ++pos_;
  }

  static bool builtin(const std::string& n) {
    return n == "true" || n == "false" || n == "down" || n == "up" || n == "left" ||
           n == "right" || n == "let" || n == "root" || n == "leaf" || n == "first" ||
           n == "last" || n == "firstchild" || n == "dfnext";
  }

  NodeFormula as_node(const Formula& f, const char* op, int line) {
    if (auto n = std::get_if<NodeFormula>(&f)) return *n;
    throw ParseError(std::string("sort error: '") + op + "' expects a node formula, got a path",
                     line);
  }
  PathFormula as_path(const Formula& f, const char* op, int line) {
    if (auto p = std::get_if<PathFormula>(&f)) return *p;
    throw ParseError(std::string("sort error: '") + op + "' expects a path, got a node formula",
                     line);
  }

  Formula expr() { return iff_level(); }

  Formula iff_level() {
    Formula lhs = implies_level();
    while (peek_punct("<=>")) {
      int line = cur().line;
      ++pos_;
      Formula rhs = implies_level();
      lhs = iff(as_node(lhs, "<=>", line), as_node(rhs, "<=>", line));
    }
    return lhs;
  }

  Formula implies_level() {
    Formula lhs = or_level();
    if (peek_punct("=>")) {
      int line = cur().line;
      ++pos_;
      Formula rhs = implies_level();
      return implies(as_node(lhs, "=>", line), as_node(rhs, "=>", line));
    }
    return lhs;
  }

  Formula or_level() {
    Formula lhs = and_level();
    while (peek_punct("|")) {
      int line = cur().line;
      ++pos_;
      Formula rhs = and_level();
      lhs = disj(as_node(lhs, "|", line), as_node(rhs, "|", line));
    }
    return lhs;
  }

  Formula and_level() {
    Formula lhs = choice_level();
    while (peek_punct("&")) {
      int line = cur().line;
      ++pos_;
      Formula rhs = choice_level();
      lhs = conj(as_node(lhs, "&", line), as_node(rhs, "&", line));
    }
    return lhs;
  }

  Formula choice_level() {
    Formula lhs = seq_level();
    while (peek_punct("+")) {
      int line = cur().line;
      ++pos_;
      Formula rhs = seq_level();
      lhs = choice(as_path(lhs, "+", line), as_path(rhs, "+", line));
    }
    return lhs;
  }

  Formula seq_level() {
    Formula lhs = prefix_level();
    while (peek_punct(";")) {
      // a trailing ';' closes a definition or the file
      if (toks_[pos_ + 1].kind == Tok::end || is_let(pos_ + 1)) break;
      int line = cur().line;
      std::size_t saved = pos_;
      ++pos_;
      // `let p = down; <p>q`: the ';' may end a definition, in which case
      // the next operand is a node formula or mentions the macro being defined
      std::optional<Formula> rhs;
      try {
        rhs = prefix_level();
      } catch (const ParseError&) {
        if (!in_let_) throw;
      }
      if (!rhs || (std::holds_alternative<NodeFormula>(*rhs) &&
                   std::holds_alternative<PathFormula>(lhs))) {
        pos_ = saved;
        break;
      }
      lhs = seq(as_path(lhs, ";", line), as_path(*rhs, ";", line));
    }
    return lhs;
  }

  bool is_let(std::size_t i) const {
    return toks_[i].kind == Tok::ident && toks_[i].text == "let";
  }

  Formula prefix_level() {
    int line = cur().line;
    if (peek_punct("!")) {
      ++pos_;
      return neg(as_node(prefix_level(), "!", line));
    }
    if (peek_punct("<")) {
      ++pos_;
      PathFormula p = as_path(expr(), "<...>", line);
      expect(">");
      return diamond(p, as_node(prefix_level(), "<...>", line));
    }
    if (peek_punct("[")) {
      ++pos_;
      PathFormula p = as_path(expr(), "[...]", line);
      expect("]");
      return box(p, as_node(prefix_level(), "[...]", line));
    }
    return postfix_level();
  }

  Formula postfix_level() {
    Formula f = primary();
    for (;;) {
      int line = cur().line;
      if (peek_punct("*")) {
        ++pos_;
        f = star(as_path(f, "*", line));
      } else if (peek_punct("^-1")) {
        ++pos_;
        f = inverse(as_path(f, "^-1", line));
      } else if (peek_punct("?")) {
        ++pos_;
        f = test(as_node(f, "?", line));
      } else {
        return f;
      }
    }
  }

  Formula primary() {
    const Token& t = cur();
    if (t.kind == Tok::punct && t.text == "(") {
      ++pos_;
      Formula f = expr();
      expect(")");
      return f;
    }
    if (t.kind == Tok::quoted) {
      ++pos_;
      return atom(t.text);
    }
    if (t.kind != Tok::ident) {
      std::string got = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
      throw ParseError("expected a formula but found " + got, t.line);
    }
    ++pos_;
    const std::string& n = t.text;
    if (n == "true") return top();
    if (n == "false") return bot();
    if (n == "down") return down();
    if (n == "up") return up();
    if (n == "right") return right();
    if (n == "left") return left();
    if (n == "root") return root_macro();
    if (n == "leaf") return leaf_macro();
    if (n == "first") return first_macro();
    if (n == "last") return last_macro();
    if (n == "firstchild") return firstchild_macro();
    if (n == "dfnext") return dfnext_macro();
    if (n == "let") throw ParseError("'let' is only allowed before the formula", t.line);
    if (auto it = env_.find(n); it != env_.end()) return it->second;
    return atom(n);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool in_let_ = false;
  MacroEnv env_;
};

}  // namespace

Formula parse_formula_text(std::string_view text, const MacroEnv& defs) {
  return Parser(text, defs).file();
}

NodeFormula parse_node_formula(std::string_view text, const MacroEnv& defs) {
  Formula f = parse_formula_text(text, defs);
  if (auto n = std::get_if<NodeFormula>(&f)) return *n;
  throw ParseError("sort error: expected a node formula, got a path", 0);
}

PathFormula parse_path_formula(std::string_view text, const MacroEnv& defs) {
  Formula f = parse_formula_text(text, defs);
  if (auto p = std::get_if<PathFormula>(&f)) return *p;
  throw ParseError("sort error: expected a path, got a node formula", 0);
}

}  // namespace pfmc::pdl
