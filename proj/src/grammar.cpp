#include "pfmc/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "pfmc/error.hpp"

namespace pfmc {

std::set<std::string> Cfg::features_of(const std::string& symbol) const {
  auto it = features.find(symbol);
  if (it != features.end()) return it->second;
  return {symbol};
}

Labeling Cfg::labeling() const { return Labeling(features); }

std::set<std::string> Cfg::propositions() const {
  std::set<std::string> out = nonterminals;
  out.insert(terminals.begin(), terminals.end());
  out.insert(kEpsilon);
  for (const auto& [sym, fs] : features) out.insert(fs.begin(), fs.end());
  return out;
}

void Cfg::validate() const {
  if (!nonterminals.count(axiom)) throw PreconditionError("axiom '" + axiom + "' has no production");
  for (const auto& t : terminals) {
    if (nonterminals.count(t)) throw PreconditionError("'" + t + "' is both terminal and nonterminal");
    if (t == kEpsilon) throw PreconditionError("'eps' is reserved");
  }
  if (nonterminals.count(kEpsilon)) throw PreconditionError("'eps' is reserved");
  for (const auto& p : productions) {
    if (!nonterminals.count(p.lhs)) throw PreconditionError("unknown lhs '" + p.lhs + "'");
    for (const auto& x : p.rhs)
      if (!nonterminals.count(x) && !terminals.count(x))
        throw PreconditionError("undeclared symbol '" + x + "'");
  }
}

// ---------------------------------------------------------------------------
// Text format

namespace {

bool ident_char(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || c == '\'' || c == '.' || c == '~' || c == '$' ||
         c == '@' || c == ':' || u >= 0x80;
}

struct GTok {
  enum Kind { ident, quoted, arrow, bar, semi, equals, question, end } kind;
  std::string text;
  int line;
};

std::vector<GTok> lex_grammar(std::string_view s) {
  std::vector<GTok> out;
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
      std::size_t j = i + 1;
      std::string text;
      while (j < s.size() && s[j] != '"' && s[j] != '\n') {
        if (s[j] == '\\' && j + 1 < s.size()) ++j;
        text += s[j++];
      }
      if (j >= s.size() || s[j] != '"') throw ParseError("unterminated terminal", line);
      if (text.empty()) throw ParseError("empty terminal", line);
      out.push_back({GTok::quoted, text, line});
      i = j + 1;
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({GTok::arrow, "->", line});
      i += 2;
    } else if (c == '|') {
      out.push_back({GTok::bar, "|", line});
      ++i;
    } else if (c == ';') {
      out.push_back({GTok::semi, ";", line});
      ++i;
    } else if (c == '=') {
      out.push_back({GTok::equals, "=", line});
      ++i;
    } else if (c == '?') {
      out.push_back({GTok::question, "?", line});
      ++i;
    } else if (ident_char(c)) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      out.push_back({GTok::ident, std::string(s.substr(i, j - i)), line});
      i = j;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line);
    }
  }
  out.push_back({GTok::end, "", line});
  return out;
}

struct Item {
  std::string name;
  bool quoted;
  bool optional;
  int line;
};

std::string describe(const GTok& t) {
  return t.kind == GTok::end ? std::string("end of input") : "'" + t.text + "'";
}

}  // namespace

Cfg parse_grammar_text(std::string_view text) {
  std::vector<GTok> toks = lex_grammar(text);
  std::size_t pos = 0;
  auto expect = [&](GTok::Kind k, const char* what) {
    if (toks[pos].kind != k)
      throw ParseError(std::string("expected ") + what + " but found " + describe(toks[pos]),
                       toks[pos].line);
    return toks[pos++];
  };

  Cfg g;
  bool have_axiom = false;
  int axiom_line = 0;
  std::vector<std::pair<std::string, std::vector<Item>>> raw;
  std::vector<std::pair<std::string, int>> feature_decls;

  while (toks[pos].kind != GTok::end) {
    GTok head = expect(GTok::ident, "a declaration");
    if (head.text == "axiom" && toks[pos].kind == GTok::ident) {
      if (have_axiom) throw ParseError("duplicate axiom declaration", head.line);
      g.axiom = toks[pos++].text;
      have_axiom = true;
      axiom_line = head.line;
      expect(GTok::semi, "';'");
    } else if (head.text == "features" && toks[pos].kind == GTok::ident &&
               toks[pos + 1].kind == GTok::equals) {
      std::string sym = toks[pos].text;
      pos += 2;
      std::set<std::string> fs{sym};
      if (toks[pos].kind != GTok::ident)
        throw ParseError("features of '" + sym + "' must be nonempty", toks[pos].line);
      while (toks[pos].kind == GTok::ident) fs.insert(toks[pos++].text);
      expect(GTok::semi, "';'");
      if (g.features.count(sym)) throw ParseError("duplicate features for '" + sym + "'", head.line);
      g.features[sym] = std::move(fs);
      feature_decls.emplace_back(sym, head.line);
    } else {
      expect(GTok::arrow, "'->'");
      std::vector<Item> alt;
      for (;;) {
        const GTok& t = toks[pos];
        if (t.kind == GTok::ident || t.kind == GTok::quoted) {
          ++pos;
          bool opt = false;
          if (toks[pos].kind == GTok::question) {
            opt = true;
            ++pos;
          }
          alt.push_back({t.text, t.kind == GTok::quoted, opt, t.line});
        } else if (t.kind == GTok::bar) {
          ++pos;
          raw.emplace_back(head.text, std::move(alt));
          alt.clear();
        } else if (t.kind == GTok::semi) {
          ++pos;
          raw.emplace_back(head.text, std::move(alt));
          break;
        } else {
          throw ParseError("unexpected " + describe(t) + " in production", t.line);
        }
      }
      if (head.text == kEpsilon) throw ParseError("'eps' is reserved", head.line);
      g.nonterminals.insert(head.text);
    }
  }
  if (!have_axiom) throw ParseError("missing axiom declaration", 0);
  if (!g.nonterminals.count(g.axiom))
    throw ParseError("axiom '" + g.axiom + "' has no production", axiom_line);

  for (auto& [lhs, items] : raw) {
    for (const Item& it : items) {
      if (it.name == kEpsilon)
        throw ParseError("'eps' is reserved; write an empty alternative instead", it.line);
      if (it.quoted) {
        if (g.nonterminals.count(it.name))
          throw ParseError("terminal '" + it.name + "' is also a nonterminal", it.line);
        g.terminals.insert(it.name);
      } else if (!g.nonterminals.count(it.name)) {
        throw ParseError("symbol '" + it.name + "' is neither quoted nor defined", it.line);
      }
    }
    // expand optional slots into every combination, keeping all-present first
    std::vector<std::size_t> opt;
    for (std::size_t k = 0; k < items.size(); ++k)
      if (items[k].optional) opt.push_back(k);
    for (std::size_t mask = 0; mask < (std::size_t{1} << opt.size()); ++mask) {
      Production p{lhs, {}};
      std::size_t o = 0;
      for (std::size_t k = 0; k < items.size(); ++k) {
        if (items[k].optional) {
          bool drop = (mask >> (opt.size() - 1 - o)) & 1U;
          ++o;
          if (drop) continue;
        }
        p.rhs.push_back(items[k].name);
      }
      if (std::find(g.productions.begin(), g.productions.end(), p) == g.productions.end())
        g.productions.push_back(std::move(p));
    }
  }
  for (const auto& [sym, line] : feature_decls)
    if (!g.nonterminals.count(sym) && !g.terminals.count(sym))
      throw ParseError("features declared for unknown symbol '" + sym + "'", line);
  return g;
}

namespace {

std::string quote_terminal(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string print_grammar(const Cfg& g) {
  std::string out = "axiom " + g.axiom + " ;\n";
  for (const auto& [sym, fs] : g.features) {
    out += "features " + sym + " =";
    for (const auto& f : fs) out += " " + f;
    out += " ;\n";
  }
  for (const auto& p : g.productions) {
    out += p.lhs + " ->";
    for (const auto& x : p.rhs) out += " " + (g.is_terminal(x) ? quote_terminal(x) : x);
    out += " ;\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Analyses

std::set<std::string> nullable_nonterminals(const Cfg& g) {
  std::set<std::string> nullable;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions) {
      if (nullable.count(p.lhs)) continue;
      if (std::all_of(p.rhs.begin(), p.rhs.end(),
                      [&](const std::string& x) { return nullable.count(x) > 0; })) {
        nullable.insert(p.lhs);
        changed = true;
      }
    }
  }
  return nullable;
}

bool check_acyclic(const Cfg& g) {
  std::set<std::string> nullable = nullable_nonterminals(g);
  std::map<std::string, std::set<std::string>> edges;
  for (const auto& p : g.productions) {
    for (std::size_t k = 0; k < p.rhs.size(); ++k) {
      if (!g.is_nonterminal(p.rhs[k])) continue;
      bool ctx = true;
      for (std::size_t m = 0; m < p.rhs.size() && ctx; ++m)
        if (m != k && !nullable.count(p.rhs[m])) ctx = false;
      if (ctx) edges[p.lhs].insert(p.rhs[k]);
    }
  }
  // colour-marking DFS for cycle detection
  std::map<std::string, int> colour;
  std::function<bool(const std::string&)> cyclic = [&](const std::string& a) {
    colour[a] = 1;
    for (const auto& b : edges[a]) {
      int c = colour[b];
      if (c == 1 || (c == 0 && cyclic(b))) return true;
    }
    colour[a] = 2;
    return false;
  };
  for (const auto& a : g.nonterminals)
    if (colour[a] == 0 && cyclic(a)) return false;
  return true;
}

bool check_epsilon_free(const Cfg& g) {
  return std::none_of(g.productions.begin(), g.productions.end(),
                      [](const Production& p) { return p.rhs.empty(); });
}

std::size_t max_rhs_length(const Cfg& g) {
  std::size_t m = 0;
  for (const auto& p : g.productions) m = std::max(m, p.rhs.size());
  return m;
}

// ---------------------------------------------------------------------------
// Binarization

BinarizedCfg binarize(const Cfg& g) {
  BinarizedCfg b;
  b.base = g;
  b.grammar.axiom = g.axiom;
  b.grammar.nonterminals = g.nonterminals;
  b.grammar.terminals = g.terminals;
  b.grammar.features = g.features;

  std::set<std::string> taken = g.nonterminals;
  taken.insert(g.terminals.begin(), g.terminals.end());
  std::map<std::string, int> counter;
  auto fresh = [&](const std::string& lhs) {
    std::string name;
    do {
      name = lhs + "~" + std::to_string(++counter[lhs]);
    } while (taken.count(name));
    taken.insert(name);
    return name;
  };

  for (std::size_t k = 0; k < g.productions.size(); ++k) {
    const Production& p = g.productions[k];
    if (p.rhs.size() <= 2) {
      b.grammar.productions.push_back(p);
      b.origin.push_back(k);
      continue;
    }
    std::string lhs = p.lhs;
    for (std::size_t i = 0; i + 2 < p.rhs.size(); ++i) {
      std::string a = fresh(p.lhs);
      b.aux.insert(a);
      b.grammar.nonterminals.insert(a);
      b.grammar.features[a] = {kAuxFeature};
      b.grammar.productions.push_back({lhs, {p.rhs[i], a}});
      b.origin.push_back(k);
      lhs = a;
    }
    b.grammar.productions.push_back({lhs, {p.rhs[p.rhs.size() - 2], p.rhs.back()}});
    b.origin.push_back(k);
  }
  return b;
}

namespace {

pdl::Substitution aux_substitution(bool identity) {
  using namespace pdl;
  Substitution s;
  if (identity) return s;
  NodeFormula aux = atom(kAuxFeature);
  s.down = seq(seq(down(), star(seq(test(aux), down()))), test(neg(aux)));
  s.right = choice(seq(right(), test(neg(aux))),
                   seq(seq(seq(right(), test(aux)), down()), test(first_macro())));
  return s;
}

}  // namespace

pdl::NodeFormula BinarizedCfg::transport(const pdl::NodeFormula& f) const {
  return pdl::substitute(f, aux_substitution(aux.empty()));
}

pdl::PathFormula BinarizedCfg::transport(const pdl::PathFormula& p) const {
  return pdl::substitute(p, aux_substitution(aux.empty()));
}

Tree erase_aux(const Tree& t, const std::set<std::string>& aux) {
  Tree out(t.label);
  std::function<void(const Tree&)> splice = [&](const Tree& c) {
    if (aux.count(c.label)) {
      for (const auto& cc : c.children) splice(cc);
    } else {
      out.children.push_back(erase_aux(c, aux));
    }
  };
  for (const auto& c : t.children) splice(c);
  return out;
}

// ---------------------------------------------------------------------------
// Local-language encoding

pdl::NodeFormula grammar_to_pdl(const Cfg& g) {
  using namespace pdl;
  std::vector<NodeFormula> leaf_labels;
  for (const auto& a : g.terminals) leaf_labels.push_back(atom(a));
  leaf_labels.push_back(atom(kEpsilon));

  auto sibling_path = [&](const std::vector<std::string>& alpha) {
    if (alpha.empty()) return seq(test(atom(kEpsilon)), test(last_macro()));
    PathFormula p = seq(test(atom(alpha.back())), test(last_macro()));
    for (std::size_t k = alpha.size() - 1; k-- > 0;)
      p = seq(seq(test(atom(alpha[k])), right()), p);
    return p;
  };

  std::vector<NodeFormula> prods;
  for (const auto& a : g.nonterminals) {
    std::vector<NodeFormula> alts;
    for (const auto& p : g.productions)
      if (p.lhs == a) alts.push_back(diamond(seq(firstchild_macro(), sibling_path(p.rhs)), top()));
    prods.push_back(implies(atom(a), disj_all(alts)));
  }
  NodeFormula body = conj(iff(leaf_macro(), disj_all(leaf_labels)), conj_all(prods));
  return conj(atom(g.axiom), box(star(down()), body));
}

}  // namespace pfmc
