#include "pfmc/tree.hpp"

#include <algorithm>
#include <cctype>

#include "pfmc/error.hpp"

namespace pfmc {

std::size_t Tree::size() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

std::size_t Tree::depth() const {
  std::size_t d = 0;
  for (const auto& c : children) d = std::max(d, c.depth());
  return d + 1;
}

namespace {

void write_sexpr(const Tree& t, std::string& out) {
  if (t.children.empty()) {
    out += t.label;
    return;
  }
  out += '(';
  out += t.label;
  for (const auto& c : t.children) {
    out += ' ';
    write_sexpr(c, out);
  }
  out += ')';
}

class SexprReader {
 public:
  explicit SexprReader(std::string_view s) : s_(s) {}

  Tree read_all() {
    Tree t = read();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input after tree");
    return t;
  }

 private:
  Tree read() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of tree");
    if (s_[pos_] == ')') fail("unexpected ')'");
    if (s_[pos_] != '(') return Tree(atom());
    ++pos_;
    Tree t(atom());
    for (;;) {
      skip_ws();
      if (pos_ >= s_.size()) fail("unterminated '('");
      if (s_[pos_] == ')') {
        ++pos_;
        break;
      }
      t.children.push_back(read());
    }
    return t;
  }

  std::string atom() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) &&
           s_[pos_] != '(' && s_[pos_] != ')')
      ++pos_;
    if (start == pos_) fail("expected a label");
    return std::string(s_.substr(start, pos_ - start));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg + " at offset " + std::to_string(pos_), 0);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

void collect_yield(const Tree& t, std::vector<std::string>& out) {
  if (t.children.empty()) {
    if (t.label != kEpsilon) out.push_back(t.label);
    return;
  }
  for (const auto& c : t.children) collect_yield(c, out);
}

}  // namespace

std::string to_sexpr(const Tree& t) {
  std::string out;
  write_sexpr(t, out);
  return out;
}

Tree parse_sexpr(std::string_view text) { return SexprReader(text).read_all(); }

std::vector<std::string> tree_yield(const Tree& t) {
  std::vector<std::string> out;
  collect_yield(t, out);
  return out;
}

bool Labeling::holds(const std::string& label, const std::string& prop) const {
  auto it = table_.find(label);
  if (it == table_.end()) return label == prop;
  return it->second.count(prop) > 0;
}

std::set<std::string> Labeling::props(const std::string& label) const {
  auto it = table_.find(label);
  if (it == table_.end()) return {label};
  return it->second;
}

}  // namespace pfmc
