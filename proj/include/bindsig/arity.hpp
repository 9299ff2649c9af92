#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bindsig {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// An arity expression. Values are immutable and canonical by construction:
// a product with no factors is the terminal arity, and a product with a
// single factor is that factor itself (there is no surface syntax for a
// one-element product, so canonical forms round-trip through the printer).
class Arity {
 public:
  enum class Kind { term, one, product, derivative, compose, sum };

  Arity() : node_(term().node_) {}

  static Arity term() {
    static const Arity t{std::make_shared<const Node>(Node{Kind::term, {}, {}})};
    return t;
  }

  static Arity one() {
    static const Arity u{std::make_shared<const Node>(Node{Kind::one, {}, {}})};
    return u;
  }

  static Arity product(std::vector<Arity> factors) {
    if (factors.empty()) return one();
    if (factors.size() == 1) return factors.front();
    return Arity{std::make_shared<const Node>(Node{Kind::product, std::move(factors), {}})};
  }

  static Arity derivative(Arity inner) {
    return Arity{std::make_shared<const Node>(Node{Kind::derivative, {std::move(inner)}, {}})};
  }

  static Arity compose(Arity outer, Arity inner) {
    return Arity{
        std::make_shared<const Node>(Node{Kind::compose, {std::move(outer), std::move(inner)}, {}})};
  }

  static Arity sum(std::vector<std::pair<std::string, Arity>> variants) {
    if (variants.empty()) throw std::invalid_argument("sum arity needs at least one variant");
    std::vector<Arity> kids;
    std::vector<std::string> tags;
    std::set<std::string> seen;
    for (auto& [tag, a] : variants) {
      if (!seen.insert(tag).second)
        throw std::invalid_argument("duplicate sum variant tag: " + tag);
      tags.push_back(tag);
      kids.push_back(std::move(a));
    }
    return Arity{std::make_shared<const Node>(Node{Kind::sum, std::move(kids), std::move(tags)})};
  }

  Kind kind() const { return node_->kind; }
  bool is(Kind k) const { return node_->kind == k; }

  // product factors, sum variant bodies
  const std::vector<Arity>& children() const { return node_->children; }
  // derivative body
  const Arity& inner() const { return node_->children.front(); }
  // compose components
  const Arity& compose_outer() const { return node_->children[0]; }
  const Arity& compose_inner() const { return node_->children[1]; }
  const std::vector<std::string>& tags() const { return node_->tags; }

  int find_variant(const std::string& tag) const {
    for (std::size_t i = 0; i < node_->tags.size(); ++i)
      if (node_->tags[i] == tag) return static_cast<int>(i);
    return -1;
  }

  friend bool operator==(const Arity& a, const Arity& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    if (a.node_->tags != b.node_->tags) return false;
    if (a.node_->children.size() != b.node_->children.size()) return false;
    for (std::size_t i = 0; i < a.node_->children.size(); ++i)
      if (!(a.node_->children[i] == b.node_->children[i])) return false;
    return true;
  }
  friend bool operator!=(const Arity& a, const Arity& b) { return !(a == b); }

 private:
  struct Node {
    Kind kind;
    std::vector<Arity> children;
    std::vector<std::string> tags;  // sum only, parallel to children
  };

  explicit Arity(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// n-fold derivative; derive_n(a, 0) is a itself.
inline Arity derive_n(Arity a, int n) {
  for (int i = 0; i < n; ++i) a = Arity::derivative(std::move(a));
  return a;
}

// The arity of an operation taking, for each s[i], one argument under s[i]
// binders. The empty list gives the arity of constants.
inline Arity algebraic(const std::vector<int>& binder_counts) {
  std::vector<Arity> factors;
  factors.reserve(binder_counts.size());
  for (int s : binder_counts) factors.push_back(derive_n(Arity::term(), s));
  return Arity::product(std::move(factors));
}

// True iff the arity is a (possibly empty) product of iterated derivatives
// of the term arity: no compositions, no sums, and every derivative chain
// bottoms out at the term arity.
inline bool is_algebraic(const Arity& a) {
  switch (a.kind()) {
    case Arity::Kind::term:
    case Arity::Kind::one:
      return true;
    case Arity::Kind::product: {
      for (const Arity& f : a.children())
        if (!is_algebraic(f)) return false;
      return true;
    }
    case Arity::Kind::derivative: {
      const Arity* p = &a;
      while (p->is(Arity::Kind::derivative)) p = &p->inner();
      return p->is(Arity::Kind::term);
    }
    case Arity::Kind::compose:
    case Arity::Kind::sum:
      return false;
  }
  return false;
}

// All distinct sub-arities of a (including a itself), in first-occurrence
// order. Law checks run shape-indexed properties over this set.
inline void collect_shapes(const Arity& a, std::vector<Arity>& out) {
  for (const Arity& seen : out)
    if (seen == a) return;
  out.push_back(a);
  for (const Arity& c : a.children()) collect_shapes(c, out);
}

namespace detail {

// Grammar, loosest to tightest:
//   sum      := variant ('+' variant)*
//   variant  := [tag ':'] product          tag: identifier or number
//   product  := compose ('*' compose)*     flattened, n-ary
//   compose  := postfix ['.' compose]      right associative
//   postfix  := atom '\''*
//   atom     := 'T' ['^' '(' nat,* ')'] | '1' | '(' sum ')'
// A sum parsed from bare 'a + b' gets positional tags "0", "1", ...
class ArityParser {
 public:
  explicit ArityParser(const std::string& text) : s_(text) {}

  Arity parse() {
    Arity a = parse_sum();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return a;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  static bool tag_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-';
  }

  // Lookahead for "tag :" without consuming on failure.
  bool try_tag(std::string& tag) {
    skip_ws();
    std::size_t p = pos_;
    std::string t;
    while (p < s_.size() && tag_char(s_[p])) t += s_[p++];
    if (t.empty() || t == "T" || t == "1") return false;
    while (p < s_.size() && (s_[p] == ' ' || s_[p] == '\t')) ++p;
    if (p >= s_.size() || s_[p] != ':') return false;
    tag = t;
    pos_ = p + 1;
    return true;
  }

  Arity parse_sum() {
    std::vector<std::pair<std::string, Arity>> variants;
    bool any_tagged = false;
    for (;;) {
      std::string tag;
      if (try_tag(tag))
        any_tagged = true;
      else
        tag = std::to_string(variants.size());
      variants.emplace_back(std::move(tag), parse_product());
      if (!eat('+')) break;
    }
    if (variants.size() == 1 && !any_tagged) return std::move(variants.front().second);
    std::size_t where = pos_;
    try {
      return Arity::sum(std::move(variants));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), where);
    }
  }

  Arity parse_product() {
    std::vector<Arity> factors;
    factors.push_back(parse_compose());
    while (eat('*')) factors.push_back(parse_compose());
    return Arity::product(std::move(factors));
  }

  Arity parse_compose() {
    Arity left = parse_postfix();
    if (eat('.')) return Arity::compose(std::move(left), parse_compose());
    return left;
  }

  Arity parse_postfix() {
    Arity a = parse_atom();
    while (eat('\'')) a = Arity::derivative(std::move(a));
    return a;
  }

  int parse_nat() {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] < '0' || s_[pos_] > '9') fail("expected a number");
    long v = 0;
    while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') {
      v = v * 10 + (s_[pos_] - '0');
      if (v > 1000000) fail("number too large");
      ++pos_;
    }
    return static_cast<int>(v);
  }

  Arity parse_atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == 'T') {
      ++pos_;
      if (eat('^')) {
        if (!eat('(')) fail("expected '(' after '^'");
        std::vector<int> s;
        if (peek() != ')') {
          s.push_back(parse_nat());
          while (eat(',')) s.push_back(parse_nat());
        }
        if (!eat(')')) fail("expected ')'");
        return algebraic(s);
      }
      return Arity::term();
    }
    if (c == '1') {
      ++pos_;
      return Arity::one();
    }
    if (c == '(') {
      ++pos_;
      Arity a = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return a;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

enum class PrintLevel { sum = 0, product = 1, compose = 2, postfix = 3 };

inline void print_arity_at(const Arity& a, PrintLevel min_level, std::ostream& os);

inline bool sum_tags_positional(const Arity& a) {
  for (std::size_t i = 0; i < a.tags().size(); ++i)
    if (a.tags()[i] != std::to_string(i)) return false;
  return true;
}

inline void print_arity_at(const Arity& a, PrintLevel min_level, std::ostream& os) {
  auto paren = [&](PrintLevel own, auto&& body) {
    bool need = static_cast<int>(own) < static_cast<int>(min_level);
    if (need) os << '(';
    body();
    if (need) os << ')';
  };
  switch (a.kind()) {
    case Arity::Kind::term:
      os << 'T';
      return;
    case Arity::Kind::one:
      os << '1';
      return;
    case Arity::Kind::product:
      paren(PrintLevel::product, [&] {
        for (std::size_t i = 0; i < a.children().size(); ++i) {
          if (i) os << " * ";
          print_arity_at(a.children()[i], PrintLevel::compose, os);
        }
      });
      return;
    case Arity::Kind::derivative:
      // postfix binds tightest; composite bodies need parentheses
      print_arity_at(a.inner(), PrintLevel::postfix, os);
      os << '\'';
      return;
    case Arity::Kind::compose:
      paren(PrintLevel::compose, [&] {
        // right associative: the left operand may not itself be a bare compose
        print_arity_at(a.compose_outer(), PrintLevel::postfix, os);
        os << " . ";
        print_arity_at(a.compose_inner(), PrintLevel::compose, os);
      });
      return;
    case Arity::Kind::sum:
      paren(PrintLevel::sum, [&] {
        bool positional = sum_tags_positional(a);
        for (std::size_t i = 0; i < a.children().size(); ++i) {
          if (i) os << " + ";
          if (!positional) os << a.tags()[i] << ": ";
          print_arity_at(a.children()[i], PrintLevel::product, os);
        }
      });
      return;
  }
}

}  // namespace detail

inline Arity parse_arity(const std::string& text) { return detail::ArityParser(text).parse(); }

inline std::string print_arity(const Arity& a) {
  std::ostringstream os;
  detail::print_arity_at(a, detail::PrintLevel::sum, os);
  return os.str();
}

}  // namespace bindsig
