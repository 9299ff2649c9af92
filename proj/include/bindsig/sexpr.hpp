#pragma once

#include <sstream>
#include <string>

#include "bindsig/term.hpp"

namespace bindsig {

// Term serialization, s-expression style:
//   terms:   (var <i>)  (bnd <k>)  (nested <arg>)  (op <name> <arg>)
//   args:    <term>  ()  (tuple <arg>...)  (scope <arg>)  (outer <arg>)
//            (variant <tag> <arg>)
// The printer emits canonical single-space whitespace; the parser accepts
// arbitrary whitespace. Round-trip is exact on printer output.

inline void print_term_to(const Term& t, std::ostream& os);

inline void print_arg_to(const Arg& v, std::ostream& os) {
  switch (v.kind()) {
    case Arg::Kind::term:
      print_term_to(v.term_value(), os);
      return;
    case Arg::Kind::unit:
      os << "()";
      return;
    case Arg::Kind::tuple:
      os << "(tuple";
      for (const Arg& item : v.items()) {
        os << ' ';
        print_arg_to(item, os);
      }
      os << ')';
      return;
    case Arg::Kind::scope:
      os << "(scope ";
      print_arg_to(v.body(), os);
      os << ')';
      return;
    case Arg::Kind::outer:
      os << "(outer ";
      print_arg_to(v.body(), os);
      os << ')';
      return;
    case Arg::Kind::variant:
      os << "(variant " << v.tag() << ' ';
      print_arg_to(v.body(), os);
      os << ')';
      return;
  }
}

inline void print_term_to(const Term& t, std::ostream& os) {
  if (t.is_var()) {
    const Payload& p = t.payload();
    switch (p.kind()) {
      case Payload::Kind::free:
        os << "(var " << p.index() << ')';
        return;
      case Payload::Kind::bound:
        os << "(bnd " << p.index() << ')';
        return;
      case Payload::Kind::nested:
        os << "(nested ";
        print_arg_to(p.value(), os);
        os << ')';
        return;
    }
  }
  os << "(op " << t.op_name() << ' ';
  print_arg_to(t.op_arg(), os);
  os << ')';
}

inline std::string print_term(const Term& t) {
  std::ostringstream os;
  print_term_to(t, os);
  return os.str();
}

inline std::string print_arg(const Arg& v) {
  std::ostringstream os;
  print_arg_to(v, os);
  return os.str();
}

namespace detail {

// Nested payload arities are not serialized: the term format is read
// against a signature, and the parser re-derives every nested tag from the
// governing op arity. Parsing is shape-directed, with a stack of open
// composition boundaries: a (nested ...) payload is tagged by the innermost
// boundary and its value is parsed one boundary down.
class TermParser {
 public:
  TermParser(const std::string& text, const Signature& sig) : s_(text), sig_(sig) {}

  Term parse_term() {
    expect('(');
    std::string head = symbol();
    if (head == "var") {
      int i = nat();
      expect(')');
      return Term::var(i);
    }
    if (head == "bnd") {
      int k = nat();
      expect(')');
      return Term::bound(k);
    }
    if (head == "nested") {
      if (boundaries_.empty()) fail("nested payload outside a composition boundary");
      Arity inner = boundaries_.back();
      boundaries_.pop_back();
      Arg v = parse_arg(inner);
      boundaries_.push_back(inner);
      expect(')');
      return Term::var(Payload::nested(std::move(v), std::move(inner)));
    }
    if (head == "op") {
      std::string name = symbol();
      const Arity* a = sig_.find(name);
      if (!a) fail("unknown op: " + name);
      Arg v = parse_arg(*a);
      expect(')');
      return Term::op(std::move(name), std::move(v));
    }
    fail("unknown term form: " + head);
  }

  Arg parse_arg(const Arity& shape) {
    switch (shape.kind()) {
      case Arity::Kind::term:
        return Arg::term(parse_term());
      case Arity::Kind::one:
        expect('(');
        expect(')');
        return Arg::unit();
      case Arity::Kind::product: {
        expect('(');
        if (symbol() != "tuple") fail("expected (tuple ...)");
        std::vector<Arg> items;
        items.reserve(shape.children().size());
        for (const Arity& f : shape.children()) items.push_back(parse_arg(f));
        expect(')');
        return Arg::tuple(std::move(items));
      }
      case Arity::Kind::derivative: {
        expect('(');
        if (symbol() != "scope") fail("expected (scope ...)");
        Arg body = parse_arg(shape.inner());
        expect(')');
        return Arg::scope(std::move(body));
      }
      case Arity::Kind::compose: {
        expect('(');
        if (symbol() != "outer") fail("expected (outer ...)");
        boundaries_.push_back(shape.compose_inner());
        Arg body = parse_arg(shape.compose_outer());
        boundaries_.pop_back();
        expect(')');
        return Arg::outer(std::move(body));
      }
      case Arity::Kind::sum: {
        expect('(');
        if (symbol() != "variant") fail("expected (variant ...)");
        std::string tag = symbol();
        int idx = shape.find_variant(tag);
        if (idx < 0) fail("unknown variant tag: " + tag);
        Arg body = parse_arg(shape.children()[static_cast<std::size_t>(idx)]);
        expect(')');
        return Arg::variant(std::move(tag), std::move(body));
      }
    }
    fail("unreachable shape");
  }

  void finish() {
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
  }

 private:
  [[noreturn]] void fail(const std::string& what) { throw ParseError(what, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() &&
           (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r'))
      ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c)
      fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string symbol() {
    skip_ws();
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '(' && s_[pos_] != ')' && s_[pos_] != ' ' &&
           s_[pos_] != '\t' && s_[pos_] != '\n' && s_[pos_] != '\r')
      out += s_[pos_++];
    if (out.empty()) fail("expected a symbol");
    return out;
  }

  int nat() {
    std::string sym = symbol();
    if (sym.empty() || sym.find_first_not_of("0123456789") != std::string::npos)
      fail("expected a number, got: " + sym);
    long v = std::stol(sym);
    if (v > 1000000000L) fail("number too large");
    return static_cast<int>(v);
  }

  const std::string& s_;
  const Signature& sig_;
  std::size_t pos_ = 0;
  std::vector<Arity> boundaries_;
};

}  // namespace detail

// Parses a term against a signature (op arities direct the argument shapes).
inline Term parse_term(const std::string& text, const Signature& sig) {
  detail::TermParser p(text, sig);
  Term t = p.parse_term();
  p.finish();
  return t;
}

}  // namespace bindsig
