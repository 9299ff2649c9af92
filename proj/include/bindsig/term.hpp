#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bindsig/arity.hpp"
#include "bindsig/signature.hpp"

namespace bindsig {

class TermError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ShapeError : public TermError {
 public:
  using TermError::TermError;
};
class ContextError : public TermError {
 public:
  using TermError::TermError;
};

class Term;
class Arg;

// A variable payload. `free` indexes the ambient context, `bound` counts
// enclosing binder scopes (0 = innermost); the two namespaces are disjoint,
// so entering a scope never reindexes free variables. `nested` carries an
// inner argument value at a composition boundary; such payloads are the
// context references of the enclosing outer structure.
class Payload {
 public:
  enum class Kind { free, bound, nested };

  static Payload free_index(int i);
  static Payload bound_level(int k);
  static Payload nested(Arg value, Arity shape);

  Kind kind() const { return kind_; }
  bool is(Kind k) const { return kind_ == k; }
  int index() const { return index_; }
  const Arg& value() const;
  const Arity& shape() const { return shape_; }

  friend bool operator==(const Payload& a, const Payload& b);
  friend bool operator!=(const Payload& a, const Payload& b) { return !(a == b); }

 private:
  Payload() = default;
  Kind kind_ = Kind::free;
  int index_ = 0;
  std::shared_ptr<const Arg> value_;
  Arity shape_;
};

// A term of the syntax generated by a signature: a variable or an operation
// node whose argument value is shaped by the operation's arity.
class Term {
 public:
  enum class Kind { var, op };

  Term() = default;

  static Term var(Payload p);
  static Term var(int free_index) { return var(Payload::free_index(free_index)); }
  static Term bound(int level) { return var(Payload::bound_level(level)); }
  static Term op(std::string name, Arg arg);

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;
  bool is_var() const { return kind() == Kind::var; }
  const Payload& payload() const;
  const std::string& op_name() const;
  const Arg& op_arg() const;

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// An argument value, shaped constructor-by-constructor by an arity:
// term ~ T, unit ~ 1, tuple ~ product, scope ~ derivative (opens one bound
// level), outer ~ composition (holds the outer-shape value whose context
// references are nested payloads), variant ~ sum.
class Arg {
 public:
  enum class Kind { term, unit, tuple, scope, outer, variant };

  Arg() = default;

  static Arg term(Term t);
  static Arg unit();
  static Arg tuple(std::vector<Arg> items);
  static Arg scope(Arg body);
  static Arg outer(Arg outer_value);
  static Arg variant(std::string tag, Arg body);

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;
  bool is(Kind k) const { return kind() == k; }
  const Term& term_value() const;
  const std::vector<Arg>& items() const;
  const Arg& body() const;  // scope body, outer value, variant body
  const std::string& tag() const;

  friend bool operator==(const Arg& a, const Arg& b);
  friend bool operator!=(const Arg& a, const Arg& b) { return !(a == b); }

 private:
  struct Node;
  explicit Arg(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Term::Node {
  Kind kind;
  Payload payload;  // var
  std::string op_name;
  Arg arg;  // op
};

struct Arg::Node {
  Kind kind;
  Term term;
  std::vector<Arg> items;  // tuple items; scope/outer/variant body at [0]
  std::string tag;
};

// --- payload ----------------------------------------------------------------

inline Payload Payload::free_index(int i) {
  Payload p;
  p.kind_ = Kind::free;
  p.index_ = i;
  return p;
}

inline Payload Payload::bound_level(int k) {
  Payload p;
  p.kind_ = Kind::bound;
  p.index_ = k;
  return p;
}

inline Payload Payload::nested(Arg value, Arity shape) {
  Payload p;
  p.kind_ = Kind::nested;
  p.value_ = std::make_shared<const Arg>(std::move(value));
  p.shape_ = std::move(shape);
  return p;
}

inline const Arg& Payload::value() const {
  if (!value_) throw TermError("payload has no nested value");
  return *value_;
}

inline bool operator==(const Payload& a, const Payload& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Payload::Kind::free:
    case Payload::Kind::bound:
      return a.index_ == b.index_;
    case Payload::Kind::nested:
      return a.shape_ == b.shape_ && *a.value_ == *b.value_;
  }
  return false;
}

// --- term -------------------------------------------------------------------

inline Term Term::var(Payload p) {
  return Term(std::make_shared<const Node>(Node{Kind::var, std::move(p), {}, {}}));
}

inline Term Term::op(std::string name, Arg arg) {
  return Term(
      std::make_shared<const Node>(Node{Kind::op, Payload::free_index(0), std::move(name), std::move(arg)}));
}

inline Term::Kind Term::kind() const {
  if (!node_) throw TermError("empty term handle");
  return node_->kind;
}

inline const Payload& Term::payload() const {
  if (kind() != Kind::var) throw TermError("not a variable");
  return node_->payload;
}

inline const std::string& Term::op_name() const {
  if (kind() != Kind::op) throw TermError("not an op node");
  return node_->op_name;
}

inline const Arg& Term::op_arg() const {
  if (kind() != Kind::op) throw TermError("not an op node");
  return node_->arg;
}

inline bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.node_->kind != b.node_->kind) return false;
  if (a.node_->kind == Term::Kind::var) return a.node_->payload == b.node_->payload;
  return a.node_->op_name == b.node_->op_name && a.node_->arg == b.node_->arg;
}

// --- arg --------------------------------------------------------------------

inline Arg Arg::term(Term t) {
  return Arg(std::make_shared<const Node>(Node{Kind::term, std::move(t), {}, {}}));
}

inline Arg Arg::unit() {
  static const Arg u{std::make_shared<const Node>(Node{Kind::unit, {}, {}, {}})};
  return u;
}

inline Arg Arg::tuple(std::vector<Arg> items) {
  return Arg(std::make_shared<const Node>(Node{Kind::tuple, {}, std::move(items), {}}));
}

inline Arg Arg::scope(Arg body) {
  return Arg(std::make_shared<const Node>(Node{Kind::scope, {}, {std::move(body)}, {}}));
}

inline Arg Arg::outer(Arg outer_value) {
  return Arg(std::make_shared<const Node>(Node{Kind::outer, {}, {std::move(outer_value)}, {}}));
}

inline Arg Arg::variant(std::string tag, Arg body) {
  return Arg(std::make_shared<const Node>(Node{Kind::variant, {}, {std::move(body)}, std::move(tag)}));
}

inline Arg::Kind Arg::kind() const {
  if (!node_) throw TermError("empty arg handle");
  return node_->kind;
}

inline const Term& Arg::term_value() const {
  if (kind() != Kind::term) throw ShapeError("arg is not term-shaped");
  return node_->term;
}

inline const std::vector<Arg>& Arg::items() const {
  if (kind() != Kind::tuple) throw ShapeError("arg is not a tuple");
  return node_->items;
}

inline const Arg& Arg::body() const {
  Kind k = kind();
  if (k != Kind::scope && k != Kind::outer && k != Kind::variant)
    throw ShapeError("arg has no body");
  return node_->items.front();
}

inline const std::string& Arg::tag() const {
  if (kind() != Kind::variant) throw ShapeError("arg is not a variant");
  return node_->tag;
}

inline bool operator==(const Arg& a, const Arg& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.node_->kind != b.node_->kind) return false;
  switch (a.node_->kind) {
    case Arg::Kind::term:
      return a.node_->term == b.node_->term;
    case Arg::Kind::unit:
      return true;
    case Arg::Kind::variant:
      if (a.node_->tag != b.node_->tag) return false;
      [[fallthrough]];
    case Arg::Kind::tuple:
    case Arg::Kind::scope:
    case Arg::Kind::outer:
      if (a.node_->items.size() != b.node_->items.size()) return false;
      for (std::size_t i = 0; i < a.node_->items.size(); ++i)
        if (!(a.node_->items[i] == b.node_->items[i])) return false;
      return true;
  }
  return false;
}

// --- depth ------------------------------------------------------------------
//
// Depth counts operation nodes: variables are depth 0, an op node is one
// deeper than its deepest argument, and the argument constructors are
// transparent. Terms inside nested payloads count.

inline int depth(const Term& t);

inline int depth_arg(const Arg& v) {
  switch (v.kind()) {
    case Arg::Kind::term:
      return depth(v.term_value());
    case Arg::Kind::unit:
      return 0;
    case Arg::Kind::tuple: {
      int d = 0;
      for (const Arg& item : v.items()) d = std::max(d, depth_arg(item));
      return d;
    }
    case Arg::Kind::scope:
    case Arg::Kind::outer:
    case Arg::Kind::variant:
      return depth_arg(v.body());
  }
  return 0;
}

inline int depth(const Term& t) {
  if (t.is_var()) {
    const Payload& p = t.payload();
    return p.is(Payload::Kind::nested) ? depth_arg(p.value()) : 0;
  }
  return 1 + depth_arg(t.op_arg());
}

// --- well-formedness --------------------------------------------------------
//
// A scope context is either a root context (n free indices, d bound levels)
// or sits behind a composition boundary: free indices are then illegal and
// context references are nested payloads whose values live in the context
// under the boundary.

class ScopeCtx {
 public:
  static ScopeCtx root(int free_count) {
    ScopeCtx c;
    c.free_ = free_count;
    return c;
  }

  ScopeCtx pushed() const {
    ScopeCtx c = *this;
    c.depth_ += 1;
    return c;
  }

  static ScopeCtx boundary(Arity inner, const ScopeCtx& under) {
    ScopeCtx c;
    c.inner_ = std::move(inner);
    c.under_ = std::make_shared<const ScopeCtx>(under);
    return c;
  }

  int free_count() const { return free_; }
  int bound_depth() const { return depth_; }
  bool behind_boundary() const { return under_ != nullptr; }
  const Arity& inner_shape() const { return inner_; }
  const ScopeCtx& under() const { return *under_; }

  std::string key() const {  // memoization key for counting
    std::string k = std::to_string(free_) + "." + std::to_string(depth_);
    if (under_) k += "[" + print_arity(inner_) + "|" + under_->key() + "]";
    return k;
  }

 private:
  int free_ = 0;
  int depth_ = 0;
  Arity inner_;
  std::shared_ptr<const ScopeCtx> under_;
};

inline bool well_formed_term(const Term& t, const Signature& sig, const ScopeCtx& ctx);

inline bool well_formed_arg(const Arg& v, const Arity& shape, const Signature& sig,
                            const ScopeCtx& ctx) {
  if (!v.valid()) return false;
  switch (shape.kind()) {
    case Arity::Kind::term:
      return v.is(Arg::Kind::term) && well_formed_term(v.term_value(), sig, ctx);
    case Arity::Kind::one:
      return v.is(Arg::Kind::unit);
    case Arity::Kind::product: {
      if (!v.is(Arg::Kind::tuple) || v.items().size() != shape.children().size()) return false;
      for (std::size_t i = 0; i < v.items().size(); ++i)
        if (!well_formed_arg(v.items()[i], shape.children()[i], sig, ctx)) return false;
      return true;
    }
    case Arity::Kind::derivative:
      return v.is(Arg::Kind::scope) && well_formed_arg(v.body(), shape.inner(), sig, ctx.pushed());
    case Arity::Kind::compose:
      return v.is(Arg::Kind::outer) &&
             well_formed_arg(v.body(), shape.compose_outer(), sig,
                             ScopeCtx::boundary(shape.compose_inner(), ctx));
    case Arity::Kind::sum: {
      if (!v.is(Arg::Kind::variant)) return false;
      int idx = shape.find_variant(v.tag());
      if (idx < 0) return false;
      return well_formed_arg(v.body(), shape.children()[static_cast<std::size_t>(idx)], sig, ctx);
    }
  }
  return false;
}

inline bool well_formed_term(const Term& t, const Signature& sig, const ScopeCtx& ctx) {
  if (!t.valid()) return false;
  if (t.is_var()) {
    const Payload& p = t.payload();
    switch (p.kind()) {
      case Payload::Kind::free:
        return !ctx.behind_boundary() && p.index() >= 0 && p.index() < ctx.free_count();
      case Payload::Kind::bound:
        return p.index() >= 0 && p.index() < ctx.bound_depth();
      case Payload::Kind::nested:
        return ctx.behind_boundary() && p.shape() == ctx.inner_shape() &&
               well_formed_arg(p.value(), p.shape(), sig, ctx.under());
    }
    return false;
  }
  const Arity* a = sig.find(t.op_name());
  if (!a) return false;
  return well_formed_arg(t.op_arg(), *a, sig, ctx);
}

inline bool well_formed(const Term& t, const Signature& sig, int context_size) {
  return well_formed_term(t, sig, ScopeCtx::root(context_size));
}

// --- substitution -----------------------------------------------------------

// A total mapping from free indices 0..src-1 to terms well-formed at
// context dst (scope depth 0). Bound levels are untouched by substitution,
// and free indices are never shifted by scope entry, so lifting a
// substitution under a binder reuses the assignments unchanged; the new
// bound level is protected simply because substitution leaves bound
// payloads alone.
class Substitution {
 public:
  Substitution() = default;
  Substitution(std::vector<Term> assignments, int dst)
      : map_(std::move(assignments)), dst_(dst) {}

  static Substitution identity(int n) {
    std::vector<Term> ts;
    ts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ts.push_back(Term::var(i));
    return Substitution(std::move(ts), n);
  }

  int src() const { return static_cast<int>(map_.size()); }
  int dst() const { return dst_; }

  const Term& apply(int i) const {
    if (i < 0 || i >= src()) throw ContextError("substitution index out of range");
    return map_[static_cast<std::size_t>(i)];
  }

  Substitution lifted() const { return *this; }

  friend bool operator==(const Substitution& a, const Substitution& b) {
    return a.dst_ == b.dst_ && a.map_ == b.map_;
  }

 private:
  std::vector<Term> map_;
  int dst_ = 0;
};

inline Substitution lift(const Substitution& s) { return s.lifted(); }

// Kleisli composition: (f ; g)(i) = bind(f(i), g).
Substitution compose_substitutions(const Substitution& f, const Substitution& g,
                                   const Signature& sig);

// --- the generic context-reference traversal --------------------------------
//
// map_refs rewrites every payload that references the current context
// (free payloads at a root context, nested payloads behind a boundary)
// through `f`, leaving bound payloads alone. Entering a binder scope
// changes nothing; entering a composition boundary redirects the traversal
// into the nested payload values, which is where references to the
// current context live.

using RefMap = std::function<Term(const Payload&)>;

inline Term map_refs(const Term& t, const Signature& sig, const RefMap& f);

inline Arg map_refs_arg(const Arg& v, const Arity& shape, const Signature& sig, const RefMap& f) {
  switch (shape.kind()) {
    case Arity::Kind::term:
      return Arg::term(map_refs(v.term_value(), sig, f));
    case Arity::Kind::one:
      if (!v.is(Arg::Kind::unit)) throw ShapeError("expected unit argument");
      return v;
    case Arity::Kind::product: {
      const std::vector<Arg>& items = v.items();
      if (items.size() != shape.children().size()) throw ShapeError("tuple width mismatch");
      std::vector<Arg> out;
      out.reserve(items.size());
      for (std::size_t i = 0; i < items.size(); ++i)
        out.push_back(map_refs_arg(items[i], shape.children()[i], sig, f));
      return Arg::tuple(std::move(out));
    }
    case Arity::Kind::derivative:
      return Arg::scope(map_refs_arg(v.body(), shape.inner(), sig, f));
    case Arity::Kind::compose: {
      const Arity inner = shape.compose_inner();
      RefMap through = [&sig, &f, inner](const Payload& p) -> Term {
        if (!p.is(Payload::Kind::nested) || !(p.shape() == inner))
          throw ShapeError("composition boundary expects nested payloads of the inner arity");
        return Term::var(Payload::nested(map_refs_arg(p.value(), inner, sig, f), inner));
      };
      return Arg::outer(map_refs_arg(v.body(), shape.compose_outer(), sig, through));
    }
    case Arity::Kind::sum: {
      int idx = shape.find_variant(v.tag());
      if (idx < 0) throw ShapeError("unknown sum variant tag: " + v.tag());
      return Arg::variant(v.tag(),
                          map_refs_arg(v.body(), shape.children()[static_cast<std::size_t>(idx)], sig, f));
    }
  }
  throw ShapeError("unreachable arity kind");
}

inline Term map_refs(const Term& t, const Signature& sig, const RefMap& f) {
  if (t.is_var()) {
    const Payload& p = t.payload();
    if (p.is(Payload::Kind::bound)) return t;
    return f(p);
  }
  const Arity* a = sig.find(t.op_name());
  if (!a) throw TermError("unknown op: " + t.op_name());
  return Term::op(t.op_name(), map_refs_arg(t.op_arg(), *a, sig, f));
}

// --- renaming ---------------------------------------------------------------
//
// Structure-preserving relabeling of context-reference payloads. This is
// the functorial action of the syntax: it never splices, so it is a code
// path independent of bind, and the rename/bind agreement property is a
// real cross-check between the two.

using PayloadMap = std::function<Payload(const Payload&)>;

inline Term map_payloads(const Term& t, const Signature& sig, const PayloadMap& f);

inline Arg map_payloads_arg(const Arg& v, const Arity& shape, const Signature& sig,
                            const PayloadMap& f) {
  switch (shape.kind()) {
    case Arity::Kind::term:
      return Arg::term(map_payloads(v.term_value(), sig, f));
    case Arity::Kind::one:
      if (!v.is(Arg::Kind::unit)) throw ShapeError("expected unit argument");
      return v;
    case Arity::Kind::product: {
      const std::vector<Arg>& items = v.items();
      if (items.size() != shape.children().size()) throw ShapeError("tuple width mismatch");
      std::vector<Arg> out;
      out.reserve(items.size());
      for (std::size_t i = 0; i < items.size(); ++i)
        out.push_back(map_payloads_arg(items[i], shape.children()[i], sig, f));
      return Arg::tuple(std::move(out));
    }
    case Arity::Kind::derivative:
      // bound levels absorb the new variable; f is applied unchanged
      return Arg::scope(map_payloads_arg(v.body(), shape.inner(), sig, f));
    case Arity::Kind::compose: {
      // the outer structure is mapped functorially: f applies inside each
      // nested payload, at the inner arity
      const Arity inner = shape.compose_inner();
      PayloadMap through = [&sig, &f, inner](const Payload& p) -> Payload {
        if (!p.is(Payload::Kind::nested) || !(p.shape() == inner))
          throw ShapeError("composition boundary expects nested payloads of the inner arity");
        return Payload::nested(map_payloads_arg(p.value(), inner, sig, f), inner);
      };
      return Arg::outer(map_payloads_arg(v.body(), shape.compose_outer(), sig, through));
    }
    case Arity::Kind::sum: {
      int idx = shape.find_variant(v.tag());
      if (idx < 0) throw ShapeError("unknown sum variant tag: " + v.tag());
      return Arg::variant(v.tag(), map_payloads_arg(v.body(),
                                                    shape.children()[static_cast<std::size_t>(idx)],
                                                    sig, f));
    }
  }
  throw ShapeError("unreachable arity kind");
}

inline Term map_payloads(const Term& t, const Signature& sig, const PayloadMap& f) {
  if (t.is_var()) {
    const Payload& p = t.payload();
    if (p.is(Payload::Kind::bound)) return t;
    return Term::var(f(p));
  }
  const Arity* a = sig.find(t.op_name());
  if (!a) throw TermError("unknown op: " + t.op_name());
  return Term::op(t.op_name(), map_payloads_arg(t.op_arg(), *a, sig, f));
}

inline Term rename(const Term& t, const Signature& sig, const std::function<int(int)>& f,
                   int dst) {
  PayloadMap relabel = [&f, dst](const Payload& p) -> Payload {
    if (!p.is(Payload::Kind::free)) throw ContextError("nested payload at an ordinary context");
    int to = f(p.index());
    if (to < 0 || to >= dst) throw ContextError("rename maps index out of range");
    return Payload::free_index(to);
  };
  return map_payloads(t, sig, relabel);
}

inline Arg rename_arg(const Arg& v, const Arity& shape, const Signature& sig,
                      const std::function<int(int)>& f, int dst) {
  PayloadMap relabel = [&f, dst](const Payload& p) -> Payload {
    if (!p.is(Payload::Kind::free)) throw ContextError("nested payload at an ordinary context");
    int to = f(p.index());
    if (to < 0 || to >= dst) throw ContextError("rename maps index out of range");
    return Payload::free_index(to);
  };
  return map_payloads_arg(v, shape, sig, relabel);
}

// --- capture-avoiding substitution -------------------------------------------

inline Term bind(const Term& t, const Signature& sig, const Substitution& s);

// Substitution pushed through one argument shape.
inline Arg bind_arg(const Arg& v, const Arity& shape, const Signature& sig,
                    const Substitution& s) {
  switch (shape.kind()) {
    case Arity::Kind::term:
      return Arg::term(bind(v.term_value(), sig, s));
    case Arity::Kind::one:
      if (!v.is(Arg::Kind::unit)) throw ShapeError("expected unit argument");
      return v;
    case Arity::Kind::product: {
      const std::vector<Arg>& items = v.items();
      if (items.size() != shape.children().size()) throw ShapeError("tuple width mismatch");
      std::vector<Arg> out;
      out.reserve(items.size());
      for (std::size_t i = 0; i < items.size(); ++i)
        out.push_back(bind_arg(items[i], shape.children()[i], sig, s));
      return Arg::tuple(std::move(out));
    }
    case Arity::Kind::derivative: {
      Substitution under = s.lifted();
      return Arg::scope(bind_arg(v.body(), shape.inner(), sig, under));
    }
    case Arity::Kind::compose: {
      // the outer structure is untouched; substitution enters only the
      // nested payload values, at the inner arity
      const Arity inner = shape.compose_inner();
      RefMap through = [&sig, &s, inner](const Payload& p) -> Term {
        if (!p.is(Payload::Kind::nested) || !(p.shape() == inner))
          throw ShapeError("composition boundary expects nested payloads of the inner arity");
        return Term::var(Payload::nested(bind_arg(p.value(), inner, sig, s), inner));
      };
      return Arg::outer(map_refs_arg(v.body(), shape.compose_outer(), sig, through));
    }
    case Arity::Kind::sum: {
      int idx = shape.find_variant(v.tag());
      if (idx < 0) throw ShapeError("unknown sum variant tag: " + v.tag());
      return Arg::variant(v.tag(),
                          bind_arg(v.body(), shape.children()[static_cast<std::size_t>(idx)], sig, s));
    }
  }
  throw ShapeError("unreachable arity kind");
}

inline Term bind(const Term& t, const Signature& sig, const Substitution& s) {
  if (t.is_var()) {
    const Payload& p = t.payload();
    switch (p.kind()) {
      case Payload::Kind::free:
        return s.apply(p.index());
      case Payload::Kind::bound:
        return t;
      case Payload::Kind::nested:
        throw ContextError("nested payload at an ordinary context");
    }
  }
  const Arity* a = sig.find(t.op_name());
  if (!a) throw TermError("unknown op: " + t.op_name());
  return Term::op(t.op_name(), bind_arg(t.op_arg(), *a, sig, s));
}

inline Substitution compose_substitutions(const Substitution& f, const Substitution& g,
                                          const Signature& sig) {
  std::vector<Term> ts;
  ts.reserve(static_cast<std::size_t>(f.src()));
  for (int i = 0; i < f.src(); ++i) ts.push_back(bind(f.apply(i), sig, g));
  return Substitution(std::move(ts), g.dst());
}

// --- raw composition data and the three arity morphisms ----------------------
//
// A "composite term" is a term whose context references are nested
// term-shaped payloads: the raw data of the composition arity at the term
// arity, not wrapped in an op node. The morphisms below act on it.

// Substitution action on composite terms: enters the nested payloads only.
inline Term bind_composite(const Term& t, const Signature& sig, const Substitution& s) {
  const Arity theta = Arity::term();
  RefMap through = [&sig, &s, theta](const Payload& p) -> Term {
    if (!p.is(Payload::Kind::nested) || !(p.shape() == theta))
      throw ShapeError("composite term expects term-shaped nested payloads");
    return Term::var(Payload::nested(Arg::term(bind(p.value().term_value(), sig, s)), theta));
  };
  return map_refs(t, sig, through);
}

// Monad multiplication: splice every nested term in for its variable.
inline Term flatten(const Term& t, const Signature& sig) {
  const Arity theta = Arity::term();
  RefMap splice = [theta](const Payload& p) -> Term {
    if (!p.is(Payload::Kind::nested) || !(p.shape() == theta) ||
        !p.value().is(Arg::Kind::term))
      throw ShapeError("payload not term-shaped");
    return p.value().term_value();
  };
  return map_refs(t, sig, splice);
}

// The whisker that wraps a whole term as a single composite variable.
inline Term as_composite_var(const Term& t) {
  return Term::var(Payload::nested(Arg::term(t), Arity::term()));
}

// The whisker that wraps every free payload as a nested variable term.
inline Term map_var(const Term& t, const Signature& sig) {
  const Arity theta = Arity::term();
  RefMap wrap = [theta](const Payload& p) -> Term {
    if (!p.is(Payload::Kind::free)) throw ContextError("map_var expects an ordinary context");
    return Term::var(Payload::nested(Arg::term(Term::var(p.index())), theta));
  };
  return map_refs(t, sig, wrap);
}

}  // namespace bindsig
