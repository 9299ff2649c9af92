#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bindsig/enumerate.hpp"
#include "bindsig/sexpr.hpp"
#include "bindsig/term.hpp"

namespace bindsig {

class MissingInterp : public TermError {
 public:
  using TermError::TermError;
};

// An argument value translated into a target monad: the shape skeleton of
// an ArgValue with every term position evaluated. Value nodes carry their
// context size; an outer node holds the outer-shape part re-rooted at a
// fresh context of size k together with the k inner parts at the ambient
// context (the nested payloads, enumerated depth-first left to right).
template <class V>
class Translated {
 public:
  enum class Kind { value, unit, tuple, scope, outer, variant };

  static Translated value(V v, int ctx) {
    Translated t(Kind::value);
    t.value_ = std::move(v);
    t.ctx_ = ctx;
    return t;
  }
  static Translated unit() { return Translated(Kind::unit); }
  static Translated tuple(std::vector<Translated> items) {
    Translated t(Kind::tuple);
    t.kids_ = std::move(items);
    return t;
  }
  static Translated scope(Translated body) {
    Translated t(Kind::scope);
    t.kids_.push_back(std::move(body));
    return t;
  }
  static Translated outer(Translated outer_part, std::vector<Translated> inner_parts) {
    Translated t(Kind::outer);
    t.kids_.push_back(std::move(outer_part));
    for (Translated& p : inner_parts) t.kids_.push_back(std::move(p));
    return t;
  }
  static Translated variant(std::string tag, Translated body) {
    Translated t(Kind::variant);
    t.tag_ = std::move(tag);
    t.kids_.push_back(std::move(body));
    return t;
  }

  Kind kind() const { return kind_; }
  const V& value() const {
    if (kind_ != Kind::value || !value_) throw ShapeError("translated value expected");
    return *value_;
  }
  int ctx() const { return ctx_; }
  const std::vector<Translated>& items() const { return kids_; }
  const Translated& body() const { return kids_.front(); }
  const Translated& outer_part() const { return kids_.front(); }
  std::size_t inner_count() const { return kids_.size() - 1; }
  const Translated& inner_part(std::size_t i) const { return kids_[i + 1]; }
  const std::string& tag() const { return tag_; }

 private:
  explicit Translated(Kind k) : kind_(k) {}
  Kind kind_;
  std::optional<V> value_;
  int ctx_ = 0;
  std::vector<Translated> kids_;
  std::string tag_;
};

// A monad with a representation of a signature: one interpreter per op.
// The monad object supplies unit / simultaneous substitution / equality at
// finite contexts. Interpreters receive the translated argument and the
// ambient context size.
template <class M>
struct Representation {
  using Value = typename M::Value;
  using Interp = std::function<Value(const Translated<Value>&, int)>;

  M monad;
  std::map<std::string, Interp> interp;

  const Interp& interp_for(const std::string& op_name) const {
    auto it = interp.find(op_name);
    if (it == interp.end()) throw MissingInterp("no interpretation for op: " + op_name);
    return it->second;
  }
};

namespace detail {

// Evaluation state: the current context is free_base indices plus `depth`
// scope entries; the k-th innermost bound level denotes index
// free_base + depth - 1 - k (scopes append fresh indices at the end).
template <class M>
typename M::Value eval_term_at(const Term& t, const Signature& sig, const Representation<M>& rep,
                               int free_base, int depth_here);

template <class M>
Translated<typename M::Value> translate_arg_at(const Arg& v, const Arity& shape,
                                               const Signature& sig, const Representation<M>& rep,
                                               int free_base, int depth_here) {
  using V = typename M::Value;
  switch (shape.kind()) {
    case Arity::Kind::term:
      return Translated<V>::value(eval_term_at(v.term_value(), sig, rep, free_base, depth_here),
                                  free_base + depth_here);
    case Arity::Kind::one:
      if (!v.is(Arg::Kind::unit)) throw ShapeError("expected unit argument");
      return Translated<V>::unit();
    case Arity::Kind::product: {
      const std::vector<Arg>& items = v.items();
      if (items.size() != shape.children().size()) throw ShapeError("tuple width mismatch");
      std::vector<Translated<V>> out;
      out.reserve(items.size());
      for (std::size_t i = 0; i < items.size(); ++i)
        out.push_back(translate_arg_at(items[i], shape.children()[i], sig, rep, free_base, depth_here));
      return Translated<V>::tuple(std::move(out));
    }
    case Arity::Kind::derivative:
      return Translated<V>::scope(
          translate_arg_at(v.body(), shape.inner(), sig, rep, free_base, depth_here + 1));
    case Arity::Kind::compose: {
      // gather nested payload values depth-first and re-root the outer
      // structure at a fresh context indexing them
      const Arity inner = shape.compose_inner();
      std::vector<Arg> collected;
      RefMap gather = [&collected, &inner](const Payload& p) -> Term {
        if (!p.is(Payload::Kind::nested) || !(p.shape() == inner))
          throw ShapeError("composition boundary expects nested payloads of the inner arity");
        collected.push_back(p.value());
        return Term::var(static_cast<int>(collected.size()) - 1);
      };
      Arg rewritten = map_refs_arg(v.body(), shape.compose_outer(), sig, gather);
      std::vector<Translated<V>> inner_parts;
      inner_parts.reserve(collected.size());
      for (const Arg& c : collected)
        inner_parts.push_back(translate_arg_at(c, inner, sig, rep, free_base, depth_here));
      Translated<V> outer_part = translate_arg_at(rewritten, shape.compose_outer(), sig, rep,
                                                  static_cast<int>(collected.size()), 0);
      return Translated<V>::outer(std::move(outer_part), std::move(inner_parts));
    }
    case Arity::Kind::sum: {
      int idx = shape.find_variant(v.tag());
      if (idx < 0) throw ShapeError("unknown sum variant tag: " + v.tag());
      return Translated<V>::variant(
          v.tag(), translate_arg_at(v.body(), shape.children()[static_cast<std::size_t>(idx)], sig,
                                    rep, free_base, depth_here));
    }
  }
  throw ShapeError("unreachable arity kind");
}

template <class M>
typename M::Value eval_term_at(const Term& t, const Signature& sig, const Representation<M>& rep,
                               int free_base, int depth_here) {
  int ctx = free_base + depth_here;
  if (t.is_var()) {
    const Payload& p = t.payload();
    switch (p.kind()) {
      case Payload::Kind::free:
        if (p.index() < 0 || p.index() >= free_base) throw ContextError("free index out of context");
        return rep.monad.unit(ctx, p.index());
      case Payload::Kind::bound: {
        if (p.index() < 0 || p.index() >= depth_here) throw ContextError("bound level out of scope");
        return rep.monad.unit(ctx, free_base + depth_here - 1 - p.index());
      }
      case Payload::Kind::nested:
        throw ContextError("nested payload at an ordinary context");
    }
  }
  const Arity* a = sig.find(t.op_name());
  if (!a) throw TermError("unknown op: " + t.op_name());
  return rep.interp_for(t.op_name())(translate_arg_at(t.op_arg(), *a, sig, rep, free_base, depth_here),
                                     ctx);
}

}  // namespace detail

// The canonical fold out of the syntax: variables go to the target unit,
// op nodes to their interpreters, with scopes appending fresh indices at
// the end of the context.
template <class M>
typename M::Value eval(const Term& t, const Signature& sig, const Representation<M>& rep, int n) {
  return detail::eval_term_at(t, sig, rep, n, 0);
}

template <class M>
Translated<typename M::Value> translate_op_args(const Arg& v, const Arity& shape,
                                                const Signature& sig, const Representation<M>& rep,
                                                int n) {
  return detail::translate_arg_at(v, shape, sig, rep, n, 0);
}

// --- a second, arguments-first evaluator -------------------------------------
//
// Same specification as eval, written as a separate recursion that builds
// each op node's translated argument bottom-up before touching the
// interpreter. Agreement between the two is the operational uniqueness
// witness for the fold, so this code deliberately repeats the logic rather
// than sharing helpers with eval.

namespace detail {

template <class M>
typename M::Value eval2_term(const Term& t, const Signature& sig, const Representation<M>& rep,
                             int free_base, int depth_here);

template <class M>
Translated<typename M::Value> eval2_arg(const Arg& v, const Arity& shape, const Signature& sig,
                                        const Representation<M>& rep, int free_base,
                                        int depth_here) {
  using V = typename M::Value;
  using T = Translated<V>;
  if (shape.is(Arity::Kind::term))
    return T::value(eval2_term(v.term_value(), sig, rep, free_base, depth_here),
                    free_base + depth_here);
  if (shape.is(Arity::Kind::one)) return T::unit();
  if (shape.is(Arity::Kind::product)) {
    std::vector<T> items;
    for (std::size_t i = 0; i < shape.children().size(); ++i)
      items.push_back(eval2_arg(v.items().at(i), shape.children()[i], sig, rep, free_base, depth_here));
    return T::tuple(std::move(items));
  }
  if (shape.is(Arity::Kind::derivative))
    return T::scope(eval2_arg(v.body(), shape.inner(), sig, rep, free_base, depth_here + 1));
  if (shape.is(Arity::Kind::sum)) {
    int idx = shape.find_variant(v.tag());
    if (idx < 0) throw ShapeError("unknown sum variant tag: " + v.tag());
    return T::variant(v.tag(), eval2_arg(v.body(), shape.children()[static_cast<std::size_t>(idx)],
                                         sig, rep, free_base, depth_here));
  }
  // composition: collect payloads with an explicit worklist-style rewrite
  const Arity inner = shape.compose_inner();
  std::vector<Arg> collected;
  std::function<Term(const Term&)> rewrite_term;
  std::function<Arg(const Arg&, const Arity&)> rewrite_arg = [&](const Arg& a,
                                                                 const Arity& sh) -> Arg {
    switch (sh.kind()) {
      case Arity::Kind::term:
        return Arg::term(rewrite_term(a.term_value()));
      case Arity::Kind::one:
        return a;
      case Arity::Kind::product: {
        std::vector<Arg> items;
        for (std::size_t i = 0; i < sh.children().size(); ++i)
          items.push_back(rewrite_arg(a.items().at(i), sh.children()[i]));
        return Arg::tuple(std::move(items));
      }
      case Arity::Kind::derivative:
        return Arg::scope(rewrite_arg(a.body(), sh.inner()));
      case Arity::Kind::compose: {
        // deeper boundary: the deeper nested values live at this level,
        // so keep rewriting inside them via their own shape
        const Arity deeper = sh.compose_inner();
        RefMap through = [&](const Payload& p) -> Term {
          if (!p.is(Payload::Kind::nested) || !(p.shape() == deeper))
            throw ShapeError("composition boundary expects nested payloads of the inner arity");
          return Term::var(Payload::nested(rewrite_arg(p.value(), deeper), deeper));
        };
        return Arg::outer(map_refs_arg(a.body(), sh.compose_outer(), sig, through));
      }
      case Arity::Kind::sum: {
        int idx = sh.find_variant(a.tag());
        if (idx < 0) throw ShapeError("unknown sum variant tag: " + a.tag());
        return Arg::variant(a.tag(),
                            rewrite_arg(a.body(), sh.children()[static_cast<std::size_t>(idx)]));
      }
    }
    throw ShapeError("unreachable arity kind");
  };
  rewrite_term = [&](const Term& u) -> Term {
    if (u.is_var()) {
      const Payload& p = u.payload();
      if (p.is(Payload::Kind::bound)) return u;
      if (!p.is(Payload::Kind::nested) || !(p.shape() == inner))
        throw ShapeError("composition boundary expects nested payloads of the inner arity");
      collected.push_back(p.value());
      return Term::var(static_cast<int>(collected.size()) - 1);
    }
    const Arity* oa = sig.find(u.op_name());
    if (!oa) throw TermError("unknown op: " + u.op_name());
    return Term::op(u.op_name(), rewrite_arg(u.op_arg(), *oa));
  };
  Arg rewritten = rewrite_arg(v.body(), shape.compose_outer());
  std::vector<T> parts;
  for (const Arg& c : collected) parts.push_back(eval2_arg(c, inner, sig, rep, free_base, depth_here));
  T outer_part = eval2_arg(rewritten, shape.compose_outer(), sig, rep,
                           static_cast<int>(collected.size()), 0);
  return T::outer(std::move(outer_part), std::move(parts));
}

template <class M>
typename M::Value eval2_term(const Term& t, const Signature& sig, const Representation<M>& rep,
                             int free_base, int depth_here) {
  if (t.is_var()) {
    const Payload& p = t.payload();
    if (p.is(Payload::Kind::free)) return rep.monad.unit(free_base + depth_here, p.index());
    if (p.is(Payload::Kind::bound))
      return rep.monad.unit(free_base + depth_here, free_base + depth_here - 1 - p.index());
    throw ContextError("nested payload at an ordinary context");
  }
  const Arity* a = sig.find(t.op_name());
  if (!a) throw TermError("unknown op: " + t.op_name());
  auto translated = eval2_arg(t.op_arg(), *a, sig, rep, free_base, depth_here);
  return rep.interp_for(t.op_name())(translated, free_base + depth_here);
}

}  // namespace detail

template <class M>
typename M::Value eval_args_first(const Term& t, const Signature& sig,
                                  const Representation<M>& rep, int n) {
  return detail::eval2_term(t, sig, rep, n, 0);
}

// --- the syntax as its own representation -------------------------------------

namespace detail {

// Rebinds the (single) free index `target` as a bound variable. Used when
// converting evaluated scope bodies back into binder arguments: the body
// was evaluated at context target+1 with the binder as the last index.
inline Term close_free_term(const Term& t, int target, int scopes);

inline Arg close_free_arg(const Arg& v, int target, int scopes) {
  switch (v.kind()) {
    case Arg::Kind::term:
      return Arg::term(close_free_term(v.term_value(), target, scopes));
    case Arg::Kind::unit:
      return v;
    case Arg::Kind::tuple: {
      std::vector<Arg> items;
      items.reserve(v.items().size());
      for (const Arg& item : v.items()) items.push_back(close_free_arg(item, target, scopes));
      return Arg::tuple(std::move(items));
    }
    case Arg::Kind::scope:
      return Arg::scope(close_free_arg(v.body(), target, scopes + 1));
    case Arg::Kind::outer:
      return Arg::outer(close_free_arg(v.body(), target, scopes));
    case Arg::Kind::variant:
      return Arg::variant(v.tag(), close_free_arg(v.body(), target, scopes));
  }
  throw ShapeError("unreachable arg kind");
}

inline Term close_free_term(const Term& t, int target, int scopes) {
  if (t.is_var()) {
    const Payload& p = t.payload();
    switch (p.kind()) {
      case Payload::Kind::free:
        if (p.index() == target) return Term::bound(scopes);
        if (p.index() > target) throw ContextError("index past the scope being closed");
        return t;
      case Payload::Kind::bound:
        return t;
      case Payload::Kind::nested:
        // ambient references live inside the payload value; local scopes of
        // the enclosing outer structure do not affect its bound levels
        return Term::var(Payload::nested(close_free_arg(p.value(), target, scopes), p.shape()));
    }
  }
  return Term::op(t.op_name(), close_free_arg(t.op_arg(), target, scopes));
}

}  // namespace detail

// Inverse of argument translation for the syntax itself: turns a
// Translated<Term> back into the ArgValue it came from.
inline Arg from_translated(const Arity& shape, const Translated<Term>& tv, const Signature& sig,
                           int ambient) {
  switch (shape.kind()) {
    case Arity::Kind::term:
      return Arg::term(tv.value());
    case Arity::Kind::one:
      return Arg::unit();
    case Arity::Kind::product: {
      std::vector<Arg> items;
      items.reserve(shape.children().size());
      for (std::size_t i = 0; i < shape.children().size(); ++i)
        items.push_back(from_translated(shape.children()[i], tv.items()[i], sig, ambient));
      return Arg::tuple(std::move(items));
    }
    case Arity::Kind::derivative: {
      Arg body = from_translated(shape.inner(), tv.body(), sig, ambient + 1);
      return Arg::scope(detail::close_free_arg(body, ambient, 0));
    }
    case Arity::Kind::compose: {
      const Arity inner = shape.compose_inner();
      int k = static_cast<int>(tv.inner_count());
      std::vector<Arg> inners;
      inners.reserve(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i)
        inners.push_back(from_translated(inner, tv.inner_part(static_cast<std::size_t>(i)), sig, ambient));
      Arg outer_plain = from_translated(shape.compose_outer(), tv.outer_part(), sig, k);
      RefMap reopen = [&inners, &inner](const Payload& p) -> Term {
        if (!p.is(Payload::Kind::free)) throw ContextError("expected a re-rooted outer structure");
        return Term::var(Payload::nested(inners[static_cast<std::size_t>(p.index())], inner));
      };
      return Arg::outer(map_refs_arg(outer_plain, shape.compose_outer(), sig, reopen));
    }
    case Arity::Kind::sum: {
      int idx = shape.find_variant(tv.tag());
      if (idx < 0) throw ShapeError("unknown sum variant tag: " + tv.tag());
      return Arg::variant(tv.tag(), from_translated(shape.children()[static_cast<std::size_t>(idx)],
                                                    tv.body(), sig, ambient));
    }
  }
  throw ShapeError("unreachable arity kind");
}

struct SyntaxMonad {
  Signature sig;
  using Value = Term;

  Value unit(int, int i) const { return Term::var(i); }

  Value tbind(const Value& v, int src, const std::function<Value(int)>& s, int dst) const {
    std::vector<Term> ts;
    ts.reserve(static_cast<std::size_t>(src));
    for (int i = 0; i < src; ++i) ts.push_back(s(i));
    return bind(v, sig, Substitution(std::move(ts), dst));
  }

  bool equal(const Value& a, const Value& b) const { return a == b; }
};

// The tautological representation: every op interprets as itself. eval
// through it is the identity, which the tests lean on heavily.
inline Representation<SyntaxMonad> self_representation(const Signature& sig) {
  Representation<SyntaxMonad> rep{SyntaxMonad{sig}, {}};
  for (const OpDecl& op : sig.ops()) {
    const std::string name = op.name;
    const Arity shape = op.arity;
    rep.interp[name] = [name, shape, sig](const Translated<Term>& tv, int ambient) {
      return Term::op(name, from_translated(shape, tv, sig, ambient));
    };
  }
  return rep;
}

// The target syntax of an inclusion, restricted to the source signature:
// op o interprets as the op node for its image. eval through it is
// translation along the inclusion.
inline Representation<SyntaxMonad> inclusion_representation(const SignatureInclusion& inc) {
  Representation<SyntaxMonad> rep{SyntaxMonad{inc.target}, {}};
  for (const OpDecl& op : inc.source.ops()) {
    const std::string image = inc.apply(op.name);
    const Arity shape = op.arity;
    const Signature target = inc.target;
    rep.interp[op.name] = [image, shape, target](const Translated<Term>& tv, int ambient) {
      return Term::op(image, from_translated(shape, tv, target, ambient));
    };
  }
  return rep;
}

// Structural translation along an inclusion: op names are mapped, shapes
// and payloads are untouched. Must agree with eval through
// inclusion_representation; the tests check that they do.
inline Term translate(const Term& t, const SignatureInclusion& inc);

inline Arg translate_arg_along(const Arg& v, const SignatureInclusion& inc) {
  switch (v.kind()) {
    case Arg::Kind::term:
      return Arg::term(translate(v.term_value(), inc));
    case Arg::Kind::unit:
      return v;
    case Arg::Kind::tuple: {
      std::vector<Arg> items;
      items.reserve(v.items().size());
      for (const Arg& item : v.items()) items.push_back(translate_arg_along(item, inc));
      return Arg::tuple(std::move(items));
    }
    case Arg::Kind::scope:
      return Arg::scope(translate_arg_along(v.body(), inc));
    case Arg::Kind::outer:
      return Arg::outer(translate_arg_along(v.body(), inc));
    case Arg::Kind::variant:
      return Arg::variant(v.tag(), translate_arg_along(v.body(), inc));
  }
  throw ShapeError("unreachable arg kind");
}

inline Term translate(const Term& t, const SignatureInclusion& inc) {
  if (t.is_var()) {
    const Payload& p = t.payload();
    if (p.is(Payload::Kind::nested))
      return Term::var(Payload::nested(translate_arg_along(p.value(), inc), p.shape()));
    return t;
  }
  return Term::op(inc.apply(t.op_name()), translate_arg_along(t.op_arg(), inc));
}

// --- reports ------------------------------------------------------------------

struct Failure {
  std::string description;
  std::string lhs, rhs;
  std::string term, substitution;
  std::uint64_t replay_seed = 0;
};

struct EvalReport {
  std::string law_id;
  std::uint64_t samples = 0;
  std::uint64_t failure_count = 0;
  std::vector<Failure> failures;  // first few, with replay seeds

  bool passed() const { return failure_count == 0; }

  void record(Failure f) {
    ++failure_count;
    if (failures.size() < 4) failures.push_back(std::move(f));
  }
};

// --- morphism and pushout checks ----------------------------------------------

namespace detail {

inline std::string subst_to_string(const Substitution& s) {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < s.src(); ++i) {
    if (i) os << ' ';
    os << print_term(s.apply(i));
  }
  os << "] -> " << s.dst();
  return os.str();
}

}  // namespace detail

// Samples (term, substitution) pairs and checks that eval is a morphism of
// monads into the representation, and that the straight and arguments-first
// evaluators agree (the representation square computed two ways).
template <class M>
EvalReport check_monad_morphism(const Signature& sig, const Representation<M>& rep,
                                std::uint64_t samples, std::uint64_t seed, int ctx_max = 3,
                                int depth_max = 4) {
  EvalReport report;
  report.law_id = "monad-morphism";
  for (std::uint64_t i = 0; i < samples; ++i) {
    Rng rng = Rng::split(seed, i);
    int n = rng.pick(ctx_max + 1);
    int m = rng.pick(ctx_max + 1);
    int d = rng.pick(depth_max + 1);
    Term t;
    Substitution s;
    try {
      t = random_term(sig, n, d, rng.next());
      Rng srng(rng.next());
      s = random_substitution(sig, n, m, d, srng);
    } catch (const Ungenerable&) {
      continue;
    }
    ++report.samples;

    auto lhs = eval(bind(t, sig, s), sig, rep, m);
    auto rhs = rep.monad.tbind(eval(t, sig, rep, n), n,
                               [&](int j) { return eval(s.apply(j), sig, rep, m); }, m);
    if (!rep.monad.equal(lhs, rhs))
      report.record(Failure{"eval does not commute with substitution", "", "", print_term(t),
                            detail::subst_to_string(s), seed ^ i});

    auto direct = eval(t, sig, rep, n);
    auto args_first = eval_args_first(t, sig, rep, n);
    if (!rep.monad.equal(direct, args_first))
      report.record(Failure{"straight and arguments-first evaluation disagree", "", "",
                            print_term(t), "", seed ^ i});
  }
  return report;
}

// Verifies the mediation property of an amalgamation square on sampled and
// small enumerated terms: evaluating a translated term in the merged
// signature equals evaluating the original under the restricted
// representation, and the two restrictions agree on the shared part.
template <class M>
EvalReport check_pushout(const Signature& base, const SignatureInclusion& base_in_first,
                         const SignatureInclusion& base_in_second, const MergeResult& merge,
                         const Representation<M>& rep, std::uint64_t samples, std::uint64_t seed,
                         int ctx_max = 2, int depth_max = 3) {
  EvalReport report;
  report.law_id = "pushout-mediation";

  auto restricted = [&rep](const SignatureInclusion& inc) {
    Representation<M> out{rep.monad, {}};
    for (const OpDecl& op : inc.source.ops()) out.interp[op.name] = rep.interp_for(inc.apply(op.name));
    return out;
  };
  Representation<M> rep1 = restricted(merge.from_first);
  Representation<M> rep2 = restricted(merge.from_second);
  Representation<M> rep0_via_1 = restricted(compose_inclusions(base_in_first, merge.from_first));
  Representation<M> rep0_via_2 = restricted(compose_inclusions(base_in_second, merge.from_second));

  auto run_side = [&](const Signature& side, const SignatureInclusion& into_merged,
                      const Representation<M>& side_rep) {
    for (int n = 0; n <= ctx_max; ++n)
      for (int d = 0; d <= depth_max; ++d) {
        std::vector<Term> slice;
        try {
          slice = enumerate_terms(side, n, d, EnumLimits{20000});
        } catch (const CapExceeded&) {
          break;
        }
        for (const Term& t : slice) {
          ++report.samples;
          auto via_merge = eval(translate(t, into_merged), merge.merged, rep, n);
          auto direct = eval(t, side, side_rep, n);
          if (!rep.monad.equal(via_merge, direct))
            report.record(Failure{"mediating triangle does not commute over " + side.name(), "",
                                  "", print_term(t), "", 0});
        }
      }
  };
  run_side(merge.from_first.source, merge.from_first, rep1);
  run_side(merge.from_second.source, merge.from_second, rep2);

  // shared-part agreement, sampled
  for (std::uint64_t i = 0; i < samples; ++i) {
    Rng rng = Rng::split(seed, i);
    int n = rng.pick(ctx_max + 1);
    int d = rng.pick(depth_max + 1);
    Term t;
    try {
      t = random_term(base, n, d, rng.next());
    } catch (const Ungenerable&) {
      continue;
    }
    ++report.samples;
    auto via1 = eval(t, base, rep0_via_1, n);
    auto via2 = eval(t, base, rep0_via_2, n);
    if (!rep.monad.equal(via1, via2))
      report.record(Failure{"restrictions disagree on the shared subsignature", "", "",
                            print_term(t), "", seed ^ i});
  }
  return report;
}

}  // namespace bindsig
