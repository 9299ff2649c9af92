#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bindsig/rng.hpp"
#include "bindsig/term.hpp"

namespace bindsig {

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Ungenerable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnumLimits {
  std::size_t max_items = 100000;  // applies to every intermediate list as well
};

namespace detail {

struct Budget {
  std::size_t remaining;
  void spend(std::size_t k) {
    if (k > remaining) throw CapExceeded("enumeration cap exceeded");
    remaining -= k;
  }
};

inline std::vector<Term> enum_terms(const Signature& sig, const ScopeCtx& ctx, int depth,
                                    Budget& budget);

inline std::vector<Arg> enum_args(const Signature& sig, const Arity& shape, const ScopeCtx& ctx,
                                  int depth, Budget& budget) {
  std::vector<Arg> out;
  switch (shape.kind()) {
    case Arity::Kind::term: {
      for (Term& t : enum_terms(sig, ctx, depth, budget)) out.push_back(Arg::term(std::move(t)));
      return out;
    }
    case Arity::Kind::one:
      budget.spend(1);
      out.push_back(Arg::unit());
      return out;
    case Arity::Kind::product: {
      // cartesian product of the factor enumerations, leftmost varying slowest
      std::vector<std::vector<Arg>> per_factor;
      per_factor.reserve(shape.children().size());
      for (const Arity& f : shape.children())
        per_factor.push_back(enum_args(sig, f, ctx, depth, budget));
      std::vector<std::size_t> idx(per_factor.size(), 0);
      for (;;) {
        std::vector<Arg> items;
        items.reserve(per_factor.size());
        bool empty = false;
        for (std::size_t i = 0; i < per_factor.size(); ++i) {
          if (per_factor[i].empty()) {
            empty = true;
            break;
          }
          items.push_back(per_factor[i][idx[i]]);
        }
        if (empty) return out;
        budget.spend(1);
        out.push_back(Arg::tuple(std::move(items)));
        std::size_t carry = per_factor.size();
        while (carry > 0) {
          idx[carry - 1] += 1;
          if (idx[carry - 1] < per_factor[carry - 1].size()) break;
          idx[carry - 1] = 0;
          --carry;
        }
        if (carry == 0) return out;
      }
    }
    case Arity::Kind::derivative: {
      for (Arg& body : enum_args(sig, shape.inner(), ctx.pushed(), depth, budget))
        out.push_back(Arg::scope(std::move(body)));
      return out;
    }
    case Arity::Kind::compose: {
      ScopeCtx inside = ScopeCtx::boundary(shape.compose_inner(), ctx);
      for (Arg& v : enum_args(sig, shape.compose_outer(), inside, depth, budget))
        out.push_back(Arg::outer(std::move(v)));
      return out;
    }
    case Arity::Kind::sum: {
      for (std::size_t i = 0; i < shape.children().size(); ++i)
        for (Arg& body : enum_args(sig, shape.children()[i], ctx, depth, budget))
          out.push_back(Arg::variant(shape.tags()[i], std::move(body)));
      return out;
    }
  }
  return out;
}

inline std::vector<Term> enum_terms(const Signature& sig, const ScopeCtx& ctx, int depth,
                                    Budget& budget) {
  std::vector<Term> out;
  if (!ctx.behind_boundary()) {
    for (int i = 0; i < ctx.free_count(); ++i) {
      budget.spend(1);
      out.push_back(Term::var(i));
    }
  }
  for (int k = 0; k < ctx.bound_depth(); ++k) {
    budget.spend(1);
    out.push_back(Term::bound(k));
  }
  if (ctx.behind_boundary()) {
    for (Arg& v : enum_args(sig, ctx.inner_shape(), ctx.under(), depth, budget))
      out.push_back(Term::var(Payload::nested(std::move(v), ctx.inner_shape())));
  }
  if (depth >= 1) {
    for (const OpDecl& op : sig.ops())
      for (Arg& v : enum_args(sig, op.arity, ctx, depth - 1, budget)) {
        budget.spend(1);
        out.push_back(Term::op(op.name, std::move(v)));
      }
  }
  return out;
}

}  // namespace detail

// All well-formed terms at the given context with op-depth <= depth, in a
// deterministic order: free variables, bound variables, nested payloads,
// then op nodes in signature order. Throws CapExceeded past the limit.
inline std::vector<Term> enumerate_terms(const Signature& sig, int context_size, int depth,
                                         const EnumLimits& limits = {}) {
  detail::Budget budget{limits.max_items};
  return detail::enum_terms(sig, ScopeCtx::root(context_size), depth, budget);
}

inline std::vector<Term> enumerate_terms_at(const Signature& sig, const ScopeCtx& ctx, int depth,
                                            const EnumLimits& limits = {}) {
  detail::Budget budget{limits.max_items};
  return detail::enum_terms(sig, ctx, depth, budget);
}

inline std::vector<Arg> enumerate_args(const Signature& sig, const Arity& shape,
                                       const ScopeCtx& ctx, int depth,
                                       const EnumLimits& limits = {}) {
  detail::Budget budget{limits.max_items};
  return detail::enum_args(sig, shape, ctx, depth, budget);
}

// --- counting ----------------------------------------------------------------
//
// Slice cardinalities without materialization, memoized on (context, depth).
// Counts are exact; overflow past uint64 throws.

class CountOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

using CountMemo = std::map<std::pair<std::string, int>, std::uint64_t>;

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > UINT64_MAX - b) throw CountOverflow("term count exceeds uint64");
  return a + b;
}

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) throw CountOverflow("term count exceeds uint64");
  return a * b;
}

inline std::uint64_t count_terms_memo(const Signature& sig, const ScopeCtx& ctx, int depth,
                                      CountMemo& memo);

inline std::uint64_t count_args_memo(const Signature& sig, const Arity& shape,
                                     const ScopeCtx& ctx, int depth, CountMemo& memo) {
  switch (shape.kind()) {
    case Arity::Kind::term:
      return count_terms_memo(sig, ctx, depth, memo);
    case Arity::Kind::one:
      return 1;
    case Arity::Kind::product: {
      std::uint64_t total = 1;
      for (const Arity& f : shape.children())
        total = checked_mul(total, count_args_memo(sig, f, ctx, depth, memo));
      return total;
    }
    case Arity::Kind::derivative:
      return count_args_memo(sig, shape.inner(), ctx.pushed(), depth, memo);
    case Arity::Kind::compose:
      return count_args_memo(sig, shape.compose_outer(),
                             ScopeCtx::boundary(shape.compose_inner(), ctx), depth, memo);
    case Arity::Kind::sum: {
      std::uint64_t total = 0;
      for (const Arity& v : shape.children())
        total = checked_add(total, count_args_memo(sig, v, ctx, depth, memo));
      return total;
    }
  }
  return 0;
}

inline std::uint64_t count_terms_memo(const Signature& sig, const ScopeCtx& ctx, int depth,
                                      CountMemo& memo) {
  auto key = std::make_pair(ctx.key(), depth);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  std::uint64_t total = 0;
  if (!ctx.behind_boundary()) total = static_cast<std::uint64_t>(ctx.free_count());
  total = checked_add(total, static_cast<std::uint64_t>(ctx.bound_depth()));
  if (ctx.behind_boundary())
    total = checked_add(total, count_args_memo(sig, ctx.inner_shape(), ctx.under(), depth, memo));
  if (depth >= 1)
    for (const OpDecl& op : sig.ops())
      total = checked_add(total, count_args_memo(sig, op.arity, ctx, depth - 1, memo));
  memo[key] = total;
  return total;
}

}  // namespace detail

inline std::uint64_t count_terms(const Signature& sig, int context_size, int depth) {
  detail::CountMemo memo;
  return detail::count_terms_memo(sig, ScopeCtx::root(context_size), depth, memo);
}

// --- random generation --------------------------------------------------------

namespace detail {

inline bool can_make_term(const Signature& sig, const ScopeCtx& ctx, int depth);

inline bool can_make_arg(const Signature& sig, const Arity& shape, const ScopeCtx& ctx,
                         int depth) {
  switch (shape.kind()) {
    case Arity::Kind::term:
      return can_make_term(sig, ctx, depth);
    case Arity::Kind::one:
      return true;
    case Arity::Kind::product: {
      for (const Arity& f : shape.children())
        if (!can_make_arg(sig, f, ctx, depth)) return false;
      return true;
    }
    case Arity::Kind::derivative:
      return can_make_arg(sig, shape.inner(), ctx.pushed(), depth);
    case Arity::Kind::compose:
      return can_make_arg(sig, shape.compose_outer(),
                          ScopeCtx::boundary(shape.compose_inner(), ctx), depth);
    case Arity::Kind::sum: {
      for (const Arity& v : shape.children())
        if (can_make_arg(sig, v, ctx, depth)) return true;
      return false;
    }
  }
  return false;
}

inline bool can_make_term(const Signature& sig, const ScopeCtx& ctx, int depth) {
  if (!ctx.behind_boundary() && ctx.free_count() > 0) return true;
  if (ctx.bound_depth() > 0) return true;
  if (ctx.behind_boundary() && can_make_arg(sig, ctx.inner_shape(), ctx.under(), depth))
    return true;
  if (depth >= 1)
    for (const OpDecl& op : sig.ops())
      if (can_make_arg(sig, op.arity, ctx, depth - 1)) return true;
  return false;
}

inline Term random_term_impl(const Signature& sig, const ScopeCtx& ctx, int depth, Rng& rng);

inline Arg random_arg_impl(const Signature& sig, const Arity& shape, const ScopeCtx& ctx, int depth,
                         Rng& rng) {
  switch (shape.kind()) {
    case Arity::Kind::term:
      return Arg::term(random_term_impl(sig, ctx, depth, rng));
    case Arity::Kind::one:
      return Arg::unit();
    case Arity::Kind::product: {
      std::vector<Arg> items;
      items.reserve(shape.children().size());
      for (const Arity& f : shape.children()) items.push_back(random_arg_impl(sig, f, ctx, depth, rng));
      return Arg::tuple(std::move(items));
    }
    case Arity::Kind::derivative:
      return Arg::scope(random_arg_impl(sig, shape.inner(), ctx.pushed(), depth, rng));
    case Arity::Kind::compose:
      return Arg::outer(random_arg_impl(sig, shape.compose_outer(),
                                       ScopeCtx::boundary(shape.compose_inner(), ctx), depth, rng));
    case Arity::Kind::sum: {
      std::vector<std::size_t> viable;
      for (std::size_t i = 0; i < shape.children().size(); ++i)
        if (can_make_arg(sig, shape.children()[i], ctx, depth)) viable.push_back(i);
      if (viable.empty()) throw Ungenerable("no inhabitable sum variant at this depth");
      std::size_t pick = viable[rng.below(viable.size())];
      return Arg::variant(shape.tags()[pick], random_arg_impl(sig, shape.children()[pick], ctx, depth, rng));
    }
  }
  throw Ungenerable("unreachable shape");
}

inline Term random_term_impl(const Signature& sig, const ScopeCtx& ctx, int depth, Rng& rng) {
  // candidate classes: 0 = variable-ish, 1.. = ops (when generable)
  bool var_ok = (!ctx.behind_boundary() && ctx.free_count() > 0) || ctx.bound_depth() > 0 ||
                (ctx.behind_boundary() && can_make_arg(sig, ctx.inner_shape(), ctx.under(), depth));
  std::vector<int> op_choices;
  if (depth >= 1)
    for (std::size_t i = 0; i < sig.ops().size(); ++i)
      if (can_make_arg(sig, sig.ops()[i].arity, ctx, depth - 1))
        op_choices.push_back(static_cast<int>(i));
  if (!var_ok && op_choices.empty()) throw Ungenerable("no term inhabits this context and depth");

  // bias toward variables so generated terms stay small-ish
  bool pick_var = var_ok && (op_choices.empty() || rng.below(2) == 0);
  if (pick_var) {
    int n_free = ctx.behind_boundary() ? 0 : ctx.free_count();
    bool nested_ok =
        ctx.behind_boundary() && can_make_arg(sig, ctx.inner_shape(), ctx.under(), depth);
    int classes = n_free + ctx.bound_depth() + (nested_ok ? 1 : 0);
    int c = rng.pick(classes);
    if (c < n_free) return Term::var(c);
    c -= n_free;
    if (c < ctx.bound_depth()) return Term::bound(c);
    return Term::var(
        Payload::nested(random_arg_impl(sig, ctx.inner_shape(), ctx.under(), depth, rng),
                        ctx.inner_shape()));
  }
  const OpDecl& op = sig.ops()[static_cast<std::size_t>(op_choices[rng.pick(
      static_cast<int>(op_choices.size()))])];
  return Term::op(op.name, random_arg_impl(sig, op.arity, ctx, depth - 1, rng));
}

}  // namespace detail

// Deterministic for fixed (sig, context, depth, seed); the result is always
// well-formed, and every term within the depth bound has nonzero probability.
inline Term random_term(const Signature& sig, int context_size, int depth, std::uint64_t seed) {
  Rng rng(seed);
  return detail::random_term_impl(sig, ScopeCtx::root(context_size), depth, rng);
}

inline Term random_term_at(const Signature& sig, const ScopeCtx& ctx, int depth, Rng& rng) {
  return detail::random_term_impl(sig, ctx, depth, rng);
}

inline Arg random_arg(const Signature& sig, const Arity& shape, const ScopeCtx& ctx, int depth,
                      Rng& rng) {
  return detail::random_arg_impl(sig, shape, ctx, depth, rng);
}

// Assignments drawn independently; terms at the destination context.
inline Substitution random_substitution(const Signature& sig, int src, int dst, int depth,
                                        Rng& rng) {
  std::vector<Term> ts;
  ts.reserve(static_cast<std::size_t>(src));
  for (int i = 0; i < src; ++i)
    ts.push_back(detail::random_term_impl(sig, ScopeCtx::root(dst), depth, rng));
  return Substitution(std::move(ts), dst);
}

}  // namespace bindsig
