#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bindsig/enumerate.hpp"
#include "bindsig/eval.hpp"
#include "bindsig/examples.hpp"
#include "bindsig/lambda_ref.hpp"
#include "bindsig/sexpr.hpp"
#include "bindsig/term.hpp"

namespace bindsig {

namespace law {
inline constexpr const char* monad_left_unit = "monad.left-unit";
inline constexpr const char* monad_right_unit = "monad.right-unit";
inline constexpr const char* monad_assoc = "monad.assoc";
inline constexpr const char* strength_unit = "strength.unit";
inline constexpr const char* strength_comp = "strength.comp";
inline constexpr const char* linear_mu = "linear.mu";
inline constexpr const char* linear_eta_inner = "linear.eta-inner";
inline constexpr const char* linear_eta_outer = "linear.eta-outer";
inline constexpr const char* sigma_naturality = "sigma.naturality";

inline std::vector<std::string> all_ids() {
  return {monad_left_unit, monad_right_unit, monad_assoc,  strength_unit,  strength_comp,
          linear_mu,       linear_eta_inner, linear_eta_outer, sigma_naturality};
}
}  // namespace law

struct Bounds {
  int ctx_max = 3;
  int depth_max = 5;
  std::uint64_t samples = 1000;
  // exhaustive supplement over enumeration slices, skipped past this size
  int exhaustive_ctx_max = 2;
  int exhaustive_depth_max = 3;
  std::size_t exhaustive_cap = 100000;
};

// The substitution implementation under test. Checks default to the real
// one; the deliberately broken variants below give the suite a target to
// prove its own power against.
struct BindOps {
  std::function<Term(const Term&, const Signature&, const Substitution&)> term;
  std::function<Arg(const Arg&, const Arity&, const Signature&, const Substitution&)> arg;

  static BindOps standard() {
    return BindOps{
        [](const Term& t, const Signature& sig, const Substitution& s) { return bind(t, sig, s); },
        [](const Arg& v, const Arity& a, const Signature& sig, const Substitution& s) {
          return bind_arg(v, a, sig, s);
        }};
  }

  Substitution compose(const Substitution& f, const Substitution& g, const Signature& sig) const {
    std::vector<Term> ts;
    ts.reserve(static_cast<std::size_t>(f.src()));
    for (int i = 0; i < f.src(); ++i) ts.push_back(term(f.apply(i), sig, g));
    return Substitution(std::move(ts), g.dst());
  }
};

namespace testing {

// A bind that forgets to protect binder scopes: bound levels are looked up
// in the substitution as if they were free. The classic lifting bug, made
// expressible in this representation.
namespace detail_broken {

inline Term broken_term(const Term& t, const Signature& sig, const Substitution& s);

inline Arg broken_arg(const Arg& v, const Arity& shape, const Signature& sig,
                      const Substitution& s) {
  switch (shape.kind()) {
    case Arity::Kind::term:
      return Arg::term(broken_term(v.term_value(), sig, s));
    case Arity::Kind::one:
      return v;
    case Arity::Kind::product: {
      std::vector<Arg> out;
      for (std::size_t i = 0; i < shape.children().size(); ++i)
        out.push_back(broken_arg(v.items().at(i), shape.children()[i], sig, s));
      return Arg::tuple(std::move(out));
    }
    case Arity::Kind::derivative:
      return Arg::scope(broken_arg(v.body(), shape.inner(), sig, s));
    case Arity::Kind::compose: {
      const Arity inner = shape.compose_inner();
      RefMap through = [&sig, &s, inner](const Payload& p) -> Term {
        return Term::var(Payload::nested(broken_arg(p.value(), inner, sig, s), inner));
      };
      return Arg::outer(map_refs_arg(v.body(), shape.compose_outer(), sig, through));
    }
    case Arity::Kind::sum: {
      int idx = shape.find_variant(v.tag());
      return Arg::variant(v.tag(),
                          broken_arg(v.body(), shape.children()[static_cast<std::size_t>(idx)], sig, s));
    }
  }
  throw ShapeError("unreachable arity kind");
}

inline Term broken_term(const Term& t, const Signature& sig, const Substitution& s) {
  if (t.is_var()) {
    const Payload& p = t.payload();
    if (p.is(Payload::Kind::free)) return s.apply(p.index());
    if (p.is(Payload::Kind::bound))
      return p.index() < s.src() ? s.apply(p.index()) : t;  // the bug
    throw ContextError("nested payload at an ordinary context");
  }
  const Arity* a = sig.find(t.op_name());
  if (!a) throw TermError("unknown op: " + t.op_name());
  return Term::op(t.op_name(), broken_arg(t.op_arg(), *a, sig, s));
}

}  // namespace detail_broken

inline BindOps broken_bind_unprotected_scopes() {
  return BindOps{detail_broken::broken_term, detail_broken::broken_arg};
}

}  // namespace testing

// --- generators -----------------------------------------------------------------

namespace detail {

struct Sampler {
  const Signature& sig;
  const Bounds& bounds;
  std::uint64_t seed;

  Term term(Rng& rng, int n, int max_depth) const {
    return random_term_at(sig, ScopeCtx::root(n), max_depth, rng);
  }

  Substitution subst(Rng& rng, int src, int dst) const {
    return random_substitution(sig, src, dst, bounds.depth_max >= 2 ? bounds.depth_max - 2 : 0, rng);
  }
};

// Enumeration slices for the exhaustive supplement, largest first skipped
// once the cap bites. Deterministic.
inline std::vector<std::pair<int, std::vector<Term>>> exhaustive_slices(const Signature& sig,
                                                                        const Bounds& bounds) {
  std::vector<std::pair<int, std::vector<Term>>> slices;
  for (int n = 0; n <= bounds.exhaustive_ctx_max; ++n) {
    for (int d = 0; d <= bounds.exhaustive_depth_max; ++d) {
      try {
        slices.emplace_back(n, enumerate_terms(sig, n, d, EnumLimits{bounds.exhaustive_cap}));
      } catch (const CapExceeded&) {
        break;  // deeper slices at this context only grow
      }
    }
  }
  return slices;
}

inline Failure fail_eq(const std::string& what, const Term& lhs, const Term& rhs, const Term& t,
                       const std::string& substitution, std::uint64_t replay) {
  return Failure{what, print_term(lhs), print_term(rhs), print_term(t), substitution, replay};
}

inline std::string subst_str(const Substitution& s) {
  std::string out = "[";
  for (int i = 0; i < s.src(); ++i) {
    if (i) out += ' ';
    out += print_term(s.apply(i));
  }
  out += "] -> " + std::to_string(s.dst());
  return out;
}

}  // namespace detail

// --- monad laws -------------------------------------------------------------------

inline std::vector<EvalReport> check_monad_laws(const Signature& sig, const Bounds& bounds,
                                                std::uint64_t seed,
                                                const BindOps& ops = BindOps::standard()) {
  EvalReport left{law::monad_left_unit}, right{law::monad_right_unit}, assoc{law::monad_assoc};
  detail::Sampler gen{sig, bounds, seed};

  // exhaustive slices: right unit over every term; associativity with two
  // seeded substitutions per slice
  for (auto& [n, slice] : detail::exhaustive_slices(sig, bounds)) {
    Rng slice_rng = Rng::split(seed, static_cast<std::uint64_t>(n) * 131 + slice.size());
    int m = slice_rng.pick(bounds.ctx_max + 1);
    int p = slice_rng.pick(bounds.ctx_max + 1);
    Substitution f = gen.subst(slice_rng, n, m);
    Substitution g = gen.subst(slice_rng, m, p);
    Substitution fg = ops.compose(f, g, sig);
    Substitution id = Substitution::identity(n);
    for (const Term& t : slice) {
      ++right.samples;
      Term r = ops.term(t, sig, id);
      if (!(r == t))
        right.record(detail::fail_eq("bind with identity is not the identity", r, t, t,
                                     detail::subst_str(id), seed));
      ++assoc.samples;
      Term lhs = ops.term(ops.term(t, sig, f), sig, g);
      Term rhs = ops.term(t, sig, fg);
      if (!(lhs == rhs))
        assoc.record(detail::fail_eq("bind is not associative", lhs, rhs, t,
                                     detail::subst_str(f) + " then " + detail::subst_str(g), seed));
    }
  }

  // sampled pairs
  for (std::uint64_t i = 0; i < bounds.samples; ++i) {
    Rng rng = Rng::split(seed, i);
    int n = 1 + rng.pick(bounds.ctx_max);  // at least one assignment to look at
    int m = rng.pick(bounds.ctx_max + 1);
    int p = rng.pick(bounds.ctx_max + 1);
    Term t;
    Substitution f, g;
    try {
      t = gen.term(rng, n, bounds.depth_max);
      f = gen.subst(rng, n, m);
      g = gen.subst(rng, m, p);
    } catch (const Ungenerable&) {
      continue;
    }

    ++left.samples;
    int idx = rng.pick(n);
    Term lu = ops.term(Term::var(idx), sig, f);
    if (!(lu == f.apply(idx)))
      left.record(detail::fail_eq("bind on a variable is not lookup", lu, f.apply(idx),
                                  Term::var(idx), detail::subst_str(f), seed ^ i));

    ++right.samples;
    Substitution id = Substitution::identity(n);
    Term ru = ops.term(t, sig, id);
    if (!(ru == t))
      right.record(detail::fail_eq("bind with identity is not the identity", ru, t, t,
                                   detail::subst_str(id), seed ^ i));

    ++assoc.samples;
    Term lhs = ops.term(ops.term(t, sig, f), sig, g);
    Term rhs = ops.term(t, sig, ops.compose(f, g, sig));
    if (!(lhs == rhs))
      assoc.record(detail::fail_eq("bind is not associative", lhs, rhs, t,
                                   detail::subst_str(f) + " then " + detail::subst_str(g),
                                   seed ^ i));
  }
  return {left, right, assoc};
}

// --- strength laws -------------------------------------------------------------------

// Identity substitution is the identity per argument shape, and lifting the
// identity is the identity.
inline EvalReport check_strength_unit(const Signature& sig, const Bounds& bounds,
                                      std::uint64_t seed,
                                      const BindOps& ops = BindOps::standard()) {
  EvalReport report{law::strength_unit};
  std::vector<Arity> shapes;
  for (const OpDecl& op : sig.ops()) collect_shapes(op.arity, shapes);

  for (int n = 0; n <= bounds.ctx_max; ++n) {
    Substitution id = Substitution::identity(n);
    if (!(lift(id) == id))
      report.record(Failure{"lift of the identity is not the identity", "", "", "",
                            "identity at " + std::to_string(n), seed});
  }

  std::uint64_t counter = 0;
  for (const Arity& shape : shapes) {
    for (std::uint64_t i = 0; i < bounds.samples; ++i) {
      Rng rng = Rng::split(seed, counter++);
      int n = rng.pick(bounds.ctx_max + 1);
      Arg v;
      try {
        v = random_arg(sig, shape, ScopeCtx::root(n), rng.pick(bounds.depth_max + 1), rng);
      } catch (const Ungenerable&) {
        continue;
      }
      ++report.samples;
      Arg r = ops.arg(v, shape, sig, Substitution::identity(n));
      if (!(r == v))
        report.record(Failure{"identity substitution changed a value at shape " +
                                  print_arity(shape),
                              print_arg(r), print_arg(v), print_arg(v), "identity", seed ^ counter});
    }
  }
  return report;
}

// Two substitution passes equal their composition, per argument shape.
inline EvalReport check_strength_composition(const Signature& sig, const Bounds& bounds,
                                             std::uint64_t seed,
                                             const BindOps& ops = BindOps::standard()) {
  EvalReport report{law::strength_comp};
  std::vector<Arity> shapes;
  for (const OpDecl& op : sig.ops()) collect_shapes(op.arity, shapes);
  detail::Sampler gen{sig, bounds, seed};

  std::uint64_t counter = 0;
  for (const Arity& shape : shapes) {
    for (std::uint64_t i = 0; i < bounds.samples; ++i) {
      Rng rng = Rng::split(seed, counter++);
      int n = rng.pick(bounds.ctx_max + 1);
      int m = rng.pick(bounds.ctx_max + 1);
      int p = rng.pick(bounds.ctx_max + 1);
      Arg v;
      Substitution f, g;
      try {
        v = random_arg(sig, shape, ScopeCtx::root(n), rng.pick(bounds.depth_max + 1), rng);
        f = gen.subst(rng, n, m);
        g = gen.subst(rng, m, p);
      } catch (const Ungenerable&) {
        continue;
      }
      ++report.samples;
      Arg lhs = ops.arg(ops.arg(v, shape, sig, f), shape, sig, g);
      Arg rhs = ops.arg(v, shape, sig, ops.compose(f, g, sig));
      if (!(lhs == rhs))
        report.record(Failure{"substitution passes do not compose at shape " + print_arity(shape),
                              print_arg(lhs), print_arg(rhs), print_arg(v),
                              detail::subst_str(f) + " then " + detail::subst_str(g),
                              seed ^ counter});
    }
  }
  return report;
}

// --- linearity of the composition morphisms ----------------------------------------

enum class Morphism { mu, eta_inner, eta_outer };

inline const char* morphism_law_id(Morphism m) {
  switch (m) {
    case Morphism::mu:
      return law::linear_mu;
    case Morphism::eta_inner:
      return law::linear_eta_inner;
    case Morphism::eta_outer:
      return law::linear_eta_outer;
  }
  return "";
}

// Module-morphism squares for the three composition morphisms, on raw
// two-layer data (terms whose context references are nested term payloads).
inline EvalReport check_linearity(const Signature& sig, Morphism morphism, const Bounds& bounds,
                                  std::uint64_t seed) {
  EvalReport report{morphism_law_id(morphism)};

  auto check_pair = [&](const Term& plain_or_composite, const Substitution& s,
                        std::uint64_t replay) {
    ++report.samples;
    switch (morphism) {
      case Morphism::mu: {
        const Term& t = plain_or_composite;  // composite
        Term lhs = flatten(bind_composite(t, sig, s), sig);
        Term rhs = bind(flatten(t, sig), sig, s);
        if (!(lhs == rhs))
          report.record(detail::fail_eq("multiplication is not linear", lhs, rhs, t,
                                        detail::subst_str(s), replay));
        return;
      }
      case Morphism::eta_outer: {
        const Term& t = plain_or_composite;  // plain
        Term lhs = as_composite_var(bind(t, sig, s));
        Term rhs = bind_composite(as_composite_var(t), sig, s);
        if (!(lhs == rhs))
          report.record(detail::fail_eq("outer unit whisker is not linear", lhs, rhs, t,
                                        detail::subst_str(s), replay));
        return;
      }
      case Morphism::eta_inner: {
        const Term& t = plain_or_composite;  // plain
        Term lhs = map_var(bind(t, sig, s), sig);
        Term rhs = bind_composite(map_var(t, sig), sig, s);
        if (!(lhs == rhs))
          report.record(detail::fail_eq("inner unit whisker is not linear", lhs, rhs, t,
                                        detail::subst_str(s), replay));
        return;
      }
    }
  };

  detail::Sampler gen{sig, bounds, seed};
  for (std::uint64_t i = 0; i < bounds.samples; ++i) {
    Rng rng = Rng::split(seed, i);
    int n = rng.pick(bounds.ctx_max + 1);
    int m = rng.pick(bounds.ctx_max + 1);
    Substitution s;
    Term t;
    try {
      s = gen.subst(rng, n, m);
      if (morphism == Morphism::mu) {
        // a random two-layer term: outer structure over nested payloads
        ScopeCtx two_layer = ScopeCtx::boundary(Arity::term(), ScopeCtx::root(n));
        t = random_term_at(sig, two_layer, rng.pick(bounds.depth_max + 1), rng);
      } else {
        t = gen.term(rng, n, rng.pick(bounds.depth_max + 1));
      }
    } catch (const Ungenerable&) {
      continue;
    }
    check_pair(t, s, seed ^ i);
  }
  return report;
}

// --- explicit substitution family ----------------------------------------------------

// Naturality of the substitution family under reindexing of formal slots,
// checked in the reference calculus where the operators are interpreted by
// genuine substitution. For u : m -> n, substituting after relabeling the
// slots through u equals relabeling the argument vector through u and
// substituting.
inline EvalReport check_subst_family(const Signature& sig, int family_bound, const Bounds& bounds,
                                     std::uint64_t seed) {
  EvalReport report{law::sigma_naturality};
  std::optional<int> found = explicit_subst_bound(sig);
  if (!found || *found < family_bound)
    throw std::invalid_argument("signature does not carry subst0..subst" +
                                std::to_string(family_bound));

  // genuine n-slot substitution at base context c
  auto sigma = [](const reflam::Term& body, int c, const std::vector<reflam::Term>& args) {
    return reflam::subst(body, [&args, c](int i) {
      if (i < c) return reflam::Term::var(i);
      return args.at(static_cast<std::size_t>(i - c));
    });
  };

  std::uint64_t counter = 0;
  for (int m = 0; m <= family_bound; ++m) {
    for (int n = 0; n <= family_bound; ++n) {
      if (n == 0 && m > 0) continue;  // no functions m -> 0
      std::uint64_t function_count = 1;
      for (int i = 0; i < m; ++i) function_count *= static_cast<std::uint64_t>(n);
      for (std::uint64_t code = 0; code < function_count; ++code) {
        // decode u : m -> n from the code, base n
        std::vector<int> u(static_cast<std::size_t>(m));
        std::uint64_t rest = code;
        for (int i = 0; i < m; ++i) {
          u[static_cast<std::size_t>(i)] = n == 0 ? 0 : static_cast<int>(rest % n);
          rest /= static_cast<std::uint64_t>(n == 0 ? 1 : n);
        }
        for (std::uint64_t i = 0; i < bounds.samples; ++i) {
          Rng rng = Rng::split(seed, counter++);
          int c = rng.pick(bounds.ctx_max + 1);
          if (c + m == 0) continue;  // no lambda term in an empty context at depth 0
          reflam::Term body = reflam::random_term(c + m, rng.pick(bounds.depth_max + 1), rng);
          std::vector<reflam::Term> args;
          bool ok = true;
          for (int j = 0; j < n; ++j) {
            if (c == 0) {
              args.push_back(reflam::Term::lam(reflam::Term::var(0)));  // closed filler
            } else {
              args.push_back(reflam::random_term(c, rng.pick(bounds.depth_max + 1), rng));
            }
          }
          if (!ok) continue;
          ++report.samples;

          // relabel the slots of body through u, then substitute the n args
          reflam::Term relabeled = reflam::rename(
              body, [c, &u](int i) { return i < c ? i : c + u.at(static_cast<std::size_t>(i - c)); });
          reflam::Term lhs = sigma(relabeled, c, args);

          // pull the arguments back through u, then substitute m slots
          std::vector<reflam::Term> pulled;
          for (int j = 0; j < m; ++j) pulled.push_back(args.at(static_cast<std::size_t>(u[static_cast<std::size_t>(j)])));
          reflam::Term rhs = sigma(body, c, pulled);

          if (!(lhs == rhs))
            report.record(Failure{"substitution family is not natural under reindexing",
                                  reflam::print(lhs), reflam::print(rhs), reflam::print(body),
                                  "u code " + std::to_string(code) + " m=" + std::to_string(m) +
                                      " n=" + std::to_string(n),
                                  seed ^ counter});
        }
      }
    }
  }
  return report;
}

// --- the full suite -------------------------------------------------------------------

inline std::vector<EvalReport> run_all_laws(const Signature& sig, const Bounds& bounds,
                                            std::uint64_t seed,
                                            const BindOps& ops = BindOps::standard()) {
  std::vector<EvalReport> reports = check_monad_laws(sig, bounds, seed, ops);
  reports.push_back(check_strength_unit(sig, bounds, seed + 1, ops));
  reports.push_back(check_strength_composition(sig, bounds, seed + 2, ops));
  reports.push_back(check_linearity(sig, Morphism::mu, bounds, seed + 3));
  reports.push_back(check_linearity(sig, Morphism::eta_inner, bounds, seed + 4));
  reports.push_back(check_linearity(sig, Morphism::eta_outer, bounds, seed + 5));
  std::optional<int> family = explicit_subst_bound(sig);
  if (family) {
    Bounds family_bounds = bounds;
    family_bounds.samples = bounds.samples >= 2 ? bounds.samples / 2 : bounds.samples;
    reports.push_back(check_subst_family(sig, std::min(*family, 3), family_bounds, seed + 6));
  } else {
    reports.push_back(EvalReport{law::sigma_naturality});
  }
  return reports;
}

inline std::string format_report_line(const EvalReport& r) {
  return r.law_id + " " + std::to_string(r.samples) + " " + std::to_string(r.failure_count);
}

inline std::string format_report_sexpr(const EvalReport& r) {
  return "(law " + r.law_id + " " + std::to_string(r.samples) + " " +
         std::to_string(r.failure_count) + ")";
}

}  // namespace bindsig
