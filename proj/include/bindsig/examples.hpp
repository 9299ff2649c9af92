#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bindsig/eval.hpp"
#include "bindsig/lambda_ref.hpp"
#include "bindsig/signature.hpp"

namespace bindsig {

// --- shipped signatures -------------------------------------------------------

inline Signature lambda_signature() {
  return Signature("lambda", {{"app", Arity::product({Arity::term(), Arity::term()})},
                              {"abs", Arity::derivative(Arity::term())}});
}

// lambda extended with a syntactic composition operator
inline Signature join_signature() {
  return lambda_signature().with_op("join", Arity::compose(Arity::term(), Arity::term()));
}

// The arity of the n-argument explicit substitution operator: a body under
// n binders together with n replacement terms.
inline Arity explicit_subst_arity(int n) {
  std::vector<Arity> factors;
  factors.push_back(derive_n(Arity::term(), n));
  for (int i = 0; i < n; ++i) factors.push_back(Arity::term());
  return Arity::product(std::move(factors));
}

// lambda plus the explicit substitution family subst0..substN.
inline Signature explicit_subst_signature(int max_arity = 3) {
  Signature sig = lambda_signature();
  std::vector<OpDecl> ops = sig.ops();
  for (int n = 0; n <= max_arity; ++n)
    ops.push_back({"subst" + std::to_string(n), explicit_subst_arity(n)});
  return Signature("lambda-xsubst-" + std::to_string(max_arity), std::move(ops));
}

// Largest N such that subst0..substN are all present with the expected
// arities; nullopt when subst0 is absent or any arity disagrees.
inline std::optional<int> explicit_subst_bound(const Signature& sig) {
  int n = 0;
  for (;; ++n) {
    const Arity* a = sig.find("subst" + std::to_string(n));
    if (!a) break;
    if (!(*a == explicit_subst_arity(n))) return std::nullopt;
  }
  if (n == 0) return std::nullopt;
  return n - 1;
}

// --- the reference representation ---------------------------------------------

struct LambdaMonad {
  using Value = reflam::Term;

  Value unit(int, int i) const { return reflam::Term::var(i); }

  Value tbind(const Value& v, int src, const std::function<Value(int)>& s, int) const {
    return reflam::subst(v, [&s, src](int i) {
      if (i < 0 || i >= src) throw ContextError("lambda substitution index out of range");
      return s(i);
    });
  }

  bool equal(const Value& a, const Value& b) const { return a == b; }
};

namespace detail {

using LamTranslated = Translated<reflam::Term>;

inline reflam::Term interp_app(const LamTranslated& tv, int) {
  return reflam::Term::app(tv.items()[0].value(), tv.items()[1].value());
}

// The scope body was evaluated with the binder as the last context index;
// the reference calculus wants it at index 0 with everything else shifted.
inline reflam::Term interp_abs(const LamTranslated& tv, int ambient) {
  reflam::Term body = tv.body().value();
  reflam::Term rebased =
      reflam::rename(body, [ambient](int i) { return i == ambient ? 0 : i + 1; });
  return reflam::Term::lam(rebased);
}

// join is the implicit composition made explicit: multiply the two layers.
inline reflam::Term interp_join(const LamTranslated& tv, int) {
  std::vector<reflam::Term> inners;
  for (std::size_t i = 0; i < tv.inner_count(); ++i) inners.push_back(tv.inner_part(i).value());
  return reflam::subst(tv.outer_part().value(), [&inners](int i) {
    if (i < 0 || i >= static_cast<int>(inners.size()))
      throw ContextError("outer structure index out of range");
    return inners[static_cast<std::size_t>(i)];
  });
}

// Genuine simultaneous substitution of the n most recently appended
// context slots (indices ambient..ambient+n-1).
inline reflam::Term interp_subst(const LamTranslated& tv, int ambient, int n) {
  if (n == 0) return tv.value();  // arity collapses to a bare term
  const LamTranslated* scoped = &tv.items()[0];
  for (int i = 0; i < n; ++i) scoped = &scoped->body();
  reflam::Term body = scoped->value();  // at context ambient + n
  std::vector<reflam::Term> args;
  for (int i = 0; i < n; ++i) args.push_back(tv.items()[static_cast<std::size_t>(i) + 1].value());
  return reflam::subst(body, [&args, ambient](int i) {
    if (i < ambient) return reflam::Term::var(i);
    int slot = i - ambient;
    if (slot >= static_cast<int>(args.size()))
      throw ContextError("substitution slot out of range");
    return args[static_cast<std::size_t>(slot)];
  });
}

}  // namespace detail

// Interpreters for every op of `sig` that this library recognizes by name
// and arity (app, abs, join, substN). Unrecognized ops get no interpreter;
// eval reports them if reached.
inline Representation<LambdaMonad> reference_rep_for(const Signature& sig) {
  Representation<LambdaMonad> rep{LambdaMonad{}, {}};
  for (const OpDecl& op : sig.ops()) {
    if (op.name == "app" && op.arity == Arity::product({Arity::term(), Arity::term()})) {
      rep.interp["app"] = detail::interp_app;
    } else if (op.name == "abs" && op.arity == Arity::derivative(Arity::term())) {
      rep.interp["abs"] = detail::interp_abs;
    } else if (op.name == "join" && op.arity == Arity::compose(Arity::term(), Arity::term())) {
      rep.interp["join"] = detail::interp_join;
    } else if (op.name.rfind("subst", 0) == 0) {
      std::string suffix = op.name.substr(5);
      if (!suffix.empty() && suffix.find_first_not_of("0123456789") == std::string::npos) {
        int n = std::stoi(suffix);
        if (op.arity == explicit_subst_arity(n))
          rep.interp[op.name] = [n](const detail::LamTranslated& tv, int ambient) {
            return detail::interp_subst(tv, ambient, n);
          };
      }
    }
  }
  return rep;
}

inline Representation<LambdaMonad> reference_lambda_rep() {
  return reference_rep_for(lambda_signature());
}

inline Representation<LambdaMonad> reference_lambda_join_rep() {
  return reference_rep_for(join_signature());
}

// --- the CLI registry -----------------------------------------------------------

// A named representation usable from the command line: evaluates a term
// over `sig` at context n and prints the target value.
using RepRunner = std::function<std::string(const Term&, const Signature&, int)>;

inline std::optional<RepRunner> find_representation(const std::string& name) {
  if (name == "self")
    return RepRunner([](const Term& t, const Signature& sig, int n) {
      return print_term(eval(t, sig, self_representation(sig), n));
    });
  if (name == "lambda-ref" || name == "lambda-join-ref") {
    bool with_join = name == "lambda-join-ref";
    return RepRunner([with_join](const Term& t, const Signature& sig, int n) {
      Representation<LambdaMonad> rep = reference_rep_for(sig);
      if (!with_join) rep.interp.erase("join");
      return reflam::print(eval(t, sig, rep, n));
    });
  }
  return std::nullopt;
}

inline std::vector<std::string> representation_names() {
  return {"lambda-ref", "lambda-join-ref", "self"};
}

}  // namespace bindsig
