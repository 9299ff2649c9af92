#include <catch2/catch_amalgamated.hpp>

#include "bindsig/enumerate.hpp"
#include "bindsig/examples.hpp"
#include "bindsig/sexpr.hpp"
#include "bindsig/term.hpp"

using namespace bindsig;

namespace {

const Arity T = Arity::term();
const Signature kLambda = lambda_signature();
const Signature kJoin = join_signature();

Term lam(Term body) { return Term::op("abs", Arg::scope(Arg::term(std::move(body)))); }
Term ap(Term f, Term x) {
  return Term::op("app", Arg::tuple({Arg::term(std::move(f)), Arg::term(std::move(x))}));
}
Term jn(Term outer) { return Term::op("join", Arg::outer(Arg::term(std::move(outer)))); }
Term nested_var(Term inner) { return Term::var(Payload::nested(Arg::term(std::move(inner)), T)); }

}  // namespace

TEST_CASE("well-formedness") {
  SECTION("variables against the context") {
    CHECK(well_formed(Term::var(0), kLambda, 1));
    CHECK_FALSE(well_formed(Term::var(1), kLambda, 1));
    CHECK_FALSE(well_formed(Term::bound(0), kLambda, 3));
  }
  SECTION("the identity function is closed") {
    CHECK(well_formed(lam(Term::bound(0)), kLambda, 0));
  }
  SECTION("scope levels") {
    CHECK(well_formed(lam(lam(Term::bound(1))), kLambda, 0));
    CHECK_FALSE(well_formed(lam(Term::bound(1)), kLambda, 0));
    CHECK(well_formed(lam(Term::var(0)), kLambda, 1));
  }
  SECTION("unknown ops are rejected") {
    CHECK_FALSE(well_formed(jn(nested_var(Term::var(0))), kLambda, 1));
    CHECK(well_formed(jn(nested_var(Term::var(0))), kJoin, 1));
  }
  SECTION("free variables are illegal inside an outer structure") {
    CHECK_FALSE(well_formed(jn(Term::var(0)), kJoin, 1));
  }
  SECTION("shape mismatches are rejected") {
    CHECK_FALSE(well_formed(Term::op("app", Arg::term(Term::var(0))), kLambda, 1));
    CHECK_FALSE(well_formed(Term::op("abs", Arg::term(Term::var(0))), kLambda, 1));
  }
  SECTION("bound levels inside nested payloads see the ambient scopes") {
    // abs(join over a payload mentioning the enclosing binder)
    Term t = lam(jn(nested_var(Term::bound(0))));
    CHECK(well_formed(t, kJoin, 0));
    // but the outer structure's own scope does not leak into payloads:
    // join's outer is a term, no extra scope, so bound 1 is out of range
    Term bad = lam(jn(nested_var(Term::bound(1))));
    CHECK_FALSE(well_formed(bad, kJoin, 0));
  }
}

TEST_CASE("depth metric") {
  CHECK(depth(Term::var(0)) == 0);
  CHECK(depth(lam(Term::bound(0))) == 1);
  CHECK(depth(ap(lam(Term::bound(0)), Term::var(0))) == 2);
  // nested payload terms count toward depth
  CHECK(depth(jn(nested_var(lam(Term::bound(0))))) == 2);
  CHECK(depth(jn(nested_var(Term::var(0)))) == 1);
}

TEST_CASE("rename") {
  auto swap01 = [](int i) { return i == 0 ? 1 : (i == 1 ? 0 : i); };
  SECTION("payload relabeling") {
    CHECK(rename(Term::var(0), kLambda, swap01, 2) == Term::var(1));
  }
  SECTION("bound variables are rename-invariant") {
    Term t = lam(Term::bound(0));
    CHECK(rename(t, kLambda, swap01, 2) == t);
  }
  SECTION("renaming reaches nested payloads") {
    Term t = jn(nested_var(Term::var(0)));
    Term expect = jn(nested_var(Term::var(1)));
    CHECK(rename(t, kJoin, swap01, 2) == expect);
  }
  SECTION("out-of-range maps are rejected") {
    CHECK_THROWS_AS(rename(Term::var(0), kLambda, [](int) { return 5; }, 2), ContextError);
  }
}

TEST_CASE("bind basics") {
  Term u = lam(Term::bound(0));
  SECTION("variables are looked up") {
    Substitution s({u}, 0);
    CHECK(bind(Term::var(0), kLambda, s) == u);
  }
  SECTION("identity substitution is the identity") {
    Term t = ap(lam(ap(Term::bound(0), Term::var(0))), Term::var(1));
    CHECK(bind(t, kLambda, Substitution::identity(2)) == t);
  }
  SECTION("no capture: free indices keep their meaning under binders") {
    // (\x. 0) with 0 := y stays (\x. y); the bound variable is untouched
    Term t = lam(ap(Term::bound(0), Term::var(0)));
    Substitution s({Term::var(2)}, 3);
    Term expect = lam(ap(Term::bound(0), Term::var(2)));
    CHECK(bind(t, kLambda, s) == expect);
  }
  SECTION("substitution enters only the nested payloads of a join") {
    Term t = jn(nested_var(Term::var(0)));
    Substitution s({u}, 0);
    CHECK(bind(t, kJoin, s) == jn(nested_var(u)));
  }
  SECTION("context mismatch is an error") {
    CHECK_THROWS_AS(bind(Term::var(3), kLambda, Substitution::identity(2)), ContextError);
  }
}

TEST_CASE("lift") {
  SECTION("lift of the identity is the identity") {
    CHECK(lift(Substitution::identity(3)) == Substitution::identity(3));
  }
  SECTION("two lifts equal the double lift") {
    Substitution s({lam(Term::bound(0)), Term::var(0)}, 1);
    CHECK(lift(lift(s)) == s.lifted().lifted());
    CHECK(lift(lift(s)) == lift(s));
  }
}

TEST_CASE("flatten") {
  Term u = lam(Term::bound(0));
  Term v = Term::var(0);
  SECTION("a bare nested variable flattens to its payload") {
    CHECK(flatten(nested_var(u), kLambda) == u);
  }
  SECTION("map_var then flatten is the identity") {
    Term t = ap(Term::var(0), lam(ap(Term::bound(0), Term::var(1))));
    CHECK(flatten(map_var(t, kLambda), kLambda) == t);
  }
  SECTION("wrapping then flattening is the identity") {
    Term t = ap(v, v);
    CHECK(flatten(as_composite_var(t), kLambda) == t);
  }
  SECTION("flatten equals substitution by the payloads") {
    Term two_layer = ap(nested_var(u), nested_var(v));
    Term direct = flatten(two_layer, kLambda);
    Term via_bind = bind(ap(Term::var(0), Term::var(1)), kLambda, Substitution({u, v}, 1));
    CHECK(direct == via_bind);
  }
  SECTION("plain free payloads are rejected") {
    CHECK_THROWS_AS(flatten(Term::var(0), kLambda), ShapeError);
  }
}

TEST_CASE("rename agrees with bind through variables") {
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    Rng trial_rng = Rng::split(99, static_cast<std::uint64_t>(trial));
    int n = 1 + trial_rng.pick(3);
    int m = n + trial_rng.pick(2);
    Term t;
    try {
      t = random_term(kJoin, n, trial_rng.pick(4), trial_rng.next());
    } catch (const Ungenerable&) {
      continue;
    }
    std::vector<int> table;
    for (int i = 0; i < n; ++i) table.push_back(trial_rng.pick(m));
    auto f = [&table](int i) { return table[static_cast<std::size_t>(i)]; };
    std::vector<Term> vars;
    for (int i = 0; i < n; ++i) vars.push_back(Term::var(f(i)));
    CHECK(rename(t, kJoin, f, m) == bind(t, kJoin, Substitution(vars, m)));
  }
}

TEST_CASE("well-formedness is preserved by the operations") {
  Rng rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    Rng trial_rng = Rng::split(123, static_cast<std::uint64_t>(trial));
    int n = trial_rng.pick(3);
    int m = trial_rng.pick(3) + 1;
    Term t;
    Substitution s;
    try {
      t = random_term(kJoin, n, trial_rng.pick(4), trial_rng.next());
      s = random_substitution(kJoin, n, m, 2, trial_rng);
    } catch (const Ungenerable&) {
      continue;
    }
    REQUIRE(well_formed(t, kJoin, n));
    CHECK(well_formed(bind(t, kJoin, s), kJoin, m));
    CHECK(well_formed(rename(t, kJoin, [](int) { return 0; }, 1), kJoin, 1));
    Term wrapped = map_var(t, kJoin);
    CHECK(well_formed(flatten(wrapped, kJoin), kJoin, n));
  }
}

TEST_CASE("term serialization") {
  SECTION("canonical forms") {
    CHECK(print_term(Term::var(3)) == "(var 3)");
    CHECK(print_term(lam(Term::bound(0))) == "(op abs (scope (bnd 0)))");
    CHECK(print_term(ap(Term::var(0), Term::var(1))) ==
          "(op app (tuple (var 0) (var 1)))");
    CHECK(print_term(jn(nested_var(Term::var(0)))) ==
          "(op join (outer (nested (var 0))))");
  }
  SECTION("parse accepts arbitrary whitespace") {
    Term t = parse_term("( op  app\n (tuple (var 0)\t(var 1)) )", kLambda);
    CHECK(t == ap(Term::var(0), Term::var(1)));
  }
  SECTION("round-trip is exact") {
    Rng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
      Rng trial_rng = Rng::split(5, static_cast<std::uint64_t>(trial));
      Term t;
      try {
        t = random_term(kJoin, trial_rng.pick(3), trial_rng.pick(4), trial_rng.next());
      } catch (const Ungenerable&) {
        continue;
      }
      std::string printed = print_term(t);
      INFO(printed);
      CHECK(parse_term(printed, kJoin) == t);
      CHECK(print_term(parse_term(printed, kJoin)) == printed);
    }
  }
  SECTION("parse errors") {
    CHECK_THROWS_AS(parse_term("(op nosuch ())", kLambda), ParseError);
    CHECK_THROWS_AS(parse_term("(var x)", kLambda), ParseError);
    CHECK_THROWS_AS(parse_term("(var 0) junk", kLambda), ParseError);
  }
}

TEST_CASE("sum-shaped arguments") {
  Signature sig("choice", {{"pick", Arity::sum({{"left", T}, {"right", Arity::one()}})}});
  Term left = Term::op("pick", Arg::variant("left", Arg::term(Term::var(0))));
  Term right = Term::op("pick", Arg::variant("right", Arg::unit()));
  CHECK(well_formed(left, sig, 1));
  CHECK(well_formed(right, sig, 0));
  CHECK_FALSE(well_formed(Term::op("pick", Arg::variant("middle", Arg::unit())), sig, 0));

  SECTION("bind acts on the tagged variant") {
    Term u = Term::op("pick", Arg::variant("right", Arg::unit()));
    Substitution s({u}, 0);
    CHECK(bind(left, sig, s) == Term::op("pick", Arg::variant("left", Arg::term(u))));
    CHECK(bind(right, sig, s) == right);
  }
  SECTION("serialization round-trips variants") {
    CHECK(parse_term(print_term(left), sig) == left);
    CHECK(print_term(right) == "(op pick (variant right ()))");
  }
}
