#include <catch2/catch_amalgamated.hpp>

#include "bindsig/arity.hpp"
#include "bindsig/rng.hpp"
#include "bindsig/signature.hpp"

using namespace bindsig;

namespace {
const Arity T = Arity::term();
}

TEST_CASE("arity parsing") {
  SECTION("basic forms") {
    CHECK(parse_arity("T") == T);
    CHECK(parse_arity("1") == Arity::one());
    CHECK(parse_arity("T * T") == Arity::product({T, T}));
    CHECK(parse_arity("T . T") == Arity::compose(T, T));
    CHECK(parse_arity("T'") == Arity::derivative(T));
    CHECK(parse_arity("T''") == Arity::derivative(Arity::derivative(T)));
  }

  SECTION("algebraic sugar") {
    CHECK(parse_arity("T^(1)") == algebraic({1}));
    CHECK(parse_arity("T^(0,0)") == Arity::product({T, T}));
    CHECK(parse_arity("T^()") == Arity::one());
    CHECK(parse_arity("T^(2)") == derive_n(T, 2));
  }

  SECTION("precedence") {
    // postfix tightest, then composition (right associative), then product,
    // then sum
    CHECK(parse_arity("T . T * T") == Arity::product({Arity::compose(T, T), T}));
    CHECK(parse_arity("T . T . T") == Arity::compose(T, Arity::compose(T, T)));
    CHECK(parse_arity("T * T'") == Arity::product({T, Arity::derivative(T)}));
    CHECK(parse_arity("(T * T)'") == Arity::derivative(Arity::product({T, T})));
    CHECK(parse_arity("T * T * T") == Arity::product({T, T, T}));
    CHECK(parse_arity("(T * T) * T") == Arity::product({Arity::product({T, T}), T}));
  }

  SECTION("sums") {
    Arity s = parse_arity("T + 1");
    REQUIRE(s.kind() == Arity::Kind::sum);
    CHECK(s.tags() == std::vector<std::string>{"0", "1"});
    CHECK(parse_arity("left: T + right: T . T") ==
          Arity::sum({{"left", T}, {"right", Arity::compose(T, T)}}));
    CHECK(parse_arity("only: T") == Arity::sum({{"only", T}}));
  }

  SECTION("parens are grouping only") {
    CHECK(parse_arity("(T)") == T);
    CHECK(parse_arity("((T * T))") == Arity::product({T, T}));
  }

  SECTION("errors carry a position") {
    CHECK_THROWS_AS(parse_arity("T *"), ParseError);
    CHECK_THROWS_AS(parse_arity("T ^ 3"), ParseError);
    CHECK_THROWS_AS(parse_arity(""), ParseError);
    CHECK_THROWS_AS(parse_arity("T T"), ParseError);
    CHECK_THROWS_AS(parse_arity("(T"), ParseError);
    try {
      parse_arity("T * %");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.position() == 4);
    }
  }
}

TEST_CASE("canonicalization") {
  SECTION("empty product is the terminal arity") {
    CHECK(Arity::product({}) == Arity::one());
    CHECK(algebraic({}) == Arity::one());
  }
  SECTION("singleton products collapse") {
    CHECK(Arity::product({Arity::derivative(T)}) == Arity::derivative(T));
    CHECK(algebraic({1}) == Arity::derivative(T));
  }
  SECTION("no semantic identifications") {
    CHECK(Arity::derivative(Arity::one()) != Arity::one());
    CHECK(Arity::product({Arity::product({T, T}), T}) != Arity::product({T, T, T}));
  }
  SECTION("idempotent by construction") {
    // re-running the constructors over an already canonical tree changes nothing
    Arity a = parse_arity("T^(0,1) * (T . T')");
    Arity rebuilt = Arity::product({a.children()[0], a.children()[1]});
    CHECK(rebuilt == a);
  }
}

TEST_CASE("derive_n") {
  CHECK(derive_n(T, 2) == Arity::derivative(Arity::derivative(T)));
  CHECK(derive_n(T, 0) == T);
  CHECK(derive_n(Arity::one(), 1) == Arity::derivative(Arity::one()));
}

TEST_CASE("is_algebraic") {
  CHECK(is_algebraic(Arity::product({T, Arity::derivative(T)})));
  CHECK_FALSE(is_algebraic(Arity::compose(T, T)));
  CHECK(is_algebraic(Arity::one()));
  CHECK(is_algebraic(T));
  CHECK_FALSE(is_algebraic(Arity::derivative(Arity::one())));
  CHECK_FALSE(is_algebraic(Arity::sum({{"a", T}})));
  CHECK_FALSE(is_algebraic(Arity::product({T, Arity::compose(T, T)})));
}

TEST_CASE("algebraic arities satisfy is_algebraic") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> s;
    int len = rng.pick(5);
    for (int i = 0; i < len; ++i) s.push_back(rng.pick(4));
    CHECK(is_algebraic(algebraic(s)));
  }
}

namespace {
// random canonical arity expression, for round-trip coverage
Arity random_arity(Rng& rng, int fuel) {
  if (fuel <= 0) return rng.flip() ? Arity::term() : Arity::one();
  switch (rng.pick(6)) {
    case 0:
      return Arity::term();
    case 1:
      return Arity::one();
    case 2: {
      std::vector<Arity> fs;
      int k = 2 + rng.pick(2);
      for (int i = 0; i < k; ++i) fs.push_back(random_arity(rng, fuel - 1));
      return Arity::product(std::move(fs));
    }
    case 3:
      return Arity::derivative(random_arity(rng, fuel - 1));
    case 4:
      return Arity::compose(random_arity(rng, fuel - 1), random_arity(rng, fuel - 1));
    default: {
      std::vector<std::pair<std::string, Arity>> vs;
      int k = 1 + rng.pick(2);
      for (int i = 0; i < k; ++i)
        vs.emplace_back("v" + std::to_string(i), random_arity(rng, fuel - 1));
      return Arity::sum(std::move(vs));
    }
  }
}
}  // namespace

TEST_CASE("print/parse round-trip on canonical arities") {
  Rng rng(20240601);
  for (int trial = 0; trial < 500; ++trial) {
    Arity a = random_arity(rng, 4);
    std::string printed = print_arity(a);
    INFO(printed);
    Arity back = parse_arity(printed);
    CHECK(back == a);
    CHECK(print_arity(back) == printed);
  }
}

TEST_CASE("signature validation") {
  SECTION("the lambda signature is valid") {
    Signature sig("lambda", {{"app", Arity::product({T, T})}, {"abs", Arity::derivative(T)}});
    CHECK(validate_signature(sig).ok());
  }
  SECTION("duplicate names are reported") {
    Signature sig("bad", {{"f", T}, {"f", T}});
    ValidationReport r = validate_signature(sig);
    REQUIRE_FALSE(r.ok());
    CHECK(r.errors.front().find("f") != std::string::npos);
  }
  SECTION("the empty signature is valid") { CHECK(validate_signature(Signature("empty", {})).ok()); }
  SECTION("signature equality ignores declaration order") {
    Signature a("s", {{"f", T}, {"g", Arity::one()}});
    Signature b("s", {{"g", Arity::one()}, {"f", T}});
    CHECK(a == b);
  }
}

TEST_CASE("signature files") {
  const std::string text =
      "signature demo\n"
      "# a comment\n"
      "\n"
      "app : T * T\n"
      "abs : T'   # trailing comment\n";
  Signature sig = parse_signature_text(text);
  CHECK(sig.name() == "demo");
  REQUIRE(sig.size() == 2);
  CHECK(*sig.find("app") == Arity::product({T, T}));
  CHECK(*sig.find("abs") == Arity::derivative(T));

  SECTION("round-trips through print") {
    CHECK(parse_signature_text(print_signature(sig)) == sig);
  }
  SECTION("missing header is an error") {
    CHECK_THROWS_AS(parse_signature_text("app : T * T\n"), ParseError);
  }
  SECTION("bad arity points at the line") {
    try {
      parse_signature_text("signature x\nf : T *\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
}

TEST_CASE("signature merging") {
  Signature lambda("lambda", {{"app", Arity::product({T, T})}, {"abs", Arity::derivative(T)}});
  Signature lambda_join = lambda.with_op("join", Arity::compose(T, T));

  SECTION("extension along the full overlap") {
    MergeResult r = merge_signatures(lambda, lambda_join, SignatureInclusion::identity(lambda),
                                     {lambda, lambda_join,
                                      {{"app", "app"}, {"abs", "abs"}}});
    CHECK(r.merged == lambda_join);
    CHECK(r.merged.size() == lambda.size() + lambda_join.size() - lambda.size());
    CHECK(validate_inclusion(r.from_first).ok());
    CHECK(validate_inclusion(r.from_second).ok());
    CHECK(r.from_second.apply("join") == "join");
  }

  SECTION("disjoint union over the empty signature") {
    Signature empty("empty", {});
    Signature c("consts", {{"c", Arity::one()}});
    Signature d("consts2", {{"d", Arity::one()}});
    MergeResult r = merge_signatures(c, d, {empty, c, {}}, {empty, d, {}});
    CHECK(r.merged.size() == 2);
    CHECK(r.merged.has("c"));
    CHECK(r.merged.has("d"));
  }

  SECTION("idempotent along the identity") {
    MergeResult r = merge_signatures(lambda, lambda, SignatureInclusion::identity(lambda),
                                     SignatureInclusion::identity(lambda));
    CHECK(r.merged == lambda);
  }

  SECTION("colliding op names outside the shared part are qualified") {
    Signature empty("empty", {});
    Signature s1("s1", {{"f", T}});
    Signature s2("s2", {{"f", Arity::one()}});
    MergeResult r = merge_signatures(s1, s2, {empty, s1, {}}, {empty, s2, {}});
    CHECK(r.merged.size() == 2);
    CHECK(r.merged.has("f"));
    CHECK(r.merged.has("s2.f"));
    CHECK(r.from_second.apply("f") == "s2.f");
    CHECK(validate_inclusion(r.from_second).ok());
  }

  SECTION("arity mismatch on a shared op is an error") {
    Signature base("base", {{"f", T}});
    Signature s1("s1", {{"f", T}});
    Signature s2("s2", {{"g", Arity::one()}});
    // claim f maps to g, whose arity differs
    CHECK_THROWS_AS(merge_signatures(s1, s2, {base, s1, {{"f", "f"}}}, {base, s2, {{"f", "g"}}}),
                    MergeError);
  }

  SECTION("merged inclusions satisfy the cardinality identity") {
    Signature base("base", {{"app", Arity::product({T, T})}});
    Signature s1 = base.with_op("abs", Arity::derivative(T));
    Signature s2 = base.with_op("join", Arity::compose(T, T));
    SignatureInclusion i1{base, s1, {{"app", "app"}}};
    SignatureInclusion i2{base, s2, {{"app", "app"}}};
    MergeResult r = merge_signatures(s1, s2, i1, i2);
    CHECK(r.merged.size() == s1.size() + s2.size() - base.size());
    CHECK(validate_inclusion(r.from_first).ok());
    CHECK(validate_inclusion(r.from_second).ok());
  }
}
