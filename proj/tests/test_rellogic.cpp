#include "gce/claims.hpp"
#include "gce/game.hpp"
#include "gce/rellogic.hpp"
#include "logic_corpus.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace gce;
using namespace gce::logic;
using namespace gce::testing;

namespace {

Term x(const char* n) { return Term::var(n); }
Term plus(Term a, Term b) { return Term::op("+", {std::move(a), std::move(b)}); }
Term act(const char* a, Term t) { return Term::op(a, {std::move(t)}); }
Atom le(Term a, Term b) { return Atom{"<=", std::nullopt, {std::move(a), std::move(b)}}; }
Atom eq(Term a, Term b) { return Atom{"=", std::nullopt, {std::move(a), std::move(b)}}; }

ProofNode leaf(const Context& c, Atom a) {
    ProofNode n;
    n.rule = Rule::Ctx;
    n.conclusion = Judgement{c, 0, std::move(a)};
    return n;
}

Context xyz_chain() { return Context{{"x", "y", "z"}, {le(x("x"), x("y")), le(x("y"), x("z"))}}; }

ProofNode transitivity(const Context& c) {
    ProofNode n;
    n.rule = Rule::RelAx;
    n.axiom = "pre.trans";
    n.substitution = {{"x", x("x")}, {"y", x("y")}, {"z", x("z")}};
    n.conclusion = Judgement{c, 0, le(x("x"), x("z"))};
    n.premises = {leaf(c, le(x("x"), x("y"))), leaf(c, le(x("y"), x("z")))};
    return n;
}

// Union of state sets as a join term, bottom for the empty set.
Term set_term(const std::vector<std::string>& names, unsigned mask) {
    std::optional<Term> t;
    for (std::size_t i = 0; i < names.size(); ++i)
        if (mask >> i & 1U) t = t ? plus(*t, Term::var(names[i])) : Term::var(names[i]);
    return t ? *t : Term::op("bot");
}

void expect_rechecks(const Theory& th, const Judgement& goal, const SearchResult& r) {
    REQUIRE(r.outcome == SearchOutcome::Found);
    REQUIRE(r.proof.has_value());
    CHECK(check_proof(th, *r.proof) == goal);
}

}  // namespace

TEST_CASE("a context edge is a one-node proof") {
    const Theory th = trace_theory({"a"});
    const Context c = xyz_chain();
    CHECK(check_proof(th, leaf(c, le(x("x"), x("y")))) == Judgement{c, 0, le(x("x"), x("y"))});
    CHECK_THROWS_AS(check_proof(th, leaf(c, le(x("x"), x("z")))), ProofRejected);
}

TEST_CASE("transitivity chains two context leaves") {
    const Theory th = trace_theory({"a"});
    const Context c = xyz_chain();
    CHECK(check_proof(th, transitivity(c)).atom == le(x("x"), x("z")));
}

TEST_CASE("the distribution axiom instantiated at depth one") {
    const Theory th = trace_theory({"a"});
    const Context c{{"u", "v"}, {}};
    ProofNode n;
    n.rule = Rule::Ax;
    n.axiom = "a.join";
    n.substitution = {{"x", x("u")}, {"y", x("v")}};
    n.conclusion = Judgement{c, 1, eq(act("a", plus(x("u"), x("v"))), plus(act("a", x("u")), act("a", x("v"))))};
    CHECK(check_proof(th, n).depth == 1);
    n.conclusion.depth = 0;
    CHECK_THROWS_AS(check_proof(th, n), ProofRejected);
}

TEST_CASE("rejections name the rule, the condition and the path") {
    const Theory th = trace_theory({"a"});
    const Context c = xyz_chain();
    ProofNode bad = transitivity(c);
    bad.premises[1].conclusion.atom = le(x("z"), x("y"));
    try {
        check_proof(th, bad);
        FAIL("accepted a wrong premise");
    } catch (const ProofRejected& e) {
        CHECK(e.rule() == "RelAx");
        CHECK(e.path() == "/");
        CHECK(e.condition().find("premise 1") != std::string::npos);
    }
    ProofNode wrong_leaf = transitivity(c);
    wrong_leaf.substitution["y"] = x("z");
    wrong_leaf.premises[0].conclusion.atom = le(x("x"), x("z"));
    wrong_leaf.premises[1].conclusion.atom = le(x("z"), x("z"));
    try {
        check_proof(th, wrong_leaf);
        FAIL("accepted an edge outside the context");
    } catch (const ProofRejected& e) {
        CHECK(e.rule() == "Ctx");
        CHECK(e.path() == "/0/");
    }
}

TEST_CASE("substitutions must have the uniform depth of the rule") {
    const Theory th = trace_theory({"a"});
    const Context c{{"y"}, {}};
    ProofNode n;
    n.rule = Rule::RelAx;
    n.axiom = "pre.refl";
    n.substitution = {{"x", act("a", x("y"))}};
    n.conclusion = Judgement{c, 0, le(act("a", x("y")), act("a", x("y")))};
    CHECK_THROWS_AS(check_proof(th, n), ProofRejected);
    n.conclusion.depth = 1;
    CHECK(check_proof(th, n).depth == 1);
}

TEST_CASE("monotonicity of an action") {
    const Theory th = trace_theory({"a"});
    const Context c{{"x", "y"}, {le(x("x"), x("y"))}};
    ProofNode n;
    n.rule = Rule::Mor;
    n.operation = "a";
    n.conclusion = Judgement{c, 1, le(act("a", x("x")), act("a", x("y")))};
    n.premises = {leaf(c, le(x("x"), x("y")))};
    CHECK(check_proof(th, n).atom == n.conclusion.atom);
    n.operation = "+";
    CHECK_THROWS_AS(check_proof(th, n), ProofRejected);
}

TEST_CASE("search returns context edges directly") {
    const Theory th = trace_theory({"a"});
    const Judgement goal{xyz_chain(), 0, le(x("x"), x("y"))};
    const auto r = prove(th, goal, 100);
    expect_rechecks(th, goal, r);
    CHECK(r.proof->rule == Rule::Ctx);
    CHECK(r.proof->premises.empty());
}

TEST_CASE("search for an action below a join") {
    const Theory th = trace_theory({"a"});
    const Judgement goal = parse_judgement("{x <= y} |-1 a(x) <= a(y) + a(z)", th.signature);
    CHECK(goal.context.variables == std::vector<std::string>{"x", "y", "z"});
    expect_rechecks(th, goal, prove(th, goal, 1000));
}

TEST_CASE("search does not invent an order between unrelated variables") {
    const Theory th = trace_theory({"a"});
    const Judgement goal = parse_judgement("{} |-1 a(x) <= a(y)", th.signature);
    const auto r = prove(th, goal, 1000);
    CHECK(r.outcome == SearchOutcome::NotFound);
    CHECK_FALSE(r.proof.has_value());
}

TEST_CASE("an exhausted budget is distinct from a refutation") {
    const Theory th = trace_theory({"a"});
    const Judgement goal = parse_judgement("{x <= y, y <= z} |-1 a(x) <= a(z) + a(y)", th.signature);
    CHECK(prove(th, goal, 2).outcome == SearchOutcome::BudgetExhausted);
    CHECK(prove(th, goal, 10000).outcome == SearchOutcome::Found);
}

TEST_CASE("goals above depth one and malformed goals are refused") {
    const Theory th = trace_theory({"a"});
    Judgement goal = parse_judgement("{} |-1 a(x) <= a(x)", th.signature);
    goal.depth = 2;
    CHECK_THROWS_AS(prove(th, goal, 10), Error);
    Judgement shallow = parse_judgement("{} |-0 x <= x", th.signature);
    shallow.atom = le(act("a", x("x")), x("x"));
    CHECK_THROWS_AS(prove(th, shallow, 10), Error);
}

TEST_CASE("serialized proofs are stable") {
    const Theory th = trace_theory({"a"});
    const std::string expected =
        "context {x, y, z | x <= y, y <= z}\n"
        "RelAx pre.trans {x := x, y := y, z := z} |-0 x <= z\n"
        "  Ctx |-0 x <= y\n"
        "  Ctx |-0 y <= z\n";
    CHECK(serialize(transitivity(xyz_chain())) == expected);

    const Judgement goal = parse_judgement("{x <= y} |-1 a(x) <= a(y) + a(z)", th.signature);
    const auto r = prove(th, goal, 1000);
    REQUIRE(r.proof);
    CHECK(serialize(*r.proof) ==
          "context {x, y, z | x <= y}\n"
          "RelAx pre.trans {x := a(x), y := a(y + z), z := a(y) + a(z)} |-1 a(x) <= a(y) + a(z)\n"
          "  Mor a |-1 a(x) <= a(y + z)\n"
          "    RelAx pre.trans {x := x, y := y, z := y + z} |-0 x <= y + z\n"
          "      Ctx |-0 x <= y\n"
          "      Ax join.upper.l {x := y, y := z} |-0 y <= y + z\n"
          "  RelAx pre.trans {x := a(y + z), y := a(y) + a(z), z := a(y) + a(z)} |-1 a(y + z) <= a(y) + a(z)\n"
          "    RelAx eq.le {x := a(y + z), y := a(y) + a(z)} |-1 a(y + z) <= a(y) + a(z)\n"
          "      Ax a.join {x := y, y := z} |-1 a(y + z) = a(y) + a(z)\n"
          "    Ax join.least {x := a(y), y := a(z), z := a(y) + a(z)} |-1 a(y) + a(z) <= a(y) + a(z)\n"
          "      Ax join.upper.l {x := a(y), y := a(z)} |-1 a(y) <= a(y) + a(z)\n"
          "      Ax join.upper.r {x := a(y), y := a(z)} |-1 a(z) <= a(y) + a(z)\n");
}

TEST_CASE("judgements round-trip through text") {
    const Theory th = trace_theory({"a", "b"});
    const Judgement j = parse_judgement("{x, y, z | x <= y + z, y = bot} |-1 a(x + bot) + b(y) <= a(y)", th.signature);
    CHECK(j.context.edges.size() == 2);
    CHECK(parse_judgement(format_judgement(j), th.signature) == j);
    CHECK_THROWS_AS(parse_judgement("{} |-1 c(x) <= x", th.signature), Error);
}

TEST_CASE("probabilistic theory: checker accepts barycentric instances") {
    const Theory th = ptrace_theory({"a"}, {rat(1, 2), rat(1, 3), rat(2, 3)});
    CHECK_FALSE(th.searchable);
    const Judgement goal = parse_judgement("{x =[1/4] y, u =[1/2] w} |-0 x +[1/3] u =[5/12] y +[1/3] w", th.signature);
    ProofNode n;
    n.rule = Rule::Ax;
    n.axiom = "bary.interp";
    n.params = {{"p", rat(1, 3)}, {"e", rat(1, 4)}, {"d", rat(1, 2)}};
    n.substitution = {{"x", x("x")}, {"y", x("y")}, {"u", x("u")}, {"w", x("w")}};
    n.conclusion = goal;
    n.premises = {leaf(goal.context, goal.context.edges[0]), leaf(goal.context, goal.context.edges[1])};
    CHECK(check_proof(th, n) == goal);
    n.params["e"] = rat(1, 2);
    CHECK_THROWS_AS(check_proof(th, n), ProofRejected);

    ProofNode mix;
    mix.rule = Rule::Ax;
    mix.axiom = "a.mix";
    mix.params = {{"p", rat(1, 2)}};
    mix.substitution = {{"x", x("s")}, {"y", x("t")}};
    mix.conclusion = parse_judgement("{s, t |} |-1 a(s +[1/2] t) = a(s) +[1/2] a(t)", th.signature);
    CHECK(check_proof(th, mix).depth == 1);
    CHECK_THROWS_AS(prove(th, mix.conclusion, 100), Error);
}

TEST_CASE("admissibility bridge on the three-state system") {
    auto g = logic_system("fig1");
    const auto& det = g->det();
    const Claim pos = parse_claim(det, "{x2} <= {x1}");
    const std::vector<Claim> z = parse_claims(det, "{x1} <= {x1,x2,x3}");
    const auto r = admissible_via_logic(det, pos, z, 10000);
    REQUIRE(r.outcome == SearchOutcome::Found);
    CHECK(g->admissible(pos, z).admissible);
    const auto enc = encode_admissibility(det, pos, z);
    CHECK(format_judgement(enc.goal) == "{x1, x2, x3 | x1 <= (x1 + x2) + x3} |-1 a(x1) <= a((x1 + x2) + x3)");
    CHECK(check_proof(enc.theory, *r.proof) == enc.goal);
}

TEST_CASE("a live state below the empty set has no proof") {
    auto g = logic_system("chain");
    const auto& det = g->det();
    const Claim pos = parse_claim(det, "{x} <= {}");
    CHECK_FALSE(g->admissible(pos, {}).admissible);
    CHECK(admissible_via_logic(det, pos, {}, 10000).outcome == SearchOutcome::NotFound);
}

TEST_CASE("reflexive positions are proved by reflexivity") {
    auto g = logic_system("fig1");
    const auto& det = g->det();
    const auto r = admissible_via_logic(det, parse_claim(det, "{x1,x3} <= {x1,x3}"), {}, 100);
    REQUIRE(r.proof);
    CHECK(r.proof->rule == Rule::RelAx);
    CHECK(r.proof->axiom == "pre.refl");
}

TEST_CASE("every curated query has a proof that re-checks") {
    for (const auto& q : curated_logic_queries()) {
        CAPTURE(q.system, q.position, q.claims);
        auto g = logic_system(q.system);
        const auto& det = g->det();
        const Claim pos = parse_claim(det, q.position);
        const auto z = parse_claims(det, q.claims);
        CHECK(g->admissible(pos, z).admissible);
        const auto enc = encode_admissibility(det, pos, z);
        expect_rechecks(enc.theory, enc.goal, prove(enc.theory, enc.goal, 100000));
    }
}

TEST_CASE("found proofs imply admissibility on random systems") {
    Rng rng(20261016);
    std::size_t found = 0, incomplete = 0;
    for (int i = 0; i < 300; ++i) {
        auto g = std::make_shared<const Game>(det_of(shared(random_lts(rng, 3, 1 + i % 2, 0.35)), Semantics::TraceInc));
        const auto& det = g->det();
        const std::size_t n = det.size();
        const Claim pos = PairClaim{uniform(rng, 0, n - 1), uniform(rng, 0, n - 1)};
        std::vector<Claim> z;
        for (std::size_t k = uniform(rng, 0, 4); k > 0; --k) z.push_back(PairClaim{uniform(rng, 0, n - 1), uniform(rng, 0, n - 1)});
        const bool admissible = g->admissible(pos, z).admissible;
        const auto enc = encode_admissibility(det, pos, z);
        const auto r = prove(enc.theory, enc.goal, 100000);
        REQUIRE(r.outcome != SearchOutcome::BudgetExhausted);
        if (r.proof) {
            ++found;
            CHECK(admissible);
            CHECK(check_proof(enc.theory, *r.proof) == enc.goal);
        } else if (admissible) {
            ++incomplete;
        }
    }
    CHECK(found > 50);
    CHECK(incomplete == 0);
}

TEST_CASE("union closure rules are derivable at depth zero") {
    const Theory th = trace_theory({"a"});
    const std::vector<std::string> names{"p", "q", "r"};
    auto derivable = [&](std::vector<Atom> hyps, Atom goal) {
        const Judgement j{Context{names, std::move(hyps)}, 0, std::move(goal)};
        const auto r = prove(th, j, 100000);
        return r.proof && check_proof(th, *r.proof) == j;
    };
    for (unsigned b = 0; b < 8; ++b) {
        CHECK(derivable({}, le(set_term(names, 0), set_term(names, b))));
        for (unsigned c = 0; c < 8; ++c) CHECK(derivable({}, le(set_term(names, b), set_term(names, b | c))));
    }
    for (unsigned a = 0; a < 8; ++a)
        for (unsigned b = 0; b < 8; ++b)
            for (unsigned c = 0; c < 8; ++c) {
                CHECK(derivable({le(set_term(names, a), set_term(names, b)), le(set_term(names, b), set_term(names, c))},
                                le(set_term(names, a), set_term(names, c))));
                const unsigned d = (a + 3 * c) % 8;
                CHECK(derivable({le(set_term(names, a), set_term(names, b)), le(set_term(names, c), set_term(names, d))},
                                le(set_term(names, a | c), set_term(names, b | d))));
            }
}
