#include "gce/game.hpp"
#include "gce/oracle.hpp"
#include "gce/refinement.hpp"
#include "gce/theorem_check.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace gce;
using namespace gce::testing;

namespace {

std::shared_ptr<const Game> game_of(std::shared_ptr<const Model> m, Semantics s, DetOptions o = {}) {
    return std::make_shared<const Game>(det_of(std::move(m), s, o));
}

std::shared_ptr<const Model> chain_model() {
    return shared(parse_model(R"({
  "kind": "lts", "states": ["x", "y", "z"], "labels": ["a"],
  "transitions": [{"from": "x", "label": "a", "to": "y"}, {"from": "y", "label": "a", "to": "y"}]
})"));
}

}  // namespace

TEST_CASE("bluff check on trace inclusion") {
    auto g = game_of(chain_model(), Semantics::TraceInc);
    const auto& det = g->det();
    const auto empty = det.index_of(Point{});
    CHECK_FALSE(g->bluff_check(PairClaim{set_point(det, {"x"}), empty}));
    CHECK(g->bluff_check(PairClaim{empty, set_point(det, {"y"})}));
    CHECK(g->bluff_check(PairClaim{empty, empty}));
}

TEST_CASE("bluff check passes for quantitative instances at bound zero") {
    auto m = shared(parse_model(R"({"kind": "lmc", "states": ["s", "t"], "labels": ["a", "b"],
      "transitions": [{"from": "s", "label": "a", "to": "s", "prob": "1"},
                      {"from": "t", "label": "b", "to": "t", "prob": "1"}]})"));
    auto g = game_of(m, Semantics::PTrace);
    CHECK(g->bluff_check(BoundedClaim{0, 1, Rational(0)}));
}

TEST_CASE("admissibility on the trace-inclusion view of the three-state automaton") {
    auto g = game_of(fig1_lts(), Semantics::TraceInc);
    const auto& det = g->det();
    const Claim pos = PairClaim{set_point(det, {"x2"}), set_point(det, {"x1"})};
    const Claim move = PairClaim{set_point(det, {"x1"}), set_point(det, {"x1", "x2", "x3"})};
    CHECK(g->admissible(pos, {move}).admissible);
    const Claim reverse = PairClaim{set_point(det, {"x1"}), set_point(det, {"x2"})};
    CHECK_FALSE(g->admissible(reverse, {}).admissible);
}

TEST_CASE("a nonempty set is never below the empty set after a step, whatever the bluff-free claims") {
    auto g = game_of(chain_model(), Semantics::TraceInc);
    const auto& det = g->det();
    const auto empty = det.index_of(Point{});
    const Claim pos = PairClaim{set_point(det, {"x"}), empty};
    std::vector<Claim> everything;
    for (std::size_t i = 0; i < det.size(); ++i)
        for (std::size_t j = 0; j < det.size(); ++j)
            if (g->bluff_check(PairClaim{i, j})) everything.push_back(PairClaim{i, j});
    const auto verdict = g->admissible(pos, everything);
    CHECK_FALSE(verdict.admissible);
    CHECK_FALSE(verdict.explanation.empty());
}

TEST_CASE("reflexive positions are admissible with no claims") {
    auto g = game_of(fig1_nfa(), Semantics::BTopNFA);
    for (std::size_t i = 0; i < g->det().size(); ++i) CHECK(g->admissible(PairClaim{i, i}, {}).admissible);
}

TEST_CASE("finite winning regions on a chain") {
    auto g = game_of(chain_model(), Semantics::TraceInc);
    const auto& det = g->det();
    const auto x = set_point(det, {"x"}), z = set_point(det, {"z"});
    const auto report = g->winning_region_n(5);
    for (std::size_t k = 0; k <= 5; ++k) CHECK(report.won_at(k, z, x));
    CHECK_FALSE(report.won_at(1, x, z));
    CHECK(report.won_at(0, x, z));
}

TEST_CASE("round zero region is the bluff region") {
    auto g = game_of(chain_model(), Semantics::TraceInc);
    const auto report = g->winning_region_n(0);
    const auto& det = g->det();
    for (std::size_t i = 0; i < det.size(); ++i)
        for (std::size_t j = 0; j < det.size(); ++j) CHECK(report.won(i, j) == g->bluff_check(PairClaim{i, j}));
}

TEST_CASE("bisimilar loops stay related at every depth") {
    auto m = shared(parse_model(R"({"kind": "lts", "states": ["p", "q"], "labels": ["a"],
      "transitions": [{"from": "p", "label": "a", "to": "p"}, {"from": "q", "label": "a", "to": "q"}]})"));
    auto g = game_of(m, Semantics::Bisim);
    const auto report = g->winning_region_n(5);
    for (std::size_t k = 0; k <= 5; ++k) CHECK(report.won_at(k, 0, 1));
    CHECK(g->winning_region_inf().won(0, 1));
}

TEST_CASE("infinite region of a system without transitions is reflexive") {
    auto m = shared(parse_model(R"({"kind": "lts", "states": ["p", "q"], "labels": ["a"]})"));
    auto g = game_of(m, Semantics::Bisim);
    const auto report = g->winning_region_inf();
    CHECK(report.won(0, 0));
    CHECK(report.won(1, 1));
}

TEST_CASE("three-state automaton under the bisimulation topology") {
    auto g = game_of(fig1_nfa(), Semantics::BTopNFA);
    const auto& det = g->det();
    const auto x1 = set_point(det, {"x1"}), x2 = set_point(det, {"x2"}), all = set_point(det, {"x1", "x2", "x3"});
    const auto report = g->winning_region_inf();
    CHECK(report.won(x2, x1));
    CHECK_FALSE(report.won(x1, x2));

    SECTION("the Duplicator moves repeat at the full set") {
        const Claim start = NearnessClaim{x2, {x1}};
        const auto first = g->duplicator_move(report, start, std::nullopt);
        REQUIRE(first == std::vector<Claim>{PairClaim{x1, all}});
        CHECK(g->admissible(start, first).admissible);
        const auto second = g->duplicator_move(report, first.front(), std::nullopt);
        REQUIRE(second == std::vector<Claim>{PairClaim{all, all}});
        CHECK(g->admissible(first.front(), second).admissible);
        CHECK(g->duplicator_move(report, second.front(), std::nullopt) == second);
    }

    SECTION("the losing direction is refuted by the empty word") {
        const auto word = g->distinguishing_word(report, x1, x2);
        REQUIRE(word.has_value());
        CHECK(word->empty());
        CHECK_FALSE(g->distinguishing_word(report, x2, x1).has_value());
    }
}

TEST_CASE("distinguishing words of trace inclusion are traces of one side only") {
    Rng rng(7);
    for (int round = 0; round < 30; ++round) {
        auto m = shared(random_lts(rng, 3, 2));
        auto g = game_of(m, Semantics::TraceInc);
        const auto report = g->winning_region_inf();
        const auto& det = g->det();
        for (std::size_t i = 0; i < det.size(); ++i)
            for (std::size_t j = 0; j < det.size(); ++j) {
                auto word = g->distinguishing_word(report, i, j);
                if (report.won(i, j)) {
                    CHECK_FALSE(word.has_value());
                    continue;
                }
                REQUIRE(word.has_value());
                const auto& lhs = det.points[i].support;
                const auto& rhs = det.points[j].support;
                CHECK(oracle::traces_n(*m, lhs, word->size()).count(*word) == 1);
                CHECK(oracle::traces_n(*m, rhs, word->size()).count(*word) == 0);
            }
    }
}

TEST_CASE("value tables") {
    SECTION("one-step action distributions") {
        auto m = shared(parse_model(R"({"kind": "lmc", "states": ["s", "t"], "labels": ["a", "b"],
          "transitions": [{"from": "s", "label": "a", "to": "s", "prob": "1/2"},
                          {"from": "s", "label": "b", "to": "s", "prob": "1/2"},
                          {"from": "t", "label": "a", "to": "t", "prob": "1/4"},
                          {"from": "t", "label": "b", "to": "t", "prob": "3/4"}]})"));
        auto g = game_of(m, Semantics::PTrace);
        const auto& det = g->det();
        const auto v = g->value_table(1);
        CHECK(v.value(state_point(det, "s"), state_point(det, "t")) == rat(1, 4));
        for (std::size_t i = 0; i < det.size(); ++i) CHECK(v.value(i, i) == 0);
    }
    SECTION("simulation under discrete labels") {
        auto m = shared(parse_model(R"({"kind": "mlts", "states": ["p", "q", "r"], "labels": ["a", "b"],
          "transitions": [{"from": "p", "label": "a", "to": "p"},
                          {"from": "q", "label": "a", "to": "q"}, {"from": "q", "label": "b", "to": "q"},
                          {"from": "r", "label": "b", "to": "r"}]})"));
        auto g = game_of(m, Semantics::QSim);
        const auto v = g->value_table(std::nullopt);
        CHECK(v.value(0, 1) == 0);
        CHECK(v.value(1, 0) == 1);
        CHECK(v.value(0, 2) == 1);
    }
    SECTION("label distances propagate") {
        auto m = shared(parse_model(R"({"kind": "mlts", "metric_kind": "pseudometric", "states": ["p", "q", "z"],
          "labels": ["a", "b"], "label_metric": [["a", "b", "1/4"]],
          "transitions": [{"from": "p", "label": "a", "to": "z"}, {"from": "q", "label": "b", "to": "z"}]})"));
        auto g = game_of(m, Semantics::QSim);
        CHECK(g->value_table(1).value(0, 1) == rat(1, 4));
    }
}

TEST_CASE("stepwise and flat trace distances differ on a mixing chain") {
    auto m = shared(parse_model(R"({"kind": "lmc", "states": ["s", "t", "z", "s2", "u"], "labels": ["a", "b"],
      "transitions": [{"from": "s", "label": "a", "to": "t", "prob": "1"},
                      {"from": "t", "label": "a", "to": "z", "prob": "1/2"},
                      {"from": "t", "label": "b", "to": "z", "prob": "1/2"},
                      {"from": "z", "label": "a", "to": "z", "prob": "1"},
                      {"from": "s2", "label": "a", "to": "u", "prob": "1/2"},
                      {"from": "s2", "label": "b", "to": "u", "prob": "1/2"},
                      {"from": "u", "label": "a", "to": "u", "prob": "1"}]})"));
    auto g = game_of(m, Semantics::PTrace);
    const auto& det = g->det();
    const auto s = state_point(det, "s"), s2 = state_point(det, "s2");
    CHECK(g->value_table(2).value(s, s2) == rat(3, 4));
    const auto flat = oracle::total_variation(oracle::trace_distribution(*m, {{0, Rational(1)}}, 2),
                                              oracle::trace_distribution(*m, {{3, Rational(1)}}, 2));
    CHECK(flat == rat(1, 2));
}

TEST_CASE("admissibility is monotone in the claim set") {
    Rng rng(11);
    for (int round = 0; round < 60; ++round) {
        const bool nfa = round % 2 == 1;
        auto m = shared(nfa ? random_nfa(rng, 3, 2) : random_lts(rng, 3, 2));
        auto g = game_of(m, nfa ? Semantics::BTopNFA : Semantics::TraceInc);
        const std::size_t n = g->det().size();
        for (int trial = 0; trial < 5; ++trial) {
            const Claim pos = PairClaim{uniform(rng, 0, n - 1), uniform(rng, 0, n - 1)};
            std::vector<Claim> small, large;
            for (int k = 0; k < 4; ++k) {
                Claim c = PairClaim{uniform(rng, 0, n - 1), uniform(rng, 0, n - 1)};
                large.push_back(c);
                if (coin(rng)) small.push_back(c);
            }
            if (g->admissible(pos, small).admissible) CHECK(g->admissible(pos, large).admissible);
        }
    }
}

TEST_CASE("canonical and exhaustive moves agree on small carriers") {
    Rng rng(3);
    int compared = 0;
    for (int round = 0; round < 40; ++round) {
        const auto s = std::vector<Semantics>{Semantics::TraceInc, Semantics::Bisim, Semantics::BTopDFA,
                                              Semantics::BTopNFA}[round % 4];
        std::shared_ptr<const Model> m;
        switch (s) {
            case Semantics::TraceInc: m = shared(random_lts(rng, 1, 2, 0.5)); break;
            case Semantics::Bisim: m = shared(random_lts(rng, 3, 2)); break;
            case Semantics::BTopDFA: m = shared(random_dfa(rng, 3, 2)); break;
            default: m = shared(random_nfa(rng, 2, 2)); break;
        }
        auto g = game_of(m, s);
        const std::size_t n = g->det().size();
        if (n * (n - 1) > 8) continue;
        const auto canonical = g->winning_region_n(3);
        const auto exhaustive = g->winning_region_exhaustive(3);
        CHECK(canonical.levels == exhaustive.levels);
        ++compared;
    }
    CHECK(compared > 10);
}

TEST_CASE("game regions match the brute-force semantics on small random systems") {
    Rng rng(5);
    for (int round = 0; round < 12; ++round) {
        auto lts = shared(random_lts(rng, 3, 2));
        auto nfa = shared(random_nfa(rng, 3, 2));
        auto dfa = shared(random_dfa(rng, 3, 2));
        for (std::size_t n : {0, 1, 2, 3}) {
            CHECK(theorem_check(lts, Semantics::TraceInc, n).discrepancies.empty());
            CHECK(theorem_check(lts, Semantics::Bisim, n).discrepancies.empty());
            CHECK(theorem_check(nfa, Semantics::BTopNFA, n).discrepancies.empty());
            CHECK(theorem_check(dfa, Semantics::BTopDFA, n).discrepancies.empty());
        }
        CHECK(theorem_check(lts, Semantics::TraceInc, std::nullopt).discrepancies.empty());
        CHECK(theorem_check(lts, Semantics::Bisim, std::nullopt).discrepancies.empty());
        CHECK(theorem_check(nfa, Semantics::BTopNFA, std::nullopt).discrepancies.empty());
        CHECK(theorem_check(dfa, Semantics::BTopDFA, std::nullopt).discrepancies.empty());
    }
}

TEST_CASE("simulation values match the reference recursion") {
    Rng rng(9);
    for (int round = 0; round < 20; ++round) {
        auto m = shared(random_mlts(rng, 4, 2, round % 2 == 0));
        for (auto s : {Semantics::QSim, Semantics::QRSim}) {
            CHECK(theorem_check(m, s, 2).discrepancies.empty());
            CHECK(theorem_check(m, s, std::nullopt).discrepancies.empty());
        }
    }
}

TEST_CASE("strategy soundness") {
    Rng rng(21);
    for (int round = 0; round < 20; ++round) {
        auto m = shared(random_lts(rng, 3, 2));
        auto g = game_of(m, Semantics::TraceInc);
        const std::size_t rounds = 3;
        const auto report = g->winning_region_n(rounds);
        const std::size_t n = g->det().size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                // Every Spoiler answer to the extracted Duplicator strategy stays winning until the bluff is called.
                std::vector<std::pair<Claim, std::size_t>> stack{{PairClaim{i, j}, rounds}};
                const bool winning = report.won(i, j);
                while (winning && !stack.empty()) {
                    auto [pos, left] = stack.back();
                    stack.pop_back();
                    if (left == 0) {
                        CHECK(g->bluff_check(pos));
                        continue;
                    }
                    const auto z = g->duplicator_move(report, pos, left);
                    REQUIRE(g->admissible(pos, z).admissible);
                    for (const auto& c : z) {
                        const auto& p = std::get<PairClaim>(c);
                        REQUIRE(report.won_at(left - 1, p.lhs, p.rhs));
                        stack.emplace_back(c, left - 1);
                    }
                }
                if (!winning) {
                    // The Spoiler strategy answers the canonical Duplicator move until the Duplicator is stuck.
                    Claim pos = PairClaim{i, j};
                    std::size_t left = rounds;
                    bool spoiler_won = false;
                    while (left > 0) {
                        std::vector<Claim> z;
                        const auto& target = report.target(left);
                        for (std::size_t a = 0; a < n; ++a)
                            for (std::size_t b = 0; b < n; ++b)
                                if (target[a * n + b]) z.push_back(PairClaim{a, b});
                        if (!g->admissible(pos, z).admissible) {
                            spoiler_won = true;
                            break;
                        }
                        auto pick = g->spoiler_pick(report, z, left);
                        REQUIRE(pick.has_value());
                        pos = *pick;
                        --left;
                    }
                    if (!spoiler_won) spoiler_won = !g->bluff_check(pos);
                    CHECK(spoiler_won);
                }
            }
    }
}

TEST_CASE("infinite games need the complete carrier") {
    auto m = shared(parse_model(R"({"kind": "lmc", "states": ["s", "t"], "labels": ["a"],
      "transitions": [{"from": "s", "label": "a", "to": "s", "prob": "1/3"},
                      {"from": "s", "label": "a", "to": "t", "prob": "2/3"},
                      {"from": "t", "label": "a", "to": "t", "prob": "1"}]})"));
    auto g = game_of(m, Semantics::PTrace, DetOptions{10, 4096, 2});
    CHECK_THROWS_AS(g->value_table(std::nullopt), Error);
    CHECK_NOTHROW(g->value_table(2));
}

TEST_CASE("bounded claims are admissible exactly down to the value on mixing carriers") {
    Rng rng(23);
    int mixing = 0, lowered = 0;
    for (int round = 0; round < 150; ++round) {
        auto m = shared(random_lmc(rng, 3, 2, round % 3 == 0));
        std::shared_ptr<const Game> g;
        try {
            g = game_of(m, Semantics::PTrace, DetOptions{.point_cap = 48});
        } catch (const Error& e) {
            REQUIRE(e.code() == Errc::cap_exceeded);
            continue;
        }
        if (g->algebra().decompositions().empty()) continue;
        ++mixing;
        const std::size_t n = g->det().size();
        const auto table = g->value_table(3);
        for (std::size_t k = 0; k + 1 < table.levels.size(); ++k) {
            const auto& level = table.levels[k];
            if (!(close(g->algebra(), g->value_conformance(level)) == g->value_conformance(level))) ++lowered;
            std::vector<Claim> z;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (i != j) z.push_back(BoundedClaim{i, j, level[i * n + j]});
            for (int trial = 0; trial < 6; ++trial) {
                const std::size_t i = uniform(rng, 0, n - 1), j = uniform(rng, 0, n - 1);
                const Rational& v = table.value_at(k + 1, i, j);
                CHECK(g->admissible(BoundedClaim{i, j, v}, z).admissible);
                if (v > 0) CHECK_FALSE(g->admissible(BoundedClaim{i, j, v - rat(1, 1000)}, z).admissible);
            }
        }
    }
    CHECK(mixing > 5);
    // Some level is lowered by the convex rules, so the check above exercises them.
    CHECK(lowered > 0);
}
