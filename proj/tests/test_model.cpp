#include "gce/error.hpp"
#include "gce/model.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <string>

using namespace gce;
using namespace gce::testing;

namespace {

std::string validation_message(const std::string& text) {
    try {
        parse_model(text);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::validation);
        return e.what();
    }
    FAIL("document was accepted");
    return {};
}

bool mentions(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("the three-state automaton document") {
    const auto m = parse_model(fig1_nfa_text());
    CHECK(m.kind == ModelKind::NFA);
    CHECK(m.state_count() == 3);
    CHECK(m.label_count() == 1);
    CHECK(m.transitions.size() == 5);
    CHECK(m.is_accepting(m.state_index("x1")));
    CHECK_FALSE(m.is_accepting(m.state_index("x2")));
    CHECK_FALSE(m.is_accepting(m.state_index("x3")));

    const auto x1 = m.successors(m.state_index("x1"));
    REQUIRE(x1.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(x1[i].label == 0);
        CHECK(x1[i].to == i);
    }
    const auto x3 = m.successors(m.state_index("x3"));
    REQUIRE(x3.size() == 1);
    CHECK(x3[0].to == m.state_index("x3"));
}

TEST_CASE("a probabilistic self-loop is a Dirac step") {
    const auto m = parse_model(R"({"kind": "lmc", "states": ["s"], "labels": ["a"],
      "transitions": [{"from": "s", "label": "a", "to": "s", "prob": "1"}]})");
    const auto d = m.distribution(0);
    REQUIRE(d.size() == 1);
    CHECK(d[0].label == 0);
    CHECK(d[0].to == 0);
    CHECK(d[0].prob == 1);
}

TEST_CASE("validation errors name the offending item") {
    CHECK(mentions(validation_message(R"({"kind": "lmc", "states": ["s", "t"], "labels": ["a"],
      "transitions": [{"from": "s", "label": "a", "to": "t", "prob": "3/4"},
                      {"from": "t", "label": "a", "to": "t", "prob": "1"}]})"),
                   "\"s\" sum to 3/4"));
    CHECK(mentions(validation_message(R"({"kind": "lts", "states": [], "labels": ["a"], "transitions": []})"),
                   "empty carrier"));
    CHECK(mentions(validation_message(R"({"kind": "nfa", "states": ["p", "q"], "labels": ["a"], "accepting": [],
      "transitions": [{"from": "p", "label": "a", "to": "q"}]})"),
                   "\"q\" has no successor"));
    CHECK(mentions(validation_message(R"({"kind": "mlts", "states": ["p"], "labels": ["a", "b", "c"],
      "metric_kind": "pseudometric", "transitions": [],
      "label_metric": [["a", "b", "1/4"], ["b", "c", "1/4"], ["a", "c", "3/4"]]})"),
                   "triangle"));
    CHECK_THROWS_AS(parse_model(R"({"kind": "lmc", "states": ["s"], "labels": ["a"],
      "transitions": [{"from": "s", "label": "a", "to": "s", "prob": "0.5"}]})"),
                    Error);
    CHECK(mentions(validation_message(R"({"kind": "lts", "states": ["s"], "labels": ["a"],
      "transitions": [{"from": "s", "label": "b", "to": "s"}]})"),
                   "unknown label \"b\""));
    CHECK(mentions(validation_message(R"({"kind": "lts", "states": ["s"], "labels": ["a"], "transitions": [)"),
                   "syntax error at byte"));
    CHECK(mentions(validation_message(R"({"kind": "dfa", "states": ["s", "t"], "labels": ["a"], "accepting": [],
      "next": {"s": {"a": "t"}}})"),
                   "no successor for state \"t\""));
}

TEST_CASE("decimal literals are rejected") {
    CHECK_THROWS_AS(parse_rational("0.5"), Error);
    CHECK_THROWS_AS(parse_rational("1e-1"), Error);
    CHECK(parse_rational("2/4") == rat(1, 2));
}

TEST_CASE("exact thirds sum to one") {
    const auto third = parse_rational("1/3");
    CHECK(third + third + third == 1);
    const auto m = parse_model(R"({"kind": "lmc", "states": ["s", "t", "u"], "labels": ["a"],
      "transitions": [{"from": "s", "label": "a", "to": "s", "prob": "1/3"},
                      {"from": "s", "label": "a", "to": "t", "prob": "1/3"},
                      {"from": "s", "label": "a", "to": "u", "prob": "1/3"},
                      {"from": "t", "label": "a", "to": "t", "prob": "1"},
                      {"from": "u", "label": "a", "to": "u", "prob": "1"}]})");
    CHECK(m.distribution(0).size() == 3);
}

TEST_CASE("hemimetric label distances stay asymmetric unless declared symmetric") {
    const char* doc = R"({"kind": "mlts", "states": ["p"], "labels": ["a", "b"], %KIND%
      "transitions": [], "label_metric": [["a", "b", "1/4"]]})";
    std::string hemi = doc;
    hemi.replace(hemi.find("%KIND%"), 6, "");
    std::string pseudo = doc;
    pseudo.replace(pseudo.find("%KIND%"), 6, R"("metric_kind": "pseudometric",)");
    const auto h = parse_model(hemi);
    CHECK(h.label_distance(0, 1) == rat(1, 4));
    CHECK(h.label_distance(1, 0) == 1);
    const auto p = parse_model(pseudo);
    CHECK(p.label_distance(1, 0) == rat(1, 4));
}

TEST_CASE("print then parse is the identity on random models") {
    Rng rng(17);
    for (int round = 0; round < 300; ++round) {
        Model m;
        switch (round % 5) {
            case 0: m = random_lts(rng, 5, 2); break;
            case 1: m = random_nfa(rng, 5, 2); break;
            case 2: m = random_dfa(rng, 5, 2); break;
            case 3: m = random_lmc(rng, 4, 2, coin(rng)); break;
            default: m = random_mlts(rng, 4, 3, coin(rng)); break;
        }
        const auto text = print_model(m);
        const auto back = parse_model(text);
        CHECK(back == m);
        CHECK(print_model(back) == text);
    }
}
