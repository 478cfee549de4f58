#include "gce/api.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <atomic>
#include <thread>

using namespace gce;
using namespace gce::testing;
using nlohmann::json;

namespace {

struct Client {
    api::Service service;

    api::Response call(const std::string& method, const std::string& path, const json& body = json()) {
        return service.handle(method, path, body.is_null() ? std::string() : body.dump());
    }

    std::string add_system(const char* text) {
        const auto r = call("POST", "/systems", json::parse(text));
        REQUIRE(r.status == 201);
        return r.body.at("systemId");
    }
};

json text_claim(const json& claim) { return claim.at("text"); }

}  // namespace

TEST_CASE("system routes") {
    Client c;
    const auto id = c.add_system(fig1_nfa_text());
    CHECK(id == "s1");
    const auto list = c.call("GET", "/systems");
    CHECK(list.status == 200);
    CHECK(list.body.at("systems").size() == 1);
    const auto got = c.call("GET", "/systems/s1");
    CHECK(got.status == 200);
    CHECK(got.body.at("system").at("accepting") == json::array({"x1"}));
    CHECK(c.call("GET", "/systems/s9").status == 404);
    CHECK(c.call("POST", "/systems", json::parse(R"({"kind": "lts", "states": []})")).status == 400);
    CHECK(c.service.handle("POST", "/systems", "{not json").status == 400);
    CHECK(c.call("GET", "/nowhere").status == 404);
    CHECK(c.call("PUT", "/systems").status == 405);
}

TEST_CASE("the spoiler session on the three-state automaton repeats its position") {
    Client c;
    const auto sys = c.add_system(fig1_nfa_text());
    auto r = c.call("POST", "/sessions",
                    {{"systemId", sys}, {"semantics", "btop-nfa"}, {"claim", "x2 ~> x1"}, {"role", "spoiler"}});
    REQUIRE(r.status == 201);
    const std::string id = r.body.at("sessionId");
    CHECK(r.body.at("status") == "ongoing");
    CHECK(r.body.at("toMove") == "spoiler");
    CHECK(text_claim(r.body.at("position")) == "{x2} <= {x1}");
    REQUIRE(r.body.at("pending").size() == 1);
    CHECK(text_claim(r.body.at("pending")[0]) == "{x1} <= {x1,x2,x3}");

    // An illegal pick leaves the session untouched.
    auto bad = c.call("POST", "/sessions/" + id + "/moves", {{"move", "x2 <= x1"}});
    CHECK(bad.status == 422);
    CHECK(bad.body.at("verdict").at("accepted") == false);
    CHECK_FALSE(bad.body.at("verdict").at("explanation").get<std::string>().empty());
    CHECK(text_claim(bad.body.at("position")) == "{x2} <= {x1}");

    r = c.call("POST", "/sessions/" + id + "/moves", {{"move", r.body.at("pending")[0]}});
    REQUIRE(r.status == 200);
    CHECK(text_claim(r.body.at("position")) == "{x1} <= {x1,x2,x3}");
    REQUIRE(r.body.at("engineReply").size() == 1);
    CHECK(text_claim(r.body.at("engineReply")[0].at("claims")[0]) == "{x1,x2,x3} <= {x1,x2,x3}");

    for (int round = 0; round < 5; ++round) {
        r = c.call("POST", "/sessions/" + id + "/moves", {{"move", "{x1,x2,x3} <= {x1,x2,x3}"}});
        REQUIRE(r.status == 200);
        CHECK(text_claim(r.body.at("position")) == "{x1,x2,x3} <= {x1,x2,x3}");
        CHECK(text_claim(r.body.at("pending")[0]) == "{x1,x2,x3} <= {x1,x2,x3}");
    }
    const auto state = c.call("GET", "/sessions/" + id);
    CHECK(state.status == 200);
    CHECK(state.body.at("status") == "ongoing");
    CHECK(state.body.at("history").size() == 13);
}

TEST_CASE("session errors") {
    Client c;
    const auto sys = c.add_system(fig1_lts_text());
    CHECK(c.call("POST", "/sessions", {{"systemId", "s7"}, {"semantics", "trace-inclusion"}, {"claim", "x2 <= x1"}})
              .status == 404);
    CHECK(c.call("POST", "/sessions", {{"systemId", sys}, {"semantics", "btop-dfa"}, {"claim", "x2 <= x1"}}).status ==
          400);
    CHECK(c.call("POST", "/sessions", {{"systemId", sys}, {"semantics", "trace-inclusion"}, {"claim", "x2 <= ghost"}})
              .status == 400);
    CHECK(c.call("GET", "/sessions/g42").status == 404);

    // The engine Spoiler moves at once, so a human Duplicator who moves twice in a row is out of turn only
    // after the session has ended.
    auto r = c.call("POST", "/sessions",
                    {{"systemId", sys}, {"semantics", "trace-inclusion"}, {"claim", "x1 <= {}"}, {"role", "duplicator"},
                     {"rounds", 2}});
    REQUIRE(r.status == 201);
    const std::string id = r.body.at("sessionId");
    r = c.call("POST", "/sessions/" + id + "/moves", {{"move", json::array({"{x1,x2,x3} <= {}"})}});
    CHECK(r.status == 200);
    CHECK(r.body.at("status") == "ongoing");
    r = c.call("POST", "/sessions/" + id + "/moves", {{"move", "{x1,x2,x3} <= {}"}});
    CHECK(r.status == 200);
    CHECK(r.body.at("status") == "spoilerWins");
    CHECK(c.call("POST", "/sessions/" + id + "/moves", {{"move", "{x1,x2,x3} <= {}"}}).status == 409);
    CHECK(c.call("DELETE", "/sessions/" + id).status == 200);
    CHECK(c.call("DELETE", "/sessions/" + id).status == 404);
}

TEST_CASE("an inadmissible Duplicator move loses with an explanation") {
    Client c;
    const auto sys = c.add_system(fig1_lts_text());
    auto r = c.call("POST", "/sessions",
                    {{"systemId", sys}, {"semantics", "trace-inclusion"}, {"claim", "x1 <= x2"}, {"role", "duplicator"}});
    REQUIRE(r.status == 201);
    const std::string id = r.body.at("sessionId");
    r = c.call("POST", "/sessions/" + id + "/moves", {{"move", {{"claims", json::array()}}}});
    CHECK(r.status == 422);
    CHECK(r.body.at("status") == "spoilerWins");
    CHECK_FALSE(r.body.at("verdict").at("explanation").get<std::string>().empty());
}

TEST_CASE("sessions agree with the solver") {
    Rng rng(101);
    Client c;
    for (int round = 0; round < 25; ++round) {
        const auto m = random_lts(rng, 3, 2);
        const auto r = c.call("POST", "/systems", json::parse(print_model(m)));
        REQUIRE(r.status == 201);
        const std::string sys = r.body.at("systemId");
        const auto model = std::make_shared<const Model>(m);
        const auto det = predeterminize(model, Semantics::TraceInc);
        for (std::size_t i = 0; i < det.size(); ++i)
            for (std::size_t j = 0; j < det.size(); ++j) {
                const std::string claim = det.point_name(i) + " <= " + det.point_name(j);
                const auto solved = api::solve(model, {{"semantics", "trace-inclusion"}, {"rounds", 2}, {"claim", claim}});
                auto s = c.call("POST", "/sessions", {{"systemId", sys}, {"semantics", "trace-inclusion"},
                                                      {"claim", claim}, {"role", "spoiler"}, {"rounds", 2}});
                REQUIRE(s.status == 201);
                const std::string id = s.body.at("sessionId");
                // Whatever the human Spoiler picks, the solver's winner wins.
                while (s.body.at("status") == "ongoing") {
                    const auto& pending = s.body.at("pending");
                    s = c.call("POST", "/sessions/" + id + "/moves",
                               {{"move", pending[uniform(rng, 0, pending.size() - 1)]}});
                    REQUIRE(s.status == 200);
                }
                CHECK(s.body.at("status") == (solved.at("winner") == "duplicator" ? "duplicatorWins" : "spoilerWins"));
            }
    }
}

TEST_CASE("concurrent sessions are independent") {
    Client c;
    const auto sys = c.add_system(fig1_nfa_text());
    std::atomic<int> failures{0};
    std::vector<std::thread> workers;
    for (int t = 0; t < 8; ++t)
        workers.emplace_back([&] {
            for (int k = 0; k < 10; ++k) {
                auto r = c.call("POST", "/sessions",
                                {{"systemId", sys}, {"semantics", "btop-nfa"}, {"claim", "x2 ~> x1"}, {"role", "spoiler"}});
                if (r.status != 201) {
                    ++failures;
                    continue;
                }
                const std::string id = r.body.at("sessionId");
                for (int step = 0; step < 3; ++step) {
                    r = c.call("POST", "/sessions/" + id + "/moves", {{"move", r.body.at("pending")[0]}});
                    if (r.status != 200 || r.body.at("status") != "ongoing") ++failures;
                }
                if (c.call("GET", "/sessions/" + id).body.at("history").size() != 7) ++failures;
            }
        });
    for (auto& w : workers) w.join();
    CHECK(failures == 0);
    CHECK(c.call("GET", "/sessions/g80").status == 200);
    CHECK(c.call("GET", "/sessions/g81").status == 404);
}

TEST_CASE("solve, values, check and prove requests") {
    const auto fig = fig1_lts();
    const auto won = api::solve(fig, {{"semantics", "trace-inclusion"}, {"claim", "x2 <= x1"}});
    CHECK(won.at("winner") == "duplicator");
    CHECK(won.at("verdict") == "Duplicator wins");
    CHECK(won.at("rounds") == "inf");

    const auto lost = api::solve(fig1_nfa(), {{"semantics", "btop-nfa"}, {"claim", "x1 ~> x2"}});
    CHECK(lost.at("winner") == "spoiler");
    CHECK(lost.at("distinguishingWord") == json::array());

    const auto examples = api::examples();
    const auto coins = std::make_shared<const Model>(parse_model(examples.at("coins-lmc.json").dump()));
    const auto checked = api::check(coins, {{"semantics", "ptrace"}, {"rounds", 3}});
    CHECK(checked.at("count") == 0);
    const auto table = api::values(coins, {{"semantics", "ptrace"}, {"rounds", 1}});
    CHECK(table.at("values").size() == table.at("points").size());

    const auto proof = api::prove({{"goal", "{x <= y} |-1 a(x) <= a(y) + a(z)"}});
    CHECK(proof.at("outcome") == "found");
    CHECK_THROWS_AS(api::solve(fig, {{"semantics", "nonsense"}}), Error);
    CHECK_THROWS_AS(api::parse_rounds(json(-1)), Error);
    CHECK(api::parse_rounds(json("7")) == 7);
}
