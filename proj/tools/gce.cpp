#include "gce/gce.h"

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

using nlohmann::json;

namespace {

enum Exit { ok = 0, failure = 1, usage = 2, invalid_model = 3, capped = 4, discrepancy = 5 };

struct Failure {
    int code;
    std::string message;
};

int exit_for(gce_status s) {
    switch (s) {
        case GCE_OK: return ok;
        case GCE_INVALID_ARGUMENT:
        case GCE_UNSUPPORTED: return usage;
        case GCE_VALIDATION:
        case GCE_NOT_FOUND:
        case GCE_MISMATCH: return invalid_model;
        case GCE_CAP_EXCEEDED:
        case GCE_INCOMPLETE:
        case GCE_BUDGET_EXHAUSTED: return capped;
        default: return failure;
    }
}

void check(gce_status s) {
    if (s != GCE_OK) throw Failure{exit_for(s), std::string(gce_status_name(s)) + ": " + gce_last_error()};
}

// Owns a string handed out by the library.
std::string take(char* text) {
    std::unique_ptr<char, decltype(&gce_free)> owned(text, &gce_free);
    return owned ? std::string(owned.get()) : std::string();
}

using SystemPtr = std::unique_ptr<gce_system, decltype(&gce_system_free)>;
using ServicePtr = std::unique_ptr<gce_service, decltype(&gce_service_free)>;

std::string bundled(const std::string& name) {
    char* out = nullptr;
    check(gce_examples(&out));
    const json all = json::parse(take(out));
    if (!all.contains(name)) throw Failure{usage, "no bundled example named " + name};
    return all.at(name).dump(2);
}

struct Source {
    std::string system;
    std::string example;

    std::string text() const {
        if (!example.empty()) return bundled(example);
        if (system.empty()) throw Failure{usage, "give --system FILE or --example NAME"};
        std::ifstream in(system);
        if (!in) throw Failure{usage, "cannot read " + system};
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

    SystemPtr load() const {
        gce_system* s = nullptr;
        check(gce_system_load(text().c_str(), &s));
        return SystemPtr(s, &gce_system_free);
    }
};

struct GameOptions {
    std::string semantics;
    std::string rounds = "inf";
    std::optional<std::size_t> powerset_cap, point_cap, depth;

    json request() const {
        json r{{"semantics", semantics}, {"rounds", rounds}, {"options", json::object()}};
        if (powerset_cap) r["options"]["powersetCap"] = *powerset_cap;
        if (point_cap) r["options"]["pointCap"] = *point_cap;
        if (depth) r["options"]["depth"] = *depth;
        return r;
    }
};

void add_source(CLI::App* cmd, Source& src) {
    cmd->add_option("--system", src.system, "System file (JSON)");
    cmd->add_option("--example", src.example, "Bundled example name, e.g. fig1-lts.json");
}

void add_game(CLI::App* cmd, GameOptions& g) {
    cmd->add_option("--semantics", g.semantics, "trace-inclusion, ptrace, bisim, btop-dfa, btop-nfa, qsim, qrsim")
        ->required();
    cmd->add_option("--rounds", g.rounds, "Number of rounds or inf");
    cmd->add_option("--powerset-cap", g.powerset_cap, "Largest state count for full powerset carriers");
    cmd->add_option("--point-cap", g.point_cap, "Largest determinized carrier");
    cmd->add_option("--depth", g.depth, "Explore only points within this many steps");
}

using Call = gce_status (*)(const gce_system*, const char*, char**);

json call(Call f, const gce_system* s, const json& request) {
    char* out = nullptr;
    check(f(s, request.dump().c_str(), &out));
    return json::parse(take(out));
}

std::string rounds_text(const json& r) { return r.is_string() ? r.get<std::string>() : r.dump(); }

std::string joined(const json& list, const char* sep = ", ") {
    std::string out;
    for (const auto& x : list) out += (out.empty() ? "" : sep) + x.get<std::string>();
    return out;
}

void print_solve(const json& r) {
    std::cout << "semantics " << r["semantics"].get<std::string>() << ", rounds " << rounds_text(r["rounds"]) << ", "
              << r["points"].size() << " points" << (r["complete"].get<bool>() ? "" : " (partial carrier)") << '\n';
    if (!r.contains("claim")) {
        if (r.contains("region")) {
            std::cout << "winning region (" << r["region"].size() << " pairs):\n";
            for (const auto& p : r["region"]) std::cout << "  " << p[0].get<std::string>() << " <= " << p[1].get<std::string>() << '\n';
        }
        return;
    }
    std::cout << "claim " << r["claim"]["text"].get<std::string>() << '\n';
    if (r.contains("value")) std::cout << "value " << r["value"].get<std::string>() << '\n';
    std::cout << r["verdict"].get<std::string>() << '\n';
    std::cout << "strategy:\n";
    for (const auto& step : r["strategy"]) {
        std::cout << "  round " << step["round"] << ": at " << step["position"].get<std::string>();
        if (step.contains("move")) std::cout << ", Duplicator claims [" << joined(step["move"]) << "]";
        if (step.contains("pick")) std::cout << ", Spoiler picks " << step["pick"].get<std::string>();
        if (step.contains("note")) std::cout << " (" << step["note"].get<std::string>() << ")";
        std::cout << '\n';
    }
    if (r.contains("distinguishingWord"))
        std::cout << "distinguishing word: \"" << joined(r["distinguishingWord"], " ") << "\""
                  << (r["distinguishingWord"].empty() ? " (empty word)" : "") << '\n';
}

void print_values(const json& r) {
    std::cout << "semantics " << r["semantics"].get<std::string>() << ", rounds " << rounds_text(r["rounds"]) << '\n';
    const auto& names = r["points"];
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = 0; j < names.size(); ++j) {
            const json& v = r["values"][i][j];
            if (v.is_null()) continue;
            std::cout << "d(" << names[i].get<std::string>() << ", " << names[j].get<std::string>() << ") = "
                      << v.get<std::string>() << '\n';
        }
}

std::pair<int, json> request(gce_service* svc, const char* method, const std::string& path, const json& body) {
    int status = 0;
    char* out = nullptr;
    check(gce_service_handle(svc, method, path.c_str(), body.dump().c_str(), &status, &out));
    return {status, json::parse(take(out))};
}

void show_state(const json& s) {
    std::cout << "round " << s["round"] << ", position " << s["position"]["text"].get<std::string>() << ", status "
              << s["status"].get<std::string>() << '\n';
    for (const auto& ev : s.value("engineReply", json::array())) {
        std::cout << "  engine " << ev["actor"].get<std::string>() << ":";
        for (const auto& c : ev["claims"]) std::cout << " [" << c["text"].get<std::string>() << "]";
        std::cout << '\n';
    }
}

int play(const Source& src, const GameOptions& g, const std::string& role, const std::string& claim) {
    gce_service* raw = nullptr;
    check(gce_service_new(&raw));
    ServicePtr svc(raw, &gce_service_free);
    auto [st, sys] = request(svc.get(), "POST", "/systems", json::parse(src.text()));
    if (st != 201) throw Failure{invalid_model, sys["error"].get<std::string>()};
    json body = g.request();
    body["systemId"] = sys["systemId"];
    body["claim"] = claim;
    body["role"] = role;
    auto [cs, state] = request(svc.get(), "POST", "/sessions", body);
    if (cs != 201) throw Failure{invalid_model, state["error"].get<std::string>()};
    const std::string path = "/sessions/" + state["sessionId"].get<std::string>() + "/moves";
    while (true) {
        show_state(state);
        if (state["status"] != "ongoing") break;
        if (role == "spoiler") {
            std::cout << "Duplicator claims:\n";
            const auto& pending = state["pending"];
            for (std::size_t i = 0; i < pending.size(); ++i)
                std::cout << "  " << i << ": " << pending[i]["text"].get<std::string>() << '\n';
            std::cout << "pick a claim (number or text): " << std::flush;
        } else {
            std::cout << "your claims, separated by ';': " << std::flush;
        }
        std::string line;
        if (!std::getline(std::cin, line) || line == "quit") break;
        json move = line;
        if (role == "spoiler" && !line.empty() && line.find_first_not_of("0123456789") == std::string::npos) {
            const std::size_t k = std::stoul(line);
            if (k < state["pending"].size()) move = state["pending"][k];
        }
        auto [ms, reply] = request(svc.get(), "POST", path, json{{"move", move}});
        if (ms == 409 || ms == 400) {
            std::cout << "rejected: " << reply["error"].get<std::string>() << '\n';
            continue;
        }
        if (ms == 422) std::cout << "rejected: " << reply["verdict"]["explanation"].get<std::string>() << '\n';
        state = std::move(reply);
    }
    if (!state["explanation"].get<std::string>().empty()) std::cout << state["explanation"].get<std::string>() << '\n';
    return ok;
}

int serve(const std::string& host, int port) {
    gce_service* raw = nullptr;
    check(gce_service_new(&raw));
    ServicePtr svc(raw, &gce_service_free);
    httplib::Server server;
    auto route = [&](const httplib::Request& req, httplib::Response& res) {
        int status = 500;
        char* out = nullptr;
        const gce_status s = gce_service_handle(svc.get(), req.method.c_str(), req.path.c_str(), req.body.c_str(), &status, &out);
        if (s != GCE_OK) {
            res.status = 500;
            res.set_content(json{{"error", gce_last_error()}}.dump(), "application/json");
            return;
        }
        res.status = status;
        res.set_content(take(out), "application/json");
    };
    const std::string any = R"(/.*)";
    server.Get(any, route);
    server.Post(any, route);
    server.Delete(any, route);
    if (port == 0) port = server.bind_to_any_port(host);
    else if (!server.bind_to_port(host, port)) port = -1;
    if (port < 0) throw Failure{usage, "cannot listen on " + host};
    std::cout << "listening on " << host << ":" << port << std::endl;
    server.listen_after_bind();
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conformance games: solve, check and play behavioural comparisons"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "Print raw JSON results");

    Source src;
    GameOptions game;
    std::string claim, role, goal, labels, dir = ".", host = "127.0.0.1";
    std::size_t budget = 10000;
    int port = 8080;
    bool oracle = false;

    auto* solve_cmd = app.add_subcommand("solve", "Winning region, or the verdict and strategy for a claim");
    add_source(solve_cmd, src);
    add_game(solve_cmd, game);
    solve_cmd->add_option("--claim", claim, "Claim such as \"x2 <= x1\" or \"d(s, t) <= 1/2\"");

    auto* value_cmd = app.add_subcommand("value", "Value table of a quantitative semantics");
    add_source(value_cmd, src);
    add_game(value_cmd, game);

    auto* check_cmd = app.add_subcommand("check", "Compare game verdicts with the brute-force semantics");
    add_source(check_cmd, src);
    add_game(check_cmd, game);
    check_cmd->add_flag("--oracle", oracle, "Run the oracle comparison")->required();

    auto* play_cmd = app.add_subcommand("play", "Play against the engine in the terminal");
    add_source(play_cmd, src);
    add_game(play_cmd, game);
    play_cmd->add_option("--role", role, "spoiler or duplicator")->required()->check(CLI::IsMember({"spoiler", "duplicator"}));
    play_cmd->add_option("--claim", claim, "Starting claim")->required();

    auto* prove_cmd = app.add_subcommand("prove", "Search a proof in the trace theory");
    prove_cmd->add_option("--goal", goal, "Judgement such as \"{x <= y} |-1 a(x) <= a(y) + a(z)\"")->required();
    prove_cmd->add_option("--budget", budget, "Search steps");
    prove_cmd->add_option("--labels", labels, "Comma-separated action names (default: read from the goal)");

    auto* serve_cmd = app.add_subcommand("serve", "Run the session API over HTTP");
    serve_cmd->add_option("--port", port, "Port, or 0 for any free port")->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--host", host, "Address to bind");

    auto* examples_cmd = app.add_subcommand("examples", "Write the bundled systems to a directory");
    examples_cmd->add_option("--dir", dir, "Target directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (*solve_cmd || *value_cmd || *check_cmd) {
            SystemPtr sys = src.load();
            json req = game.request();
            if (*solve_cmd) {
                if (!claim.empty()) req["claim"] = claim;
                const json r = call(gce_solve, sys.get(), req);
                if (as_json) std::cout << r.dump(2) << '\n'; else print_solve(r);
                return ok;
            }
            if (*value_cmd) {
                const json r = call(gce_value, sys.get(), req);
                if (as_json) std::cout << r.dump(2) << '\n'; else print_values(r);
                return ok;
            }
            const json r = call(gce_check, sys.get(), req);
            if (as_json) {
                std::cout << r.dump(2) << '\n';
            } else {
                std::cout << r["positions"] << " positions, " << r["count"] << " discrepancies\n";
                for (const auto& d : r["discrepancies"])
                    std::cout << "  " << d["lhs"].get<std::string>() << " vs " << d["rhs"].get<std::string>() << ": game "
                              << d["game"].get<std::string>() << ", oracle " << d["oracle"].get<std::string>() << '\n';
            }
            return r["count"].get<std::size_t>() == 0 ? ok : discrepancy;
        }
        if (*play_cmd) return play(src, game, role, claim);
        if (*prove_cmd) {
            json req{{"goal", goal}, {"budget", budget}};
            if (!labels.empty()) {
                json list = json::array();
                std::stringstream in(labels);
                for (std::string l; std::getline(in, l, ',');)
                    if (!l.empty()) list.push_back(l);
                req["labels"] = list;
            }
            char* out = nullptr;
            check(gce_prove(req.dump().c_str(), &out));
            const json r = json::parse(take(out));
            if (as_json) {
                std::cout << r.dump(2) << '\n';
            } else {
                std::cout << r["outcome"].get<std::string>() << " after " << r["steps"] << " steps: "
                          << r["goal"].get<std::string>() << '\n';
                if (!r["proof"].is_null()) std::cout << r["proof"].get<std::string>();
            }
            if (r["outcome"] == "budgetExhausted") return capped;
            return r["outcome"] == "found" ? ok : failure;
        }
        if (*serve_cmd) return serve(host, port);
        if (*examples_cmd) {
            char* out = nullptr;
            check(gce_examples(&out));
            const json all = json::parse(take(out));
            std::filesystem::create_directories(dir);
            for (const auto& [name, doc] : all.items()) {
                const auto path = std::filesystem::path(dir) / name;
                std::ofstream(path) << doc.dump(2) << '\n';
                std::cout << path.string() << '\n';
            }
            return ok;
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << '\n';
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
    return usage;
}
