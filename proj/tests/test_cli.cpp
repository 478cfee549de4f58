#include <catch_amalgamated.hpp>
#include <httplib.h>
#include <json.hpp>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string command = std::string(GCE_BINARY) + " " + args + " 2>&1";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    Run r;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

bool contains(const std::string& text, const std::string& part) { return text.find(part) != std::string::npos; }

// Runs `gce serve --port 0` and reads the chosen port from its first line.
struct Server {
    pid_t pid = -1;
    int port = 0;

    Server() {
        int fds[2];
        REQUIRE(pipe(fds) == 0);
        pid = fork();
        REQUIRE(pid >= 0);
        if (pid == 0) {
            dup2(fds[1], STDOUT_FILENO);
            close(fds[0]);
            close(fds[1]);
            execl(GCE_BINARY, GCE_BINARY, "serve", "--host", "127.0.0.1", "--port", "0", static_cast<char*>(nullptr));
            _exit(127);
        }
        close(fds[1]);
        std::string line;
        char c;
        while (read(fds[0], &c, 1) == 1 && c != '\n') line += c;
        close(fds[0]);
        const auto colon = line.rfind(':');
        REQUIRE(colon != std::string::npos);
        port = std::stoi(line.substr(colon + 1));
    }

    ~Server() {
        if (pid > 0) {
            kill(pid, SIGTERM);
            waitpid(pid, nullptr, 0);
        }
    }
};

}  // namespace

TEST_CASE("solve prints the verdict and its strategy") {
    const auto r = run("solve --example fig1-lts.json --semantics trace-inclusion --claim 'x2 <= x1'");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "Duplicator wins"));
    CHECK(contains(r.out, "(position repeats)"));

    const auto lost = run("solve --example fig1-nfa.json --semantics btop-nfa --claim 'x1 ~> x2'");
    CHECK(lost.code == 0);
    CHECK(contains(lost.out, "Spoiler wins"));

    const auto raw = run("--json solve --example fig1-lts.json --semantics trace-inclusion --claim 'x2 <= x1'");
    CHECK(raw.code == 0);
    CHECK(json::parse(raw.out).at("winner") == "duplicator");
}

TEST_CASE("check compares the game with the oracle") {
    const auto r = run("check --example fig1-nfa.json --semantics btop-nfa --rounds 3 --oracle");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "0 discrepancies"));
    CHECK(run("check --example coins-lmc.json --semantics ptrace --rounds 2 --oracle").code == 0);
}

TEST_CASE("value and prove") {
    const auto v = run("value --example metric-lts.json --semantics qsim --rounds 2");
    CHECK(v.code == 0);
    const auto p = run("prove --goal '{x <= y} |-1 a(x) <= a(y) + a(z)'");
    CHECK(p.code == 0);
    CHECK(contains(p.out, "found after"));
    CHECK(run("prove --goal '{} |-0 x <= y' --budget 50").code == 1);
}

TEST_CASE("exit codes for bad input") {
    CHECK(run("").code == 2);
    CHECK(run("solve --example fig1-lts.json --semantics bogus").code == 2);
    CHECK(run("solve --example nope.json --semantics bisim").code == 2);
    CHECK(run("solve --example fig1-lts.json --semantics trace-inclusion --claim 'x2 <= ghost'").code == 3);
    CHECK(run("value --example fig1-lts.json --semantics trace-inclusion").code == 2);
    CHECK(run("solve --example fig1-nfa.json --semantics ptrace").code == 3);
    CHECK(run("solve --system /nonexistent/file.json --semantics bisim").code != 0);
}

TEST_CASE("examples are written to a directory") {
    const auto dir = std::filesystem::temp_directory_path() / ("gce-examples-" + std::to_string(getpid()));
    std::filesystem::remove_all(dir);
    const auto r = run("examples --dir " + dir.string());
    CHECK(r.code == 0);
    for (const char* name : {"fig1-lts.json", "fig1-nfa.json", "coins-lmc.json", "metric-lts.json", "parity-dfa.json"}) {
        CHECK(std::filesystem::exists(dir / name));
        CHECK(run("solve --system " + (dir / name).string() + " --semantics " +
                  (std::string(name).find("lmc") != std::string::npos      ? "ptrace --rounds 2"
                   : std::string(name).find("metric") != std::string::npos ? "qsim --rounds 2"
                   : std::string(name).find("dfa") != std::string::npos    ? "btop-dfa"
                   : std::string(name).find("nfa") != std::string::npos    ? "btop-nfa"
                                                                           : "trace-inclusion"))
                  .code == 0);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("the session API over HTTP") {
    Server server;
    httplib::Client client("127.0.0.1", server.port);
    const char* fig1 = R"({"kind": "lts", "states": ["x1", "x2", "x3"], "labels": ["a"],
      "transitions": [{"from": "x1", "label": "a", "to": "x1"}, {"from": "x1", "label": "a", "to": "x2"},
                      {"from": "x1", "label": "a", "to": "x3"}, {"from": "x2", "label": "a", "to": "x1"},
                      {"from": "x3", "label": "a", "to": "x3"}]})";
    auto sys = client.Post("/systems", fig1, "application/json");
    REQUIRE(sys);
    CHECK(sys->status == 201);
    const std::string id = json::parse(sys->body).at("systemId");

    const auto create = json{{"systemId", id}, {"semantics", "trace-inclusion"}, {"claim", "x2 <= x1"},
                             {"role", "spoiler"}, {"rounds", 2}};
    auto s = client.Post("/sessions", create.dump(), "application/json");
    REQUIRE(s);
    CHECK(s->status == 201);
    auto session = json::parse(s->body);
    const std::string path = "/sessions/" + session.at("sessionId").get<std::string>();
    while (session.at("status") == "ongoing") {
        auto m = client.Post(path + "/moves", json{{"move", session.at("pending")[0]}}.dump(), "application/json");
        REQUIRE(m);
        CHECK(m->status == 200);
        session = json::parse(m->body);
    }
    CHECK(session.at("status") == "duplicatorWins");

    auto missing = client.Get("/sessions/g42");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    auto gone = client.Delete(path);
    REQUIRE(gone);
    CHECK(gone->status == 200);
}
