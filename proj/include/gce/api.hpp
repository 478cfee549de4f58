#pragma once

#include "gce/error.hpp"
#include "gce/game.hpp"
#include "gce/graded.hpp"
#include "gce/model.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace gce::api {

using nlohmann::json;

// "inf" (or absent) is the infinite game.
std::optional<std::size_t> parse_rounds(const json& j);
json rounds_json(std::optional<std::size_t> rounds);
DetOptions parse_options(const json& j);
std::string errc_name(Errc c);

// Request objects: {"semantics", "rounds", "claim", "options": {"powersetCap", "pointCap", "depth"}}.
json solve(std::shared_ptr<const Model> model, const json& request);
json values(std::shared_ptr<const Model> model, const json& request);
json check(std::shared_ptr<const Model> model, const json& request);
// {"goal", "budget", "labels"}; labels default to the unary operation symbols of the goal.
json prove(const json& request);
// Bundled example systems by file name.
json examples();

json claim_json(const DetSystem& det, const Claim& c);

struct Response {
    int status;
    json body;
};

// In-memory systems and sessions behind an HTTP-style interface. Safe for concurrent callers;
// moves on one session are serialized.
class Service {
public:
    Response handle(std::string_view method, std::string_view path, std::string_view body);

private:
    struct SystemEntry {
        std::shared_ptr<const Model> model;
        std::map<std::string, std::shared_ptr<const Game>> games;  // keyed by semantics and options
    };
    struct SessionEntry {
        std::string system;
        std::shared_ptr<Session> session;
        std::mutex lock;
    };

    Response create_system(const json& body);
    Response list_systems();
    Response create_session(const json& body);
    Response session_state(const std::string& id);
    Response move(const std::string& id, const json& body);
    Response drop_session(const std::string& id);

    std::shared_ptr<const Game> game_for(const std::string& system, Semantics s, const DetOptions& o);
    std::shared_ptr<SessionEntry> find_session(const std::string& id);
    json state_json(const std::string& id, const SessionEntry& e) const;

    std::mutex mutex_;
    std::size_t next_system_ = 1;
    std::size_t next_session_ = 1;
    std::map<std::string, SystemEntry> systems_;
    std::map<std::string, std::shared_ptr<SessionEntry>> sessions_;
};

}  // namespace gce::api
