#include "gce/api.hpp"

#include "gce/claims.hpp"
#include "gce/error.hpp"
#include "gce/rellogic.hpp"
#include "gce/theorem_check.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

namespace gce::api {

namespace {

struct UnknownId {
    std::string what;
};

Semantics semantics_of(const json& request) {
    require(request.contains("semantics") && request.at("semantics").is_string(), Errc::invalid_argument,
            "request lacks a semantics");
    return parse_semantics(request.at("semantics").get<std::string>());
}

Claim claim_of(const DetSystem& det, const json& j) {
    if (j.is_string()) return parse_claim(det, j.get<std::string>());
    return claim_from_json(det, j);
}

std::vector<Claim> claims_of(const DetSystem& det, const json& j) {
    if (j.is_string()) return parse_claims(det, j.get<std::string>());
    if (j.is_object() && j.contains("claims")) return claims_of(det, j.at("claims"));
    require(j.is_array(), Errc::validation, "a Duplicator move is a list of claims");
    std::vector<Claim> out;
    for (const auto& c : j) out.push_back(claim_of(det, c));
    return out;
}

DetOptions options_for(Semantics s, const json& request, std::optional<std::size_t> rounds) {
    DetOptions o = parse_options(request.value("options", json::object()));
    // Distribution carriers are unbounded; a finite game only needs the points reachable within its rounds.
    if (s == Semantics::PTrace && rounds && !o.depth) o.depth = rounds;
    return o;
}

std::shared_ptr<const Game> make_game(std::shared_ptr<const Model> model, Semantics s, const DetOptions& o) {
    return std::make_shared<const Game>(std::make_shared<const DetSystem>(predeterminize(std::move(model), s, o)));
}

json names_json(const DetSystem& det) { return det.carrier->elements(); }

json value_matrix(const ValueReport& v) {
    json rows = json::array();
    for (std::size_t i = 0; i < v.points; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < v.points; ++j)
            row.push_back(v.defined.empty() || v.defined[i * v.points + j] ? json(to_string(v.value(i, j))) : json());
        rows.push_back(std::move(row));
    }
    return rows;
}

json texts(const Game& g, const std::vector<Claim>& cs) {
    json out = json::array();
    for (const auto& c : cs) out.push_back(g.format_claim(c));
    return out;
}

std::pair<std::size_t, std::size_t> ends_of(const Claim& c) {
    if (auto p = std::get_if<PairClaim>(&c)) return {p->lhs, p->rhs};
    const auto& b = std::get<BoundedClaim>(c);
    return {b.lhs, b.rhs};
}

bool holds_at(const ValueReport& r, const Claim& c, std::optional<std::size_t> left) {
    auto [l, rr] = ends_of(c);
    const Rational& v = left ? r.value_at(*left, l, rr) : r.value(l, rr);
    return v <= std::get<BoundedClaim>(c).bound;
}

// A play following the canonical strategies; the loser's moves are the engine's canonical ones.
template <class Report>
json playout(const Game& g, const Report& report, Claim pos, std::optional<std::size_t> rounds) {
    json steps = json::array();
    std::set<Claim> seen{pos};
    for (std::size_t r = 0; r < 64; ++r) {
        const std::optional<std::size_t> left = rounds ? std::optional<std::size_t>(*rounds - r) : std::nullopt;
        json step{{"round", r}, {"position", g.format_claim(pos)}};
        if (left && *left == 0) {
            step["note"] = g.bluff_check(pos) ? "bluff check passes" : "bluff check fails";
            steps.push_back(std::move(step));
            break;
        }
        const std::vector<Claim> z = g.duplicator_move(report, pos, left);
        const Admissibility adm = g.admissible(pos, z);
        if (!adm.admissible) {
            step["note"] = "Duplicator has no admissible move: " + adm.explanation;
            steps.push_back(std::move(step));
            break;
        }
        step["move"] = texts(g, z);
        std::optional<Claim> pick = g.spoiler_pick(report, z, left);
        if (!pick) {
            for (const auto& c : z) {
                auto [l, rr] = ends_of(c);
                if (l != rr) {
                    pick = c;
                    break;
                }
            }
            if (!pick && !z.empty()) pick = z.front();
        }
        if (!pick) {
            step["note"] = "Spoiler has no claim to challenge";
            steps.push_back(std::move(step));
            break;
        }
        step["pick"] = g.format_claim(*pick);
        const bool repeats = !seen.insert(*pick).second;
        if (repeats) step["note"] = "position repeats";
        steps.push_back(std::move(step));
        if (repeats) break;
        pos = *pick;
    }
    return steps;
}

void add_claim_verdict(json& out, const Game& g, const Claim& c, bool won, std::optional<std::size_t> rounds,
                       const auto& report) {
    out["claim"] = claim_json(g.det(), c);
    out["winner"] = won ? "duplicator" : "spoiler";
    out["verdict"] = won ? "Duplicator wins" : "Spoiler wins";
    out["strategy"] = playout(g, report, c, rounds);
}

std::vector<std::string> goal_labels(const std::string& goal) {
    static const std::regex applied(R"(([A-Za-z0-9_'.]+)\s*\()");
    std::set<std::string> found;
    for (auto it = std::sregex_iterator(goal.begin(), goal.end(), applied); it != std::sregex_iterator(); ++it)
        if ((*it)[1] != "bot") found.insert((*it)[1]);
    return {found.begin(), found.end()};
}

json error_body(const std::string& what, const std::string& code) { return {{"error", what}, {"code", code}}; }

json parse_body(std::string_view body) {
    if (body.empty()) return json::object();
    try {
        return json::parse(body);
    } catch (const json::exception& e) {
        fail(Errc::validation, std::string("malformed JSON: ") + e.what());
    }
}

std::vector<std::string> segments(std::string_view path) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= path.size()) {
        std::size_t end = path.find('/', start);
        if (end == std::string_view::npos) end = path.size();
        if (end > start) out.emplace_back(path.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

json event_json(const Game& g, const SessionEvent& e) {
    json claims = json::array();
    for (const auto& c : e.claims) claims.push_back(claim_json(g.det(), c));
    json out{{"round", e.round}, {"actor", role_name(e.actor)}, {"engine", e.engine}, {"claims", claims}};
    if (!e.note.empty()) out["note"] = e.note;
    return out;
}

}  // namespace

std::optional<std::size_t> parse_rounds(const json& j) {
    if (j.is_null()) return std::nullopt;
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::nullopt;
        require(!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }),
                Errc::invalid_argument, "rounds must be a natural number or \"inf\"");
        return std::stoul(s);
    }
    require(j.is_number_unsigned() || (j.is_number_integer() && j.get<long>() >= 0), Errc::invalid_argument,
            "rounds must be a natural number or \"inf\"");
    return j.get<std::size_t>();
}

json rounds_json(std::optional<std::size_t> rounds) { return rounds ? json(*rounds) : json("inf"); }

DetOptions parse_options(const json& j) {
    DetOptions o;
    if (!j.is_object()) return o;
    auto natural = [&](const char* key) {
        const json& v = j.at(key);
        require(v.is_number_integer() && v.get<long>() >= 0, Errc::invalid_argument, std::string(key) + " must be natural");
        return v.get<std::size_t>();
    };
    if (j.contains("powersetCap")) o.powerset_cap = natural("powersetCap");
    if (j.contains("pointCap")) o.point_cap = natural("pointCap");
    if (j.contains("depth") && !j.at("depth").is_null()) o.depth = natural("depth");
    return o;
}

std::string errc_name(Errc c) {
    switch (c) {
        case Errc::invalid_argument: return "invalidArgument";
        case Errc::validation: return "validation";
        case Errc::mismatch: return "mismatch";
        case Errc::cap_exceeded: return "capExceeded";
        case Errc::incomplete: return "incomplete";
        case Errc::budget_exhausted: return "budgetExhausted";
        case Errc::not_found: return "notFound";
        case Errc::illegal_move: return "illegalMove";
        case Errc::out_of_turn: return "outOfTurn";
        case Errc::unsupported: return "unsupported";
        case Errc::internal: return "internal";
    }
    return "internal";
}

json claim_json(const DetSystem& det, const Claim& c) {
    json out = claim_to_json(det, c);
    out["text"] = format_claim(det, c);
    return out;
}

json solve(std::shared_ptr<const Model> model, const json& request) {
    const Semantics s = semantics_of(request);
    const auto rounds = parse_rounds(request.value("rounds", json("inf")));
    auto game = make_game(std::move(model), s, options_for(s, request, rounds));
    const auto& det = game->det();
    json out{{"semantics", instance_info(s).name}, {"rounds", rounds_json(rounds)}, {"points", names_json(det)},
             {"complete", det.complete}};
    std::optional<Claim> claim;
    if (request.contains("claim") && !request.at("claim").is_null())
        claim = game->position(claim_of(det, request.at("claim")));

    if (game->quantitative()) {
        const ValueReport v = game->value_table(rounds);
        out["values"] = value_matrix(v);
        out["statistics"] = {{"iterations", v.statistics.iterations}};
        if (claim) {
            auto [l, r] = ends_of(*claim);
            require(v.defined.empty() || v.defined[l * v.points + r], Errc::incomplete,
                    "the value of this pair lies beyond the explored carrier");
            out["value"] = to_string(v.value(l, r));
            add_claim_verdict(out, *game, *claim, holds_at(v, *claim, std::nullopt), rounds, v);
        }
        return out;
    }
    const GameReport report = rounds ? game->winning_region_n(*rounds) : game->winning_region_inf();
    json region = json::array();
    for (std::size_t i = 0; i < report.points; ++i)
        for (std::size_t j = 0; j < report.points; ++j)
            if (report.won(i, j)) region.push_back({det.point_name(i), det.point_name(j)});
    out["region"] = std::move(region);
    out["statistics"] = {{"positions", report.statistics.positions}, {"iterations", report.statistics.iterations}};
    if (claim) {
        auto [l, r] = ends_of(*claim);
        const bool won = report.won(l, r);
        add_claim_verdict(out, *game, *claim, won, rounds, report);
        if (!won && (s == Semantics::TraceInc || s == Semantics::BTopNFA || s == Semantics::BTopDFA)) {
            if (auto word = game->distinguishing_word(report, l, r)) {
                json labels = json::array();
                for (auto a : *word) labels.push_back(det.model->labels.at(a));
                out["distinguishingWord"] = labels;
            }
        }
    }
    return out;
}

json values(std::shared_ptr<const Model> model, const json& request) {
    const Semantics s = semantics_of(request);
    const auto rounds = parse_rounds(request.value("rounds", json("inf")));
    auto game = make_game(std::move(model), s, options_for(s, request, rounds));
    const ValueReport v = game->value_table(rounds);
    return {{"semantics", instance_info(s).name}, {"rounds", rounds_json(rounds)}, {"points", names_json(game->det())},
            {"values", value_matrix(v)}, {"iterations", v.statistics.iterations}};
}

json check(std::shared_ptr<const Model> model, const json& request) {
    const Semantics s = semantics_of(request);
    const auto rounds = parse_rounds(request.value("rounds", json("inf")));
    const TheoremReport report = theorem_check(std::move(model), s, rounds, parse_options(request.value("options", json::object())));
    json found = json::array();
    for (const auto& d : report.discrepancies)
        found.push_back({{"lhs", d.lhs}, {"rhs", d.rhs}, {"game", d.game}, {"oracle", d.oracle}});
    return {{"semantics", instance_info(s).name}, {"rounds", rounds_json(rounds)}, {"positions", report.positions},
            {"discrepancies", found}, {"count", report.discrepancies.size()}};
}

json prove(const json& request) {
    require(request.contains("goal") && request.at("goal").is_string(), Errc::invalid_argument, "request lacks a goal");
    const std::string goal_text = request.at("goal").get<std::string>();
    std::vector<std::string> labels;
    if (request.contains("labels"))
        labels = request.at("labels").get<std::vector<std::string>>();
    else
        labels = goal_labels(goal_text);
    const json& b = request.value("budget", json(10000));
    require(b.is_number_integer() && b.get<long>() >= 0, Errc::invalid_argument, "budget must be natural");
    const logic::Theory th = logic::trace_theory(labels);
    const logic::Judgement goal = logic::parse_judgement(goal_text, th.signature);
    const logic::SearchResult r = logic::prove(th, goal, b.get<std::size_t>());
    json out{{"goal", logic::format_judgement(goal)}, {"outcome", logic::outcome_name(r.outcome)}, {"steps", r.steps}};
    out["proof"] = r.proof ? json(logic::serialize(*r.proof)) : json();
    return out;
}

json examples() {
    return {
        {"fig1-nfa.json", json::parse(R"({
  "kind": "nfa", "states": ["x1", "x2", "x3"], "labels": ["a"], "accepting": ["x1"],
  "transitions": [
    {"from": "x1", "label": "a", "to": "x1"}, {"from": "x1", "label": "a", "to": "x2"},
    {"from": "x1", "label": "a", "to": "x3"}, {"from": "x2", "label": "a", "to": "x1"},
    {"from": "x3", "label": "a", "to": "x3"}]})")},
        {"fig1-lts.json", json::parse(R"({
  "kind": "lts", "states": ["x1", "x2", "x3"], "labels": ["a"],
  "transitions": [
    {"from": "x1", "label": "a", "to": "x1"}, {"from": "x1", "label": "a", "to": "x2"},
    {"from": "x1", "label": "a", "to": "x3"}, {"from": "x2", "label": "a", "to": "x1"},
    {"from": "x3", "label": "a", "to": "x3"}]})")},
        {"coins-lmc.json", json::parse(R"({
  "kind": "lmc", "states": ["fair", "heads", "tails"], "labels": ["h", "t"],
  "transitions": [
    {"from": "fair", "label": "h", "to": "heads", "prob": "1/2"},
    {"from": "fair", "label": "t", "to": "tails", "prob": "1/2"},
    {"from": "heads", "label": "h", "to": "heads", "prob": "1"},
    {"from": "tails", "label": "t", "to": "tails", "prob": "1"}]})")},
        {"metric-lts.json", json::parse(R"({
  "kind": "mlts", "states": ["p", "q", "r"], "labels": ["a", "b"], "metric_kind": "pseudometric",
  "label_metric": [["a", "b", "1/2"]],
  "transitions": [
    {"from": "p", "label": "a", "to": "q"}, {"from": "q", "label": "b", "to": "q"},
    {"from": "r", "label": "b", "to": "r"}]})")},
        {"parity-dfa.json", json::parse(R"({
  "kind": "dfa", "states": ["even", "odd"], "labels": ["a"], "accepting": ["even"],
  "transitions": [{"from": "even", "label": "a", "to": "odd"}, {"from": "odd", "label": "a", "to": "even"}]})")},
    };
}

Response Service::handle(std::string_view method, std::string_view path, std::string_view body) {
    try {
        const auto parts = segments(path);
        const json request = parse_body(body);
        if (parts.size() == 1 && parts[0] == "systems") {
            if (method == "POST") return create_system(request);
            if (method == "GET") return list_systems();
        } else if (parts.size() == 2 && parts[0] == "systems" && method == "GET") {
            std::lock_guard<std::mutex> hold(mutex_);
            auto it = systems_.find(parts[1]);
            if (it == systems_.end()) throw UnknownId{"unknown system " + parts[1]};
            return {200, {{"systemId", parts[1]}, {"system", json::parse(print_model(*it->second.model))}}};
        } else if (parts.size() == 1 && parts[0] == "sessions" && method == "POST") {
            return create_session(request);
        } else if (parts.size() == 2 && parts[0] == "sessions") {
            if (method == "GET") return session_state(parts[1]);
            if (method == "DELETE") return drop_session(parts[1]);
        } else if (parts.size() == 3 && parts[0] == "sessions" && parts[2] == "moves" && method == "POST") {
            return move(parts[1], request);
        } else {
            return {404, error_body("no route for " + std::string(path), "notFound")};
        }
        return {405, error_body("method not allowed", "invalidArgument")};
    } catch (const UnknownId& e) {
        return {404, error_body(e.what, "notFound")};
    } catch (const Error& e) {
        if (e.code() == Errc::out_of_turn) return {409, error_body(e.what(), errc_name(e.code()))};
        return {400, error_body(e.what(), errc_name(e.code()))};
    } catch (const json::exception& e) {
        return {400, error_body(e.what(), "validation")};
    } catch (const std::exception& e) {
        return {500, error_body(e.what(), "internal")};
    }
}

Response Service::create_system(const json& body) {
    const json& doc = body.contains("system") ? body.at("system") : body;
    auto model = std::make_shared<const Model>(parse_model(doc.dump()));
    std::lock_guard<std::mutex> hold(mutex_);
    const std::string id = "s" + std::to_string(next_system_++);
    systems_[id] = SystemEntry{model, {}};
    return {201,
            {{"systemId", id}, {"kind", model_kind_name(model->kind)}, {"states", model->states->elements()},
             {"labels", model->labels}}};
}

Response Service::list_systems() {
    std::lock_guard<std::mutex> hold(mutex_);
    json out = json::array();
    for (const auto& [id, e] : systems_)
        out.push_back({{"systemId", id}, {"kind", model_kind_name(e.model->kind)}, {"states", e.model->states->elements()}});
    return {200, {{"systems", out}}};
}

std::shared_ptr<const Game> Service::game_for(const std::string& system, Semantics s, const DetOptions& o) {
    const std::string key = instance_info(s).name + "/" + std::to_string(o.powerset_cap) + "/" +
                            std::to_string(o.point_cap) + "/" + (o.depth ? std::to_string(*o.depth) : "-");
    std::shared_ptr<const Model> model;
    {
        std::lock_guard<std::mutex> hold(mutex_);
        auto it = systems_.find(system);
        if (it == systems_.end()) throw UnknownId{"unknown system " + system};
        if (auto g = it->second.games.find(key); g != it->second.games.end()) return g->second;
        model = it->second.model;
    }
    auto game = make_game(model, s, o);
    std::lock_guard<std::mutex> hold(mutex_);
    return systems_.at(system).games.emplace(key, std::move(game)).first->second;
}

Response Service::create_session(const json& body) {
    require(body.contains("systemId") && body.at("systemId").is_string(), Errc::validation, "session needs a systemId");
    const std::string system = body.at("systemId").get<std::string>();
    const Semantics s = semantics_of(body);
    const auto rounds = parse_rounds(body.value("rounds", json("inf")));
    const std::string role = body.value("role", std::string("spoiler"));
    require(role == "spoiler" || role == "duplicator", Errc::validation, "role is spoiler or duplicator");
    require(body.contains("claim"), Errc::validation, "session needs a claim");
    auto game = game_for(system, s, options_for(s, body, rounds));
    const Claim start = claim_of(game->det(), body.at("claim"));
    auto entry = std::make_shared<SessionEntry>();
    entry->system = system;
    entry->session = std::make_shared<Session>(game, start, role == "spoiler" ? Role::Spoiler : Role::Duplicator, rounds);
    std::string id;
    {
        std::lock_guard<std::mutex> hold(mutex_);
        id = "g" + std::to_string(next_session_++);
        sessions_[id] = entry;
    }
    std::lock_guard<std::mutex> hold(entry->lock);
    return {201, state_json(id, *entry)};
}

std::shared_ptr<Service::SessionEntry> Service::find_session(const std::string& id) {
    std::lock_guard<std::mutex> hold(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw UnknownId{"unknown session " + id};
    return it->second;
}

json Service::state_json(const std::string& id, const SessionEntry& e) const {
    const Session& s = *e.session;
    const Game& g = s.game();
    json pending = json::array(), legal = json::array(), history = json::array();
    for (const auto& c : s.pending()) pending.push_back(claim_json(g.det(), c));
    for (const auto& c : s.legal_moves()) legal.push_back(claim_json(g.det(), c));
    for (const auto& ev : s.history()) history.push_back(event_json(g, ev));
    return {{"sessionId", id},
            {"systemId", e.system},
            {"semantics", instance_info(g.det().semantics).name},
            {"role", role_name(s.human())},
            {"rounds", rounds_json(s.rounds())},
            {"round", s.round()},
            {"status", status_name(s.status())},
            {"toMove", role_name(s.to_move())},
            {"position", claim_json(g.det(), s.position())},
            {"pending", pending},
            {"legalMoves", legal},
            {"explanation", s.explanation()},
            {"history", history}};
}

Response Service::session_state(const std::string& id) {
    auto entry = find_session(id);
    std::lock_guard<std::mutex> hold(entry->lock);
    return {200, state_json(id, *entry)};
}

Response Service::move(const std::string& id, const json& body) {
    auto entry = find_session(id);
    std::lock_guard<std::mutex> hold(entry->lock);
    Session& s = *entry->session;
    require(body.contains("move"), Errc::validation, "request lacks a move");
    require(s.status() == SessionStatus::Ongoing, Errc::out_of_turn, "the session is over");
    require(s.to_move() == s.human(), Errc::out_of_turn, "it is not the " + role_name(s.human()) + "'s turn");
    const DetSystem& det = s.game().det();
    SessionReply reply;
    try {
        reply = s.human() == Role::Spoiler ? s.play_spoiler(claim_of(det, body.at("move")))
                                           : s.play_duplicator(claims_of(det, body.at("move")));
    } catch (const Error& e) {
        if (e.code() == Errc::out_of_turn) throw;
        reply = {false, e.what(), {}};
    }
    json events = json::array();
    for (const auto& ev : reply.engine_events) events.push_back(event_json(s.game(), ev));
    json out = state_json(id, *entry);
    out["engineReply"] = events;
    out["accepted"] = reply.accepted;
    if (!reply.accepted) {
        out["error"] = reply.explanation;
        out["verdict"] = {{"accepted", false}, {"explanation", reply.explanation}};
        return {422, out};
    }
    return {200, out};
}

Response Service::drop_session(const std::string& id) {
    std::lock_guard<std::mutex> hold(mutex_);
    if (!sessions_.erase(id)) throw UnknownId{"unknown session " + id};
    return {200, {{"deleted", id}}};
}

}  // namespace gce::api
