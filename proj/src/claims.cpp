#include "gce/claims.hpp"

#include "gce/error.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace gce {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Splits on `sep` outside braces, brackets and parentheses.
std::vector<std::string_view> split_top(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '{' || c == '[' || c == '(') ++depth;
        if (c == '}' || c == ']' || c == ')') --depth;
        if (c == sep && depth == 0) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    out.push_back(trim(s.substr(start)));
    return out;
}

// Position of `op` outside any brackets, or npos.
std::size_t find_top(std::string_view s, std::string_view op) {
    int depth = 0;
    for (std::size_t i = 0; i + op.size() <= s.size(); ++i) {
        const char c = s[i];
        if (c == '{' || c == '[' || c == '(') ++depth;
        if (c == '}' || c == ']' || c == ')') --depth;
        if (depth == 0 && s.substr(i, op.size()) == op) return i;
    }
    return std::string_view::npos;
}

std::size_t state_of(const Model& m, std::string_view name) {
    const std::string s(name);
    require(m.states->contains(s), Errc::not_found, "unknown state " + s);
    return m.states->index_of(s);
}

std::size_t locate(const DetSystem& det, Point p, const std::string& text) {
    auto found = det.find(p);
    require(found.has_value(), Errc::not_found, "point " + text + " is not in the carrier");
    return *found;
}

std::size_t set_of(const DetSystem& det, const std::vector<std::size_t>& states, const std::string& text) {
    require(det.semantics == Semantics::TraceInc || det.semantics == Semantics::BTopNFA, Errc::validation,
            "set points need a set-based semantics: " + text);
    Point p;
    p.support = states;
    std::sort(p.support.begin(), p.support.end());
    p.support.erase(std::unique(p.support.begin(), p.support.end()), p.support.end());
    return locate(det, std::move(p), text);
}

std::size_t distribution_of(const DetSystem& det, const std::map<std::size_t, Rational>& mass, const std::string& text) {
    require(det.semantics == Semantics::PTrace, Errc::validation, "distributions need the probabilistic semantics");
    Point p;
    Rational total = 0;
    for (const auto& [x, w] : mass) {
        require(w >= 0, Errc::validation, "negative weight in " + text);
        total += w;
        if (w == 0) continue;
        p.support.push_back(x);
        p.weights.push_back(w);
    }
    require(total == 1, Errc::validation, "weights of " + text + " do not sum to 1");
    return locate(det, std::move(p), text);
}

std::size_t named(const DetSystem& det, std::string_view text) {
    const std::string s(text);
    if (det.model->states->contains(s)) return det.unit.at(det.model->states->index_of(s));
    if (det.carrier->contains(s)) return det.carrier->index_of(s);
    fail(Errc::not_found, "unknown point " + s);
}

}  // namespace

std::size_t parse_point(const DetSystem& det, std::string_view text) {
    text = trim(text);
    require(!text.empty(), Errc::validation, "empty point");
    if (det.carrier->contains(std::string(text))) return det.carrier->index_of(std::string(text));
    if (text.front() != '{') return named(det, text);
    require(text.back() == '}', Errc::validation, "unterminated point " + std::string(text));
    const std::string whole(text);
    const std::string_view inner = trim(text.substr(1, text.size() - 2));
    std::vector<std::string_view> entries;
    if (!inner.empty()) entries = split_top(inner, ',');
    const bool weighted = !entries.empty() && entries[0].find(':') != std::string_view::npos;
    if (!weighted) {
        std::vector<std::size_t> states;
        for (auto e : entries) states.push_back(state_of(*det.model, e));
        return set_of(det, states, whole);
    }
    std::map<std::size_t, Rational> mass;
    for (auto e : entries) {
        const auto colon = e.find(':');
        require(colon != std::string_view::npos, Errc::validation, "missing weight in " + whole);
        mass[state_of(*det.model, trim(e.substr(0, colon)))] += parse_rational(trim(e.substr(colon + 1)));
    }
    return distribution_of(det, mass, whole);
}

Claim parse_claim(const DetSystem& det, std::string_view text) {
    text = trim(text);
    if (text.substr(0, 2) == "d(") {
        const std::size_t le = find_top(text, "<=");
        require(le != std::string_view::npos, Errc::validation, "bounded claim without a bound");
        std::string_view args = trim(text.substr(0, le));
        require(args.size() > 3 && args.back() == ')', Errc::validation, "malformed bounded claim");
        auto parts = split_top(args.substr(2, args.size() - 3), ',');
        require(parts.size() == 2, Errc::validation, "bounded claims compare two points");
        const Rational bound = parse_rational(trim(text.substr(le + 2)));
        require(bound >= 0 && bound <= 1, Errc::validation, "bound outside [0,1]");
        return BoundedClaim{parse_point(det, parts[0]), parse_point(det, parts[1]), bound};
    }
    if (const std::size_t near = find_top(text, "~>"); near != std::string_view::npos) {
        std::string_view rhs = trim(text.substr(near + 2));
        NearnessClaim n{parse_point(det, text.substr(0, near)), {}};
        if (!rhs.empty() && rhs.front() == '[') {
            require(rhs.back() == ']', Errc::validation, "unterminated target list");
            const std::string_view inner = trim(rhs.substr(1, rhs.size() - 2));
            if (!inner.empty())
                for (auto t : split_top(inner, ',')) n.targets.push_back(parse_point(det, t));
        } else {
            n.targets.push_back(parse_point(det, rhs));
        }
        return n;
    }
    const std::size_t le = find_top(text, "<=");
    require(le != std::string_view::npos, Errc::validation, "cannot read claim " + std::string(text));
    return PairClaim{parse_point(det, text.substr(0, le)), parse_point(det, text.substr(le + 2))};
}

std::vector<Claim> parse_claims(const DetSystem& det, std::string_view text) {
    std::vector<Claim> out;
    if (trim(text).empty()) return out;
    for (auto part : split_top(text, ';'))
        if (!part.empty()) out.push_back(parse_claim(det, part));
    return out;
}

std::string format_claim(const DetSystem& det, const Claim& c) {
    const auto& names = *det.carrier;
    if (auto* p = std::get_if<PairClaim>(&c)) return names.name(p->lhs) + " <= " + names.name(p->rhs);
    if (auto* b = std::get_if<BoundedClaim>(&c))
        return "d(" + names.name(b->lhs) + ", " + names.name(b->rhs) + ") <= " + to_string(b->bound);
    const auto& n = std::get<NearnessClaim>(c);
    std::string out = names.name(n.point) + " ~> [";
    for (std::size_t i = 0; i < n.targets.size(); ++i) out += (i ? ", " : "") + names.name(n.targets[i]);
    return out + "]";
}

std::size_t point_from_json(const DetSystem& det, const json& j) {
    if (j.is_string()) return parse_point(det, j.get<std::string>());
    if (j.is_array()) {
        std::vector<std::size_t> states;
        for (const auto& s : j) {
            require(s.is_string(), Errc::validation, "set points list state names");
            states.push_back(state_of(*det.model, s.get<std::string>()));
        }
        return set_of(det, states, j.dump());
    }
    if (j.is_object()) {
        std::map<std::size_t, Rational> mass;
        for (const auto& [k, w] : j.items()) {
            Rational r;
            if (w.is_string())
                r = parse_rational(w.get<std::string>());
            else if (w.is_number_integer())
                r = Rational(w.get<long>());
            else
                fail(Errc::validation, "weights are integers or \"p/q\" strings");
            mass[state_of(*det.model, k)] += r;
        }
        return distribution_of(det, mass, j.dump());
    }
    fail(Errc::validation, "cannot read point " + j.dump());
}

json point_to_json(const DetSystem& det, std::size_t point) {
    const Point& p = det.points.at(point);
    const Model& m = *det.model;
    switch (det.semantics) {
        case Semantics::TraceInc:
        case Semantics::BTopNFA: {
            json out = json::array();
            for (auto x : p.support) out.push_back(m.states->name(x));
            return out;
        }
        case Semantics::PTrace: {
            json out = json::object();
            for (std::size_t i = 0; i < p.support.size(); ++i) out[m.states->name(p.support[i])] = to_string(p.weights[i]);
            return out;
        }
        default: return m.states->name(p.support.at(0));
    }
}

Claim claim_from_json(const DetSystem& det, const json& j) {
    require(j.is_object(), Errc::validation, "claims are JSON objects");
    const std::string kind = j.value("kind", std::string("pair"));
    auto point = [&](const char* key) {
        require(j.contains(key), Errc::validation, std::string("claim lacks ") + key);
        return point_from_json(det, j.at(key));
    };
    if (kind == "pair") return PairClaim{point("lhs"), point("rhs")};
    if (kind == "bounded") {
        require(j.contains("eps"), Errc::validation, "bounded claim lacks eps");
        const json& e = j.at("eps");
        Rational bound = e.is_string() ? parse_rational(e.get<std::string>())
                         : e.is_number_integer() ? Rational(e.get<long>())
                                                 : (fail(Errc::validation, "eps is an integer or \"p/q\""), Rational());
        require(bound >= 0 && bound <= 1, Errc::validation, "bound outside [0,1]");
        return BoundedClaim{point("lhs"), point("rhs"), bound};
    }
    if (kind == "nearness") {
        NearnessClaim n{point("point"), {}};
        require(j.contains("targets") && j.at("targets").is_array(), Errc::validation, "nearness claim lacks targets");
        for (const auto& t : j.at("targets")) n.targets.push_back(point_from_json(det, t));
        return n;
    }
    fail(Errc::validation, "unknown claim kind " + kind);
}

json claim_to_json(const DetSystem& det, const Claim& c) {
    if (auto* p = std::get_if<PairClaim>(&c))
        return {{"kind", "pair"}, {"lhs", point_to_json(det, p->lhs)}, {"rhs", point_to_json(det, p->rhs)}};
    if (auto* b = std::get_if<BoundedClaim>(&c))
        return {{"kind", "bounded"},
                {"lhs", point_to_json(det, b->lhs)},
                {"rhs", point_to_json(det, b->rhs)},
                {"eps", to_string(b->bound)}};
    const auto& n = std::get<NearnessClaim>(c);
    json targets = json::array();
    for (auto t : n.targets) targets.push_back(point_to_json(det, t));
    return {{"kind", "nearness"}, {"point", point_to_json(det, n.point)}, {"targets", targets}};
}

}  // namespace gce
