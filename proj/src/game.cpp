#include "gce/game.hpp"

#include "gce/claims.hpp"
#include "gce/error.hpp"

#include <algorithm>
#include <map>

namespace gce {

namespace {

bool set_like(Semantics s) {
    return s == Semantics::TraceInc || s == Semantics::BTopDFA || s == Semantics::BTopNFA;
}

std::pair<std::size_t, std::size_t> ends(const Claim& c) {
    if (auto* p = std::get_if<PairClaim>(&c)) return {p->lhs, p->rhs};
    const auto& b = std::get<BoundedClaim>(c);
    return {b.lhs, b.rhs};
}

std::size_t count_related(const Conformance& c) {
    return static_cast<std::size_t>(std::count(c.relation().begin(), c.relation().end(), 1));
}

void add_unique(std::vector<Claim>& z, Claim c) {
    if (std::find(z.begin(), z.end(), c) == z.end()) z.push_back(std::move(c));
}

}  // namespace

const Region& GameReport::target(std::optional<std::size_t> left) const {
    if (!left) return levels.back();
    require(*left >= 1 && *left <= levels.size() - 1, Errc::invalid_argument, "no level for that many rounds");
    return levels[*left - 1];
}

const std::vector<Rational>& ValueReport::target(std::optional<std::size_t> left) const {
    if (!left) return levels.back();
    require(*left >= 1 && *left <= levels.size() - 1, Errc::invalid_argument, "no level for that many rounds");
    return levels[*left - 1];
}

Game::Game(std::shared_ptr<const DetSystem> det)
    : det_(std::move(det)), alg_(AlgebraDescriptor::plain(make_carrier({}), Fibre::Preorder)) {
    require(det_ != nullptr, Errc::invalid_argument, "no determinized system");
    alg_ = AlgebraDescriptor::of(*det_);
}

bool Game::quantitative() const { return instance_info(det_->semantics).quantitative; }

void Game::check_claim(const Claim& c) const {
    const std::size_t n = det_->size();
    auto in_range = [&](std::size_t i) {
        require(i < n, Errc::illegal_move, "claim refers to a point outside the determinized carrier");
    };
    std::visit(
        [&](const auto& claim) {
            using T = std::decay_t<decltype(claim)>;
            if constexpr (std::is_same_v<T, NearnessClaim>) {
                in_range(claim.point);
                for (auto t : claim.targets) in_range(t);
            } else {
                in_range(claim.lhs);
                in_range(claim.rhs);
            }
            if constexpr (std::is_same_v<T, BoundedClaim>)
                require(claim.bound >= 0 && claim.bound <= 1, Errc::illegal_move, "claim bound outside [0,1]");
        },
        c);
}

Claim Game::position(const Claim& c) const {
    check_claim(c);
    Claim out = c;
    if (auto* near = std::get_if<NearnessClaim>(&c)) {
        require(near->targets.size() == 1, Errc::unsupported,
                "nearness claims with several targets are decided one target at a time");
        out = PairClaim{near->point, near->targets.front()};
    }
    if (quantitative()) {
        if (auto* p = std::get_if<PairClaim>(&out)) out = BoundedClaim{p->lhs, p->rhs, Rational(0)};
    } else {
        require(std::holds_alternative<PairClaim>(out), Errc::illegal_move,
                "bounded claims need a quantitative semantics");
    }
    return out;
}

std::string Game::format_claim(const Claim& c) const { return gce::format_claim(*det_, c); }

bool Game::bluff_check(const Claim& pos) const {
    const auto [lhs, rhs] = ends(position(pos));
    if (det_->semantics != Semantics::TraceInc) return true;
    return det_->points[lhs].support.empty() || !det_->points[rhs].support.empty();
}

Conformance Game::claims_conformance(const std::vector<Claim>& z) const {
    const std::size_t n = det_->size();
    if (quantitative()) {
        std::vector<Rational> d(n * n, Rational(1));
        for (const auto& c : z) {
            const BoundedClaim b = std::get<BoundedClaim>(position(c));
            Rational& slot = d[b.lhs * n + b.rhs];
            slot = min_of(slot, b.bound);
        }
        return Conformance::from_distances(det_->carrier, det_->fibre(), std::move(d));
    }
    std::vector<char> r(n * n, 0);
    for (const auto& c : z) {
        const auto [lhs, rhs] = ends(position(c));
        r[lhs * n + rhs] = 1;
    }
    return Conformance::from_relation(det_->carrier, det_->fibre(), std::move(r));
}

Conformance Game::region_conformance(const Region& r) const {
    return Conformance::from_relation(det_->carrier, det_->fibre(), r);
}

Conformance Game::value_conformance(const std::vector<Rational>& v) const {
    return Conformance::from_distances(det_->carrier, det_->fibre(), v);
}

Admissibility Game::admissible(const Claim& pos, const std::vector<Claim>& z) const {
    const Claim p = position(pos);
    const auto [lhs, rhs] = ends(p);
    const Conformance ground = close(alg_, claims_conformance(z));
    const OneStep& left = det_->step(lhs);
    const OneStep& right = det_->step(rhs);
    const Verdict v = lift_compare(*det_, left, right, ground);
    const auto& names = *det_->carrier;
    const Model& m = *det_->model;

    if (quantitative()) {
        const Rational& bound = std::get<BoundedClaim>(p).bound;
        if (v.distance <= bound) return {true, v.distance, ""};
        return {false, v.distance,
                "the lifted distance " + to_string(v.distance) + " between the one-step behaviours of " +
                    names.name(lhs) + " and " + names.name(rhs) + " exceeds the claimed bound " + to_string(bound)};
    }
    if (v.holds) return {true, Rational(0), ""};
    std::string why;
    if (set_like(det_->semantics)) {
        if (left.accepting && !right.accepting) {
            why = names.name(lhs) + " accepts the empty word but " + names.name(rhs) + " does not";
        } else {
            for (std::size_t a = 0; a < left.by_label.size() && why.empty(); ++a)
                if (!ground.related(left.by_label[a], right.by_label[a]))
                    why = "after label " + m.labels[a] + ", " + names.name(left.by_label[a]) + " <= " +
                          names.name(right.by_label[a]) + " is not in the refinement generated by the claims";
        }
    } else {
        auto unmatched = [&](const std::vector<LabelledSuccessor>& from, const std::vector<LabelledSuccessor>& by,
                             std::size_t owner) -> std::string {
            for (const auto& f : from) {
                bool matched = false;
                for (const auto& g : by) matched = matched || (g.label == f.label && ground.related(f.to, g.to));
                if (!matched)
                    return "the move " + names.name(owner) + " --" + m.labels[f.label] + "--> " + names.name(f.to) +
                           " has no related answer";
            }
            return "";
        };
        why = unmatched(left.moves, right.moves, lhs);
        if (why.empty()) why = unmatched(right.moves, left.moves, rhs);
    }
    if (why.empty()) why = "the lifted comparison fails";
    return {false, Rational(1), why};
}

Region Game::bluff_region() const {
    const std::size_t n = det_->size();
    Region r(n * n, 1);
    if (det_->semantics == Semantics::TraceInc)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                r[i * n + j] = det_->points[i].support.empty() || !det_->points[j].support.empty();
    return r;
}

void Game::require_steps() const {
    for (std::size_t i = 0; i < det_->size(); ++i)
        require(det_->has_step(i), Errc::incomplete,
                "point " + det_->point_name(i) + " has no explored step; the carrier is depth-limited");
}

Region Game::step_region(const Region& ground, bool restrict_to_ground, GameStatistics& stats) const {
    const std::size_t n = det_->size();
    const Conformance closed = close(alg_, region_conformance(ground));
    stats.closure_sizes.push_back(count_related(closed));
    ++stats.iterations;
    Region next(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (restrict_to_ground && !ground[i * n + j]) continue;
            next[i * n + j] = lift_compare(*det_, det_->step(i), det_->step(j), closed).holds;
        }
    return next;
}

GameReport Game::winning_region_n(std::size_t n) const {
    require(!quantitative(), Errc::unsupported, "quantitative semantics are solved by value tables");
    require_steps();
    GameReport report{det_->semantics, n, det_->size(), {bluff_region()}, {}};
    report.statistics.positions = det_->size() * det_->size();
    for (std::size_t k = 0; k < n; ++k) report.levels.push_back(step_region(report.levels.back(), false, report.statistics));
    return report;
}

GameReport Game::winning_region_inf() const {
    require(!quantitative(), Errc::unsupported, "quantitative semantics are solved by value tables");
    require(det_->complete, Errc::incomplete,
            "the infinite game needs the complete determinized carrier; only a truncated one is available");
    require_steps();
    GameReport report{det_->semantics, std::nullopt, det_->size(), {bluff_region()}, {}};
    report.statistics.positions = det_->size() * det_->size();
    while (true) {
        Region next = step_region(report.levels.back(), true, report.statistics);
        if (next == report.levels.back()) break;
        report.levels.push_back(std::move(next));
    }
    return report;
}

GameReport Game::winning_region_exhaustive(std::size_t n) const {
    require(!quantitative(), Errc::unsupported, "quantitative semantics are solved by value tables");
    require_steps();
    const std::size_t size = det_->size();
    GameReport report{det_->semantics, n, size, {bluff_region()}, {}};
    report.statistics.positions = size * size;
    for (std::size_t k = 0; k < n; ++k) {
        const Region& prev = report.levels.back();
        std::vector<Claim> candidates;
        for (std::size_t i = 0; i < size; ++i)
            for (std::size_t j = 0; j < size; ++j)
                if (i != j && prev[i * size + j]) candidates.push_back(PairClaim{i, j});
        require(candidates.size() <= 16, Errc::cap_exceeded, "exhaustive move search needs at most 16 claims");
        Region next(size * size, 0);
        for (std::uint32_t mask = 0; mask < (1U << candidates.size()); ++mask) {
            std::vector<Claim> z;
            for (std::size_t b = 0; b < candidates.size(); ++b)
                if (mask >> b & 1U) z.push_back(candidates[b]);
            const Conformance closed = close(alg_, claims_conformance(z));
            for (std::size_t i = 0; i < size; ++i)
                for (std::size_t j = 0; j < size; ++j)
                    if (!next[i * size + j] && lift_compare(*det_, det_->step(i), det_->step(j), closed).holds)
                        next[i * size + j] = 1;
            ++report.statistics.iterations;
        }
        report.levels.push_back(std::move(next));
    }
    return report;
}

ValueReport Game::value_table(std::optional<std::size_t> depth) const {
    require(quantitative(), Errc::unsupported, "value tables need a quantitative semantics");
    if (!depth)
        require(det_->complete, Errc::incomplete,
                "the infinite value table needs the complete determinized carrier; only a truncated one is available");
    const std::size_t n = det_->size();
    ValueReport report{det_->semantics, depth, n, {std::vector<Rational>(n * n, Rational(0))}, {}, {}};
    report.statistics.positions = n * n;
    std::vector<char> defined(n * n, 1);

    auto successors_defined = [&](std::size_t i, std::size_t j) {
        if (!det_->has_step(i) || !det_->has_step(j)) return false;
        const OneStep& l = det_->step(i);
        const OneStep& r = det_->step(j);
        if (det_->semantics == Semantics::PTrace) {
            for (const auto& a : l.masses)
                for (const auto& b : r.masses)
                    if (a.label == b.label && !defined[a.point * n + b.point]) return false;
            return true;
        }
        for (const auto& f : l.moves)
            for (const auto& g : r.moves)
                if (!defined[f.to * n + g.to]) return false;
        return true;
    };

    constexpr std::size_t iteration_cap = 10000;
    for (std::size_t k = 0; !depth || k < *depth; ++k) {
        require(k < iteration_cap, Errc::cap_exceeded,
                "value iteration did not stabilise within " + std::to_string(iteration_cap) + " rounds");
        const Conformance ground = close(alg_, value_conformance(report.levels.back()));
        report.statistics.closure_sizes.push_back(count_related(ground));
        std::vector<char> next_defined(n * n, 0);
        std::vector<Rational> next(n * n, Rational(1));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) {
                    next[i * n + j] = 0;
                    next_defined[i * n + j] = 1;
                    continue;
                }
                if (!successors_defined(i, j)) continue;
                next_defined[i * n + j] = 1;
                next[i * n + j] = lift_compare(*det_, det_->step(i), det_->step(j), ground).distance;
            }
        ++report.statistics.iterations;
        defined = std::move(next_defined);
        if (!depth && next == report.levels.back()) break;
        report.levels.push_back(std::move(next));
    }
    report.defined = std::move(defined);
    return report;
}

std::vector<Claim> Game::duplicator_move(const GameReport& report, const Claim& pos,
                                         std::optional<std::size_t> left) const {
    const Claim p = position(pos);
    const auto [lhs, rhs] = ends(p);
    const Region& target = report.target(left);
    const std::size_t n = det_->size();
    const OneStep& l = det_->step(lhs);
    const OneStep& r = det_->step(rhs);
    std::vector<Claim> z;
    bool within = true;
    if (set_like(det_->semantics)) {
        for (std::size_t a = 0; a < l.by_label.size(); ++a) {
            add_unique(z, PairClaim{l.by_label[a], r.by_label[a]});
            within = within && target[l.by_label[a] * n + r.by_label[a]];
        }
    } else {
        for (const auto& f : l.moves)
            for (const auto& g : r.moves)
                if (f.label == g.label && target[f.to * n + g.to]) add_unique(z, PairClaim{f.to, g.to});
        for (const auto& g : r.moves)
            for (const auto& f : l.moves)
                if (f.label == g.label && target[g.to * n + f.to]) add_unique(z, PairClaim{g.to, f.to});
    }
    std::sort(z.begin(), z.end());
    if (within && admissible(p, z).admissible) return z;
    z.clear();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && target[i * n + j]) z.push_back(PairClaim{i, j});
    return z;
}

std::vector<Claim> Game::duplicator_move(const ValueReport& report, const Claim& pos,
                                         std::optional<std::size_t> left) const {
    const Claim p = position(pos);
    const auto [lhs, rhs] = ends(p);
    const auto& target = report.target(left);
    const std::size_t n = det_->size();
    const OneStep& l = det_->step(lhs);
    const OneStep& r = det_->step(rhs);
    const Model& m = *det_->model;
    std::vector<Claim> z;
    if (det_->semantics == Semantics::PTrace) {
        for (const auto& a : l.masses)
            for (const auto& b : r.masses)
                if (a.label == b.label) add_unique(z, BoundedClaim{a.point, b.point, target[a.point * n + b.point]});
    } else {
        for (const auto& f : l.moves) {
            std::optional<LabelledSuccessor> best;
            Rational best_cost = 2;
            for (const auto& g : r.moves) {
                Rational cost = max_of(m.label_distance(f.label, g.label), target[f.to * n + g.to]);
                if (cost < best_cost) {
                    best_cost = cost;
                    best = g;
                }
            }
            if (best) add_unique(z, BoundedClaim{f.to, best->to, target[f.to * n + best->to]});
        }
    }
    std::sort(z.begin(), z.end());
    if (admissible(p, z).admissible) return z;
    z.clear();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && target[i * n + j] < 1) z.push_back(BoundedClaim{i, j, target[i * n + j]});
    return z;
}

std::optional<Claim> Game::spoiler_pick(const GameReport& report, const std::vector<Claim>& z,
                                        std::optional<std::size_t> left) const {
    const Region& target = report.target(left);
    for (const auto& c : z) {
        const Claim p = position(c);
        const auto [lhs, rhs] = ends(p);
        if (!target[lhs * det_->size() + rhs]) return p;
    }
    return std::nullopt;
}

std::optional<Claim> Game::spoiler_pick(const ValueReport& report, const std::vector<Claim>& z,
                                        std::optional<std::size_t> left) const {
    const auto& target = report.target(left);
    for (const auto& c : z) {
        const Claim p = position(c);
        const auto& b = std::get<BoundedClaim>(p);
        if (target[b.lhs * det_->size() + b.rhs] > b.bound) return p;
    }
    return std::nullopt;
}

std::optional<Word> Game::distinguishing_word(const GameReport& report, std::size_t lhs, std::size_t rhs) const {
    require(set_like(det_->semantics), Errc::unsupported, "distinguishing words exist for word-based semantics only");
    if (report.won(lhs, rhs)) return std::nullopt;
    auto first_failure = [&](std::size_t i, std::size_t j) {
        for (std::size_t k = 0; k < report.levels.size(); ++k)
            if (!report.won_at(k, i, j)) return k;
        fail(Errc::internal, "pair is not losing at any level");
    };
    std::size_t level = report.rounds ? *report.rounds : first_failure(lhs, rhs);
    std::map<std::size_t, Conformance> closed;
    Word word;
    while (level > 0) {
        auto it = closed.find(level - 1);
        if (it == closed.end())
            it = closed.emplace(level - 1, close(alg_, region_conformance(report.levels[level - 1]))).first;
        const OneStep& l = det_->step(lhs);
        const OneStep& r = det_->step(rhs);
        if (l.accepting && !r.accepting) return word;
        std::optional<std::size_t> label;
        for (std::size_t a = 0; a < l.by_label.size() && !label; ++a)
            if (!it->second.related(l.by_label[a], r.by_label[a])) label = a;
        require(label.has_value(), Errc::internal, "losing pair with an admissible canonical move");
        word.push_back(*label);
        lhs = l.by_label[*label];
        rhs = r.by_label[*label];
        level = report.rounds ? level - 1 : first_failure(lhs, rhs);
    }
    return word;
}

std::string role_name(Role r) { return r == Role::Spoiler ? "spoiler" : "duplicator"; }

std::string status_name(SessionStatus s) {
    switch (s) {
        case SessionStatus::Ongoing: return "ongoing";
        case SessionStatus::DuplicatorWins: return "duplicatorWins";
        case SessionStatus::SpoilerWins: return "spoilerWins";
    }
    return "?";
}

Session::Session(std::shared_ptr<const Game> game, const Claim& start, Role human, std::optional<std::size_t> rounds)
    : game_(std::move(game)), position_(game_->position(start)), human_(human), rounds_(rounds) {
    if (game_->quantitative())
        values_ = game_->value_table(rounds);
    else
        report_ = rounds ? game_->winning_region_n(*rounds) : game_->winning_region_inf();
    std::vector<SessionEvent> events;
    begin_round(events);
}

std::optional<std::size_t> Session::left() const {
    if (!rounds_) return std::nullopt;
    return *rounds_ - round_;
}

bool Session::position_won() const {
    const auto l = left();
    if (values_) {
        const auto& b = std::get<BoundedClaim>(position_);
        const auto& v = l ? values_->levels.at(*l) : values_->values();
        return v[b.lhs * values_->points + b.rhs] <= b.bound;
    }
    const auto& p = std::get<PairClaim>(position_);
    return l ? report_->won_at(*l, p.lhs, p.rhs) : report_->won(p.lhs, p.rhs);
}

void Session::finish(SessionStatus s, std::string why) {
    status_ = s;
    explanation_ = std::move(why);
    pending_.clear();
}

void Session::begin_round(std::vector<SessionEvent>& events) {
    to_move_ = Role::Duplicator;
    if (rounds_ && round_ >= *rounds_) {
        if (game_->bluff_check(position_))
            finish(SessionStatus::DuplicatorWins,
                   "after " + std::to_string(*rounds_) + " rounds the bluff check on " +
                       game_->format_claim(position_) + " passes");
        else
            finish(SessionStatus::SpoilerWins,
                   "calling the bluff: " + game_->format_claim(position_) + " fails on the depth-0 behaviours");
        return;
    }
    if (human_ == Role::Spoiler) engine_duplicator(events);
}

void Session::engine_duplicator(std::vector<SessionEvent>& events) {
    if (!position_won()) {
        finish(SessionStatus::SpoilerWins,
               "Duplicator concedes: " + game_->format_claim(position_) + " is outside the winning region");
        return;
    }
    std::vector<Claim> z = report_ ? game_->duplicator_move(*report_, position_, left())
                                   : game_->duplicator_move(*values_, position_, left());
    SessionEvent ev{round_, Role::Duplicator, true, z, ""};
    history_.push_back(ev);
    events.push_back(ev);
    pending_ = std::move(z);
    to_move_ = Role::Spoiler;
    if (pending_.empty()) finish(SessionStatus::DuplicatorWins, "Spoiler has no claim left to challenge");
}

void Session::engine_spoiler(std::vector<SessionEvent>& events) {
    auto pick = report_ ? game_->spoiler_pick(*report_, pending_, left()) : game_->spoiler_pick(*values_, pending_, left());
    if (!pick) {
        finish(SessionStatus::DuplicatorWins, "Spoiler concedes: every claim lies in the winning region");
        return;
    }
    accept_pick(*pick, true, events);
}

void Session::accept_pick(const Claim& pick, bool engine, std::vector<SessionEvent>& events) {
    SessionEvent ev{round_, Role::Spoiler, engine, {pick}, ""};
    history_.push_back(ev);
    if (engine) events.push_back(ev);
    position_ = pick;
    pending_.clear();
    ++round_;
    begin_round(events);
}

SessionReply Session::play_duplicator(std::vector<Claim> z) {
    require(status_ == SessionStatus::Ongoing, Errc::out_of_turn, "the session is over");
    require(human_ == Role::Duplicator && to_move_ == Role::Duplicator, Errc::out_of_turn,
            "it is not the Duplicator's turn");
    std::vector<Claim> normalized;
    try {
        for (const auto& c : z) add_unique(normalized, game_->position(c));
    } catch (const Error& e) {
        return {false, e.what(), {}};
    }
    std::sort(normalized.begin(), normalized.end());
    const Admissibility verdict = game_->admissible(position_, normalized);
    history_.push_back({round_, Role::Duplicator, false, normalized, verdict.explanation});
    if (!verdict.admissible) {
        finish(SessionStatus::SpoilerWins, "inadmissible move: " + verdict.explanation);
        return {false, explanation_, {}};
    }
    pending_ = std::move(normalized);
    to_move_ = Role::Spoiler;
    std::vector<SessionEvent> events;
    if (pending_.empty())
        finish(SessionStatus::DuplicatorWins, "Spoiler has no claim left to challenge");
    else
        engine_spoiler(events);
    return {true, "", std::move(events)};
}

SessionReply Session::play_spoiler(const Claim& pick) {
    require(status_ == SessionStatus::Ongoing, Errc::out_of_turn, "the session is over");
    require(human_ == Role::Spoiler && to_move_ == Role::Spoiler, Errc::out_of_turn, "it is not the Spoiler's turn");
    Claim normalized;
    try {
        normalized = game_->position(pick);
    } catch (const Error& e) {
        return {false, e.what(), {}};
    }
    if (std::find(pending_.begin(), pending_.end(), normalized) == pending_.end())
        return {false, "the claim " + game_->format_claim(normalized) + " is not among the Duplicator's claims", {}};
    std::vector<SessionEvent> events;
    accept_pick(normalized, false, events);
    return {true, "", std::move(events)};
}

std::vector<Claim> Session::legal_moves() const {
    if (status_ != SessionStatus::Ongoing) return {};
    if (to_move_ == Role::Spoiler) return pending_;
    std::vector<Claim> out;
    if (game_->quantitative()) return out;
    const std::size_t n = game_->det().size();
    if (n > 16) return out;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.push_back(PairClaim{i, j});
    return out;
}

}  // namespace gce
