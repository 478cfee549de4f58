// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when a criterion fails,
// unless it is listed with --known-failure.
#include "gce/claims.hpp"
#include "gce/conformance.hpp"
#include "gce/game.hpp"
#include "gce/oracle.hpp"
#include "gce/refinement.hpp"
#include "gce/rellogic.hpp"
#include "gce/wasserstein.hpp"
#include "logic_corpus.hpp"
#include "support.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace gce;
using namespace gce::testing;

namespace {

// Pinned sizes and seeds.
constexpr std::size_t trace_systems = 100;
constexpr std::size_t trace_states = 4;
constexpr std::size_t trace_depth = 4;
constexpr std::size_t bisim_systems = 100;
constexpr std::size_t bisim_states = 6;
constexpr std::size_t chains = 50;
constexpr std::size_t chain_states = 4;
constexpr std::size_t chain_depth = 4;
constexpr std::size_t metric_systems = 100;
constexpr std::size_t metric_states = 5;
constexpr std::size_t canonical_carriers = 100;
constexpr std::size_t canonical_positions = 8;
constexpr std::size_t canonical_rounds = 4;
constexpr std::size_t random_queries = 100;
constexpr std::size_t proof_budget = 100000;
constexpr std::size_t property_cases = 1000;
constexpr std::size_t labels = 2;

std::uint64_t base_seed = 1000;

Rng corpus(std::uint64_t k) { return Rng(base_seed + k); }

struct Outcome {
    bool pass = true;
    std::string detail;
};

using oracle::StateSet;

std::shared_ptr<const Game> game_of(std::shared_ptr<const Model> m, Semantics s, DetOptions o = {}) {
    return std::make_shared<const Game>(det_of(std::move(m), s, o));
}

std::string pair_text(const DetSystem& det, std::size_t i, std::size_t j) {
    return det.point_name(i) + " vs " + det.point_name(j);
}

Outcome trace_inclusion_finite() {
    Rng rng = corpus(1);
    std::size_t compared = 0, wrong = 0;
    std::string first;
    for (std::size_t k = 0; k < trace_systems; ++k) {
        auto m = shared(random_lts(rng, trace_states, labels));
        auto g = game_of(m, Semantics::TraceInc);
        const auto& det = g->det();
        const auto report = g->winning_region_n(trace_depth);
        for (std::size_t n = 0; n <= trace_depth; ++n) {
            std::vector<std::set<oracle::Word>> traces;
            for (const auto& p : det.points) traces.push_back(oracle::traces_n(*m, p.support, n));
            for (std::size_t i = 0; i < det.size(); ++i)
                for (std::size_t j = 0; j < det.size(); ++j) {
                    const bool expected = std::includes(traces[j].begin(), traces[j].end(), traces[i].begin(),
                                                        traces[i].end());
                    ++compared;
                    if (report.won_at(n, i, j) != expected) {
                        ++wrong;
                        if (first.empty()) first = "; first at n=" + std::to_string(n) + " " + pair_text(det, i, j);
                    }
                }
        }
    }
    return {wrong == 0, std::to_string(compared) + " positions, " + std::to_string(wrong) + " discrepancies" + first};
}

Outcome trace_inclusion_infinite() {
    Rng rng = corpus(1);
    std::size_t compared = 0, wrong = 0;
    for (std::size_t k = 0; k < trace_systems; ++k) {
        auto m = shared(random_lts(rng, trace_states, labels));
        auto g = game_of(m, Semantics::TraceInc);
        const auto& det = g->det();
        const auto report = g->winning_region_inf();
        for (std::size_t i = 0; i < det.size(); ++i)
            for (std::size_t j = 0; j < det.size(); ++j) {
                ++compared;
                if (report.won(i, j) != oracle::language_inclusion(*m, det.points[i].support, det.points[j].support))
                    ++wrong;
            }
    }
    return {wrong == 0, std::to_string(compared) + " positions, " + std::to_string(wrong) + " discrepancies"};
}

Outcome bisimulation() {
    Rng rng = corpus(2);
    std::size_t compared = 0, wrong = 0;
    for (std::size_t k = 0; k < bisim_systems; ++k) {
        auto m = shared(random_lts(rng, bisim_states, labels));
        auto g = game_of(m, Semantics::Bisim);
        const auto& det = g->det();
        const auto report = g->winning_region_inf();
        const auto blocks = oracle::bisimilarity(*m);
        for (std::size_t x = 0; x < m->state_count(); ++x)
            for (std::size_t y = 0; y < m->state_count(); ++y) {
                ++compared;
                if (report.won(det.unit[x], det.unit[y]) != (blocks[x] == blocks[y])) ++wrong;
            }
    }
    return {wrong == 0, std::to_string(compared) + " pairs, " + std::to_string(wrong) + " discrepancies"};
}

// Audits every transport solve independently of the solver's own check.
struct TransportAudit {
    std::mutex lock;
    std::size_t solves = 0;
    std::size_t failures = 0;

    void operator()(const TransportProblem& p, const TransportPlan& plan) {
        const std::size_t rows = p.supply.size(), cols = p.demand.size();
        bool ok = plan.coupling.size() == rows * cols && plan.row_potential.size() == rows &&
                  plan.column_potential.size() == cols;
        Rational primal = 0, dual = 0;
        for (std::size_t i = 0; ok && i < rows; ++i) {
            Rational out = 0;
            for (std::size_t j = 0; j < cols; ++j) {
                const Rational& f = plan.coupling[i * cols + j];
                ok = ok && f >= 0 && plan.row_potential[i] + plan.column_potential[j] <= p.cost[i * cols + j];
                out += f;
                primal += f * p.cost[i * cols + j];
            }
            ok = ok && out == p.supply[i];
            dual += p.supply[i] * plan.row_potential[i];
        }
        for (std::size_t j = 0; ok && j < cols; ++j) {
            Rational in = 0;
            for (std::size_t i = 0; i < rows; ++i) in += plan.coupling[i * cols + j];
            ok = ok && in == p.demand[j];
            dual += p.demand[j] * plan.column_potential[j];
        }
        ok = ok && primal == dual && primal == plan.value;
        std::lock_guard guard(lock);
        ++solves;
        if (!ok) ++failures;
    }
};

Outcome stepwise_vs_flat(TransportAudit& audit) {
    set_transport_observer([&](const TransportProblem& p, const TransportPlan& plan) { audit(p, plan); });
    Rng rng = corpus(3);
    std::size_t compared = 0, wrong = 0, capped = 0;
    std::string first;
    for (std::size_t k = 0; k < chains; ++k) {
        auto m = shared(random_lmc(rng, chain_states, labels));
        for (std::size_t n = 0; n <= chain_depth; ++n) {
            auto g = game_of(m, Semantics::PTrace, DetOptions{.depth = n});
            const auto& det = g->det();
            std::optional<ValueReport> computed;
            try {
                computed = g->value_table(n);
            } catch (const Error& e) {
                if (e.code() != Errc::cap_exceeded) throw;
                ++capped;
                continue;
            }
            const auto& table = *computed;
            for (std::size_t x = 0; x < m->state_count(); ++x)
                for (std::size_t y = 0; y < m->state_count(); ++y) {
                    const auto flat = oracle::total_variation(oracle::trace_distribution(*m, {{x, Rational(1)}}, n),
                                                              oracle::trace_distribution(*m, {{y, Rational(1)}}, n));
                    const auto& stepwise = table.value(det.unit[x], det.unit[y]);
                    ++compared;
                    if (stepwise != flat) {
                        ++wrong;
                        if (first.empty())
                            first = "; first: system " + std::to_string(k) + " n=" + std::to_string(n) + " " +
                                    m->states->name(x) + " vs " + m->states->name(y) + " stepwise " +
                                    to_string(stepwise) + ", flat " + to_string(flat);
                    }
                }
        }
    }
    set_transport_observer(nullptr);
    return {wrong == 0, std::to_string(compared) + " pairs, " + std::to_string(wrong) + " differ, " +
                            std::to_string(capped) + " tables over the closure cap" + first};
}

Outcome transport_certificates(const TransportAudit& audit) {
    return {audit.solves > 0 && audit.failures == 0,
            std::to_string(audit.solves) + " solves audited, " + std::to_string(audit.failures) + " failed"};
}

// One application of the simulation operator on state pairs.
std::vector<Rational> simulation_step(const Model& m, bool ready, const std::vector<Rational>& v) {
    const std::size_t n = m.state_count();
    std::vector<Rational> out(n * n, Rational(0));
    auto ready_set = [&](std::size_t x) {
        std::set<std::size_t> r;
        for (const auto& s : m.successors(x)) r.insert(s.label);
        return r;
    };
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            Rational worst = 0;
            for (const auto& s : m.successors(x)) {
                Rational best = 1;
                for (const auto& t : m.successors(y)) best = std::min(best, std::max(m.label_distance(s.label, t.label), v[s.to * n + t.to]));
                worst = std::max(worst, best);
            }
            if (ready) {
                const auto rx = ready_set(x), ry = ready_set(y);
                if (rx.empty() != ry.empty()) worst = 1;
                for (auto a : rx) {
                    Rational best = 1;
                    for (auto b : ry) best = std::min(best, m.label_distance(a, b));
                    worst = std::max(worst, best);
                }
                for (auto b : ry) {
                    Rational best = 1;
                    for (auto a : rx) best = std::min(best, m.label_distance(a, b));
                    worst = std::max(worst, best);
                }
            }
            out[x * n + y] = worst;
        }
    return out;
}

Outcome quantitative_simulation() {
    Rng rng = corpus(4);
    std::size_t tables = 0, not_fixed = 0, preorder_wrong = 0;
    for (std::size_t k = 0; k < metric_systems; ++k) {
        const auto base = random_mlts(rng, metric_states, labels, false);
        Model discrete = base;
        for (std::size_t a = 0; a < labels; ++a)
            for (std::size_t b = 0; b < labels; ++b) discrete.label_metric[a * labels + b] = a == b ? 0 : 1;
        for (bool is_discrete : {false, true}) {
            auto m = shared(is_discrete ? discrete : base);
            for (bool ready : {false, true}) {
                auto g = game_of(m, ready ? Semantics::QRSim : Semantics::QSim);
                const auto& det = g->det();
                const auto table = g->value_table(std::nullopt);
                const std::size_t n = m->state_count();
                std::vector<Rational> v(n * n);
                for (std::size_t x = 0; x < n; ++x)
                    for (std::size_t y = 0; y < n; ++y) v[x * n + y] = table.value(det.unit[x], det.unit[y]);
                ++tables;
                if (simulation_step(*m, ready, v) != v) ++not_fixed;
                if (is_discrete) {
                    const auto preorder = oracle::simulation_preorder(*m, ready);
                    for (std::size_t i = 0; i < n * n; ++i)
                        if ((v[i] == 0) != (preorder[i] != 0)) ++preorder_wrong;
                }
            }
        }
    }
    return {not_fixed == 0 && preorder_wrong == 0,
            std::to_string(tables) + " tables, " + std::to_string(not_fixed) + " not fixpoints, " +
                std::to_string(preorder_wrong) + " preorder discrepancies"};
}

Outcome three_state_golden() {
    auto g = game_of(fig1_nfa(), Semantics::BTopNFA);
    const auto& det = g->det();
    const auto report = g->winning_region_inf();
    std::vector<std::string> problems;
    const Claim start = g->position(parse_claim(det, "x2 ~> x1"));
    if (!report.won(std::get<PairClaim>(start).lhs, std::get<PairClaim>(start).rhs))
        problems.push_back("x2 ~> x1 not won by the Duplicator");
    // The Duplicator's moves; the last position repeats.
    const std::vector<std::pair<const char*, const char*>> moves = {
        {"{x2} <= {x1}", "{x1} <= {x1,x2,x3}"},
        {"{x1} <= {x1,x2,x3}", "{x1,x2,x3} <= {x1,x2,x3}"},
        {"{x1,x2,x3} <= {x1,x2,x3}", "{x1,x2,x3} <= {x1,x2,x3}"},
    };
    for (const auto& [pos, z] : moves) {
        const auto verdict = g->admissible(parse_claim(det, pos), parse_claims(det, z));
        if (!verdict.admissible) problems.push_back(std::string(pos) + ": " + verdict.explanation);
    }
    const auto lost = std::get<PairClaim>(g->position(parse_claim(det, "x1 ~> x2")));
    if (report.won(lost.lhs, lost.rhs)) problems.push_back("x1 ~> x2 not won by the Spoiler");
    const auto word = g->distinguishing_word(report, lost.lhs, lost.rhs);
    if (!word || !word->empty()) problems.push_back("distinguishing word is not the empty word");
    std::string detail = problems.empty() ? "x2 ~> x1 Duplicator, moves admissible; x1 ~> x2 Spoiler, word \"\"" : "";
    for (const auto& p : problems) detail += (detail.empty() ? "" : "; ") + p;
    return {problems.empty(), detail};
}

Outcome canonical_moves() {
    Rng rng = corpus(5);
    std::size_t carriers = 0, wrong = 0, attempts = 0;
    const Semantics cycle[] = {Semantics::TraceInc, Semantics::Bisim, Semantics::BTopDFA, Semantics::BTopNFA};
    while (carriers < canonical_carriers && attempts < 100 * canonical_carriers) {
        const Semantics s = cycle[attempts++ % 4];
        std::shared_ptr<const Model> m;
        switch (s) {
            case Semantics::TraceInc: m = shared(random_lts(rng, 1, labels, 0.5)); break;
            case Semantics::Bisim: m = shared(random_lts(rng, 3, labels)); break;
            case Semantics::BTopDFA: m = shared(random_dfa(rng, 3, labels)); break;
            default: m = shared(random_nfa(rng, 1, labels)); break;
        }
        auto g = game_of(m, s);
        const std::size_t n = g->det().size();
        if (n * (n - 1) > canonical_positions) continue;
        ++carriers;
        if (g->winning_region_n(canonical_rounds).levels != g->winning_region_exhaustive(canonical_rounds).levels)
            ++wrong;
    }
    return {carriers == canonical_carriers && wrong == 0,
            std::to_string(carriers) + " carriers, " + std::to_string(wrong) + " disagreements"};
}

// Union algebras on every family of at most three subsets of three atoms, all seeds, preorder fibre.
std::size_t closure_union_failures(std::size_t& checked) {
    std::vector<std::vector<std::size_t>> subsets;
    for (unsigned mask = 0; mask < 8; ++mask) {
        std::vector<std::size_t> s;
        for (std::size_t a = 0; a < 3; ++a)
            if (mask >> a & 1U) s.push_back(a);
        subsets.push_back(s);
    }
    std::size_t failures = 0;
    for (unsigned family = 1; family < 256; ++family) {
        std::vector<std::vector<std::size_t>> sets;
        for (std::size_t k = 0; k < 8; ++k)
            if (family >> k & 1U) sets.push_back(subsets[k]);
        if (sets.size() > 3) continue;
        std::vector<std::string> point_names;
        for (std::size_t k = 0; k < sets.size(); ++k) point_names.push_back("p" + std::to_string(k));
        auto c = make_carrier(point_names);
        const std::size_t n = sets.size(), bits = n * n;
        for (Fibre f : {Fibre::Preorder, Fibre::Equivalence}) {
            const auto alg = f == Fibre::Preorder ? AlgebraDescriptor::unions(c, f, sets) : AlgebraDescriptor::plain(c, f);
            std::vector<unsigned> refinements;
            for (unsigned mask = 0; mask < (1U << bits); ++mask) {
                std::vector<char> r(bits);
                for (std::size_t b = 0; b < bits; ++b) r[b] = mask >> b & 1U;
                const auto p = Conformance::from_relation(c, f, r);
                if (p.relation() == r && is_refinement(alg, p)) refinements.push_back(mask);
            }
            for (unsigned seed = 0; seed < (1U << bits); ++seed) {
                unsigned least = (1U << bits) - 1;
                for (unsigned r : refinements)
                    if ((seed & r) == seed) least &= r;
                std::vector<char> raw(bits);
                for (std::size_t b = 0; b < bits; ++b) raw[b] = seed >> b & 1U;
                const auto closed = close(alg, Conformance::from_relation(c, f, raw));
                unsigned got = 0;
                for (std::size_t b = 0; b < bits; ++b) got |= static_cast<unsigned>(closed.relation()[b] != 0) << b;
                ++checked;
                if (got != least || std::find(refinements.begin(), refinements.end(), least) == refinements.end())
                    ++failures;
            }
        }
    }
    return failures;
}

// Convex fibres on the mixing line x, y, m = (x + y) / 2, against all refinements on a quarter grid.
std::size_t closure_convex_failures(std::size_t& checked) {
    auto c = make_carrier({"x", "y", "m"});
    const std::vector<Point> line = {Point::dirac(0), Point::dirac(1), Point{{0, 1}, {rat(1, 2), rat(1, 2)}}};
    const std::vector<Rational> grid = {0, rat(1, 4), rat(1, 2), rat(3, 4), 1};
    std::size_t failures = 0;
    for (Fibre f : {Fibre::PseudoMetric, Fibre::HemiMetric}) {
        const auto alg = AlgebraDescriptor::convex(c, f, line);
        std::vector<std::vector<Rational>> tables;
        std::size_t combos = 1;
        for (int k = 0; k < 6; ++k) combos *= grid.size();
        for (std::size_t code = 0; code < combos; ++code) {
            std::vector<Rational> d(9, Rational(0));
            std::size_t rest = code;
            for (std::size_t a = 0; a < 3; ++a)
                for (std::size_t b = 0; b < 3; ++b)
                    if (a != b) {
                        d[a * 3 + b] = grid[rest % grid.size()];
                        rest /= grid.size();
                    }
            tables.push_back(std::move(d));
        }
        std::vector<Conformance> refinements;
        for (const auto& d : tables) {
            const auto p = Conformance::from_distances(c, f, d);
            if (p.distances() == d && is_refinement(alg, p)) refinements.push_back(p);
        }
        for (const auto& d : tables) {
            const auto q = Conformance::from_distances(c, f, d);
            const auto closed = close(alg, q);
            bool ok = is_refinement(alg, closed) && leq(q, closed);
            for (const auto& p : refinements)
                if (leq(q, p)) ok = ok && leq(closed, p);
            ++checked;
            if (!ok) ++failures;
        }
    }
    return failures;
}

Outcome closure_oracle() {
    std::size_t relational = 0, metric = 0;
    const std::size_t union_failures = closure_union_failures(relational);
    const std::size_t convex_failures = closure_convex_failures(metric);
    return {union_failures == 0 && convex_failures == 0,
            std::to_string(relational) + " relational seeds (" + std::to_string(union_failures) + " wrong), " +
                std::to_string(metric) + " grid seeds on the mixing line (" + std::to_string(convex_failures) +
                " wrong)"};
}

Outcome logic_bridge() {
    std::size_t curated = 0, curated_found = 0, rechecked_failures = 0, violations = 0, random_found = 0;
    for (const auto& q : curated_logic_queries()) {
        auto g = logic_system(q.system);
        const auto& det = g->det();
        const Claim pos = parse_claim(det, q.position);
        const auto z = parse_claims(det, q.claims);
        const auto enc = logic::encode_admissibility(det, pos, z);
        const auto r = logic::prove(enc.theory, enc.goal, proof_budget);
        ++curated;
        if (!r.proof) continue;
        ++curated_found;
        if (!g->admissible(pos, z).admissible) ++violations;
        try {
            if (!(logic::check_proof(enc.theory, *r.proof) == enc.goal)) ++rechecked_failures;
        } catch (const Error&) {
            ++rechecked_failures;
        }
    }
    Rng rng = corpus(6);
    for (std::size_t i = 0; i < random_queries; ++i) {
        auto g = game_of(shared(random_lts(rng, 3, 1 + i % 2, 0.35)), Semantics::TraceInc);
        const auto& det = g->det();
        const std::size_t n = det.size();
        const Claim pos = PairClaim{uniform(rng, 0, n - 1), uniform(rng, 0, n - 1)};
        std::vector<Claim> z;
        for (std::size_t k = uniform(rng, 0, 4); k > 0; --k)
            z.push_back(PairClaim{uniform(rng, 0, n - 1), uniform(rng, 0, n - 1)});
        const auto enc = logic::encode_admissibility(det, pos, z);
        const auto r = logic::prove(enc.theory, enc.goal, proof_budget);
        if (!r.proof) continue;
        ++random_found;
        if (!g->admissible(pos, z).admissible) ++violations;
        try {
            if (!(logic::check_proof(enc.theory, *r.proof) == enc.goal)) ++rechecked_failures;
        } catch (const Error&) {
            ++rechecked_failures;
        }
    }
    return {curated >= 30 && curated_found == curated && violations == 0 && rechecked_failures == 0,
            std::to_string(curated_found) + "/" + std::to_string(curated) + " curated found, " +
                std::to_string(random_found) + "/" + std::to_string(random_queries) + " random found, " +
                std::to_string(violations) + " violations, " + std::to_string(rechecked_failures) +
                " failed re-checks"};
}

const Fibre fibres[] = {Fibre::Equivalence, Fibre::Preorder, Fibre::PseudoMetric, Fibre::HemiMetric,
                        Fibre::SpecPreorder};

Conformance random_conformance(Rng& rng, const CarrierPtr& c, Fibre f) {
    const std::size_t n = c->size();
    if (is_metric(f)) {
        std::vector<Rational> d(n * n);
        for (auto& e : d) e = rat(static_cast<long>(uniform(rng, 0, 4)), 4);
        return Conformance::from_distances(c, f, std::move(d));
    }
    std::vector<char> r(n * n);
    for (auto& e : r) e = coin(rng, 0.25) ? 1 : 0;
    return Conformance::from_relation(c, f, std::move(r));
}

Outcome property_suites() {
    Rng rng = corpus(7);
    std::size_t lattice = 0, adjunction = 0, monotone = 0, metric = 0;
    for (std::size_t k = 0; k < property_cases; ++k) {
        const Fibre f = fibres[uniform(rng, 0, 4)];
        auto c = make_carrier(names("p", uniform(rng, 1, 4)));
        const auto a = random_conformance(rng, c, f), b = random_conformance(rng, c, f), u = random_conformance(rng, c, f);
        const auto m = meet({a, b}), j = join({a, b});
        bool ok = leq(m, a) && leq(m, b) && leq(a, j) && leq(b, j) && leq(Conformance::discrete(c, f), a) &&
                  leq(a, Conformance::indiscrete(c, f)) && meet({b, a}) == m && join({b, a}) == j &&
                  meet({a, join({a, b})}) == a && join({a, meet({a, b})}) == a;
        if (leq(u, a) && leq(u, b)) ok = ok && leq(u, m);
        if (leq(a, u) && leq(b, u)) ok = ok && leq(j, u);
        if (!ok) ++lattice;
    }
    for (std::size_t k = 0; k < property_cases; ++k) {
        const Fibre f = fibres[uniform(rng, 0, 4)];
        auto dom = make_carrier(names("p", uniform(rng, 1, 4)));
        auto cod = make_carrier(names("q", uniform(rng, 1, 4)));
        std::vector<std::size_t> image(dom->size());
        for (auto& i : image) i = uniform(rng, 0, cod->size() - 1);
        const CarrierMap map(dom, cod, image);
        const auto p = random_conformance(rng, dom, f);
        const auto q = random_conformance(rng, cod, f);
        if (leq(pushforward(map, p), q) != leq(p, reindex(map, q))) ++adjunction;
    }
    for (std::size_t k = 0; k < property_cases; ++k) {
        const bool nfa = k % 2 == 1;
        auto g = game_of(shared(nfa ? random_nfa(rng, 3, labels) : random_lts(rng, 3, labels)),
                         nfa ? Semantics::BTopNFA : Semantics::TraceInc);
        const std::size_t n = g->det().size();
        const Claim pos = PairClaim{uniform(rng, 0, n - 1), uniform(rng, 0, n - 1)};
        std::vector<Claim> small, large;
        for (int i = 0; i < 4; ++i) {
            Claim c = PairClaim{uniform(rng, 0, n - 1), uniform(rng, 0, n - 1)};
            large.push_back(c);
            if (coin(rng)) small.push_back(c);
        }
        if (g->admissible(pos, small).admissible && !g->admissible(pos, large).admissible) ++monotone;
    }
    for (std::size_t k = 0; k < property_cases; ++k) {
        const auto m = random_lmc(rng, 3, labels, coin(rng));
        const std::size_t n = uniform(rng, 0, 3);
        std::vector<oracle::WordDistribution> d;
        for (std::size_t x = 0; x < m.state_count(); ++x) d.push_back(oracle::trace_distribution(m, {{x, Rational(1)}}, n));
        bool ok = true;
        for (const auto& p : d) {
            ok = ok && oracle::total_variation(p, p) == 0;
            for (const auto& q : d) {
                const auto pq = oracle::total_variation(p, q);
                ok = ok && pq >= 0 && pq <= 1 && pq == oracle::total_variation(q, p);
                for (const auto& r : d) ok = ok && oracle::total_variation(p, r) <= pq + oracle::total_variation(q, r);
            }
        }
        if (!ok) ++metric;
    }
    std::ostringstream out;
    out << property_cases << " cases each; failures: lattice " << lattice << ", adjunction " << adjunction
        << ", monotone admissibility " << monotone << ", total variation " << metric;
    return {lattice + adjunction + monotone + metric == 0, out.str()};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance suite"};
    std::vector<std::string> known;
    app.add_option("--known-failure", known, "Criterion whose failure does not affect the exit status");
    app.add_option("--seed", base_seed, "Base seed of the randomized corpora");
    CLI11_PARSE(app, argc, argv);

    TransportAudit audit;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"trace-inclusion-finite", trace_inclusion_finite},
        {"trace-inclusion-infinite", trace_inclusion_infinite},
        {"bisimulation", bisimulation},
        {"ptrace-stepwise-vs-flat", [&] { return stepwise_vs_flat(audit); }},
        {"transport-certificates", [&] { return transport_certificates(audit); }},
        {"quantitative-simulation", quantitative_simulation},
        {"three-state-golden", three_state_golden},
        {"canonical-moves", canonical_moves},
        {"closure-oracle", closure_oracle},
        {"logic-bridge", logic_bridge},
        {"property-suites", property_suites},
    };
    int status = 0;
    for (const auto& [name, run] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const auto seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool tolerated = std::find(known.begin(), known.end(), name) != known.end();
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail;
        std::cout << " [" << std::fixed << std::setprecision(1) << seconds << " s]";
        if (!o.pass && tolerated) std::cout << " (known failure)";
        std::cout << std::endl;
        if (!o.pass && !tolerated) status = 1;
    }
    return status;
}
