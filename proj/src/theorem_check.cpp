#include "gce/theorem_check.hpp"

#include "gce/error.hpp"
#include "gce/game.hpp"
#include "gce/oracle.hpp"

#include <algorithm>

namespace gce {

namespace {

std::string verdict(bool b) { return b ? "holds" : "fails"; }

bool subset(const std::set<oracle::Word>& a, const std::set<oracle::Word>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::shared_ptr<const DetSystem> determinize_for_check(std::shared_ptr<const Model> model, Semantics semantics,
                                                       std::optional<std::size_t> rounds, const DetOptions& options) {
    if (semantics != Semantics::PTrace || !rounds)
        return std::make_shared<const DetSystem>(predeterminize(std::move(model), semantics, options));
    // Value tables are quadratic in the carrier, so large closures fall back to the depth-limited one.
    constexpr std::size_t full_carrier_cap = 64;
    try {
        DetOptions full = options;
        full.point_cap = std::min(full.point_cap, full_carrier_cap);
        return std::make_shared<const DetSystem>(predeterminize(model, semantics, full));
    } catch (const Error& e) {
        if (e.code() != Errc::cap_exceeded) throw;
        DetOptions limited = options;
        limited.depth = *rounds;
        return std::make_shared<const DetSystem>(predeterminize(std::move(model), semantics, limited));
    }
}

}  // namespace

TheoremReport theorem_check(std::shared_ptr<const Model> model, Semantics semantics, std::optional<std::size_t> rounds,
                            const DetOptions& options) {
    require(model != nullptr, Errc::invalid_argument, "no model");
    const Model& m = *model;
    const auto det = determinize_for_check(model, semantics, rounds, options);
    const Game game(det);
    const std::size_t n = det->size();
    TheoremReport report{semantics, rounds, 0, {}};
    auto record = [&](std::size_t i, std::size_t j, std::string g, std::string o) {
        if (g != o) report.discrepancies.push_back({det->point_name(i), det->point_name(j), std::move(g), std::move(o)});
    };

    if (instance_info(semantics).quantitative) {
        require(semantics != Semantics::PTrace || rounds.has_value(), Errc::unsupported,
                "the brute-force trace distance has no exact infinite-depth counterpart");
        const ValueReport values = game.value_table(rounds);
        std::vector<Rational> sim;
        if (semantics != Semantics::PTrace) sim = oracle::simulation_values(m, semantics == Semantics::QRSim, rounds);
        std::vector<oracle::WordDistribution> flat;
        if (semantics == Semantics::PTrace)
            for (const auto& p : det->points) {
                std::vector<std::pair<std::size_t, Rational>> start;
                for (std::size_t k = 0; k < p.support.size(); ++k) start.emplace_back(p.support[k], p.weights[k]);
                flat.push_back(oracle::trace_distribution(m, start, *rounds));
            }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (!values.defined[i * n + j]) continue;
                ++report.positions;
                const Rational expected = semantics == Semantics::PTrace
                                              ? oracle::total_variation(flat[i], flat[j])
                                              : sim[det->points[i].support[0] * m.state_count() + det->points[j].support[0]];
                record(i, j, to_string(values.value(i, j)), to_string(expected));
            }
        return report;
    }

    const GameReport region = rounds ? game.winning_region_n(*rounds) : game.winning_region_inf();
    std::vector<std::size_t> blocks;
    if (semantics == Semantics::Bisim) blocks = oracle::bisimilarity(m, rounds);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            ++report.positions;
            const auto& lhs = det->points[i].support;
            const auto& rhs = det->points[j].support;
            bool expected = false;
            switch (semantics) {
                case Semantics::TraceInc:
                    expected = rounds ? subset(oracle::traces_n(m, lhs, *rounds), oracle::traces_n(m, rhs, *rounds))
                                      : oracle::language_inclusion(m, lhs, rhs);
                    break;
                case Semantics::BTopDFA:
                case Semantics::BTopNFA:
                    expected = rounds ? subset(oracle::accepted_shorter_than(m, lhs, *rounds),
                                               oracle::accepted_shorter_than(m, rhs, *rounds))
                                      : oracle::language_inclusion(m, lhs, rhs);
                    break;
                case Semantics::Bisim: expected = blocks[lhs[0]] == blocks[rhs[0]]; break;
                default: fail(Errc::internal, "unexpected semantics");
            }
            record(i, j, verdict(region.won(i, j)), verdict(expected));
        }
    return report;
}

}  // namespace gce
