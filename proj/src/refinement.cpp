#include "gce/refinement.hpp"

#include "gce/error.hpp"

#include <algorithm>
#include <bit>
#include <map>

namespace gce {

namespace {

constexpr std::size_t no_point = static_cast<std::size_t>(-1);

Rational weight_at(const Point& p, std::size_t x) {
    for (std::size_t i = 0; i < p.support.size(); ++i)
        if (p.support[i] == x) return p.weights[i];
    return Rational(0);
}

std::optional<Rational> mixing_weight(const Point& whole, const Point& left, const Point& right) {
    std::vector<std::size_t> atoms = whole.support;
    atoms.insert(atoms.end(), left.support.begin(), left.support.end());
    atoms.insert(atoms.end(), right.support.begin(), right.support.end());
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    std::optional<Rational> weight;
    for (auto x : atoms) {
        const Rational l = weight_at(left, x), r = weight_at(right, x);
        if (l != r) {
            weight = (weight_at(whole, x) - r) / (l - r);
            break;
        }
    }
    if (!weight || *weight <= 0 || *weight >= 1) return std::nullopt;
    for (auto x : atoms)
        if (weight_at(whole, x) != *weight * weight_at(left, x) + (1 - *weight) * weight_at(right, x))
            return std::nullopt;
    return weight;
}

}  // namespace

AlgebraDescriptor AlgebraDescriptor::plain(CarrierPtr carrier, Fibre fibre) {
    return AlgebraDescriptor(AlgebraKind::Plain, std::move(carrier), fibre);
}

AlgebraDescriptor AlgebraDescriptor::unions(CarrierPtr carrier, Fibre fibre,
                                            const std::vector<std::vector<std::size_t>>& sets) {
    require(!is_metric(fibre), Errc::mismatch, "union algebra needs a relational fibre");
    require(sets.size() == carrier->size(), Errc::mismatch, "one set per carrier point required");
    AlgebraDescriptor alg(AlgebraKind::Union, std::move(carrier), fibre);
    std::map<std::vector<std::size_t>, std::size_t> index;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        require(std::is_sorted(sets[i].begin(), sets[i].end()), Errc::invalid_argument, "point sets must be sorted");
        index.emplace(sets[i], i);
        if (sets[i].empty()) alg.empty_ = i;
    }
    const std::size_t n = sets.size();
    alg.union_table_.assign(n * n, no_point);
    std::vector<std::size_t> merged;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            merged.clear();
            std::set_union(sets[a].begin(), sets[a].end(), sets[b].begin(), sets[b].end(), std::back_inserter(merged));
            auto it = index.find(merged);
            if (it != index.end()) alg.union_table_[a * n + b] = it->second;
        }
    return alg;
}

AlgebraDescriptor AlgebraDescriptor::convex(CarrierPtr carrier, Fibre fibre, const std::vector<Point>& distributions,
                                            std::size_t decomposition_cap) {
    require(is_metric(fibre), Errc::mismatch, "convex algebra needs a metric fibre");
    require(distributions.size() == carrier->size(), Errc::mismatch, "one distribution per carrier point required");
    AlgebraDescriptor alg(AlgebraKind::Convex, std::move(carrier), fibre);
    const std::size_t n = distributions.size();
    if (n > decomposition_cap) {
        alg.truncated_ = true;
        return alg;
    }
    for (std::size_t w = 0; w < n; ++w)
        for (std::size_t l = 0; l < n; ++l)
            for (std::size_t r = 0; r < n; ++r) {
                if (l == r || w == l || w == r) continue;
                if (auto p = mixing_weight(distributions[w], distributions[l], distributions[r]))
                    alg.decompositions_.push_back({w, l, r, *p});
            }
    return alg;
}

AlgebraDescriptor AlgebraDescriptor::of(const DetSystem& det) {
    switch (det.semantics) {
        case Semantics::TraceInc:
        case Semantics::BTopNFA: {
            std::vector<std::vector<std::size_t>> sets;
            for (const auto& p : det.points) sets.push_back(p.support);
            return unions(det.carrier, det.fibre(), sets);
        }
        case Semantics::PTrace: return convex(det.carrier, det.fibre(), det.points);
        default: return plain(det.carrier, det.fibre());
    }
}

std::optional<std::size_t> AlgebraDescriptor::union_of(std::size_t a, std::size_t b) const {
    if (kind_ != AlgebraKind::Union) return std::nullopt;
    const std::size_t u = union_table_.at(a * size() + b);
    if (u == no_point) return std::nullopt;
    return u;
}

namespace {

Conformance close_union(const AlgebraDescriptor& alg, const Conformance& q, const CloseOptions& options) {
    const std::size_t n = alg.size();
    std::vector<char> rel = q.relation();
    auto set = [&](std::size_t a, std::size_t b) {
        char& slot = rel[a * n + b];
        if (slot) return false;
        slot = 1;
        return true;
    };
    if (auto e = alg.empty_point())
        for (std::size_t b = 0; b < n; ++b) set(*e, b);
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
            if (auto u = alg.union_of(b, c)) set(b, *u);
    for (std::size_t iteration = 0;; ++iteration) {
        require(iteration < options.iteration_cap, Errc::cap_exceeded, "refinement closure exceeded its iteration cap");
        close_relation(rel, n, alg.fibre() == Fibre::Equivalence);
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (a != b && rel[a * n + b]) pairs.emplace_back(a, b);
        bool changed = false;
        for (const auto& [a, b] : pairs)
            for (const auto& [c, d] : pairs) {
                auto left = alg.union_of(a, c);
                auto right = alg.union_of(b, d);
                if (left && right) changed = set(*left, *right) || changed;
            }
        // Pairs with a reflexive component: A <= B gives A u C <= B u C.
        for (const auto& [a, b] : pairs)
            for (std::size_t c = 0; c < n; ++c) {
                auto left = alg.union_of(a, c);
                auto right = alg.union_of(b, c);
                if (left && right) changed = set(*left, *right) || changed;
            }
        if (!changed) break;
    }
    return Conformance::from_relation(alg.carrier(), alg.fibre(), std::move(rel));
}

// target <= sum of coefficient * variable, over off-diagonal distance slots.
struct LinearBound {
    std::size_t target;
    std::vector<std::pair<std::size_t, Rational>> terms;
};

std::vector<LinearBound> convex_bounds(const AlgebraDescriptor& alg, bool symmetric) {
    const std::size_t n = alg.size();
    std::vector<LinearBound> out;
    auto slot = [n](std::size_t a, std::size_t b) { return a * n + b; };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (symmetric) out.push_back({slot(i, j), {{slot(j, i), Rational(1)}}});
            for (std::size_t k = 0; k < n; ++k)
                if (k != i && k != j) out.push_back({slot(i, k), {{slot(i, j), Rational(1)}, {slot(j, k), Rational(1)}}});
        }
    // Each point also decomposes trivially at any weight.
    std::map<Rational, std::vector<ConvexDecomposition>> by_weight;
    for (const auto& d : alg.decompositions()) {
        by_weight[d.weight].push_back(d);
        by_weight[1 - d.weight].push_back({d.whole, d.right, d.left, 1 - d.weight});
    }
    for (auto& [w, list] : by_weight)
        for (std::size_t x = 0; x < n; ++x) list.push_back({x, x, x, w});
    for (const auto& [w, list] : by_weight)
        for (const auto& mu : list)
            for (const auto& nu : list) {
                if ((mu.left == mu.right && nu.left == nu.right) || mu.whole == nu.whole) continue;
                LinearBound b{slot(mu.whole, nu.whole), {}};
                if (mu.left != nu.left) b.terms.push_back({slot(mu.left, nu.left), w});
                if (mu.right != nu.right) b.terms.push_back({slot(mu.right, nu.right), 1 - w});
                out.push_back(std::move(b));
            }
    return out;
}

// One relaxation pass; true when some distance decreased.
bool relax(const std::vector<LinearBound>& bounds, std::vector<Rational>& dist) {
    bool changed = false;
    Rational rhs;
    for (const auto& b : bounds) {
        rhs = 0;
        for (const auto& [v, c] : b.terms) rhs += c * dist[v];
        if (rhs < dist[b.target]) {
            dist[b.target] = rhs;
            changed = true;
        }
    }
    return changed;
}

// Maximizes the sum of the variables subject to rows * x <= rhs, x >= 0, with rhs >= 0, by the
// simplex method over exact rationals (Bland's rule).
std::vector<Rational> maximize_sum(std::vector<std::vector<Rational>> rows, std::vector<Rational> rhs,
                                   std::size_t vars) {
    const std::size_t m = rows.size();
    std::vector<Rational> cost(vars, Rational(1));
    // Labels: 0..vars-1 are variables, vars.. are slacks.
    std::vector<std::size_t> nonbasic(vars), basic(m);
    for (std::size_t j = 0; j < vars; ++j) nonbasic[j] = j;
    for (std::size_t i = 0; i < m; ++i) basic[i] = vars + i;
    for (;;) {
        std::size_t enter = vars;
        for (std::size_t j = 0; j < vars; ++j)
            if (cost[j] > 0 && (enter == vars || nonbasic[j] < nonbasic[enter])) enter = j;
        if (enter == vars) break;
        std::size_t leave = m;
        Rational best, ratio;
        for (std::size_t i = 0; i < m; ++i) {
            if (rows[i][enter] <= 0) continue;
            ratio = rhs[i] / rows[i][enter];
            if (leave == m || ratio < best || (ratio == best && basic[i] < basic[leave])) {
                leave = i;
                best = ratio;
            }
        }
        require(leave != m, Errc::internal, "refinement program is unbounded");
        const Rational pivot = rows[leave][enter];
        auto& pr = rows[leave];
        for (std::size_t j = 0; j < vars; ++j)
            if (j != enter) pr[j] /= pivot;
        rhs[leave] /= pivot;
        pr[enter] = 1 / pivot;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave || rows[i][enter] == 0) continue;
            const Rational factor = rows[i][enter];
            auto& row = rows[i];
            for (std::size_t j = 0; j < vars; ++j)
                if (j != enter && pr[j] != 0) row[j] -= factor * pr[j];
            rhs[i] -= factor * rhs[leave];
            row[enter] = -factor / pivot;
        }
        const Rational gain = cost[enter];
        for (std::size_t j = 0; j < vars; ++j)
            if (j != enter && pr[j] != 0) cost[j] -= gain * pr[j];
        cost[enter] = -gain / pivot;
        std::swap(basic[leave], nonbasic[enter]);
    }
    std::vector<Rational> x(vars, Rational(0));
    for (std::size_t i = 0; i < m; ++i)
        if (basic[i] < vars) x[basic[i]] = rhs[i];
    return x;
}

Rational bound_value(const LinearBound& b, const std::vector<Rational>& dist) {
    Rational sum = 0;
    for (const auto& [v, c] : b.terms) sum += c * dist[v];
    return sum;
}

constexpr std::size_t seed_bounds = 2;
constexpr std::size_t generation_rounds = 32;

// Exact limit of a descending relaxation. Settled slots keep their values and the moving ones are
// maximized under a growing subset of the bounds on them, which keeps them above the limit; once the
// result satisfies every bound it is feasible as well, hence the limit itself.
std::optional<std::vector<Rational>> accelerate(const std::vector<LinearBound>& bounds,
                                                const std::vector<std::vector<std::size_t>>& by_target,
                                                const std::vector<Rational>& q, const std::vector<Rational>& dist,
                                                const std::vector<char>& moving, std::size_t n, bool symmetric,
                                                std::size_t program_cap) {
    auto rep = [&](std::size_t v) { return symmetric ? std::min(v, (v % n) * n + v / n) : v; };
    std::vector<std::size_t> slots, column(dist.size(), no_point);
    for (std::size_t v = 0; v < dist.size(); ++v)
        if (moving[v] && rep(v) == v) {
            column[v] = slots.size();
            slots.push_back(v);
        }
    const std::size_t k = slots.size();
    require(k <= program_cap, Errc::cap_exceeded,
            "refinement closure needs a linear program over " + std::to_string(k) + " distances, above its cap");
    std::vector<std::vector<Rational>> rows;
    std::vector<Rational> rhs;
    std::vector<char> used(bounds.size(), 0);
    auto add = [&](std::size_t b) {
        used[b] = 1;
        std::vector<Rational> row(k, Rational(0));
        Rational settled = 0;
        row[column[rep(bounds[b].target)]] += 1;
        for (const auto& [v, c] : bounds[b].terms) {
            if (moving[v]) row[column[rep(v)]] -= c;
            else settled += c * dist[v];
        }
        if (std::none_of(row.begin(), row.end(), [](const Rational& r) { return r > 0; })) return;
        rows.push_back(std::move(row));
        rhs.push_back(std::move(settled));
    };
    for (std::size_t r = 0; r < k; ++r) {
        std::vector<Rational> row(k, Rational(0));
        row[r] = 1;
        rows.push_back(std::move(row));
        rhs.push_back(q[slots[r]]);
    }
    for (std::size_t t : slots) {
        std::vector<std::pair<Rational, std::size_t>> ranked;
        for (std::size_t b : by_target[t]) ranked.emplace_back(bound_value(bounds[b], dist), b);
        const auto seeds = std::min(seed_bounds, ranked.size());
        std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(seeds), ranked.end());
        for (std::size_t r = 0; r < seeds; ++r) add(ranked[r].second);
    }
    for (std::size_t round = 0; round < generation_rounds; ++round) {
        const auto x = maximize_sum(rows, rhs, k);
        std::vector<Rational> candidate = dist;
        for (std::size_t v = 0; v < dist.size(); ++v)
            if (moving[v]) candidate[v] = x[column[rep(v)]];
        bool violated = false;
        for (std::size_t t = 0; t < dist.size(); ++t)
            for (std::size_t b : by_target[t])
                if (moving[t] && !used[b] && bound_value(bounds[b], candidate) < candidate[bounds[b].target]) {
                    add(b);
                    violated = true;
                }
        if (violated) continue;
        if (relax(bounds, candidate)) return std::nullopt;
        return candidate;
    }
    return std::nullopt;
}

constexpr std::size_t relaxation_rounds = 8;

Conformance close_convex(const AlgebraDescriptor& alg, const Conformance& q, const CloseOptions& options) {
    const std::size_t n = alg.size();
    const bool symmetric = alg.fibre() == Fibre::PseudoMetric;
    const auto bounds = convex_bounds(alg, symmetric);
    std::vector<std::vector<std::size_t>> by_target(n * n);
    for (std::size_t b = 0; b < bounds.size(); ++b) by_target[bounds[b].target].push_back(b);
    std::vector<Rational> dist = q.distances();
    for (std::size_t iteration = 0;; ++iteration) {
        require(iteration < options.iteration_cap, Errc::cap_exceeded, "refinement closure exceeded its iteration cap");
        const bool last_of_batch = iteration + 1 >= relaxation_rounds && std::has_single_bit(iteration + 1);
        std::vector<Rational> before;
        if (last_of_batch) before = dist;
        if (!relax(bounds, dist)) break;
        if (!last_of_batch) continue;
        // Halving descents converge only in the limit, so the limit is computed directly.
        std::vector<char> moving(dist.size(), 0);
        for (std::size_t v = 0; v < dist.size(); ++v) moving[v] = dist[v] != before[v];
        if (auto limit = accelerate(bounds, by_target, q.distances(), dist, moving, n, symmetric, options.program_cap)) {
            dist = std::move(*limit);
            break;
        }
    }
    return Conformance::from_distances(alg.carrier(), alg.fibre(), std::move(dist));
}

}  // namespace

Conformance close(const AlgebraDescriptor& alg, const Conformance& q, const CloseOptions& options) {
    require(q.fibre() == alg.fibre() && *q.carrier() == *alg.carrier(), Errc::mismatch,
            "conformance does not live on the algebra's carrier");
    switch (alg.kind()) {
        case AlgebraKind::Union: return close_union(alg, q, options);
        case AlgebraKind::Convex: return close_convex(alg, q, options);
        case AlgebraKind::Plain:
            if (q.metric()) return Conformance::from_distances(q.carrier(), q.fibre(), q.distances());
            return Conformance::from_relation(q.carrier(), q.fibre(), q.relation());
    }
    fail(Errc::internal, "unreachable");
}

bool is_refinement(const AlgebraDescriptor& alg, const Conformance& p) { return close(alg, p) == p; }

}  // namespace gce
