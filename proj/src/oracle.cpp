#include "gce/oracle.hpp"

#include "gce/error.hpp"

#include <algorithm>
#include <deque>

namespace gce::oracle {

namespace {

StateSet image(const Model& m, const StateSet& s, std::size_t label) {
    std::set<std::size_t> out;
    for (auto x : s)
        for (const auto& t : m.successors(x))
            if (t.label == label) out.insert(t.to);
    return {out.begin(), out.end()};
}

bool any_accepting(const Model& m, const StateSet& s) {
    return std::any_of(s.begin(), s.end(), [&](std::size_t x) { return m.is_accepting(x); });
}

void walk(const Model& m, std::size_t x, std::size_t n, Word& prefix, std::set<Word>& out) {
    if (prefix.size() == n) {
        out.insert(prefix);
        return;
    }
    for (const auto& t : m.successors(x)) {
        prefix.push_back(t.label);
        walk(m, t.to, n, prefix, out);
        prefix.pop_back();
    }
}

std::vector<std::size_t> ready_set(const Model& m, std::size_t x) {
    std::set<std::size_t> labels;
    for (const auto& t : m.successors(x)) labels.insert(t.label);
    return {labels.begin(), labels.end()};
}

}  // namespace

std::set<Word> traces_n(const Model& m, const StateSet& s, std::size_t n) {
    std::set<Word> out;
    Word prefix;
    for (auto x : s) walk(m, x, n, prefix, out);
    return out;
}

std::set<Word> accepted_shorter_than(const Model& m, const StateSet& s, std::size_t n) {
    std::set<Word> out;
    std::vector<std::pair<Word, StateSet>> frontier{{Word{}, s}};
    for (std::size_t len = 0; len < n; ++len) {
        std::vector<std::pair<Word, StateSet>> next;
        for (const auto& [w, states] : frontier) {
            if (any_accepting(m, states)) out.insert(w);
            for (std::size_t a = 0; a < m.label_count(); ++a) {
                StateSet succ = image(m, states, a);
                if (succ.empty()) continue;
                Word longer = w;
                longer.push_back(a);
                next.emplace_back(std::move(longer), std::move(succ));
            }
        }
        frontier = std::move(next);
    }
    return out;
}

bool language_inclusion(const Model& m, const StateSet& s, const StateSet& t) {
    const bool automaton = m.kind == ModelKind::NFA || m.kind == ModelKind::DFA;
    std::set<std::pair<StateSet, StateSet>> seen{{s, t}};
    std::deque<std::pair<StateSet, StateSet>> queue{{s, t}};
    while (!queue.empty()) {
        auto [lhs, rhs] = queue.front();
        queue.pop_front();
        if (lhs.empty()) continue;
        if (automaton ? any_accepting(m, lhs) && !any_accepting(m, rhs) : rhs.empty()) return false;
        for (std::size_t a = 0; a < m.label_count(); ++a) {
            std::pair<StateSet, StateSet> next{image(m, lhs, a), image(m, rhs, a)};
            if (seen.insert(next).second) queue.push_back(std::move(next));
        }
    }
    return true;
}

WordDistribution trace_distribution(const Model& m, const std::vector<std::pair<std::size_t, Rational>>& start,
                                    std::size_t n) {
    std::map<std::pair<Word, std::size_t>, Rational> current;
    for (const auto& [x, p] : start) current[{Word{}, x}] += p;
    for (std::size_t k = 0; k < n; ++k) {
        std::map<std::pair<Word, std::size_t>, Rational> next;
        for (const auto& [key, p] : current)
            for (const auto& t : m.distribution(key.second)) {
                Word w = key.first;
                w.push_back(t.label);
                next[{std::move(w), t.to}] += p * t.prob;
            }
        current = std::move(next);
    }
    WordDistribution out;
    for (const auto& [key, p] : current) out[key.first] += p;
    return out;
}

Rational total_variation(const WordDistribution& a, const WordDistribution& b) {
    if (!a.empty() && !b.empty())
        require(a.begin()->first.size() == b.begin()->first.size(), Errc::invalid_argument,
                "distributions over words of different lengths");
    Rational sum = 0;
    for (const auto& [w, p] : a) {
        auto it = b.find(w);
        sum += abs(p - (it == b.end() ? Rational(0) : it->second));
    }
    for (const auto& [w, q] : b)
        if (!a.count(w)) sum += q;
    return sum / 2;
}

std::vector<std::size_t> bisimilarity(const Model& m, std::optional<std::size_t> rounds) {
    const std::size_t n = m.state_count();
    std::vector<std::size_t> block(n, 0);
    for (std::size_t round = 0; !rounds || round < *rounds; ++round) {
        using Signature = std::pair<std::size_t, std::set<std::pair<std::size_t, std::size_t>>>;
        std::map<Signature, std::size_t> numbering;
        std::vector<std::size_t> next(n);
        for (std::size_t x = 0; x < n; ++x) {
            Signature sig{block[x], {}};
            for (const auto& t : m.successors(x)) sig.second.emplace(t.label, block[t.to]);
            next[x] = numbering.emplace(std::move(sig), numbering.size()).first->second;
        }
        const bool stable = numbering.size() == std::set<std::size_t>(block.begin(), block.end()).size();
        block = std::move(next);
        if (stable) break;
    }
    // Renumber by least member so equal partitions compare equal.
    std::map<std::size_t, std::size_t> canonical;
    for (auto& b : block) b = canonical.emplace(b, canonical.size()).first->second;
    return block;
}

std::vector<Rational> simulation_values(const Model& m, bool ready, std::optional<std::size_t> depth) {
    const std::size_t n = m.state_count();
    std::vector<Rational> v(n * n, Rational(0));
    for (std::size_t k = 0; !depth || k < *depth; ++k) {
        std::vector<Rational> next(n * n, Rational(0));
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y) {
                Rational sup = 0;
                for (const auto& s : m.successors(x)) {
                    Rational inf = 1;
                    for (const auto& t : m.successors(y)) {
                        Rational step = m.label_distance(s.label, t.label);
                        if (v[s.to * n + t.to] > step) step = v[s.to * n + t.to];
                        if (step < inf) inf = step;
                    }
                    if (inf > sup) sup = inf;
                }
                if (ready) {
                    const auto rx = ready_set(m, x), ry = ready_set(m, y);
                    Rational h = 0;
                    if (rx.empty() != ry.empty()) h = 1;
                    for (auto a : rx) {
                        Rational inf = 1;
                        for (auto b : ry)
                            if (m.label_distance(a, b) < inf) inf = m.label_distance(a, b);
                        if (inf > h) h = inf;
                    }
                    for (auto b : ry) {
                        Rational inf = 1;
                        for (auto a : rx)
                            if (m.label_distance(a, b) < inf) inf = m.label_distance(a, b);
                        if (inf > h) h = inf;
                    }
                    if (h > sup) sup = h;
                }
                next[x * n + y] = sup;
            }
        const bool stable = next == v;
        v = std::move(next);
        if (stable && !depth) break;
    }
    return v;
}

std::vector<char> simulation_preorder(const Model& m, bool ready) {
    const std::size_t n = m.state_count();
    std::vector<char> rel(n * n, 1);
    if (ready)
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y)
                if (ready_set(m, x) != ready_set(m, y)) rel[x * n + y] = 0;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y) {
                if (!rel[x * n + y]) continue;
                for (const auto& s : m.successors(x)) {
                    bool answered = false;
                    for (const auto& t : m.successors(y))
                        answered = answered || (t.label == s.label && rel[s.to * n + t.to]);
                    if (!answered) {
                        rel[x * n + y] = 0;
                        changed = true;
                        break;
                    }
                }
            }
    }
    return rel;
}

}  // namespace gce::oracle
