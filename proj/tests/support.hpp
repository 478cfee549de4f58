#pragma once

#include "gce/error.hpp"
#include "gce/graded.hpp"
#include "gce/model.hpp"
#include "gce/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace gce::testing {

using Rng = std::mt19937_64;

inline std::shared_ptr<const Model> shared(Model m) { return std::make_shared<const Model>(std::move(m)); }

inline std::shared_ptr<const DetSystem> det_of(std::shared_ptr<const Model> m, Semantics s, DetOptions o = {}) {
    return std::make_shared<const DetSystem>(predeterminize(std::move(m), s, o));
}

inline const char* fig1_nfa_text() {
    return R"({
  "kind": "nfa",
  "states": ["x1", "x2", "x3"],
  "labels": ["a"],
  "accepting": ["x1"],
  "transitions": [
    {"from": "x1", "label": "a", "to": "x1"},
    {"from": "x1", "label": "a", "to": "x2"},
    {"from": "x1", "label": "a", "to": "x3"},
    {"from": "x2", "label": "a", "to": "x1"},
    {"from": "x3", "label": "a", "to": "x3"}
  ]
})";
}

inline const char* fig1_lts_text() {
    return R"({
  "kind": "lts",
  "states": ["x1", "x2", "x3"],
  "labels": ["a"],
  "transitions": [
    {"from": "x1", "label": "a", "to": "x1"},
    {"from": "x1", "label": "a", "to": "x2"},
    {"from": "x1", "label": "a", "to": "x3"},
    {"from": "x2", "label": "a", "to": "x1"},
    {"from": "x3", "label": "a", "to": "x3"}
  ]
})";
}

inline std::shared_ptr<const Model> fig1_nfa() { return shared(parse_model(fig1_nfa_text())); }
inline std::shared_ptr<const Model> fig1_lts() { return shared(parse_model(fig1_lts_text())); }

inline std::vector<std::string> names(const std::string& prefix, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline void sort_transitions(Model& m) {
    std::sort(m.transitions.begin(), m.transitions.end(), [](const Transition& a, const Transition& b) {
        return std::tie(a.from, a.label, a.to) < std::tie(b.from, b.label, b.to);
    });
}

inline Model random_lts(Rng& rng, std::size_t max_states, std::size_t labels, double density = 0.3) {
    Model m;
    m.kind = ModelKind::LTS;
    const std::size_t n = uniform(rng, 1, max_states);
    m.states = make_carrier(names("s", n));
    m.labels = names("a", labels);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t a = 0; a < labels; ++a)
            for (std::size_t y = 0; y < n; ++y)
                if (coin(rng, density)) m.transitions.push_back({x, a, y, Rational(0)});
    sort_transitions(m);
    validate_model(m);
    return m;
}

inline Model random_nfa(Rng& rng, std::size_t max_states, std::size_t labels, double density = 0.35) {
    Model m;
    m.kind = ModelKind::NFA;
    const std::size_t n = uniform(rng, 1, max_states);
    m.states = make_carrier(names("q", n));
    m.labels = names("a", labels);
    m.accepting.assign(n, 0);
    for (std::size_t x = 0; x < n; ++x) {
        m.accepting[x] = coin(rng, 0.4);
        bool any = false;
        for (std::size_t a = 0; a < labels; ++a)
            for (std::size_t y = 0; y < n; ++y)
                if (coin(rng, density)) {
                    m.transitions.push_back({x, a, y, Rational(0)});
                    any = true;
                }
        if (!any) m.transitions.push_back({x, uniform(rng, 0, labels - 1), uniform(rng, 0, n - 1), Rational(0)});
    }
    sort_transitions(m);
    validate_model(m);
    return m;
}

inline Model random_dfa(Rng& rng, std::size_t max_states, std::size_t labels) {
    Model m;
    m.kind = ModelKind::DFA;
    const std::size_t n = uniform(rng, 1, max_states);
    m.states = make_carrier(names("q", n));
    m.labels = names("a", labels);
    m.accepting.assign(n, 0);
    for (std::size_t x = 0; x < n; ++x) {
        m.accepting[x] = coin(rng, 0.4);
        for (std::size_t a = 0; a < labels; ++a) {
            m.next.push_back(uniform(rng, 0, n - 1));
            m.transitions.push_back({x, a, m.next.back(), Rational(0)});
        }
    }
    validate_model(m);
    return m;
}

// Probabilities are multiples of 1/4 (or 1/3 when `thirds`), so determinizations stay small.
inline Model random_lmc(Rng& rng, std::size_t max_states, std::size_t labels, bool thirds = false) {
    Model m;
    m.kind = ModelKind::LMC;
    const std::size_t n = uniform(rng, 1, max_states);
    m.states = make_carrier(names("s", n));
    m.labels = names("a", labels);
    const long parts = thirds ? 3 : 4;
    for (std::size_t x = 0; x < n; ++x) {
        std::vector<long> bucket(labels * n, 0);
        for (long k = 0; k < parts; ++k) ++bucket[uniform(rng, 0, labels * n - 1)];
        for (std::size_t a = 0; a < labels; ++a)
            for (std::size_t y = 0; y < n; ++y)
                if (bucket[a * n + y] > 0) m.transitions.push_back({x, a, y, rat(bucket[a * n + y], parts)});
    }
    sort_transitions(m);
    validate_model(m);
    return m;
}

// Metric LTS; with `discrete` every pair of distinct labels is at distance 1.
inline Model random_mlts(Rng& rng, std::size_t max_states, std::size_t labels, bool discrete, double density = 0.3) {
    Model m;
    m.kind = ModelKind::MetricLTS;
    const std::size_t n = uniform(rng, 1, max_states);
    m.states = make_carrier(names("s", n));
    m.labels = names("a", labels);
    m.label_metric.assign(labels * labels, Rational(1));
    for (std::size_t a = 0; a < labels; ++a) m.label_metric[a * labels + a] = 0;
    if (!discrete) {
        for (std::size_t a = 0; a < labels; ++a)
            for (std::size_t b = 0; b < labels; ++b)
                if (a != b) m.label_metric[a * labels + b] = rat(static_cast<long>(uniform(rng, 1, 4)), 4);
        for (std::size_t k = 0; k < labels; ++k)
            for (std::size_t a = 0; a < labels; ++a)
                for (std::size_t b = 0; b < labels; ++b) {
                    Rational via = m.label_metric[a * labels + k] + m.label_metric[k * labels + b];
                    if (via < m.label_metric[a * labels + b]) m.label_metric[a * labels + b] = via;
                }
    }
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t a = 0; a < labels; ++a)
            for (std::size_t y = 0; y < n; ++y)
                if (coin(rng, density)) m.transitions.push_back({x, a, y, Rational(0)});
    sort_transitions(m);
    validate_model(m);
    return m;
}

// Index of the set point with the given state names.
inline std::size_t set_point(const DetSystem& det, std::initializer_list<const char*> states) {
    Point p;
    for (const char* s : states) p.support.push_back(det.model->state_index(s));
    std::sort(p.support.begin(), p.support.end());
    return det.index_of(p);
}

// Index of the Dirac (or state) point of the named state.
inline std::size_t state_point(const DetSystem& det, const char* state) {
    return det.unit.at(det.model->state_index(state));
}

}  // namespace gce::testing
