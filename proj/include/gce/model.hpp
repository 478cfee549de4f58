#pragma once

#include "gce/conformance.hpp"
#include "gce/rational.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gce {

enum class ModelKind { LTS, LMC, MetricLTS, NFA, DFA };

std::string model_kind_name(ModelKind k);

struct Transition {
    std::size_t from;
    std::size_t label;
    std::size_t to;
    Rational prob;  // LMC only; 0 elsewhere

    friend bool operator==(const Transition& a, const Transition& b) {
        return a.from == b.from && a.label == b.label && a.to == b.to && a.prob == b.prob;
    }
};

// Finitely supported distribution over state indices; support sorted, weights positive.
struct Distribution {
    std::vector<std::pair<std::size_t, Rational>> weights;

    static Distribution dirac(std::size_t x) { return Distribution{{{x, Rational(1)}}}; }
    Rational at(std::size_t x) const;
    friend bool operator==(const Distribution& a, const Distribution& b) { return a.weights == b.weights; }
    friend bool operator<(const Distribution& a, const Distribution& b);
};

// Sorts, merges duplicates, drops zero weights.
Distribution normalize(std::vector<std::pair<std::size_t, Rational>> weights);

struct LabelledSuccessor {
    std::size_t label;
    std::size_t to;
    friend auto operator<=>(const LabelledSuccessor&, const LabelledSuccessor&) = default;
};

struct WeightedSuccessor {
    std::size_t label;
    std::size_t to;
    Rational prob;
};

class Model {
public:
    ModelKind kind = ModelKind::LTS;
    CarrierPtr states;
    std::vector<std::string> labels;
    std::vector<Transition> transitions;  // sorted by (from, label, to)
    std::vector<char> accepting;          // NFA, DFA
    std::vector<std::size_t> next;        // DFA: state * |labels| + label
    std::vector<Rational> label_metric;   // MetricLTS: |labels| x |labels|
    bool label_metric_symmetric = false;

    std::size_t state_count() const { return states->size(); }
    std::size_t label_count() const { return labels.size(); }
    std::size_t state_index(const std::string& name) const;
    std::size_t label_index(const std::string& name) const;
    const Rational& label_distance(std::size_t a, std::size_t b) const {
        return label_metric[a * labels.size() + b];
    }

    // LTS, MetricLTS, NFA: sorted (label, target) pairs. DFA: one per label.
    std::vector<LabelledSuccessor> successors(std::size_t x) const;
    // LMC: the one-step distribution over (label, target).
    std::vector<WeightedSuccessor> distribution(std::size_t x) const;
    bool is_accepting(std::size_t x) const { return !accepting.empty() && accepting[x] != 0; }

    friend bool operator==(const Model& a, const Model& b);
};

// Parses and validates a system document; throws Error(Errc::validation) naming the offending item.
Model parse_model(std::string_view text);
// Canonical document; parse_model(print_model(m)) == m.
std::string print_model(const Model& m);
// Validates an in-memory model (used by generators and the parser).
void validate_model(const Model& m);

}  // namespace gce
