#pragma once

#include "gce/conformance.hpp"
#include "gce/model.hpp"
#include "gce/rational.hpp"
#include "gce/wasserstein.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gce {

enum class Semantics { TraceInc, PTrace, Bisim, BTopDFA, BTopNFA, QSim, QRSim };

struct InstanceInfo {
    Semantics semantics;
    std::string name;
    ModelKind model;
    Fibre fibre;
    bool quantitative;
};

const InstanceInfo& instance_info(Semantics s);
Semantics parse_semantics(const std::string& name);
const std::vector<Semantics>& all_semantics();

// A determinized carrier point: a set of states, or a distribution (PTrace).
struct Point {
    std::vector<std::size_t> support;  // sorted
    std::vector<Rational> weights;     // PTrace only, parallel to support

    static Point state(std::size_t x) { return Point{{x}, {}}; }
    static Point dirac(std::size_t x) { return Point{{x}, {Rational(1)}}; }
    friend bool operator==(const Point& a, const Point& b) { return a.support == b.support && a.weights == b.weights; }
    friend bool operator<(const Point& a, const Point& b);
};

struct MassEntry {
    std::size_t label;
    Rational mass;
    std::size_t point;
};

struct OneStep {
    bool accepting = false;                  // BTopDFA, BTopNFA
    std::vector<std::size_t> by_label;       // TraceInc, BTopDFA, BTopNFA: successor point per label
    std::vector<LabelledSuccessor> moves;    // Bisim, QSim, QRSim: sorted (label, point)
    std::vector<std::size_t> ready;          // QRSim: sorted enabled labels
    std::vector<MassEntry> masses;           // PTrace: one entry per enabled label
};

struct DetOptions {
    std::size_t powerset_cap = 10;
    std::size_t point_cap = 4096;
    // Explore only points within this many steps of the unit; frontier points get no step.
    std::optional<std::size_t> depth;
};

class DetSystem {
public:
    Semantics semantics;
    std::shared_ptr<const Model> model;
    std::vector<Point> points;
    CarrierPtr carrier;
    std::vector<std::optional<OneStep>> steps;
    std::vector<std::size_t> unit;   // state -> point
    std::vector<std::size_t> level;  // distance from the unit image
    bool complete = true;            // closed under steps and, for set instances, the full powerset
    bool union_closed = false;

    std::size_t size() const { return points.size(); }
    Fibre fibre() const { return instance_info(semantics).fibre; }
    std::optional<std::size_t> find(const Point& p) const;
    std::size_t index_of(const Point& p) const;
    const OneStep& step(std::size_t point) const;
    bool has_step(std::size_t point) const { return steps.at(point).has_value(); }
    std::string point_name(std::size_t point) const { return carrier->name(point); }

private:
    friend DetSystem predeterminize(std::shared_ptr<const Model>, Semantics, const DetOptions&);
    std::map<Point, std::size_t> index_;
};

DetSystem predeterminize(std::shared_ptr<const Model> model, Semantics semantics, const DetOptions& options = {});

std::string format_point(const Model& m, Semantics s, const Point& p);

// Depth-n behaviours.
using Word = std::vector<std::size_t>;

struct Tree;
using TreePtr = std::shared_ptr<const Tree>;
struct Tree {
    std::vector<std::pair<std::size_t, TreePtr>> children;  // canonical: sorted, deduplicated
};
int compare_trees(const TreePtr& a, const TreePtr& b);

struct Behaviour {
    Semantics semantics;
    std::size_t depth = 0;
    std::set<Word> words;                    // TraceInc: traces; BTop: accepted words shorter than depth
    std::map<Word, Rational> distribution;   // PTrace
    TreePtr tree;                            // Bisim, QSim, QRSim
};

struct Verdict {
    bool holds;         // boolean instances; for quantitative ones: distance == 0
    Rational distance;  // quantitative instances; 0/1 for boolean ones
};

void check_compatible(const Model& m, Semantics s);
Behaviour gamma_n(const Model& m, Semantics s, std::size_t x, std::size_t n);
Verdict behaviour_compare(const Model& m, const Behaviour& lhs, const Behaviour& rhs);
Behaviour kleisli_star_apply(const DetSystem& det, std::size_t point, std::size_t n);

// One-step comparison over a ground conformance on det's points.
Verdict lift_compare(const DetSystem& det, const OneStep& lhs, const OneStep& rhs, const Conformance& ground);

// The transport problem solved by the PTrace lifting (exposed for diagnostics).
TransportProblem ptrace_transport(const OneStep& lhs, const OneStep& rhs, const Conformance& ground);

}  // namespace gce
