#pragma once

#include "gce/rational.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace gce {

struct TransportProblem {
    std::vector<Rational> supply;  // each positive, summing to 1
    std::vector<Rational> demand;  // each positive, summing to 1
    std::vector<Rational> cost;    // supply.size() x demand.size(), entries in [0,1]
};

struct TransportPlan {
    Rational value;
    std::vector<Rational> coupling;  // supply.size() x demand.size()
    std::vector<Rational> row_potential;
    std::vector<Rational> column_potential;
};

// Exact optimal transport; the returned plan always passes verify_certificate.
TransportPlan wasserstein(const TransportProblem& problem);

// Marginals exact, potentials dual-feasible, primal value equal to dual value.
bool verify_certificate(const TransportProblem& problem, const TransportPlan& plan);

// Called after every solve; lets harnesses audit certificates independently.
using TransportObserver = std::function<void(const TransportProblem&, const TransportPlan&)>;
void set_transport_observer(TransportObserver observer);

}  // namespace gce
