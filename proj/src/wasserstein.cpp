#include "gce/wasserstein.hpp"

#include "gce/error.hpp"

#include <mutex>
#include <optional>

namespace gce {

namespace {

std::mutex observer_mutex;
TransportObserver observer;

void validate(const TransportProblem& p) {
    require(!p.supply.empty() && !p.demand.empty(), Errc::invalid_argument, "transport: empty marginal");
    require(p.cost.size() == p.supply.size() * p.demand.size(), Errc::invalid_argument, "transport: cost shape");
    Rational s = 0, d = 0;
    for (const auto& v : p.supply) {
        require(v > 0, Errc::invalid_argument, "transport: non-positive supply");
        s += v;
    }
    for (const auto& v : p.demand) {
        require(v > 0, Errc::invalid_argument, "transport: non-positive demand");
        d += v;
    }
    require(s == 1 && d == 1, Errc::invalid_argument, "transport: masses must sum to 1");
}

// Shortest distances over the residual graph from a virtual root joined to every node by 0-cost edges.
std::vector<Rational> residual_potentials(const TransportProblem& p, const std::vector<Rational>& flow) {
    const std::size_t m = p.supply.size(), n = p.demand.size();
    std::vector<Rational> dist(m + n, Rational(0));
    for (std::size_t round = 0; round <= m + n; ++round) {
        bool changed = false;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const Rational& c = p.cost[i * n + j];
                if (dist[i] + c < dist[m + j]) {
                    dist[m + j] = dist[i] + c;
                    changed = true;
                }
                if (flow[i * n + j] > 0 && dist[m + j] - c < dist[i]) {
                    dist[i] = dist[m + j] - c;
                    changed = true;
                }
            }
        if (!changed) return dist;
    }
    fail(Errc::internal, "transport: negative cycle in the residual graph");
}

}  // namespace

TransportPlan wasserstein(const TransportProblem& p) {
    validate(p);
    const std::size_t m = p.supply.size(), n = p.demand.size();
    std::vector<Rational> flow(m * n, Rational(0));
    std::vector<Rational> supply_left = p.supply, demand_left = p.demand;

    // Successive shortest augmenting paths; nodes 0..m-1 are rows, m..m+n-1 columns.
    const std::size_t nodes = m + n;
    for (std::size_t iteration = 0;; ++iteration) {
        require(iteration < 100000, Errc::internal, "transport: augmentation did not terminate");
        std::vector<std::optional<Rational>> dist(nodes);
        std::vector<std::size_t> parent(nodes, nodes);
        bool any_supply = false;
        for (std::size_t i = 0; i < m; ++i)
            if (supply_left[i] > 0) {
                dist[i] = Rational(0);
                any_supply = true;
            }
        if (!any_supply) break;
        for (std::size_t round = 0; round <= nodes; ++round) {
            bool changed = false;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    const Rational& c = p.cost[i * n + j];
                    if (dist[i] && (!dist[m + j] || *dist[i] + c < *dist[m + j])) {
                        dist[m + j] = *dist[i] + c;
                        parent[m + j] = i;
                        changed = true;
                    }
                    if (flow[i * n + j] > 0 && dist[m + j] && (!dist[i] || *dist[m + j] - c < *dist[i])) {
                        dist[i] = *dist[m + j] - c;
                        parent[i] = m + j;
                        changed = true;
                    }
                }
            if (!changed) break;
            require(round < nodes, Errc::internal, "transport: negative cycle during augmentation");
        }
        std::size_t target = nodes;
        for (std::size_t j = 0; j < n; ++j)
            if (demand_left[j] > 0 && dist[m + j] && (target == nodes || *dist[m + j] < *dist[target])) target = m + j;
        require(target != nodes, Errc::internal, "transport: no augmenting path");

        Rational amount = demand_left[target - m];
        std::size_t v = target;
        while (parent[v] != nodes) {
            const std::size_t u = parent[v];
            if (u >= m) amount = min_of(amount, flow[v * n + (u - m)]);
            v = u;
        }
        amount = min_of(amount, supply_left[v]);
        supply_left[v] -= amount;
        demand_left[target - m] -= amount;
        v = target;
        while (parent[v] != nodes) {
            const std::size_t u = parent[v];
            if (u < m)
                flow[u * n + (v - m)] += amount;
            else
                flow[v * n + (u - m)] -= amount;
            v = u;
        }
    }

    TransportPlan plan;
    plan.coupling = flow;
    for (std::size_t k = 0; k < m * n; ++k) plan.value += flow[k] * p.cost[k];
    const auto dist = residual_potentials(p, flow);
    for (std::size_t i = 0; i < m; ++i) plan.row_potential.push_back(-dist[i]);
    for (std::size_t j = 0; j < n; ++j) plan.column_potential.push_back(dist[m + j]);
    require(verify_certificate(p, plan), Errc::internal, "transport: optimality certificate failed");

    std::lock_guard lock(observer_mutex);
    if (observer) observer(p, plan);
    return plan;
}

bool verify_certificate(const TransportProblem& p, const TransportPlan& plan) {
    const std::size_t m = p.supply.size(), n = p.demand.size();
    if (plan.coupling.size() != m * n || plan.row_potential.size() != m || plan.column_potential.size() != n)
        return false;
    Rational primal = 0, dual = 0;
    for (std::size_t i = 0; i < m; ++i) {
        Rational row = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const Rational& f = plan.coupling[i * n + j];
            if (f < 0) return false;
            row += f;
            primal += f * p.cost[i * n + j];
            if (plan.row_potential[i] + plan.column_potential[j] > p.cost[i * n + j]) return false;
        }
        if (row != p.supply[i]) return false;
        dual += p.supply[i] * plan.row_potential[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
        Rational col = 0;
        for (std::size_t i = 0; i < m; ++i) col += plan.coupling[i * n + j];
        if (col != p.demand[j]) return false;
        dual += p.demand[j] * plan.column_potential[j];
    }
    return primal == dual && primal == plan.value;
}

void set_transport_observer(TransportObserver obs) {
    std::lock_guard lock(observer_mutex);
    observer = std::move(obs);
}

}  // namespace gce
