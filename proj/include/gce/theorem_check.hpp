#pragma once

#include "gce/graded.hpp"
#include "gce/model.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gce {

struct Discrepancy {
    std::string lhs;
    std::string rhs;
    std::string game;
    std::string oracle;
};

struct TheoremReport {
    Semantics semantics;
    std::optional<std::size_t> rounds;
    std::size_t positions = 0;
    std::vector<Discrepancy> discrepancies;
};

// Solves the game on every position of the determinized carrier and compares each verdict
// (or value) with the brute-force semantics of the same pair of points.
TheoremReport theorem_check(std::shared_ptr<const Model> model, Semantics semantics, std::optional<std::size_t> rounds,
                            const DetOptions& options = {});

}  // namespace gce
