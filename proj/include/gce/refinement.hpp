#pragma once

#include "gce/conformance.hpp"
#include "gce/graded.hpp"
#include "gce/rational.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace gce {

enum class AlgebraKind { Plain, Union, Convex };

// whole = weight * left + (1 - weight) * right, all three carrier points.
struct ConvexDecomposition {
    std::size_t whole;
    std::size_t left;
    std::size_t right;
    Rational weight;
};

class AlgebraDescriptor {
public:
    static AlgebraDescriptor plain(CarrierPtr carrier, Fibre fibre);
    // Points are sets of atoms; the union of two points applies whenever it is itself a point.
    static AlgebraDescriptor unions(CarrierPtr carrier, Fibre fibre, const std::vector<std::vector<std::size_t>>& sets);
    // Points are distributions; decompositions are searched among the points when there are at most
    // `decomposition_cap` of them.
    static AlgebraDescriptor convex(CarrierPtr carrier, Fibre fibre, const std::vector<Point>& distributions,
                                    std::size_t decomposition_cap = 64);
    static AlgebraDescriptor of(const DetSystem& det);

    AlgebraKind kind() const noexcept { return kind_; }
    const CarrierPtr& carrier() const noexcept { return carrier_; }
    Fibre fibre() const noexcept { return fibre_; }
    std::size_t size() const { return carrier_->size(); }
    std::optional<std::size_t> empty_point() const { return empty_; }
    std::optional<std::size_t> union_of(std::size_t a, std::size_t b) const;
    const std::vector<ConvexDecomposition>& decompositions() const noexcept { return decompositions_; }
    bool decompositions_truncated() const noexcept { return truncated_; }

private:
    AlgebraDescriptor(AlgebraKind kind, CarrierPtr carrier, Fibre fibre)
        : kind_(kind), carrier_(std::move(carrier)), fibre_(fibre) {}

    AlgebraKind kind_;
    CarrierPtr carrier_;
    Fibre fibre_;
    std::optional<std::size_t> empty_;
    std::vector<std::size_t> union_table_;
    std::vector<ConvexDecomposition> decompositions_;
    bool truncated_ = false;
};

struct CloseOptions {
    std::size_t iteration_cap = 10000;
    // Distances still descending when the exact limit is computed.
    std::size_t program_cap = 96;
};

// Least refinement above q; throws Errc::cap_exceeded rather than truncating.
Conformance close(const AlgebraDescriptor& alg, const Conformance& q, const CloseOptions& options = {});
bool is_refinement(const AlgebraDescriptor& alg, const Conformance& p);

}  // namespace gce
