#pragma once

#include "gce/rational.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace gce {

class Carrier {
public:
    explicit Carrier(std::vector<std::string> elements);

    std::size_t size() const noexcept { return elements_.size(); }
    const std::string& name(std::size_t i) const { return elements_.at(i); }
    const std::vector<std::string>& elements() const noexcept { return elements_; }
    std::size_t index_of(const std::string& element) const;
    bool contains(const std::string& element) const { return index_.count(element) != 0; }

    friend bool operator==(const Carrier& a, const Carrier& b) { return a.elements_ == b.elements_; }

private:
    std::vector<std::string> elements_;
    std::unordered_map<std::string, std::size_t> index_;
};

using CarrierPtr = std::shared_ptr<const Carrier>;

CarrierPtr make_carrier(std::vector<std::string> elements);

enum class Fibre { Equivalence, Preorder, PseudoMetric, HemiMetric, SpecPreorder };

bool is_metric(Fibre f) noexcept;
std::string fibre_name(Fibre f);

class Conformance {
public:
    // Least element of the fibre: identity relation, or distance 1 off the diagonal.
    static Conformance discrete(CarrierPtr carrier, Fibre fibre);
    // Greatest element: full relation, or distance 0 everywhere.
    static Conformance indiscrete(CarrierPtr carrier, Fibre fibre);
    // Closes the given relation (reflexive, transitive, symmetric for Equivalence).
    static Conformance from_relation(CarrierPtr carrier, Fibre fibre, std::vector<char> relation);
    // Closes the given distances (zero diagonal, triangle, symmetric for PseudoMetric).
    static Conformance from_distances(CarrierPtr carrier, Fibre fibre, std::vector<Rational> distances);

    const CarrierPtr& carrier() const noexcept { return carrier_; }
    Fibre fibre() const noexcept { return fibre_; }
    std::size_t size() const noexcept { return carrier_->size(); }
    bool metric() const noexcept { return is_metric(fibre_); }

    bool related(std::size_t i, std::size_t j) const { return rel_[i * size() + j] != 0; }
    const Rational& distance(std::size_t i, std::size_t j) const { return dist_[i * size() + j]; }
    const std::vector<char>& relation() const noexcept { return rel_; }
    const std::vector<Rational>& distances() const noexcept { return dist_; }

    // Blocks of an Equivalence, ordered by least member.
    std::vector<std::vector<std::size_t>> blocks() const;

    friend bool operator==(const Conformance& a, const Conformance& b);

private:
    Conformance(CarrierPtr carrier, Fibre fibre) : carrier_(std::move(carrier)), fibre_(fibre) {}

    CarrierPtr carrier_;
    Fibre fibre_;
    std::vector<char> rel_;
    std::vector<Rational> dist_;
};

// Reflexive-transitive closure in place (plus symmetry when requested).
void close_relation(std::vector<char>& rel, std::size_t n, bool symmetric);
// Zero diagonal, values clipped to [0,1], shortest-path closure (symmetrised first when requested).
void close_distances(std::vector<Rational>& dist, std::size_t n, bool symmetric);

struct PairClaim {
    std::size_t lhs;
    std::size_t rhs;
};

struct BoundedClaim {
    std::size_t lhs;
    std::size_t rhs;
    Rational bound;
};

struct NearnessClaim {
    std::size_t point;
    std::vector<std::size_t> targets;
};

using Claim = std::variant<PairClaim, BoundedClaim, NearnessClaim>;

bool operator==(const Claim& a, const Claim& b);
bool operator<(const Claim& a, const Claim& b);

class CarrierMap {
public:
    CarrierMap(CarrierPtr domain, CarrierPtr codomain, std::vector<std::size_t> image);

    const CarrierPtr& domain() const noexcept { return domain_; }
    const CarrierPtr& codomain() const noexcept { return codomain_; }
    std::size_t operator()(std::size_t i) const { return image_.at(i); }

private:
    CarrierPtr domain_;
    CarrierPtr codomain_;
    std::vector<std::size_t> image_;
};

bool leq(const Conformance& lower, const Conformance& upper);
Conformance meet(const std::vector<Conformance>& ps);
Conformance join(const std::vector<Conformance>& ps);
Conformance reindex(const CarrierMap& f, const Conformance& p);
Conformance pushforward(const CarrierMap& f, const Conformance& p);

Conformance claim_to_conformance(const Claim& c, const CarrierPtr& carrier, Fibre fibre);
// Nearness claims expand to the join of their single-target pairs.
Conformance nearness_to_conformance(const NearnessClaim& c, const CarrierPtr& carrier, Fibre fibre);
bool claim_holds(const Conformance& p, const Claim& c);

}  // namespace gce
