#include "gce/conformance.hpp"

#include "gce/error.hpp"

#include <algorithm>
#include <tuple>

namespace gce {

Carrier::Carrier(std::vector<std::string> elements) : elements_(std::move(elements)) {
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        auto [it, fresh] = index_.emplace(elements_[i], i);
        require(fresh, Errc::validation, "duplicate carrier element \"" + elements_[i] + "\"");
    }
}

std::size_t Carrier::index_of(const std::string& element) const {
    auto it = index_.find(element);
    if (it == index_.end()) fail(Errc::not_found, "unknown element \"" + element + "\"");
    return it->second;
}

CarrierPtr make_carrier(std::vector<std::string> elements) {
    return std::make_shared<const Carrier>(std::move(elements));
}

bool is_metric(Fibre f) noexcept { return f == Fibre::PseudoMetric || f == Fibre::HemiMetric; }

std::string fibre_name(Fibre f) {
    switch (f) {
        case Fibre::Equivalence: return "equivalence";
        case Fibre::Preorder: return "preorder";
        case Fibre::PseudoMetric: return "pseudometric";
        case Fibre::HemiMetric: return "hemimetric";
        case Fibre::SpecPreorder: return "specialization-preorder";
    }
    return "?";
}

void close_relation(std::vector<char>& rel, std::size_t n, bool symmetric) {
    for (std::size_t i = 0; i < n; ++i) rel[i * n + i] = 1;
    if (symmetric)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (rel[i * n + j]) rel[j * n + i] = 1;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            if (!rel[i * n + k]) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (rel[k * n + j]) rel[i * n + j] = 1;
        }
}

void close_distances(std::vector<Rational>& dist, std::size_t n, bool symmetric) {
    for (auto& d : dist) {
        if (d > 1) d = 1;
        if (d < 0) d = 0;
    }
    for (std::size_t i = 0; i < n; ++i) dist[i * n + i] = 0;
    if (symmetric)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const Rational m = min_of(dist[i * n + j], dist[j * n + i]);
                dist[i * n + j] = m;
                dist[j * n + i] = m;
            }
    Rational via;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            const Rational& ik = dist[i * n + k];
            if (ik >= 1) continue;
            for (std::size_t j = 0; j < n; ++j) {
                via = ik + dist[k * n + j];
                if (via < dist[i * n + j]) dist[i * n + j] = via;
            }
        }
}

Conformance Conformance::discrete(CarrierPtr carrier, Fibre fibre) {
    Conformance c(std::move(carrier), fibre);
    const std::size_t n = c.size();
    if (c.metric()) {
        c.dist_.assign(n * n, Rational(1));
        for (std::size_t i = 0; i < n; ++i) c.dist_[i * n + i] = 0;
    } else {
        c.rel_.assign(n * n, 0);
        for (std::size_t i = 0; i < n; ++i) c.rel_[i * n + i] = 1;
    }
    return c;
}

Conformance Conformance::indiscrete(CarrierPtr carrier, Fibre fibre) {
    Conformance c(std::move(carrier), fibre);
    const std::size_t n = c.size();
    if (c.metric())
        c.dist_.assign(n * n, Rational(0));
    else
        c.rel_.assign(n * n, 1);
    return c;
}

Conformance Conformance::from_relation(CarrierPtr carrier, Fibre fibre, std::vector<char> relation) {
    require(!is_metric(fibre), Errc::mismatch, "relation given for a metric fibre");
    Conformance c(std::move(carrier), fibre);
    require(relation.size() == c.size() * c.size(), Errc::mismatch, "relation matrix has wrong size");
    close_relation(relation, c.size(), fibre == Fibre::Equivalence);
    c.rel_ = std::move(relation);
    return c;
}

Conformance Conformance::from_distances(CarrierPtr carrier, Fibre fibre, std::vector<Rational> distances) {
    require(is_metric(fibre), Errc::mismatch, "distances given for a relational fibre");
    Conformance c(std::move(carrier), fibre);
    require(distances.size() == c.size() * c.size(), Errc::mismatch, "distance matrix has wrong size");
    close_distances(distances, c.size(), fibre == Fibre::PseudoMetric);
    c.dist_ = std::move(distances);
    return c;
}

std::vector<std::vector<std::size_t>> Conformance::blocks() const {
    require(fibre_ == Fibre::Equivalence, Errc::mismatch, "blocks() needs an equivalence");
    const std::size_t n = size();
    std::vector<std::vector<std::size_t>> out;
    std::vector<char> seen(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (seen[i]) continue;
        out.emplace_back();
        for (std::size_t j = i; j < n; ++j)
            if (related(i, j)) {
                seen[j] = 1;
                out.back().push_back(j);
            }
    }
    return out;
}

bool operator==(const Conformance& a, const Conformance& b) {
    return a.fibre_ == b.fibre_ && *a.carrier_ == *b.carrier_ && a.rel_ == b.rel_ && a.dist_ == b.dist_;
}

namespace {

void check_compatible(const Conformance& a, const Conformance& b) {
    require(a.fibre() == b.fibre(), Errc::mismatch,
            "fibre mismatch: " + fibre_name(a.fibre()) + " vs " + fibre_name(b.fibre()));
    require(a.carrier() == b.carrier() || *a.carrier() == *b.carrier(), Errc::mismatch, "carrier mismatch");
}

std::size_t claim_rank(const Claim& c) { return c.index(); }

}  // namespace

bool operator==(const Claim& a, const Claim& b) { return !(a < b) && !(b < a); }

bool operator<(const Claim& a, const Claim& b) {
    if (claim_rank(a) != claim_rank(b)) return claim_rank(a) < claim_rank(b);
    if (auto* pa = std::get_if<PairClaim>(&a)) {
        auto& pb = std::get<PairClaim>(b);
        return std::tie(pa->lhs, pa->rhs) < std::tie(pb.lhs, pb.rhs);
    }
    if (auto* ba = std::get_if<BoundedClaim>(&a)) {
        auto& bb = std::get<BoundedClaim>(b);
        if (std::tie(ba->lhs, ba->rhs) != std::tie(bb.lhs, bb.rhs))
            return std::tie(ba->lhs, ba->rhs) < std::tie(bb.lhs, bb.rhs);
        return ba->bound < bb.bound;
    }
    auto& na = std::get<NearnessClaim>(a);
    auto& nb = std::get<NearnessClaim>(b);
    return std::tie(na.point, na.targets) < std::tie(nb.point, nb.targets);
}

CarrierMap::CarrierMap(CarrierPtr domain, CarrierPtr codomain, std::vector<std::size_t> image)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), image_(std::move(image)) {
    require(image_.size() == domain_->size(), Errc::invalid_argument, "carrier map is not total");
    for (auto v : image_) require(v < codomain_->size(), Errc::invalid_argument, "carrier map leaves codomain");
}

bool leq(const Conformance& lower, const Conformance& upper) {
    check_compatible(lower, upper);
    const std::size_t n = lower.size();
    for (std::size_t i = 0; i < n * n; ++i) {
        if (lower.metric()) {
            if (upper.distances()[i] > lower.distances()[i]) return false;
        } else if (lower.relation()[i] && !upper.relation()[i]) {
            return false;
        }
    }
    return true;
}

Conformance meet(const std::vector<Conformance>& ps) {
    require(!ps.empty(), Errc::invalid_argument, "meet of an empty family");
    const Conformance& first = ps.front();
    for (const auto& p : ps) check_compatible(first, p);
    const std::size_t n = first.size();
    if (first.metric()) {
        std::vector<Rational> d = first.distances();
        for (const auto& p : ps)
            for (std::size_t i = 0; i < n * n; ++i) d[i] = max_of(d[i], p.distances()[i]);
        Conformance out = Conformance::from_distances(first.carrier(), first.fibre(), d);
        require(out.distances() == d, Errc::internal, "pointwise maximum broke the triangle inequality");
        return out;
    }
    std::vector<char> r = first.relation();
    for (const auto& p : ps)
        for (std::size_t i = 0; i < n * n; ++i) r[i] = r[i] && p.relation()[i];
    return Conformance::from_relation(first.carrier(), first.fibre(), r);
}

Conformance join(const std::vector<Conformance>& ps) {
    require(!ps.empty(), Errc::invalid_argument, "join of an empty family");
    const Conformance& first = ps.front();
    for (const auto& p : ps) check_compatible(first, p);
    const std::size_t n = first.size();
    if (first.metric()) {
        std::vector<Rational> d = first.distances();
        for (const auto& p : ps)
            for (std::size_t i = 0; i < n * n; ++i) d[i] = min_of(d[i], p.distances()[i]);
        return Conformance::from_distances(first.carrier(), first.fibre(), std::move(d));
    }
    std::vector<char> r = first.relation();
    for (const auto& p : ps)
        for (std::size_t i = 0; i < n * n; ++i) r[i] = r[i] || p.relation()[i];
    return Conformance::from_relation(first.carrier(), first.fibre(), std::move(r));
}

Conformance reindex(const CarrierMap& f, const Conformance& p) {
    require(*f.codomain() == *p.carrier(), Errc::mismatch, "reindex: codomain differs from carrier");
    const std::size_t n = f.domain()->size();
    const std::size_t m = p.size();
    if (p.metric()) {
        std::vector<Rational> d(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i * n + j] = p.distances()[f(i) * m + f(j)];
        return Conformance::from_distances(f.domain(), p.fibre(), std::move(d));
    }
    std::vector<char> r(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r[i * n + j] = p.relation()[f(i) * m + f(j)];
    return Conformance::from_relation(f.domain(), p.fibre(), std::move(r));
}

Conformance pushforward(const CarrierMap& f, const Conformance& p) {
    require(*f.domain() == *p.carrier(), Errc::mismatch, "pushforward: domain differs from carrier");
    const std::size_t n = p.size();
    const std::size_t m = f.codomain()->size();
    if (p.metric()) {
        std::vector<Rational> d(m * m, Rational(1));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Rational& slot = d[f(i) * m + f(j)];
                slot = min_of(slot, p.distances()[i * n + j]);
            }
        return Conformance::from_distances(f.codomain(), p.fibre(), std::move(d));
    }
    std::vector<char> r(m * m, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (p.relation()[i * n + j]) r[f(i) * m + f(j)] = 1;
    return Conformance::from_relation(f.codomain(), p.fibre(), std::move(r));
}

Conformance claim_to_conformance(const Claim& c, const CarrierPtr& carrier, Fibre fibre) {
    const std::size_t n = carrier->size();
    Conformance base = Conformance::discrete(carrier, fibre);
    if (auto* pair = std::get_if<PairClaim>(&c)) {
        require(!is_metric(fibre), Errc::mismatch, "pair claim on a metric fibre");
        require(pair->lhs < n && pair->rhs < n, Errc::not_found, "claim leaves the carrier");
        std::vector<char> r = base.relation();
        r[pair->lhs * n + pair->rhs] = 1;
        return Conformance::from_relation(carrier, fibre, std::move(r));
    }
    if (auto* bounded = std::get_if<BoundedClaim>(&c)) {
        require(is_metric(fibre), Errc::mismatch, "bounded claim on a relational fibre");
        require(bounded->lhs < n && bounded->rhs < n, Errc::not_found, "claim leaves the carrier");
        require(bounded->bound >= 0 && bounded->bound <= 1, Errc::invalid_argument, "claim bound outside [0,1]");
        std::vector<Rational> d = base.distances();
        Rational& slot = d[bounded->lhs * n + bounded->rhs];
        slot = min_of(slot, bounded->bound);
        return Conformance::from_distances(carrier, fibre, std::move(d));
    }
    return nearness_to_conformance(std::get<NearnessClaim>(c), carrier, fibre);
}

Conformance nearness_to_conformance(const NearnessClaim& c, const CarrierPtr& carrier, Fibre fibre) {
    std::vector<Conformance> parts{Conformance::discrete(carrier, fibre)};
    for (auto t : c.targets) parts.push_back(claim_to_conformance(PairClaim{c.point, t}, carrier, fibre));
    return join(parts);
}

bool claim_holds(const Conformance& p, const Claim& c) {
    const std::size_t n = p.size();
    if (auto* pair = std::get_if<PairClaim>(&c)) {
        require(!p.metric(), Errc::mismatch, "pair claim on a metric fibre");
        require(pair->lhs < n && pair->rhs < n, Errc::not_found, "claim leaves the carrier");
        return p.related(pair->lhs, pair->rhs);
    }
    if (auto* bounded = std::get_if<BoundedClaim>(&c)) {
        require(p.metric(), Errc::mismatch, "bounded claim on a relational fibre");
        require(bounded->lhs < n && bounded->rhs < n, Errc::not_found, "claim leaves the carrier");
        return p.distance(bounded->lhs, bounded->rhs) <= bounded->bound;
    }
    const auto& near = std::get<NearnessClaim>(c);
    require(!p.metric(), Errc::mismatch, "nearness claim on a metric fibre");
    for (auto t : near.targets)
        if (p.related(near.point, t)) return true;
    return false;
}

}  // namespace gce
