#include "gce/graded.hpp"

#include "gce/error.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace gce {

const InstanceInfo& instance_info(Semantics s) {
    static const std::vector<InstanceInfo> table{
        {Semantics::TraceInc, "trace-inclusion", ModelKind::LTS, Fibre::Preorder, false},
        {Semantics::PTrace, "ptrace", ModelKind::LMC, Fibre::PseudoMetric, true},
        {Semantics::Bisim, "bisim", ModelKind::LTS, Fibre::Equivalence, false},
        {Semantics::BTopDFA, "btop-dfa", ModelKind::DFA, Fibre::SpecPreorder, false},
        {Semantics::BTopNFA, "btop-nfa", ModelKind::NFA, Fibre::SpecPreorder, false},
        {Semantics::QSim, "qsim", ModelKind::MetricLTS, Fibre::HemiMetric, true},
        {Semantics::QRSim, "qrsim", ModelKind::MetricLTS, Fibre::HemiMetric, true},
    };
    return table.at(static_cast<std::size_t>(s));
}

const std::vector<Semantics>& all_semantics() {
    static const std::vector<Semantics> all{Semantics::TraceInc, Semantics::PTrace,  Semantics::Bisim,
                                            Semantics::BTopDFA,  Semantics::BTopNFA, Semantics::QSim,
                                            Semantics::QRSim};
    return all;
}

Semantics parse_semantics(const std::string& name) {
    for (auto s : all_semantics())
        if (instance_info(s).name == name) return s;
    fail(Errc::invalid_argument, "unknown semantics \"" + name +
                                     "\" (expected trace-inclusion, ptrace, bisim, btop-dfa, btop-nfa, qsim or qrsim)");
}

bool operator<(const Point& a, const Point& b) {
    if (a.support != b.support) return a.support < b.support;
    const auto n = std::min(a.weights.size(), b.weights.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a.weights[i] != b.weights[i]) return a.weights[i] < b.weights[i];
    return a.weights.size() < b.weights.size();
}

void check_compatible(const Model& m, Semantics s) {
    const auto& info = instance_info(s);
    require(m.kind == info.model, Errc::mismatch,
            "semantics " + info.name + " needs a " + model_kind_name(info.model) + " model, got " +
                model_kind_name(m.kind));
}

std::optional<std::size_t> DetSystem::find(const Point& p) const {
    auto it = index_.find(p);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t DetSystem::index_of(const Point& p) const {
    auto found = find(p);
    if (!found) fail(Errc::not_found, "point " + format_point(*model, semantics, p) + " is not in the determinized carrier");
    return *found;
}

const OneStep& DetSystem::step(std::size_t point) const {
    require(point < points.size(), Errc::not_found, "unknown point");
    const auto& s = steps[point];
    if (!s) fail(Errc::incomplete, "point " + point_name(point) + " lies beyond the explored depth");
    return *s;
}

std::string format_point(const Model& m, Semantics s, const Point& p) {
    switch (s) {
        case Semantics::Bisim:
        case Semantics::BTopDFA:
        case Semantics::QSim:
        case Semantics::QRSim: return m.states->name(p.support.at(0));
        case Semantics::TraceInc:
        case Semantics::BTopNFA: {
            std::string out = "{";
            for (std::size_t i = 0; i < p.support.size(); ++i)
                out += (i ? "," : "") + m.states->name(p.support[i]);
            return out + "}";
        }
        case Semantics::PTrace: {
            std::string out = "{";
            for (std::size_t i = 0; i < p.support.size(); ++i)
                out += (i ? "," : "") + m.states->name(p.support[i]) + ":" + to_string(p.weights[i]);
            return out + "}";
        }
    }
    return "?";
}

namespace {

bool set_semantics(Semantics s) { return s == Semantics::TraceInc || s == Semantics::BTopNFA; }

Point set_point(std::uint64_t mask, std::size_t n) {
    Point p;
    for (std::size_t x = 0; x < n; ++x)
        if (mask >> x & 1U) p.support.push_back(x);
    return p;
}

Point post(const Model& m, const Point& from, std::size_t label) {
    std::vector<char> hit(m.state_count(), 0);
    for (auto x : from.support)
        for (const auto& s : m.successors(x))
            if (s.label == label) hit[s.to] = 1;
    Point p;
    for (std::size_t x = 0; x < hit.size(); ++x)
        if (hit[x]) p.support.push_back(x);
    return p;
}

struct Builder {
    DetSystem& det;
    std::map<Point, std::size_t>& index;

    std::pair<std::size_t, bool> add(const Point& p, std::size_t level) {
        auto [it, fresh] = index.emplace(p, det.points.size());
        if (fresh) {
            det.points.push_back(p);
            det.steps.emplace_back();
            det.level.push_back(level);
        }
        return {it->second, fresh};
    }
};

}  // namespace

DetSystem predeterminize(std::shared_ptr<const Model> model, Semantics semantics, const DetOptions& options) {
    require(model != nullptr, Errc::invalid_argument, "no model");
    check_compatible(*model, semantics);
    const Model& m = *model;
    const std::size_t n = m.state_count();
    const std::size_t labels = m.label_count();

    DetSystem det;
    det.semantics = semantics;
    det.model = model;
    Builder b{det, det.index_};

    if (set_semantics(semantics)) {
        const bool full = n <= options.powerset_cap && n < 63;
        if (full) {
            const std::uint64_t limit = std::uint64_t{1} << n;
            bool needs_empty = semantics == Semantics::TraceInc;
            if (!needs_empty)
                for (std::size_t x = 0; x < n && !needs_empty; ++x)
                    for (std::size_t a = 0; a < labels; ++a)
                        if (post(m, Point::state(x), a).support.empty()) needs_empty = true;
            for (std::uint64_t mask = needs_empty ? 0 : 1; mask < limit; ++mask) b.add(set_point(mask, n), 0);
            det.union_closed = true;
        } else {
            std::deque<std::size_t> queue;
            if (semantics == Semantics::TraceInc) queue.push_back(b.add(Point{}, 0).first);
            for (std::size_t x = 0; x < n; ++x) {
                auto [id, fresh] = b.add(Point::state(x), 0);
                if (fresh) queue.push_back(id);
            }
            while (!queue.empty()) {
                const std::size_t id = queue.front();
                queue.pop_front();
                for (std::size_t a = 0; a < labels; ++a) {
                    auto [succ, fresh] = b.add(post(m, det.points[id], a), det.level[id] + 1);
                    if (fresh) queue.push_back(succ);
                }
                require(det.points.size() <= options.point_cap, Errc::cap_exceeded,
                        "infinite or too large determinization (more than " + std::to_string(options.point_cap) +
                            " points)");
            }
            det.complete = false;
        }
        for (std::size_t id = 0; id < det.points.size(); ++id) {
            OneStep s;
            for (auto x : det.points[id].support) s.accepting = s.accepting || m.is_accepting(x);
            for (std::size_t a = 0; a < labels; ++a) s.by_label.push_back(b.add(post(m, det.points[id], a), 0).first);
            det.steps[id] = std::move(s);
        }
        for (std::size_t x = 0; x < n; ++x) det.unit.push_back(det.index_.at(Point::state(x)));
    } else if (semantics == Semantics::PTrace) {
        std::deque<std::size_t> queue;
        for (std::size_t x = 0; x < n; ++x) {
            auto [id, fresh] = b.add(Point::dirac(x), 0);
            det.unit.push_back(id);
            if (fresh) queue.push_back(id);
        }
        while (!queue.empty()) {
            const std::size_t id = queue.front();
            queue.pop_front();
            if (options.depth && det.level[id] >= *options.depth) {
                det.complete = false;
                continue;
            }
            const Point mu = det.points[id];
            std::vector<std::vector<std::pair<std::size_t, Rational>>> per_label(labels);
            for (std::size_t i = 0; i < mu.support.size(); ++i)
                for (const auto& t : m.distribution(mu.support[i]))
                    per_label[t.label].emplace_back(t.to, mu.weights[i] * t.prob);
            OneStep s;
            for (std::size_t a = 0; a < labels; ++a) {
                if (per_label[a].empty()) continue;
                Distribution joint = normalize(per_label[a]);
                Rational mass = 0;
                for (const auto& [x, w] : joint.weights) mass += w;
                Point cond;
                for (const auto& [x, w] : joint.weights) {
                    cond.support.push_back(x);
                    cond.weights.push_back(w / mass);
                }
                auto [succ, fresh] = b.add(cond, det.level[id] + 1);
                if (fresh) queue.push_back(succ);
                s.masses.push_back({a, mass, succ});
            }
            det.steps[id] = std::move(s);
            require(det.points.size() <= options.point_cap, Errc::cap_exceeded,
                    "infinite or too large determinization (more than " + std::to_string(options.point_cap) +
                        " points)");
        }
    } else {
        for (std::size_t x = 0; x < n; ++x) b.add(Point::state(x), 0);
        for (std::size_t x = 0; x < n; ++x) {
            det.unit.push_back(x);
            OneStep s;
            if (semantics == Semantics::BTopDFA) {
                s.accepting = m.is_accepting(x);
                for (std::size_t a = 0; a < labels; ++a) s.by_label.push_back(m.next[x * labels + a]);
            } else {
                s.moves = m.successors(x);
                if (semantics == Semantics::QRSim) {
                    for (const auto& mv : s.moves) s.ready.push_back(mv.label);
                    s.ready.erase(std::unique(s.ready.begin(), s.ready.end()), s.ready.end());
                }
            }
            det.steps[x] = std::move(s);
        }
    }

    std::vector<std::string> names;
    for (const auto& p : det.points) names.push_back(format_point(m, semantics, p));
    det.carrier = make_carrier(std::move(names));
    return det;
}

int compare_trees(const TreePtr& a, const TreePtr& b) {
    if (a == b) return 0;
    const auto& ca = a->children;
    const auto& cb = b->children;
    const auto n = std::min(ca.size(), cb.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (ca[i].first != cb[i].first) return ca[i].first < cb[i].first ? -1 : 1;
        if (int c = compare_trees(ca[i].second, cb[i].second)) return c;
    }
    if (ca.size() == cb.size()) return 0;
    return ca.size() < cb.size() ? -1 : 1;
}

namespace {

TreePtr make_tree(std::vector<std::pair<std::size_t, TreePtr>> children) {
    auto less = [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first < y.first;
        return compare_trees(x.second, y.second) < 0;
    };
    std::sort(children.begin(), children.end(), less);
    children.erase(std::unique(children.begin(), children.end(),
                               [](const auto& x, const auto& y) {
                                   return x.first == y.first && compare_trees(x.second, y.second) == 0;
                               }),
                   children.end());
    auto t = std::make_shared<Tree>();
    t->children = std::move(children);
    return t;
}

std::set<Word> prefixed(std::size_t label, const std::set<Word>& words) {
    std::set<Word> out;
    for (const auto& w : words) {
        Word v{label};
        v.insert(v.end(), w.begin(), w.end());
        out.insert(std::move(v));
    }
    return out;
}

std::set<Word> traces(const Model& m, std::size_t x, std::size_t n) {
    if (n == 0) return {Word{}};
    std::set<Word> out;
    for (const auto& s : m.successors(x)) out.merge(prefixed(s.label, traces(m, s.to, n - 1)));
    return out;
}

std::set<Word> accepted_shorter_than(const Model& m, const Point& states, std::size_t n) {
    std::set<Word> out;
    if (n == 0) return out;
    for (auto x : states.support)
        if (m.is_accepting(x)) out.insert(Word{});
    for (std::size_t a = 0; a < m.label_count(); ++a) {
        Point succ = post(m, states, a);
        if (!succ.support.empty()) out.merge(prefixed(a, accepted_shorter_than(m, succ, n - 1)));
    }
    return out;
}

std::map<Word, Rational> trace_distribution(const Model& m, std::size_t x, std::size_t n) {
    if (n == 0) return {{Word{}, Rational(1)}};
    std::map<Word, Rational> out;
    for (const auto& t : m.distribution(x))
        for (const auto& [w, p] : trace_distribution(m, t.to, n - 1)) {
            Word v{t.label};
            v.insert(v.end(), w.begin(), w.end());
            out[v] += t.prob * p;
        }
    return out;
}

TreePtr unfold(const Model& m, std::size_t x, std::size_t n) {
    if (n == 0) return make_tree({});
    std::vector<std::pair<std::size_t, TreePtr>> children;
    for (const auto& s : m.successors(x)) children.emplace_back(s.label, unfold(m, s.to, n - 1));
    return make_tree(std::move(children));
}

Rational ready_hausdorff(const Model& m, const std::vector<std::size_t>& lhs, const std::vector<std::size_t>& rhs) {
    if (lhs.empty() && rhs.empty()) return 0;
    if (lhs.empty() || rhs.empty()) return 1;
    Rational worst = 0;
    for (auto a : lhs) {
        Rational best = 1;
        for (auto b : rhs) best = min_of(best, m.label_distance(a, b));
        worst = max_of(worst, best);
    }
    for (auto b : rhs) {
        Rational best = 1;
        for (auto a : lhs) best = min_of(best, m.label_distance(a, b));
        worst = max_of(worst, best);
    }
    return worst;
}

std::vector<std::size_t> ready_of(const TreePtr& t) {
    std::vector<std::size_t> out;
    for (const auto& [label, child] : t->children) out.push_back(label);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Rational tree_distance(const Model& m, bool ready, const TreePtr& lhs, const TreePtr& rhs) {
    Rational worst = 0;
    for (const auto& [a, u] : lhs->children) {
        Rational best = 1;
        for (const auto& [b, v] : rhs->children) {
            if (best == 0) break;
            best = min_of(best, max_of(m.label_distance(a, b), tree_distance(m, ready, u, v)));
        }
        worst = max_of(worst, best);
    }
    if (ready) worst = max_of(worst, ready_hausdorff(m, ready_of(lhs), ready_of(rhs)));
    return worst;
}

Verdict boolean(bool holds) { return Verdict{holds, holds ? Rational(0) : Rational(1)}; }
Verdict quantitative(Rational d) { return Verdict{d == 0, std::move(d)}; }

}  // namespace

Behaviour gamma_n(const Model& m, Semantics s, std::size_t x, std::size_t n) {
    check_compatible(m, s);
    require(x < m.state_count(), Errc::not_found, "unknown state");
    Behaviour out{s, n, {}, {}, nullptr};
    switch (s) {
        case Semantics::TraceInc: out.words = traces(m, x, n); break;
        case Semantics::BTopDFA:
        case Semantics::BTopNFA: out.words = accepted_shorter_than(m, Point::state(x), n); break;
        case Semantics::PTrace: out.distribution = trace_distribution(m, x, n); break;
        case Semantics::Bisim:
        case Semantics::QSim:
        case Semantics::QRSim: out.tree = unfold(m, x, n); break;
    }
    return out;
}

Verdict behaviour_compare(const Model& m, const Behaviour& lhs, const Behaviour& rhs) {
    require(lhs.semantics == rhs.semantics && lhs.depth == rhs.depth, Errc::mismatch,
            "behaviours of different semantics or depth");
    switch (lhs.semantics) {
        case Semantics::TraceInc:
        case Semantics::BTopDFA:
        case Semantics::BTopNFA:
            return boolean(std::includes(rhs.words.begin(), rhs.words.end(), lhs.words.begin(), lhs.words.end()));
        case Semantics::Bisim: return boolean(compare_trees(lhs.tree, rhs.tree) == 0);
        case Semantics::PTrace: {
            Rational sum = 0;
            for (const auto& [w, p] : lhs.distribution) {
                auto it = rhs.distribution.find(w);
                sum += abs(p - (it == rhs.distribution.end() ? Rational(0) : it->second));
            }
            for (const auto& [w, q] : rhs.distribution)
                if (!lhs.distribution.count(w)) sum += q;
            return quantitative(sum / 2);
        }
        case Semantics::QSim: return quantitative(tree_distance(m, false, lhs.tree, rhs.tree));
        case Semantics::QRSim: return quantitative(tree_distance(m, true, lhs.tree, rhs.tree));
    }
    fail(Errc::internal, "unreachable");
}

Behaviour kleisli_star_apply(const DetSystem& det, std::size_t point, std::size_t n) {
    require(point < det.size(), Errc::not_found, "unknown point");
    const Model& m = *det.model;
    const Point& p = det.points[point];
    Behaviour out{det.semantics, n, {}, {}, nullptr};
    switch (det.semantics) {
        case Semantics::TraceInc:
        case Semantics::BTopNFA:
            for (auto x : p.support) out.words.merge(gamma_n(m, det.semantics, x, n).words);
            return out;
        case Semantics::PTrace:
            for (std::size_t i = 0; i < p.support.size(); ++i)
                for (const auto& [w, q] : gamma_n(m, det.semantics, p.support[i], n).distribution)
                    out.distribution[w] += p.weights[i] * q;
            return out;
        default: return gamma_n(m, det.semantics, p.support.at(0), n);
    }
}

TransportProblem ptrace_transport(const OneStep& lhs, const OneStep& rhs, const Conformance& ground) {
    TransportProblem problem;
    for (const auto& e : lhs.masses) problem.supply.push_back(e.mass);
    for (const auto& e : rhs.masses) problem.demand.push_back(e.mass);
    for (const auto& l : lhs.masses)
        for (const auto& r : rhs.masses)
            problem.cost.push_back(l.label != r.label ? Rational(1) : ground.distance(l.point, r.point));
    return problem;
}

Verdict lift_compare(const DetSystem& det, const OneStep& lhs, const OneStep& rhs, const Conformance& ground) {
    require(ground.size() == det.size() && ground.fibre() == det.fibre(), Errc::mismatch,
            "ground conformance does not live on the determinized carrier");
    const Model& m = *det.model;
    switch (det.semantics) {
        case Semantics::TraceInc:
        case Semantics::BTopDFA:
        case Semantics::BTopNFA: {
            if (lhs.accepting && !rhs.accepting) return boolean(false);
            for (std::size_t a = 0; a < lhs.by_label.size(); ++a)
                if (!ground.related(lhs.by_label[a], rhs.by_label[a])) return boolean(false);
            return boolean(true);
        }
        case Semantics::Bisim: {
            auto covered = [&](const std::vector<LabelledSuccessor>& from, const std::vector<LabelledSuccessor>& by) {
                for (const auto& f : from) {
                    bool matched = false;
                    for (const auto& g : by)
                        if (g.label == f.label && ground.related(f.to, g.to)) {
                            matched = true;
                            break;
                        }
                    if (!matched) return false;
                }
                return true;
            };
            return boolean(covered(lhs.moves, rhs.moves) && covered(rhs.moves, lhs.moves));
        }
        case Semantics::PTrace: return quantitative(wasserstein(ptrace_transport(lhs, rhs, ground)).value);
        case Semantics::QSim:
        case Semantics::QRSim: {
            Rational worst = 0;
            for (const auto& f : lhs.moves) {
                Rational best = 1;
                for (const auto& g : rhs.moves)
                    best = min_of(best, max_of(m.label_distance(f.label, g.label), ground.distance(f.to, g.to)));
                worst = max_of(worst, best);
            }
            if (det.semantics == Semantics::QRSim) worst = max_of(worst, ready_hausdorff(m, lhs.ready, rhs.ready));
            return quantitative(worst);
        }
    }
    fail(Errc::internal, "unreachable");
}

}  // namespace gce
