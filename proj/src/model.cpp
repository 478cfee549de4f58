#include "gce/model.hpp"

#include "gce/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <tuple>

namespace gce {

using nlohmann::json;

std::string model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::LTS: return "lts";
        case ModelKind::LMC: return "lmc";
        case ModelKind::MetricLTS: return "mlts";
        case ModelKind::NFA: return "nfa";
        case ModelKind::DFA: return "dfa";
    }
    return "?";
}

Rational Distribution::at(std::size_t x) const {
    for (const auto& [s, w] : weights)
        if (s == x) return w;
    return Rational(0);
}

bool operator<(const Distribution& a, const Distribution& b) {
    const auto n = std::min(a.weights.size(), b.weights.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a.weights[i].first != b.weights[i].first) return a.weights[i].first < b.weights[i].first;
        if (a.weights[i].second != b.weights[i].second) return a.weights[i].second < b.weights[i].second;
    }
    return a.weights.size() < b.weights.size();
}

Distribution normalize(std::vector<std::pair<std::size_t, Rational>> weights) {
    std::sort(weights.begin(), weights.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    Distribution out;
    for (auto& [s, w] : weights) {
        if (!out.weights.empty() && out.weights.back().first == s)
            out.weights.back().second += w;
        else
            out.weights.emplace_back(s, w);
    }
    std::erase_if(out.weights, [](const auto& e) { return e.second == 0; });
    return out;
}

std::size_t Model::state_index(const std::string& name) const {
    if (!states->contains(name)) fail(Errc::validation, "unknown state \"" + name + "\"");
    return states->index_of(name);
}

std::size_t Model::label_index(const std::string& name) const {
    auto it = std::find(labels.begin(), labels.end(), name);
    if (it == labels.end()) fail(Errc::validation, "unknown label \"" + name + "\"");
    return static_cast<std::size_t>(it - labels.begin());
}

std::vector<LabelledSuccessor> Model::successors(std::size_t x) const {
    require(x < state_count(), Errc::not_found, "unknown state index");
    std::vector<LabelledSuccessor> out;
    for (const auto& t : transitions)
        if (t.from == x) out.push_back({t.label, t.to});
    return out;
}

std::vector<WeightedSuccessor> Model::distribution(std::size_t x) const {
    require(x < state_count(), Errc::not_found, "unknown state index");
    std::vector<WeightedSuccessor> out;
    for (const auto& t : transitions)
        if (t.from == x) out.push_back({t.label, t.to, t.prob});
    return out;
}

bool operator==(const Model& a, const Model& b) {
    return a.kind == b.kind && *a.states == *b.states && a.labels == b.labels && a.transitions == b.transitions &&
           a.accepting == b.accepting && a.next == b.next && a.label_metric == b.label_metric &&
           a.label_metric_symmetric == b.label_metric_symmetric;
}

void validate_model(const Model& m) {
    const std::size_t n = m.state_count();
    const std::size_t l = m.label_count();
    require(n > 0, Errc::validation, "empty carrier");
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = i + 1; j < l; ++j)
            require(m.labels[i] != m.labels[j], Errc::validation, "duplicate label \"" + m.labels[i] + "\"");
    for (const auto& t : m.transitions)
        require(t.from < n && t.to < n && t.label < l, Errc::validation, "transition out of range");
    for (std::size_t i = 1; i < m.transitions.size(); ++i) {
        const auto& a = m.transitions[i - 1];
        const auto& b = m.transitions[i];
        require(std::tie(a.from, a.label, a.to) < std::tie(b.from, b.label, b.to), Errc::validation,
                "duplicate transition " + m.states->name(b.from) + " -" + m.labels[b.label] + "-> " +
                    m.states->name(b.to));
    }
    switch (m.kind) {
        case ModelKind::LMC: {
            std::vector<Rational> total(n);
            for (const auto& t : m.transitions) {
                require(t.prob > 0, Errc::validation,
                        "non-positive probability on a transition of state \"" + m.states->name(t.from) + "\"");
                total[t.from] += t.prob;
            }
            for (std::size_t x = 0; x < n; ++x)
                require(total[x] == 1, Errc::validation,
                        "probabilities of state \"" + m.states->name(x) + "\" sum to " + to_string(total[x]) +
                            ", expected 1/1");
            break;
        }
        case ModelKind::NFA: {
            require(m.accepting.size() == n, Errc::validation, "accepting vector has wrong size");
            std::vector<char> has_succ(n, 0);
            for (const auto& t : m.transitions) has_succ[t.from] = 1;
            for (std::size_t x = 0; x < n; ++x)
                require(has_succ[x], Errc::validation,
                        "state \"" + m.states->name(x) + "\" has no successor (automaton must be serial)");
            break;
        }
        case ModelKind::DFA: {
            require(m.accepting.size() == n, Errc::validation, "accepting vector has wrong size");
            require(m.next.size() == n * l, Errc::validation, "transition table of the DFA is not total");
            for (auto v : m.next) require(v < n, Errc::validation, "DFA successor out of range");
            break;
        }
        case ModelKind::MetricLTS: {
            require(m.label_metric.size() == l * l, Errc::validation, "label metric has wrong size");
            auto d = [&](std::size_t a, std::size_t b) -> const Rational& { return m.label_metric[a * l + b]; };
            for (std::size_t a = 0; a < l; ++a) {
                require(d(a, a) == 0, Errc::validation, "label metric: nonzero self-distance at \"" + m.labels[a] + "\"");
                for (std::size_t b = 0; b < l; ++b) {
                    require(d(a, b) >= 0 && d(a, b) <= 1, Errc::validation,
                            "label metric: distance outside [0,1] at (" + m.labels[a] + "," + m.labels[b] + ")");
                    if (m.label_metric_symmetric)
                        require(d(a, b) == d(b, a), Errc::validation,
                                "label metric: asymmetric pair (" + m.labels[a] + "," + m.labels[b] + ")");
                    for (std::size_t c = 0; c < l; ++c)
                        require(d(a, c) <= d(a, b) + d(b, c), Errc::validation,
                                "label metric: triangle inequality fails for (" + m.labels[a] + "," + m.labels[b] +
                                    "," + m.labels[c] + ")");
                }
            }
            break;
        }
        case ModelKind::LTS: break;
    }
    if (m.kind != ModelKind::LMC)
        for (const auto& t : m.transitions) require(t.prob == 0, Errc::validation, "probability on a non-LMC transition");
}

namespace {

ModelKind parse_kind(const std::string& s) {
    if (s == "lts") return ModelKind::LTS;
    if (s == "lmc") return ModelKind::LMC;
    if (s == "mlts") return ModelKind::MetricLTS;
    if (s == "nfa") return ModelKind::NFA;
    if (s == "dfa") return ModelKind::DFA;
    fail(Errc::validation, "unknown kind \"" + s + "\"");
}

const json& field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(Errc::validation, std::string("missing field \"") + key + "\"");
    return *it;
}

std::vector<std::string> string_list(const json& j, const char* what) {
    require(j.is_array(), Errc::validation, std::string("\"") + what + "\" must be a list");
    std::vector<std::string> out;
    for (const auto& e : j) {
        require(e.is_string(), Errc::validation, std::string("\"") + what + "\" entries must be strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

Rational rational_field(const json& j, const std::string& where) {
    require(j.is_string(), Errc::validation, where + ": probabilities and distances must be \"p/q\" strings");
    return parse_rational(j.get<std::string>());
}

}  // namespace

Model parse_model(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(Errc::validation, "syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    require(doc.is_object(), Errc::validation, "system document must be an object");
    static const std::vector<std::string> known{"kind",        "states",      "labels", "transitions",
                                                "accepting",   "label_metric", "metric_kind", "next"};
    for (const auto& [key, value] : doc.items())
        require(std::find(known.begin(), known.end(), key) != known.end(), Errc::validation,
                "unknown field \"" + key + "\"");

    Model m;
    const json& kind = field(doc, "kind");
    require(kind.is_string(), Errc::validation, "\"kind\" must be a string");
    m.kind = parse_kind(kind.get<std::string>());
    auto state_names = string_list(field(doc, "states"), "states");
    require(!state_names.empty(), Errc::validation, "empty carrier");
    m.states = make_carrier(std::move(state_names));
    m.labels = doc.contains("labels") ? string_list(doc["labels"], "labels") : std::vector<std::string>{};

    if (doc.contains("transitions")) {
        const json& ts = doc["transitions"];
        require(ts.is_array(), Errc::validation, "\"transitions\" must be a list");
        for (const auto& t : ts) {
            require(t.is_object(), Errc::validation, "transition entries must be objects");
            for (const char* key : {"from", "label", "to"})
                require(field(t, key).is_string(), Errc::validation, std::string("transition \"") + key + "\" must be a string");
            Transition tr{m.state_index(t["from"]), m.label_index(t["label"]), m.state_index(t["to"]), Rational(0)};
            if (t.contains("prob")) {
                require(m.kind == ModelKind::LMC, Errc::validation, "\"prob\" is only allowed in lmc documents");
                tr.prob = rational_field(t["prob"], "transition " + t["from"].get<std::string>());
            } else {
                require(m.kind != ModelKind::LMC, Errc::validation,
                        "lmc transition from \"" + t["from"].get<std::string>() + "\" lacks \"prob\"");
            }
            m.transitions.push_back(std::move(tr));
        }
    }

    const std::size_t n = m.state_count();
    const std::size_t l = m.label_count();
    const bool automaton = m.kind == ModelKind::NFA || m.kind == ModelKind::DFA;
    if (doc.contains("accepting")) {
        require(automaton, Errc::validation, "\"accepting\" is only allowed for nfa and dfa");
        m.accepting.assign(n, 0);
        for (const auto& s : string_list(doc["accepting"], "accepting")) m.accepting[m.state_index(s)] = 1;
    } else if (automaton) {
        m.accepting.assign(n, 0);
    }

    if (m.kind == ModelKind::DFA) {
        m.next.assign(n * l, n);
        if (doc.contains("next")) {
            require(m.transitions.empty(), Errc::validation, "dfa: give either \"next\" or \"transitions\"");
            const json& table = doc["next"];
            require(table.is_object(), Errc::validation, "\"next\" must map states to label tables");
            for (const auto& [from, row] : table.items()) {
                require(row.is_object(), Errc::validation, "\"next\" rows must map labels to states");
                for (const auto& [label, to] : row.items()) {
                    require(to.is_string(), Errc::validation, "\"next\" targets must be state names");
                    m.next[m.state_index(from) * l + m.label_index(label)] = m.state_index(to.get<std::string>());
                }
            }
        } else {
            for (const auto& t : m.transitions) {
                auto& slot = m.next[t.from * l + t.label];
                require(slot == n, Errc::validation,
                        "dfa: two successors for state \"" + m.states->name(t.from) + "\" on \"" + m.labels[t.label] + "\"");
                slot = t.to;
            }
        }
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t a = 0; a < l; ++a)
                require(m.next[x * l + a] < n, Errc::validation,
                        "dfa: no successor for state \"" + m.states->name(x) + "\" on \"" + m.labels[a] + "\"");
        m.transitions.clear();
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t a = 0; a < l; ++a) m.transitions.push_back({x, a, m.next[x * l + a], Rational(0)});
    } else {
        require(!doc.contains("next"), Errc::validation, "\"next\" is only allowed for dfa");
    }

    if (m.kind == ModelKind::MetricLTS) {
        std::string metric_kind = "hemimetric";
        if (doc.contains("metric_kind")) {
            require(doc["metric_kind"].is_string(), Errc::validation, "\"metric_kind\" must be a string");
            metric_kind = doc["metric_kind"].get<std::string>();
        }
        require(metric_kind == "hemimetric" || metric_kind == "pseudometric", Errc::validation,
                "\"metric_kind\" must be \"hemimetric\" or \"pseudometric\"");
        m.label_metric_symmetric = metric_kind == "pseudometric";
        m.label_metric.assign(l * l, Rational(1));
        for (std::size_t a = 0; a < l; ++a) m.label_metric[a * l + a] = 0;
        std::vector<char> given(l * l, 0);
        if (doc.contains("label_metric")) {
            const json& entries = doc["label_metric"];
            require(entries.is_array(), Errc::validation, "\"label_metric\" must be a list");
            for (const auto& e : entries) {
                require(e.is_array() && e.size() == 3 && e[0].is_string() && e[1].is_string(), Errc::validation,
                        "\"label_metric\" entries must be [label, label, \"p/q\"]");
                const std::size_t a = m.label_index(e[0]);
                const std::size_t b = m.label_index(e[1]);
                const Rational v = rational_field(e[2], "label_metric");
                auto set = [&](std::size_t i, std::size_t j) {
                    require(!given[i * l + j] || m.label_metric[i * l + j] == v, Errc::validation,
                            "label metric: conflicting entries for (" + m.labels[i] + "," + m.labels[j] + ")");
                    given[i * l + j] = 1;
                    m.label_metric[i * l + j] = v;
                };
                set(a, b);
                if (m.label_metric_symmetric) set(b, a);
            }
        }
    } else {
        require(!doc.contains("label_metric") && !doc.contains("metric_kind"), Errc::validation,
                "label metrics are only allowed for mlts");
    }

    std::sort(m.transitions.begin(), m.transitions.end(),
              [](const Transition& a, const Transition& b) {
                  return std::tie(a.from, a.label, a.to) < std::tie(b.from, b.label, b.to);
              });
    validate_model(m);
    return m;
}

std::string print_model(const Model& m) {
    json doc = json::object();
    doc["kind"] = model_kind_name(m.kind);
    doc["states"] = m.states->elements();
    doc["labels"] = m.labels;
    const std::size_t l = m.label_count();
    if (m.kind == ModelKind::DFA) {
        json table = json::object();
        for (std::size_t x = 0; x < m.state_count(); ++x) {
            json row = json::object();
            for (std::size_t a = 0; a < l; ++a) row[m.labels[a]] = m.states->name(m.next[x * l + a]);
            table[m.states->name(x)] = row;
        }
        doc["next"] = table;
    } else {
        json ts = json::array();
        for (const auto& t : m.transitions) {
            json e = {{"from", m.states->name(t.from)}, {"label", m.labels[t.label]}, {"to", m.states->name(t.to)}};
            if (m.kind == ModelKind::LMC) e["prob"] = to_string(t.prob);
            ts.push_back(e);
        }
        doc["transitions"] = ts;
    }
    if (m.kind == ModelKind::NFA || m.kind == ModelKind::DFA) {
        json acc = json::array();
        for (std::size_t x = 0; x < m.state_count(); ++x)
            if (m.accepting[x]) acc.push_back(m.states->name(x));
        doc["accepting"] = acc;
    }
    if (m.kind == ModelKind::MetricLTS) {
        doc["metric_kind"] = m.label_metric_symmetric ? "pseudometric" : "hemimetric";
        json entries = json::array();
        for (std::size_t a = 0; a < l; ++a)
            for (std::size_t b = 0; b < l; ++b) {
                if (a == b || m.label_metric[a * l + b] == 1) continue;
                if (m.label_metric_symmetric && b < a) continue;
                entries.push_back({m.labels[a], m.labels[b], to_string(m.label_metric[a * l + b])});
            }
        doc["label_metric"] = entries;
    }
    return doc.dump(2);
}

}  // namespace gce
