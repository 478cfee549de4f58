#include "gce/rellogic.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace gce::logic {

bool operator<(const Term& a, const Term& b) {
    if (a.symbol != b.symbol) return a.symbol < b.symbol;
    if (a.variable != b.variable) return a.variable < b.variable;
    return std::lexicographical_compare(a.args.begin(), a.args.end(), b.args.begin(), b.args.end());
}

void Signature::add(Operation op) {
    require(!op.name.empty(), Errc::invalid_argument, "operation without a name");
    require(op.depth <= 1, Errc::invalid_argument, "operation " + op.name + " has depth above 1");
    require(find(op.name) == nullptr, Errc::invalid_argument, "duplicate operation " + op.name);
    ops_.push_back(std::move(op));
}

const Operation* Signature::find(std::string_view name) const {
    for (const auto& op : ops_)
        if (op.name == name) return &op;
    return nullptr;
}

bool Context::has_variable(std::string_view v) const {
    return std::find(variables.begin(), variables.end(), v) != variables.end();
}

bool Context::has_edge(const Atom& a) const { return std::find(edges.begin(), edges.end(), a) != edges.end(); }

const HornAxiom* Theory::find_horn(std::string_view n) const {
    for (const auto& h : horn)
        if (h.name == n) return &h;
    return nullptr;
}

const GradedAxiom* Theory::find_axiom(std::string_view n) const {
    for (const auto& a : axioms)
        if (a.name == n) return &a;
    return nullptr;
}

namespace {

const std::string kLe = "<=";
const std::string kEq = "=";
const std::string kNear = "=~";
const std::string kJoin = "+";
const std::string kBot = "bot";

Term v(const char* name) { return Term::var(name); }
Term join(Term a, Term b) { return Term::op(kJoin, {std::move(a), std::move(b)}); }
Term bot() { return Term::op(kBot); }
Atom le(Term a, Term b) { return Atom{kLe, std::nullopt, {std::move(a), std::move(b)}}; }
Atom eq(Term a, Term b) { return Atom{kEq, std::nullopt, {std::move(a), std::move(b)}}; }
Atom near(Term a, Term b, Rational e) { return Atom{kNear, std::move(e), {std::move(a), std::move(b)}}; }

const Rational& param(const Params& ps, const std::string& name) {
    auto it = ps.find(name);
    require(it != ps.end(), Errc::validation, "missing parameter " + name);
    return it->second;
}

const Rational& weight(const Params& ps, const std::string& name) {
    const Rational& p = param(ps, name);
    require(p >= 0 && p <= 1, Errc::validation, "weight " + name + " outside [0,1]");
    return p;
}

const Rational& bound(const Params& ps, const std::string& name) {
    const Rational& e = param(ps, name);
    require(e >= 0, Errc::validation, "negative bound " + name);
    return e;
}

HornAxiom horn(std::string name, std::vector<std::string> params, std::function<HornInstance(const Params&)> f) {
    return HornAxiom{std::move(name), std::move(params), std::move(f)};
}

HornAxiom horn(std::string name, std::vector<Atom> premises, Atom conclusion) {
    HornInstance inst{std::move(premises), std::move(conclusion)};
    return HornAxiom{std::move(name), {}, [inst](const Params&) { return inst; }};
}

GradedAxiom axiom(std::string name, std::vector<std::string> vars, std::vector<Atom> edges, std::size_t depth,
                  Atom atom) {
    AxiomInstance inst{Context{std::move(vars), std::move(edges)}, depth, std::move(atom)};
    return GradedAxiom{std::move(name), {}, [inst](const Params&) { return inst; }};
}

GradedAxiom axiom(std::string name, std::vector<std::string> params, std::function<AxiomInstance(const Params&)> f) {
    return GradedAxiom{std::move(name), std::move(params), std::move(f)};
}

std::vector<HornAxiom> equality_axioms() {
    return {
        horn("eq.refl", {}, eq(v("x"), v("x"))),
        horn("eq.sym", {eq(v("x"), v("y"))}, eq(v("y"), v("x"))),
        horn("eq.trans", {eq(v("x"), v("y")), eq(v("y"), v("z"))}, eq(v("x"), v("z"))),
    };
}

std::string mix_name(const Rational& p) { return "+[" + to_string(p) + "]"; }
Term mix(const Rational& p, Term a, Term b) { return Term::op(mix_name(p), {std::move(a), std::move(b)}); }

bool infix(const std::string& symbol) { return !symbol.empty() && symbol[0] == '+'; }

}  // namespace

Theory trace_theory(const std::vector<std::string>& actions) {
    Theory th;
    th.name = "trace";
    th.order = kLe;
    th.searchable = true;
    th.signature.add({kJoin, 2, 0});
    th.signature.add({kBot, 0, 0});
    for (const auto& a : actions) th.signature.add({a, 1, 1});

    th.horn = {
        horn("pre.refl", {}, le(v("x"), v("x"))),
        horn("pre.trans", {le(v("x"), v("y")), le(v("y"), v("z"))}, le(v("x"), v("z"))),
    };
    for (auto& h : equality_axioms()) th.horn.push_back(std::move(h));
    th.horn.push_back(horn("eq.le", {eq(v("x"), v("y"))}, le(v("x"), v("y"))));

    const std::vector<std::string> xy{"x", "y"}, xyz{"x", "y", "z"};
    th.axioms = {
        axiom("join.assoc", xyz, {}, 0, eq(join(join(v("x"), v("y")), v("z")), join(v("x"), join(v("y"), v("z"))))),
        axiom("join.comm", xy, {}, 0, eq(join(v("x"), v("y")), join(v("y"), v("x")))),
        axiom("join.idem", {"x"}, {}, 0, eq(join(v("x"), v("x")), v("x"))),
        axiom("join.unit", {"x"}, {}, 0, eq(join(v("x"), bot()), v("x"))),
        axiom("bot.le", {"x"}, {}, 0, le(bot(), v("x"))),
        axiom("join.upper.l", xy, {}, 0, le(v("x"), join(v("x"), v("y")))),
        axiom("join.upper.r", xy, {}, 0, le(v("y"), join(v("x"), v("y")))),
        axiom("join.least", xyz, {le(v("x"), v("z")), le(v("y"), v("z"))}, 0, le(join(v("x"), v("y")), v("z"))),
    };
    for (const auto& a : actions) {
        auto act = [&](Term t) { return Term::op(a, {std::move(t)}); };
        th.axioms.push_back(axiom(a + ".bot", {}, {}, 1, eq(act(bot()), bot())));
        th.axioms.push_back(
            axiom(a + ".join", xy, {}, 1, eq(act(join(v("x"), v("y"))), join(act(v("x")), act(v("y"))))));
    }
    return th;
}

Theory ptrace_theory(const std::vector<std::string>& actions, const std::vector<Rational>& weights) {
    Theory th;
    th.name = "ptrace";
    th.order = kNear;
    std::set<Rational> ws(weights.begin(), weights.end());
    for (const auto& p : ws) {
        require(p >= 0 && p <= 1, Errc::invalid_argument, "weight outside [0,1]");
        th.signature.add({mix_name(p), 2, 0});
    }
    for (const auto& a : actions) th.signature.add({a, 1, 1});

    th.horn = {
        horn("pmet.refl", {}, near(v("x"), v("x"), 0)),
        horn("pmet.sym", {"e"},
             [](const Params& ps) {
                 const Rational& e = bound(ps, "e");
                 return HornInstance{{near(v("x"), v("y"), e)}, near(v("y"), v("x"), e)};
             }),
        horn("pmet.tri", {"e", "d"},
             [](const Params& ps) {
                 const Rational &e = bound(ps, "e"), &d = bound(ps, "d");
                 return HornInstance{{near(v("x"), v("y"), e), near(v("y"), v("z"), d)}, near(v("x"), v("z"), e + d)};
             }),
        horn("pmet.weaken", {"e", "d"},
             [](const Params& ps) {
                 const Rational &e = bound(ps, "e"), &d = bound(ps, "d");
                 return HornInstance{{near(v("x"), v("y"), e)}, near(v("x"), v("y"), e + d)};
             }),
    };
    for (auto& h : equality_axioms()) th.horn.push_back(std::move(h));
    th.horn.push_back(horn("eq.near", {eq(v("x"), v("y"))}, near(v("x"), v("y"), 0)));

    const std::vector<std::string> xy{"x", "y"};
    th.axioms = {
        axiom("bary.one", {},
              [xy](const Params&) {
                  return AxiomInstance{Context{xy, {}}, 0, eq(mix(1, v("x"), v("y")), v("x"))};
              }),
        axiom("bary.idem", {"p"},
              [](const Params& ps) {
                  const Rational& p = weight(ps, "p");
                  return AxiomInstance{Context{{"x"}, {}}, 0, eq(mix(p, v("x"), v("x")), v("x"))};
              }),
        axiom("bary.comm", {"p"},
              [xy](const Params& ps) {
                  const Rational& p = weight(ps, "p");
                  return AxiomInstance{Context{xy, {}}, 0, eq(mix(p, v("x"), v("y")), mix(1 - p, v("y"), v("x")))};
              }),
        axiom("bary.assoc", {"p", "q"},
              [](const Params& ps) {
                  const Rational &p = weight(ps, "p"), &q = weight(ps, "q");
                  const Rational pq = p * q;
                  require(pq != 1, Errc::validation, "bary.assoc needs p*q below 1");
                  const Rational inner = (q - pq) / (1 - pq);
                  return AxiomInstance{Context{{"x", "y", "z"}, {}}, 0,
                                       eq(mix(q, mix(p, v("x"), v("y")), v("z")),
                                          mix(pq, v("x"), mix(inner, v("y"), v("z"))))};
              }),
        axiom("bary.interp", {"p", "e", "d"},
              [](const Params& ps) {
                  const Rational &p = weight(ps, "p"), &e = bound(ps, "e"), &d = bound(ps, "d");
                  return AxiomInstance{Context{{"x", "y", "u", "w"}, {near(v("x"), v("y"), e), near(v("u"), v("w"), d)}},
                                       0,
                                       near(mix(p, v("x"), v("u")), mix(p, v("y"), v("w")), p * e + (1 - p) * d)};
              }),
    };
    for (const auto& a : actions)
        th.axioms.push_back(axiom(a + ".mix", {"p"}, [a, xy](const Params& ps) {
            const Rational& p = weight(ps, "p");
            auto act = [&](Term t) { return Term::op(a, {std::move(t)}); };
            return AxiomInstance{Context{xy, {}}, 1,
                                 eq(act(mix(p, v("x"), v("y"))), mix(p, act(v("x")), act(v("y"))))};
        }));
    return th;
}

std::string rule_name(Rule r) {
    switch (r) {
        case Rule::Mor: return "Mor";
        case Rule::RelAx: return "RelAx";
        case Rule::Ax: return "Ax";
        case Rule::Ctx: return "Ctx";
    }
    return "?";
}

bool has_depth(const Signature& sig, const Term& t, std::size_t k) {
    if (t.variable) return k == 0 && t.args.empty();
    const Operation* op = sig.find(t.symbol);
    if (!op || op->arity != t.args.size() || k < op->depth) return false;
    return std::all_of(t.args.begin(), t.args.end(), [&](const Term& c) { return has_depth(sig, c, k - op->depth); });
}

Term substitute(const Term& t, const Substitution& tau) {
    if (t.variable) {
        auto it = tau.find(t.symbol);
        return it == tau.end() ? t : it->second;
    }
    Term out{t.symbol, false, {}};
    out.args.reserve(t.args.size());
    for (const auto& c : t.args) out.args.push_back(substitute(c, tau));
    return out;
}

Atom substitute(const Atom& a, const Substitution& tau) {
    Atom out{a.relation, a.bound, {}};
    for (const auto& t : a.args) out.args.push_back(substitute(t, tau));
    return out;
}

namespace {

void collect_variables(const Term& t, std::set<std::string>& out) {
    if (t.variable) out.insert(t.symbol);
    for (const auto& c : t.args) collect_variables(c, out);
}

class Checker {
public:
    explicit Checker(const Theory& th) : th_(th) {}

    Judgement run(const ProofNode& root) {
        const Context& ctx = root.conclusion.context;
        std::set<std::string> seen;
        for (const auto& x : ctx.variables)
            if (!seen.insert(x).second) reject(root, "/", "context lists variable " + x + " twice");
        for (const auto& e : ctx.edges) {
            std::string why = atom_problem(e, 0, ctx);
            if (!why.empty()) reject(root, "/", "context edge " + format_atom(e) + ": " + why);
        }
        node(root, "/", ctx);
        return root.conclusion;
    }

    std::string well_formed(const Judgement& j) const {
        for (const auto& e : j.context.edges) {
            std::string why = atom_problem(e, 0, j.context);
            if (!why.empty()) return "context edge " + format_atom(e) + ": " + why;
        }
        return atom_problem(j.atom, j.depth, j.context);
    }

private:
    [[noreturn]] void reject(const ProofNode& n, const std::string& path, const std::string& why) const {
        throw ProofRejected(rule_name(n.rule), why, path);
    }

    std::string term_problem(const Term& t, std::size_t k, const Context& ctx) const {
        if (!has_depth(th_.signature, t, k))
            return "term " + format_term(t) + " is not of uniform depth " + std::to_string(k);
        std::set<std::string> vars;
        collect_variables(t, vars);
        for (const auto& x : vars)
            if (!ctx.has_variable(x)) return "variable " + x + " is not in the context";
        return {};
    }

    std::string atom_problem(const Atom& a, std::size_t k, const Context& ctx) const {
        if (a.relation != kEq && a.relation != th_.order) return "relation " + a.relation + " is not in the theory";
        if ((a.relation == kNear) != a.bound.has_value()) return "bound present exactly on =~ edges";
        if (a.bound && *a.bound < 0) return "negative bound";
        if (a.args.size() != 2) return "relations are binary";
        for (const auto& t : a.args) {
            std::string why = term_problem(t, k, ctx);
            if (!why.empty()) return why;
        }
        return {};
    }

    void check_substitution(const ProofNode& n, const std::string& path, const std::vector<std::string>& vars,
                            std::size_t k, const Context& ctx) const {
        for (const auto& x : vars)
            if (!n.substitution.count(x)) reject(n, path, "substitution misses variable " + x);
        for (const auto& [x, t] : n.substitution) {
            if (std::find(vars.begin(), vars.end(), x) == vars.end())
                reject(n, path, "substitution maps unknown variable " + x);
            std::string why = term_problem(t, k, ctx);
            if (!why.empty()) reject(n, path, "substitution for " + x + ": " + why);
        }
    }

    void expect_premise(const ProofNode& n, const std::string& path, std::size_t i, std::size_t k,
                        const Atom& atom) const {
        const Judgement& j = n.premises[i].conclusion;
        if (j.depth != k || !(j.atom == atom))
            reject(n, path,
                   "premise " + std::to_string(i) + " must be |-" + std::to_string(k) + " " + format_atom(atom));
    }

    void node(const ProofNode& n, const std::string& path, const Context& ctx) {
        const Judgement& j = n.conclusion;
        if (!(j.context == ctx)) reject(n, path, "context differs from the root context");
        if (j.depth > 1) reject(n, path, "depth above 1");
        std::string why = atom_problem(j.atom, j.depth, ctx);
        if (!why.empty()) reject(n, path, "conclusion: " + why);

        switch (n.rule) {
            case Rule::Ctx: {
                if (!n.premises.empty()) reject(n, path, "context rule takes no premises");
                if (j.depth != 0) reject(n, path, "context edges are judgements of depth 0");
                if (!ctx.has_edge(j.atom)) reject(n, path, "edge " + format_atom(j.atom) + " is not in the context");
                break;
            }
            case Rule::Mor: {
                const Operation* op = th_.signature.find(n.operation);
                if (!op) reject(n, path, "unknown operation " + n.operation);
                if (j.depth < op->depth) reject(n, path, "depth below the operation depth");
                const std::size_t k = j.depth - op->depth;
                for (const auto& t : j.atom.args)
                    if (t.variable || t.symbol != op->name)
                        reject(n, path, "every argument must be headed by " + op->name);
                if (n.premises.size() != op->arity)
                    reject(n, path, "expected " + std::to_string(op->arity) + " premises");
                for (std::size_t i = 0; i < op->arity; ++i) {
                    Atom expected{j.atom.relation, j.atom.bound, {}};
                    for (const auto& t : j.atom.args) expected.args.push_back(t.args[i]);
                    expect_premise(n, path, i, k, expected);
                }
                break;
            }
            case Rule::RelAx: {
                const HornAxiom* h = th_.find_horn(n.axiom);
                if (!h) reject(n, path, "unknown Horn axiom " + n.axiom);
                HornInstance inst;
                try {
                    inst = h->instantiate(n.params);
                } catch (const Error& e) {
                    reject(n, path, e.what());
                }
                std::set<std::string> vars;
                for (const auto& a : inst.premises)
                    for (const auto& t : a.args) collect_variables(t, vars);
                for (const auto& t : inst.conclusion.args) collect_variables(t, vars);
                check_substitution(n, path, {vars.begin(), vars.end()}, j.depth, ctx);
                if (n.premises.size() != inst.premises.size())
                    reject(n, path, "expected " + std::to_string(inst.premises.size()) + " premises");
                for (std::size_t i = 0; i < inst.premises.size(); ++i)
                    expect_premise(n, path, i, j.depth, substitute(inst.premises[i], n.substitution));
                if (!(substitute(inst.conclusion, n.substitution) == j.atom))
                    reject(n, path, "conclusion is not the substituted head of " + n.axiom);
                break;
            }
            case Rule::Ax: {
                const GradedAxiom* ax = th_.find_axiom(n.axiom);
                if (!ax) reject(n, path, "unknown axiom " + n.axiom);
                AxiomInstance inst;
                try {
                    inst = ax->instantiate(n.params);
                } catch (const Error& e) {
                    reject(n, path, e.what());
                }
                if (j.depth < inst.depth) reject(n, path, "depth below the axiom depth");
                const std::size_t k = j.depth - inst.depth;
                check_substitution(n, path, inst.context.variables, k, ctx);
                if (n.premises.size() != inst.context.edges.size())
                    reject(n, path, "expected " + std::to_string(inst.context.edges.size()) + " premises");
                for (std::size_t i = 0; i < inst.context.edges.size(); ++i)
                    expect_premise(n, path, i, k, substitute(inst.context.edges[i], n.substitution));
                if (!(substitute(inst.atom, n.substitution) == j.atom))
                    reject(n, path, "conclusion is not the substituted axiom " + n.axiom);
                break;
            }
        }
        for (std::size_t i = 0; i < n.premises.size(); ++i)
            node(n.premises[i], path + std::to_string(i) + "/", ctx);
    }

    const Theory& th_;
};

}  // namespace

Judgement check_proof(const Theory& th, const ProofNode& proof) { return Checker(th).run(proof); }

std::string outcome_name(SearchOutcome o) {
    switch (o) {
        case SearchOutcome::Found: return "found";
        case SearchOutcome::NotFound: return "notFound";
        case SearchOutcome::BudgetExhausted: return "budgetExhausted";
    }
    return "?";
}

namespace {

struct BudgetHit {};

using VarSet = std::set<std::string>;

// Variables of a depth-0 term built from joins, bottom and variables.
std::optional<VarSet> flatten(const Term& t) {
    VarSet out;
    std::vector<const Term*> stack{&t};
    while (!stack.empty()) {
        const Term* s = stack.back();
        stack.pop_back();
        if (s->variable)
            out.insert(s->symbol);
        else if (s->symbol == kJoin && s->args.size() == 2) {
            stack.push_back(&s->args[0]);
            stack.push_back(&s->args[1]);
        } else if (s->symbol != kBot || !s->args.empty())
            return std::nullopt;
    }
    return out;
}

// Non-join leaves of a sum tree, left to right.
void summands(const Term& t, std::vector<const Term*>& out) {
    if (!t.variable && t.symbol == kJoin && t.args.size() == 2) {
        summands(t.args[0], out);
        summands(t.args[1], out);
    } else {
        out.push_back(&t);
    }
}

bool has_summand(const Term& whole, const Term& part) {
    if (whole == part) return true;
    return !whole.variable && whole.symbol == kJoin && whole.args.size() == 2 &&
           (has_summand(whole.args[0], part) || has_summand(whole.args[1], part));
}

// A hypothesis lhs <= rhs read off a context edge.
struct Hypothesis {
    Term lhs;
    Term rhs;
    VarSet lower;
    VarSet upper;
    Atom edge;
    bool reversed;  // derived from an equation read right to left
};

struct Closure {
    VarSet members;
    std::map<std::string, std::size_t> reason;  // variable -> hypothesis that added it
};

class Prover {
public:
    Prover(const Theory& th, const Context& ctx, std::size_t budget) : th_(th), ctx_(ctx), budget_(budget) {
        for (const auto& e : ctx.edges) {
            auto lo = flatten(e.args[0]), up = flatten(e.args[1]);
            if (!lo || !up) continue;
            if (e.relation == kLe) hyps_.push_back({e.args[0], e.args[1], *lo, *up, e, false});
            if (e.relation == kEq) {
                hyps_.push_back({e.args[0], e.args[1], *lo, *up, e, false});
                hyps_.push_back({e.args[1], e.args[0], *up, *lo, e, true});
            }
        }
    }

    std::size_t steps() const { return steps_; }

    std::optional<ProofNode> goal(const Judgement& g) {
        const Term &s = g.atom.args[0], &t = g.atom.args[1];
        if (g.depth == 0 && ctx_.has_edge(g.atom)) return node(Rule::Ctx, 0, g.atom, {});
        if (g.atom.relation == kEq) {
            if (s == t) return relax("eq.refl", g.depth, g.atom, {{"x", s}}, {});
            return std::nullopt;
        }
        return g.depth == 0 ? below0(s, t) : below1(s, t);
    }

private:
    void tick() {
        if (++steps_ > budget_) throw BudgetHit{};
    }

    ProofNode node(Rule r, std::size_t k, Atom atom, std::vector<ProofNode> premises) {
        tick();
        ProofNode n;
        n.rule = r;
        n.conclusion = Judgement{ctx_, k, std::move(atom)};
        n.premises = std::move(premises);
        return n;
    }

    ProofNode relax(const char* name, std::size_t k, Atom atom, Substitution tau, std::vector<ProofNode> premises) {
        ProofNode n = node(Rule::RelAx, k, std::move(atom), std::move(premises));
        n.axiom = name;
        n.substitution = std::move(tau);
        return n;
    }

    ProofNode ax(const std::string& name, std::size_t k, Atom atom, Substitution tau, std::vector<ProofNode> premises) {
        ProofNode n = node(Rule::Ax, k, std::move(atom), std::move(premises));
        n.axiom = name;
        n.substitution = std::move(tau);
        return n;
    }

    ProofNode refl(const Term& s, std::size_t k) { return relax("pre.refl", k, le(s, s), {{"x", s}}, {}); }

    ProofNode trans(const Term& s, const Term& m, const Term& t, std::size_t k, ProofNode first, ProofNode second) {
        std::vector<ProofNode> ps;
        ps.push_back(std::move(first));
        ps.push_back(std::move(second));
        return relax("pre.trans", k, le(s, t), {{"x", s}, {"y", m}, {"z", t}}, std::move(ps));
    }

    // part <= whole where part is one of the summands of whole.
    ProofNode part_of(const Term& part, const Term& whole, std::size_t k) {
        if (part == whole) return refl(part, k);
        const Term &l = whole.args[0], &r = whole.args[1];
        const bool left = has_summand(l, part);
        const Term& side = left ? l : r;
        ProofNode inner = part_of(part, side, k);
        ProofNode upper = ax(left ? "join.upper.l" : "join.upper.r", k, le(side, whole), {{"x", l}, {"y", r}}, {});
        if (part == side) return upper;
        return trans(part, side, whole, k, std::move(inner), std::move(upper));
    }

    const Closure& closure(const VarSet& base) {
        auto it = closures_.find(base);
        if (it != closures_.end()) return it->second;
        Closure c{base, {}};
        for (bool grew = true; grew;) {
            grew = false;
            for (std::size_t i = 0; i < hyps_.size(); ++i) {
                tick();
                const Hypothesis& h = hyps_[i];
                if (!std::includes(c.members.begin(), c.members.end(), h.upper.begin(), h.upper.end())) continue;
                for (const auto& x : h.lower)
                    if (c.members.insert(x).second) {
                        c.reason[x] = i;
                        grew = true;
                    }
            }
        }
        return closures_.emplace(base, std::move(c)).first->second;
    }

    ProofNode hypothesis(std::size_t i) {
        const Hypothesis& h = hyps_[i];
        if (h.edge.relation == kLe) return node(Rule::Ctx, 0, h.edge, {});
        ProofNode e = node(Rule::Ctx, 0, h.edge, {});
        if (h.reversed) {
            std::vector<ProofNode> ps;
            ps.push_back(std::move(e));
            e = relax("eq.sym", 0, eq(h.lhs, h.rhs), {{"x", h.rhs}, {"y", h.lhs}}, std::move(ps));
        }
        std::vector<ProofNode> ps;
        ps.push_back(std::move(e));
        return relax("eq.le", 0, le(h.lhs, h.rhs), {{"x", h.lhs}, {"y", h.rhs}}, std::move(ps));
    }

    std::optional<ProofNode> below0(const Term& s, const Term& t) {
        const auto key = std::make_tuple(std::size_t{0}, s, t);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        std::optional<ProofNode> out = below0_uncached(s, t);
        memo_.emplace(key, out);
        return out;
    }

    std::optional<ProofNode> below0_uncached(const Term& s, const Term& t) {
        if (s == t) return refl(s, 0);
        const Atom goal = le(s, t);
        if (ctx_.has_edge(goal)) return node(Rule::Ctx, 0, goal, {});
        if (!s.variable && s.symbol == kBot && s.args.empty()) return ax("bot.le", 0, goal, {{"x", t}}, {});
        if (!s.variable && s.symbol == kJoin && s.args.size() == 2) {
            auto l = below0(s.args[0], t);
            if (!l) return std::nullopt;
            auto r = below0(s.args[1], t);
            if (!r) return std::nullopt;
            std::vector<ProofNode> ps;
            ps.push_back(std::move(*l));
            ps.push_back(std::move(*r));
            return ax("join.least", 0, goal, {{"x", s.args[0]}, {"y", s.args[1]}, {"z", t}}, std::move(ps));
        }
        if (!s.variable) return std::nullopt;
        auto upper = flatten(t);
        if (!upper) return std::nullopt;
        if (upper->count(s.symbol)) return part_of(s, t, 0);
        const Closure& c = closure(*upper);
        auto why = c.reason.find(s.symbol);
        if (why == c.reason.end()) return std::nullopt;
        const Hypothesis h = hyps_[why->second];
        // s <= lhs <= rhs <= t
        ProofNode into = part_of(s, h.lhs, 0);
        auto rest = below0(h.rhs, t);
        if (!rest) return std::nullopt;
        ProofNode via = h.rhs == t ? hypothesis(why->second)
                                   : trans(h.lhs, h.rhs, t, 0, hypothesis(why->second), std::move(*rest));
        if (s == h.lhs) return via;
        return trans(s, h.lhs, t, 0, std::move(into), std::move(via));
    }

    Term act(const std::string& a, Term t) { return Term::op(a, {std::move(t)}); }

    // a(w_1 + ... + w_r) <= t, where each a(w_i) is a summand of t.
    ProofNode gathered(const std::string& a, const std::vector<const Term*>& ws, std::size_t r, const Term& whole,
                       const Term& t) {
        if (r == 1) return part_of(act(a, *ws[0]), t, 1);
        const Term& prefix = whole.args[0];
        const Term split = join(act(a, prefix), act(a, *ws[r - 1]));
        ProofNode dist = ax(a + ".join", 1, eq(act(a, whole), split), {{"x", prefix}, {"y", *ws[r - 1]}}, {});
        std::vector<ProofNode> ps;
        ps.push_back(std::move(dist));
        ProofNode as_le = relax("eq.le", 1, le(act(a, whole), split), {{"x", act(a, whole)}, {"y", split}}, std::move(ps));
        std::vector<ProofNode> halves;
        halves.push_back(gathered(a, ws, r - 1, prefix, t));
        halves.push_back(part_of(act(a, *ws[r - 1]), t, 1));
        ProofNode least = ax("join.least", 1, le(split, t), {{"x", act(a, prefix)}, {"y", act(a, *ws[r - 1])}, {"z", t}},
                             std::move(halves));
        return trans(act(a, whole), split, t, 1, std::move(as_le), std::move(least));
    }

    std::optional<ProofNode> below1(const Term& s, const Term& t) {
        if (s == t) return refl(s, 1);
        const Atom goal = le(s, t);
        if (!s.variable && s.symbol == kBot && s.args.empty()) return ax("bot.le", 1, goal, {{"x", t}}, {});
        if (!s.variable && s.symbol == kJoin && s.args.size() == 2) {
            auto l = below1(s.args[0], t);
            if (!l) return std::nullopt;
            auto r = below1(s.args[1], t);
            if (!r) return std::nullopt;
            std::vector<ProofNode> ps;
            ps.push_back(std::move(*l));
            ps.push_back(std::move(*r));
            return ax("join.least", 1, goal, {{"x", s.args[0]}, {"y", s.args[1]}, {"z", t}}, std::move(ps));
        }
        const Operation* op = s.variable ? nullptr : th_.signature.find(s.symbol);
        if (!op || op->depth != 1 || op->arity != 1) return std::nullopt;
        const std::string& a = s.symbol;
        const Term& u = s.args[0];

        std::vector<const Term*> parts, ws;
        summands(t, parts);
        for (const Term* p : parts)
            if (!p->variable && p->symbol == a && p->args.size() == 1) ws.push_back(&p->args[0]);

        Term whole = ws.empty() ? bot() : *ws[0];
        for (std::size_t i = 1; i < ws.size(); ++i) whole = join(std::move(whole), *ws[i]);
        auto inner = below0(u, whole);
        if (!inner) return std::nullopt;
        std::vector<ProofNode> ps;
        ps.push_back(std::move(*inner));
        ProofNode mor = node(Rule::Mor, 1, le(s, act(a, whole)), std::move(ps));
        mor.operation = a;
        if (ws.size() == 1 && t == act(a, whole)) return mor;

        ProofNode rest = [&] {
            if (!ws.empty()) return gathered(a, ws, ws.size(), whole, t);
            // a(bot) = bot <= t
            ProofNode strict = ax(a + ".bot", 1, eq(act(a, bot()), bot()), {}, {});
            std::vector<ProofNode> one;
            one.push_back(std::move(strict));
            ProofNode as_le = relax("eq.le", 1, le(act(a, bot()), bot()), {{"x", act(a, bot())}, {"y", bot()}},
                                    std::move(one));
            ProofNode least = ax("bot.le", 1, le(bot(), t), {{"x", t}}, {});
            return trans(act(a, bot()), bot(), t, 1, std::move(as_le), std::move(least));
        }();
        return trans(s, act(a, whole), t, 1, std::move(mor), std::move(rest));
    }

    const Theory& th_;
    const Context& ctx_;
    std::size_t budget_;
    std::size_t steps_ = 0;
    std::vector<Hypothesis> hyps_;
    std::map<VarSet, Closure> closures_;
    std::map<std::tuple<std::size_t, Term, Term>, std::optional<ProofNode>> memo_;
};

void validate_goal(const Theory& th, const Judgement& goal) {
    require(goal.depth <= 1, Errc::invalid_argument, "goals of depth above 1 are out of scope");
    const std::string why = Checker(th).well_formed(goal);
    require(why.empty(), Errc::validation, "malformed goal: " + why);
}

}  // namespace

SearchResult prove(const Theory& th, const Judgement& goal, std::size_t budget) {
    require(th.searchable, Errc::unsupported, "proof search is not available for the " + th.name + " theory");
    validate_goal(th, goal);
    Prover prover(th, goal.context, budget);
    try {
        auto proof = prover.goal(goal);
        if (!proof) return {SearchOutcome::NotFound, std::nullopt, prover.steps()};
        return {SearchOutcome::Found, std::move(proof), prover.steps()};
    } catch (const BudgetHit&) {
        return {SearchOutcome::BudgetExhausted, std::nullopt, prover.steps()};
    }
}

AdmissibilityEncoding encode_admissibility(const DetSystem& det, const Claim& pos, const std::vector<Claim>& z) {
    require(det.semantics == Semantics::TraceInc, Errc::unsupported, "the logic bridge covers the trace instance");
    const Model& m = *det.model;
    auto point_term = [&](std::size_t p) {
        const auto& support = det.points.at(p).support;
        if (support.empty()) return bot();
        Term t = Term::var(m.states->name(support[0]));
        for (std::size_t i = 1; i < support.size(); ++i) t = join(std::move(t), Term::var(m.states->name(support[i])));
        return t;
    };
    auto pair_of = [](const Claim& c) -> std::pair<std::size_t, std::size_t> {
        if (auto p = std::get_if<PairClaim>(&c)) return {p->lhs, p->rhs};
        if (auto n = std::get_if<NearnessClaim>(&c); n && n->targets.size() == 1) return {n->point, n->targets[0]};
        fail(Errc::unsupported, "the logic bridge takes order claims");
    };
    auto behaviour = [&](std::size_t p) {
        require(det.has_step(p), Errc::incomplete, "point " + det.point_name(p) + " has no one-step behaviour");
        const auto& by_label = det.step(p).by_label;
        if (by_label.empty()) return bot();
        Term t = Term::op(m.labels[0], {point_term(by_label[0])});
        for (std::size_t a = 1; a < by_label.size(); ++a)
            t = join(std::move(t), Term::op(m.labels[a], {point_term(by_label[a])}));
        return t;
    };

    AdmissibilityEncoding enc{trace_theory(m.labels), {}};
    enc.goal.context.variables = m.states->elements();
    for (const auto& c : z) {
        auto [l, r] = pair_of(c);
        Atom e = le(point_term(l), point_term(r));
        if (!enc.goal.context.has_edge(e)) enc.goal.context.edges.push_back(std::move(e));
    }
    auto [l, r] = pair_of(pos);
    enc.goal.depth = 1;
    enc.goal.atom = le(behaviour(l), behaviour(r));
    return enc;
}

SearchResult admissible_via_logic(const DetSystem& det, const Claim& pos, const std::vector<Claim>& z,
                                  std::size_t budget) {
    const AdmissibilityEncoding enc = encode_admissibility(det, pos, z);
    return prove(enc.theory, enc.goal, budget);
}

std::string format_term(const Term& t) {
    if (t.variable || t.args.empty()) return t.symbol;
    if (infix(t.symbol) && t.args.size() == 2) {
        auto side = [](const Term& c) {
            std::string s = format_term(c);
            return !c.variable && infix(c.symbol) && c.args.size() == 2 ? "(" + s + ")" : s;
        };
        return side(t.args[0]) + " " + t.symbol + " " + side(t.args[1]);
    }
    std::string out = t.symbol + "(";
    for (std::size_t i = 0; i < t.args.size(); ++i) out += (i ? ", " : "") + format_term(t.args[i]);
    return out + ")";
}

std::string format_atom(const Atom& a) {
    std::string rel = a.relation == kNear ? "=[" + to_string(a.bound.value_or(0)) + "]" : a.relation;
    if (a.args.size() == 2) return format_term(a.args[0]) + " " + rel + " " + format_term(a.args[1]);
    std::string out = rel + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) out += (i ? ", " : "") + format_term(a.args[i]);
    return out + ")";
}

namespace {

std::string format_context(const Context& c) {
    std::string out = "{";
    for (std::size_t i = 0; i < c.variables.size(); ++i) out += (i ? ", " : "") + c.variables[i];
    out += " |";
    for (std::size_t i = 0; i < c.edges.size(); ++i) out += (i ? ", " : " ") + format_atom(c.edges[i]);
    return out + "}";
}

void serialize_node(const ProofNode& n, std::size_t indent, std::ostringstream& out) {
    out << std::string(indent * 2, ' ') << rule_name(n.rule);
    if (!n.operation.empty()) out << ' ' << n.operation;
    if (!n.axiom.empty()) out << ' ' << n.axiom;
    if (!n.substitution.empty()) {
        out << " {";
        bool first = true;
        for (const auto& [x, t] : n.substitution) {
            out << (first ? "" : ", ") << x << " := " << format_term(t);
            first = false;
        }
        out << '}';
    }
    if (!n.params.empty()) {
        out << " [";
        bool first = true;
        for (const auto& [x, r] : n.params) {
            out << (first ? "" : ", ") << x << " = " << to_string(r);
            first = false;
        }
        out << ']';
    }
    out << " |-" << n.conclusion.depth << ' ' << format_atom(n.conclusion.atom) << '\n';
    for (const auto& p : n.premises) serialize_node(p, indent + 1, out);
}

}  // namespace

std::string format_judgement(const Judgement& j) {
    return format_context(j.context) + " |-" + std::to_string(j.depth) + " " + format_atom(j.atom);
}

std::string serialize(const ProofNode& proof) {
    std::ostringstream out;
    out << "context " << format_context(proof.conclusion.context) << '\n';
    serialize_node(proof, 0, out);
    return out.str();
}

namespace {

class Parser {
public:
    Parser(std::string_view text, const Signature& sig) : text_(text), sig_(sig) {}

    Judgement judgement() {
        Judgement j;
        bool explicit_vars = false;
        skip();
        if (peek() == '{') {
            ++pos_;
            skip();
            // Optional "x, y |" variable list before the edges.
            const std::size_t bar = text_.find('|', pos_), close = text_.find('}', pos_);
            if (bar != std::string_view::npos && bar < close && text_.substr(bar, 2) != "|-") {
                explicit_vars = true;
                while (true) {
                    skip();
                    if (peek() == '|') break;
                    j.context.variables.push_back(identifier());
                    skip();
                    if (peek() == ',') ++pos_;
                }
                ++pos_;
            }
            skip();
            if (peek() != '}') {
                while (true) {
                    j.context.edges.push_back(atom());
                    skip();
                    if (peek() == ',') {
                        ++pos_;
                        continue;
                    }
                    break;
                }
            }
            expect('}');
        }
        skip();
        expect('|');
        expect('-');
        if (!std::isdigit(static_cast<unsigned char>(peek()))) error("expected a depth after |-");
        j.depth = static_cast<std::size_t>(peek() - '0');
        ++pos_;
        j.atom = atom();
        skip();
        if (pos_ != text_.size()) error("trailing input");
        if (!explicit_vars) {
            std::set<std::string> vars;
            for (const auto& e : j.context.edges)
                for (const auto& t : e.args) collect_variables(t, vars);
            for (const auto& t : j.atom.args) collect_variables(t, vars);
            j.context.variables.assign(vars.begin(), vars.end());
        }
        return j;
    }

    Term whole_term() {
        Term t = term();
        skip();
        if (pos_ != text_.size()) error("trailing input");
        return t;
    }

private:
    [[noreturn]] void error(const std::string& what) const {
        fail(Errc::validation, "cannot parse judgement at offset " + std::to_string(pos_) + ": " + what);
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    void expect(char c) {
        skip();
        if (peek() != c) error(std::string("expected '") + c + "'");
        ++pos_;
    }

    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '.';
    }

    std::string identifier() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
        if (start == pos_) error("expected an identifier");
        return std::string(text_.substr(start, pos_ - start));
    }

    Rational bracketed() {
        expect('[');
        const std::size_t close = text_.find(']', pos_);
        if (close == std::string_view::npos) error("unterminated bracket");
        Rational r = parse_rational(text_.substr(pos_, close - pos_));
        pos_ = close + 1;
        return r;
    }

    Atom atom() {
        Term lhs = term();
        skip();
        Atom a;
        if (text_.substr(pos_, 2) == "<=") {
            pos_ += 2;
            a.relation = kLe;
        } else if (peek() == '=') {
            ++pos_;
            if (peek() == '[') {
                a.relation = kNear;
                a.bound = bracketed();
            } else {
                a.relation = kEq;
            }
        } else {
            error("expected a relation");
        }
        a.args = {std::move(lhs), term()};
        return a;
    }

    Term term() {
        Term t = application();
        while (true) {
            skip();
            if (peek() != '+') return t;
            ++pos_;
            std::string name = kJoin;
            if (peek() == '[') name = mix_name(bracketed());
            if (!sig_.find(name)) error("unknown operation " + name);
            t = Term::op(name, {std::move(t), application()});
        }
    }

    Term application() {
        skip();
        if (peek() == '(') {
            ++pos_;
            Term t = term();
            expect(')');
            return t;
        }
        std::string name = identifier();
        skip();
        if (peek() == '(') {
            ++pos_;
            const Operation* op = sig_.find(name);
            if (!op) error("unknown operation " + name);
            std::vector<Term> args{term()};
            skip();
            while (peek() == ',') {
                ++pos_;
                args.push_back(term());
                skip();
            }
            expect(')');
            if (args.size() != op->arity) error("wrong arity for " + name);
            return Term::op(std::move(name), std::move(args));
        }
        if (const Operation* op = sig_.find(name); op && op->arity == 0) return Term::op(std::move(name));
        return Term::var(std::move(name));
    }

    std::string_view text_;
    const Signature& sig_;
    std::size_t pos_ = 0;
};

}  // namespace

Judgement parse_judgement(std::string_view text, const Signature& sig) { return Parser(text, sig).judgement(); }

Term parse_term(std::string_view text, const Signature& sig) { return Parser(text, sig).whole_term(); }

}  // namespace gce::logic
