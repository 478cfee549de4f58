#pragma once

#include "gce/conformance.hpp"
#include "gce/error.hpp"
#include "gce/graded.hpp"
#include "gce/rational.hpp"

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gce::logic {

struct Term {
    std::string symbol;
    bool variable = false;
    std::vector<Term> args;

    static Term var(std::string name) { return Term{std::move(name), true, {}}; }
    static Term op(std::string name, std::vector<Term> args = {}) { return Term{std::move(name), false, std::move(args)}; }

    friend bool operator==(const Term& a, const Term& b) = default;
    friend bool operator<(const Term& a, const Term& b);
};

struct Operation {
    std::string name;
    std::size_t arity;
    std::size_t depth;  // 0 or 1
};

class Signature {
public:
    void add(Operation op);
    const Operation* find(std::string_view name) const;
    const std::vector<Operation>& operations() const noexcept { return ops_; }

private:
    std::vector<Operation> ops_;
};

// Relations: "<=" (preorders), "=" (equality), "=~" with a bound (pseudometrics).
struct Atom {
    std::string relation;
    std::optional<Rational> bound;
    std::vector<Term> args;

    friend bool operator==(const Atom& a, const Atom& b) = default;
};

// Variables plus hypothesis edges; edges may relate depth-0 terms, not only variables.
struct Context {
    std::vector<std::string> variables;
    std::vector<Atom> edges;

    bool has_variable(std::string_view v) const;
    bool has_edge(const Atom& a) const;
    friend bool operator==(const Context& a, const Context& b) = default;
};

struct Judgement {
    Context context;
    std::size_t depth = 0;
    Atom atom;

    friend bool operator==(const Judgement& a, const Judgement& b) = default;
};

using Params = std::map<std::string, Rational>;
using Substitution = std::map<std::string, Term>;

struct HornInstance {
    std::vector<Atom> premises;
    Atom conclusion;
};

struct HornAxiom {
    std::string name;
    std::vector<std::string> parameters;
    std::function<HornInstance(const Params&)> instantiate;
};

struct AxiomInstance {
    Context context;  // the axiom's own context Y
    std::size_t depth;
    Atom atom;
};

struct GradedAxiom {
    std::string name;
    std::vector<std::string> parameters;
    std::function<AxiomInstance(const Params&)> instantiate;
};

struct Theory {
    std::string name;
    Signature signature;
    std::string order;  // "<=" or "=~"
    std::vector<HornAxiom> horn;
    std::vector<GradedAxiom> axioms;
    bool searchable = false;

    const HornAxiom* find_horn(std::string_view n) const;
    const GradedAxiom* find_axiom(std::string_view n) const;
};

// Join semilattice with bottom plus unary depth-1 actions distributing over joins.
Theory trace_theory(const std::vector<std::string>& actions);
// Barycentric operations "+[p]" for the given weights plus depth-1 actions distributing over them.
Theory ptrace_theory(const std::vector<std::string>& actions, const std::vector<Rational>& weights);

enum class Rule { Mor, RelAx, Ax, Ctx };
std::string rule_name(Rule r);

struct ProofNode {
    Rule rule;
    Judgement conclusion;
    std::vector<ProofNode> premises;
    std::string axiom;  // RelAx, Ax
    Substitution substitution;
    Params params;
    std::string operation;  // Mor
};

class ProofRejected : public Error {
public:
    ProofRejected(std::string rule, std::string condition, std::string path)
        : Error(Errc::validation, "proof rejected at " + path + " (" + rule + "): " + condition),
          rule_(std::move(rule)), condition_(std::move(condition)), path_(std::move(path)) {}

    const std::string& rule() const noexcept { return rule_; }
    const std::string& condition() const noexcept { return condition_; }
    const std::string& path() const noexcept { return path_; }

private:
    std::string rule_;
    std::string condition_;
    std::string path_;
};

bool has_depth(const Signature& sig, const Term& t, std::size_t k);
Term substitute(const Term& t, const Substitution& tau);
Atom substitute(const Atom& a, const Substitution& tau);

// Verifies every node; returns the root conclusion or throws ProofRejected.
Judgement check_proof(const Theory& th, const ProofNode& proof);

enum class SearchOutcome { Found, NotFound, BudgetExhausted };
std::string outcome_name(SearchOutcome o);

struct SearchResult {
    SearchOutcome outcome;
    std::optional<ProofNode> proof;
    std::size_t steps = 0;
};

// Goal-directed search for inequations of depth 0 or 1 in a searchable theory.
SearchResult prove(const Theory& th, const Judgement& goal, std::size_t budget);

// Admissibility of a move as a provability question over the state variables.
struct AdmissibilityEncoding {
    Theory theory;
    Judgement goal;
};
AdmissibilityEncoding encode_admissibility(const DetSystem& det, const Claim& pos, const std::vector<Claim>& z);
SearchResult admissible_via_logic(const DetSystem& det, const Claim& pos, const std::vector<Claim>& z,
                                  std::size_t budget);

std::string format_term(const Term& t);
std::string format_atom(const Atom& a);
std::string format_judgement(const Judgement& j);
// Stable indented tree: one node per line, rule, witnesses and conclusion.
std::string serialize(const ProofNode& proof);

// "{x <= y} |-1 a(x) <= a(y) + a(z)"; identifiers applied to arguments or named as constants of the
// signature are operations, everything else is a variable.
Judgement parse_judgement(std::string_view text, const Signature& sig);
Term parse_term(std::string_view text, const Signature& sig);

}  // namespace gce::logic
