#pragma once

#include "gce/model.hpp"
#include "gce/rational.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <vector>

// Brute-force reference semantics. Nothing here depends on the game solver or the lifting code.
namespace gce::oracle {

using Word = std::vector<std::size_t>;
using StateSet = std::vector<std::size_t>;  // sorted
using WordDistribution = std::map<Word, Rational>;

// Words of length exactly n along paths from some state of S.
std::set<Word> traces_n(const Model& m, const StateSet& s, std::size_t n);
// Accepted words shorter than n (NFA, DFA).
std::set<Word> accepted_shorter_than(const Model& m, const StateSet& s, std::size_t n);
// NFA/DFA: accepted languages; LTS: finite trace sets (S alive means the empty word).
bool language_inclusion(const Model& m, const StateSet& s, const StateSet& t);

WordDistribution trace_distribution(const Model& m, const std::vector<std::pair<std::size_t, Rational>>& start,
                                    std::size_t n);
Rational total_variation(const WordDistribution& a, const WordDistribution& b);

// Block index per state; with `rounds`, the depth-bounded approximant.
std::vector<std::size_t> bisimilarity(const Model& m, std::optional<std::size_t> rounds = std::nullopt);

// Row-major |X| x |X| table of simulation distances; `ready` adds ready-set comparison at each step.
std::vector<Rational> simulation_values(const Model& m, bool ready, std::optional<std::size_t> depth);
// Greatest (ready) simulation under the discrete label reading, as a 0/1 matrix.
std::vector<char> simulation_preorder(const Model& m, bool ready);

}  // namespace gce::oracle
