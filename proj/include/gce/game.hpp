#pragma once

#include "gce/conformance.hpp"
#include "gce/graded.hpp"
#include "gce/rational.hpp"
#include "gce/refinement.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gce {

// Square 0/1 matrix over carrier points, row-major.
using Region = std::vector<char>;

struct Admissibility {
    bool admissible;
    Rational distance;        // lifted distance (quantitative) or 0/1
    std::string explanation;  // empty when admissible
};

struct GameStatistics {
    std::size_t positions = 0;
    std::size_t iterations = 0;
    std::vector<std::size_t> closure_sizes;  // related pairs in each generated refinement
};

struct GameReport {
    Semantics semantics;
    std::optional<std::size_t> rounds;  // nullopt: infinite game
    std::size_t points = 0;
    // Finite game: W_0 .. W_n. Infinite game: the descending iterates, the last one stable.
    std::vector<Region> levels;
    GameStatistics statistics;

    const Region& region() const { return levels.back(); }
    bool won(std::size_t lhs, std::size_t rhs) const { return region()[lhs * points + rhs] != 0; }
    bool won_at(std::size_t level, std::size_t lhs, std::size_t rhs) const {
        return levels.at(level)[lhs * points + rhs] != 0;
    }
    // Level the solver uses for the Duplicator's claims when `left` rounds remain.
    const Region& target(std::optional<std::size_t> left) const;
};

struct ValueReport {
    Semantics semantics;
    std::optional<std::size_t> depth;
    std::size_t points = 0;
    std::vector<std::vector<Rational>> levels;  // v_0 .. v_n, or the iterates up to the fixpoint
    std::vector<char> defined;                  // per pair: value meaningful on a depth-limited carrier
    GameStatistics statistics;

    const std::vector<Rational>& values() const { return levels.back(); }
    const Rational& value(std::size_t lhs, std::size_t rhs) const { return values()[lhs * points + rhs]; }
    const Rational& value_at(std::size_t level, std::size_t lhs, std::size_t rhs) const {
        return levels.at(level)[lhs * points + rhs];
    }
    const std::vector<Rational>& target(std::optional<std::size_t> left) const;
};

class Game {
public:
    explicit Game(std::shared_ptr<const DetSystem> det);

    const DetSystem& det() const noexcept { return *det_; }
    const std::shared_ptr<const DetSystem>& det_ptr() const noexcept { return det_; }
    const AlgebraDescriptor& algebra() const noexcept { return alg_; }
    bool quantitative() const;

    // Positions are pair claims (qualitative) or bounded claims (quantitative); single-target
    // nearness claims are read as pairs.
    Claim position(const Claim& c) const;
    void check_claim(const Claim& c) const;

    bool bluff_check(const Claim& pos) const;
    Admissibility admissible(const Claim& pos, const std::vector<Claim>& z) const;

    GameReport winning_region_n(std::size_t n) const;
    GameReport winning_region_inf() const;
    // Exhaustive move search over all subsets of the non-reflexive part of W_k; small carriers only.
    GameReport winning_region_exhaustive(std::size_t n) const;
    ValueReport value_table(std::optional<std::size_t> depth) const;

    // Duplicator: per-successor claims drawn from the target level, or the whole level if those fail.
    std::vector<Claim> duplicator_move(const GameReport& report, const Claim& pos, std::optional<std::size_t> left) const;
    std::vector<Claim> duplicator_move(const ValueReport& report, const Claim& pos, std::optional<std::size_t> left) const;
    // Spoiler: some claim of z outside the target level.
    std::optional<Claim> spoiler_pick(const GameReport& report, const std::vector<Claim>& z,
                                      std::optional<std::size_t> left) const;
    std::optional<Claim> spoiler_pick(const ValueReport& report, const std::vector<Claim>& z,
                                      std::optional<std::size_t> left) const;
    // Labels spelled by the Spoiler strategy from a losing pair, down to a failing acceptance or bluff check.
    std::optional<Word> distinguishing_word(const GameReport& report, std::size_t lhs, std::size_t rhs) const;

    Conformance claims_conformance(const std::vector<Claim>& z) const;
    Conformance region_conformance(const Region& r) const;
    Conformance value_conformance(const std::vector<Rational>& v) const;
    std::string format_claim(const Claim& c) const;

private:
    Region bluff_region() const;
    Region step_region(const Region& ground, bool restrict_to_ground, GameStatistics& stats) const;
    void require_steps() const;

    std::shared_ptr<const DetSystem> det_;
    AlgebraDescriptor alg_;
};

enum class Role { Spoiler, Duplicator };
enum class SessionStatus { Ongoing, DuplicatorWins, SpoilerWins };

std::string role_name(Role r);
std::string status_name(SessionStatus s);

struct SessionEvent {
    std::size_t round;
    Role actor;
    bool engine;
    std::vector<Claim> claims;  // Duplicator: the played set; Spoiler: the single pick
    std::string note;
};

struct SessionReply {
    bool accepted;
    std::string explanation;
    std::vector<SessionEvent> engine_events;
};

class Session {
public:
    Session(std::shared_ptr<const Game> game, const Claim& start, Role human, std::optional<std::size_t> rounds);

    SessionReply play_duplicator(std::vector<Claim> z);
    SessionReply play_spoiler(const Claim& pick);

    const Game& game() const { return *game_; }
    const Claim& position() const noexcept { return position_; }
    const std::vector<Claim>& pending() const noexcept { return pending_; }
    SessionStatus status() const noexcept { return status_; }
    Role human() const noexcept { return human_; }
    Role to_move() const noexcept { return to_move_; }
    std::size_t round() const noexcept { return round_; }
    std::optional<std::size_t> rounds() const noexcept { return rounds_; }
    const std::vector<SessionEvent>& history() const noexcept { return history_; }
    const std::string& explanation() const noexcept { return explanation_; }
    // Claims the human may pick (Spoiler) or that are worth claiming (Duplicator).
    std::vector<Claim> legal_moves() const;

private:
    std::optional<std::size_t> left() const;
    bool position_won() const;
    void begin_round(std::vector<SessionEvent>& events);
    void engine_duplicator(std::vector<SessionEvent>& events);
    void engine_spoiler(std::vector<SessionEvent>& events);
    void accept_pick(const Claim& pick, bool engine, std::vector<SessionEvent>& events);
    void finish(SessionStatus s, std::string why);

    std::shared_ptr<const Game> game_;
    std::optional<GameReport> report_;
    std::optional<ValueReport> values_;
    Claim position_;
    Role human_;
    Role to_move_ = Role::Duplicator;
    std::optional<std::size_t> rounds_;
    std::size_t round_ = 0;
    std::vector<Claim> pending_;
    SessionStatus status_ = SessionStatus::Ongoing;
    std::string explanation_;
    std::vector<SessionEvent> history_;
};

}  // namespace gce
