#pragma once

#include <stdexcept>
#include <string>

namespace gce {

enum class Errc {
    invalid_argument,
    validation,
    mismatch,
    cap_exceeded,
    incomplete,
    budget_exhausted,
    not_found,
    illegal_move,
    out_of_turn,
    unsupported,
    internal,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
    if (!cond) fail(code, what);
}

}  // namespace gce
