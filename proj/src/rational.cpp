#include "gce/rational.hpp"

#include "gce/error.hpp"

#include <cctype>

namespace gce {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && body.front() == '-') {
        negative = true;
        body.remove_prefix(1);
    }
    auto slash = body.find('/');
    std::string_view num = body.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
        fail(Errc::validation, "not an exact rational \"" + std::string(text) + "\" (expected p/q)");
    mpz_class n(std::string(num), 10);
    mpz_class d(std::string(den), 10);
    if (d == 0) fail(Errc::validation, "zero denominator in \"" + std::string(text) + "\"");
    Rational r(n, d);
    r.canonicalize();
    return negative ? Rational(-r) : r;
}

std::string to_string(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

}  // namespace gce
