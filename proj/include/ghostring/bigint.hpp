#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "error.hpp"

namespace ghostring {

using Int = mpz_class;

inline Int parse_int(std::string_view text) {
    std::string s(text);
    if (!s.empty() && s.front() == '+') s.erase(0, 1);
    if (s.empty()) throw Error("empty integer");
    std::size_t i = (s.front() == '-') ? 1 : 0;
    if (i == s.size()) throw Error("malformed integer '" + s + "'");
    for (; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9') throw Error("malformed integer '" + s + "'");
    return Int(s, 10);
}

inline std::string to_string(const Int& v) { return v.get_str(10); }

inline Int gcd(const Int& a, const Int& b) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

/// Floor-style residue in [0, m).
inline Int mod_floor(const Int& a, const Int& m) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline bool divides(const Int& d, const Int& a) {
    return mpz_divisible_p(a.get_mpz_t(), d.get_mpz_t()) != 0;
}

/// Inverse of a modulo m, or false when gcd(a, m) != 1.
inline bool mod_inverse(const Int& a, const Int& m, Int& out) {
    return mpz_invert(out.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) != 0;
}

inline Int pow_int(const Int& base, unsigned long exp) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
    return r;
}

inline bool is_prime(const Int& p) {
    return p >= 2 && mpz_probab_prime_p(p.get_mpz_t(), 50) > 0;
}

/// Exponent of the prime p in a nonzero integer.
inline unsigned long valuation(const Int& a, const Int& p) {
    if (a == 0) return ~0UL;
    Int rest;
    return mpz_remove(rest.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t());
}

} // namespace ghostring
