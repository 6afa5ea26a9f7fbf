#pragma once

/**
 * @file collatz.hpp
 * @brief The Collatz relation as a positive existential system, exact
 *        2-adic periodic points from parity vectors, and their reductions.
 *
 * A parity vector fixes the branch taken at each step of a cycle. Along a
 * fixed vector the map is affine, x -> (A x + C) / 2^D, so the periodic
 * point is the unique solution C / (2^D - A). That denominator is odd, hence
 * the point always lies in Zloc/2; it is an integer only sometimes.
 */

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bigint.hpp"
#include "dynamics.hpp"
#include "error.hpp"
#include "formula.hpp"
#include "parser.hpp"
#include "ring.hpp"

namespace ghostring {

enum class CollatzVariant { Raw, Accelerated };

inline std::string to_string(CollatzVariant v) { return v == CollatzVariant::Raw ? "raw" : "acc"; }

inline CollatzVariant parse_variant(const std::string& s) {
    if (s == "raw") return CollatzVariant::Raw;
    if (s == "acc" || s == "accelerated") return CollatzVariant::Accelerated;
    throw Error("unknown variant '" + s + "' (expected raw or acc)");
}

/// Raw: x = 2y and x' = y, or x = 2y+1 and x' = 3(2y+1)+1.
/// Accelerated halves the odd branch: 2x' = 3(2y+1)+1.
inline Formula collatz_tau(CollatzVariant variant = CollatzVariant::Raw) {
    if (variant == CollatzVariant::Raw)
        return parse_formula("exists y. (x = 2*y and x' = y) or (x = 2*y + 1 and x' = 3*(2*y + 1) + 1)");
    return parse_formula("exists y. (x = 2*y and x' = y) or (x = 2*y + 1 and 2*x' = 3*(2*y + 1) + 1)");
}

enum class StateSpace {
    /// sigma = true.
    All,
    /// sigma(x) = exists u,v,w. x*u = (2v-1)(3w-1). Over Z this holds exactly
    /// at the nonzero integers: 0 is never a product of two nonzero factors,
    /// and for x != 0 the odd factor absorbs the 3-part and 3w-1 the 2-part.
    Nonzero
};

inline Formula nonzero_sigma(const std::string& var = "x") {
    return parse_formula("exists u, v, w. " + var + " * u = (2*v - 1) * (3*w - 1)");
}

inline System collatz_system(const Ring& ring, CollatzVariant variant = CollatzVariant::Raw,
                             StateSpace space = StateSpace::All) {
    Formula sigma = space == StateSpace::All ? Formula::truth() : nonzero_sigma();
    return System(ring, sigma, collatz_tau(variant), {"x"}, {"x'"});
}

/// Bits of one period: 1 = odd step, 0 = even step.
struct ParityVector {
    std::vector<int> bits;
    CollatzVariant variant = CollatzVariant::Raw;

    std::size_t length() const noexcept { return bits.size(); }
    std::size_t ones() const noexcept { return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1)); }

    std::string to_string() const {
        std::string s;
        for (int b : bits) s += b ? '1' : '0';
        return s;
    }

    /// Raw vectors may not have two cyclically adjacent 1s: 3x+1 is even for
    /// odd x. For length 1 that rules out "1" itself.
    bool admissible() const {
        if (bits.empty()) return false;
        if (variant == CollatzVariant::Accelerated) return true;
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (bits[i] && bits[(i + 1) % bits.size()]) return false;
        return true;
    }

    ParityVector rotated(std::size_t r) const {
        ParityVector out{{}, variant};
        for (std::size_t i = 0; i < bits.size(); ++i) out.bits.push_back(bits[(r + i) % bits.size()]);
        return out;
    }

    /// Lexicographically least rotation: the deduplication key.
    ParityVector least_rotation() const {
        ParityVector best = *this;
        for (std::size_t r = 1; r < bits.size(); ++r)
            if (ParityVector c = rotated(r); c.bits < best.bits) best = std::move(c);
        return best;
    }

    /// Lexicographically greatest rotation: starts on an odd step whenever
    /// there is one (100, 10100, 101000), the conventional way to quote a cycle.
    ParityVector greatest_rotation() const {
        ParityVector best = *this;
        for (std::size_t r = 1; r < bits.size(); ++r)
            if (ParityVector c = rotated(r); c.bits > best.bits) best = std::move(c);
        return best;
    }

    /// True unless the vector repeats a shorter block.
    bool primitive() const {
        for (std::size_t d = 1; d < bits.size(); ++d)
            if (bits.size() % d == 0 && rotated(d).bits == bits) return false;
        return true;
    }

    friend bool operator==(const ParityVector&, const ParityVector&) = default;
};

inline ParityVector parse_parity_vector(const std::string& text, CollatzVariant variant = CollatzVariant::Raw) {
    if (text.empty()) throw Error("empty parity vector");
    ParityVector v{{}, variant};
    for (char c : text) {
        if (c != '0' && c != '1') throw Error("parity vector '" + text + "' must contain only 0 and 1");
        v.bits.push_back(c - '0');
    }
    return v;
}

/// Every admissible vector of length k in lexicographic order.
inline std::vector<ParityVector> admissible_parity_vectors(std::size_t k, CollatzVariant variant) {
    if (k == 0) throw Error("parity vectors have length at least 1");
    if (k > 30) throw Error("parity vector length above 30 is not enumerated");
    std::vector<ParityVector> out;
    for (unsigned long mask = 0; mask < (1UL << k); ++mask) {
        ParityVector v{std::vector<int>(k), variant};
        for (std::size_t i = 0; i < k; ++i) v.bits[i] = (mask >> (k - 1 - i)) & 1;
        if (v.admissible()) out.push_back(std::move(v));
    }
    return out;
}

/// k steps along a fixed vector send x to (A x + C) / 2^D.
struct AffineComposite {
    Int A = 1;
    Int C = 0;
    unsigned long D = 0;
};

inline AffineComposite affine_composite(const ParityVector& v) {
    if (!v.admissible()) throw Error("inadmissible parity vector " + v.to_string());
    AffineComposite f;
    for (int b : v.bits) {
        if (b == 0) {
            ++f.D;
            continue;
        }
        f.A *= 3;
        f.C = 3 * f.C + pow_int(2, f.D);
        if (v.variant == CollatzVariant::Accelerated) ++f.D;
    }
    return f;
}

/// One exact step of the map on a Zloc/2 element; the branch is the parity
/// of the numerator.
inline Element collatz_step(const Element& x, CollatzVariant variant) {
    if (x.ring().kind() != Ring::Kind::Local || x.ring().prime() != 2)
        throw Error("exact Collatz steps need an element of Zloc/2");
    auto halve = [](const Element& e) {
        return Element::fraction(e.ring(), Int(e.numerator() / 2), e.denominator());
    };
    if (mod_floor(x.numerator(), 2) == 0) return halve(x);
    Element t = Element::from_int(x.ring(), 3) * x + Element::one(x.ring());
    return variant == CollatzVariant::Raw ? t : halve(t);
}

inline int parity(const Element& x) { return mod_floor(x.numerator(), 2) == 0 ? 0 : 1; }

enum class CycleKind { IntegerCycle, GhostCycle };

inline std::string to_string(CycleKind k) { return k == CycleKind::IntegerCycle ? "IntegerCycle" : "GhostCycle"; }

struct PeriodicPoint {
    Element value;
    ParityVector vector;
    std::vector<Element> orbit;
    CycleKind kind;
};

struct Rejection {
    enum class Reason { Inadmissible, ZeroDenominator, EvenDenominator, ParityInconsistent };
    Reason reason;
    ParityVector vector;
    /// ParityInconsistent: the first orbit index whose parity disagrees.
    std::size_t index = 0;
    std::string detail;
};

inline std::string to_string(Rejection::Reason r) {
    switch (r) {
    case Rejection::Reason::Inadmissible: return "Inadmissible";
    case Rejection::Reason::ZeroDenominator: return "ZeroDenominator";
    case Rejection::Reason::EvenDenominator: return "EvenDenominator";
    case Rejection::Reason::ParityInconsistent: return "ParityInconsistent";
    }
    return {};
}

using CycleOutcome = std::variant<PeriodicPoint, Rejection>;

inline CycleOutcome cycle_from_parity_vector(const ParityVector& v) {
    if (!v.admissible()) return Rejection{Rejection::Reason::Inadmissible, v, 0, "vector " + v.to_string() + " is not admissible"};
    AffineComposite f = affine_composite(v);
    Int den = pow_int(2, f.D) - f.A;
    if (den == 0) return Rejection{Rejection::Reason::ZeroDenominator, v, 0, "2^D - A = 0"};
    if (mod_floor(den, 2) == 0)
        return Rejection{Rejection::Reason::EvenDenominator, v, 0,
                         "2^D - A = " + ghostring::to_string(den) + " is even, so the point is not 2-local"};
    Ring z2 = Ring::local(2);
    Element x = Element::fraction(z2, f.C, den);
    PeriodicPoint p{x, v, {}, x.denominator() == 1 ? CycleKind::IntegerCycle : CycleKind::GhostCycle};
    Element cur = x;
    for (std::size_t i = 0; i < v.bits.size(); ++i) {
        if (parity(cur) != v.bits[i])
            return Rejection{Rejection::Reason::ParityInconsistent, v, i,
                             "orbit element " + std::to_string(i) + " = " + cur.to_string() + " has parity " +
                                 std::to_string(parity(cur)) + ", vector says " + std::to_string(v.bits[i])};
        p.orbit.push_back(cur);
        cur = collatz_step(cur, v.variant);
    }
    if (!(cur == x)) throw Error("internal: exact iteration of " + v.to_string() + " did not close up");
    return p;
}

/// One rotation class of admissible vectors.
struct CensusEntry {
    /// Greatest rotation of the class (the least one is the dedup key).
    ParityVector vector;
    bool primitive = true;
    CycleOutcome outcome;
};

struct CensusRow {
    std::size_t k = 0;
    /// Admissible vectors of length k, before rotation dedup.
    std::size_t admissible = 0;
    /// Primitive rotation classes.
    std::size_t classes = 0;
    std::size_t integer_cycles = 0;
    std::size_t ghost_cycles = 0;
    std::size_t rejections = 0;
    /// Classes repeating a shorter vector; they retrace a shorter cycle and
    /// are listed but not counted above.
    std::size_t repeats = 0;
    std::vector<CensusEntry> entries;
};

inline std::vector<CensusRow> ghost_census(std::size_t k_max, CollatzVariant variant = CollatzVariant::Raw) {
    if (k_max == 0) throw Error("k_max must be at least 1");
    std::vector<CensusRow> rows;
    for (std::size_t k = 1; k <= k_max; ++k) {
        CensusRow row;
        row.k = k;
        std::vector<ParityVector> all = admissible_parity_vectors(k, variant);
        row.admissible = all.size();
        std::set<std::vector<int>> seen;
        for (const auto& v : all) {
            if (!seen.insert(v.least_rotation().bits).second) continue;
            ParityVector rep = v.greatest_rotation();
            CensusEntry e{rep, rep.primitive(), cycle_from_parity_vector(rep)};
            if (!e.primitive) {
                ++row.repeats;
            } else if (const auto* p = std::get_if<PeriodicPoint>(&e.outcome)) {
                ++row.classes;
                ++(p->kind == CycleKind::GhostCycle ? row.ghost_cycles : row.integer_cycles);
            } else {
                ++row.classes;
                ++row.rejections;
            }
            row.entries.push_back(std::move(e));
        }
        std::sort(row.entries.begin(), row.entries.end(),
                  [](const CensusEntry& a, const CensusEntry& b) { return a.vector.bits < b.vector.bits; });
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Reduces the orbit into Z/2^N and checks it is a cycle of the relation
/// there.
inline CycleWitness bridge_to_quotient(const PeriodicPoint& p, unsigned long n) {
    if (n == 0) throw Error("precision must be positive");
    if (n > 64) throw Error("precision above 64 is not supported");
    Ring quotient = Ring::mod(pow_int(2, n));
    CycleWitness c{quotient, {}};
    for (const auto& x : p.orbit) c.states.push_back({coherent_reduce(x, n)});
    if (!verify_cycle(collatz_system(quotient, p.vector.variant), c))
        throw Error("internal: reduction of " + p.vector.to_string() + " mod 2^" + std::to_string(n) +
                    " is not a cycle");
    return c;
}

/// How a simple cycle of the quotient relation relates to exact periodic
/// points.
struct QuotientCycleClass {
    CycleWitness cycle;
    /// Vector of a periodic point whose reduction is this cycle, if any.
    std::optional<ParityVector> source;
};

/// find_cycles over Z/2^N, each cycle matched against reductions of the
/// periodic points of every admissible vector of length <= k_max. Unmatched
/// cycles exist only in the quotient.
inline std::vector<QuotientCycleClass> classify_quotient_cycles(unsigned long n, std::size_t k_max,
                                                                CollatzVariant variant = CollatzVariant::Raw) {
    Ring quotient = Ring::mod(pow_int(2, n));
    std::map<std::vector<State>, ParityVector> reductions;
    for (std::size_t k = 1; k <= k_max; ++k)
        for (const auto& v : admissible_parity_vectors(k, variant)) {
            CycleOutcome outcome = cycle_from_parity_vector(v);
            if (const auto* p = std::get_if<PeriodicPoint>(&outcome))
                reductions.emplace(bridge_to_quotient(*p, n).canonical().states, v.greatest_rotation());
        }
    std::vector<QuotientCycleClass> out;
    for (auto& c : find_cycles(collatz_system(quotient, variant), k_max)) {
        QuotientCycleClass q{c, std::nullopt};
        if (auto it = reductions.find(c.canonical().states); it != reductions.end()) q.source = it->second;
        out.push_back(std::move(q));
    }
    return out;
}

} // namespace ghostring
