#pragma once

// Seeded generators for property tests. Only the raw 64-bit engine output is
// used (never std distributions), so sequences match across standard
// libraries.

#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bigint.hpp"
#include "formula.hpp"
#include "ring.hpp"
#include "semantics.hpp"

namespace ghostring {

/// Builds n with O(log |n|) nodes: binary Horner form over 1 + 1.
inline Term compact_literal(const Int& n) {
    if (n == 0) return Term::zero();
    Int m = abs(n);
    std::string bits = m.get_str(2);
    Term two = Term::add(Term::one(), Term::one());
    Term t = Term::one();
    for (std::size_t i = 1; i < bits.size(); ++i) {
        t = Term::mul(two, t);
        if (bits[i] == '1') t = Term::add(t, Term::one());
    }
    return n < 0 ? Term::neg(t) : t;
}

namespace detail {

class FormulaGen {
public:
    FormulaGen(std::uint64_t seed, std::size_t size_limit) : rng_(seed), budget_(size_limit) {}

    std::uint64_t below(std::uint64_t n) { return rng_() % n; }

    Term term(const std::vector<std::string>& vars, int depth) {
        std::uint64_t pick = depth >= 4 ? below(3) : below(7);
        switch (pick) {
        case 0: return Term::zero();
        case 1: return Term::one();
        case 2: return Term::var(vars[below(vars.size())]);
        case 3: return Term::neg(term(vars, depth + 1));
        case 4:
        case 5: return Term::add(term(vars, depth + 1), term(vars, depth + 1));
        default: return Term::mul(term(vars, depth + 1), term(vars, depth + 1));
        }
    }

    Formula formula(std::vector<std::string> vars, int depth) {
        std::uint64_t pick = depth >= 3 || budget_ < 4 ? 0 : below(4);
        if (budget_ > 0) --budget_;
        switch (pick) {
        case 1:
        case 2: {
            std::vector<Formula> cs;
            std::size_t n = 2 + below(2);
            for (std::size_t i = 0; i < n; ++i) cs.push_back(formula(vars, depth + 1));
            return pick == 1 ? Formula::conj(std::move(cs)) : Formula::disj(std::move(cs));
        }
        case 3: {
            std::vector<std::string> bound;
            std::size_t n = 1 + below(2);
            for (std::size_t i = 0; i < n; ++i) bound.push_back("y" + std::to_string(++binders_));
            vars.insert(vars.end(), bound.begin(), bound.end());
            return Formula::exists(bound, formula(vars, depth + 1));
        }
        default: return Formula::eq(term(vars, 0), term(vars, 0));
        }
    }

private:
    std::mt19937_64 rng_;
    std::size_t budget_;
    std::size_t binders_ = 0;
};

} // namespace detail

/// A random Σ₁⁺ formula in free variables x and z. Binder names are unique
/// (y1, y2, ...), terms have depth at most 4, and the number of connective
/// and quantifier nodes stays near size_limit.
inline Formula random_formula(std::uint64_t seed, std::size_t size_limit = 8) {
    return detail::FormulaGen(seed, size_limit).formula({"x", "z"}, 0);
}

/// A formula together with an integer assignment satisfying it.
struct TrueInstance {
    Formula formula;
    /// Values for x, z and every bound variable.
    Assignment witness;
};

namespace detail {

inline Formula make_true(const Formula& f, const Assignment& a, FormulaGen& gen, bool must_hold) {
    switch (f.kind()) {
    case Formula::Kind::Eq: {
        if (!must_hold) return f;
        // s = t becomes s = t + (s(a) - t(a)).
        Int gap = (eval_term(Ring::integers(), f.lhs(), a) - eval_term(Ring::integers(), f.rhs(), a)).value();
        return gap == 0 ? f : Formula::eq(f.lhs(), Term::add(f.rhs(), compact_literal(gap)));
    }
    case Formula::Kind::Exists: return Formula::exists(f.bound(), make_true(f.body(), a, gen, must_hold));
    case Formula::Kind::And: {
        std::vector<Formula> cs;
        for (const auto& c : f.children()) cs.push_back(make_true(c, a, gen, must_hold));
        return Formula::conj(std::move(cs));
    }
    case Formula::Kind::Or: {
        // One branch is made true; the others stay as generated.
        std::size_t chosen = gen.below(f.children().size());
        std::vector<Formula> cs;
        for (std::size_t i = 0; i < f.children().size(); ++i)
            cs.push_back(make_true(f.children()[i], a, gen, must_hold && i == chosen));
        return Formula::disj(std::move(cs));
    }
    }
    return f;
}

} // namespace detail

/// A random formula made true over Z at a random assignment with entries in
/// [-value_bound, value_bound].
inline TrueInstance random_true_instance(std::uint64_t seed, std::size_t size_limit = 8, long value_bound = 20) {
    detail::FormulaGen gen(seed, size_limit);
    Formula f = gen.formula({"x", "z"}, 0);
    Assignment a;
    auto draw = [&](const std::string& name) {
        long v = static_cast<long>(gen.below(2 * static_cast<std::uint64_t>(value_bound) + 1)) - value_bound;
        a.set(name, Element::from_int(Ring::integers(), v));
    };
    draw("x");
    draw("z");
    std::set<std::string> binders;
    f.collect_binders(binders);
    for (const auto& b : binders) draw(b);
    return {detail::make_true(f, a, gen, true), a};
}

} // namespace ghostring
