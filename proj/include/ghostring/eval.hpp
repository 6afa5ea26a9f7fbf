#pragma once

/**
 * @file eval.hpp
 * @brief Deciding and semi-deciding satisfaction of positive existential
 *        formulas, and transporting witnesses along homomorphisms.
 *
 * Over finite rings satisfaction is decided by exhaustive search. Over Z and
 * Zloc/p it is only semi-decidable, so the answer is three-valued: a
 * verified witness, a refutation (Zloc/p only: the formula already fails in
 * some quotient Z/p^N, and truth transports down along Zloc/p -> Z/p^N), or
 * "unknown up to" the exact search budget.
 */

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "formula.hpp"
#include "homomorphism.hpp"
#include "normal_form.hpp"
#include "ring.hpp"
#include "semantics.hpp"
#include "solver.hpp"

namespace ghostring {

struct SearchBudget {
    /// Witness box [-B, B] per variable over Z.
    Int integer_box_bound = 10000;
    /// Zloc/p witnesses a/b with |a|, b <= H.
    Int local_height_bound = 1000;
    /// Quotients Z/p^N probed for N <= N_max.
    unsigned long precision_limit = 12;

    void validate() const {
        if (integer_box_bound <= 0) throw Error("budget: integer box bound must be positive");
        if (local_height_bound <= 0) throw Error("budget: local height bound must be positive");
        if (precision_limit == 0) throw Error("budget: precision limit must be positive");
    }

    friend bool operator==(const SearchBudget&, const SearchBudget&) = default;
};

struct EvalResult {
    enum class Status { Holds, Fails, RefutedAtPrecision, UnknownUpTo };

    Status status = Status::Fails;
    /// Holds: values for every free and bound variable of the normal form.
    Assignment witness;
    /// Holds: index of the satisfied disjunct of the normal form.
    std::size_t disjunct = 0;
    /// RefutedAtPrecision: the first N with no solution modulo p^N.
    unsigned long precision = 0;
    SearchBudget budget;
    /// Zloc/p only: the witness found in Z/p^N for each probed N.
    std::vector<std::pair<unsigned long, Assignment>> modular_witnesses;

    bool holds() const noexcept { return status == Status::Holds; }
    bool definite() const noexcept { return status != Status::UnknownUpTo; }
};

inline std::string to_string(EvalResult::Status s) {
    switch (s) {
    case EvalResult::Status::Holds: return "Holds";
    case EvalResult::Status::Fails: return "Fails";
    case EvalResult::Status::RefutedAtPrecision: return "RefutedAtPrecision";
    case EvalResult::Status::UnknownUpTo: return "UnknownUpTo";
    }
    return {};
}

namespace detail {

inline std::optional<std::pair<Assignment, std::size_t>>
search(const Ring& r, const NormalForm& nf, const Assignment& env, SearchOptions opts) {
    std::optional<std::pair<Assignment, std::size_t>> best;
    WitnessSearch(r, nf, env).run(opts, [&](const Assignment& w, std::size_t d) {
        best = std::make_pair(w, d);
        return true;
    });
    return best;
}

inline void check_env(const Ring& r, const NormalForm& nf, const Assignment& env) {
    for (const auto& v : nf.free_vars) {
        const Element* e = env.find(v);
        if (!e) throw Error("unbound free variable '" + v + "'");
        if (!(e->ring() == r))
            throw Error("cross-ring element: '" + v + "' lives in " + e->ring().to_string() + ", evaluating in " +
                        r.to_string());
    }
}

/// Keeps only the entries the normal form mentions, in its variable order.
inline Assignment restrict_env(const NormalForm& nf, const Assignment& env) {
    Assignment out;
    for (const auto& v : nf.free_vars) out.set(v, env.at(v));
    return out;
}

} // namespace detail

/// Satisfaction of f in r under env (which must bind every free variable).
inline EvalResult satisfies(const Ring& r, const Formula& f, const Assignment& env, const SearchBudget& budget) {
    budget.validate();
    NormalForm nf = normalize(f);
    detail::check_env(r, nf, env);
    Assignment fenv = detail::restrict_env(nf, env);

    EvalResult res;
    res.budget = budget;
    auto holds = [&](std::pair<Assignment, std::size_t> found) {
        res.status = EvalResult::Status::Holds;
        res.witness = std::move(found.first);
        res.disjunct = found.second;
        return res;
    };

    switch (r.kind()) {
    case Ring::Kind::Mod:
    case Ring::Kind::Product: {
        if (auto w = detail::search(r, nf, fenv, {detail::SearchOptions::Mode::First, 0})) return holds(*w);
        res.status = EvalResult::Status::Fails;
        return res;
    }
    case Ring::Kind::Integers: {
        if (auto w = detail::search(r, nf, fenv, {detail::SearchOptions::Mode::Minimal, budget.integer_box_bound}))
            return holds(*w);
        res.status = EvalResult::Status::UnknownUpTo;
        return res;
    }
    case Ring::Kind::Local: {
        for (unsigned long n = 1; n <= budget.precision_limit; ++n) {
            Ring quotient = Ring::mod(pow_int(r.prime(), n));
            Assignment reduced;
            for (const auto& [k, v] : fenv) reduced.set(k, coherent_reduce(v, n));
            auto w = detail::search(quotient, nf, reduced, {detail::SearchOptions::Mode::First, 0});
            if (!w) {
                res.status = EvalResult::Status::RefutedAtPrecision;
                res.precision = n;
                return res;
            }
            res.modular_witnesses.emplace_back(n, std::move(w->first));
        }
        if (auto w = detail::search(r, nf, fenv, {detail::SearchOptions::Mode::Minimal, budget.local_height_bound}))
            return holds(*w);
        res.status = EvalResult::Status::UnknownUpTo;
        return res;
    }
    }
    throw Error("unreachable");
}

/// Every solution over a finite ring, or every solution inside the box over
/// an infinite one. The visitor returns false to stop early.
inline void for_each_solution(const Ring& r, const Formula& f, const Assignment& env, const SearchBudget& budget,
                              const std::function<bool(const Assignment&)>& visit) {
    budget.validate();
    NormalForm nf = normalize(f);
    detail::check_env(r, nf, env);
    Int bound = r.kind() == Ring::Kind::Local ? budget.local_height_bound : budget.integer_box_bound;
    detail::WitnessSearch(r, nf, detail::restrict_env(nf, env))
        .run({detail::SearchOptions::Mode::All, bound}, [&](const Assignment& w, std::size_t) { return visit(w); });
}

/// Maps a witness of f along h and re-verifies the image in h's target.
/// Never fails for a law-abiding homomorphism: positive existential truth is
/// preserved by ring homomorphisms.
inline Assignment transport_witness(const Homomorphism& h, const Formula& f, const Assignment& w) {
    for (const auto& [k, v] : w)
        if (!(v.ring() == h.source()))
            throw Error("element/ring mismatch: '" + k + "' lives in " + v.ring().to_string() + ", map is from " +
                        h.source().to_string());
    if (!verify_witness(h.source(), f, w)) throw Error("source witness invalid");
    Assignment image = w.map(h);
    if (!verify_witness(h.target(), f, image))
        throw Error("transported witness failed to verify in " + h.target().to_string() +
                    " (homomorphism laws violated?)");
    return image;
}

} // namespace ghostring
