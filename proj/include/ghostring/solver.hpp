#pragma once

/**
 * @file solver.hpp
 * @brief Witness search for the matrix of a normal form.
 *
 * Each disjunct is a conjunction of equations. The search is a depth-first
 * assignment of the bound variables with propagation: whenever an equation
 * has exactly one unassigned variable and is affine in it, the equation
 * c*v + r = 0 is solved directly in the ring instead of enumerating v.
 * Otherwise the first unassigned variable (in bound-variable order) is
 * enumerated over its domain:
 *
 *   - finite rings: every element, in enumeration order;
 *   - Z: [-B, B] as 0, -1, 1, -2, 2, ...;
 *   - Zloc/p: fractions of height <= H in increasing height.
 *
 * Values produced by propagation are held to the same box, so over infinite
 * rings the search is complete for "a witness inside the box exists".
 *
 * Over infinite rings the search is branch-and-bound on the witness height
 * (the largest |v| or fraction height among the bound variables): each
 * witness caps the bound at its own height, so the last witness reported has
 * minimal height and, within that shell, the lexicographically least tuple
 * of bound-variable values (ties between disjuncts go to the earlier one).
 */

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bigint.hpp"
#include "error.hpp"
#include "normal_form.hpp"
#include "ring.hpp"
#include "semantics.hpp"

namespace ghostring::detail {

/// Solutions of c*v = rhs in a ring.
struct LinearSolution {
    enum class Kind { Dead, Free, Values };
    Kind kind = Kind::Dead;
    std::vector<Element> values;
};

inline LinearSolution solve_linear(const Element& c, const Element& rhs) {
    using K = LinearSolution::Kind;
    const Ring& r = c.ring();
    if (c.is_zero()) return {rhs.is_zero() ? K::Free : K::Dead, {}};
    switch (r.kind()) {
    case Ring::Kind::Integers: {
        if (!divides(c.value(), rhs.value())) return {K::Dead, {}};
        return {K::Values, {Element::from_int(r, rhs.value() / c.value())}};
    }
    case Ring::Kind::Mod: {
        const Int& n = r.modulus();
        Int g = gcd(c.value(), n);
        if (!divides(g, rhs.value())) return {K::Dead, {}};
        Int step = n / g;
        Int inv;
        if (step == 1) {
            inv = 0;
        } else if (!mod_inverse(Int(c.value() / g), step, inv)) {
            throw Error("internal: non-invertible reduced coefficient");
        }
        Int base = mod_floor(Int((rhs.value() / g) * inv), step);
        LinearSolution out{K::Values, {}};
        for (Int k = 0; k < g; ++k) out.values.push_back(Element::from_int(r, base + k * step));
        return out;
    }
    case Ring::Kind::Local: {
        // rhs / c exists in Zloc/p iff p does not divide the reduced denominator.
        Int num = rhs.numerator() * c.denominator();
        Int den = rhs.denominator() * c.numerator();
        Int g = gcd(num, den);
        if (divides(r.prime(), Int(den / g))) return {K::Dead, {}};
        return {K::Values, {Element::fraction(r, num, den)}};
    }
    case Ring::Kind::Product: {
        LinearSolution a = solve_linear(c.first(), rhs.first());
        LinearSolution b = solve_linear(c.second(), rhs.second());
        if (a.kind == K::Dead || b.kind == K::Dead) return {K::Dead, {}};
        if (a.kind == K::Free && b.kind == K::Free) return {K::Free, {}};
        if (a.kind == K::Free) a.values = enumerate_elements(r.left());
        if (b.kind == K::Free) b.values = enumerate_elements(r.right());
        LinearSolution out{K::Values, {}};
        for (const auto& x : a.values)
            for (const auto& y : b.values) out.values.push_back(Element::pair(r, x, y));
        return out;
    }
    }
    throw Error("unreachable");
}

/// Term compiled against a variable index: slots [0, nvars).
class CompiledTerm {
public:
    CompiledTerm() = default;
    CompiledTerm(const Term& t, const std::function<int(const std::string&)>& index) { compile(t, index); }

    Element eval(const Ring& r, const std::vector<std::optional<Element>>& slots) const {
        std::vector<Element> stack;
        stack.reserve(ops_.size());
        for (const auto& op : ops_) {
            switch (op.kind) {
            case Term::Kind::Zero: stack.push_back(Element::zero(r)); break;
            case Term::Kind::One: stack.push_back(Element::one(r)); break;
            case Term::Kind::Var: stack.push_back(*slots[op.slot]); break;
            case Term::Kind::Neg: stack.back() = -stack.back(); break;
            case Term::Kind::Add:
            case Term::Kind::Mul: {
                Element b = std::move(stack.back());
                stack.pop_back();
                stack.back() = op.kind == Term::Kind::Add ? stack.back() + b : stack.back() * b;
                break;
            }
            }
        }
        return stack.back();
    }

private:
    struct Op {
        Term::Kind kind;
        int slot;
    };

    void compile(const Term& t, const std::function<int(const std::string&)>& index) {
        switch (t.kind()) {
        case Term::Kind::Var: ops_.push_back({Term::Kind::Var, index(t.name())}); return;
        case Term::Kind::Neg:
            compile(t.left(), index);
            ops_.push_back({Term::Kind::Neg, -1});
            return;
        case Term::Kind::Add:
        case Term::Kind::Mul:
            compile(t.left(), index);
            compile(t.right(), index);
            ops_.push_back({t.kind(), -1});
            return;
        default: ops_.push_back({t.kind(), -1}); return;
        }
    }

    std::vector<Op> ops_;
};

struct SearchOptions {
    enum class Mode { First, Minimal, All };
    Mode mode = Mode::First;
    /// Height bound for infinite rings (ignored for finite rings).
    Int bound = 0;
};

/// Search state for one normal form over one ring with fixed free values.
class WitnessSearch {
public:
    using Visitor = std::function<bool(const Assignment&, std::size_t disjunct)>;

    WitnessSearch(Ring ring, const NormalForm& nf, const Assignment& env) : ring_(std::move(ring)), nf_(nf) {
        for (const auto& v : nf.free_vars) {
            const Element& e = env.at(v);
            if (!(e.ring() == ring_))
                throw Error("cross-ring element: '" + v + "' lives in " + e.ring().to_string() +
                            ", evaluating in " + ring_.to_string());
            names_.push_back(v);
            fixed_.push_back(e);
        }
        nfree_ = names_.size();
        names_.insert(names_.end(), nf.bound_vars.begin(), nf.bound_vars.end());
        auto index = [this](const std::string& name) {
            for (std::size_t i = 0; i < names_.size(); ++i)
                if (names_[i] == name) return static_cast<int>(i);
            throw Error("internal: unknown variable '" + name + "'");
        };
        for (const auto& conj : nf.matrix) {
            Disjunct d;
            for (const auto& [l, r] : conj) {
                Eq eq{CompiledTerm(l, index), CompiledTerm(r, index), {}, {}};
                std::vector<std::string> vs = term_vars(l);
                for (const auto& v : term_vars(r))
                    if (std::find(vs.begin(), vs.end(), v) == vs.end()) vs.push_back(v);
                for (const auto& v : vs) {
                    int slot = index(v);
                    if (static_cast<std::size_t>(slot) < nfree_) continue;
                    eq.vars.push_back(slot);
                    eq.degree.push_back(std::max(degree_in(l, v), degree_in(r, v)));
                }
                d.eqs.push_back(std::move(eq));
            }
            for (std::size_t s = nfree_; s < names_.size(); ++s)
                for (const auto& eq : d.eqs)
                    if (std::find(eq.vars.begin(), eq.vars.end(), static_cast<int>(s)) != eq.vars.end()) {
                        d.order.push_back(static_cast<int>(s));
                        break;
                    }
            disjuncts_.push_back(std::move(d));
        }
    }

    /// Runs the search. The visitor sees every accepted witness and returns
    /// false to stop. Returns the number of search nodes expanded.
    std::size_t run(const SearchOptions& opts, const Visitor& visit) {
        opts_ = opts;
        limit_ = opts.bound;
        visit_ = visit;
        stopped_ = false;
        nodes_ = 0;
        best_values_.reset();
        path_worse_ = false;
        zero_ = Element::zero(ring_);
        for (std::size_t i = 0; i < disjuncts_.size() && !stopped_; ++i) {
            current_ = i;
            slots_.assign(names_.size(), std::nullopt);
            for (std::size_t k = 0; k < nfree_; ++k) slots_[k] = fixed_[k];
            const Disjunct& d = disjuncts_[i];
            bool ok = true;
            for (const auto& eq : d.eqs)
                if (eq.vars.empty() && !holds(eq)) ok = false;
            if (ok) dfs(d);
        }
        return nodes_;
    }

private:
    struct Eq {
        CompiledTerm lhs, rhs;
        std::vector<int> vars;   // bound-variable slots
        std::vector<int> degree; // syntactic degree per slot
    };
    struct Disjunct {
        std::vector<Eq> eqs;
        std::vector<int> order; // bound slots that occur in some equation
    };

    bool finite() const { return ring_.is_finite(); }

    bool holds(const Eq& eq) const { return eq.lhs.eval(ring_, slots_) == eq.rhs.eval(ring_, slots_); }

    bool within_limit(const Element& e) const {
        if (finite()) return true;
        Int h = e.height();
        return path_worse_ ? h < limit_ : h <= limit_;
    }

    /// Minimal mode: true when the bound values up to slot `upto` (with `v`
    /// there) are lexicographically greater than the best witness. Slots
    /// before `upto` are always assigned at that point, because variables
    /// are enumerated in bound order and propagation only fills later ones.
    bool prefix_worse(int upto, const Element& v) const {
        if (!best_values_) return false;
        for (int k = static_cast<int>(nfree_); k <= upto; ++k) {
            const Element& mine = k == upto ? v : slots_[k] ? *slots_[k] : zero_;
            const Element& best = (*best_values_)[k - nfree_];
            if (mine < best) return false;
            if (best < mine) return true;
        }
        return false;
    }

    void accept() {
        Assignment w;
        for (std::size_t k = 0; k < names_.size(); ++k)
            w.set(names_[k], slots_[k] ? *slots_[k] : Element::zero(ring_));
        if (opts_.mode == SearchOptions::Mode::Minimal) {
            Int h = 0;
            std::vector<Element> values;
            for (std::size_t k = nfree_; k < names_.size(); ++k) {
                values.push_back(w.at(names_[k]));
                if (Int hk = values.back().height(); hk > h) h = hk;
            }
            // Keep searching the current shell for a lexicographically smaller tie.
            if (best_values_ && (h > limit_ || (h == limit_ && !(values < *best_values_)))) return;
            best_values_ = std::move(values);
            limit_ = h;
        }
        if (!visit_(w, current_)) stopped_ = true;
        if (opts_.mode == SearchOptions::Mode::First) stopped_ = true;
    }

    void dfs(const Disjunct& d) {
        if (stopped_) return;
        ++nodes_;
        // Fully assigned equations must hold; find the tightest forced variable.
        std::optional<int> forced_slot;
        std::vector<Element> forced_values;
        for (const auto& eq : d.eqs) {
            int unassigned = -1, count = 0;
            for (std::size_t j = 0; j < eq.vars.size(); ++j)
                if (!slots_[eq.vars[j]]) {
                    ++count;
                    unassigned = static_cast<int>(j);
                }
            if (count == 0) {
                if (!holds(eq)) return;
                continue;
            }
            if (count != 1 || eq.degree[unassigned] != 1) continue;
            int slot = eq.vars[unassigned];
            slots_[slot] = Element::zero(ring_);
            Element r0 = eq.lhs.eval(ring_, slots_) - eq.rhs.eval(ring_, slots_);
            slots_[slot] = Element::one(ring_);
            Element r1 = eq.lhs.eval(ring_, slots_) - eq.rhs.eval(ring_, slots_);
            slots_[slot].reset();
            LinearSolution sol = solve_linear(r1 - r0, -r0);
            if (sol.kind == LinearSolution::Kind::Dead) return;
            if (sol.kind == LinearSolution::Kind::Free) continue;
            std::vector<Element> vals;
            for (auto& v : sol.values)
                if (within_limit(v)) vals.push_back(std::move(v));
            if (vals.empty()) return;
            if (!forced_slot || vals.size() < forced_values.size()) {
                forced_slot = slot;
                forced_values = std::move(vals);
            }
        }
        if (forced_slot) {
            for (const auto& v : forced_values) {
                if (stopped_ || !within_limit(v)) continue;
                slots_[*forced_slot] = v;
                dfs(d);
            }
            slots_[*forced_slot].reset();
            return;
        }
        int next = -1;
        for (int s : d.order)
            if (!slots_[s]) {
                next = s;
                break;
            }
        if (next < 0) {
            accept();
            return;
        }
        auto branch = [&](const Element& v) {
            if (stopped_) return false;
            if (!finite() && v.height() > limit_) return false;
            bool saved = path_worse_;
            path_worse_ = opts_.mode == SearchOptions::Mode::Minimal && prefix_worse(next, v);
            // Past the best witness lexicographically: only a lower height can win.
            if (within_limit(v)) {
                slots_[next] = v;
                dfs(d);
            }
            path_worse_ = saved;
            return !stopped_;
        };
        switch (ring_.kind()) {
        case Ring::Kind::Integers: for_each_integer_by_size(limit_, branch); break;
        case Ring::Kind::Local: for_each_local_by_height(ring_, limit_, branch); break;
        default: for_each_element(ring_, branch); break;
        }
        slots_[next].reset();
    }

    Ring ring_;
    const NormalForm& nf_;
    std::vector<std::string> names_;
    std::vector<Element> fixed_;
    std::size_t nfree_ = 0;
    std::vector<Disjunct> disjuncts_;

    SearchOptions opts_;
    Int limit_;
    Visitor visit_;
    bool stopped_ = false;
    std::size_t nodes_ = 0;
    std::size_t current_ = 0;
    std::vector<std::optional<Element>> slots_;
    std::optional<std::vector<Element>> best_values_;
    bool path_worse_ = false;
    Element zero_ = Element::zero(ring_);
};

} // namespace ghostring::detail
