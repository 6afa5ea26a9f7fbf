#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "formula.hpp"

namespace ghostring {

using Equation = std::pair<Term, Term>;
using Conjunct = std::vector<Equation>;

/// Prenex disjunctive form: exists bound_vars. OR_i AND_j (lhs_ij = rhs_ij).
struct NormalForm {
    std::vector<std::string> bound_vars;
    std::vector<Conjunct> matrix;
    std::vector<std::string> free_vars;

    std::size_t atom_count() const {
        std::size_t n = 0;
        for (const auto& d : matrix) n += d.size();
        return n;
    }
};

struct NormalizeOptions {
    /// Maximum number of equations in the distributed matrix.
    std::size_t max_atoms = 10000;
};

namespace detail {

class Normalizer {
public:
    Normalizer(const Formula& f, NormalizeOptions opts) : opts_(opts) {
        free_ = ghostring::free_vars(f);
        taken_ = all_names(f);
        count_binders(f);
    }

    NormalForm run(const Formula& f) {
        NormalForm nf;
        nf.free_vars = free_;
        nf.matrix = dnf(f, {});
        nf.bound_vars = std::move(bound_);
        return nf;
    }

private:
    void count_binders(const Formula& f) {
        if (f.kind() == Formula::Kind::Exists)
            for (const auto& v : f.bound()) ++binder_count_[v];
        for (const auto& c : f.children()) count_binders(c);
    }

    void check_size(std::size_t atoms) const {
        if (atoms > opts_.max_atoms)
            throw Error("formula too large after distribution (" + std::to_string(atoms) +
                        " equations, limit " + std::to_string(opts_.max_atoms) + ")");
    }

    std::vector<Conjunct> dnf(const Formula& f, const std::map<std::string, std::string>& names) {
        switch (f.kind()) {
        case Formula::Kind::Eq:
            return {{Equation{rename_vars(f.lhs(), names), rename_vars(f.rhs(), names)}}};
        case Formula::Kind::Exists: {
            auto inner = names;
            for (const auto& v : f.bound()) {
                bool clash = binder_count_[v] > 1 ||
                             std::find(free_.begin(), free_.end(), v) != free_.end();
                std::string name = v;
                if (clash) {
                    name = fresh_name(v, taken_);
                    taken_.insert(name);
                }
                inner[v] = name;
                bound_.push_back(name);
            }
            return dnf(f.body(), inner);
        }
        case Formula::Kind::Or: {
            std::vector<Conjunct> out;
            std::size_t atoms = 0;
            for (const auto& c : f.children()) {
                for (auto& d : dnf(c, names)) {
                    atoms += d.size();
                    out.push_back(std::move(d));
                }
                check_size(atoms);
            }
            return out;
        }
        case Formula::Kind::And: {
            std::vector<Conjunct> acc{Conjunct{}};
            for (const auto& c : f.children()) {
                auto part = dnf(c, names);
                std::vector<Conjunct> next;
                std::size_t atoms = 0;
                for (const auto& a : acc) {
                    for (const auto& b : part) {
                        Conjunct merged = a;
                        merged.insert(merged.end(), b.begin(), b.end());
                        atoms += merged.size();
                        check_size(atoms);
                        next.push_back(std::move(merged));
                    }
                }
                acc = std::move(next);
            }
            return acc;
        }
        }
        return {};
    }

    NormalizeOptions opts_;
    std::vector<std::string> free_;
    std::set<std::string> taken_;
    std::map<std::string, std::size_t> binder_count_;
    std::vector<std::string> bound_;
};

} // namespace detail

/// Pulls every quantifier to the front (renaming binders apart where two
/// binders share a name) and distributes conjunction over disjunction.
inline NormalForm normalize(const Formula& f, NormalizeOptions opts = {}) {
    return detail::Normalizer(f, opts).run(f);
}

/// Re-assembles a normal form as a formula (used for printing and tests).
inline Formula to_formula(const NormalForm& nf) {
    std::vector<Formula> disjuncts;
    for (const auto& d : nf.matrix) {
        std::vector<Formula> eqs;
        for (const auto& [l, r] : d) eqs.push_back(Formula::eq(l, r));
        disjuncts.push_back(Formula::conj(std::move(eqs)));
    }
    Formula body = Formula::disj(std::move(disjuncts));
    return nf.bound_vars.empty() ? body : Formula::exists(nf.bound_vars, body);
}

} // namespace ghostring
