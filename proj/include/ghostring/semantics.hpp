#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "formula.hpp"
#include "homomorphism.hpp"
#include "normal_form.hpp"
#include "ring.hpp"

namespace ghostring {

/// Ordered variable -> element map. Order is insertion order, which keeps
/// printed witnesses stable.
class Assignment {
public:
    Assignment() = default;
    Assignment(std::initializer_list<std::pair<std::string, Element>> init) {
        for (const auto& [k, v] : init) set(k, v);
    }

    void set(const std::string& name, const Element& value) {
        for (auto& [k, v] : entries_)
            if (k == name) {
                v = value;
                return;
            }
        entries_.emplace_back(name, value);
    }

    const Element* find(const std::string& name) const {
        for (const auto& [k, v] : entries_)
            if (k == name) return &v;
        return nullptr;
    }

    const Element& at(const std::string& name) const {
        if (const Element* e = find(name)) return *e;
        throw Error("unbound variable '" + name + "'");
    }

    bool contains(const std::string& name) const { return find(name) != nullptr; }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// Image of every value under h.
    Assignment map(const Homomorphism& h) const {
        Assignment out;
        for (const auto& [k, v] : entries_) out.set(k, h.apply(v));
        return out;
    }

    friend bool operator==(const Assignment& a, const Assignment& b) { return a.entries_ == b.entries_; }

    std::string to_string() const {
        std::string s = "{";
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (i) s += ", ";
            s += entries_[i].first + "=" + entries_[i].second.to_string();
        }
        return s + "}";
    }

private:
    std::vector<std::pair<std::string, Element>> entries_;
};

/// Standard term semantics by structural recursion.
inline Element eval_term(const Ring& r, const Term& t, const Assignment& env) {
    switch (t.kind()) {
    case Term::Kind::Zero: return Element::zero(r);
    case Term::Kind::One: return Element::one(r);
    case Term::Kind::Var: {
        const Element& v = env.at(t.name());
        if (!(v.ring() == r))
            throw Error("cross-ring element: '" + t.name() + "' lives in " + v.ring().to_string() +
                        ", evaluating in " + r.to_string());
        return v;
    }
    case Term::Kind::Neg: return -eval_term(r, t.left(), env);
    case Term::Kind::Add: return eval_term(r, t.left(), env) + eval_term(r, t.right(), env);
    case Term::Kind::Mul: return eval_term(r, t.left(), env) * eval_term(r, t.right(), env);
    }
    throw Error("unreachable");
}

/// Index of the first disjunct of the normal form satisfied outright by the
/// assignment (which must bind every free and bound variable), if any.
inline std::optional<std::size_t> satisfied_disjunct(const Ring& r, const NormalForm& nf, const Assignment& w) {
    for (std::size_t i = 0; i < nf.matrix.size(); ++i) {
        bool ok = std::all_of(nf.matrix[i].begin(), nf.matrix[i].end(), [&](const Equation& e) {
            return eval_term(r, e.first, w) == eval_term(r, e.second, w);
        });
        if (ok) return i;
    }
    return std::nullopt;
}

/// Re-checks a witness by direct equation evaluation.
inline bool verify_witness(const Ring& r, const Formula& f, const Assignment& w) {
    NormalForm nf = normalize(f);
    for (const auto& v : nf.free_vars)
        if (!w.contains(v)) return false;
    for (const auto& v : nf.bound_vars)
        if (!w.contains(v)) return false;
    return satisfied_disjunct(r, nf, w).has_value();
}

} // namespace ghostring
