#pragma once

/**
 * @file formula.hpp
 * @brief Terms and positive existential formulas over {+, *, -, 0, 1}.
 *
 * Both types are immutable handles onto shared trees, so copying is cheap
 * and values can be shared freely between threads. The smart constructors
 * are the only way to build a tree; they reject anything outside the
 * positive existential fragment (there is no node kind for negation or
 * universal quantification at all).
 */

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bigint.hpp"
#include "error.hpp"

namespace ghostring {

inline bool is_keyword(std::string_view s) {
    return s == "exists" || s == "and" || s == "or" || s == "not" || s == "forall" ||
           s == "true";
}

/// [a-zA-Z][a-zA-Z0-9_]* optionally followed by primes (x', x1'').
inline bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(s[0])) return false;
    std::size_t i = 1;
    while (i < s.size() && (alpha(s[i]) || digit(s[i]) || s[i] == '_')) ++i;
    while (i < s.size() && s[i] == '\'') ++i;
    return i == s.size() && !is_keyword(s);
}

class Term {
public:
    enum class Kind { Zero, One, Var, Neg, Add, Mul };

    Term() : Term(Kind::Zero, {}, nullptr, nullptr) {}

    static Term zero() { return Term(); }
    static Term one() { return Term(Kind::One, {}, nullptr, nullptr); }
    static Term var(std::string name) {
        if (!is_identifier(name)) throw Error("invalid variable name '" + name + "'");
        return Term(Kind::Var, std::move(name), nullptr, nullptr);
    }
    static Term neg(const Term& t) { return Term(Kind::Neg, {}, t.node_, nullptr); }
    static Term add(const Term& a, const Term& b) { return Term(Kind::Add, {}, a.node_, b.node_); }
    static Term mul(const Term& a, const Term& b) { return Term(Kind::Mul, {}, a.node_, b.node_); }
    static Term sub(const Term& a, const Term& b) { return add(a, neg(b)); }

    /// Elaborates n into +/-(1+1+...+1); 0 becomes Zero.
    static Term literal(const Int& n) {
        if (abs(n) > kMaxLiteral) throw Error("integer literal " + to_string(n) + " too large");
        long m = Int(abs(n)).get_si();
        if (m == 0) return zero();
        Term t = one();
        for (long i = 1; i < m; ++i) t = add(t, one());
        return n < 0 ? neg(t) : t;
    }

    Kind kind() const noexcept { return node_->kind; }
    const std::string& name() const noexcept { return node_->name; }
    /// Operand of Neg, left operand of Add/Mul.
    Term left() const { return Term(node_->left); }
    Term right() const { return Term(node_->right); }
    bool is_binary() const noexcept { return kind() == Kind::Add || kind() == Kind::Mul; }

    std::size_t size() const noexcept { return node_->size; }

    friend bool operator==(const Term& a, const Term& b) {
        if (a.node_ == b.node_) return true;
        if (a.kind() != b.kind() || a.size() != b.size()) return false;
        switch (a.kind()) {
        case Kind::Zero:
        case Kind::One: return true;
        case Kind::Var: return a.name() == b.name();
        case Kind::Neg: return a.left() == b.left();
        default: return a.left() == b.left() && a.right() == b.right();
        }
    }

    static constexpr long kMaxLiteral = 10000;

private:
    struct Node {
        Kind kind;
        std::string name;
        std::shared_ptr<const Node> left;
        std::shared_ptr<const Node> right;
        std::size_t size;
    };

    explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    Term(Kind k, std::string name, std::shared_ptr<const Node> l, std::shared_ptr<const Node> r) {
        std::size_t sz = 1 + (l ? l->size : 0) + (r ? r->size : 0);
        node_ = std::make_shared<const Node>(Node{k, std::move(name), std::move(l), std::move(r), sz});
    }

    std::shared_ptr<const Node> node_;
};

/// Variables of a term in first-occurrence order.
inline void collect_vars(const Term& t, std::vector<std::string>& out) {
    switch (t.kind()) {
    case Term::Kind::Var:
        if (std::find(out.begin(), out.end(), t.name()) == out.end()) out.push_back(t.name());
        return;
    case Term::Kind::Neg: collect_vars(t.left(), out); return;
    case Term::Kind::Add:
    case Term::Kind::Mul:
        collect_vars(t.left(), out);
        collect_vars(t.right(), out);
        return;
    default: return;
    }
}

inline std::vector<std::string> term_vars(const Term& t) {
    std::vector<std::string> out;
    collect_vars(t, out);
    return out;
}

/// Syntactic degree of a term in one variable.
inline int degree_in(const Term& t, const std::string& v) {
    switch (t.kind()) {
    case Term::Kind::Var: return t.name() == v ? 1 : 0;
    case Term::Kind::Neg: return degree_in(t.left(), v);
    case Term::Kind::Add: return std::max(degree_in(t.left(), v), degree_in(t.right(), v));
    case Term::Kind::Mul: return degree_in(t.left(), v) + degree_in(t.right(), v);
    default: return 0;
    }
}

inline Term rename_vars(const Term& t, const std::map<std::string, std::string>& names) {
    switch (t.kind()) {
    case Term::Kind::Var: {
        auto it = names.find(t.name());
        return it == names.end() ? t : Term::var(it->second);
    }
    case Term::Kind::Neg: return Term::neg(rename_vars(t.left(), names));
    case Term::Kind::Add: return Term::add(rename_vars(t.left(), names), rename_vars(t.right(), names));
    case Term::Kind::Mul: return Term::mul(rename_vars(t.left(), names), rename_vars(t.right(), names));
    default: return t;
    }
}

class Formula {
public:
    enum class Kind { Eq, And, Or, Exists };

    static Formula eq(const Term& lhs, const Term& rhs) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Eq;
        n->lhs = lhs;
        n->rhs = rhs;
        n->size = 1 + lhs.size() + rhs.size();
        return Formula(std::move(n));
    }

    /// The always-true formula 0 = 0.
    static Formula truth() { return eq(Term::zero(), Term::zero()); }

    /// n-ary conjunction; a single child is returned unwrapped.
    static Formula conj(std::vector<Formula> children) { return junction(Kind::And, std::move(children)); }
    static Formula disj(std::vector<Formula> children) { return junction(Kind::Or, std::move(children)); }

    static Formula exists(std::vector<std::string> vars, const Formula& body) {
        if (vars.empty()) throw Error("exists needs at least one variable");
        std::set<std::string> seen;
        for (const auto& v : vars) {
            if (!is_identifier(v)) throw Error("invalid variable name '" + v + "'");
            if (!seen.insert(v).second) throw Error("duplicate bound variable '" + v + "'");
        }
        std::set<std::string> inner;
        body.collect_binders(inner);
        for (const auto& v : vars)
            if (inner.count(v)) throw Error("bound variable '" + v + "' shadows an outer binder");
        auto n = std::make_shared<Node>();
        n->kind = Kind::Exists;
        n->vars = std::move(vars);
        n->children = {body};
        n->size = 1 + body.size();
        return Formula(std::move(n));
    }

    Kind kind() const noexcept { return node_->kind; }
    const Term& lhs() const noexcept { return node_->lhs; }
    const Term& rhs() const noexcept { return node_->rhs; }
    const std::vector<Formula>& children() const noexcept { return node_->children; }
    const std::vector<std::string>& bound() const noexcept { return node_->vars; }
    const Formula& body() const noexcept { return node_->children.front(); }
    std::size_t size() const noexcept { return node_->size; }

    void collect_binders(std::set<std::string>& out) const {
        if (kind() == Kind::Exists) out.insert(bound().begin(), bound().end());
        for (const auto& c : children()) c.collect_binders(out);
    }

    friend bool operator==(const Formula& a, const Formula& b) {
        if (a.node_ == b.node_) return true;
        if (a.kind() != b.kind() || a.size() != b.size()) return false;
        switch (a.kind()) {
        case Kind::Eq: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
        case Kind::Exists: return a.bound() == b.bound() && a.body() == b.body();
        default: return a.children() == b.children();
        }
    }

private:
    struct Node {
        Kind kind{};
        Term lhs, rhs;
        std::vector<Formula> children;
        std::vector<std::string> vars;
        std::size_t size = 0;
    };

    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static Formula junction(Kind k, std::vector<Formula> children) {
        if (children.empty())
            throw Error(k == Kind::And ? "empty conjunction" : "empty disjunction");
        if (children.size() == 1) return children.front();
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->size = 1;
        for (const auto& c : children) n->size += c.size();
        n->children = std::move(children);
        return Formula(std::move(n));
    }

    std::shared_ptr<const Node> node_;
};

namespace detail {

inline void free_vars_rec(const Formula& f, std::vector<std::string>& scope,
                          std::vector<std::string>& out) {
    switch (f.kind()) {
    case Formula::Kind::Eq: {
        std::vector<std::string> vs;
        collect_vars(f.lhs(), vs);
        collect_vars(f.rhs(), vs);
        for (const auto& v : vs)
            if (std::find(scope.begin(), scope.end(), v) == scope.end() &&
                std::find(out.begin(), out.end(), v) == out.end())
                out.push_back(v);
        return;
    }
    case Formula::Kind::Exists: {
        std::size_t mark = scope.size();
        scope.insert(scope.end(), f.bound().begin(), f.bound().end());
        free_vars_rec(f.body(), scope, out);
        scope.resize(mark);
        return;
    }
    default:
        for (const auto& c : f.children()) free_vars_rec(c, scope, out);
    }
}

inline void all_names(const Formula& f, std::set<std::string>& out) {
    if (f.kind() == Formula::Kind::Eq) {
        for (const auto& v : term_vars(f.lhs())) out.insert(v);
        for (const auto& v : term_vars(f.rhs())) out.insert(v);
        return;
    }
    if (f.kind() == Formula::Kind::Exists) out.insert(f.bound().begin(), f.bound().end());
    for (const auto& c : f.children()) all_names(c, out);
}

} // namespace detail

/// Variables occurring outside every binder, in first-occurrence order.
inline std::vector<std::string> free_vars(const Formula& f) {
    std::vector<std::string> scope, out;
    detail::free_vars_rec(f, scope, out);
    return out;
}

inline std::set<std::string> all_names(const Formula& f) {
    std::set<std::string> out;
    detail::all_names(f, out);
    return out;
}

inline std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
    for (std::size_t i = 1;; ++i) {
        std::string candidate = base + "_" + std::to_string(i);
        if (!taken.count(candidate)) return candidate;
    }
}

namespace detail {

inline Formula rename_free_rec(const Formula& f, std::map<std::string, std::string> names,
                               std::set<std::string>& taken) {
    switch (f.kind()) {
    case Formula::Kind::Eq: return Formula::eq(rename_vars(f.lhs(), names), rename_vars(f.rhs(), names));
    case Formula::Kind::Exists: {
        std::set<std::string> targets;
        for (const auto& [from, to] : names) targets.insert(to);
        std::vector<std::string> vars;
        for (const auto& v : f.bound()) {
            names.erase(v);
            if (targets.count(v)) {
                // A binder would capture a substituted name; move the binder aside.
                std::string fresh = fresh_name(v, taken);
                taken.insert(fresh);
                names[v] = fresh;
                vars.push_back(fresh);
            } else {
                vars.push_back(v);
            }
        }
        return Formula::exists(std::move(vars), rename_free_rec(f.body(), names, taken));
    }
    default: {
        std::vector<Formula> cs;
        for (const auto& c : f.children()) cs.push_back(rename_free_rec(c, names, taken));
        return f.kind() == Formula::Kind::And ? Formula::conj(std::move(cs)) : Formula::disj(std::move(cs));
    }
    }
}

} // namespace detail

/// Capture-avoiding renaming of free variables.
inline Formula rename_free(const Formula& f, const std::map<std::string, std::string>& names) {
    std::set<std::string> taken = all_names(f);
    for (const auto& [from, to] : names) taken.insert(to);
    return detail::rename_free_rec(f, names, taken);
}

// ---------------------------------------------------------------------------
// Printing. The output re-parses to a structurally equal tree.

namespace detail {

// Precedence levels follow the grammar: 0 = term, 1 = factor, 2 = unary.
inline void print_term(const Term& t, int level, std::string& out) {
    switch (t.kind()) {
    case Term::Kind::Zero: out += '0'; return;
    case Term::Kind::One: out += '1'; return;
    case Term::Kind::Var: out += t.name(); return;
    case Term::Kind::Neg:
        out += '-';
        print_term(t.left(), 2, out);
        return;
    case Term::Kind::Add:
    case Term::Kind::Mul: {
        int mine = t.kind() == Term::Kind::Add ? 0 : 1;
        bool paren = level > mine;
        if (paren) out += '(';
        print_term(t.left(), mine, out);
        out += t.kind() == Term::Kind::Add ? "+" : "*";
        print_term(t.right(), mine + 1, out);
        if (paren) out += ')';
        return;
    }
    }
}

// 0 = formula, 1 = disjunct, 2 = conjunct (atom).
inline void print_formula(const Formula& f, int level, std::string& out) {
    switch (f.kind()) {
    case Formula::Kind::Eq:
        print_term(f.lhs(), 0, out);
        out += " = ";
        print_term(f.rhs(), 0, out);
        return;
    case Formula::Kind::Exists: {
        bool paren = level > 0;
        if (paren) out += '(';
        out += "exists ";
        for (std::size_t i = 0; i < f.bound().size(); ++i) {
            if (i) out += ", ";
            out += f.bound()[i];
        }
        out += ". ";
        print_formula(f.body(), 0, out);
        if (paren) out += ')';
        return;
    }
    case Formula::Kind::Or:
    case Formula::Kind::And: {
        bool is_or = f.kind() == Formula::Kind::Or;
        int mine = is_or ? 1 : 2;
        bool paren = level >= mine;
        if (paren) out += '(';
        for (std::size_t i = 0; i < f.children().size(); ++i) {
            if (i) out += is_or ? " or " : " and ";
            print_formula(f.children()[i], mine, out);
        }
        if (paren) out += ')';
        return;
    }
    }
}

} // namespace detail

inline std::string to_string(const Term& t) {
    std::string out;
    detail::print_term(t, 0, out);
    return out;
}

inline std::string to_string(const Formula& f) {
    std::string out;
    detail::print_formula(f, 0, out);
    return out;
}

} // namespace ghostring
