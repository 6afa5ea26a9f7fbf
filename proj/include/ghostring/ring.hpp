#pragma once

/**
 * @file ring.hpp
 * @brief Commutative ring backends and their elements.
 *
 * Four kinds of ring are supported:
 *  - Z, the integers (arbitrary precision);
 *  - Z/n for n >= 2, stored as canonical residues in [0, n);
 *  - Zloc/p, the p-local rationals a/b with p not dividing b. This is the
 *    exact computable subring of the p-adic integers; every element is kept
 *    in lowest terms with a positive denominator;
 *  - binary products of finite rings.
 *
 * Rings are immutable handles. Elements carry the ring they belong to and
 * every binary operation checks that both operands share it.
 */

#include <compare>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bigint.hpp"
#include "error.hpp"

namespace ghostring {

class Ring {
public:
    enum class Kind { Integers, Mod, Local, Product };

    static Ring integers() {
        static const Ring z(std::make_shared<const Node>(Node{Kind::Integers, Int(0), {}, {}}));
        return z;
    }
    static Ring mod(const Int& n) {
        if (n < 2) throw Error("Z/n requires n >= 2, got " + ghostring::to_string(n));
        return Ring(std::make_shared<const Node>(Node{Kind::Mod, n, {}, {}}));
    }
    static Ring local(const Int& p) {
        if (!is_prime(p)) throw Error("Zloc/p requires a prime p, got " + ghostring::to_string(p));
        return Ring(std::make_shared<const Node>(Node{Kind::Local, p, {}, {}}));
    }
    static Ring product(const Ring& a, const Ring& b) {
        if (!a.is_finite() || !b.is_finite()) throw Error("products are limited to finite rings");
        return Ring(std::make_shared<const Node>(Node{Kind::Product, Int(0), a.node_, b.node_}));
    }

    Kind kind() const noexcept { return node_->kind; }
    /// Modulus of Z/n.
    const Int& modulus() const noexcept { return node_->param; }
    /// Prime of Zloc/p.
    const Int& prime() const noexcept { return node_->param; }
    Ring left() const { return Ring(node_->left); }
    Ring right() const { return Ring(node_->right); }

    bool is_finite() const noexcept { return kind() == Kind::Mod || kind() == Kind::Product; }

    /// Number of elements, or nullopt for an infinite ring.
    std::optional<Int> cardinality() const {
        switch (kind()) {
        case Kind::Mod: return modulus();
        case Kind::Product: return Int(*left().cardinality() * *right().cardinality());
        default: return std::nullopt;
        }
    }

    std::string to_string() const {
        switch (kind()) {
        case Kind::Integers: return "Z";
        case Kind::Mod: return "Z/" + ghostring::to_string(modulus());
        case Kind::Local: return "Zloc/" + ghostring::to_string(prime());
        case Kind::Product: return left().to_string() + "x" + right().to_string();
        }
        return {};
    }

    friend bool operator==(const Ring& a, const Ring& b) {
        if (a.node_ == b.node_) return true;
        if (a.kind() != b.kind()) return false;
        if (a.kind() == Kind::Product) return a.left() == b.left() && a.right() == b.right();
        return a.node_->param == b.node_->param;
    }

private:
    struct Node {
        Kind kind;
        Int param;
        std::shared_ptr<const Node> left;
        std::shared_ptr<const Node> right;
    };

    explicit Ring(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    std::shared_ptr<const Node> node_;
};

/// Parses "Z", "Z/12", "Zloc/2", "Z/4xZ/9".
inline Ring parse_ring(std::string_view text) {
    std::string s(text);
    auto x = s.find('x');
    if (x != std::string::npos) return Ring::product(parse_ring(s.substr(0, x)), parse_ring(s.substr(x + 1)));
    if (s == "Z") return Ring::integers();
    try {
        if (s.rfind("Zloc/", 0) == 0) return Ring::local(parse_int(s.substr(5)));
        if (s.rfind("Z/", 0) == 0) return Ring::mod(parse_int(s.substr(2)));
    } catch (const Error& e) {
        throw Error("bad ring '" + s + "': " + e.what());
    }
    throw Error("bad ring '" + s + "' (expected Z, Z/n, Zloc/p or AxB)");
}

class Element {
public:
    /// Image of an integer under the canonical map Z -> ring.
    static Element from_int(const Ring& r, const Int& v) {
        switch (r.kind()) {
        case Ring::Kind::Integers: return Element(r, v, 1);
        case Ring::Kind::Mod: return Element(r, mod_floor(v, r.modulus()), 1);
        case Ring::Kind::Local: return Element(r, v, 1);
        case Ring::Kind::Product: {
            Element e(r, 0, 1);
            e.parts_ = {from_int(r.left(), v), from_int(r.right(), v)};
            return e;
        }
        }
        throw Error("unreachable");
    }

    static Element zero(const Ring& r) { return from_int(r, 0); }
    static Element one(const Ring& r) { return from_int(r, 1); }

    /// num/den in Zloc/p; reduces to lowest terms, rejects p | den.
    static Element fraction(const Ring& r, const Int& num, const Int& den) {
        if (r.kind() != Ring::Kind::Local) throw Error("fractions only live in Zloc/p");
        if (den == 0) throw Error("zero denominator");
        Element e(r, num, den);
        e.canonicalize_local();
        return e;
    }

    static Element pair(const Ring& r, Element a, Element b) {
        if (r.kind() != Ring::Kind::Product) throw Error("pair needs a product ring");
        if (!(a.ring() == r.left()) || !(b.ring() == r.right()))
            throw Error("pair components do not match " + r.to_string());
        Element e(r, 0, 1);
        e.parts_ = {std::move(a), std::move(b)};
        return e;
    }

    const Ring& ring() const noexcept { return ring_; }
    /// Integer value (Z), residue (Z/n) or numerator (Zloc/p).
    const Int& value() const noexcept { return num_; }
    const Int& numerator() const noexcept { return num_; }
    const Int& denominator() const noexcept { return den_; }
    const Element& first() const { return parts_.at(0); }
    const Element& second() const { return parts_.at(1); }

    bool is_zero() const {
        if (ring_.kind() == Ring::Kind::Product) return first().is_zero() && second().is_zero();
        return num_ == 0;
    }

    /// Search cost: |v| over Z, max(|a|, b) over Zloc/p, 0 for finite rings.
    Int height() const {
        switch (ring_.kind()) {
        case Ring::Kind::Integers: return abs(num_);
        case Ring::Kind::Local: return abs(num_) > den_ ? Int(abs(num_)) : den_;
        default: return 0;
        }
    }

    std::string to_string() const {
        switch (ring_.kind()) {
        case Ring::Kind::Product: return "(" + first().to_string() + "," + second().to_string() + ")";
        case Ring::Kind::Local:
            return den_ == 1 ? ghostring::to_string(num_)
                             : ghostring::to_string(num_) + "/" + ghostring::to_string(den_);
        default: return ghostring::to_string(num_);
        }
    }

    friend Element operator+(const Element& a, const Element& b) { return combine(a, b, Op::Add); }
    friend Element operator*(const Element& a, const Element& b) { return combine(a, b, Op::Mul); }
    friend Element operator-(const Element& a, const Element& b) { return a + (-b); }
    friend Element operator-(const Element& a) {
        switch (a.ring_.kind()) {
        case Ring::Kind::Mod: return Element(a.ring_, mod_floor(-a.num_, a.ring_.modulus()), 1);
        case Ring::Kind::Product: {
            Element e(a.ring_, 0, 1);
            e.parts_ = {-a.first(), -a.second()};
            return e;
        }
        default: return Element(a.ring_, -a.num_, a.den_);
        }
    }

    friend bool operator==(const Element& a, const Element& b) {
        if (!(a.ring_ == b.ring_)) return false;
        if (a.ring_.kind() == Ring::Kind::Product) return a.parts_ == b.parts_;
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

    /// Total order within one ring: numeric for Z, Z/n (residues) and
    /// Zloc/p (as rationals); lexicographic for products.
    friend std::strong_ordering operator<=>(const Element& a, const Element& b) {
        check_same(a, b);
        switch (a.ring_.kind()) {
        case Ring::Kind::Product: {
            auto c = a.first() <=> b.first();
            return c != 0 ? c : a.second() <=> b.second();
        }
        case Ring::Kind::Local: {
            int c = cmp(Int(a.num_ * b.den_), Int(b.num_ * a.den_));
            return c < 0 ? std::strong_ordering::less
                         : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
        }
        default: {
            int c = cmp(a.num_, b.num_);
            return c < 0 ? std::strong_ordering::less
                         : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
        }
        }
    }

    static void check_same(const Element& a, const Element& b) {
        if (!(a.ring_ == b.ring_))
            throw Error("cross-ring operation: " + a.ring_.to_string() + " vs " + b.ring_.to_string());
    }

private:
    enum class Op { Add, Mul };

    Element(Ring r, Int num, Int den) : ring_(std::move(r)), num_(std::move(num)), den_(std::move(den)) {}

    void canonicalize_local() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        Int g = gcd(num_, den_);
        if (g != 1) {
            num_ /= g;
            den_ /= g;
        }
        if (divides(ring_.prime(), den_))
            throw Error("denominator " + ghostring::to_string(den_) + " is divisible by p = " +
                        ghostring::to_string(ring_.prime()));
    }

    static Element combine(const Element& a, const Element& b, Op op) {
        check_same(a, b);
        const Ring& r = a.ring_;
        switch (r.kind()) {
        case Ring::Kind::Integers:
            return Element(r, op == Op::Add ? Int(a.num_ + b.num_) : Int(a.num_ * b.num_), 1);
        case Ring::Kind::Mod:
            return Element(r, mod_floor(op == Op::Add ? Int(a.num_ + b.num_) : Int(a.num_ * b.num_), r.modulus()), 1);
        case Ring::Kind::Local: {
            Element e = op == Op::Add ? Element(r, a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_)
                                      : Element(r, a.num_ * b.num_, a.den_ * b.den_);
            e.canonicalize_local();
            return e;
        }
        case Ring::Kind::Product: {
            Element e(r, 0, 1);
            e.parts_ = {combine(a.first(), b.first(), op), combine(a.second(), b.second(), op)};
            return e;
        }
        }
        throw Error("unreachable");
    }

    Ring ring_;
    Int num_;
    Int den_;
    std::vector<Element> parts_;
};

/// Parses an element literal: "-5", "19", "5/7", "(1,2)".
inline Element parse_element(const Ring& r, std::string_view text) {
    std::string s(text);
    while (!s.empty() && s.front() == ' ') s.erase(0, 1);
    while (!s.empty() && s.back() == ' ') s.pop_back();
    try {
        switch (r.kind()) {
        case Ring::Kind::Integers: return Element::from_int(r, parse_int(s));
        case Ring::Kind::Mod: return Element::from_int(r, parse_int(s));
        case Ring::Kind::Local: {
            auto slash = s.find('/');
            if (slash == std::string::npos) return Element::from_int(r, parse_int(s));
            return Element::fraction(r, parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
        }
        case Ring::Kind::Product: {
            if (s.size() < 2 || s.front() != '(' || s.back() != ')') break;
            std::string inner = s.substr(1, s.size() - 2);
            int depth = 0;
            for (std::size_t i = 0; i < inner.size(); ++i) {
                if (inner[i] == '(') ++depth;
                if (inner[i] == ')') --depth;
                if (inner[i] == ',' && depth == 0)
                    return Element::pair(r, parse_element(r.left(), inner.substr(0, i)),
                                         parse_element(r.right(), inner.substr(i + 1)));
            }
            break;
        }
        }
    } catch (const Error& e) {
        throw Error("bad element '" + s + "' for " + r.to_string() + ": " + e.what());
    }
    throw Error("bad element '" + s + "' for " + r.to_string());
}

/// Visits every element of a finite ring once: Z/n as 0..n-1, products
/// lexicographically. Stops early when the visitor returns false.
inline bool for_each_element(const Ring& r, const std::function<bool(const Element&)>& visit) {
    switch (r.kind()) {
    case Ring::Kind::Mod:
        for (Int v = 0; v < r.modulus(); ++v)
            if (!visit(Element::from_int(r, v))) return false;
        return true;
    case Ring::Kind::Product:
        return for_each_element(r.left(), [&](const Element& a) {
            return for_each_element(r.right(), [&](const Element& b) { return visit(Element::pair(r, a, b)); });
        });
    default: throw Error("infinite ring: cannot enumerate " + r.to_string());
    }
}

inline std::vector<Element> enumerate_elements(const Ring& r) {
    std::vector<Element> out;
    for_each_element(r, [&](const Element& e) {
        out.push_back(e);
        return true;
    });
    return out;
}

/// Visits the elements of Zloc/p with height max(|a|, b) <= bound in order
/// of increasing height; within one height by denominator, then numerator.
inline bool for_each_local_by_height(const Ring& r, const Int& bound,
                                     const std::function<bool(const Element&)>& visit) {
    const Int& p = r.prime();
    for (Int h = 1; h <= bound; ++h) {
        for (Int b = 1; b <= h; ++b) {
            if (divides(p, b)) continue;
            if (b == h) {
                for (Int a = -h; a <= h; ++a) {
                    if (gcd(a, b) != 1) continue;
                    if (!visit(Element::fraction(r, a, b))) return false;
                }
            } else {
                if (gcd(h, b) != 1) continue;
                if (!visit(Element::fraction(r, -h, b))) return false;
                if (!visit(Element::fraction(r, h, b))) return false;
            }
        }
    }
    return true;
}

/// Visits integers in [-bound, bound] as 0, -1, 1, -2, 2, ...
inline bool for_each_integer_by_size(const Int& bound, const std::function<bool(const Element&)>& visit) {
    const Ring z = Ring::integers();
    if (!visit(Element::from_int(z, 0))) return false;
    for (Int k = 1; k <= bound; ++k) {
        if (!visit(Element::from_int(z, -k))) return false;
        if (!visit(Element::from_int(z, k))) return false;
    }
    return true;
}

/// a/b in Zloc/p reduced to a * b^-1 mod p^n (the coherent reduction).
inline Element coherent_reduce(const Element& x, unsigned long n) {
    if (x.ring().kind() != Ring::Kind::Local) throw Error("coherent_reduce needs a Zloc/p element");
    if (n == 0) throw Error("precision must be positive");
    Int m = pow_int(x.ring().prime(), n);
    Int inv;
    if (!mod_inverse(x.denominator(), m, inv)) throw Error("denominator not invertible");
    return Element::from_int(Ring::mod(m), x.numerator() * inv);
}

} // namespace ghostring
