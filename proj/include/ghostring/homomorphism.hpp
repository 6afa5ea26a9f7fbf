#pragma once

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
#include "ring.hpp"

namespace ghostring {

/// A ring homomorphism between two backends. Immutable.
class Homomorphism {
public:
    enum class Kind {
        Identity,
        ReduceModN,               // Z -> Z/n
        IncludeIntegersIntoLocal, // Z -> Zloc/p
        LocalToModPk,             // Zloc/p -> Z/p^N, a/b -> a * b^-1
        ProjectQuotient,          // Z/m -> Z/n, n | m
        ComponentPair,            // S -> T1 x T2
        Compose                   // outer after inner
    };

    static Homomorphism identity(const Ring& r) { return Homomorphism(Kind::Identity, r, r, 0, {}); }

    static Homomorphism reduce_mod(const Int& n) {
        return Homomorphism(Kind::ReduceModN, Ring::integers(), Ring::mod(n), 0, {});
    }

    static Homomorphism include_into_local(const Int& p) {
        return Homomorphism(Kind::IncludeIntegersIntoLocal, Ring::integers(), Ring::local(p), 0, {});
    }

    static Homomorphism local_to_mod_pk(const Int& p, unsigned long precision) {
        if (precision == 0) throw Error("precision must be positive");
        return Homomorphism(Kind::LocalToModPk, Ring::local(p), Ring::mod(pow_int(p, precision)), precision, {});
    }

    static Homomorphism project(const Int& m, const Int& n) {
        if (!divides(n, m)) throw Error("Z/" + ghostring::to_string(m) + " -> Z/" + ghostring::to_string(n) + " needs n | m");
        return Homomorphism(Kind::ProjectQuotient, Ring::mod(m), Ring::mod(n), 0, {});
    }

    static Homomorphism pair(const Homomorphism& a, const Homomorphism& b) {
        if (!(a.source() == b.source())) throw Error("paired homomorphisms need a common source");
        return Homomorphism(Kind::ComponentPair, a.source(), Ring::product(a.target(), b.target()), 0, {a, b});
    }

    static Homomorphism compose(const Homomorphism& outer, const Homomorphism& inner) {
        if (!(inner.target() == outer.source()))
            throw Error("cannot compose: " + inner.target().to_string() + " is not " + outer.source().to_string());
        return Homomorphism(Kind::Compose, inner.source(), outer.target(), 0, {outer, inner});
    }

    Kind kind() const noexcept { return node_->kind; }
    const Ring& source() const noexcept { return node_->source; }
    const Ring& target() const noexcept { return node_->target; }
    unsigned long precision() const noexcept { return node_->precision; }
    const Homomorphism& outer() const { return node_->parts.at(0); }
    const Homomorphism& inner() const { return node_->parts.at(1); }
    const Homomorphism& first() const { return node_->parts.at(0); }
    const Homomorphism& second() const { return node_->parts.at(1); }

    Element apply(const Element& x) const {
        if (!(x.ring() == source()))
            throw Error("element of " + x.ring().to_string() + " given to a map from " + source().to_string());
        switch (kind()) {
        case Kind::Identity: return x;
        case Kind::ReduceModN:
        case Kind::IncludeIntegersIntoLocal: return Element::from_int(target(), x.value());
        case Kind::LocalToModPk: return coherent_reduce(x, precision());
        case Kind::ProjectQuotient: return Element::from_int(target(), x.value());
        case Kind::ComponentPair: return Element::pair(target(), first().apply(x), second().apply(x));
        case Kind::Compose: return outer().apply(inner().apply(x));
        }
        throw Error("unreachable");
    }

    Element operator()(const Element& x) const { return apply(x); }

    std::string to_string() const {
        switch (kind()) {
        case Kind::Identity:
            return source() == Ring::integers() ? "id" : "id:" + source().to_string();
        case Kind::ReduceModN: return "mod:" + ghostring::to_string(target().modulus());
        case Kind::IncludeIntegersIntoLocal: return "loc:" + ghostring::to_string(target().prime());
        case Kind::LocalToModPk:
            return "loc" + ghostring::to_string(source().prime()) + "->mod:" +
                   ghostring::to_string(target().modulus());
        case Kind::ProjectQuotient:
            return "proj:" + ghostring::to_string(source().modulus()) + "->" +
                   ghostring::to_string(target().modulus());
        case Kind::ComponentPair: return "pair(" + first().to_string() + "," + second().to_string() + ")";
        case Kind::Compose: return "compose(" + outer().to_string() + "," + inner().to_string() + ")";
        }
        return {};
    }

    /// True when every element of the target is hit.
    bool is_surjective() const {
        switch (kind()) {
        case Kind::Identity:
        case Kind::ReduceModN:
        case Kind::ProjectQuotient:
        case Kind::LocalToModPk: return true;
        case Kind::IncludeIntegersIntoLocal: return false;
        case Kind::ComponentPair:
            // Z -> Z/a x Z/b is onto exactly when gcd(a, b) = 1 (CRT).
            if (first().kind() == Kind::ReduceModN && second().kind() == Kind::ReduceModN)
                return gcd(first().target().modulus(), second().target().modulus()) == 1;
            return false;
        case Kind::Compose: return outer().is_surjective() && inner().is_surjective();
        }
        return false;
    }

private:
    struct Node {
        Kind kind;
        Ring source;
        Ring target;
        unsigned long precision;
        std::vector<Homomorphism> parts;
    };

    Homomorphism(Kind k, Ring s, Ring t, unsigned long precision, std::vector<Homomorphism> parts)
        : node_(std::make_shared<const Node>(Node{k, std::move(s), std::move(t), precision, std::move(parts)})) {}

    std::shared_ptr<const Node> node_;
};

namespace detail {

inline std::pair<std::string, std::string> split_args(std::string_view inside) {
    int depth = 0;
    for (std::size_t i = 0; i < inside.size(); ++i) {
        if (inside[i] == '(') ++depth;
        if (inside[i] == ')') --depth;
        if (inside[i] == ',' && depth == 0)
            return {std::string(inside.substr(0, i)), std::string(inside.substr(i + 1))};
    }
    throw Error("expected two comma-separated homomorphisms in '" + std::string(inside) + "'");
}

} // namespace detail

/// Parses "id", "id:R", "mod:N", "loc:P", "locP->mod:M" (M a power of P),
/// "proj:M->N", "pair(H1,H2)" and "compose(OUTER,INNER)".
inline Homomorphism parse_homomorphism(std::string_view text) {
    std::string s(text);
    auto fail = [&](const std::string& why) -> Error { return Error("bad homomorphism '" + s + "': " + why); };
    try {
        if (s == "id") return Homomorphism::identity(Ring::integers());
        if (s.rfind("id:", 0) == 0) return Homomorphism::identity(parse_ring(s.substr(3)));
        if (s.rfind("mod:", 0) == 0) return Homomorphism::reduce_mod(parse_int(s.substr(4)));
        if (s.rfind("loc:", 0) == 0) return Homomorphism::include_into_local(parse_int(s.substr(4)));
        if (s.rfind("proj:", 0) == 0) {
            auto arrow = s.find("->");
            if (arrow == std::string::npos) throw fail("expected proj:M->N");
            return Homomorphism::project(parse_int(s.substr(5, arrow - 5)), parse_int(s.substr(arrow + 2)));
        }
        if (s.rfind("loc", 0) == 0) {
            auto arrow = s.find("->mod:");
            if (arrow == std::string::npos) throw fail("expected locP->mod:M");
            Int p = parse_int(s.substr(3, arrow - 3));
            Int m = parse_int(s.substr(arrow + 6));
            unsigned long n = 0;
            Int power = 1;
            while (power < m) {
                power *= p;
                ++n;
            }
            if (power != m || n == 0) throw fail(to_string(m) + " is not a positive power of " + to_string(p));
            return Homomorphism::local_to_mod_pk(p, n);
        }
        for (const char* head : {"pair(", "compose("}) {
            std::string h(head);
            if (s.rfind(h, 0) == 0 && s.back() == ')') {
                auto [a, b] = detail::split_args(std::string_view(s).substr(h.size(), s.size() - h.size() - 1));
                Homomorphism ha = parse_homomorphism(a), hb = parse_homomorphism(b);
                return h == "pair(" ? Homomorphism::pair(ha, hb) : Homomorphism::compose(ha, hb);
            }
        }
    } catch (const Error& e) {
        std::string what = e.what();
        if (what.rfind("bad homomorphism", 0) == 0) throw;
        throw fail(what);
    }
    throw fail("unknown form");
}

/// Outcome of a homomorphism-law check.
struct LawCheck {
    bool passed = true;
    std::string counterexample;
    explicit operator bool() const noexcept { return passed; }
};

/// Checks f(0)=0, f(1)=1 and additivity, multiplicativity and negation on
/// every sampled pair. Works for any callable, so corrupted maps can be
/// tested too.
template <class Map>
LawCheck check_hom_laws(const Ring& source, Map&& f, const std::vector<std::pair<Element, Element>>& samples) {
    auto mismatch = [](const std::string& law, const Element& lhs, const Element& rhs) {
        return LawCheck{false, law + ": " + lhs.to_string() + " != " + rhs.to_string()};
    };
    Element z = f(Element::zero(source));
    if (!z.is_zero()) return mismatch("h(0) = 0", z, Element::zero(z.ring()));
    Element one = f(Element::one(source));
    if (!(one == Element::one(one.ring()))) return mismatch("h(1) = 1", one, Element::one(one.ring()));
    for (const auto& [a, b] : samples) {
        Element fa = f(a), fb = f(b);
        std::string at = " at a=" + a.to_string() + ", b=" + b.to_string();
        if (Element l = f(a + b), r = fa + fb; !(l == r)) return mismatch("h(a+b) = h(a)+h(b)" + at, l, r);
        if (Element l = f(a * b), r = fa * fb; !(l == r)) return mismatch("h(a*b) = h(a)*h(b)" + at, l, r);
        if (Element l = f(-a), r = -fa; !(l == r)) return mismatch("h(-a) = -h(a)" + at, l, r);
    }
    return {};
}

inline LawCheck check_hom_laws(const Homomorphism& h, const std::vector<std::pair<Element, Element>>& samples) {
    return check_hom_laws(h.source(), [&](const Element& x) { return h.apply(x); }, samples);
}

} // namespace ghostring
