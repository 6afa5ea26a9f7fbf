#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "ghostring/ghostring.hpp"

#include "oracles.hpp"

using namespace ghostring;

namespace {

const Ring Z = Ring::integers();

Element z(long v) { return Element::from_int(Z, v); }

Element at(const Ring& r, long v) { return Element::from_int(r, v); }

std::uint64_t base_seed() {
    const char* s = std::getenv("GHOSTRING_SEED");
    return s ? std::strtoull(s, nullptr, 10) : 20240601ULL;
}

long eval_z(const Term& t, const std::map<std::string, long>& env) {
    switch (t.kind()) {
    case Term::Kind::Zero: return 0;
    case Term::Kind::One: return 1;
    case Term::Kind::Var: return env.at(t.name());
    case Term::Kind::Neg: return -eval_z(t.left(), env);
    case Term::Kind::Add: return eval_z(t.left(), env) + eval_z(t.right(), env);
    case Term::Kind::Mul: return eval_z(t.left(), env) * eval_z(t.right(), env);
    }
    return 0;
}

// Brute force over [-b, b]^k: the witness of least height, ties broken by
// numeric lexicographic order of the bound values.
std::optional<std::vector<long>> least_integer_witness(const NormalForm& nf, std::map<std::string, long> env, long b) {
    std::optional<std::vector<long>> best;
    long best_h = b + 1;
    std::vector<long> vals(nf.bound_vars.size(), -b);
    while (true) {
        for (std::size_t i = 0; i < vals.size(); ++i) env[nf.bound_vars[i]] = vals[i];
        bool sat = false;
        for (const auto& d : nf.matrix) {
            bool all = true;
            for (const auto& [l, r] : d) all = all && eval_z(l, env) == eval_z(r, env);
            sat = sat || all;
        }
        if (sat) {
            long h = 0;
            for (long v : vals) h = std::max(h, std::labs(v));
            if (h < best_h || (h == best_h && vals < *best)) {
                best_h = h;
                best = vals;
            }
        }
        std::size_t i = vals.size();
        while (i > 0 && vals[i - 1] == b) vals[--i] = -b;
        if (i == 0) break;
        ++vals[i - 1];
    }
    return best;
}

} // namespace

TEST_CASE("finite rings: exhaustive verdicts", "[eval]") {
    Ring z8 = Ring::mod(8);
    Formula even = parse_formula("exists y. x = 2*y");
    EvalResult six = satisfies(z8, even, {{"x", at(z8, 6)}}, {});
    REQUIRE(six.holds());
    CHECK(six.witness.at("y").to_string() == "3");
    CHECK(verify_witness(z8, even, six.witness));
    CHECK(satisfies(z8, even, {{"x", at(z8, 5)}}, {}).status == EvalResult::Status::Fails);
}

TEST_CASE("integers: box search", "[eval]") {
    SearchBudget b;
    b.integer_box_bound = 10;
    EvalResult r = satisfies(Z, parse_formula("exists y. x = 2*y + 1"), {{"x", z(7)}}, b);
    REQUIRE(r.holds());
    CHECK(r.witness.at("y") == z(3));
    EvalResult none = satisfies(Z, parse_formula("exists y. y * y = 2"), {}, b);
    CHECK(none.status == EvalResult::Status::UnknownUpTo);
    CHECK(none.budget == b);
    EvalResult far = satisfies(Z, parse_formula("exists y. y = 11"), {}, b);
    CHECK(far.status == EvalResult::Status::UnknownUpTo);
}

TEST_CASE("integers: the least witness is returned", "[eval][order]") {
    const char* cases[] = {
        "exists y. y * y = 4",
        "exists y, w. y * w = 6 and y + w = 5",
        "exists y, w. y * w = 6",
        "exists y, w. y * y + w * w = 25",
        "exists y, w. y - w = 3 or y + w = 1",
        "exists a, b. a * a = b and b = x",
        "exists a, b. (a = 2 and b * b = 1) or (a + b = 0 and a * a = 4)",
    };
    for (const char* text : cases) {
        INFO(text);
        Formula f = parse_formula(text);
        SearchBudget b;
        b.integer_box_bound = 6;
        EvalResult r = satisfies(Z, f, {{"x", z(4)}}, b);
        auto expected = least_integer_witness(normalize(f), {{"x", 4}}, 6);
        REQUIRE(r.holds() == expected.has_value());
        if (!expected) continue;
        NormalForm nf = normalize(f);
        for (std::size_t i = 0; i < nf.bound_vars.size(); ++i)
            CHECK(r.witness.at(nf.bound_vars[i]) == z((*expected)[i]));
    }
}

TEST_CASE("2-local and 3-local rings", "[eval][local]") {
    SearchBudget b;
    b.precision_limit = 4;
    EvalResult two = satisfies(Ring::local(3), parse_formula("exists x. x*x = 2"), {}, b);
    CHECK(two.status == EvalResult::Status::RefutedAtPrecision);
    CHECK(two.precision == 1);
    // Monotone: no square root of 2 modulo any higher power either.
    for (long m : {3L, 9L, 27L, 81L}) CHECK(oracle::least_square_root(2, m) == -1);

    SearchBudget c;
    c.precision_limit = 3;
    c.local_height_bound = 50;
    EvalResult seven = satisfies(Ring::local(3), parse_formula("exists x. x*x = 7"), {}, c);
    CHECK(seven.status == EvalResult::Status::UnknownUpTo);
    REQUIRE(seven.modular_witnesses.size() == 3);
    long m = 1;
    for (std::size_t i = 0; i < 3; ++i) {
        m *= 3;
        CHECK(seven.modular_witnesses[i].first == i + 1);
        CHECK(seven.modular_witnesses[i].second.at("x").value() == oracle::least_square_root(7, m));
    }
    CHECK(seven.modular_witnesses[2].second.at("x").to_string() == "13");

    EvalResult third = satisfies(Ring::local(2), parse_formula("exists y. 3*y = 1"), {}, {});
    REQUIRE(third.holds());
    CHECK(third.witness.at("y").to_string() == "1/3");
    CHECK(satisfies(Ring::local(3), parse_formula("exists y. 3*y = 1"), {}, {}).status ==
          EvalResult::Status::RefutedAtPrecision);
}

TEST_CASE("local refutation reduces the environment first", "[eval][local]") {
    Ring r = Ring::local(2);
    Formula f = parse_formula("exists y. x = 2*y");
    EvalResult odd = satisfies(r, f, {{"x", Element::fraction(r, 5, 7)}}, {});
    CHECK(odd.status == EvalResult::Status::RefutedAtPrecision);
    CHECK(odd.precision == 1);
    EvalResult even = satisfies(r, f, {{"x", Element::fraction(r, 22, 7)}}, {});
    REQUIRE(even.holds());
    CHECK(even.witness.at("y").to_string() == "11/7");
}

TEST_CASE("evaluation errors", "[eval]") {
    Formula f = parse_formula("exists y. x = 2*y");
    CHECK_THROWS_WITH(satisfies(Z, f, {}, {}), Catch::Matchers::ContainsSubstring("unbound free variable"));
    CHECK_THROWS_WITH(satisfies(Z, f, {{"x", at(Ring::mod(3), 1)}}, {}),
                      Catch::Matchers::ContainsSubstring("cross-ring"));
    SearchBudget bad;
    bad.integer_box_bound = 0;
    CHECK_THROWS(satisfies(Z, f, {{"x", z(2)}}, bad));
}

TEST_CASE("transport examples", "[transport]") {
    Formula even = parse_formula("exists y. x = 2*y");
    Assignment img = transport_witness(Homomorphism::reduce_mod(4), even, {{"x", z(6)}, {"y", z(3)}});
    CHECK(img.to_string() == "{x=2, y=3}");
    Formula triple = parse_formula("exists y. x = 3*y");
    CHECK(transport_witness(Homomorphism::reduce_mod(2), triple, {{"x", z(6)}, {"y", z(2)}}).to_string() ==
          "{x=0, y=0}");
    CHECK_THROWS_WITH(transport_witness(Homomorphism::reduce_mod(4), even, {{"x", z(6)}, {"y", z(2)}}),
                      Catch::Matchers::ContainsSubstring("source witness invalid"));
    CHECK_THROWS(transport_witness(Homomorphism::reduce_mod(4), even, {{"x", at(Ring::mod(3), 0)}, {"y", z(0)}}));
}

TEST_CASE("the 5/7 cycle transports into every quotient of the 2-adic tower", "[transport]") {
    System d = collatz_system(Z);
    Formula phi = itinerary_sentence(d, {1, 0, 1, 0, 0, 0});
    EvalResult r = satisfies(Ring::local(2), phi, {}, {});
    REQUIRE(r.holds());
    for (unsigned long n = 1; n <= r.budget.precision_limit; ++n) {
        Assignment img = transport_witness(Homomorphism::local_to_mod_pk(2, n), phi, r.witness);
        CHECK(verify_witness(Ring::mod(pow_int(2, n)), phi, img));
        if (n == 6) CHECK(img.at("x0").to_string() == "19");
    }
}

TEST_CASE("preservation on random true instances", "[transport][property]") {
    std::uint64_t seed = base_seed();
    INFO("GHOSTRING_SEED base " << seed);
    for (std::uint64_t i = 0; i < 200; ++i) {
        TrueInstance t = random_true_instance(seed + i);
        INFO(to_string(t.formula) << " at " << t.witness.to_string());
        REQUIRE(verify_witness(Z, t.formula, t.witness));
        Int n = 2 + Int(static_cast<long>((seed + i) % 49));
        Assignment img = transport_witness(Homomorphism::reduce_mod(n), t.formula, t.witness);
        CHECK(verify_witness(Ring::mod(n), t.formula, img));
    }
}

TEST_CASE("solutions enumeration", "[eval]") {
    Ring z16 = Ring::mod(16);
    std::vector<std::string> ys;
    for_each_solution(z16, parse_formula("exists y. x = 2*y"), {{"x", at(z16, 4)}}, {}, [&](const Assignment& w) {
        ys.push_back(w.at("y").to_string());
        return true;
    });
    std::sort(ys.begin(), ys.end());
    CHECK(ys == std::vector<std::string>{"10", "2"});
}
