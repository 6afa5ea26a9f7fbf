#include <catch_amalgamated.hpp>

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ghostring/ghostring.hpp"

#include "oracles.hpp"

using namespace ghostring;

namespace {

using Raw = std::pair<long, long>;

oracle::Frac step(oracle::Frac x, CollatzVariant v) {
    oracle::Frac y = oracle::collatz(x);
    if (v == CollatzVariant::Accelerated && oracle::mod(x.num, 2) == 1) y = oracle::reduce(y.num / 2, y.den);
    return y;
}

// Every fraction num/den (odd den < 3^k, |num| <= bound) whose orbit returns
// after exactly k steps for the first time, grouped by orbit. A periodic point
// has denominator dividing 2^D - 3^m, which is below 3^k in absolute value.
std::set<std::set<Raw>> periodic_orbits(std::size_t k, CollatzVariant v, long bound) {
    std::set<std::set<Raw>> out;
    long den_max = 1;
    for (std::size_t i = 0; i < k; ++i) den_max *= 3;
    if (v == CollatzVariant::Raw) den_max = std::min(den_max, 1L << k);
    for (long den = 1; den < den_max; den += 2)
        for (long num = -bound; num <= bound; ++num) {
            oracle::Frac x = oracle::reduce(num, den);
            if (x.den != den) continue;
            std::set<Raw> orbit{{x.num, x.den}};
            oracle::Frac cur = step(x, v);
            std::size_t period = 1;
            while (period <= k && !(cur.num == x.num && cur.den == x.den)) {
                orbit.insert({cur.num, cur.den});
                cur = step(cur, v);
                ++period;
            }
            if (period == k) out.insert(orbit);
        }
    return out;
}

std::set<Raw> as_raw(const std::vector<Element>& orbit) {
    std::set<Raw> out;
    for (const auto& e : orbit) out.insert({e.numerator().get_si(), e.denominator().get_si()});
    return out;
}

PeriodicPoint point(const CycleOutcome& o) {
    REQUIRE(std::holds_alternative<PeriodicPoint>(o));
    return std::get<PeriodicPoint>(o);
}

Element frac(long a, long b) { return Element::fraction(Ring::local(2), a, b); }

} // namespace

TEST_CASE("the transition relation matches the map", "[collatz]") {
    Formula tau = collatz_tau();
    for (long x = -20; x <= 20; ++x) {
        long next = x % 2 == 0 ? x / 2 : 3 * x + 1;
        for (long y = -70; y <= 70; ++y)
            CHECK(oracle::holds(tau, {{"x", oracle::mod(x, 1000)}, {"x'", oracle::mod(y, 1000)}}, 1000) ==
                  (y == next));
    }
    // The accelerated relation over Zloc/2 agrees with the exact step.
    Ring r = Ring::local(2);
    Formula acc = collatz_tau(CollatzVariant::Accelerated);
    for (const Element& x : {frac(5, 7), frac(1, 3), frac(-1, 1), frac(22, 7)}) {
        Element y = collatz_step(x, CollatzVariant::Accelerated);
        EvalResult res = satisfies(r, acc, {{"x", x}, {"x'", y}}, {});
        CHECK(res.holds());
    }
}

TEST_CASE("parity vectors", "[collatz][vector]") {
    auto text = [](std::size_t k, CollatzVariant v) {
        std::vector<std::string> out;
        for (const auto& p : admissible_parity_vectors(k, v)) out.push_back(p.to_string());
        return out;
    };
    CHECK(text(1, CollatzVariant::Raw) == std::vector<std::string>{"0"});
    CHECK(text(2, CollatzVariant::Raw) == std::vector<std::string>{"00", "01", "10"});
    CHECK(text(3, CollatzVariant::Raw) == std::vector<std::string>{"000", "001", "010", "100"});
    CHECK(text(2, CollatzVariant::Accelerated).size() == 4);

    ParityVector v = parse_parity_vector("001010");
    CHECK(v.least_rotation().to_string() == "000101");
    CHECK(v.greatest_rotation().to_string() == "101000");
    CHECK(v.primitive());
    CHECK_FALSE(parse_parity_vector("1010").primitive());
    CHECK_FALSE(parse_parity_vector("11").admissible());
    CHECK(parse_parity_vector("11", CollatzVariant::Accelerated).admissible());
    CHECK_THROWS(parse_parity_vector("102"));
    CHECK_THROWS(parse_parity_vector(""));
}

TEST_CASE("admissible counts are Lucas numbers", "[collatz][vector]") {
    std::vector<std::size_t> lucas = oracle::lucas(16);
    for (unsigned k = 1; k <= 16; ++k) {
        INFO("k = " << k);
        std::size_t n = admissible_parity_vectors(k, CollatzVariant::Raw).size();
        CHECK(n == oracle::count_raw_admissible(k));
        CHECK(n == lucas[k - 1]);
        CHECK(admissible_parity_vectors(k, CollatzVariant::Accelerated).size() == (1UL << k));
    }
}

TEST_CASE("affine composites", "[collatz][affine]") {
    auto abc = [](const char* s, CollatzVariant v = CollatzVariant::Raw) {
        AffineComposite f = affine_composite(parse_parity_vector(s, v));
        return std::tuple<long, long, unsigned long>{f.A.get_si(), f.C.get_si(), f.D};
    };
    CHECK(abc("100") == std::tuple<long, long, unsigned long>{3, 1, 2});
    CHECK(abc("10100") == std::tuple<long, long, unsigned long>{9, 5, 3});
    CHECK(abc("0") == std::tuple<long, long, unsigned long>{1, 0, 1});
    CHECK(abc("1", CollatzVariant::Accelerated) == std::tuple<long, long, unsigned long>{3, 1, 1});
    CHECK_THROWS(affine_composite(parse_parity_vector("11")));

    // Composite applied to x equals k exact steps, on sample points.
    for (const char* s : {"100", "10100", "101000", "0010", "100000"}) {
        ParityVector v = parse_parity_vector(s);
        AffineComposite f = affine_composite(v);
        for (long x0 : {-7L, 3L, 40L, 128L}) {
            // Pick x with the required parities: x = x0 * 2^k + residue.
            for (long x = x0 * 64; x < x0 * 64 + 64; ++x) {
                oracle::Frac cur{x, 1};
                bool ok = true;
                for (int b : v.bits) {
                    ok = ok && oracle::mod(cur.num, 2) == b;
                    cur = oracle::collatz(cur);
                }
                if (!ok) continue;
                CHECK(cur.num * (1L << f.D) == f.A.get_si() * x + f.C.get_si());
            }
        }
    }
}

TEST_CASE("cycles from parity vectors", "[collatz][cycle]") {
    CHECK(point(cycle_from_parity_vector(parse_parity_vector("100"))).value == frac(1, 1));
    CHECK(point(cycle_from_parity_vector(parse_parity_vector("10"))).value == frac(-1, 1));
    CHECK(point(cycle_from_parity_vector(parse_parity_vector("0"))).value == frac(0, 1));
    PeriodicPoint g = point(cycle_from_parity_vector(parse_parity_vector("101000")));
    CHECK(g.value == frac(5, 7));
    CHECK(g.kind == CycleKind::GhostCycle);
    std::vector<std::string> orbit;
    for (const auto& e : g.orbit) orbit.push_back(e.to_string());
    CHECK(orbit == std::vector<std::string>{"5/7", "22/7", "11/7", "40/7", "20/7", "10/7"});
    PeriodicPoint f = point(cycle_from_parity_vector(parse_parity_vector("10100")));
    CHECK(f.value.to_string() == "-5");
    CHECK(f.kind == CycleKind::IntegerCycle);

    // The orbit follows the oracle map and closes.
    for (const char* s : {"100", "10", "10100", "101000", "100000", "1000100"}) {
        INFO(s);
        PeriodicPoint p = point(cycle_from_parity_vector(parse_parity_vector(s)));
        oracle::Frac cur{p.value.numerator().get_si(), p.value.denominator().get_si()};
        for (std::size_t i = 0; i < p.orbit.size(); ++i) {
            CHECK(p.orbit[i] == frac(cur.num, cur.den));
            CHECK(oracle::mod(cur.num, 2) == p.vector.bits[i]);
            cur = oracle::collatz(cur);
        }
        CHECK(frac(cur.num, cur.den) == p.value);
    }

    auto reason = [](const char* s, CollatzVariant v = CollatzVariant::Raw) {
        CycleOutcome o = cycle_from_parity_vector(parse_parity_vector(s, v));
        REQUIRE(std::holds_alternative<Rejection>(o));
        return std::get<Rejection>(o).reason;
    };
    CHECK(reason("11") == Rejection::Reason::Inadmissible);
    // 2^D - 3^m is always odd when D >= 1; accelerated "1" gives 2 - 3 = -1.
    CHECK(point(cycle_from_parity_vector(parse_parity_vector("1", CollatzVariant::Accelerated))).value == frac(-1, 1));
}

TEST_CASE("census agrees with a brute-force search for periodic fractions", "[collatz][census]") {
    const std::size_t k_max = 6;
    std::vector<CensusRow> rows = ghost_census(k_max);
    REQUIRE(rows.size() == k_max);
    std::vector<std::size_t> lucas = oracle::lucas(k_max);
    for (const auto& row : rows) {
        INFO("k = " << row.k);
        CHECK(row.admissible == lucas[row.k - 1]);
        std::set<std::set<Raw>> expected = periodic_orbits(row.k, CollatzVariant::Raw, 3000);
        std::set<std::set<Raw>> got;
        std::size_t ghosts = 0, integers = 0;
        for (const auto& e : row.entries) {
            if (!e.primitive) continue;
            if (const auto* p = std::get_if<PeriodicPoint>(&e.outcome)) {
                got.insert(as_raw(p->orbit));
                (p->kind == CycleKind::GhostCycle ? ghosts : integers) += 1;
            }
        }
        CHECK(got == expected);
        CHECK(row.ghost_cycles == ghosts);
        CHECK(row.integer_cycles == integers);
        CHECK(row.classes + row.repeats == row.entries.size());
        if (row.k <= 3) CHECK(row.ghost_cycles == 0);
    }

    std::set<std::string> ghosts6;
    for (const auto& e : rows[5].entries)
        if (const auto* p = std::get_if<PeriodicPoint>(&e.outcome); p && e.primitive && p->kind == CycleKind::GhostCycle)
            ghosts6.insert(p->value.to_string());
    CHECK(ghosts6.count("5/7") == 1);
    CHECK(ghosts6.count("1/29") == 1);
}

TEST_CASE("accelerated census agrees with brute force", "[collatz][census]") {
    std::vector<CensusRow> rows = ghost_census(5, CollatzVariant::Accelerated);
    for (const auto& row : rows) {
        INFO("k = " << row.k);
        CHECK(row.admissible == (1UL << row.k));
        std::set<std::set<Raw>> got;
        for (const auto& e : row.entries)
            if (const auto* p = std::get_if<PeriodicPoint>(&e.outcome); p && e.primitive) got.insert(as_raw(p->orbit));
        CHECK(got == periodic_orbits(row.k, CollatzVariant::Accelerated, 3000));
    }
}

TEST_CASE("bridge to the 2-power quotients", "[collatz][bridge]") {
    PeriodicPoint g = point(cycle_from_parity_vector(parse_parity_vector("101000")));
    CHECK(bridge_to_quotient(g, 6).to_string() == "(19,58,29,24,12,38)");
    PeriodicPoint one = point(cycle_from_parity_vector(parse_parity_vector("100")));
    CHECK(bridge_to_quotient(one, 3).to_string() == "(1,4,2)");
    CHECK_THROWS(bridge_to_quotient(g, 0));

    for (unsigned long n = 1; n <= 10; ++n) {
        long m = 1L << n;
        CycleWitness c = bridge_to_quotient(g, n);
        System d = collatz_system(Ring::mod(m));
        CHECK(verify_cycle(d, c));
        for (std::size_t i = 0; i < c.states.size(); ++i) {
            const Element& x = g.orbit[i];
            CHECK(c.states[i][0].value() ==
                  oracle::reduce_mod({x.numerator().get_si(), x.denominator().get_si()}, m));
            // Coherent: reducing the mod 2^(n+1) value gives the mod 2^n one.
            if (n < 10)
                CHECK(oracle::mod(bridge_to_quotient(g, n + 1).states[i][0].value().get_si(), m) ==
                      c.states[i][0].value());
        }
    }
}

TEST_CASE("quotient cycles are classified against exact periodic points", "[collatz][quotient]") {
    for (unsigned long n : {1UL, 3UL, 6UL}) {
        const long m = 1L << n;
        const std::size_t k_max = 6;
        INFO("mod " << m);
        std::vector<QuotientCycleClass> classes = classify_quotient_cycles(n, k_max);
        auto simple = oracle::simple_cycles(m, oracle::collatz_edges(m), k_max);
        CHECK(classes.size() == simple.size());

        // Reductions of every brute-force periodic orbit, as canonical cycles.
        std::set<std::vector<long>> reduced;
        for (std::size_t k = 1; k <= k_max; ++k)
            for (const auto& orbit : periodic_orbits(k, CollatzVariant::Raw, 3000)) {
                // Rebuild the orbit in order from its least element.
                oracle::Frac cur{orbit.begin()->first, orbit.begin()->second};
                std::vector<long> seq;
                for (std::size_t i = 0; i < k; ++i) {
                    seq.push_back(oracle::reduce_mod(cur, m));
                    cur = oracle::collatz(cur);
                }
                std::vector<long> best = seq;
                for (std::size_t r = 1; r < seq.size(); ++r) {
                    std::vector<long> c(seq.begin() + r, seq.end());
                    c.insert(c.end(), seq.begin(), seq.begin() + r);
                    best = std::min(best, c);
                }
                reduced.insert(best);
            }
        for (const auto& q : classes) {
            INFO(q.cycle.to_string());
            std::vector<long> states;
            for (const auto& s : q.cycle.canonical().states) states.push_back(s[0].value().get_si());
            CHECK(simple.count(states) == 1);
            CHECK(q.source.has_value() == (reduced.count(states) == 1));
        }
    }
}
