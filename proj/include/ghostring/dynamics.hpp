#pragma once

/**
 * @file dynamics.hpp
 * @brief Arithmetic dynamical systems: a ring, a state formula and a
 *        transition formula, both positive existential.
 *
 * Interpreting the same formulas in another ring gives a simulation. Over
 * quotient rings the transition relation is genuinely multivalued (x = 2y
 * has two solutions for y modulo 2^N), so successors are sets and cycles are
 * closed walks in the relation graph.
 */

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "eval.hpp"
#include "formula.hpp"
#include "homomorphism.hpp"
#include "normal_form.hpp"
#include "parser.hpp"
#include "ring.hpp"
#include "semantics.hpp"

namespace ghostring {

using State = std::vector<Element>;

inline std::string to_string(const State& s) {
    std::string out = "(";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + s[i].to_string();
    return out + ")";
}

/// An arithmetic dynamical system (R, sigma, tau) of arity k.
class System {
public:
    System(Ring ring, Formula sigma, Formula tau, std::vector<std::string> state_vars,
           std::vector<std::string> next_vars)
        : ring_(std::move(ring)), sigma_(std::move(sigma)), tau_(std::move(tau)),
          state_vars_(std::move(state_vars)), next_vars_(std::move(next_vars)) {
        if (state_vars_.empty() || state_vars_.size() != next_vars_.size())
            throw Error("a system needs k >= 1 state variables and k next-state variables");
        std::set<std::string> xs(state_vars_.begin(), state_vars_.end());
        std::set<std::string> all = xs;
        all.insert(next_vars_.begin(), next_vars_.end());
        if (xs.size() != state_vars_.size() || all.size() != 2 * state_vars_.size())
            throw Error("state and next-state variables must be distinct");
        for (const auto& v : free_vars(sigma_))
            if (!xs.count(v)) throw Error("sigma mentions '" + v + "', which is not a state variable");
        for (const auto& v : free_vars(tau_))
            if (!all.count(v)) throw Error("tau mentions '" + v + "', which is not a state variable");
    }

    /// Conventional x1..xk / x1'..xk' naming used by .ads files.
    static System standard(Ring ring, std::size_t arity, Formula sigma, Formula tau) {
        std::vector<std::string> xs, ys;
        for (std::size_t i = 1; i <= arity; ++i) {
            xs.push_back("x" + std::to_string(i));
            ys.push_back("x" + std::to_string(i) + "'");
        }
        return System(std::move(ring), std::move(sigma), std::move(tau), std::move(xs), std::move(ys));
    }

    const Ring& ring() const noexcept { return ring_; }
    const Formula& sigma() const noexcept { return sigma_; }
    const Formula& tau() const noexcept { return tau_; }
    std::size_t arity() const noexcept { return state_vars_.size(); }
    const std::vector<std::string>& state_vars() const noexcept { return state_vars_; }
    const std::vector<std::string>& next_vars() const noexcept { return next_vars_; }

    /// The same defining formulas interpreted in another ring.
    System in(const Ring& r) const { return System(r, sigma_, tau_, state_vars_, next_vars_); }

    Assignment bind(const State& s) const {
        if (s.size() != arity()) throw Error("state has the wrong arity");
        Assignment a;
        for (std::size_t i = 0; i < s.size(); ++i) a.set(state_vars_[i], s[i]);
        return a;
    }

    Assignment bind(const State& s, const State& t) const {
        Assignment a = bind(s);
        if (t.size() != arity()) throw Error("state has the wrong arity");
        for (std::size_t i = 0; i < t.size(); ++i) a.set(next_vars_[i], t[i]);
        return a;
    }

private:
    Ring ring_;
    Formula sigma_;
    Formula tau_;
    std::vector<std::string> state_vars_;
    std::vector<std::string> next_vars_;
};

/// Parses an .ads definition: sections "arity:", "sigma:" and "tau:", each
/// holding .pef text. State variables are x1..xk and x1'..xk'.
inline System parse_system(const std::string& text, const Ring& ring) {
    std::map<std::string, std::string> sections;
    std::string current;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string stripped = line.substr(0, line.find('#'));
        std::size_t start = stripped.find_first_not_of(" \t\r");
        if (start == std::string::npos) {
            if (!current.empty()) sections[current] += "\n";
            continue;
        }
        bool header = false;
        for (const char* name : {"arity", "sigma", "tau"}) {
            std::string h = std::string(name) + ":";
            if (stripped.compare(start, h.size(), h) == 0) {
                if (sections.count(name)) throw Error(std::string("duplicate section '") + name + ":'");
                current = name;
                sections[current] = stripped.substr(start + h.size()) + "\n";
                header = true;
                break;
            }
        }
        if (header) continue;
        if (current.empty()) throw Error("text before the first section: '" + line + "'");
        sections[current] += line + "\n";
    }
    for (const char* name : {"arity", "tau"})
        if (!sections.count(name)) throw Error(std::string("missing section '") + name + ":'");
    std::string arity_text = sections["arity"];
    arity_text.erase(std::remove_if(arity_text.begin(), arity_text.end(), ::isspace), arity_text.end());
    Int arity = parse_int(arity_text);
    if (arity < 1 || arity > 64) throw Error("arity must be between 1 and 64");
    auto parse_section = [&](const char* name) {
        try {
            return parse_formula(sections[name]);
        } catch (const ParseError& e) {
            throw Error(std::string("in section '") + name + ":': " + e.what());
        }
    };
    Formula sigma = sections.count("sigma") ? parse_section("sigma") : Formula::truth();
    return System::standard(ring, arity.get_ui(), sigma, parse_section("tau"));
}

/// Checks sigma at a state. Over infinite rings "no witness within budget"
/// counts as a violation.
inline bool in_state_space(const System& d, const State& s, const SearchBudget& budget) {
    return satisfies(d.ring(), d.sigma(), d.bind(s), budget).holds();
}

struct Successors {
    /// Sorted, duplicate-free.
    std::vector<State> states;
    /// False when the ring is infinite: only successors inside the box are listed.
    bool complete = true;
};

inline Successors successors(const System& d, const State& s, const SearchBudget& budget) {
    if (!in_state_space(d, s, budget)) throw Error("state " + to_string(s) + " violates sigma");
    Formula next = Formula::exists(d.next_vars(), d.tau());
    std::set<State> found;
    for_each_solution(d.ring(), next, d.bind(s), budget, [&](const Assignment& w) {
        State t;
        for (const auto& v : d.next_vars()) t.push_back(w.at(v));
        found.insert(std::move(t));
        return true;
    });
    return {std::vector<State>(found.begin(), found.end()), d.ring().is_finite()};
}

/// Picks one successor (by index into the sorted successor list).
using Chooser = std::function<std::size_t(const std::vector<State>&)>;

inline std::size_t choose_min(const std::vector<State>&) { return 0; }

struct Trajectory {
    std::vector<State> states;
    /// Empty when all requested steps were taken.
    std::string halt_reason;
};

inline Trajectory trajectory(const System& d, const State& start, std::size_t steps, const SearchBudget& budget,
                             const Chooser& choose = choose_min) {
    if (!in_state_space(d, start, budget)) throw Error("start state " + to_string(start) + " violates sigma");
    Trajectory t{{start}, {}};
    for (std::size_t i = 0; i < steps; ++i) {
        Successors next;
        try {
            next = successors(d, t.states.back(), budget);
        } catch (const Error& e) {
            t.halt_reason = e.what();
            break;
        }
        if (next.states.empty()) {
            t.halt_reason = next.complete ? "no successor" : "no successor within budget";
            break;
        }
        std::size_t k = choose(next.states);
        if (k >= next.states.size()) throw Error("chooser picked a nonexistent successor");
        t.states.push_back(next.states[k]);
    }
    return t;
}

/// A period-k closed walk of the transition relation; states may repeat.
struct CycleWitness {
    Ring ring;
    std::vector<State> states;

    std::size_t period() const noexcept { return states.size(); }

    /// The lexicographically least rotation.
    CycleWitness canonical() const {
        CycleWitness best = *this;
        for (std::size_t r = 1; r < states.size(); ++r) {
            CycleWitness c{ring, {}};
            for (std::size_t i = 0; i < states.size(); ++i) c.states.push_back(states[(r + i) % states.size()]);
            if (c.states < best.states) best = std::move(c);
        }
        return best;
    }

    std::string to_string() const {
        std::string out = "(";
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (i) out += ",";
            out += states[i].size() == 1 ? states[i][0].to_string() : ghostring::to_string(states[i]);
        }
        return out + ")";
    }

    friend bool operator==(const CycleWitness& a, const CycleWitness& b) {
        return a.ring == b.ring && a.states == b.states;
    }
};

/// Checks tau on every consecutive pair and on (last, first) with
/// independent satisfaction calls.
inline bool verify_cycle(const System& d, const CycleWitness& c, const SearchBudget& budget = {}) {
    if (c.states.empty() || !(c.ring == d.ring())) return false;
    for (std::size_t i = 0; i < c.states.size(); ++i) {
        const State& s = c.states[i];
        const State& t = c.states[(i + 1) % c.states.size()];
        if (!satisfies(d.ring(), d.tau(), d.bind(s, t), budget).holds()) return false;
    }
    return true;
}

namespace detail {

inline std::string orbit_var(const System& d, std::size_t i, std::size_t j) {
    return d.arity() == 1 ? "x" + std::to_string(i) : "x" + std::to_string(i) + "_" + std::to_string(j + 1);
}

inline std::map<std::string, std::string> step_renaming(const System& d, std::size_t i, std::size_t k) {
    std::map<std::string, std::string> names;
    for (std::size_t j = 0; j < d.arity(); ++j) {
        names[d.state_vars()[j]] = orbit_var(d, i, j);
        names[d.next_vars()[j]] = orbit_var(d, (i + 1) % k, j);
    }
    return names;
}

inline Formula orbit_sentence(const System& d, std::size_t k, const std::function<Formula(std::size_t)>& step) {
    if (k == 0) throw Error("period must be at least 1");
    std::vector<std::string> vars;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < d.arity(); ++j) vars.push_back(orbit_var(d, i, j));
    std::vector<Formula> parts;
    for (std::size_t i = 0; i < k; ++i) {
        std::map<std::string, std::string> at_i;
        for (std::size_t j = 0; j < d.arity(); ++j) at_i[d.state_vars()[j]] = orbit_var(d, i, j);
        if (!(d.sigma() == Formula::truth())) parts.push_back(rename_free(d.sigma(), at_i));
        parts.push_back(rename_free(step(i), step_renaming(d, i, k)));
    }
    // Inner binders may repeat across steps (siblings, not shadowing) but
    // must not collide with the orbit variables themselves.
    return Formula::exists(std::move(vars), Formula::conj(std::move(parts)));
}

} // namespace detail

/// exists x0..x(k-1). AND_i sigma(x_i) and tau(x_i, x_(i+1 mod k)).
inline Formula period_sentence(const System& d, std::size_t k) {
    return detail::orbit_sentence(d, k, [&](std::size_t) { return d.tau(); });
}

/// The period-k sentence with step i restricted to disjunct branches[i] of
/// tau's normal form. For Collatz the branch word is the parity vector.
inline Formula itinerary_sentence(const System& d, const std::vector<std::size_t>& branches) {
    NormalForm nf = normalize(d.tau());
    std::vector<std::string> next_free;
    for (const auto& b : branches)
        if (b >= nf.matrix.size())
            throw Error("branch " + std::to_string(b) + " out of range: tau has " + std::to_string(nf.matrix.size()) +
                        " disjuncts");
    auto branch_formula = [&](std::size_t b) {
        std::vector<Formula> eqs;
        for (const auto& [l, r] : nf.matrix[b]) eqs.push_back(Formula::eq(l, r));
        Formula body = Formula::conj(std::move(eqs));
        // Keep only the binders this disjunct mentions.
        std::vector<std::string> used;
        std::vector<std::string> fv = free_vars(body);
        for (const auto& v : nf.bound_vars)
            if (std::find(fv.begin(), fv.end(), v) != fv.end()) used.push_back(v);
        return used.empty() ? body : Formula::exists(used, body);
    };
    return detail::orbit_sentence(d, branches.size(), [&](std::size_t i) { return branch_formula(branches[i]); });
}

/// Reads the orbit out of a witness of period_sentence / itinerary_sentence.
inline CycleWitness decode_cycle(const System& d, std::size_t k, const Assignment& w) {
    CycleWitness c{d.ring(), {}};
    for (std::size_t i = 0; i < k; ++i) {
        State s;
        for (std::size_t j = 0; j < d.arity(); ++j) s.push_back(w.at(detail::orbit_var(d, i, j)));
        c.states.push_back(std::move(s));
    }
    return c;
}

/// Every simple cycle (pairwise distinct states) of the transition graph of
/// length <= k_max over a finite ring, each in canonical rotation, sorted by
/// length then states. Each returned cycle is re-verified.
inline std::vector<CycleWitness> find_cycles(const System& d, std::size_t k_max, const SearchBudget& budget = {}) {
    if (!d.ring().is_finite()) throw Error("infinite ring: cycle search needs a finite ring");
    if (k_max == 0) return {};
    std::vector<Element> elems = enumerate_elements(d.ring());
    std::vector<State> states;
    std::function<void(State&)> build = [&](State& s) {
        if (s.size() == d.arity()) {
            if (in_state_space(d, s, budget)) states.push_back(s);
            return;
        }
        for (const auto& e : elems) {
            s.push_back(e);
            build(s);
            s.pop_back();
        }
    };
    State scratch;
    build(scratch);

    std::map<State, std::size_t> index;
    for (std::size_t i = 0; i < states.size(); ++i) index[states[i]] = i;
    std::vector<std::vector<std::size_t>> adj(states.size());
    for (std::size_t i = 0; i < states.size(); ++i)
        for (const auto& t : successors(d, states[i], budget).states)
            if (auto it = index.find(t); it != index.end()) adj[i].push_back(it->second);

    // Each simple cycle is found once, from its least state (states are
    // indexed in increasing order, so the least state is also the canonical
    // rotation's start).
    std::vector<CycleWitness> out;
    std::vector<std::size_t> path;
    std::vector<char> on_path(states.size(), 0);
    std::function<void(std::size_t, std::size_t)> dfs = [&](std::size_t start, std::size_t v) {
        for (std::size_t w : adj[v]) {
            if (w == start) {
                CycleWitness c{d.ring(), {}};
                for (std::size_t p : path) c.states.push_back(states[p]);
                out.push_back(std::move(c));
            } else if (w > start && !on_path[w] && path.size() < k_max) {
                on_path[w] = 1;
                path.push_back(w);
                dfs(start, w);
                path.pop_back();
                on_path[w] = 0;
            }
        }
    };
    for (std::size_t s = 0; s < states.size(); ++s) {
        path = {s};
        on_path[s] = 1;
        dfs(s, s);
        on_path[s] = 0;
    }
    for (const auto& c : out)
        if (!verify_cycle(d, c, budget)) throw Error("internal: cycle " + c.to_string() + " failed verification");
    std::sort(out.begin(), out.end(), [](const CycleWitness& a, const CycleWitness& b) {
        if (a.period() != b.period()) return a.period() < b.period();
        return a.states < b.states;
    });
    return out;
}

/// Evidence that a sentence holds in a simulation ring R* while no integer
/// witness is known.
struct GhostReport {
    Formula sentence;
    Homomorphism simulation;
    EvalResult extension_status;
    EvalResult base_status;
    /// True when extension_status holds.
    bool candidate = false;
    /// Whether witness_outside_image could be decided for this map.
    bool image_decided = false;
    bool witness_outside_image = false;
    std::string image_justification;
    std::string classification;
};

/// Whether e is h(n) for some integer n, when that is decidable here.
inline std::optional<bool> in_image(const Homomorphism& h, const Element& e) {
    if (h.kind() == Homomorphism::Kind::IncludeIntegersIntoLocal) return e.denominator() == 1;
    if (h.is_surjective()) return true;
    if (h.kind() == Homomorphism::Kind::ComponentPair && h.first().kind() == Homomorphism::Kind::ReduceModN &&
        h.second().kind() == Homomorphism::Kind::ReduceModN) {
        Int g = gcd(h.first().target().modulus(), h.second().target().modulus());
        return mod_floor(Int(e.first().value() - e.second().value()), g) == 0;
    }
    return std::nullopt;
}

namespace detail {

inline void decide_image(GhostReport& r) {
    const Homomorphism& h = r.simulation;
    const Assignment& w = r.extension_status.witness;
    r.image_decided = true;
    r.witness_outside_image = false;
    if (h.kind() == Homomorphism::Kind::IncludeIntegersIntoLocal) {
        for (const auto& [name, v] : w)
            if (v.denominator() != 1) {
                r.witness_outside_image = true;
                r.image_justification = name + " = " + v.to_string() + " has denominator " +
                                        ghostring::to_string(v.denominator()) +
                                        " > 1 in lowest terms; the image of Z in " + h.target().to_string() +
                                        " consists of fractions with denominator 1";
                return;
            }
        r.image_justification = "every witness value is an integer, hence the image of itself";
        return;
    }
    if (h.is_surjective()) {
        r.image_justification = h.to_string() + " is surjective: every element of " + h.target().to_string() +
                                " is the image of an integer";
        return;
    }
    if (h.kind() == Homomorphism::Kind::ComponentPair && h.first().kind() == Homomorphism::Kind::ReduceModN &&
        h.second().kind() == Homomorphism::Kind::ReduceModN) {
        Int g = gcd(h.first().target().modulus(), h.second().target().modulus());
        for (const auto& [name, v] : w)
            if (!*in_image(h, v)) {
                r.witness_outside_image = true;
                r.image_justification = name + " = " + v.to_string() + " has components that disagree modulo " +
                                        ghostring::to_string(g) + ", so no integer maps to it";
                return;
            }
        r.image_justification = "every witness value has components agreeing modulo " + ghostring::to_string(g) +
                                ", so each is the image of an integer (CRT)";
        return;
    }
    r.image_decided = false;
    r.image_justification = "image membership is not decided for " + h.to_string();
}

} // namespace detail

inline GhostReport ghost_report(const Formula& sentence, const Homomorphism& h, const SearchBudget& budget) {
    if (!free_vars(sentence).empty()) throw Error("open formula: a ghost report needs a sentence");
    if (!(h.source() == Ring::integers())) throw Error("a simulation map must start at Z");
    GhostReport r{sentence, h, satisfies(h.target(), sentence, {}, budget), {}, false, false, false, {}, {}};
    r.base_status = satisfies(Ring::integers(), sentence, {}, budget);
    r.candidate = r.extension_status.holds();
    const std::string target = h.target().to_string();
    if (!r.candidate) {
        r.image_justification = "no witness in " + target;
        r.classification = "not a ghost candidate: the sentence is not satisfied in " + target + " (" +
                           to_string(r.extension_status.status) + ")";
        return r;
    }
    detail::decide_image(r);
    if (r.base_status.holds()) {
        r.classification = "not a ghost candidate at this witness: the sentence also holds in Z at " +
                           r.base_status.witness.to_string();
    } else if (r.witness_outside_image) {
        r.classification =
            "ghost candidate: the sentence holds in " + target + " at a witness outside the image of Z, and Z has no "
            "witness inside the search box. Positive existential facts true in Z remain true in " + target +
            ", so ring axioms plus such facts cannot refute the sentence; a refutation over Z has to use "
            "structure that " + h.to_string() + " does not preserve.";
    } else {
        r.classification =
            "ghost candidate: the sentence holds in " + target + " and Z has no witness inside the search box. "
            "The " + target + " witness is the image of integers, but those integers need not satisfy the "
            "sentence in Z; any refutation over Z has to use structure that " + h.to_string() + " does not preserve.";
    }
    return r;
}

struct CountermodelLimits {
    /// Rings Z/n and Z/a x Z/b are tried for cardinality up to max_n.
    Int max_n = 64;
    bool include_products = true;
};

/// A finite ring where phi and every axiom hold, with witnesses. The axiom
/// witnesses are images of their integer witnesses under `map`.
struct Countermodel {
    Ring ring;
    Homomorphism map;
    Assignment phi_witness;
    std::vector<Assignment> axiom_witnesses;
    std::vector<Assignment> axiom_integer_witnesses;
};

struct CountermodelResult {
    std::optional<Countermodel> found;
    std::size_t rings_tried = 0;
};

/// Z/n for n = 2..max_n, interleaved with products Z/a x Z/b (2 <= a <= b)
/// by cardinality; at equal cardinality Z/n comes first.
inline std::vector<Homomorphism> candidate_maps(const CountermodelLimits& limits) {
    std::vector<Homomorphism> out;
    for (Int n = 2; n <= limits.max_n; ++n) {
        out.push_back(Homomorphism::reduce_mod(n));
        if (!limits.include_products) continue;
        for (Int a = 2; a * a <= n; ++a)
            if (divides(a, n)) out.push_back(Homomorphism::pair(Homomorphism::reduce_mod(a), Homomorphism::reduce_mod(n / a)));
    }
    return out;
}

/// Searches finite rings for a model of phi and the axioms. A result
/// certifies that ring axioms plus the axioms do not entail "not phi". The
/// axioms must be sentences with integer witnesses inside the budget.
inline CountermodelResult countermodel_search(const Formula& phi, const std::vector<Formula>& axioms,
                                              const CountermodelLimits& limits, const SearchBudget& budget) {
    if (!free_vars(phi).empty()) throw Error("open formula: phi must be a sentence");
    std::vector<Assignment> integer_witnesses;
    for (std::size_t i = 0; i < axioms.size(); ++i) {
        if (!free_vars(axioms[i]).empty()) throw Error("open formula: axiom " + std::to_string(i + 1));
        EvalResult r = satisfies(Ring::integers(), axioms[i], {}, budget);
        if (!r.holds())
            throw Error("clause-1 unverified: axiom " + std::to_string(i + 1) + " (" + to_string(axioms[i]) +
                        ") has no integer witness within the budget");
        integer_witnesses.push_back(r.witness);
    }
    CountermodelResult result;
    for (const auto& h : candidate_maps(limits)) {
        ++result.rings_tried;
        EvalResult r = satisfies(h.target(), phi, {}, budget);
        if (!r.holds()) continue;
        Countermodel cm{h.target(), h, r.witness, {}, integer_witnesses};
        for (std::size_t i = 0; i < axioms.size(); ++i)
            cm.axiom_witnesses.push_back(transport_witness(h, axioms[i], integer_witnesses[i]));
        result.found = std::move(cm);
        return result;
    }
    return result;
}

/// Builds and certifies a countermodel in one given quotient of Z, if phi
/// holds there.
inline std::optional<Countermodel> certify_countermodel(const Formula& phi, const std::vector<Formula>& axioms,
                                                        const Homomorphism& h, const SearchBudget& budget) {
    if (!(h.source() == Ring::integers())) throw Error("countermodel maps must start at Z");
    EvalResult r = satisfies(h.target(), phi, {}, budget);
    if (!r.holds()) return std::nullopt;
    Countermodel cm{h.target(), h, r.witness, {}, {}};
    for (std::size_t i = 0; i < axioms.size(); ++i) {
        EvalResult z = satisfies(Ring::integers(), axioms[i], {}, budget);
        if (!z.holds()) throw Error("clause-1 unverified: axiom " + std::to_string(i + 1));
        cm.axiom_integer_witnesses.push_back(z.witness);
        cm.axiom_witnesses.push_back(transport_witness(h, axioms[i], z.witness));
    }
    return cm;
}

} // namespace ghostring
