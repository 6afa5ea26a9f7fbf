// ghostring: command-line front end. Reports go to stdout as JSON,
// diagnostics to stderr. Exit 0 = definite answer, 2 = unknown within the
// search budget, 1 = usage or input error.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ghostring/ghostring.hpp"

namespace fs = std::filesystem;
using namespace ghostring;

namespace {

constexpr int kDefinite = 0;
constexpr int kError = 1;
constexpr int kUnknown = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Formula load_formula(const std::string& path) {
    try {
        return parse_formula(read_file(path));
    } catch (const ParseError& e) {
        throw Error(path + ":" + e.what());
    }
}

struct BudgetFlags {
    std::string int_bound = "10000";
    std::string height = "1000";
    unsigned long precision = 12;

    void add_to(CLI::App* app, bool with_precision = true) {
        app->add_option("--int-bound", int_bound, "witness box [-B,B] over Z")->capture_default_str();
        app->add_option("--height", height, "height bound for Zloc/p witnesses")->capture_default_str();
        if (with_precision)
            app->add_option("--precision", precision, "largest N probed in Z/p^N")->capture_default_str();
    }

    SearchBudget budget() const {
        SearchBudget b;
        b.integer_box_bound = parse_int(int_bound);
        b.local_height_bound = parse_int(height);
        b.precision_limit = precision;
        b.validate();
        return b;
    }
};

Assignment parse_assignments(const Ring& r, const std::vector<std::string>& items) {
    Assignment a;
    for (const auto& item : items) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw Error("--assign expects name=value, got '" + item + "'");
        std::string name = item.substr(0, eq);
        if (!is_identifier(name)) throw Error("invalid variable name '" + name + "'");
        a.set(name, parse_element(r, item.substr(eq + 1)));
    }
    return a;
}

int exit_for(const EvalResult& r) { return r.definite() ? kDefinite : kUnknown; }

void print_census_text(const std::vector<CensusRow>& rows) {
    std::printf("%3s %10s %8s %8s %6s %9s %8s\n", "k", "admissible", "classes", "integer", "ghost", "rejected",
                "repeats");
    for (const auto& r : rows)
        std::printf("%3zu %10zu %8zu %8zu %6zu %9zu %8zu\n", r.k, r.admissible, r.classes, r.integer_cycles,
                    r.ghost_cycles, r.rejections, r.repeats);
    for (const auto& r : rows)
        for (const auto& e : r.entries) {
            if (!e.primitive) continue;
            if (const auto* p = std::get_if<PeriodicPoint>(&e.outcome)) {
                std::string orbit;
                for (const auto& x : p->orbit) orbit += (orbit.empty() ? "" : ",") + x.to_string();
                std::printf("k=%-3zu %-14s %-13s %-12s (%s)\n", r.k, p->vector.to_string().c_str(),
                            to_string(p->kind).c_str(), p->value.to_string().c_str(), orbit.c_str());
            } else {
                const auto& rej = std::get<Rejection>(e.outcome);
                std::printf("k=%-3zu %-14s %-13s %s\n", r.k, rej.vector.to_string().c_str(),
                            to_string(rej.reason).c_str(), rej.detail.c_str());
            }
        }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Positive existential ring formulas, arithmetic dynamics and ghost cycles"};
    app.require_subcommand(1);
    bool timing = false;
    app.add_flag("--timing", timing, "record wall-clock time in timing_ms (breaks byte-stable output)");

    // parse
    auto* parse_cmd = app.add_subcommand("parse", "check a .pef file, echo it and its normal form");
    std::string parse_file;
    parse_cmd->add_option("file", parse_file)->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "satisfaction of a formula in a ring");
    std::string eval_ring, eval_file;
    std::vector<std::string> eval_assign;
    BudgetFlags eval_budget;
    eval_cmd->add_option("--ring", eval_ring, "Z, Z/n, Zloc/p or Z/axZ/b")->required();
    eval_cmd->add_option("--formula", eval_file)->required();
    eval_cmd->add_option("--assign", eval_assign, "name=value, repeatable");
    eval_budget.add_to(eval_cmd);

    // transport
    auto* transport_cmd = app.add_subcommand("transport", "push a witness along a homomorphism");
    std::string transport_hom, transport_file, transport_witness_text;
    transport_cmd->add_option("--hom", transport_hom)->required();
    transport_cmd->add_option("--formula", transport_file)->required();
    transport_cmd->add_option("--witness", transport_witness_text, "JSON object name -> value, or a file holding one")
        ->required();

    // cycles
    auto* cycles_cmd = app.add_subcommand("cycles", "all simple cycles of a system over a finite ring");
    std::string cycles_ads, cycles_ring;
    std::size_t cycles_kmax = 0;
    BudgetFlags cycles_budget;
    cycles_cmd->add_option("--ads", cycles_ads)->required();
    cycles_cmd->add_option("--ring", cycles_ring)->required();
    cycles_cmd->add_option("--kmax", cycles_kmax)->required();
    cycles_budget.add_to(cycles_cmd);

    // period
    auto* period_cmd = app.add_subcommand("period", "evaluate the period-k sentence of a system");
    std::string period_ads, period_ring;
    std::size_t period_k = 0;
    BudgetFlags period_budget;
    period_cmd->add_option("--ads", period_ads)->required();
    period_cmd->add_option("--ring", period_ring)->required();
    period_cmd->add_option("--k", period_k)->required();
    period_budget.add_to(period_cmd);

    // ghost
    auto* ghost_cmd = app.add_subcommand("ghost", "ghost report for a period or itinerary sentence");
    std::string ghost_ads, ghost_hom, ghost_itinerary;
    std::size_t ghost_k = 0;
    BudgetFlags ghost_budget;
    ghost_cmd->add_option("--ads", ghost_ads)->required();
    ghost_cmd->add_option("--hom", ghost_hom)->required();
    ghost_cmd->add_option("--k", ghost_k);
    ghost_cmd->add_option("--itinerary", ghost_itinerary,
                          "digits naming the disjunct of tau used at each step (for Collatz: the parity vector)");
    ghost_budget.add_to(ghost_cmd);

    // countermodel
    auto* cm_cmd = app.add_subcommand("countermodel", "finite model of a sentence and a set of integer facts");
    std::string cm_file, cm_axioms, cm_max_n = "64";
    bool cm_no_products = false;
    BudgetFlags cm_budget;
    cm_cmd->add_option("--formula", cm_file)->required();
    cm_cmd->add_option("--axioms", cm_axioms, "directory of .pef sentences")->required();
    cm_cmd->add_option("--max-n", cm_max_n)->capture_default_str();
    cm_cmd->add_flag("--no-products", cm_no_products, "only try Z/n");
    cm_budget.add_to(cm_cmd);

    // collatz
    auto* collatz_cmd = app.add_subcommand("collatz", "Collatz periodic points");
    collatz_cmd->require_subcommand(1);
    auto* census_cmd = collatz_cmd->add_subcommand("census", "periodic points of every admissible parity vector");
    std::size_t census_kmax = 0;
    std::string census_variant = "raw";
    bool census_text = false;
    census_cmd->add_option("--kmax", census_kmax)->required();
    census_cmd->add_option("--variant", census_variant, "raw or acc")->capture_default_str();
    census_cmd->add_flag("--text", census_text, "aligned table instead of JSON");
    auto* bridge_cmd = collatz_cmd->add_subcommand("bridge", "reduce a periodic point into Z/2^N");
    std::string bridge_vector, bridge_variant = "raw";
    unsigned long bridge_precision = 0;
    bridge_cmd->add_option("--vector", bridge_vector)->required();
    bridge_cmd->add_option("--precision", bridge_precision)->required();
    bridge_cmd->add_option("--variant", bridge_variant)->capture_default_str();
    auto* quotient_cmd =
        collatz_cmd->add_subcommand("quotient", "classify the simple cycles of the relation over Z/2^N");
    unsigned long quotient_precision = 0;
    std::size_t quotient_kmax = 0;
    std::string quotient_variant = "raw";
    quotient_cmd->add_option("--precision", quotient_precision)->required();
    quotient_cmd->add_option("--kmax", quotient_kmax)->required();
    quotient_cmd->add_option("--variant", quotient_variant)->capture_default_str();

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "re-check every witness embedded in a report");
    std::string verify_file;
    verify_cmd->add_option("--report", verify_file)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and friends exit 0; every real usage error exits 1.
        return app.exit(e) == 0 ? kDefinite : kError;
    }

    auto start = std::chrono::steady_clock::now();
    auto elapsed = [&]() -> long {
        if (!timing) return 0;
        return static_cast<long>(
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count());
    };
    auto emit = [](const Json& j) { std::cout << j.dump(2) << "\n"; };

    try {
        if (*parse_cmd) {
            Formula f = load_formula(parse_file);
            NormalForm nf = normalize(f);
            Json result{{"formula", to_string(f)},
                        {"free_vars", free_vars(f)},
                        {"normal_form", to_string(to_formula(nf))},
                        {"bound_vars", nf.bound_vars},
                        {"disjuncts", std::to_string(nf.matrix.size())}};
            emit(make_report("parse", Json{{"file", parse_file}}, result, SearchBudget{}, elapsed()));
            return kDefinite;
        }
        if (*eval_cmd) {
            Ring r = parse_ring(eval_ring);
            Formula f = load_formula(eval_file);
            Assignment env = parse_assignments(r, eval_assign);
            SearchBudget b = eval_budget.budget();
            EvalResult res = satisfies(r, f, env, b);
            emit(make_report("eval",
                             Json{{"ring", r.to_string()}, {"formula", to_string(f)}, {"assign", to_json(env)}},
                             to_json(res, r, f), b, elapsed()));
            return exit_for(res);
        }
        if (*transport_cmd) {
            Homomorphism h = parse_homomorphism(transport_hom);
            Formula f = load_formula(transport_file);
            std::string text =
                fs::exists(transport_witness_text) ? read_file(transport_witness_text) : transport_witness_text;
            Json wj = Json::parse(text);
            if (wj.is_object() && wj.contains("assignment")) wj = wj["assignment"];
            Assignment w = detail::parse_assignment(h.source(), wj);
            Assignment image = transport_witness(h, f, w);
            Json result{{"source", witness_json(h.source(), f, w)}, {"image", witness_json(h.target(), f, image)}};
            emit(make_report("transport", Json{{"hom", h.to_string()}, {"formula", to_string(f)}}, result,
                             SearchBudget{}, elapsed()));
            return kDefinite;
        }
        if (*cycles_cmd) {
            Ring r = parse_ring(cycles_ring);
            System d = parse_system(read_file(cycles_ads), r);
            SearchBudget b = cycles_budget.budget();
            Json list = Json::array();
            for (const auto& c : find_cycles(d, cycles_kmax, b)) list.push_back(cycle_json(d, c));
            emit(make_report("cycles",
                             Json{{"ads", cycles_ads}, {"ring", r.to_string()}, {"kmax", std::to_string(cycles_kmax)}},
                             Json{{"cycles", list}}, b, elapsed()));
            return kDefinite;
        }
        if (*period_cmd) {
            Ring r = parse_ring(period_ring);
            System d = parse_system(read_file(period_ads), r);
            SearchBudget b = period_budget.budget();
            Formula phi = period_sentence(d, period_k);
            EvalResult res = satisfies(r, phi, {}, b);
            Json result = to_json(res, r, phi);
            if (res.holds()) result["cycle"] = cycle_json(d, decode_cycle(d, period_k, res.witness));
            emit(make_report("period",
                             Json{{"ads", period_ads}, {"ring", r.to_string()}, {"k", std::to_string(period_k)}},
                             result, b, elapsed()));
            return exit_for(res);
        }
        if (*ghost_cmd) {
            Homomorphism h = parse_homomorphism(ghost_hom);
            System base = parse_system(read_file(ghost_ads), Ring::integers());
            SearchBudget b = ghost_budget.budget();
            Formula phi = Formula::truth();
            std::size_t k = ghost_k;
            if (!ghost_itinerary.empty()) {
                std::vector<std::size_t> branches;
                for (char c : ghost_itinerary) {
                    if (c < '0' || c > '9') throw Error("--itinerary takes decimal digits");
                    branches.push_back(static_cast<std::size_t>(c - '0'));
                }
                if (k != 0 && k != branches.size()) throw Error("--k disagrees with the itinerary length");
                k = branches.size();
                phi = itinerary_sentence(base, branches);
            } else {
                if (k == 0) throw Error("ghost needs --k or --itinerary");
                phi = period_sentence(base, k);
            }
            GhostReport g = ghost_report(phi, h, b);
            Json result = to_json(g);
            if (g.extension_status.holds())
                result["cycle"] = cycle_json(base.in(h.target()), decode_cycle(base.in(h.target()), k, g.extension_status.witness));
            emit(make_report("ghost",
                             Json{{"ads", ghost_ads},
                                  {"hom", h.to_string()},
                                  {"k", std::to_string(k)},
                                  {"itinerary", ghost_itinerary}},
                             result, b, elapsed()));
            return exit_for(g.extension_status);
        }
        if (*cm_cmd) {
            Formula phi = load_formula(cm_file);
            std::vector<std::string> files;
            for (const auto& entry : fs::directory_iterator(cm_axioms))
                if (entry.is_regular_file() && entry.path().extension() == ".pef") files.push_back(entry.path().string());
            std::sort(files.begin(), files.end());
            std::vector<Formula> axioms;
            for (const auto& p : files) axioms.push_back(load_formula(p));
            SearchBudget b = cm_budget.budget();
            CountermodelLimits limits{parse_int(cm_max_n), !cm_no_products};
            CountermodelResult res = countermodel_search(phi, axioms, limits, b);
            Json result{{"found", res.found.has_value()}, {"rings_tried", std::to_string(res.rings_tried)}};
            if (res.found) result["countermodel"] = to_json(*res.found, phi, axioms);
            emit(make_report("countermodel",
                             Json{{"formula", to_string(phi)},
                                  {"axiom_files", files},
                                  {"max_n", to_string(limits.max_n)},
                                  {"products", limits.include_products}},
                             result, b, elapsed()));
            return res.found ? kDefinite : kUnknown;
        }
        if (*census_cmd) {
            CollatzVariant v = parse_variant(census_variant);
            auto rows = ghost_census(census_kmax, v);
            if (census_text) {
                print_census_text(rows);
                return kDefinite;
            }
            Json list = Json::array();
            for (const auto& r : rows) list.push_back(to_json(r));
            emit(make_report("collatz census",
                             Json{{"kmax", std::to_string(census_kmax)}, {"variant", to_string(v)}},
                             Json{{"rows", list}}, SearchBudget{}, elapsed()));
            return kDefinite;
        }
        if (*bridge_cmd) {
            ParityVector pv = parse_parity_vector(bridge_vector, parse_variant(bridge_variant));
            CycleOutcome o = cycle_from_parity_vector(pv);
            Json result{{"periodic_point", to_json(o)}};
            if (const auto* p = std::get_if<PeriodicPoint>(&o)) {
                Ring q = Ring::mod(pow_int(2, bridge_precision));
                result["cycle"] = cycle_json(collatz_system(q, pv.variant), bridge_to_quotient(*p, bridge_precision));
            }
            emit(make_report("collatz bridge",
                             Json{{"vector", pv.to_string()},
                                  {"variant", to_string(pv.variant)},
                                  {"precision", std::to_string(bridge_precision)}},
                             result, SearchBudget{}, elapsed()));
            return kDefinite;
        }
        if (*quotient_cmd) {
            CollatzVariant v = parse_variant(quotient_variant);
            Ring q = Ring::mod(pow_int(2, quotient_precision));
            System d = collatz_system(q, v);
            Json list = Json::array();
            for (const auto& c : classify_quotient_cycles(quotient_precision, quotient_kmax, v)) {
                Json j{{"cycle", cycle_json(d, c.cycle)}};
                j["source"] = c.source ? Json(c.source->to_string()) : Json("quotient-only");
                list.push_back(j);
            }
            emit(make_report("collatz quotient",
                             Json{{"precision", std::to_string(quotient_precision)},
                                  {"kmax", std::to_string(quotient_kmax)},
                                  {"variant", to_string(v)}},
                             Json{{"cycles", list}}, SearchBudget{}, elapsed()));
            return kDefinite;
        }
        if (*verify_cmd) {
            Json report = Json::parse(read_file(verify_file));
            auto checks = verify_report(report);
            bool all_ok = std::all_of(checks.begin(), checks.end(), [](const WitnessCheck& c) { return c.ok; });
            Json list = Json::array();
            for (const auto& c : checks) {
                Json j{{"path", c.path}, {"kind", c.kind}, {"ok", c.ok}};
                if (!c.ok) j["detail"] = c.detail;
                list.push_back(j);
            }
            emit(make_report("verify", Json{{"report", verify_file}},
                             Json{{"verified", all_ok}, {"checked", std::to_string(checks.size())}, {"checks", list}},
                             SearchBudget{}, elapsed()));
            return all_ok ? kDefinite : kError;
        }
    } catch (const Json::exception& e) {
        std::cerr << "error: bad JSON: " << e.what() << "\n";
        return kError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
