#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "toposval/json_io.hpp"
#include "toposval/ks.hpp"
#include "toposval/ocat.hpp"
#include "toposval/presheaves.hpp"
#include "toposval/random.hpp"
#include "toposval/schema.hpp"
#include "toposval/valuations.hpp"

#ifndef TOPOSVAL_VERSION
#define TOPOSVAL_VERSION "unknown"
#endif

namespace toposval::cli {

namespace {

struct Options {
    std::string command;
    std::string input;
    std::string state;
    std::uint64_t seed = 1;
    std::optional<double> r;
    std::string relation = "all";
    std::string out;
    std::string format = "json";
    bool add_trivial = false;
    bool close_under_meets = false;
    double tol_group = tol::group;
};

struct Outcome {
    json result;
    bool passed = true;
};

struct Inputs {
    json digests = json::object();

    json load(const std::string& role, const std::string& path) {
        const std::string bytes = read_file(path);
        digests[role] = {{"path", path}, {"sha256", sha256_hex(bytes)}};
        return parse_json(bytes, path);
    }
};

json tolerances(const Options& o) {
    return {{"hermitian", tol::hermitian},     {"projector", tol::projector},
            {"traceRank", tol::trace_rank},    {"unitTrace", tol::unit_trace},
            {"psdFloor", tol::psd_floor},      {"unitNorm", tol::unit_norm},
            {"group", o.tol_group},            {"commute", tol::commute},
            {"subspace", tol::subspace},       {"reconstruct", tol::reconstruct},
            {"supportWeight", tol::support_weight}, {"vectorWeight", tol::vector_weight},
            {"rSlack", tol::r_slack}};
}

json atom_list(Mask m) {
    json out = json::array();
    for (std::size_t i = 0; i < 32; ++i) {
        if (m & (Mask{1} << i)) {
            out.push_back(i);
        }
    }
    return out;
}

std::shared_ptr<const ContextPoset> load_poset(const Options& o, Inputs& in) {
    if (o.input.empty()) {
        throw Error("--input is required");
    }
    const json j = in.load("input", o.input);
    return std::make_shared<const ContextPoset>(
        build_poset(parse_contexts(j, o.tol_group), o.add_trivial, o.close_under_meets));
}

DensityMatrix load_density(const Options& o, Inputs& in, std::size_t dim) {
    if (o.state.empty()) {
        throw Error("--state is required");
    }
    const QuantumState s = parse_state(in.load("state", o.state));
    DensityMatrix rho = std::holds_alternative<DensityMatrix>(s) ? std::get<DensityMatrix>(s)
                                                                 : DensityMatrix::pure(std::get<StateVector>(s));
    if (rho.dim() != dim) {
        throw Error(o.state + ": state dimension " + std::to_string(rho.dim()) + " does not match " +
                    std::to_string(dim));
    }
    return rho;
}

MorphismSetValuation state_valuation(const DensityMatrix& rho, const Options& o, const PosetPtr& p) {
    if (o.r) {
        return nu_rho_r(rho, ValuationParams(*o.r), p);
    }
    return nu_rho(rho, p).values();
}

json poset_summary(const ContextPoset& p) {
    json contexts = json::array();
    for (const auto& c : p.contexts()) {
        contexts.push_back({{"id", c.id()}, {"atoms", c.atom_count()}});
    }
    json order = json::array();
    for (std::size_t lo = 0; lo < p.size(); ++lo) {
        for (std::size_t up = 0; up < p.size(); ++up) {
            if (lo != up && p.leq(lo, up)) {
                order.push_back({p.context(lo).id(), p.context(up).id()});
            }
        }
    }
    json hasse = json::array();
    for (const auto& [lo, up] : p.covers()) {
        hasse.push_back({p.context(lo).id(), p.context(up).id()});
    }
    json maximal = json::array();
    for (std::size_t v : p.maximal()) {
        maximal.push_back(p.context(v).id());
    }
    return {{"dim", p.dim()},
            {"contextCount", p.size()},
            {"contexts", contexts},
            {"order", order},
            {"covers", hasse.size()},
            {"hasseEdges", hasse},
            {"maximal", maximal},
            {"includesTrivial", p.includes_trivial()}};
}

Outcome cmd_build_poset(const Options& o, Inputs& in) {
    const auto p = load_poset(o, in);
    return {poset_summary(*p), true};
}

Outcome cmd_check_iso(const Options& o, Inputs& in) {
    const auto p = load_poset(o, in);
    const NatIsoReport r = check_nat_iso(*p);
    return {to_json(*p, r), r.passed()};
}

Outcome cmd_valuate(const Options& o, Inputs& in) {
    const auto p = load_poset(o, in);
    const DensityMatrix rho = load_density(o, in, p->dim());
    const MorphismSetValuation alpha = state_valuation(rho, o, p);
    json result = {{"valuation", o.r ? "nu-rho-r" : "nu-rho"}, {"values", dump(alpha)}};
    if (o.r) {
        result["r"] = *o.r;
    }
    return {result, true};
}

Outcome cmd_supports(const Options& o, Inputs& in) {
    const auto p = load_poset(o, in);
    const DensityMatrix rho = load_density(o, in, p->dim());
    const MorphismSetValuation alpha = state_valuation(rho, o, p);
    json rows = json::object();
    for (std::size_t v = 0; v < p->size(); ++v) {
        const Support s = support(alpha, v);
        json truth = json::array();
        for (Mask m : truth_set(alpha, v).members) {
            truth.push_back(atom_list(m));
        }
        rows[p->context(v).id()] = {{"truthSet", truth},
                                    {"support", atom_list(s.mask)},
                                    {"degenerate", s.degenerate},
                                    {"interval", atom_list(interval(alpha, v))}};
    }
    const auto g = check_global_element_condition(alpha);
    const auto sub = check_subobject_condition(alpha);
    return {{{"contexts", rows},
             {"supportsMatch", to_json(*p, g)},
             {"supportsIncrease", to_json(*p, sub)}},
            true};
}

Outcome cmd_verify_theorems(const Options& o, Inputs& in) {
    const auto p = load_poset(o, in);
    const DensityMatrix rho = load_density(o, in, p->dim());
    const MorphismSetValuation alpha = state_valuation(rho, o, p);
    const Definition3Report d = check_definition3(alpha);
    const TheoremReport t1 = theorem1_verify(alpha);
    const TheoremReport t2 = theorem2_verify(alpha);
    const auto rs = reconstruct_from_supports(alpha);
    const auto ri = reconstruct_from_intervals(alpha);
    bool passed = t1.contract_holds() && t2.contract_holds() && rs.consistent() && ri.consistent();
    if (!o.r) {
        passed = passed && d.sieve_valued.holds && d.all_clauses() && t1.conditions_hold() &&
                 t2.conditions_hold() && rs.equal && ri.equal;
    }
    auto recon = [&](const ReconstructionReport& r) {
        json j = {{"equal", r.equal}, {"conditionI", r.condition_i}, {"consistent", r.consistent()}};
        if (r.difference) {
            j["difference"] = {{"v1", p->context(r.difference->v1).id()},
                               {"v2", p->context(r.difference->v2).id()},
                               {"p", atom_list(r.difference->p)}};
        }
        return j;
    };
    return {{{"valuation", o.r ? "nu-rho-r" : "nu-rho"},
             {"definition3", to_json(*p, d)},
             {"theorem1", to_json(*p, t1)},
             {"theorem2", to_json(*p, t2)},
             {"reconstructFromSupports", recon(rs)},
             {"reconstructFromIntervals", recon(ri)}},
            passed};
}

std::vector<Relation> selected_relations(const Options& o, const ContextPoset& p) {
    if (o.relation == "all") {
        return builtin_relations();
    }
    if (o.relation.rfind("random:", 0) == 0) {
        std::uint64_t seed = 0;
        try {
            seed = std::stoull(o.relation.substr(7));
        } catch (const std::exception&) {
            throw Error("--relation: bad random seed in '" + o.relation + "'");
        }
        return {random_relation(p, seed)};
    }
    return {builtin_relation(o.relation)};
}

Outcome cmd_survey_relations(const Options& o, Inputs& in) {
    const auto p = load_poset(o, in);
    GlobalElementG g{std::vector<Mask>(p->size())};
    SubobjectSigma sigma{std::vector<Mask>(p->size())};
    if (!o.state.empty()) {
        const auto nu = nu_rho(load_density(o, in, p->dim()), p);
        g = supports_of(nu.values());
        sigma = intervals_of(nu.values());
    } else {
        for (std::size_t v = 0; v < p->size(); ++v) {
            g.assignment[v] = p->context(v).full_mask();
            sigma.assignment[v] = p->context(v).full_mask();
        }
    }
    json reports = json::array();
    bool passed = true;
    for (const auto& r : selected_relations(o, *p)) {
        const PropertyReport rg = survey_properties(p, g, r);
        const Relation rs = r.name == "leq" ? relation_subset() : r;
        const PropertyReport rsig = survey_properties_sigma(p, sigma, rs);
        passed = passed && rg.consistent() && rsig.consistent();
        json entry = {{"G", to_json(rg)}, {"Sigma", to_json(rsig)}};
        if (r.name.rfind("random:", 0) != 0) {
            const SieveFailureSearch s = search_sieve_failure(r, p, o.seed, 50);
            json sj = {{"status", to_string(s.status)}, {"draws", s.draws}};
            if (s.witness) {
                sj["witness"] = {{"v1", s.witness->v1}, {"v2", s.witness->v2}, {"v3", s.witness->v3},
                                 {"p", atom_list(s.witness->p)}, {"onInput", s.poset == p}};
            }
            entry["sieveSearch"] = sj;
        }
        reports.push_back(entry);
    }
    return {{{"relations", reports}}, passed};
}

KsFixture parse_fixture(const json& j) {
    KsFixture f;
    if (!j.is_object() || !j.contains("dim") || !j.contains("bases")) {
        throw Error("ks fixture: expected {\"dim\", \"bases\"}");
    }
    f.dim = j["dim"].get<std::size_t>();
    for (std::size_t b = 0; b < j["bases"].size(); ++b) {
        std::vector<Vector> basis;
        for (std::size_t k = 0; k < j["bases"][b].size(); ++k) {
            basis.push_back(parse_vector(j["bases"][b][k],
                                         "bases[" + std::to_string(b) + "][" + std::to_string(k) + "]"));
        }
        f.bases.push_back(std::move(basis));
    }
    return f;
}

Outcome cmd_ks(const Options& o, Inputs& in) {
    const KsFixture f = o.input.empty() ? cabello_fixture() : parse_fixture(in.load("input", o.input));
    const FixtureValidation v = validate_fixture(f);
    json validation = {{"orthogonal", v.orthogonal},
                       {"sharedTwice", v.shared_twice},
                       {"distinctRays", v.distinct_rays},
                       {"parityObstruction", v.parity_obstruction}};
    if (!v.message.empty()) {
        validation["message"] = v.message;
    }
    if (!v.valid()) {
        return {{{"validation", validation}}, false};
    }
    const ContextPoset p = ks_poset(f);
    const SectionSearchResult r = global_section_search(p);
    bool passed = true;
    if (v.parity_obstruction) {
        passed = !r.exists();
    } else if (r.exists()) {
        passed = section_verify(p, *r.section);
    }
    json result = to_json(p, r);
    result["validation"] = validation;
    result["contextCount"] = p.size();
    return {result, passed};
}

Outcome cmd_ocat(const Options& o, Inputs& in) {
    if (o.input.empty()) {
        throw Error("--input is required");
    }
    const OCategory cat = OCategory::build(parse_operators(in.load("input", o.input)));
    json result = morphism_report(cat);
    const CompositionReport comp = check_composition(cat);
    bool passed = comp.reflexive && comp.closed;

    std::vector<QuantumState> states;
    if (!o.state.empty()) {
        states.push_back(parse_state(in.load("state", o.state)));
    } else {
        Rng rng(o.seed);
        for (int k = 0; k < 20; ++k) {
            states.push_back(k % 2 == 0 ? QuantumState(random_state(cat.dim(), rng))
                                        : QuantumState(random_density(cat.dim(), rng)));
        }
    }
    std::size_t checks = 0;
    std::size_t failures = 0;
    json first_failure;
    auto record = [&](bool ok, const json& where) {
        ++checks;
        if (!ok) {
            if (failures == 0) {
                first_failure = where;
            }
            ++failures;
        }
    };
    for (std::size_t s = 0; s < states.size(); ++s) {
        std::visit(
            [&](const auto& st) {
                if (st.dim() != cat.dim()) {
                    throw Error("state dimension does not match the operators");
                }
            },
            states[s]);
        for (std::size_t a = 0; a < cat.size(); ++a) {
            for (Mask d = 0; d <= cat.object(a).full_mask(); ++d) {
                const json where = {{"state", s}, {"object", cat.id(a)}, {"delta", atom_list(d)}};
                record(characterize_check(states[s], cat, a, d).equal(), where);
                record(nu_psi_o_is_sieve(states[s], cat, a, d), where);
            }
            const FuncSubsetReport fs = func_subset_check(states[s], cat, a);
            record(fs.subset && fs.equal, {{"state", s}, {"object", cat.id(a)}});
        }
    }
    for (std::size_t a = 0; a < cat.size(); ++a) {
        for (std::size_t b = 0; b < cat.size(); ++b) {
            if (const auto& f = cat.hom(b, a)) {
                for (Mask d = 0; d <= cat.object(a).full_mask(); ++d) {
                    record(o_coarse_grain(*f, cat.object(a), d).agree,
                           {{"from", cat.id(b)}, {"to", cat.id(a)}, {"delta", atom_list(d)}});
                }
            }
        }
    }
    result["states"] = states.size();
    result["checks"] = checks;
    result["failures"] = failures;
    if (failures > 0) {
        result["firstFailure"] = first_failure;
    }
    return {result, passed && failures == 0};
}

void flatten(const json& j, const std::string& prefix, std::ostream& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
        }
    } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
        }
    } else {
        out << prefix << "\t" << j.dump() << "\n";
    }
}

struct Command {
    std::string name;
    std::string help;
    std::function<Outcome(const Options&, Inputs&)> fn;
};

const std::vector<Command>& commands() {
    static const std::vector<Command> table = {
        {"build-poset", "Build the context poset and report its covers", cmd_build_poset},
        {"check-iso", "Check the spectral and dual presheaf isomorphism", cmd_check_iso},
        {"valuate", "Tabulate the valuation of a state", cmd_valuate},
        {"supports", "Compute supports and intervals and check their laws", cmd_supports},
        {"verify-theorems", "Check the reconstruction contracts", cmd_verify_theorems},
        {"survey-relations", "Run the valuation schema over relations", cmd_survey_relations},
        {"ks", "Search for a global section on a Kochen-Specker fixture", cmd_ks},
        {"ocat", "Check valuations on the operator category", cmd_ocat},
    };
    return table;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Topos-style valuations on finite-dimensional quantum systems", "toposval"};
    app.require_subcommand(1);
    app.set_version_flag("--version", TOPOSVAL_VERSION);
    for (const auto& [name, help, fn] : commands()) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--input", o.input, "Contexts, operators or fixture file");
        sub->add_option("--state", o.state, "State file");
        sub->add_option("--seed", o.seed, "Seed for every random draw");
        sub->add_option("--r", o.r, "Probability threshold in (0, 1]");
        sub->add_option("--relation", o.relation, "Relation name, 'all' or 'random:SEED'");
        sub->add_option("--out", o.out, "Write the report here instead of standard output");
        sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "table"}));
        sub->add_flag("--add-trivial", o.add_trivial, "Add the trivial context");
        sub->add_flag("--close-under-meets", o.close_under_meets, "Close the poset under meets");
        sub->add_option("--tol-group", o.tol_group, "Eigenvalue grouping tolerance")
            ->check(CLI::PositiveNumber);
        sub->callback([&o, name = name] { o.command = name; });
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    Outcome outcome;
    Inputs inputs;
    try {
        const auto it = std::find_if(commands().begin(), commands().end(),
                                     [&](const auto& c) { return c.name == o.command; });
        outcome = it->fn(o, inputs);
    } catch (const Error& e) {
        err << "toposval " << o.command << ": " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        err << "toposval " << o.command << ": " << e.what() << "\n";
        return 2;
    }

    json report = {{"tool", "toposval"},
                   {"version", TOPOSVAL_VERSION},
                   {"command", o.command},
                   {"inputs", inputs.digests},
                   {"seed", o.seed},
                   {"tolerances", tolerances(o)},
                   {"passed", outcome.passed},
                   {"result", outcome.result}};

    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out, std::ios::binary);
        if (!file) {
            err << "toposval: cannot write " << o.out << "\n";
            return 2;
        }
    }
    std::ostream& sink = o.out.empty() ? out : file;
    if (o.format == "table") {
        flatten(report, "", sink);
    } else {
        sink << report.dump(2) << "\n";
    }
    return outcome.passed ? 0 : 1;
}

}  // namespace toposval::cli
