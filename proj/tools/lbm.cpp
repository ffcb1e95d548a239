// lbm: compile formulas into RBMs, query them, solve (Max)SAT, run experiments, train.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli_support.hpp"
#include "lbm/dimacs.hpp"
#include "lbm/error.hpp"
#include "lbm/kernels.hpp"
#include "lbm/learning.hpp"
#include "lbm/optimize.hpp"
#include "lbm/rbm_io.hpp"
#include "lbm/reasoning.hpp"

using json = nlohmann::json;
using namespace lbm;
using namespace lbm::cli;

namespace {

struct Globals {
    double eps = 0.5;
    double c = 5.0;
    double tau = 1.0;
    std::uint64_t seed = 0;
    std::size_t max_samples = std::size_t{1} << 15;
    double time_budget = 10.0;
    std::size_t restarts = 8;
    int threads = 0;
    bool force = false;
    std::string output_dir = ".";

    json to_json() const {
        return {{"eps", eps},         {"c", c},
                {"tau", tau},         {"seed", seed},
                {"max_samples", max_samples}, {"time_budget", time_budget},
                {"restarts", restarts}, {"threads", threads},
                {"force", force},     {"output_dir", output_dir}};
    }
};

std::string bits_string(const Bits& x) {
    std::string s;
    for (auto b : x) s += b ? '1' : '0';
    return s;
}

json bits_json(const Bits& x) {
    json a = json::array();
    for (auto b : x) a.push_back(static_cast<int>(b));
    return a;
}

/// "0.1" -> "0.1", 5 -> "5"; used in file names.
std::string num_tag(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Manifest make_manifest(const std::string& command, const Globals& g, const std::vector<std::string>& argv) {
    Manifest m(command, argv, g.output_dir);
    m.config()["global"] = g.to_json();
    m.set_seed(g.seed);
    return m;
}

AnnealConfig anneal_config(const Globals& g, std::size_t rounds, std::size_t max_evaluations) {
    AnnealConfig cfg;
    cfg.c = g.c;
    cfg.eps = g.eps;
    cfg.seed = g.seed;
    cfg.time_budget = g.time_budget;
    cfg.restarts = g.restarts;
    cfg.rounds = rounds;
    cfg.max_evaluations = max_evaluations;
    return cfg;
}

SamplerConfig sampler_config(const Globals& g) {
    SamplerConfig cfg;
    cfg.c = g.c;
    cfg.eps = g.eps;
    cfg.tau = g.tau;
    cfg.seed = g.seed;
    cfg.max_samples = g.max_samples;
    return cfg;
}

// ---------------------------------------------------------------- compile

struct CompileArgs {
    std::string wff, dimacs, weighted;
    bool fold_singletons = false;
};

void cmd_compile(const Globals& g, const CompileArgs& a, const std::vector<std::string>& argv) {
    Manifest m = make_manifest("compile", g, argv);
    m.config()["compile"] = {{"wff", a.wff}, {"dimacs", a.dimacs}, {"weighted", a.weighted},
                             {"fold_singletons", a.fold_singletons}};
    CompileOptions opts{.eps = g.eps, .fold_singletons = a.fold_singletons, .tau = g.tau};
    Rbm rbm;
    std::string source;
    if (!a.wff.empty()) {
        source = "wff";
        KnowledgeBase kb = parse_knowledge_base(m.read_input(a.wff));
        Wff w = kb.conjunction();
        rbm = compile_sdnf(wff_to_sdnf(w), opts);
        rbm.vars = w.vars;
    } else if (!a.weighted.empty()) {
        source = "weighted";
        rbm = compile_knowledge_base(parse_knowledge_base(m.read_input(a.weighted)), opts);
    } else {
        source = "dimacs";
        rbm = compile_cnf(parse_dimacs(m.read_input(a.dimacs)), opts);
    }
    m.write_json("rbm.json", rbm_to_json(rbm));
    m.write_output("energy.txt", energy_listing(rbm) + "\n");
    m.finish();
    std::printf("compiled %s input: %zu visible, %zu hidden units -> %s\n", source.c_str(), rbm.n_visible,
                rbm.n_hidden, (std::filesystem::path(g.output_dir) / "rbm.json").c_str());
}

// ----------------------------------------------------------------- models

struct ModelsArgs {
    std::string rbm;
    std::string clamp;
    std::string mode = "exact";
};

Assignment parse_clamp(const Rbm& rbm, const std::string& spec) {
    Assignment a(rbm.n_visible);
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Exit(kInputError, "clamp entry '" + item + "' is not name=value");
        const std::string name = trim(item.substr(0, eq));
        const std::string value = trim(item.substr(eq + 1));
        if (value != "0" && value != "1") throw Exit(kInputError, "clamp value for '" + name + "' must be 0 or 1");
        std::optional<VarIndex> idx;
        for (std::size_t i = 0; i < rbm.n_visible; ++i)
            if (visible_name(rbm, i) == name) idx = static_cast<VarIndex>(i);
        if (!idx) throw Exit(kInputError, "unknown variable '" + name + "'");
        a.clamp(*idx, value == "1" ? 1 : 0);
    }
    return a;
}

json model_entry(const Rbm& rbm, const Bits& x, double f) {
    json assignment = json::object();
    for (std::size_t i = 0; i < x.size(); ++i) assignment[visible_name(rbm, i)] = static_cast<int>(x[i]);
    return {{"bits", bits_string(x)}, {"assignment", assignment}, {"free_energy", f}};
}

void cmd_models(const Globals& g, const ModelsArgs& a, const std::vector<std::string>& argv) {
    Manifest m = make_manifest("models", g, argv);
    m.config()["models"] = {{"rbm", a.rbm}, {"clamp", a.clamp}, {"mode", a.mode}};
    json doc;
    try {
        doc = json::parse(m.read_input(a.rbm));
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("rbm file is not JSON: ") + e.what());
    }
    const Rbm rbm = rbm_from_json(doc);
    const Assignment partial = parse_clamp(rbm, a.clamp);
    const SamplerConfig cfg = sampler_config(g);
    cfg.validate();

    json names = json::array();
    for (std::size_t i = 0; i < rbm.n_visible; ++i) names.push_back(visible_name(rbm, i));
    json clamp = json::object();
    for (auto i : partial.clamped_indices()) clamp[visible_name(rbm, i)] = static_cast<int>(partial.values[i]);

    json out{{"mode", a.mode}, {"variables", names}, {"clamp", clamp}, {"c", cfg.c}, {"threshold", cfg.threshold()}};
    json models = json::array();
    if (a.mode == "exact") {
        const auto ranked = enumerate_models(rbm, partial, cfg, g.force ? 30 : 20);
        for (const auto& r : ranked) {
            if (!r.is_model) continue;
            json e = model_entry(rbm, r.x, r.free_energy);
            e["posterior"] = r.posterior;
            models.push_back(e);
        }
        out["completions"] = ranked.size();
    } else {
        SamplingRun run = sample_models(rbm, partial, cfg);
        std::vector<std::pair<double, Bits>> found;
        for (const auto& x : run.accepted) found.emplace_back(free_energy(rbm, std::span<const std::uint8_t>(x), cfg.c), x);
        std::ranges::sort(found);
        for (const auto& [f, x] : found) models.push_back(model_entry(rbm, x, f));
        out["samples_drawn"] = run.samples_drawn;
        out["accepted_samples"] = run.accepted_samples;
    }
    out["models"] = models;
    m.write_json("models.json", out);
    m.finish();
    std::printf("%zu model(s)\n", models.size());
    for (const auto& e : models)
        std::printf("  %s  F = %.6f\n", e["bits"].get<std::string>().c_str(), e["free_energy"].get<double>());
}

// ------------------------------------------------------------ sat, maxsat

struct SolveArgs {
    std::string file;
    std::size_t rounds = 0;
    std::size_t max_evaluations = 0;
    bool prove = false;
};

void cmd_sat(const Globals& g, const SolveArgs& a, const std::vector<std::string>& argv) {
    Manifest m = make_manifest("sat", g, argv);
    m.config()["sat"] = {{"file", a.file}, {"rounds", a.rounds}, {"max_evaluations", a.max_evaluations}};
    const Cnf cnf = parse_dimacs(m.read_input(a.file));
    const SatResult r = sat_solve(cnf, anneal_config(g, a.rounds, a.max_evaluations));
    const bool sat = r.status == SatStatus::sat;
    json out{{"status", sat ? "SAT" : "UNKNOWN"},
             {"assignment", sat ? bits_json(r.assignment) : json(nullptr)},
             {"verified", sat && cnf.is_true(r.assignment)},
             {"n_vars", cnf.n_vars},
             {"n_clauses", cnf.clauses.size()},
             {"evaluations", r.evaluations},
             {"seconds", r.seconds}};
    m.write_json("sat.json", out);
    m.finish();
    std::printf("%s\n", sat ? ("SAT " + bits_string(r.assignment)).c_str() : "UNKNOWN");
}

void cmd_maxsat(const Globals& g, const SolveArgs& a, const std::vector<std::string>& argv) {
    Manifest m = make_manifest("maxsat", g, argv);
    m.config()["maxsat"] = {
        {"file", a.file}, {"rounds", a.rounds}, {"max_evaluations", a.max_evaluations}, {"prove", a.prove}};
    const Cnf cnf = parse_dimacs(m.read_input(a.file));
    AnnealConfig cfg = anneal_config(g, a.rounds, a.max_evaluations);
    cfg.prove_optimum = a.prove;
    if (a.prove && cnf.n_vars > cfg.prove_max_vars && !g.force)
        throw GuardError(std::to_string(cnf.n_vars) + " variables; optimality proof is limited to " +
                         std::to_string(cfg.prove_max_vars) + " (use --force to skip the proof)");
    const MaxSatResult r = maxsat_solve(cnf, cfg);
    json traj = json::array();
    for (const auto& p : r.trajectory) traj.push_back({p.evaluations, p.best_satisfied});
    json out{{"satisfied", r.satisfied},         {"total", r.total},
             {"assignment", bits_json(r.best_assignment)}, {"evaluations", r.evaluations},
             {"seconds", r.seconds},             {"optimum_proved", r.optimum_proved},
             {"trajectory", traj}};
    m.write_json("maxsat.json", out);
    m.finish();
    std::printf("satisfied %g of %g%s\n", r.satisfied, r.total, r.optimum_proved ? " (optimal)" : "");
}

// ------------------------------------------------------------ experiments

struct CoverageArgs {
    std::size_t M = 10, N = 5, runs = 100;
};

json coverage_summary(const CoverageReport& rep) {
    json to_full = json::array();
    std::size_t full = 0;
    for (const auto& s : rep.samples_to_full) {
        to_full.push_back(s ? json(*s) : json(nullptr));
        full += s.has_value();
    }
    return {{"M", rep.M},
            {"N", rep.N},
            {"runs", rep.runs},
            {"model_count", rep.model_count},
            {"time_seconds", rep.time_seconds},
            {"ratio", nullable(rep.ratio)},
            {"min_accuracy", rep.min_accuracy},
            {"all_full", rep.all_full},
            {"runs_at_full_coverage", full},
            {"samples_to_full", to_full}};
}

void cmd_coverage(const Globals& g, const CoverageArgs& a, const std::vector<std::string>& argv) {
    Manifest m = make_manifest("experiment coverage", g, argv);
    m.config()["coverage"] = {{"M", a.M}, {"N", a.N}, {"runs", a.runs}};
    const CoverageReport rep = coverage_experiment(a.M, a.N, a.runs, sampler_config(g), {.force = g.force});
    std::string csv = "samples,coverage_mean,coverage_std\n";
    for (std::size_t k = 0; k < rep.samples.size(); ++k) {
        char line[128];
        std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", rep.samples[k], rep.coverage_mean[k], rep.coverage_std[k]);
        csv += line;
    }
    m.write_output("coverage.csv", csv);
    m.write_json("coverage.json", coverage_summary(rep));
    m.finish();
    std::printf("M=%zu N=%zu: %zu models, final mean coverage %.4f, min accuracy %.4f, %.2f s\n", rep.M, rep.N,
                rep.model_count, rep.coverage_mean.empty() ? 0.0 : rep.coverage_mean.back(), rep.min_accuracy,
                rep.time_seconds);
}

struct LinearityArgs {
    std::size_t clauses = 20, vars = 10, width = 3, instances = 1;
    std::vector<double> c{1, 5, 10};
    std::string dimacs;
};

void cmd_linearity(const Globals& g, const LinearityArgs& a, const std::vector<std::string>& argv) {
    Manifest m = make_manifest("experiment linearity", g, argv);
    m.config()["linearity"] = {{"clauses", a.clauses}, {"vars", a.vars},       {"width", a.width},
                               {"instances", a.instances}, {"c", a.c}, {"dimacs", a.dimacs}};
    std::vector<Cnf> cnfs;
    if (!a.dimacs.empty()) {
        cnfs.push_back(parse_dimacs(m.read_input(a.dimacs)));
    } else {
        if (a.width == 0 || a.width > a.vars) throw Exit(kInputError, "--width must lie in 1..--vars");
        Rng rng = make_rng(g.seed, 0x11);
        for (std::size_t k = 0; k < a.instances; ++k) {
            Cnf cnf;
            cnf.n_vars = a.vars;
            std::vector<VarIndex> order(a.vars);
            for (std::size_t j = 0; j < a.clauses; ++j) {
                for (std::size_t i = 0; i < a.vars; ++i) order[i] = static_cast<VarIndex>(i);
                std::shuffle(order.begin(), order.end(), rng);
                std::vector<VarIndex> pos, neg;
                for (std::size_t t = 0; t < a.width; ++t) (bernoulli(rng, 0.5) ? pos : neg).push_back(order[t]);
                cnf.clauses.emplace_back(pos, neg);
            }
            cnfs.push_back(std::move(cnf));
        }
    }
    for (const auto& cnf : cnfs)
        if (cnf.n_vars > 20 && !g.force)
            throw GuardError(std::to_string(cnf.n_vars) + " variables; the linearity sweep enumerates up to 20");

    json per_c = json::array();
    for (double c : a.c) {
        std::string csv = "instance,satisfied_count,min_energy,free_energy\n";
        std::vector<double> counts, neg_f;
        double worst = 0;
        for (std::size_t k = 0; k < cnfs.size(); ++k) {
            const Cnf& cnf = cnfs[k];
            Rbm rbm = compile_cnf(cnf, {.eps = g.eps});
            const Bits base(cnf.n_vars, 0);
            std::vector<VarIndex> all(cnf.n_vars);
            for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<VarIndex>(i);
            kernels::Completions comp{base, all};
            std::vector<double> e(comp.count()), f(comp.count()), s(comp.count());
            kernels::enumerate_energies(rbm, comp, c, e, f);
            kernels::satisfied_weights(cnf, comp, s);
            for (std::uint64_t code = 0; code < comp.count(); ++code) {
                char line[160];
                std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", k, s[code], e[code], f[code]);
                csv += line;
                counts.push_back(s[code]);
                neg_f.push_back(-f[code]);
                worst = std::max(worst, std::abs(e[code] + g.eps * s[code]));
            }
        }
        const std::string name = "linearity_c" + num_tag(c) + ".csv";
        m.write_output(name, csv);
        // Pearson correlation of count with -F
        const double n = static_cast<double>(counts.size());
        double mc = 0, mf = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) mc += counts[i] / n, mf += neg_f[i] / n;
        double sab = 0, saa = 0, sbb = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            sab += (counts[i] - mc) * (neg_f[i] - mf);
            saa += (counts[i] - mc) * (counts[i] - mc);
            sbb += (neg_f[i] - mf) * (neg_f[i] - mf);
        }
        const double r = sab / std::sqrt(saa * sbb);
        per_c.push_back({{"c", c}, {"file", name}, {"pearson", nullable(r)}, {"max_linearity_error", worst}});
        std::printf("c=%s: pearson(count, -F) = %.5f, max |E + eps*count| = %.3g\n", num_tag(c).c_str(), r, worst);
    }
    m.write_json("linearity.json", {{"instances", cnfs.size()}, {"eps", g.eps}, {"results", per_c}});
    m.finish();
}

struct LandscapeArgs {
    std::string dimacs;
    std::vector<double> c{0.1, 0.5, 1, 5};
    std::size_t steps = 41;
    double bound = 10;
};

void cmd_landscape(const Globals& g, const LandscapeArgs& a, const std::vector<std::string>& argv) {
    Manifest m = make_manifest("experiment landscape", g, argv);
    m.config()["landscape"] = {{"dimacs", a.dimacs}, {"c", a.c}, {"steps", a.steps}, {"bound", a.bound}};
    const Cnf cnf = parse_dimacs(m.read_input(a.dimacs));
    if (cnf.n_vars != 2) throw Exit(kInputError, "landscape needs a two-variable CNF");
    const Rbm rbm = compile_cnf(cnf, {.eps = g.eps});
    json results = json::array();
    for (double c : a.c) {
        const auto grid = landscape(rbm, c, a.bound, a.steps);
        std::string csv = "theta1,theta2,energy,free_energy\n";
        for (const auto& p : grid) {
            char line[160];
            std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", p.theta1, p.theta2, p.energy, p.free_energy);
            csv += line;
        }
        const std::string name = "landscape_c" + num_tag(c) + ".csv";
        m.write_output(name, csv);
        const auto low = std::ranges::min_element(grid, {}, &LandscapePoint::free_energy);
        results.push_back({{"c", c},
                           {"file", name},
                           {"min_free_energy", low->free_energy},
                           {"argmin", {low->theta1, low->theta2}}});
    }
    m.write_json("landscape.json", {{"steps", a.steps}, {"bound", a.bound}, {"results", results}});
    m.finish();
    std::printf("%zu grid(s) of %zu x %zu points\n", a.c.size(), a.steps, a.steps);
}

struct TimingArgs {
    std::size_t M = 10, n_max = 5, runs = 10;
};

void cmd_timing(const Globals& g, const TimingArgs& a, const std::vector<std::string>& argv) {
    Manifest m = make_manifest("experiment timing", g, argv);
    m.config()["timing"] = {{"M", a.M}, {"N_max", a.n_max}, {"runs", a.runs}};
    std::string csv = "M,N,runs,time_seconds,mean_samples_to_full,all_full\n";
    json rows = json::array();
    for (std::size_t n = 1; n <= a.n_max; ++n) {
        const CoverageReport rep = coverage_experiment(a.M, n, a.runs, sampler_config(g), {.force = g.force});
        double sum = 0;
        std::size_t full = 0;
        for (const auto& s : rep.samples_to_full)
            if (s) sum += static_cast<double>(*s), ++full;
        const double mean = full ? sum / static_cast<double>(full) : NAN;
        char line[160];
        std::snprintf(line, sizeof line, "%zu,%zu,%zu,%.6f,%.17g,%d\n", a.M, n, a.runs, rep.time_seconds, mean,
                      rep.all_full ? 1 : 0);
        csv += line;
        rows.push_back({{"M", a.M},
                        {"N", n},
                        {"runs", a.runs},
                        {"time_seconds", rep.time_seconds},
                        {"mean_samples_to_full", nullable(mean)},
                        {"all_full", rep.all_full}});
        std::printf("M=%zu N=%zu: %.3f s\n", a.M, n, rep.time_seconds);
    }
    m.write_output("timing.csv", csv);
    m.write_json("timing.json", {{"rows", rows}});
    m.finish();
}

// ------------------------------------------------------------------ train

struct TrainArgs {
    std::string data, knowledge, label;
    std::optional<std::size_t> hidden;
    TrainConfig cfg;
    double score_c = 1.0;
};

/// Knowledge conjuncts re-indexed onto the data columns.
Sdnf knowledge_over(const KnowledgeBase& kb, const Dataset& data) {
    const Sdnf src = knowledge_base_conjuncts(kb);
    std::vector<VarIndex> map(kb.vars.size());
    for (std::size_t i = 0; i < kb.vars.size(); ++i) {
        const auto idx = data.vars.find(kb.vars.name(static_cast<VarIndex>(i)));
        if (!idx) throw Exit(kInputError, "knowledge variable '" + kb.vars.name(static_cast<VarIndex>(i)) +
                                              "' is not a data column");
        map[i] = *idx;
    }
    Sdnf out;
    out.n_vars = data.n_visible();
    out.weights = src.weights;
    for (const auto& c : src.clauses) {
        std::vector<VarIndex> pos, neg;
        for (auto v : c.pos()) pos.push_back(map[v]);
        for (auto v : c.neg()) neg.push_back(map[v]);
        std::ranges::sort(pos);
        std::ranges::sort(neg);
        out.clauses.emplace_back(pos, neg);
    }
    return out;
}

void cmd_train(const Globals& g, TrainArgs a, const std::vector<std::string>& argv) {
    Manifest m = make_manifest("train", g, argv);
    Dataset data = read_dataset_csv(m.read_input(a.data));
    if (!a.label.empty()) {
        const auto idx = data.vars.find(a.label);
        if (!idx) throw Exit(kInputError, "label column '" + a.label + "' not found");
        data.label_index = *idx;
    }
    Sdnf knowledge;
    knowledge.n_vars = data.n_visible();
    if (!a.knowledge.empty()) knowledge = knowledge_over(parse_knowledge_base(m.read_input(a.knowledge)), data);
    const std::size_t hidden = a.hidden.value_or(a.knowledge.empty() ? 100 : 0);
    a.cfg.seed = g.seed;
    a.cfg.extra_hidden = hidden;
    m.config()["train"] = {{"data", a.data},
                           {"knowledge", a.knowledge},
                           {"label", a.label},
                           {"extra_hidden", hidden},
                           {"cd_k", a.cfg.cd_k},
                           {"learning_rate", a.cfg.learning_rate},
                           {"epochs", a.cfg.epochs},
                           {"batch", a.cfg.batch},
                           {"init_scale", a.cfg.init_scale},
                           {"momentum", a.cfg.momentum},
                           {"weight_decay", a.cfg.weight_decay},
                           {"score_c", a.score_c}};

    Rbm start = init_from_knowledge(knowledge, hidden, a.cfg, {.eps = g.eps, .tau = g.tau});
    start.vars = data.vars;
    const bool track_gap = data.n_visible() <= 20;
    if (!track_gap && !g.force)
        throw GuardError(std::to_string(data.n_visible()) +
                         " columns; the free-energy gap is enumerated up to 20 (use --force to train without it)");
    json epochs = json::array();
    Rbm trained = cd_train(std::move(start), data, a.cfg, [&](std::size_t e, const Rbm& rbm) {
        epochs.push_back({{"epoch", e}, {"gap", track_gap ? json(data_free_energy_gap(rbm, data, a.score_c)) : json(nullptr)}});
    });

    json metrics{{"n_visible", trained.n_visible},
                 {"n_hidden", trained.n_hidden},
                 {"rows", data.rows.size()},
                 {"score_c", a.score_c},
                 {"epochs", epochs},
                 {"final_gap", epochs.back()["gap"]},
                 {"label", a.label.empty() ? json(nullptr) : json(a.label)},
                 {"label_accuracy", nullptr}};
    if (data.label_index) {
        std::size_t ok = 0;
        for (const auto& row : data.rows)
            ok += predict_label(trained, row, *data.label_index, a.score_c).label == row[*data.label_index];
        metrics["label_accuracy"] = static_cast<double>(ok) / static_cast<double>(data.rows.size());
    }
    m.write_json("rbm.json", rbm_to_json(trained));
    m.write_json("metrics.json", metrics);
    m.finish();
    if (track_gap)
        std::printf("trained %zu epochs: free-energy gap %.4f -> %.4f\n", a.cfg.epochs,
                    epochs.front()["gap"].get<double>(), epochs.back()["gap"].get<double>());
    else
        std::printf("trained %zu epochs\n", a.cfg.epochs);
}

int report(int code, const std::string& msg) {
    std::fprintf(stderr, "lbm: error: %s\n", msg.c_str());
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Logical Boltzmann machines: compile, reason, solve, learn"};
    app.set_version_flag("--version", LBM_VERSION);
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Read options from a key = value file (command-line flags take precedence)");

    Globals g;
    app.add_option("--eps", g.eps, "Conjunct margin eps in (0,1)")->capture_default_str();
    app.add_option("--c", g.c, "Confidence c scaling the free energy")->capture_default_str();
    app.add_option("--tau", g.tau, "Gibbs temperature")->capture_default_str();
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--max-samples", g.max_samples, "Sampling budget per run")->capture_default_str();
    app.add_option("--time-budget", g.time_budget, "Wall-clock budget in seconds for sat/maxsat")
        ->capture_default_str();
    app.add_option("--restarts", g.restarts, "Concurrent annealing restarts per round")->capture_default_str();
    app.add_option("--threads", g.threads, "OpenMP threads (0 = runtime default)")->envname("LBM_THREADS");
    app.add_flag("--force", g.force, "Run past the exhaustive-enumeration size guards");
    app.add_option("--output-dir,-o", g.output_dir, "Directory for outputs and manifest.json")->capture_default_str();

    CompileArgs compile_args;
    auto* compile = app.add_subcommand("compile", "Compile a formula, knowledge base or CNF into rbm.json");
    auto* src = compile->add_option_group("source");
    src->add_option("--wff", compile_args.wff, "Formula file (lines are conjoined)");
    src->add_option("--dimacs", compile_args.dimacs, "DIMACS cnf/wcnf file");
    src->add_option("--weighted", compile_args.weighted, "Weighted knowledge base ('w: formula' lines)");
    src->require_option(1);
    compile->add_flag("--fold-singletons", compile_args.fold_singletons,
                      "Implement single-literal conjuncts with visible biases");

    ModelsArgs models_args;
    auto* models = app.add_subcommand("models", "List the models of a compiled network");
    models->add_option("rbm", models_args.rbm, "rbm.json")->required();
    models->add_option("--clamp", models_args.clamp, "Fixed values, e.g. x=1,y=0");
    models->add_option("--mode", models_args.mode, "exact (enumerate) or sample (Gibbs)")
        ->check(CLI::IsMember({"exact", "sample"}))
        ->capture_default_str();

    SolveArgs sat_args;
    auto* sat = app.add_subcommand("sat", "Search for a satisfying assignment (SAT or UNKNOWN)");
    sat->add_option("file", sat_args.file, "DIMACS cnf file")->required();
    sat->add_option("--rounds", sat_args.rounds, "Rounds of restarts (0 = until the time budget)")
        ->capture_default_str();
    sat->add_option("--max-evaluations", sat_args.max_evaluations, "Objective evaluations per restart (0 = no cap)");

    SolveArgs maxsat_args;
    maxsat_args.rounds = 1;
    auto* maxsat = app.add_subcommand("maxsat", "Maximise the (weighted) number of satisfied clauses");
    maxsat->add_option("file", maxsat_args.file, "DIMACS cnf/wcnf file")->required();
    maxsat->add_option("--rounds", maxsat_args.rounds, "Rounds of restarts (0 = until the time budget)")
        ->capture_default_str();
    maxsat->add_option("--max-evaluations", maxsat_args.max_evaluations, "Objective evaluations per restart");
    maxsat->add_flag("--prove", maxsat_args.prove, "Confirm optimality by brute force (up to 22 variables)");

    auto* experiment = app.add_subcommand("experiment", "Run an experiment and write CSV + JSON");
    experiment->require_subcommand(1);
    experiment->fallthrough();

    CoverageArgs coverage_args;
    auto* coverage = experiment->add_subcommand("coverage", "Sampling coverage of the formula class");
    coverage->add_option("--M", coverage_args.M, "Conjoined prefix variables")->capture_default_str();
    coverage->add_option("--N", coverage_args.N, "Disjoined suffix variables")->capture_default_str();
    coverage->add_option("--runs", coverage_args.runs, "Independent seeded runs")->capture_default_str();

    LinearityArgs linearity_args;
    auto* linearity = experiment->add_subcommand("linearity", "Satisfied count against energy and free energy");
    linearity->add_option("--clauses", linearity_args.clauses)->capture_default_str();
    linearity->add_option("--vars", linearity_args.vars)->capture_default_str();
    linearity->add_option("--width", linearity_args.width, "Literals per random clause")->capture_default_str();
    linearity->add_option("--instances", linearity_args.instances)->capture_default_str();
    linearity->add_option("--c", linearity_args.c, "Confidence values")->delimiter(',');
    linearity->add_option("--dimacs", linearity_args.dimacs, "Use this CNF instead of random ones");

    LandscapeArgs landscape_args;
    auto* land = experiment->add_subcommand("landscape", "Energy and free energy over (theta1, theta2)");
    land->add_option("--dimacs", landscape_args.dimacs, "Two-variable CNF")->required();
    land->add_option("--c", landscape_args.c, "Confidence values")->delimiter(',');
    land->add_option("--steps", landscape_args.steps, "Grid points per axis")->capture_default_str();
    land->add_option("--bound", landscape_args.bound, "Grid covers [-bound, bound]^2")->capture_default_str();

    TimingArgs timing_args;
    auto* timing = experiment->add_subcommand("timing", "Coverage wall-clock time as N grows");
    timing->add_option("--M", timing_args.M)->capture_default_str();
    timing->add_option("--N-max", timing_args.n_max)->capture_default_str();
    timing->add_option("--runs", timing_args.runs)->capture_default_str();

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Contrastive-divergence training from a 0/1 CSV");
    train->add_option("data", train_args.data, "CSV with a header row")->required();
    train->add_option("--knowledge", train_args.knowledge, "Knowledge base seeding the network");
    train->add_option("--label", train_args.label, "Column scored by predict-label accuracy");
    train->add_option("--hidden", train_args.hidden, "Extra random hidden units (default 0 with knowledge, else 100)");
    train->add_option("--epochs", train_args.cfg.epochs)->capture_default_str();
    train->add_option("--lr", train_args.cfg.learning_rate, "Learning rate")->capture_default_str();
    train->add_option("--cd-k", train_args.cfg.cd_k)->capture_default_str();
    train->add_option("--batch", train_args.cfg.batch)->capture_default_str();
    train->add_option("--init-scale", train_args.cfg.init_scale)->capture_default_str();
    train->add_option("--momentum", train_args.cfg.momentum)->capture_default_str();
    train->add_option("--weight-decay", train_args.cfg.weight_decay)->capture_default_str();
    train->add_option("--score-c", train_args.score_c, "Confidence for the gap and label scores")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    const std::vector<std::string> args(argv + 1, argv + argc);
    try {
        if (g.threads > 0) kernels::set_threads(g.threads);
        if (*compile) cmd_compile(g, compile_args, args);
        else if (*models) cmd_models(g, models_args, args);
        else if (*sat) cmd_sat(g, sat_args, args);
        else if (*maxsat) cmd_maxsat(g, maxsat_args, args);
        else if (*coverage) cmd_coverage(g, coverage_args, args);
        else if (*linearity) cmd_linearity(g, linearity_args, args);
        else if (*land) cmd_landscape(g, landscape_args, args);
        else if (*timing) cmd_timing(g, timing_args, args);
        else if (*train) cmd_train(g, train_args, args);
    } catch (const Exit& e) {
        return report(e.code(), e.what());
    } catch (const ParseError& e) {
        return report(kInputError, e.what());
    } catch (const CompileError& e) {
        return report(kCompileError, e.what());
    } catch (const GuardError& e) {
        return report(kGuardError, e.what());
    } catch (const std::invalid_argument& e) {
        return report(kInputError, e.what());
    } catch (const nlohmann::json::exception& e) {
        return report(kInputError, e.what());
    } catch (const std::exception& e) {
        return report(kOutputError, e.what());
    }
    return kOk;
}
