#include "lbm/reasoning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "lbm/error.hpp"
#include "lbm/kernels.hpp"

namespace lbm {

double SamplerConfig::threshold() const {
    if (accept_threshold) return *accept_threshold;
    return -softplus(c * eps);
}

void SamplerConfig::validate() const {
    if (max_samples == 0) throw std::invalid_argument("max_samples must be positive");
    if (!(tau > 0)) throw std::invalid_argument("tau must be positive");
    if (!(c >= 0)) throw std::invalid_argument("confidence c must be non-negative");
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("eps must lie in (0,1)");
    if (record_every == 0) throw std::invalid_argument("record_every must be positive");
}

namespace {

std::uint8_t draw(double activation, double tau, Rng& rng) {
    if (tau <= 0) {
        if (activation > 0) return 1;
        if (activation < 0) return 0;
        return bernoulli(rng, 0.5) ? 1 : 0;
    }
    return bernoulli(rng, sigmoid(activation / tau)) ? 1 : 0;
}

// Free energies are sums of exactly representable terms for most compiled
// networks, but eps like 0.3 leave rounding residue at the threshold.
bool passes(double f, double threshold) {
    return f <= threshold + 1e-9 * std::max(1.0, std::abs(threshold));
}

std::string key_of(const Bits& x) { return std::string(x.begin(), x.end()); }

void randomize_free(Assignment& x, Rng& rng) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!x.clamped[i]) x.values[i] = bernoulli(rng, 0.5) ? 1 : 0;
}

}  // namespace

void gibbs_step(const Rbm& rbm, Assignment& x, Bits& h, double tau, Rng& rng) {
    if (x.size() != rbm.n_visible) throw std::invalid_argument("assignment size does not match the RBM");
    h.resize(rbm.n_hidden);
    std::vector<double> pre(rbm.n_hidden);
    hidden_preactivations(rbm, std::span<const std::uint8_t>(x.values), pre);
    for (std::size_t j = 0; j < rbm.n_hidden; ++j) h[j] = draw(pre[j], tau, rng);
    for (std::size_t i = 0; i < rbm.n_visible; ++i) {
        if (x.clamped[i]) continue;
        double act = rbm.a[i];
        const double* row = rbm.W.data() + i * rbm.n_hidden;
        for (std::size_t j = 0; j < rbm.n_hidden; ++j)
            if (h[j]) act += row[j];
        x.values[i] = draw(act, tau, rng);
    }
}

SamplingRun sample_models(const Rbm& rbm, const Assignment& partial, const SamplerConfig& cfg,
                          const ModelOracle* oracle) {
    cfg.validate();
    if (partial.size() != rbm.n_visible) throw std::invalid_argument("assignment size does not match the RBM");
    const double threshold = cfg.threshold();
    const bool counted = oracle && oracle->model_count;
    const std::size_t target = counted ? *oracle->model_count : 0;

    Rng rng = make_rng(cfg.seed);
    Assignment x = partial;
    Bits h(rbm.n_hidden, 0);
    randomize_free(x, rng);

    SamplingRun run;
    std::unordered_set<std::string> seen;
    std::size_t covered = 0;
    auto coverage = [&] {
        if (!counted) return 0.0;
        return target == 0 ? 1.0 : static_cast<double>(covered) / static_cast<double>(target);
    };

    for (std::size_t s = 1; s <= cfg.max_samples; ++s) {
        if (cfg.restart_every > 0 && s > 1 && (s - 1) % cfg.restart_every == 0) randomize_free(x, rng);
        gibbs_step(rbm, x, h, cfg.tau, rng);
        run.samples_drawn = s;

        if (passes(free_energy(rbm, std::span<const std::uint8_t>(x.values), cfg.c), threshold)) {
            ++run.accepted_samples;
            const bool truly = oracle && oracle->satisfies ? oracle->satisfies(x.values) : true;
            if (truly) ++run.accepted_true_samples;
            if (seen.insert(key_of(x.values)).second) {
                run.accepted.push_back(x.values);
                if (truly) ++covered;
            }
        }

        const bool full = counted && covered >= target;
        if (full && !run.samples_to_full_coverage) run.samples_to_full_coverage = s;
        if (s % cfg.record_every == 0 || s == cfg.max_samples || (full && cfg.stop_at_full_coverage))
            run.coverage_curve.push_back({s, coverage()});
        if (full && cfg.stop_at_full_coverage) break;
    }
    run.accuracy = run.accepted_samples == 0 ? 1.0
                                             : static_cast<double>(run.accepted_true_samples) /
                                                   static_cast<double>(run.accepted_samples);
    return run;
}

std::vector<RankedModel> enumerate_models(const Rbm& rbm, const Assignment& partial, const SamplerConfig& cfg,
                                          std::size_t max_free) {
    if (partial.size() != rbm.n_visible) throw std::invalid_argument("assignment size does not match the RBM");
    const auto free_vars = partial.free_indices();
    if (free_vars.size() > max_free)
        throw GuardError(std::to_string(free_vars.size()) + " free variables; exhaustive enumeration is limited to " +
                         std::to_string(max_free));
    kernels::Completions comp{partial.values, free_vars};
    std::vector<double> f(comp.count());
    kernels::enumerate_energies(rbm, comp, cfg.c, {}, f);

    // softmax(-F) with the maximum of -F factored out
    const double lowest = *std::min_element(f.begin(), f.end());
    double z = 0;
    for (double v : f) z += std::exp(-(v - lowest));

    std::vector<std::uint64_t> order(f.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto l, auto r) { return f[l] < f[r]; });

    const double threshold = cfg.threshold();
    std::vector<RankedModel> out;
    out.reserve(order.size());
    for (auto code : order) {
        RankedModel m;
        m.x.resize(rbm.n_visible);
        comp.decode(code, m.x);
        m.free_energy = f[code];
        m.posterior = std::exp(-(f[code] - lowest)) / z;
        m.is_model = passes(f[code], threshold);
        out.push_back(std::move(m));
    }
    return out;
}

Sdnf phi_class_sdnf(std::size_t M, std::size_t N) {
    Sdnf s;
    s.n_vars = M + N;
    std::vector<VarIndex> prefix(M);
    std::iota(prefix.begin(), prefix.end(), VarIndex{0});
    for (std::size_t j = M; j < M + N; ++j) {
        auto pos = prefix;
        pos.push_back(static_cast<VarIndex>(j));
        std::vector<VarIndex> neg;
        for (std::size_t k = j + 1; k < M + N; ++k) neg.push_back(static_cast<VarIndex>(k));
        s.clauses.emplace_back(std::move(pos), std::move(neg));
    }
    return s;
}

ModelOracle phi_class_oracle(std::size_t M, std::size_t N) {
    ModelOracle o;
    o.satisfies = [M, N](std::span<const std::uint8_t> x) {
        for (std::size_t i = 0; i < M; ++i)
            if (!x[i]) return false;
        for (std::size_t j = M; j < M + N; ++j)
            if (x[j]) return true;
        return false;
    };
    o.model_count = (std::size_t{1} << N) - 1;
    return o;
}

CoverageReport coverage_experiment(std::size_t M, std::size_t N, std::size_t runs, const SamplerConfig& cfg,
                                   const CoverageOptions& opts) {
    if (M + N > opts.max_vars && !opts.force)
        throw GuardError("M + N = " + std::to_string(M + N) + " exceeds the limit of " +
                         std::to_string(opts.max_vars) + " (use force to override)");
    if (N == 0) throw std::invalid_argument("the formula class needs N >= 1");
    if (N >= 63) throw std::invalid_argument("N too large to count models");
    cfg.validate();

    const auto started = std::chrono::steady_clock::now();
    CompileOptions co;
    co.eps = cfg.eps;
    co.tau = cfg.tau;
    const Rbm rbm = compile_sdnf(phi_class_sdnf(M, N), co);
    const ModelOracle oracle = phi_class_oracle(M, N);
    const Assignment partial(M + N);

    std::vector<SamplingRun> results(runs);
    const auto n_runs = static_cast<std::int64_t>(runs);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 0; r < n_runs; ++r) {
        SamplerConfig rc = cfg;
        rc.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
        results[static_cast<std::size_t>(r)] = sample_models(rbm, partial, rc, &oracle);
    }

    CoverageReport rep;
    rep.M = M;
    rep.N = N;
    rep.runs = runs;
    rep.model_count = *oracle.model_count;

    std::size_t longest = 0;
    for (const auto& r : results) longest = std::max(longest, r.samples_drawn);
    const std::size_t step = cfg.record_every;
    for (std::size_t s = step; longest > 0; s += step) {
        rep.samples.push_back(std::min(s, longest));
        if (s >= longest) break;
    }

    for (auto checkpoint : rep.samples) {
        double sum = 0;
        double sq = 0;
        for (const auto& r : results) {
            double v = 0;
            for (const auto& p : r.coverage_curve) {
                if (p.samples > checkpoint) break;
                v = p.coverage;
            }
            sum += v;
            sq += v * v;
        }
        const double n = static_cast<double>(runs);
        const double mean = runs ? sum / n : 0.0;
        const double var = runs > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1)) : 0.0;
        rep.coverage_mean.push_back(mean);
        rep.coverage_std.push_back(std::sqrt(var));
    }

    rep.all_full = true;
    double total_to_full = 0;
    for (const auto& r : results) {
        rep.samples_to_full.push_back(r.samples_to_full_coverage);
        rep.min_accuracy = std::min(rep.min_accuracy, r.accuracy);
        if (r.samples_to_full_coverage) total_to_full += static_cast<double>(*r.samples_to_full_coverage);
        else rep.all_full = false;
    }
    const double space = std::ldexp(1.0, static_cast<int>(M + N));
    rep.ratio = rep.all_full && runs > 0 ? total_to_full / static_cast<double>(runs) / space
                                         : std::numeric_limits<double>::quiet_NaN();
    rep.time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return rep;
}

}  // namespace lbm
