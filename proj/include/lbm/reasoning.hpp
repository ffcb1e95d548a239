#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lbm/normal_form.hpp"
#include "lbm/random.hpp"
#include "lbm/rbm.hpp"

namespace lbm {

struct SamplerConfig {
    double c = 5.0;
    double eps = 0.5;
    double tau = 1.0;
    std::size_t max_samples = 1 << 15;
    std::uint64_t seed = 0;
    /// Accept x when F(x) <= threshold. Defaults to -log(1 + exp(c * eps)).
    std::optional<double> accept_threshold;
    /// Re-draw the free variables uniformly every this many steps (0 = never).
    std::size_t restart_every = 100;
    /// Coverage is recorded every this many samples.
    std::size_t record_every = 256;
    /// Stop as soon as every model known to the oracle has been accepted.
    bool stop_at_full_coverage = true;

    double threshold() const;
    /// Throws std::invalid_argument on max_samples == 0, tau <= 0, c < 0, eps outside (0,1).
    void validate() const;
};

/// Ground truth used to score a sampling run.
struct ModelOracle {
    std::function<bool(std::span<const std::uint8_t>)> satisfies;
    /// Size of the model set restricted to the clamped values, when known.
    std::optional<std::size_t> model_count;
};

struct CoveragePoint {
    std::size_t samples = 0;
    double coverage = 0;
    bool operator==(const CoveragePoint&) const = default;
};

struct SamplingRun {
    /// Distinct accepted assignments in order of first acceptance.
    std::vector<Bits> accepted;
    std::size_t samples_drawn = 0;
    /// Post-step states that passed the free-energy test (with repeats).
    std::size_t accepted_samples = 0;
    /// Of those, how many the oracle confirmed.
    std::size_t accepted_true_samples = 0;
    /// accepted_true_samples / accepted_samples (1 when nothing was accepted or no oracle).
    double accuracy = 1.0;
    std::vector<CoveragePoint> coverage_curve;
    std::optional<std::size_t> samples_to_full_coverage;

    bool operator==(const SamplingRun&) const = default;
};

/// One block-Gibbs sweep: every h_j ~ Bernoulli(sigmoid(pre_j / tau)), then every
/// free x_i ~ Bernoulli(sigmoid((sum_j h_j w_ij + a_i) / tau)). Clamped entries of
/// `x` never change. tau == 0 is the zero-temperature limit (threshold at 0,
/// fair coin on exact ties).
void gibbs_step(const Rbm& rbm, Assignment& x, Bits& h, double tau, Rng& rng);

/// Clamped Gibbs search for models: free variables start uniform; every
/// post-step state counts as one sample and is accepted when its free energy
/// at confidence c is at most the threshold.
SamplingRun sample_models(const Rbm& rbm, const Assignment& partial, const SamplerConfig& cfg,
                          const ModelOracle* oracle = nullptr);

struct RankedModel {
    Bits x;
    double free_energy = 0;
    double posterior = 0;
    bool is_model = false;
};

/// Scores all 2^|free| completions by free energy and returns them in
/// ascending order (ties by completion code) with softmax(-F) posteriors.
/// Throws GuardError when more than max_free variables are free.
std::vector<RankedModel> enumerate_models(const Rbm& rbm, const Assignment& partial, const SamplerConfig& cfg,
                                          std::size_t max_free = 20);

/// The formula class  x_1 & ... & x_M & (x_{M+1} | ... | x_{M+N})  in the
/// closed-form strict DNF with one conjunct per disjunct:
///   x_1..x_M & x_j & !x_{j+1} & ... & !x_{M+N}.
Sdnf phi_class_sdnf(std::size_t M, std::size_t N);
/// Its 2^N - 1 models: all-ones prefix and a non-zero suffix.
ModelOracle phi_class_oracle(std::size_t M, std::size_t N);

struct CoverageOptions {
    std::size_t max_vars = 30;
    bool force = false;
};

struct CoverageReport {
    std::size_t M = 0;
    std::size_t N = 0;
    std::size_t runs = 0;
    std::size_t model_count = 0;
    /// Checkpoints (sample counts) and the mean / standard deviation of coverage over runs.
    std::vector<std::size_t> samples;
    std::vector<double> coverage_mean;
    std::vector<double> coverage_std;
    std::vector<std::optional<std::size_t>> samples_to_full;  ///< per run
    double min_accuracy = 1.0;
    bool all_full = false;
    /// Mean samples to full coverage divided by 2^(M+N); NaN if some run fell short.
    double ratio = 0;
    double time_seconds = 0;
};

/// Compiles the formula class, runs `runs` independently seeded sampling runs
/// (concurrently) and aggregates their coverage curves.
/// Throws GuardError when M + N exceeds opts.max_vars without opts.force.
CoverageReport coverage_experiment(std::size_t M, std::size_t N, std::size_t runs, const SamplerConfig& cfg,
                                   const CoverageOptions& opts = {});

}  // namespace lbm
