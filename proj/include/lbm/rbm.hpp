#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lbm/logic.hpp"
#include "lbm/normal_form.hpp"

namespace lbm {

/// Where a compiled hidden unit came from.
struct HiddenProvenance {
    std::size_t source = 0;  ///< index of the SDNF / CNF clause / formula it was compiled from
    double weight = 1.0;     ///< w' multiplying the unit's energy term
    double eps = 0.5;
    ConjClause clause;

    bool operator==(const HiddenProvenance&) const = default;
};

/// Restricted Boltzmann machine with energy
///   E(x,h) = -sum_ij w_ij x_i h_j - sum_i a_i x_i - sum_j b_j h_j + e0.
/// Weights are stored row-major, n_visible x n_hidden.
struct Rbm {
    std::size_t n_visible = 0;
    std::size_t n_hidden = 0;
    std::vector<double> W;
    std::vector<double> a;
    std::vector<double> b;
    double e0 = 0.0;
    double eps = 0.5;
    double tau = 1.0;
    /// One entry per hidden unit; empty for units not compiled from a clause.
    std::vector<std::optional<HiddenProvenance>> provenance;
    /// Visible unit names, when known.
    VarTable vars;

    Rbm() = default;
    Rbm(std::size_t visible, std::size_t hidden);

    double& w(std::size_t i, std::size_t j) { return W[i * n_hidden + j]; }
    double w(std::size_t i, std::size_t j) const { return W[i * n_hidden + j]; }

    /// Grows (or shrinks) the hidden layer; new units start with zero
    /// parameters and no provenance.
    void resize_hidden(std::size_t hidden);

    /// Throws std::invalid_argument if the parameter arrays disagree with the sizes.
    void check_shape() const;

    bool operator==(const Rbm&) const = default;
};

struct CompileOptions {
    double eps = 0.5;
    /// Implement single-literal conjuncts with the visible bias instead of a hidden unit.
    bool fold_singletons = false;
    double tau = 1.0;
};

/// One hidden unit per conjunct with energy term
///   -w' h_j (sum_{t in pos} x_t - sum_{k in neg} x_k - |pos| + eps).
/// With fold_singletons, x becomes +eps w' on a_x, and !x becomes -eps w' on
/// a_x and -eps w' on e0 (the term -(1-x) eps w').
/// For an unweighted strict input, s(x) = -min_h E(x,h) / eps.
/// Throws CompileError for eps outside (0,1) or a non-positive weight.
Rbm compile_sdnf(const Sdnf& sdnf, const CompileOptions& opts = {});

/// Concatenation of per-clause SDNF compilations; min_h E(x,h) equals
/// -eps times the (weighted) number of satisfied clauses.
Rbm compile_cnf(const Cnf& cnf, const CompileOptions& opts = {});

struct WeightedConj {
    double weight = 1.0;
    ConjClause clause;

    bool operator==(const WeightedConj&) const = default;
};

enum class MergeMode {
    /// Only identical conjuncts are merged. Preserves the weighted sum at every x.
    identical,
    /// Also drops a conjunct whose literals include another's, adding its weight
    /// to the shorter one. This changes the weighted sum wherever the shorter
    /// conjunct holds but the longer one does not.
    subsumed,
};

/// Merges duplicates (and, in `subsumed` mode, subsumed conjuncts) summing
/// their weights. Output is sorted by (pos, neg).
std::vector<WeightedConj> merge_weighted_conjuncts(std::vector<WeightedConj> clauses,
                                                   MergeMode mode = MergeMode::subsumed);

/// Penalty-logic compilation: every formula is turned into an SDNF whose
/// conjuncts carry the formula's weight; identical conjuncts are merged and
/// the result compiled with compile_sdnf.
Rbm compile_knowledge_base(const KnowledgeBase& kb, const CompileOptions& opts = {},
                           MergeMode mode = MergeMode::identical);

/// The weighted conjunct list compile_knowledge_base compiles.
Sdnf knowledge_base_conjuncts(const KnowledgeBase& kb, MergeMode mode = MergeMode::identical);

/// Hidden pre-activation sum_i w_ij x_i + b_j for every j. Works for binary
/// or relaxed (real-valued) visible states.
void hidden_preactivations(const Rbm& rbm, std::span<const double> x, std::span<double> out);
void hidden_preactivations(const Rbm& rbm, std::span<const std::uint8_t> x, std::span<double> out);

/// E(x,h) including e0. Throws std::invalid_argument on a size mismatch.
double energy(const Rbm& rbm, std::span<const std::uint8_t> x, std::span<const std::uint8_t> h);

/// Closed-form min over h: h_j = 1 iff its pre-activation is positive.
double min_energy_over_h(const Rbm& rbm, std::span<const std::uint8_t> x);
double min_energy_over_h(const Rbm& rbm, std::span<const double> x);

/// F(x) = -sum_i a_i x_i + e0 - sum_j softplus(c * pre_j(x)).
double free_energy(const Rbm& rbm, std::span<const std::uint8_t> x, double c = 1.0);
double free_energy(const Rbm& rbm, std::span<const double> x, double c = 1.0);

/// log(1 + exp(z)) without overflow.
double softplus(double z) noexcept;
double sigmoid(double z) noexcept;

struct EnergyReport {
    double energy_min_h = 0;
    double free_energy = 0;
    /// -energy_min_h / eps: (weighted) number of satisfied conjuncts.
    double sat_count = 0;
};

EnergyReport energy_report(const Rbm& rbm, std::span<const std::uint8_t> x, double c = 1.0);

}  // namespace lbm
