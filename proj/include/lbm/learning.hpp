#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lbm/logic.hpp"
#include "lbm/normal_form.hpp"
#include "lbm/random.hpp"
#include "lbm/rbm.hpp"

namespace lbm {

struct Dataset {
    std::vector<Bits> rows;
    VarTable vars;  ///< column names, in column order
    std::optional<std::size_t> label_index;

    std::size_t n_visible() const { return vars.size(); }
    /// Throws std::invalid_argument when a row length differs from the column count.
    void validate() const;
};

/// CSV with a header naming the variables and one 0/1 row per line.
/// Blank lines are skipped. Throws ParseError on malformed input or no rows.
Dataset read_dataset_csv(std::string_view text);

struct TrainConfig {
    std::size_t cd_k = 1;
    double learning_rate = 0.01;
    std::size_t epochs = 100;
    std::size_t batch = 4;
    std::size_t extra_hidden = 0;
    double init_scale = 0.01;
    std::uint64_t seed = 0;
    double weight_decay = 0.0;
    double momentum = 0.0;

    /// Throws std::invalid_argument unless learning_rate >= 0, cd_k >= 1,
    /// batch >= 1, init_scale >= 0, weight_decay >= 0, momentum in [0,1).
    void validate() const;
};

/// compile_sdnf(sdnf) followed by `extra_hidden` units whose weights and
/// biases are drawn from Normal(0, init_scale). An empty SDNF gives a plain
/// random RBM over sdnf.n_vars visible units.
Rbm init_from_knowledge(const Sdnf& sdnf, std::size_t extra_hidden, const TrainConfig& cfg,
                        const CompileOptions& opts = {});

/// The states one CD-k step saw: rows x n_visible and rows x n_hidden, row-major.
struct CdTrace {
    std::vector<double> v0;
    std::vector<double> ph0;
    std::vector<double> vk;
    std::vector<double> phk;
};

/// Mini-batch CD-k. Positive phase uses hidden probabilities of the data; the
/// negative phase runs k block-Gibbs steps from the data with sampled states
/// and ends on hidden probabilities. Updates (batch means) touch W, a and b;
/// n_visible, n_hidden and e0 never change.
class CdTrainer {
public:
    CdTrainer(Rbm rbm, TrainConfig cfg);

    void step(std::span<const Bits> batch, CdTrace* trace = nullptr);
    /// One pass over a shuffled copy of the rows.
    void epoch(const Dataset& data);

    const Rbm& model() const { return rbm_; }
    Rbm take() && { return std::move(rbm_); }

private:
    Rbm rbm_;
    TrainConfig cfg_;
    Rng rng_;
    std::vector<double> vW_, va_, vb_;
};

/// Called with epoch 0 before training and after every epoch.
using EpochCallback = std::function<void(std::size_t epoch, const Rbm&)>;

/// Throws std::invalid_argument on empty data or a visible-size mismatch.
Rbm cd_train(Rbm rbm, const Dataset& data, const TrainConfig& cfg, const EpochCallback& on_epoch = {});

struct LabelPrediction {
    std::uint8_t label = 0;
    std::array<double, 2> scores{};  ///< softmax(-F) over y = 0, 1
};

/// Scores y in {0,1} at position label_index by -F(x with y, c). `features`
/// is either the n_visible - 1 non-label values or a full row (label entry ignored).
LabelPrediction predict_label(const Rbm& rbm, std::span<const std::uint8_t> features, std::size_t label_index,
                              double c = 1.0);

/// mean F(positives) - mean F(negatives); negative when the positives sit lower.
double free_energy_gap(const Rbm& rbm, std::span<const Bits> positives, std::span<const Bits> negatives, double c = 1.0);

/// Gap between the distinct data rows and every other assignment.
/// Throws GuardError above max_vars visible units.
double data_free_energy_gap(const Rbm& rbm, const Dataset& data, double c = 1.0, std::size_t max_vars = 20);

}  // namespace lbm
