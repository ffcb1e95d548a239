#include "lbm/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "lbm/error.hpp"
#include "lbm/kernels.hpp"

namespace lbm {

void Dataset::validate() const {
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r].size() != n_visible())
            throw std::invalid_argument("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                                        " values, expected " + std::to_string(n_visible()));
    if (label_index && *label_index >= n_visible()) throw std::invalid_argument("label index out of range");
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

Dataset read_dataset_csv(std::string_view text) {
    Dataset data;
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (trim(line).empty()) continue;

        const auto fields = split_fields(line);
        if (!have_header) {
            for (auto name : fields) {
                if (name.empty()) throw ParseError("empty column name", line_no, 1);
                if (data.vars.find(name)) throw ParseError("duplicate column '" + std::string(name) + "'", line_no, 1);
                data.vars.intern(name);
            }
            have_header = true;
            continue;
        }
        if (fields.size() != data.vars.size())
            throw ParseError("expected " + std::to_string(data.vars.size()) + " values, found " +
                                 std::to_string(fields.size()),
                             line_no, 1);
        Bits row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (fields[i] == "0") row[i] = 0;
            else if (fields[i] == "1") row[i] = 1;
            else throw ParseError("value '" + std::string(fields[i]) + "' is not 0 or 1", line_no, 1);
        }
        data.rows.push_back(std::move(row));
    }
    if (!have_header) throw ParseError("dataset is empty");
    if (data.rows.empty()) throw ParseError("dataset has no rows");
    return data;
}

void TrainConfig::validate() const {
    if (!(learning_rate >= 0)) throw std::invalid_argument("learning_rate must be non-negative");
    if (cd_k == 0) throw std::invalid_argument("cd_k must be at least 1");
    if (batch == 0) throw std::invalid_argument("batch must be positive");
    if (!(init_scale >= 0)) throw std::invalid_argument("init_scale must be non-negative");
    if (!(weight_decay >= 0)) throw std::invalid_argument("weight_decay must be non-negative");
    if (!(momentum >= 0 && momentum < 1)) throw std::invalid_argument("momentum must lie in [0,1)");
}

Rbm init_from_knowledge(const Sdnf& sdnf, std::size_t extra_hidden, const TrainConfig& cfg, const CompileOptions& opts) {
    cfg.validate();
    Rbm rbm = compile_sdnf(sdnf, opts);
    const std::size_t first = rbm.n_hidden;
    rbm.resize_hidden(first + extra_hidden);
    if (extra_hidden == 0) return rbm;
    Rng rng = make_rng(cfg.seed, 0x1417);
    std::normal_distribution<double> init(0.0, 1.0);
    for (std::size_t i = 0; i < rbm.n_visible; ++i)
        for (std::size_t j = first; j < rbm.n_hidden; ++j) rbm.w(i, j) = cfg.init_scale * init(rng);
    for (std::size_t j = first; j < rbm.n_hidden; ++j) rbm.b[j] = cfg.init_scale * init(rng);
    return rbm;
}

CdTrainer::CdTrainer(Rbm rbm, TrainConfig cfg)
    : rbm_(std::move(rbm)),
      cfg_(cfg),
      rng_(make_rng(cfg.seed, 0xCD)),
      vW_(rbm_.W.size(), 0.0),
      va_(rbm_.n_visible, 0.0),
      vb_(rbm_.n_hidden, 0.0) {
    cfg_.validate();
    rbm_.check_shape();
}

void CdTrainer::step(std::span<const Bits> batch, CdTrace* trace) {
    const std::size_t nv = rbm_.n_visible;
    const std::size_t nh = rbm_.n_hidden;
    const std::size_t rows = batch.size();
    if (rows == 0) return;
    CdTrace local;
    CdTrace& t = trace ? *trace : local;
    t.v0.assign(rows * nv, 0.0);
    t.ph0.assign(rows * nh, 0.0);
    t.vk.assign(rows * nv, 0.0);
    t.phk.assign(rows * nh, 0.0);

    std::vector<double> pre(nh);
    std::vector<double> h(nh);
    for (std::size_t n = 0; n < rows; ++n) {
        if (batch[n].size() != nv) throw std::invalid_argument("data row size does not match the RBM");
        std::span<double> v0(t.v0.data() + n * nv, nv);
        std::span<double> ph0(t.ph0.data() + n * nh, nh);
        std::span<double> vk(t.vk.data() + n * nv, nv);
        std::span<double> phk(t.phk.data() + n * nh, nh);
        std::copy(batch[n].begin(), batch[n].end(), v0.begin());

        hidden_preactivations(rbm_, v0, pre);
        std::transform(pre.begin(), pre.end(), ph0.begin(), sigmoid);

        std::copy(v0.begin(), v0.end(), vk.begin());
        for (std::size_t k = 0; k < cfg_.cd_k; ++k) {
            if (k > 0) hidden_preactivations(rbm_, vk, pre);
            for (std::size_t j = 0; j < nh; ++j) h[j] = bernoulli(rng_, sigmoid(pre[j])) ? 1.0 : 0.0;
            for (std::size_t i = 0; i < nv; ++i) {
                double act = rbm_.a[i];
                const double* row = rbm_.W.data() + i * nh;
                for (std::size_t j = 0; j < nh; ++j) act += row[j] * h[j];
                vk[i] = bernoulli(rng_, sigmoid(act)) ? 1.0 : 0.0;
            }
        }
        hidden_preactivations(rbm_, vk, pre);
        std::transform(pre.begin(), pre.end(), phk.begin(), sigmoid);
    }

    std::vector<double> dW(nv * nh), da(nv), db(nh);
    kernels::cd_statistics(nv, nh, t.v0, t.ph0, t.vk, t.phk, dW, da, db);

    const double rate = cfg_.learning_rate / static_cast<double>(rows);
    auto update = [&](std::vector<double>& param, std::vector<double>& vel, const std::vector<double>& grad, bool decay) {
        for (std::size_t k = 0; k < param.size(); ++k) {
            double g = rate * grad[k];
            if (decay) g -= cfg_.learning_rate * cfg_.weight_decay * param[k];
            vel[k] = cfg_.momentum * vel[k] + g;
            param[k] += vel[k];
        }
    };
    update(rbm_.W, vW_, dW, true);
    update(rbm_.a, va_, da, false);
    update(rbm_.b, vb_, db, false);
}

void CdTrainer::epoch(const Dataset& data) {
    std::vector<std::size_t> order(data.rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng_);
    std::vector<Bits> batch;
    for (std::size_t start = 0; start < order.size(); start += cfg_.batch) {
        batch.clear();
        for (std::size_t k = start; k < std::min(order.size(), start + cfg_.batch); ++k) batch.push_back(data.rows[order[k]]);
        step(batch);
    }
}

Rbm cd_train(Rbm rbm, const Dataset& data, const TrainConfig& cfg, const EpochCallback& on_epoch) {
    if (data.rows.empty()) throw std::invalid_argument("cannot train on an empty dataset");
    for (const auto& row : data.rows)
        if (row.size() != rbm.n_visible) throw std::invalid_argument("data row size does not match the RBM");
    CdTrainer trainer(std::move(rbm), cfg);
    if (on_epoch) on_epoch(0, trainer.model());
    for (std::size_t e = 1; e <= cfg.epochs; ++e) {
        trainer.epoch(data);
        if (on_epoch) on_epoch(e, trainer.model());
    }
    return std::move(trainer).take();
}

LabelPrediction predict_label(const Rbm& rbm, std::span<const std::uint8_t> features, std::size_t label_index, double c) {
    if (label_index >= rbm.n_visible) throw std::invalid_argument("label index out of range");
    Bits x(rbm.n_visible, 0);
    if (features.size() == rbm.n_visible) {
        std::copy(features.begin(), features.end(), x.begin());
    } else if (features.size() + 1 == rbm.n_visible) {
        std::copy(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(label_index), x.begin());
        std::copy(features.begin() + static_cast<std::ptrdiff_t>(label_index), features.end(),
                  x.begin() + static_cast<std::ptrdiff_t>(label_index) + 1);
    } else {
        throw std::invalid_argument("feature vector size does not match the RBM");
    }
    std::array<double, 2> f{};
    for (std::uint8_t y = 0; y < 2; ++y) {
        x[label_index] = y;
        f[y] = free_energy(rbm, std::span<const std::uint8_t>(x), c);
    }
    LabelPrediction out;
    // softmax(-F) = sigmoid of the free-energy difference
    out.scores[1] = sigmoid(f[0] - f[1]);
    out.scores[0] = 1.0 - out.scores[1];
    out.label = f[1] < f[0] ? 1 : 0;
    return out;
}

double free_energy_gap(const Rbm& rbm, std::span<const Bits> positives, std::span<const Bits> negatives, double c) {
    if (positives.empty() || negatives.empty()) throw std::invalid_argument("free-energy gap needs both row sets");
    auto mean = [&](std::span<const Bits> rows) {
        double s = 0;
        for (const auto& r : rows) s += free_energy(rbm, std::span<const std::uint8_t>(r), c);
        return s / static_cast<double>(rows.size());
    };
    return mean(positives) - mean(negatives);
}

double data_free_energy_gap(const Rbm& rbm, const Dataset& data, double c, std::size_t max_vars) {
    if (rbm.n_visible > max_vars)
        throw GuardError(std::to_string(rbm.n_visible) + " visible units; the gap is enumerated up to " +
                         std::to_string(max_vars));
    std::unordered_set<std::string> seen;
    std::vector<Bits> pos;
    for (const auto& r : data.rows)
        if (seen.insert(std::string(r.begin(), r.end())).second) pos.push_back(r);
    std::vector<Bits> neg;
    Bits x(rbm.n_visible);
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << rbm.n_visible); ++code) {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<std::uint8_t>((code >> i) & 1U);
        if (!seen.contains(std::string(x.begin(), x.end()))) neg.push_back(x);
    }
    return free_energy_gap(rbm, pos, neg, c);
}

}  // namespace lbm
