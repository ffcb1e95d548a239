#pragma once

// Per-element bodies shared by the serial and OpenMP kernels.

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "lbm/kernels.hpp"

namespace lbm::kernels::detail {

inline void check_completion_outputs(std::size_t n_visible, const Completions& comp, std::span<double> a,
                                     std::span<double> b) {
    if (comp.base.size() != n_visible) throw std::invalid_argument("completion base has the wrong length");
    if (comp.free_vars.size() >= 63) throw std::invalid_argument("too many free variables to enumerate");
    for (auto v : comp.free_vars)
        if (v >= n_visible) throw std::invalid_argument("free variable out of range");
    if (!a.empty() && a.size() != comp.count()) throw std::invalid_argument("output size must equal 2^free");
    if (!b.empty() && b.size() != comp.count()) throw std::invalid_argument("output size must equal 2^free");
}

inline void check_cnf_outputs(const Cnf& cnf, const Completions& comp, std::span<double> out) {
    check_completion_outputs(cnf.n_vars, comp, out, {});
}

inline void check_batch(const Rbm& rbm, std::span<const double> rows, std::span<double> out) {
    if (rows.size() != out.size() * rbm.n_visible) throw std::invalid_argument("batch shape mismatch");
}

inline std::size_t check_cd(std::size_t nv, std::size_t nh, std::span<const double> v0, std::span<const double> ph0,
                            std::span<const double> vk, std::span<const double> phk, std::span<double> dW,
                            std::span<double> da, std::span<double> db) {
    if (nv == 0) throw std::invalid_argument("CD statistics need at least one visible unit");
    const auto rows = v0.size() / nv;
    if (v0.size() != rows * nv || vk.size() != rows * nv || ph0.size() != rows * nh || phk.size() != rows * nh ||
        dW.size() != nv * nh || da.size() != nv || db.size() != nh)
        throw std::invalid_argument("CD statistics shape mismatch");
    return rows;
}

// Parameters that do not depend on the free variables, computed once per thread.
struct CompletionScratch {
    Bits x;
    std::vector<double> base_pre;
    std::vector<double> pre;
    double base_visible = 0;

    CompletionScratch(const Rbm& rbm, const Completions& comp)
        : x(comp.base.begin(), comp.base.end()), base_pre(rbm.n_hidden), pre(rbm.n_hidden) {
        for (auto v : comp.free_vars) x[v] = 0;
        hidden_preactivations(rbm, std::span<const std::uint8_t>(x), base_pre);
        for (std::size_t i = 0; i < rbm.n_visible; ++i)
            if (x[i]) base_visible += rbm.a[i];
    }
};

inline void score_completion(const Rbm& rbm, const Completions& comp, std::uint64_t code, double c,
                             CompletionScratch& s, std::span<double> min_energy, std::span<double> free_energy) {
    std::copy(s.base_pre.begin(), s.base_pre.end(), s.pre.begin());
    double visible = s.base_visible;
    for (std::size_t bit = 0; bit < comp.free_vars.size(); ++bit) {
        if (!((code >> bit) & 1U)) continue;
        const auto i = comp.free_vars[bit];
        visible += rbm.a[i];
        const double* row = rbm.W.data() + static_cast<std::size_t>(i) * rbm.n_hidden;
        for (std::size_t j = 0; j < rbm.n_hidden; ++j) s.pre[j] += row[j];
    }
    if (!min_energy.empty()) {
        double e = rbm.e0 - visible;
        for (double p : s.pre) e -= std::max(0.0, p);
        min_energy[code] = e;
    }
    if (!free_energy.empty()) {
        double f = rbm.e0 - visible;
        for (double p : s.pre) f -= softplus(c * p);
        free_energy[code] = f;
    }
}

inline void cd_column(std::size_t nv, std::size_t nh, std::size_t rows, std::size_t j, std::span<const double> v0,
                      std::span<const double> ph0, std::span<const double> vk, std::span<const double> phk,
                      std::span<double> dW, std::span<double> db) {
    double bsum = 0;
    for (std::size_t i = 0; i < nv; ++i) dW[i * nh + j] = 0.0;
    for (std::size_t n = 0; n < rows; ++n) {
        const double p0 = ph0[n * nh + j];
        const double pk = phk[n * nh + j];
        bsum += p0 - pk;
        for (std::size_t i = 0; i < nv; ++i) dW[i * nh + j] += v0[n * nv + i] * p0 - vk[n * nv + i] * pk;
    }
    db[j] = bsum;
}

inline void cd_visible(std::size_t nv, std::size_t rows, std::size_t i, std::span<const double> v0,
                       std::span<const double> vk, std::span<double> da) {
    double s = 0;
    for (std::size_t n = 0; n < rows; ++n) s += v0[n * nv + i] - vk[n * nv + i];
    da[i] = s;
}

}  // namespace lbm::kernels::detail
