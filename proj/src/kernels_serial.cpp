#include <algorithm>
#include <stdexcept>
#include <vector>

#include "kernels_common.hpp"
#include "lbm/kernels.hpp"

namespace lbm::kernels {

void Completions::decode(std::uint64_t code, std::span<std::uint8_t> x) const {
    std::copy(base.begin(), base.end(), x.begin());
    for (std::size_t b = 0; b < free_vars.size(); ++b) x[free_vars[b]] = static_cast<std::uint8_t>((code >> b) & 1U);
}

namespace serial {

void enumerate_energies(const Rbm& rbm, const Completions& comp, double c, std::span<double> min_energy,
                        std::span<double> free_energy) {
    detail::check_completion_outputs(rbm.n_visible, comp, min_energy, free_energy);
    detail::CompletionScratch scratch(rbm, comp);
    const auto n = comp.count();
    for (std::uint64_t code = 0; code < n; ++code) detail::score_completion(rbm, comp, code, c, scratch, min_energy, free_energy);
}

void satisfied_weights(const Cnf& cnf, const Completions& comp, std::span<double> out) {
    detail::check_cnf_outputs(cnf, comp, out);
    Bits x(comp.base.size());
    const auto n = comp.count();
    for (std::uint64_t code = 0; code < n; ++code) {
        comp.decode(code, x);
        out[code] = cnf.satisfied_weight(x);
    }
}

void batch_free_energy(const Rbm& rbm, std::span<const double> rows, double c, std::span<double> out) {
    detail::check_batch(rbm, rows, out);
    for (std::size_t r = 0; r < out.size(); ++r)
        out[r] = lbm::free_energy(rbm, rows.subspan(r * rbm.n_visible, rbm.n_visible), c);
}

void cd_statistics(std::size_t n_visible, std::size_t n_hidden, std::span<const double> v0, std::span<const double> ph0,
                   std::span<const double> vk, std::span<const double> phk, std::span<double> dW, std::span<double> da,
                   std::span<double> db) {
    const auto rows = detail::check_cd(n_visible, n_hidden, v0, ph0, vk, phk, dW, da, db);
    for (std::size_t j = 0; j < n_hidden; ++j) detail::cd_column(n_visible, n_hidden, rows, j, v0, ph0, vk, phk, dW, db);
    for (std::size_t i = 0; i < n_visible; ++i) detail::cd_visible(n_visible, rows, i, v0, vk, da);
}

}  // namespace serial

}  // namespace lbm::kernels
