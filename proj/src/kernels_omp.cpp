#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kernels_common.hpp"
#include "lbm/kernels.hpp"

namespace lbm::kernels {

namespace omp {

void enumerate_energies(const Rbm& rbm, const Completions& comp, double c, std::span<double> min_energy,
                        std::span<double> free_energy) {
    detail::check_completion_outputs(rbm.n_visible, comp, min_energy, free_energy);
    const auto n = static_cast<std::int64_t>(comp.count());
#pragma omp parallel
    {
        detail::CompletionScratch scratch(rbm, comp);
#pragma omp for schedule(static)
        for (std::int64_t code = 0; code < n; ++code)
            detail::score_completion(rbm, comp, static_cast<std::uint64_t>(code), c, scratch, min_energy, free_energy);
    }
}

void satisfied_weights(const Cnf& cnf, const Completions& comp, std::span<double> out) {
    detail::check_cnf_outputs(cnf, comp, out);
    const auto n = static_cast<std::int64_t>(comp.count());
#pragma omp parallel
    {
        Bits x(comp.base.size());
#pragma omp for schedule(static)
        for (std::int64_t code = 0; code < n; ++code) {
            comp.decode(static_cast<std::uint64_t>(code), x);
            out[static_cast<std::size_t>(code)] = cnf.satisfied_weight(x);
        }
    }
}

void batch_free_energy(const Rbm& rbm, std::span<const double> rows, double c, std::span<double> out) {
    detail::check_batch(rbm, rows, out);
    const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < n; ++r) {
        const auto row = static_cast<std::size_t>(r);
        out[row] = lbm::free_energy(rbm, rows.subspan(row * rbm.n_visible, rbm.n_visible), c);
    }
}

void cd_statistics(std::size_t n_visible, std::size_t n_hidden, std::span<const double> v0, std::span<const double> ph0,
                   std::span<const double> vk, std::span<const double> phk, std::span<double> dW, std::span<double> da,
                   std::span<double> db) {
    const auto rows = detail::check_cd(n_visible, n_hidden, v0, ph0, vk, phk, dW, da, db);
    const auto nh = static_cast<std::int64_t>(n_hidden);
    const auto nv = static_cast<std::int64_t>(n_visible);
#pragma omp parallel
    {
#pragma omp for schedule(static) nowait
        for (std::int64_t j = 0; j < nh; ++j)
            detail::cd_column(n_visible, n_hidden, rows, static_cast<std::size_t>(j), v0, ph0, vk, phk, dW, db);
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < nv; ++i) detail::cd_visible(n_visible, rows, static_cast<std::size_t>(i), v0, vk, da);
    }
}

}  // namespace omp

void enumerate_energies(const Rbm& rbm, const Completions& comp, double c, std::span<double> min_energy,
                        std::span<double> free_energy, Backend backend) {
    if (backend == Backend::serial) serial::enumerate_energies(rbm, comp, c, min_energy, free_energy);
    else omp::enumerate_energies(rbm, comp, c, min_energy, free_energy);
}

void satisfied_weights(const Cnf& cnf, const Completions& comp, std::span<double> out, Backend backend) {
    if (backend == Backend::serial) serial::satisfied_weights(cnf, comp, out);
    else omp::satisfied_weights(cnf, comp, out);
}

void batch_free_energy(const Rbm& rbm, std::span<const double> rows, double c, std::span<double> out, Backend backend) {
    if (backend == Backend::serial) serial::batch_free_energy(rbm, rows, c, out);
    else omp::batch_free_energy(rbm, rows, c, out);
}

void cd_statistics(std::size_t n_visible, std::size_t n_hidden, std::span<const double> v0, std::span<const double> ph0,
                   std::span<const double> vk, std::span<const double> phk, std::span<double> dW, std::span<double> da,
                   std::span<double> db, Backend backend) {
    if (backend == Backend::serial) serial::cd_statistics(n_visible, n_hidden, v0, ph0, vk, phk, dW, da, db);
    else omp::cd_statistics(n_visible, n_hidden, v0, ph0, vk, phk, dW, da, db);
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

}  // namespace lbm::kernels
