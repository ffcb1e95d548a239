#pragma once

// Data-parallel inner loops. Every kernel has a plain serial version, kept as
// the reference the tests compare against, and an OpenMP version. Outputs are
// computed element-wise (or with a fixed summation order), so both backends
// return bit-identical results.

#include <cstddef>
#include <cstdint>
#include <span>

#include "lbm/normal_form.hpp"
#include "lbm/rbm.hpp"

namespace lbm::kernels {

enum class Backend { serial, openmp };

/// Completions of a partial assignment: code bit b sets variable free_vars[b];
/// the other variables keep their value from `base`.
struct Completions {
    std::span<const std::uint8_t> base;
    std::span<const VarIndex> free_vars;

    std::uint64_t count() const { return std::uint64_t{1} << free_vars.size(); }
    void decode(std::uint64_t code, std::span<std::uint8_t> x) const;
};

/// For every completion code: min_h E(x,h) and F(x) at confidence c.
/// Either output span may be empty to skip it; otherwise its size is count().
void enumerate_energies(const Rbm& rbm, const Completions& comp, double c, std::span<double> min_energy,
                        std::span<double> free_energy, Backend backend = Backend::openmp);

/// (Weighted) satisfied-clause count for every completion code.
void satisfied_weights(const Cnf& cnf, const Completions& comp, std::span<double> out,
                       Backend backend = Backend::openmp);

/// F(x) for each row of a row-major batch of visible states (rows x n_visible).
void batch_free_energy(const Rbm& rbm, std::span<const double> rows, double c, std::span<double> out,
                       Backend backend = Backend::openmp);

/// Contrastive-divergence statistics summed over a batch:
///   dW_ij = sum_n (v0_ni ph0_nj - vk_ni phk_nj), da_i = sum_n (v0_ni - vk_ni), db_j = sum_n (ph0_nj - phk_nj).
/// v0/vk are rows x n_visible, ph0/phk rows x n_hidden, all row-major.
void cd_statistics(std::size_t n_visible, std::size_t n_hidden, std::span<const double> v0, std::span<const double> ph0,
                   std::span<const double> vk, std::span<const double> phk, std::span<double> dW, std::span<double> da,
                   std::span<double> db, Backend backend = Backend::openmp);

/// Thread count used by the OpenMP backend (1 when built without OpenMP).
int max_threads();
void set_threads(int n);

namespace serial {
void enumerate_energies(const Rbm&, const Completions&, double, std::span<double>, std::span<double>);
void satisfied_weights(const Cnf&, const Completions&, std::span<double>);
void batch_free_energy(const Rbm&, std::span<const double>, double, std::span<double>);
void cd_statistics(std::size_t, std::size_t, std::span<const double>, std::span<const double>,
                   std::span<const double>, std::span<const double>, std::span<double>, std::span<double>,
                   std::span<double>);
}  // namespace serial

namespace omp {
void enumerate_energies(const Rbm&, const Completions&, double, std::span<double>, std::span<double>);
void satisfied_weights(const Cnf&, const Completions&, std::span<double>);
void batch_free_energy(const Rbm&, std::span<const double>, double, std::span<double>);
void cd_statistics(std::size_t, std::size_t, std::span<const double>, std::span<const double>,
                   std::span<const double>, std::span<const double>, std::span<double>, std::span<double>,
                   std::span<double>);
}  // namespace omp

}  // namespace lbm::kernels
