#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "generators.hpp"
#include "lbm/error.hpp"
#include "lbm/reasoning.hpp"

using namespace lbm;

namespace {

constexpr const char* kXor = "((x & !y) | (!x & y)) <-> z";

Rbm xor_rbm() { return compile_sdnf(wff_to_sdnf(parse_wff(kXor))); }

bool xor_true(const Bits& x) { return (x[0] ^ x[1]) == x[2]; }

Assignment clamp_xy(std::uint8_t x, std::uint8_t y) {
    Assignment a(3);
    a.clamp(0, x);
    a.clamp(1, y);
    return a;
}

/// p(z = 1 | x, y) at temperature tau, summing exp(-E/tau) over every h.
double exact_z_probability(const Rbm& rbm, std::uint8_t x, std::uint8_t y, double tau) {
    double mass[2] = {0, 0};
    for (std::uint8_t z = 0; z < 2; ++z)
        for (std::uint64_t hc = 0; hc < (std::uint64_t{1} << rbm.n_hidden); ++hc)
            mass[z] += std::exp(-energy(rbm, Bits{x, y, z}, testing::decode(hc, rbm.n_hidden)) / tau);
    return mass[1] / (mass[0] + mass[1]);
}

}  // namespace

TEST_SUITE("gibbs") {
    TEST_CASE("fully clamped state never moves") {
        Rbm rbm = xor_rbm();
        Assignment a(3);
        a.clamp(0, 1);
        a.clamp(1, 1);
        a.clamp(2, 0);
        Bits h;
        Rng rng = make_rng(1);
        for (int s = 0; s < 200; ++s) {
            gibbs_step(rbm, a, h, 1.0, rng);
            REQUIRE(a.values == Bits{1, 1, 0});
            REQUIRE(h.size() == rbm.n_hidden);
        }
    }

    TEST_CASE("clamped coordinates are respected on random networks") {
        Rng rng = make_rng(2);
        std::normal_distribution<double> normal(0.0, 3.0);
        for (int k = 0; k < 20; ++k) {
            const std::size_t nv = 2 + testing::uniform_index(rng, 8);
            Rbm rbm(nv, 1 + testing::uniform_index(rng, 10));
            for (auto& w : rbm.W) w = normal(rng);
            for (auto& v : rbm.a) v = normal(rng);
            for (auto& v : rbm.b) v = normal(rng);
            Assignment a(nv);
            for (VarIndex i = 0; i < nv; ++i)
                if (bernoulli(rng, 0.5)) a.clamp(i, bernoulli(rng, 0.5) ? 1 : 0);
            const Assignment start = a;
            Bits h;
            for (int s = 0; s < 300; ++s) {
                gibbs_step(rbm, a, h, 0.7, rng);
                for (auto i : start.clamped_indices()) REQUIRE(a.values[i] == start.values[i]);
            }
        }
    }

    TEST_CASE("zero temperature thresholds the hidden layer") {
        Rbm rbm = xor_rbm();
        Rng rng = make_rng(3);
        for (std::uint64_t code = 0; code < 8; ++code) {
            Assignment a = Assignment::total(testing::decode(code, 3));
            for (VarIndex i = 0; i < 3; ++i) a.clamp(i, a.values[i]);
            std::vector<double> pre(rbm.n_hidden);
            hidden_preactivations(rbm, std::span<const std::uint8_t>(a.values), pre);
            Bits h;
            gibbs_step(rbm, a, h, 0.0, rng);
            for (std::size_t j = 0; j < rbm.n_hidden; ++j) CHECK(h[j] == (pre[j] > 0 ? 1 : 0));
        }
    }

    TEST_CASE("clamped xor chain matches the exact conditional") {
        Rbm rbm = xor_rbm();
        for (double tau : {1.0, 0.05}) {
            Assignment a = clamp_xy(1, 0);
            Bits h;
            Rng rng = make_rng(4);
            std::size_t ones = 0;
            const std::size_t steps = 40000;
            for (std::size_t s = 0; s < steps; ++s) {
                gibbs_step(rbm, a, h, tau, rng);
                ones += a.values[2];
            }
            const double freq = static_cast<double>(ones) / steps;
            const double exact = exact_z_probability(rbm, 1, 0, tau);
            CHECK(std::abs(freq - exact) < 0.02);
            if (tau < 0.1) CHECK(freq > 0.99);
        }
    }
}

TEST_SUITE("sampling") {
    TEST_CASE("default threshold") {
        SamplerConfig cfg;
        CHECK(cfg.threshold() == doctest::Approx(-std::log1p(std::exp(2.5))));
        cfg.accept_threshold = -1.0;
        CHECK(cfg.threshold() == -1.0);
    }

    TEST_CASE("config validation") {
        SamplerConfig cfg;
        cfg.max_samples = 0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg = {};
        cfg.tau = 0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg = {};
        cfg.eps = 1;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg = {};
        cfg.c = -1;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }

    TEST_CASE("xor models are found and are sound") {
        Rbm rbm = xor_rbm();
        ModelOracle oracle{[](std::span<const std::uint8_t> x) { return xor_true(Bits(x.begin(), x.end())); }, 4};
        SamplerConfig cfg;
        cfg.max_samples = 4000;
        cfg.seed = 5;
        SamplingRun run = sample_models(rbm, Assignment(3), cfg, &oracle);
        CHECK(run.accepted.size() == 4);
        for (const auto& x : run.accepted) CHECK(xor_true(x));
        CHECK(run.accuracy == 1.0);
        CHECK(run.accepted_true_samples == run.accepted_samples);
        REQUIRE(run.samples_to_full_coverage.has_value());
        CHECK(run.samples_drawn == *run.samples_to_full_coverage);
        CHECK(run.coverage_curve.back().coverage == 1.0);
    }

    TEST_CASE("clamped query returns the single completion") {
        Rbm rbm = xor_rbm();
        SamplerConfig cfg;
        cfg.max_samples = 500;
        cfg.stop_at_full_coverage = false;
        SamplingRun run = sample_models(rbm, clamp_xy(1, 0), cfg);
        REQUIRE(run.accepted.size() == 1);
        CHECK(run.accepted[0] == Bits{1, 0, 1});
        CHECK(run.samples_drawn == 500);
    }

    TEST_CASE("unsatisfiable input accepts nothing") {
        Wff w = parse_wff("x & !x & y");
        Sdnf s = wff_to_sdnf(w);
        CHECK(s.clauses.empty());
        Rbm rbm = compile_sdnf(s);
        SamplerConfig cfg;
        cfg.max_samples = 2000;
        SamplingRun run = sample_models(rbm, Assignment(2), cfg);
        CHECK(run.accepted.empty());
        CHECK(run.accepted_samples == 0);
        CHECK(run.accuracy == 1.0);

        // Clause by clause the network has three satisfiable parts; acceptance
        // then needs every clause's share of the free energy.
        Cnf cnf;
        cnf.n_vars = 2;
        cnf.clauses = {Clause({0}, {}), Clause({}, {0}), Clause({1}, {})};
        Rbm cnf_rbm = compile_cnf(cnf);
        cfg.accept_threshold = -3.0 * softplus(cfg.c * cfg.eps);
        run = sample_models(cnf_rbm, Assignment(2), cfg);
        CHECK(run.accepted.empty());
    }

    TEST_CASE("coverage curve is monotone and runs are reproducible") {
        Rbm rbm = compile_sdnf(phi_class_sdnf(6, 4));
        ModelOracle oracle = phi_class_oracle(6, 4);
        SamplerConfig cfg;
        cfg.max_samples = 3000;
        cfg.record_every = 50;
        cfg.seed = 77;
        SamplingRun a = sample_models(rbm, Assignment(10), cfg, &oracle);
        SamplingRun b = sample_models(rbm, Assignment(10), cfg, &oracle);
        CHECK(a == b);
        for (std::size_t k = 1; k < a.coverage_curve.size(); ++k) {
            CHECK(a.coverage_curve[k].samples > a.coverage_curve[k - 1].samples);
            CHECK(a.coverage_curve[k].coverage >= a.coverage_curve[k - 1].coverage);
        }
        CHECK(a.accuracy >= 0.0);
        CHECK(a.accuracy <= 1.0);
        cfg.seed = 78;
        CHECK_FALSE(sample_models(rbm, Assignment(10), cfg, &oracle) == a);
    }
}

TEST_SUITE("enumeration") {
    TEST_CASE("clamped xor ranks the model first") {
        Rbm rbm = xor_rbm();
        SamplerConfig cfg;
        auto ranked = enumerate_models(rbm, clamp_xy(1, 0), cfg);
        REQUIRE(ranked.size() == 2);
        CHECK(ranked[0].x == Bits{1, 0, 1});
        CHECK(ranked[0].is_model);
        CHECK_FALSE(ranked[1].is_model);
        CHECK(ranked[0].free_energy == doctest::Approx(free_energy(rbm, Bits{1, 0, 1}, cfg.c)));
        CHECK(std::abs(ranked[0].free_energy + softplus(2.5)) < 0.01);
        CHECK(ranked[0].posterior > ranked[1].posterior);
    }

    TEST_CASE("unclamped xor flags its four models") {
        Rbm rbm = xor_rbm();
        auto ranked = enumerate_models(rbm, Assignment(3), SamplerConfig{});
        REQUIRE(ranked.size() == 8);
        std::size_t flagged = 0;
        double total = 0;
        for (std::size_t k = 0; k < ranked.size(); ++k) {
            CHECK(ranked[k].is_model == xor_true(ranked[k].x));
            flagged += ranked[k].is_model;
            total += ranked[k].posterior;
            if (k > 0) CHECK(ranked[k - 1].free_energy <= ranked[k].free_energy);
        }
        CHECK(flagged == 4);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
        for (std::size_t k = 0; k < 4; ++k) CHECK(ranked[k].is_model);
    }

    TEST_CASE("no free variables") {
        Rbm rbm = xor_rbm();
        Assignment a = clamp_xy(0, 1);
        a.clamp(2, 1);
        auto ranked = enumerate_models(rbm, a, SamplerConfig{});
        REQUIRE(ranked.size() == 1);
        CHECK(ranked[0].posterior == 1.0);
        CHECK(ranked[0].x == Bits{0, 1, 1});
    }

    TEST_CASE("posterior is softmax of negative free energy") {
        Rng rng = make_rng(8);
        for (int k = 0; k < 10; ++k) {
            Cnf cnf = testing::random_cnf(rng, 6, 12, 3);
            Rbm rbm = compile_cnf(cnf);
            SamplerConfig cfg;
            cfg.c = 1 + 10 * uniform01(rng);
            auto ranked = enumerate_models(rbm, Assignment(6), cfg);
            double z = 0, total = 0;
            for (const auto& r : ranked) z += std::exp(-r.free_energy);
            for (const auto& r : ranked) {
                CHECK(r.posterior == doctest::Approx(std::exp(-r.free_energy) / z));
                total += r.posterior;
            }
            CHECK(std::abs(total - 1.0) < 1e-9);
        }
    }

    TEST_CASE("ranking follows satisfied clause count at high confidence") {
        Rng rng = make_rng(9);
        for (int k = 0; k < 30; ++k) {
            const std::size_t n = 3 + testing::uniform_index(rng, 6);
            Cnf cnf = testing::random_cnf(rng, n, 4 + testing::uniform_index(rng, 25), 3);
            Rbm rbm = compile_cnf(cnf);
            SamplerConfig cfg;
            cfg.c = 10;
            auto ranked = enumerate_models(rbm, Assignment(n), cfg);
            for (std::size_t r = 1; r < ranked.size(); ++r)
                REQUIRE(testing::count_satisfied(cnf, ranked[r - 1].x) >= testing::count_satisfied(cnf, ranked[r].x));
        }
    }

    TEST_CASE("guard") {
        Rbm rbm(21, 0);
        CHECK_THROWS_AS(enumerate_models(rbm, Assignment(21), SamplerConfig{}), GuardError);
        CHECK_NOTHROW(enumerate_models(Rbm(3, 0), Assignment(3), SamplerConfig{}, 3));
    }
}

TEST_SUITE("formula class") {
    TEST_CASE("closed-form sdnf matches its model set") {
        for (auto [M, N] : {std::pair<std::size_t, std::size_t>{1, 1}, {2, 3}, {4, 4}, {3, 6}}) {
            Sdnf s = phi_class_sdnf(M, N);
            CHECK(s.clauses.size() == N);
            CHECK(s.n_vars == M + N);
            CHECK(is_strict(s));
            ModelOracle oracle = phi_class_oracle(M, N);
            REQUIRE(oracle.model_count.has_value());
            CHECK(*oracle.model_count == (std::size_t{1} << N) - 1);
            std::size_t count = 0;
            for (std::uint64_t code = 0; code < (std::uint64_t{1} << (M + N)); ++code) {
                Bits x = testing::decode(code, M + N);
                bool direct = true;
                for (std::size_t i = 0; i < M; ++i) direct = direct && x[i];
                bool any = false;
                for (std::size_t i = M; i < M + N; ++i) any = any || x[i];
                direct = direct && any;
                REQUIRE(s.is_true(x) == direct);
                REQUIRE(oracle.satisfies(x) == direct);
                count += direct;
            }
            CHECK(count == *oracle.model_count);
        }
    }

    TEST_CASE("coverage experiment on a small class") {
        SamplerConfig cfg;
        cfg.seed = 10;
        CoverageReport rep = coverage_experiment(10, 3, 100, cfg);
        CHECK(rep.model_count == 7);
        CHECK(rep.runs == 100);
        CHECK(rep.all_full);
        CHECK(rep.min_accuracy == 1.0);
        CHECK(rep.samples_to_full.size() == 100);
        REQUIRE_FALSE(rep.samples.empty());
        CHECK(rep.coverage_mean.size() == rep.samples.size());
        CHECK(rep.coverage_std.size() == rep.samples.size());
        CHECK(rep.coverage_mean.back() == 1.0);
        CHECK(rep.ratio > 0);
        CHECK(rep.ratio < 1);
        for (std::size_t k = 1; k < rep.coverage_mean.size(); ++k)
            CHECK(rep.coverage_mean[k] >= rep.coverage_mean[k - 1]);
    }

    TEST_CASE("size guard") {
        SamplerConfig cfg;
        CHECK_THROWS_AS(coverage_experiment(20, 11, 1, cfg), GuardError);
    }
}
