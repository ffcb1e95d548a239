// Full-size coverage run for the formula class with M = 20, N = 10.
// Usage: long_coverage [runs] [max_samples]

#include <cstdio>
#include <cstdlib>

#include "lbm/reasoning.hpp"

int main(int argc, char** argv) {
    using namespace lbm;
    const std::size_t runs = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 4;
    SamplerConfig cfg;
    cfg.tau = 0.25;
    cfg.max_samples = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : std::size_t{1} << 26;
    cfg.record_every = 1 << 16;
    CoverageReport rep = coverage_experiment(20, 10, runs, cfg);
    std::size_t full = 0;
    for (const auto& s : rep.samples_to_full) full += s.has_value();
    std::printf("M=20 N=10 runs=%zu models=%zu full=%zu/%zu min_accuracy=%.4f ratio=%.5f time=%.1fs\n", rep.runs,
                rep.model_count, full, rep.runs, rep.min_accuracy, rep.ratio, rep.time_seconds);
    const bool ok = rep.all_full && rep.min_accuracy == 1.0;
    std::printf("%s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}
