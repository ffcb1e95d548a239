#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lbm/normal_form.hpp"
#include "lbm/rbm.hpp"

namespace lbm {

/// Continuous stand-in for a Boolean assignment: x_i = sigmoid(theta_i).
struct RelaxedPoint {
    std::vector<double> theta;

    std::vector<double> x() const;
};

struct AnnealConfig {
    double initial_temp = 5.0;
    double final_temp = 1e-3;
    double cooling = 0.97;  ///< geometric factor per temperature level
    std::size_t steps_per_temp = 50;
    std::size_t restarts = 8;  ///< restarts per round, run concurrently
    /// sat_solve / maxsat_solve repeat rounds of restarts this many times;
    /// 0 keeps going until the time budget runs out (or a model is found).
    std::size_t rounds = 1;
    bool local_polish = true;
    std::size_t polish_iterations = 200;
    std::uint64_t seed = 0;
    /// Wall-clock limit for the whole search, in seconds. Zero returns the initial point.
    double time_budget = 10.0;
    /// Objective evaluations per restart (0 = until the schedule ends).
    std::size_t max_evaluations = 0;
    /// End a restart after this many steps without a new best objective (0 = never).
    std::size_t stall_steps = 0;
    double c = 5.0;
    double eps = 0.5;
    double bound = 10.0;  ///< theta is confined to [-bound, bound]
    /// maxsat_solve confirms optimality by brute force when n_vars is at most this.
    std::size_t prove_max_vars = 22;
    bool prove_optimum = false;

    /// Throws std::invalid_argument unless temperatures, counts and bound are positive and cooling < 1.
    void validate() const;
};

/// F(sigmoid(theta)) at confidence c. When `grad` is non-empty it receives dF/dtheta.
double objective(const Rbm& rbm, std::span<const double> theta, double c, std::span<double> grad = {});

/// Simulated annealing over theta (single-coordinate Gaussian proposals with
/// scale proportional to the temperature, Metropolis acceptance, geometric
/// cooling) followed by backtracking gradient descent from the best point.
/// Restarts run concurrently; the lowest objective wins (lowest restart index on ties).
RelaxedPoint anneal(const Rbm& rbm, const AnnealConfig& cfg);

/// x_i = 1 iff theta_i >= 0.
Bits round(const RelaxedPoint& point);

enum class SatStatus { sat, unknown };

struct SatResult {
    SatStatus status = SatStatus::unknown;
    Bits assignment;  ///< verified model when status == sat
    std::size_t evaluations = 0;
    double seconds = 0;
};

/// Compile, anneal, round, verify. Never claims unsatisfiability: an exhausted
/// budget yields `unknown`.
SatResult sat_solve(const Cnf& cnf, const AnnealConfig& cfg);

struct TrajectoryPoint {
    std::size_t evaluations = 0;
    double best_satisfied = 0;
};

struct MaxSatResult {
    Bits best_assignment;
    double satisfied = 0;  ///< (weighted) satisfied clauses, counted symbolically
    double total = 0;
    bool optimum_proved = false;
    std::vector<TrajectoryPoint> trajectory;
    std::size_t evaluations = 0;
    double seconds = 0;
};

/// Anneals with restarts and scores every rounded candidate against the CNF.
MaxSatResult maxsat_solve(const Cnf& cnf, const AnnealConfig& cfg);

struct BruteForceResult {
    Bits best_assignment;  ///< lowest-code assignment attaining the optimum
    double best = 0;
};

/// Exhaustive optimum. Throws GuardError above max_vars.
BruteForceResult brute_force_maxsat(const Cnf& cnf, std::size_t max_vars = 22);

struct LandscapePoint {
    double theta1 = 0;
    double theta2 = 0;
    double energy = 0;       ///< min_h E at the relaxed point
    double free_energy = 0;  ///< F at confidence c
};

/// Grid over [-bound, bound]^2 with `steps` points per axis, for two-variable networks.
std::vector<LandscapePoint> landscape(const Rbm& rbm, double c, double bound = 10.0, std::size_t steps = 41);

}  // namespace lbm
