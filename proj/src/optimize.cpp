#include "lbm/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "lbm/error.hpp"
#include "lbm/kernels.hpp"
#include "lbm/random.hpp"

namespace lbm {

std::vector<double> RelaxedPoint::x() const {
    std::vector<double> out(theta.size());
    std::transform(theta.begin(), theta.end(), out.begin(), sigmoid);
    return out;
}

void AnnealConfig::validate() const {
    if (!(initial_temp > 0)) throw std::invalid_argument("initial_temp must be positive");
    if (!(final_temp > 0)) throw std::invalid_argument("final_temp must be positive");
    if (!(cooling > 0 && cooling < 1)) throw std::invalid_argument("cooling must lie in (0,1)");
    if (steps_per_temp == 0) throw std::invalid_argument("steps_per_temp must be positive");
    if (restarts == 0) throw std::invalid_argument("restarts must be positive");
    if (!(time_budget >= 0)) throw std::invalid_argument("time_budget must be non-negative");
    if (!(c > 0)) throw std::invalid_argument("confidence c must be positive");
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("eps must lie in (0,1)");
    if (!(bound > 0)) throw std::invalid_argument("bound must be positive");
}

double objective(const Rbm& rbm, std::span<const double> theta, double c, std::span<double> grad) {
    if (theta.size() != rbm.n_visible) throw std::invalid_argument("theta size does not match the RBM");
    if (!grad.empty() && grad.size() != theta.size()) throw std::invalid_argument("gradient size does not match theta");
    std::vector<double> x(theta.size());
    std::transform(theta.begin(), theta.end(), x.begin(), sigmoid);
    std::vector<double> pre(rbm.n_hidden);
    hidden_preactivations(rbm, x, pre);

    double f = rbm.e0;
    for (std::size_t i = 0; i < x.size(); ++i) f -= rbm.a[i] * x[i];
    for (double p : pre) f -= softplus(c * p);

    if (!grad.empty()) {
        // dF/dx_i = -a_i - c sum_j sigmoid(c pre_j) w_ij ;  dx/dtheta = x (1 - x)
        std::vector<double> s(pre.size());
        std::transform(pre.begin(), pre.end(), s.begin(), [c](double p) { return sigmoid(c * p); });
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double* row = rbm.W.data() + i * rbm.n_hidden;
            double dx = -rbm.a[i];
            for (std::size_t j = 0; j < rbm.n_hidden; ++j) dx -= c * s[j] * row[j];
            grad[i] = dx * x[i] * (1.0 - x[i]);
        }
    }
    return f;
}

Bits round(const RelaxedPoint& point) {
    Bits out(point.theta.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = point.theta[i] >= 0 ? 1 : 0;
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Budget {
    Clock::time_point deadline;
    std::size_t max_evaluations;

    bool expired(std::size_t evals) const {
        if (max_evaluations && evals >= max_evaluations) return true;
        // the clock is only consulted every 64 evaluations
        return (evals & 63U) == 0 && Clock::now() >= deadline;
    }
};

Budget make_budget(const AnnealConfig& cfg, Clock::time_point start) {
    const auto span = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.time_budget));
    return {start + span, cfg.max_evaluations};
}

// Free energy of sigmoid(theta) kept in sync with single-coordinate moves.
class RelaxedState {
public:
    RelaxedState(const Rbm& rbm, double c, std::vector<double> theta) : rbm_(rbm), c_(c), theta_(std::move(theta)) {
        refresh();
    }

    void refresh() {
        x_.resize(theta_.size());
        std::transform(theta_.begin(), theta_.end(), x_.begin(), sigmoid);
        pre_.assign(rbm_.n_hidden, 0.0);
        hidden_preactivations(rbm_, x_, pre_);
        value_ = evaluate(pre_, x_);
    }

    // Objective after setting theta_i = t, leaving the state untouched.
    double propose(std::size_t i, double t) {
        const double dx = sigmoid(t) - x_[i];
        const double* row = rbm_.W.data() + i * rbm_.n_hidden;
        cand_pre_.resize(pre_.size());
        for (std::size_t j = 0; j < pre_.size(); ++j) cand_pre_[j] = pre_[j] + row[j] * dx;
        double f = rbm_.e0 - linear_ - rbm_.a[i] * dx;
        for (double p : cand_pre_) f -= softplus(c_ * p);
        return f;
    }

    // Commits the last proposal.
    void accept(std::size_t i, double t, double f) {
        const double xi = sigmoid(t);
        linear_ += rbm_.a[i] * (xi - x_[i]);
        theta_[i] = t;
        x_[i] = xi;
        pre_.swap(cand_pre_);
        value_ = f;
    }

    double value() const { return value_; }
    const std::vector<double>& theta() const { return theta_; }

private:
    double evaluate(const std::vector<double>& pre, const std::vector<double>& x) {
        linear_ = 0;
        for (std::size_t i = 0; i < x.size(); ++i) linear_ += rbm_.a[i] * x[i];
        double f = rbm_.e0 - linear_;
        for (double p : pre) f -= softplus(c_ * p);
        return f;
    }

    const Rbm& rbm_;
    double c_;
    std::vector<double> theta_;
    std::vector<double> x_;
    std::vector<double> pre_;
    std::vector<double> cand_pre_;
    double linear_ = 0;
    double value_ = 0;
};

struct RestartOutcome {
    std::vector<double> theta;
    double value = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
};

std::vector<double> initial_theta(std::size_t n, Rng& rng) {
    std::vector<double> theta(n);
    for (auto& t : theta) t = 2.0 * uniform01(rng) - 1.0;
    return theta;
}

// One annealing restart. `visit(bits, evaluations)` sees every rounded
// assignment the search moves through and returns true to stop the restart.
template <class Visit>
RestartOutcome anneal_restart(const Rbm& rbm, const AnnealConfig& cfg, std::size_t restart, const Budget& budget,
                              Visit&& visit) {
    Rng rng = make_rng(cfg.seed, restart);
    const std::size_t n = rbm.n_visible;
    RelaxedState state(rbm, cfg.c, initial_theta(n, rng));
    RestartOutcome out{state.theta(), state.value(), 1};
    if (cfg.time_budget <= 0) return out;

    Bits bits = round(RelaxedPoint{state.theta()});
    if (visit(bits, out.evaluations) || n == 0) return out;

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::size_t since_best = 0;
    bool stop = false;
    for (double temp = cfg.initial_temp; temp > cfg.final_temp && !stop; temp *= cfg.cooling) {
        const double scale = std::max(cfg.bound * temp / cfg.initial_temp, 1e-2);
        for (std::size_t s = 0; s < cfg.steps_per_temp; ++s) {
            if (budget.expired(out.evaluations)) return out;
            const std::size_t i = static_cast<std::size_t>(rng() % n);
            const double t = std::clamp(state.theta()[i] + scale * gauss(rng), -cfg.bound, cfg.bound);
            const double f = state.propose(i, t);
            ++out.evaluations;
            const double delta = f - state.value();
            if (delta <= 0 || uniform01(rng) < std::exp(-delta / temp)) {
                const bool flips = (t >= 0) != (state.theta()[i] >= 0);
                state.accept(i, t, f);
                if (flips) {
                    bits[i] ^= 1U;
                    if (visit(bits, out.evaluations)) return out;
                }
            }
            if (state.value() < out.value) {
                out.value = state.value();
                out.theta = state.theta();
                since_best = 0;
            } else if (cfg.stall_steps && ++since_best >= cfg.stall_steps) {
                stop = true;
                break;
            }
        }
        state.refresh();  // drop accumulated rounding from incremental updates
    }
    if (!cfg.local_polish || budget.expired(out.evaluations)) return out;

    // Projected gradient descent with Armijo backtracking from the best point.
    std::vector<double> theta = out.theta;
    std::vector<double> grad(n), trial(n), trial_grad(n);
    double f = objective(rbm, theta, cfg.c, grad);
    ++out.evaluations;
    double step = 1.0;
    for (std::size_t it = 0; it < cfg.polish_iterations; ++it) {
        bool moved = false;
        while (step > 1e-12) {
            if (budget.expired(out.evaluations)) return out;
            double decrease = 0;
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = std::clamp(theta[i] - step * grad[i], -cfg.bound, cfg.bound);
                decrease += grad[i] * (theta[i] - trial[i]);
            }
            if (decrease <= 0) break;
            const double ft = objective(rbm, trial, cfg.c, trial_grad);
            ++out.evaluations;
            if (ft <= f - 1e-4 * decrease) {
                theta.swap(trial);
                grad.swap(trial_grad);
                f = ft;
                step = std::min(step * 2.0, 1e3);
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
        if (f < out.value) {
            out.value = f;
            out.theta = theta;
        }
        if (visit(round(RelaxedPoint{theta}), out.evaluations)) break;
    }
    return out;
}

std::size_t lowest_value(const std::vector<RestartOutcome>& outs) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < outs.size(); ++r)
        if (outs[r].value < outs[best].value) best = r;
    return best;
}

// Clauses without literals can never hold and have no network encoding.
Cnf without_empty_clauses(const Cnf& cnf) {
    Cnf out;
    out.n_vars = cnf.n_vars;
    for (std::size_t m = 0; m < cnf.clauses.size(); ++m) {
        if (cnf.clauses[m].empty()) continue;
        out.clauses.push_back(cnf.clauses[m]);
        if (!cnf.weights.empty()) out.weights.push_back(cnf.weights[m]);
    }
    return out;
}

Rbm compile_for(const Cnf& cnf, const AnnealConfig& cfg) {
    CompileOptions co;
    co.eps = cfg.eps;
    return compile_cnf(without_empty_clauses(cnf), co);
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

RelaxedPoint anneal(const Rbm& rbm, const AnnealConfig& cfg) {
    cfg.validate();
    const Budget budget = make_budget(cfg, Clock::now());
    std::vector<RestartOutcome> outs(cfg.time_budget <= 0 ? 1 : cfg.restarts);
    const auto n = static_cast<std::int64_t>(outs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 0; r < n; ++r)
        outs[static_cast<std::size_t>(r)] =
            anneal_restart(rbm, cfg, static_cast<std::size_t>(r), budget, [](const Bits&, std::size_t) { return false; });
    return RelaxedPoint{std::move(outs[lowest_value(outs)].theta)};
}

SatResult sat_solve(const Cnf& cnf, const AnnealConfig& cfg) {
    cfg.validate();
    const auto start = Clock::now();
    SatResult res;
    if (cnf.clauses.empty()) {
        res.status = SatStatus::sat;
        res.assignment.assign(cnf.n_vars, 0);
        return res;
    }
    const bool has_empty = std::any_of(cnf.clauses.begin(), cnf.clauses.end(), [](const Clause& c) { return c.empty(); });
    if (has_empty || cfg.time_budget <= 0) {
        res.seconds = seconds_since(start);
        return res;
    }
    const Rbm rbm = compile_for(cnf, cfg);
    const Budget budget = make_budget(cfg, start);

    std::vector<std::optional<Bits>> found(cfg.restarts);
    std::vector<std::size_t> evals(cfg.restarts, 0);
    const auto n = static_cast<std::int64_t>(cfg.restarts);
    for (std::size_t pass = 0; cfg.rounds == 0 || pass < cfg.rounds; ++pass) {
        if (pass > 0 && Clock::now() >= budget.deadline) break;
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t r = 0; r < n; ++r) {
            const auto idx = static_cast<std::size_t>(r);
            found[idx].reset();
            evals[idx] = anneal_restart(rbm, cfg, pass * cfg.restarts + idx, budget, [&](const Bits& x, std::size_t) {
                             if (!cnf.is_true(x)) return false;
                             found[idx] = x;
                             return true;
                         }).evaluations;
        }
        res.evaluations += std::accumulate(evals.begin(), evals.end(), std::size_t{0});
        const auto hit = std::find_if(found.begin(), found.end(), [&](const auto& f) { return f && cnf.is_true(*f); });
        if (hit != found.end()) {
            res.status = SatStatus::sat;
            res.assignment = std::move(**hit);
            break;
        }
    }
    res.seconds = seconds_since(start);
    return res;
}

MaxSatResult maxsat_solve(const Cnf& cnf, const AnnealConfig& cfg) {
    cfg.validate();
    const auto start = Clock::now();
    MaxSatResult res;
    res.total = cnf.total_weight();
    const Rbm rbm = compile_for(cnf, cfg);
    const Budget budget = make_budget(cfg, start);

    struct Local {
        Bits best;
        double satisfied = -1;
        std::vector<TrajectoryPoint> trajectory;
        std::size_t evaluations = 0;
    };
    const std::size_t width = cfg.time_budget <= 0 ? 1 : cfg.restarts;
    std::vector<Local> locals;
    std::size_t offset = 0;
    double best = -1;
    for (std::size_t pass = 0; cfg.rounds == 0 || pass < cfg.rounds; ++pass) {
        if (pass > 0 && (cfg.time_budget <= 0 || Clock::now() >= budget.deadline || res.satisfied >= res.total)) break;
        locals.assign(width, Local{});
        const auto n = static_cast<std::int64_t>(width);
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t r = 0; r < n; ++r) {
            auto& loc = locals[static_cast<std::size_t>(r)];
            const std::size_t id = pass * width + static_cast<std::size_t>(r);
            auto visit = [&](const Bits& x, std::size_t e) {
                const double s = cnf.satisfied_weight(x);
                if (s > loc.satisfied || (s == loc.satisfied && x < loc.best)) {
                    if (s > loc.satisfied) loc.trajectory.push_back({e, s});
                    loc.satisfied = s;
                    loc.best = x;
                }
                return s >= res.total;
            };
            loc.evaluations = anneal_restart(rbm, cfg, id, budget, visit).evaluations;
            // The initial point is scored even when the budget stops the restart before any move.
            if (loc.satisfied < 0) {
                Rng rng = make_rng(cfg.seed, id);
                visit(round(RelaxedPoint{initial_theta(cnf.n_vars, rng)}), 1);
            }
        }

        // Restarts are laid end to end in index order for the trajectory.
        for (auto& loc : locals) {
            for (const auto& p : loc.trajectory) {
                if (p.best_satisfied > best) {
                    best = p.best_satisfied;
                    res.trajectory.push_back({offset + p.evaluations, best});
                }
            }
            if (loc.satisfied > res.satisfied || res.best_assignment.empty() ||
                (loc.satisfied == res.satisfied && loc.best < res.best_assignment)) {
                res.satisfied = loc.satisfied;
                res.best_assignment = loc.best;
            }
            offset += loc.evaluations;
        }
    }
    res.evaluations = offset;
    if (res.trajectory.empty() || res.trajectory.back().evaluations != offset)
        res.trajectory.push_back({offset, std::max(best, 0.0)});

    if (cfg.prove_optimum && cnf.n_vars <= cfg.prove_max_vars) {
        const auto bf = brute_force_maxsat(cnf, cfg.prove_max_vars);
        res.optimum_proved = std::abs(bf.best - res.satisfied) <= 1e-9 * std::max(1.0, res.total);
    }
    res.seconds = seconds_since(start);
    return res;
}

BruteForceResult brute_force_maxsat(const Cnf& cnf, std::size_t max_vars) {
    if (cnf.n_vars > max_vars)
        throw GuardError(std::to_string(cnf.n_vars) + " variables; brute force is limited to " + std::to_string(max_vars));
    const Bits base(cnf.n_vars, 0);
    std::vector<VarIndex> free_vars(cnf.n_vars);
    std::iota(free_vars.begin(), free_vars.end(), VarIndex{0});
    kernels::Completions comp{base, free_vars};
    std::vector<double> sat(comp.count());
    kernels::satisfied_weights(cnf, comp, sat);
    const auto code = static_cast<std::uint64_t>(std::max_element(sat.begin(), sat.end()) - sat.begin());
    BruteForceResult out;
    out.best = sat[code];
    out.best_assignment.resize(cnf.n_vars);
    comp.decode(code, out.best_assignment);
    return out;
}

std::vector<LandscapePoint> landscape(const Rbm& rbm, double c, double bound, std::size_t steps) {
    if (rbm.n_visible != 2) throw std::invalid_argument("landscape needs exactly two visible units");
    if (steps < 2) throw std::invalid_argument("landscape needs at least two grid points per axis");
    std::vector<LandscapePoint> out;
    out.reserve(steps * steps);
    const double h = 2.0 * bound / static_cast<double>(steps - 1);
    for (std::size_t p = 0; p < steps; ++p) {
        for (std::size_t q = 0; q < steps; ++q) {
            LandscapePoint pt;
            pt.theta1 = -bound + h * static_cast<double>(p);
            pt.theta2 = -bound + h * static_cast<double>(q);
            const std::vector<double> x{sigmoid(pt.theta1), sigmoid(pt.theta2)};
            pt.energy = min_energy_over_h(rbm, x);
            pt.free_energy = free_energy(rbm, x, c);
            out.push_back(pt);
        }
    }
    return out;
}

}  // namespace lbm
