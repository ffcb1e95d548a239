#include "lbm/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lbm/error.hpp"

namespace lbm {

Rbm::Rbm(std::size_t visible, std::size_t hidden)
    : n_visible(visible),
      n_hidden(hidden),
      W(visible * hidden, 0.0),
      a(visible, 0.0),
      b(hidden, 0.0),
      provenance(hidden) {}

void Rbm::resize_hidden(std::size_t hidden) {
    std::vector<double> grown(n_visible * hidden, 0.0);
    const auto keep = std::min(hidden, n_hidden);
    for (std::size_t i = 0; i < n_visible; ++i)
        for (std::size_t j = 0; j < keep; ++j) grown[i * hidden + j] = W[i * n_hidden + j];
    W = std::move(grown);
    b.resize(hidden, 0.0);
    provenance.resize(hidden);
    n_hidden = hidden;
}

void Rbm::check_shape() const {
    if (W.size() != n_visible * n_hidden || a.size() != n_visible || b.size() != n_hidden ||
        provenance.size() != n_hidden)
        throw std::invalid_argument("RBM parameter arrays do not match n_visible/n_hidden");
    if (vars.size() != 0 && vars.size() != n_visible)
        throw std::invalid_argument("RBM variable table does not match n_visible");
}

namespace {

void check_eps(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw CompileError("eps must lie strictly between 0 and 1");
}

void check_weight(double w) {
    if (!(w > 0.0) || !std::isfinite(w)) throw CompileError("clause weights must be positive and finite");
}

// Accumulates hidden units column by column, then lays W out once.
class NetworkBuilder {
public:
    NetworkBuilder(std::size_t n_visible, const CompileOptions& opts) : n_visible_(n_visible), opts_(opts) {
        check_eps(opts.eps);
        a_.assign(n_visible, 0.0);
    }

    void add(const ConjClause& c, double weight, std::size_t source) {
        check_weight(weight);
        if (c.size() > 0 && c.max_var() >= n_visible_)
            throw CompileError("conjunct refers to variable " + std::to_string(c.max_var()) + " beyond n_vars");
        const double eps = opts_.eps;
        if (opts_.fold_singletons && c.size() == 1) {
            if (!c.pos().empty()) {
                a_[c.pos().front()] += eps * weight;
            } else {
                a_[c.neg().front()] -= eps * weight;
                e0_ -= eps * weight;
            }
            return;
        }
        Unit u;
        u.bias = weight * (-static_cast<double>(c.pos().size()) + eps);
        for (auto t : c.pos()) u.column.emplace_back(t, weight);
        for (auto k : c.neg()) u.column.emplace_back(k, -weight);
        u.prov = HiddenProvenance{source, weight, eps, c};
        units_.push_back(std::move(u));
    }

    Rbm finish() && {
        Rbm rbm(n_visible_, units_.size());
        rbm.a = std::move(a_);
        rbm.e0 = e0_;
        rbm.eps = opts_.eps;
        rbm.tau = opts_.tau;
        for (std::size_t j = 0; j < units_.size(); ++j) {
            for (auto [i, w] : units_[j].column) rbm.w(i, j) = w;
            rbm.b[j] = units_[j].bias;
            rbm.provenance[j] = std::move(units_[j].prov);
        }
        return rbm;
    }

private:
    struct Unit {
        double bias = 0;
        std::vector<std::pair<VarIndex, double>> column;
        std::optional<HiddenProvenance> prov;
    };

    std::size_t n_visible_;
    CompileOptions opts_;
    std::vector<double> a_;
    double e0_ = 0.0;
    std::vector<Unit> units_;
};

}  // namespace

Rbm compile_sdnf(const Sdnf& sdnf, const CompileOptions& opts) {
    if (!sdnf.weights.empty() && sdnf.weights.size() != sdnf.clauses.size())
        throw CompileError("SDNF weight count does not match clause count");
    NetworkBuilder nb(sdnf.n_vars, opts);
    for (std::size_t j = 0; j < sdnf.clauses.size(); ++j) nb.add(sdnf.clauses[j], sdnf.weight(j), j);
    return std::move(nb).finish();
}

Rbm compile_cnf(const Cnf& cnf, const CompileOptions& opts) {
    cnf.validate();
    NetworkBuilder nb(cnf.n_vars, opts);
    for (std::size_t m = 0; m < cnf.clauses.size(); ++m) {
        auto sdnf = clause_to_sdnf(cnf.clauses[m], cnf.n_vars);
        for (const auto& c : sdnf.clauses) nb.add(c, cnf.weight(m), m);
    }
    return std::move(nb).finish();
}

std::vector<WeightedConj> merge_weighted_conjuncts(std::vector<WeightedConj> clauses, MergeMode mode) {
    for (const auto& wc : clauses) check_weight(wc.weight);
    // Shorter conjuncts first so a subsumed conjunct always finds its subsumer already kept.
    std::stable_sort(clauses.begin(), clauses.end(), [](const WeightedConj& l, const WeightedConj& r) {
        if (l.clause.size() != r.clause.size()) return l.clause.size() < r.clause.size();
        return l.clause < r.clause;
    });
    std::vector<WeightedConj> kept;
    for (auto& wc : clauses) {
        auto target = std::find_if(kept.begin(), kept.end(), [&](const WeightedConj& k) {
            if (k.clause == wc.clause) return true;
            return mode == MergeMode::subsumed && k.clause.literals_subset_of(wc.clause);
        });
        if (target != kept.end()) target->weight += wc.weight;
        else kept.push_back(std::move(wc));
    }
    std::sort(kept.begin(), kept.end(), [](const WeightedConj& l, const WeightedConj& r) { return l.clause < r.clause; });
    return kept;
}

Sdnf knowledge_base_conjuncts(const KnowledgeBase& kb, MergeMode mode) {
    std::vector<WeightedConj> all;
    for (const auto& f : kb.formulas) {
        auto sdnf = expr_to_sdnf(f.formula, kb.vars.size());
        for (auto& c : sdnf.clauses) all.push_back({f.weight, std::move(c)});
    }
    auto merged = merge_weighted_conjuncts(std::move(all), mode);
    Sdnf out;
    out.n_vars = kb.vars.size();
    for (auto& wc : merged) {
        out.clauses.push_back(std::move(wc.clause));
        out.weights.push_back(wc.weight);
    }
    return out;
}

Rbm compile_knowledge_base(const KnowledgeBase& kb, const CompileOptions& opts, MergeMode mode) {
    auto rbm = compile_sdnf(knowledge_base_conjuncts(kb, mode), opts);
    rbm.vars = kb.vars;
    return rbm;
}

namespace {

template <typename T>
void preactivations_impl(const Rbm& rbm, std::span<const T> x, std::span<double> out) {
    if (x.size() != rbm.n_visible || out.size() != rbm.n_hidden)
        throw std::invalid_argument("visible/hidden vector size does not match the RBM");
    std::copy(rbm.b.begin(), rbm.b.end(), out.begin());
    for (std::size_t i = 0; i < rbm.n_visible; ++i) {
        const double xi = static_cast<double>(x[i]);
        if (xi == 0.0) continue;
        const double* row = rbm.W.data() + i * rbm.n_hidden;
        for (std::size_t j = 0; j < rbm.n_hidden; ++j) out[j] += xi * row[j];
    }
}

template <typename T>
double visible_term(const Rbm& rbm, std::span<const T> x) {
    double s = 0;
    for (std::size_t i = 0; i < rbm.n_visible; ++i) s += rbm.a[i] * static_cast<double>(x[i]);
    return s;
}

template <typename T>
double min_energy_impl(const Rbm& rbm, std::span<const T> x) {
    std::vector<double> pre(rbm.n_hidden);
    preactivations_impl<T>(rbm, x, pre);
    double e = rbm.e0 - visible_term(rbm, x);
    for (double p : pre) e -= std::max(0.0, p);
    return e;
}

template <typename T>
double free_energy_impl(const Rbm& rbm, std::span<const T> x, double c) {
    std::vector<double> pre(rbm.n_hidden);
    preactivations_impl<T>(rbm, x, pre);
    double f = rbm.e0 - visible_term(rbm, x);
    for (double p : pre) f -= softplus(c * p);
    return f;
}

}  // namespace

double softplus(double z) noexcept { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) noexcept {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void hidden_preactivations(const Rbm& rbm, std::span<const double> x, std::span<double> out) {
    preactivations_impl<double>(rbm, x, out);
}

void hidden_preactivations(const Rbm& rbm, std::span<const std::uint8_t> x, std::span<double> out) {
    preactivations_impl<std::uint8_t>(rbm, x, out);
}

double energy(const Rbm& rbm, std::span<const std::uint8_t> x, std::span<const std::uint8_t> h) {
    if (x.size() != rbm.n_visible || h.size() != rbm.n_hidden)
        throw std::invalid_argument("state size does not match the RBM");
    double e = rbm.e0 - visible_term(rbm, x);
    for (std::size_t j = 0; j < rbm.n_hidden; ++j) {
        if (!h[j]) continue;
        double s = rbm.b[j];
        for (std::size_t i = 0; i < rbm.n_visible; ++i)
            if (x[i]) s += rbm.w(i, j);
        e -= s;
    }
    return e;
}

double min_energy_over_h(const Rbm& rbm, std::span<const std::uint8_t> x) { return min_energy_impl(rbm, x); }
double min_energy_over_h(const Rbm& rbm, std::span<const double> x) { return min_energy_impl(rbm, x); }

double free_energy(const Rbm& rbm, std::span<const std::uint8_t> x, double c) { return free_energy_impl(rbm, x, c); }
double free_energy(const Rbm& rbm, std::span<const double> x, double c) { return free_energy_impl(rbm, x, c); }

EnergyReport energy_report(const Rbm& rbm, std::span<const std::uint8_t> x, double c) {
    EnergyReport r;
    r.energy_min_h = min_energy_over_h(rbm, x);
    r.free_energy = free_energy(rbm, x, c);
    r.sat_count = -r.energy_min_h / rbm.eps;
    return r;
}

}  // namespace lbm
