#pragma once

// Seeded instance generators and brute-force oracles shared by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "lbm/logic.hpp"
#include "lbm/normal_form.hpp"
#include "lbm/random.hpp"

namespace lbm::testing {

inline std::size_t uniform_index(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

inline Expr random_expr(Rng& rng, std::size_t n_vars, int depth) {
    if (depth <= 0 || uniform01(rng) < 0.2) {
        Expr leaf = Expr::variable(static_cast<VarIndex>(uniform_index(rng, n_vars)));
        return uniform01(rng) < 0.3 ? Expr::negation(std::move(leaf)) : leaf;
    }
    switch (uniform_index(rng, 6)) {
        case 0: return Expr::negation(random_expr(rng, n_vars, depth - 1));
        case 1: return Expr::conjunction({random_expr(rng, n_vars, depth - 1), random_expr(rng, n_vars, depth - 1)});
        case 2:
        case 3: return Expr::disjunction({random_expr(rng, n_vars, depth - 1), random_expr(rng, n_vars, depth - 1)});
        case 4: return Expr::implication(random_expr(rng, n_vars, depth - 1), random_expr(rng, n_vars, depth - 1));
        default: return Expr::equivalence(random_expr(rng, n_vars, depth - 1), random_expr(rng, n_vars, depth - 1));
    }
}

/// Random formula over exactly n_vars variables (v1..vn), not all necessarily used.
inline Wff random_wff(Rng& rng, std::size_t n_vars, int depth) {
    Wff w;
    for (std::size_t i = 0; i < n_vars; ++i) w.vars.intern("v" + std::to_string(i + 1));
    w.root = random_expr(rng, n_vars, depth);
    return w;
}

inline Clause random_clause(Rng& rng, std::size_t n_vars, std::size_t width) {
    std::vector<VarIndex> vars(n_vars);
    std::iota(vars.begin(), vars.end(), VarIndex{0});
    std::shuffle(vars.begin(), vars.end(), rng);
    std::vector<VarIndex> pos, neg;
    for (std::size_t k = 0; k < width; ++k) (bernoulli(rng, 0.5) ? pos : neg).push_back(vars[k]);
    return Clause(std::move(pos), std::move(neg));
}

/// Clauses of width 1..max_width over distinct variables.
inline Cnf random_cnf(Rng& rng, std::size_t n_vars, std::size_t n_clauses, std::size_t max_width = 3) {
    Cnf cnf;
    cnf.n_vars = n_vars;
    for (std::size_t m = 0; m < n_clauses; ++m)
        cnf.clauses.push_back(random_clause(rng, n_vars, 1 + uniform_index(rng, std::min(max_width, n_vars))));
    return cnf;
}

struct Planted {
    Cnf cnf;
    Bits solution;
};

/// Random 3-CNF with every clause true under a hidden assignment.
inline Planted planted_3cnf(Rng& rng, std::size_t n_vars, std::size_t n_clauses) {
    Planted p;
    p.cnf.n_vars = n_vars;
    p.solution.resize(n_vars);
    for (auto& b : p.solution) b = bernoulli(rng, 0.5) ? 1 : 0;
    while (p.cnf.clauses.size() < n_clauses) {
        Clause c = random_clause(rng, n_vars, 3);
        if (c.is_true(p.solution)) p.cnf.clauses.push_back(std::move(c));
    }
    return p;
}

/// MaxCut on a random graph: each edge {u,v} gives (u | v) and (!u | !v),
/// both satisfied exactly when the edge is cut.
inline Cnf maxcut_cnf(Rng& rng, std::size_t n_vertices, std::size_t n_edges) {
    std::vector<std::pair<VarIndex, VarIndex>> edges;
    for (VarIndex u = 0; u < n_vertices; ++u)
        for (VarIndex v = u + 1; v < n_vertices; ++v) edges.emplace_back(u, v);
    std::shuffle(edges.begin(), edges.end(), rng);
    edges.resize(std::min(n_edges, edges.size()));
    Cnf cnf;
    cnf.n_vars = n_vertices;
    for (auto [u, v] : edges) {
        cnf.clauses.emplace_back(std::vector<VarIndex>{u, v}, std::vector<VarIndex>{});
        cnf.clauses.emplace_back(std::vector<VarIndex>{}, std::vector<VarIndex>{u, v});
    }
    return cnf;
}

/// Bit i of `code` is variable i.
inline Bits decode(std::uint64_t code, std::size_t n) {
    Bits x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((code >> i) & 1U);
    return x;
}

/// Satisfied-clause count straight from the literal lists.
inline double count_satisfied(const Cnf& cnf, const Bits& x) {
    double s = 0;
    for (std::size_t m = 0; m < cnf.clauses.size(); ++m) {
        const auto& c = cnf.clauses[m];
        bool sat = false;
        for (auto v : c.pos()) sat = sat || x[v] == 1;
        for (auto v : c.neg()) sat = sat || x[v] == 0;
        if (sat) s += cnf.weights.empty() ? 1.0 : cnf.weights[m];
    }
    return s;
}

inline double brute_force_optimum(const Cnf& cnf) {
    double best = 0;
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << cnf.n_vars); ++code)
        best = std::max(best, count_satisfied(cnf, decode(code, cnf.n_vars)));
    return best;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace lbm::testing
