#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lbm/logic.hpp"

namespace lbm {

/// Conjunction of literals: every variable in `pos` true, every variable in `neg` false.
/// Both index lists are kept sorted and duplicate free; they never intersect.
class ConjClause {
public:
    ConjClause() = default;
    /// Throws CompileError if some variable occurs both positively and negatively.
    ConjClause(std::vector<VarIndex> pos, std::vector<VarIndex> neg);

    const std::vector<VarIndex>& pos() const noexcept { return pos_; }
    const std::vector<VarIndex>& neg() const noexcept { return neg_; }
    std::size_t size() const noexcept { return pos_.size() + neg_.size(); }
    VarIndex max_var() const noexcept;

    bool is_true(std::span<const std::uint8_t> x) const;
    /// True when both clauses can hold under one assignment.
    bool compatible(const ConjClause& other) const;
    /// Conjunction of both, or nullopt when it is contradictory.
    std::optional<ConjClause> conjoin(const ConjClause& other) const;
    /// Every literal of `*this` also occurs in `other` (so `other` implies `*this`).
    bool literals_subset_of(const ConjClause& other) const;

    auto operator<=>(const ConjClause&) const = default;

private:
    std::vector<VarIndex> pos_;
    std::vector<VarIndex> neg_;
};

/// Disjunction of conjunctive clauses with at most one clause true under any
/// total assignment. Optional positive weights, one per clause (empty = all 1).
struct Sdnf {
    std::vector<ConjClause> clauses;
    std::size_t n_vars = 0;
    std::vector<double> weights;

    double weight(std::size_t j) const { return weights.empty() ? 1.0 : weights[j]; }
    bool is_true(std::span<const std::uint8_t> x) const;
    /// Weighted sum of the clauses true at x.
    double satisfied_weight(std::span<const std::uint8_t> x) const;
};

/// Disjunctive clause: some variable in `pos` true or some variable in `neg` false.
class Clause {
public:
    Clause() = default;
    /// Throws CompileError if a variable occurs with both signs.
    Clause(std::vector<VarIndex> pos, std::vector<VarIndex> neg);

    const std::vector<VarIndex>& pos() const noexcept { return pos_; }
    const std::vector<VarIndex>& neg() const noexcept { return neg_; }
    std::size_t size() const noexcept { return pos_.size() + neg_.size(); }
    bool empty() const noexcept { return size() == 0; }

    bool is_true(std::span<const std::uint8_t> x) const;

    bool operator==(const Clause&) const = default;

private:
    std::vector<VarIndex> pos_;
    std::vector<VarIndex> neg_;
};

struct Cnf {
    std::vector<Clause> clauses;
    std::size_t n_vars = 0;
    std::vector<double> weights;

    double weight(std::size_t m) const { return weights.empty() ? 1.0 : weights[m]; }
    double total_weight() const;
    bool is_true(std::span<const std::uint8_t> x) const;
    /// (Weighted) number of clauses satisfied by x.
    double satisfied_weight(std::span<const std::uint8_t> x) const;
    /// Throws CompileError on out-of-range literals or bad weights.
    void validate() const;

    bool operator==(const Cnf&) const = default;
};

/// Variable-elimination expansion of a clause into a strict DNF. Literals are
/// ordered negated-first then positive, each group by ascending index; the
/// p-th conjunct is the negation of the literals before p conjoined with
/// literal p. Throws CompileError("unsatisfiable clause") on an empty clause.
Sdnf clause_to_sdnf(const Clause& c, std::size_t n_vars);

/// One SDNF per clause; the conjunction of the results is equivalent to the CNF.
std::vector<Sdnf> cnf_to_sdnf_list(const Cnf& cnf);

struct SdnfOptions {
    std::size_t max_vars = 24;
    /// Above this many conjuncts in any intermediate result the construction
    /// restarts from the truth table (full DNF over all variables).
    std::size_t max_conjuncts = std::size_t{1} << 16;
};

/// Strict DNF logically equivalent to the formula. Built compositionally:
///   a | b      -> sdnf(a) plus sdnf(!a & b)
///   a & b      -> pairwise products (contradictions dropped)
///   a -> b     -> as !a | b
///   a <-> b    -> sdnf(a & b) plus sdnf(!a & !b)
/// with negations pushed inward. Each step preserves strictness, so the
/// result is strict by construction; `is_strict` re-checks it.
/// Throws GuardError when the formula has more than max_vars variables.
Sdnf wff_to_sdnf(const Wff& wff, const SdnfOptions& opts = {});
Sdnf expr_to_sdnf(const Expr& e, std::size_t n_vars, const SdnfOptions& opts = {});

/// Canonical DNF with one full-width conjunct per model, from the truth table.
Sdnf full_dnf(const Expr& e, std::size_t n_vars, std::size_t max_vars = 24);

/// Pairwise test: no two conjuncts are simultaneously satisfiable.
bool is_strict(const Sdnf& s);

/// Total or partial assignment. Clamped variables are fixed during inference;
/// the remaining ones are free.
struct Assignment {
    Bits values;
    std::vector<bool> clamped;

    explicit Assignment(std::size_t n = 0) : values(n, 0), clamped(n, false) {}
    static Assignment total(Bits values);

    std::size_t size() const noexcept { return values.size(); }
    void clamp(VarIndex i, std::uint8_t v);
    std::vector<VarIndex> free_indices() const;
    std::vector<VarIndex> clamped_indices() const;
};

}  // namespace lbm
