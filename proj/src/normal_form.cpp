#include "lbm/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lbm/error.hpp"

namespace lbm {

namespace {

void sort_unique(std::vector<VarIndex>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool intersects(const std::vector<VarIndex>& a, const std::vector<VarIndex>& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i == *j) return true;
        if (*i < *j) ++i;
        else ++j;
    }
    return false;
}

std::vector<VarIndex> merged(const std::vector<VarIndex>& a, const std::vector<VarIndex>& b) {
    std::vector<VarIndex> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace

ConjClause::ConjClause(std::vector<VarIndex> pos, std::vector<VarIndex> neg)
    : pos_(std::move(pos)), neg_(std::move(neg)) {
    sort_unique(pos_);
    sort_unique(neg_);
    if (intersects(pos_, neg_)) throw CompileError("contradictory conjunctive clause (x & !x)");
}

VarIndex ConjClause::max_var() const noexcept {
    VarIndex m = 0;
    if (!pos_.empty()) m = std::max(m, pos_.back());
    if (!neg_.empty()) m = std::max(m, neg_.back());
    return m;
}

bool ConjClause::is_true(std::span<const std::uint8_t> x) const {
    for (auto t : pos_)
        if (!x[t]) return false;
    for (auto k : neg_)
        if (x[k]) return false;
    return true;
}

bool ConjClause::compatible(const ConjClause& other) const {
    return !intersects(pos_, other.neg_) && !intersects(neg_, other.pos_);
}

std::optional<ConjClause> ConjClause::conjoin(const ConjClause& other) const {
    if (!compatible(other)) return std::nullopt;
    ConjClause out;
    out.pos_ = merged(pos_, other.pos_);
    out.neg_ = merged(neg_, other.neg_);
    return out;
}

bool ConjClause::literals_subset_of(const ConjClause& other) const {
    return std::includes(other.pos_.begin(), other.pos_.end(), pos_.begin(), pos_.end()) &&
           std::includes(other.neg_.begin(), other.neg_.end(), neg_.begin(), neg_.end());
}

bool Sdnf::is_true(std::span<const std::uint8_t> x) const {
    return std::any_of(clauses.begin(), clauses.end(), [&](const ConjClause& c) { return c.is_true(x); });
}

double Sdnf::satisfied_weight(std::span<const std::uint8_t> x) const {
    double s = 0;
    for (std::size_t j = 0; j < clauses.size(); ++j)
        if (clauses[j].is_true(x)) s += weight(j);
    return s;
}

Clause::Clause(std::vector<VarIndex> pos, std::vector<VarIndex> neg) : pos_(std::move(pos)), neg_(std::move(neg)) {
    sort_unique(pos_);
    sort_unique(neg_);
    if (intersects(pos_, neg_)) throw CompileError("tautological clause (x | !x)");
}

bool Clause::is_true(std::span<const std::uint8_t> x) const {
    for (auto k : pos_)
        if (x[k]) return true;
    for (auto t : neg_)
        if (!x[t]) return true;
    return false;
}

double Cnf::total_weight() const {
    double s = 0;
    for (std::size_t m = 0; m < clauses.size(); ++m) s += weight(m);
    return s;
}

bool Cnf::is_true(std::span<const std::uint8_t> x) const {
    return std::all_of(clauses.begin(), clauses.end(), [&](const Clause& c) { return c.is_true(x); });
}

double Cnf::satisfied_weight(std::span<const std::uint8_t> x) const {
    double s = 0;
    for (std::size_t m = 0; m < clauses.size(); ++m)
        if (clauses[m].is_true(x)) s += weight(m);
    return s;
}

void Cnf::validate() const {
    if (!weights.empty() && weights.size() != clauses.size())
        throw CompileError("CNF weight count does not match clause count");
    for (double w : weights)
        if (!(w > 0) || !std::isfinite(w)) throw CompileError("CNF clause weights must be positive");
    for (const auto& c : clauses) {
        for (auto v : c.pos())
            if (v >= n_vars) throw CompileError("literal index out of range");
        for (auto v : c.neg())
            if (v >= n_vars) throw CompileError("literal index out of range");
    }
}

Sdnf clause_to_sdnf(const Clause& c, std::size_t n_vars) {
    if (c.empty()) throw CompileError("unsatisfiable clause");
    Sdnf out;
    out.n_vars = n_vars;
    // Literals already eliminated, negated: a negated-in-clause x_t becomes x_t,
    // a positive x_k becomes !x_k.
    std::vector<VarIndex> done_pos;
    std::vector<VarIndex> done_neg;
    for (auto t : c.neg()) {
        auto neg = done_neg;
        neg.push_back(t);
        out.clauses.emplace_back(done_pos, std::move(neg));
        done_pos.push_back(t);
    }
    for (auto k : c.pos()) {
        auto pos = done_pos;
        pos.push_back(k);
        out.clauses.emplace_back(std::move(pos), done_neg);
        done_neg.push_back(k);
    }
    return out;
}

std::vector<Sdnf> cnf_to_sdnf_list(const Cnf& cnf) {
    std::vector<Sdnf> out;
    out.reserve(cnf.clauses.size());
    for (std::size_t m = 0; m < cnf.clauses.size(); ++m) {
        auto s = clause_to_sdnf(cnf.clauses[m], cnf.n_vars);
        if (!cnf.weights.empty()) s.weights.assign(s.clauses.size(), cnf.weights[m]);
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

struct TooLarge {};

using Terms = std::vector<ConjClause>;

class SdnfBuilder {
public:
    explicit SdnfBuilder(std::size_t cap) : cap_(cap) {}

    Terms build(const Expr& e, bool negated) {
        switch (e.kind) {
            case ExprKind::Var:
                return negated ? Terms{ConjClause({}, {e.var})} : Terms{ConjClause({e.var}, {})};
            case ExprKind::Not: return build(e.children[0], !negated);
            case ExprKind::And:
                return negated ? disjoint_or(e.children, /*negate_items=*/true) : product_all(e.children, false);
            case ExprKind::Or:
                return negated ? product_all(e.children, true) : disjoint_or(e.children, false);
            case ExprKind::Implies: {
                const auto& a = e.children[0];
                const auto& b = e.children[1];
                if (negated) return product(build(a, false), build(b, true));
                // !a | (a & b)
                auto out = build(a, true);
                append(out, product(build(a, false), build(b, false)));
                return out;
            }
            case ExprKind::Iff: {
                const auto& a = e.children[0];
                const auto& b = e.children[1];
                auto out = product(build(a, false), build(b, negated));
                append(out, product(build(a, true), build(b, !negated)));
                return out;
            }
        }
        return {};
    }

private:
    void check(const Terms& t) const {
        if (t.size() > cap_) throw TooLarge{};
    }

    void append(Terms& out, Terms more) {
        out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
        check(out);
    }

    Terms product(const Terms& a, const Terms& b) {
        Terms out;
        for (const auto& x : a) {
            for (const auto& y : b) {
                if (auto z = x.conjoin(y)) out.push_back(std::move(*z));
            }
            check(out);
        }
        return out;
    }

    Terms product_all(const std::vector<Expr>& items, bool negate_items) {
        Terms acc = build(items[0], negate_items);
        for (std::size_t i = 1; i < items.size() && !acc.empty(); ++i) acc = product(acc, build(items[i], negate_items));
        return acc;
    }

    // c1 | c2 | ... as c1 | (!c1 & c2) | (!c1 & !c2 & c3) | ...
    Terms disjoint_or(const std::vector<Expr>& items, bool negate_items) {
        Terms out = build(items[0], negate_items);
        Terms none_yet = build(items[0], !negate_items);
        for (std::size_t i = 1; i < items.size() && !none_yet.empty(); ++i) {
            append(out, product(none_yet, build(items[i], negate_items)));
            if (i + 1 < items.size()) none_yet = product(none_yet, build(items[i], !negate_items));
        }
        return out;
    }

    std::size_t cap_;
};

}  // namespace

Sdnf full_dnf(const Expr& e, std::size_t n_vars, std::size_t max_vars) {
    if (n_vars > max_vars)
        throw GuardError("truth-table conversion limited to " + std::to_string(max_vars) + " variables");
    Sdnf out;
    out.n_vars = n_vars;
    Bits x(n_vars, 0);
    const std::uint64_t count = std::uint64_t{1} << n_vars;
    for (std::uint64_t code = 0; code < count; ++code) {
        for (std::size_t i = 0; i < n_vars; ++i) x[i] = static_cast<std::uint8_t>((code >> i) & 1U);
        if (!e.eval(x)) continue;
        std::vector<VarIndex> pos;
        std::vector<VarIndex> neg;
        for (std::size_t i = 0; i < n_vars; ++i) (x[i] ? pos : neg).push_back(static_cast<VarIndex>(i));
        out.clauses.emplace_back(std::move(pos), std::move(neg));
    }
    return out;
}

Sdnf expr_to_sdnf(const Expr& e, std::size_t n_vars, const SdnfOptions& opts) {
    if (n_vars > opts.max_vars)
        throw GuardError("formula has " + std::to_string(n_vars) + " variables; SDNF conversion is limited to " +
                         std::to_string(opts.max_vars));
    try {
        Sdnf out;
        out.n_vars = n_vars;
        out.clauses = SdnfBuilder(opts.max_conjuncts).build(e, false);
        return out;
    } catch (const TooLarge&) {
        return full_dnf(e, n_vars, opts.max_vars);
    }
}

Sdnf wff_to_sdnf(const Wff& wff, const SdnfOptions& opts) { return expr_to_sdnf(wff.root, wff.n_vars(), opts); }

bool is_strict(const Sdnf& s) {
    for (std::size_t i = 0; i < s.clauses.size(); ++i)
        for (std::size_t j = i + 1; j < s.clauses.size(); ++j)
            if (s.clauses[i].compatible(s.clauses[j])) return false;
    return true;
}

Assignment Assignment::total(Bits values) {
    Assignment a(values.size());
    a.values = std::move(values);
    return a;
}

void Assignment::clamp(VarIndex i, std::uint8_t v) {
    values.at(i) = v ? 1 : 0;
    clamped.at(i) = true;
}

std::vector<VarIndex> Assignment::free_indices() const {
    std::vector<VarIndex> out;
    for (std::size_t i = 0; i < clamped.size(); ++i)
        if (!clamped[i]) out.push_back(static_cast<VarIndex>(i));
    return out;
}

std::vector<VarIndex> Assignment::clamped_indices() const {
    std::vector<VarIndex> out;
    for (std::size_t i = 0; i < clamped.size(); ++i)
        if (clamped[i]) out.push_back(static_cast<VarIndex>(i));
    return out;
}

}  // namespace lbm
