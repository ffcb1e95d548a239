#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lbm {

using VarIndex = std::uint32_t;

/// Bit vector over the visible variables, one byte per variable (0 or 1).
using Bits = std::vector<std::uint8_t>;

/// Maps variable names to dense indices 0..n-1 in order of first appearance.
class VarTable {
public:
    VarTable() = default;
    explicit VarTable(std::vector<std::string> names);

    VarIndex intern(std::string_view name);
    std::optional<VarIndex> find(std::string_view name) const;
    const std::string& name(VarIndex i) const { return names_.at(i); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t size() const noexcept { return names_.size(); }

    bool operator==(const VarTable& other) const { return names_ == other.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, VarIndex> index_;
};

enum class ExprKind { Var, Not, And, Or, Implies, Iff };

/// Formula tree node. And/Or hold at least two children, Not one,
/// Implies/Iff exactly two (lhs, rhs).
struct Expr {
    ExprKind kind = ExprKind::Var;
    VarIndex var = 0;
    std::vector<Expr> children;

    static Expr variable(VarIndex v);
    static Expr negation(Expr child);
    static Expr conjunction(std::vector<Expr> children);
    static Expr disjunction(std::vector<Expr> children);
    static Expr implication(Expr lhs, Expr rhs);
    static Expr equivalence(Expr lhs, Expr rhs);

    bool eval(std::span<const std::uint8_t> x) const;

    bool operator==(const Expr&) const = default;
};

/// A parsed well-formed formula together with its variable table.
struct Wff {
    Expr root;
    VarTable vars;

    std::size_t n_vars() const noexcept { return vars.size(); }
    bool eval(std::span<const std::uint8_t> x) const { return root.eval(x); }
};

/// Grammar, lowest to highest precedence:
///   iff     := implies ('<->' implies)*
///   implies := or ('->' implies)?        (right associative)
///   or      := and ('|' and)*
///   and     := unary ('&' unary)*
///   unary   := '!' unary | atom | '(' iff ')'
/// Atoms match [A-Za-z_][A-Za-z0-9_]*. Unparenthesised chains of the same
/// binary operator are flattened into one n-ary node.
///
/// Variables are interned into `vars`, so several formulas can share one
/// variable space.
Expr parse_expr(std::string_view text, VarTable& vars);
Wff parse_wff(std::string_view text);

/// Renders with the same grammar; parse(render(e)) reproduces e exactly.
std::string to_string(const Expr& e, const VarTable& vars);
inline std::string to_string(const Wff& w) { return to_string(w.root, w.vars); }

/// Truth value s(x) in {0,1}.
inline std::uint8_t eval_wff(const Wff& w, std::span<const std::uint8_t> x) {
    return w.eval(x) ? 1 : 0;
}

/// One line of a knowledge base: `[<weight>:] <wff>`.
struct WeightedFormula {
    double weight = 1.0;
    bool weighted = false;
    Expr formula;
};

/// A set of (optionally weighted) formulas over a shared variable space.
/// Blank lines and lines starting with '#' are ignored.
struct KnowledgeBase {
    std::vector<WeightedFormula> formulas;
    VarTable vars;

    /// Conjunction of every formula, ignoring weights.
    Wff conjunction() const;
};

KnowledgeBase parse_knowledge_base(std::string_view text);

}  // namespace lbm
