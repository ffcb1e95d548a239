#include "lbm/logic.hpp"

#include <cctype>
#include <charconv>
#include <utility>

#include "lbm/error.hpp"

namespace lbm {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(line == 0 ? what
                                   : what + " at line " + std::to_string(line) + ", column " +
                                         std::to_string(column)),
      line_(line),
      column_(column) {}

VarTable::VarTable(std::vector<std::string> names) {
    for (auto& n : names) intern(n);
}

VarIndex VarTable::intern(std::string_view name) {
    auto key = std::string(name);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    auto idx = static_cast<VarIndex>(names_.size());
    names_.push_back(key);
    index_.emplace(std::move(key), idx);
    return idx;
}

std::optional<VarIndex> VarTable::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Expr Expr::variable(VarIndex v) {
    Expr e;
    e.kind = ExprKind::Var;
    e.var = v;
    return e;
}

Expr Expr::negation(Expr child) {
    Expr e;
    e.kind = ExprKind::Not;
    e.children.push_back(std::move(child));
    return e;
}

Expr Expr::conjunction(std::vector<Expr> children) {
    if (children.size() < 2) throw std::invalid_argument("conjunction needs at least two operands");
    Expr e;
    e.kind = ExprKind::And;
    e.children = std::move(children);
    return e;
}

Expr Expr::disjunction(std::vector<Expr> children) {
    if (children.size() < 2) throw std::invalid_argument("disjunction needs at least two operands");
    Expr e;
    e.kind = ExprKind::Or;
    e.children = std::move(children);
    return e;
}

Expr Expr::implication(Expr lhs, Expr rhs) {
    Expr e;
    e.kind = ExprKind::Implies;
    e.children.push_back(std::move(lhs));
    e.children.push_back(std::move(rhs));
    return e;
}

Expr Expr::equivalence(Expr lhs, Expr rhs) {
    Expr e;
    e.kind = ExprKind::Iff;
    e.children.push_back(std::move(lhs));
    e.children.push_back(std::move(rhs));
    return e;
}

bool Expr::eval(std::span<const std::uint8_t> x) const {
    switch (kind) {
        case ExprKind::Var: return x[var] != 0;
        case ExprKind::Not: return !children[0].eval(x);
        case ExprKind::And:
            for (const auto& c : children)
                if (!c.eval(x)) return false;
            return true;
        case ExprKind::Or:
            for (const auto& c : children)
                if (c.eval(x)) return true;
            return false;
        case ExprKind::Implies: return !children[0].eval(x) || children[1].eval(x);
        case ExprKind::Iff: return children[0].eval(x) == children[1].eval(x);
    }
    return false;
}

namespace {

enum class Tok { Ident, Not, And, Or, Implies, Iff, LParen, RParen, End };

const char* tok_text(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::Not: return "'!'";
        case Tok::And: return "'&'";
        case Tok::Or: return "'|'";
        case Tok::Implies: return "'->'";
        case Tok::Iff: return "'<->'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::End: return "end of input";
    }
    return "?";
}

struct Token {
    Tok kind;
    std::string_view text;
    std::size_t line;
    std::size_t column;
};

class Parser {
public:
    Parser(std::string_view text, VarTable& vars, std::size_t first_line)
        : text_(text), vars_(vars), line_(first_line) {
        advance();
    }

    Expr parse() {
        Expr e = parse_iff();
        if (cur_.kind != Tok::End) fail(std::string("unexpected ") + tok_text(cur_.kind));
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("syntax error: " + msg, cur_.line, cur_.column);
    }

    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            if (text_[pos_] == '\n') {
                ++line_;
                line_start_ = pos_ + 1;
            }
            ++pos_;
        }
        cur_.line = line_;
        cur_.column = pos_ - line_start_ + 1;
        if (pos_ >= text_.size()) {
            cur_.kind = Tok::End;
            cur_.text = {};
            return;
        }
        auto start = pos_;
        char ch = text_[pos_];
        auto take = [&](Tok k, std::size_t len) {
            cur_.kind = k;
            cur_.text = text_.substr(start, len);
            pos_ += len;
        };
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::size_t len = 1;
            while (start + len < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[start + len])) || text_[start + len] == '_'))
                ++len;
            take(Tok::Ident, len);
            return;
        }
        auto rest = text_.substr(pos_);
        if (rest.starts_with("<->")) return take(Tok::Iff, 3);
        if (rest.starts_with("->")) return take(Tok::Implies, 2);
        switch (ch) {
            case '!': return take(Tok::Not, 1);
            case '&': return take(Tok::And, 1);
            case '|': return take(Tok::Or, 1);
            case '(': return take(Tok::LParen, 1);
            case ')': return take(Tok::RParen, 1);
            default: break;
        }
        fail(std::string("unexpected character '") + ch + "'");
    }

    // Called after consuming a binary operator: its right operand must exist.
    void expect_operand(Tok op) {
        if (cur_.kind == Tok::End || cur_.kind == Tok::RParen)
            fail(std::string("operator ") + tok_text(op) + " is missing its right operand");
    }

    Expr parse_iff() {
        Expr lhs = parse_implies();
        while (cur_.kind == Tok::Iff) {
            advance();
            expect_operand(Tok::Iff);
            lhs = Expr::equivalence(std::move(lhs), parse_implies());
        }
        return lhs;
    }

    Expr parse_implies() {
        Expr lhs = parse_or();
        if (cur_.kind == Tok::Implies) {
            advance();
            expect_operand(Tok::Implies);
            return Expr::implication(std::move(lhs), parse_implies());
        }
        return lhs;
    }

    Expr parse_or() {
        std::vector<Expr> items;
        items.push_back(parse_and());
        while (cur_.kind == Tok::Or) {
            advance();
            expect_operand(Tok::Or);
            items.push_back(parse_and());
        }
        if (items.size() == 1) return std::move(items.front());
        return Expr::disjunction(std::move(items));
    }

    Expr parse_and() {
        std::vector<Expr> items;
        items.push_back(parse_unary());
        while (cur_.kind == Tok::And) {
            advance();
            expect_operand(Tok::And);
            items.push_back(parse_unary());
        }
        if (items.size() == 1) return std::move(items.front());
        return Expr::conjunction(std::move(items));
    }

    Expr parse_unary() {
        switch (cur_.kind) {
            case Tok::Not:
                advance();
                if (cur_.kind == Tok::End) fail("operator '!' is missing its operand");
                return Expr::negation(parse_unary());
            case Tok::Ident: {
                auto v = vars_.intern(cur_.text);
                advance();
                return Expr::variable(v);
            }
            case Tok::LParen: {
                advance();
                Expr inner = parse_iff();
                if (cur_.kind != Tok::RParen) fail(std::string("expected ')' but found ") + tok_text(cur_.kind));
                advance();
                return inner;
            }
            default: fail(std::string("expected an operand but found ") + tok_text(cur_.kind));
        }
    }

    std::string_view text_;
    VarTable& vars_;
    std::size_t pos_ = 0;
    std::size_t line_;
    std::size_t line_start_ = 0;
    Token cur_{Tok::End, {}, 0, 0};
};

Expr parse_at(std::string_view text, VarTable& vars, std::size_t first_line) {
    return Parser(text, vars, first_line).parse();
}

void render(const Expr& e, const VarTable& vars, std::string& out);

// Variables and negations bind tightest, so they never need parentheses.
void render_operand(const Expr& e, const VarTable& vars, std::string& out) {
    if (e.kind == ExprKind::Var || e.kind == ExprKind::Not) {
        render(e, vars, out);
    } else {
        out += '(';
        render(e, vars, out);
        out += ')';
    }
}

void render(const Expr& e, const VarTable& vars, std::string& out) {
    const char* sep = nullptr;
    switch (e.kind) {
        case ExprKind::Var: out += vars.name(e.var); return;
        case ExprKind::Not:
            out += '!';
            render_operand(e.children[0], vars, out);
            return;
        case ExprKind::And: sep = " & "; break;
        case ExprKind::Or: sep = " | "; break;
        case ExprKind::Implies: sep = " -> "; break;
        case ExprKind::Iff: sep = " <-> "; break;
    }
    for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += sep;
        render_operand(e.children[i], vars, out);
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Expr parse_expr(std::string_view text, VarTable& vars) { return parse_at(text, vars, 1); }

Wff parse_wff(std::string_view text) {
    Wff w;
    w.root = parse_expr(text, w.vars);
    return w;
}

std::string to_string(const Expr& e, const VarTable& vars) {
    std::string out;
    render(e, vars, out);
    return out;
}

Wff KnowledgeBase::conjunction() const {
    Wff w;
    w.vars = vars;
    if (formulas.empty()) throw CompileError("knowledge base contains no formulas");
    if (formulas.size() == 1) {
        w.root = formulas.front().formula;
        return w;
    }
    std::vector<Expr> parts;
    for (const auto& f : formulas) parts.push_back(f.formula);
    w.root = Expr::conjunction(std::move(parts));
    return w;
}

KnowledgeBase parse_knowledge_base(std::string_view text) {
    KnowledgeBase kb;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;

        WeightedFormula wf;
        double weight = 0;
        auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), weight);
        if (ec == std::errc{}) {
            auto after = trim(std::string_view(ptr, static_cast<std::size_t>(body.data() + body.size() - ptr)));
            if (!after.empty() && after.front() == ':') {
                if (!(weight > 0)) {
                    throw ParseError("formula weight must be positive", line_no,
                                     static_cast<std::size_t>(body.data() - line.data()) + 1);
                }
                wf.weight = weight;
                wf.weighted = true;
                body = after.substr(1);
            }
        }
        // Keep columns meaningful by padding the formula back to its offset in the line.
        auto offset = static_cast<std::size_t>(body.data() - line.data());
        std::string padded(offset, ' ');
        padded.append(body);
        wf.formula = parse_at(padded, kb.vars, line_no);
        kb.formulas.push_back(std::move(wf));
    }
    return kb;
}

}  // namespace lbm
