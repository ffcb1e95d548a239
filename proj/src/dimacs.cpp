#include "lbm/dimacs.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>

#include "lbm/error.hpp"

namespace lbm {

namespace {

struct Lexeme {
    std::string_view text;
    std::size_t line;
    std::size_t column;
};

class Scanner {
public:
    explicit Scanner(std::string_view text) : text_(text) {}

    // Next whitespace-separated token, skipping comment lines. Empty at EOF.
    Lexeme next() {
        for (;;) {
            skip_space();
            if (pos_ >= text_.size()) return {{}, line_, col()};
            if (at_line_start() && (text_[pos_] == 'c' || text_[pos_] == '%')) {
                // 'c' comments; '%' terminates some benchmark files
                if (text_[pos_] == '%') {
                    pos_ = text_.size();
                    continue;
                }
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
                continue;
            }
            auto start = pos_;
            Lexeme lx{{}, line_, col()};
            while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            lx.text = text_.substr(start, pos_ - start);
            return lx;
        }
    }

private:
    bool at_line_start() const {
        for (auto p = pos_; p > 0; --p) {
            char ch = text_[p - 1];
            if (ch == '\n') return true;
            if (ch != ' ' && ch != '\t' && ch != '\r') return false;
        }
        return true;
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            if (text_[pos_] == '\n') {
                ++line_;
                line_start_ = pos_ + 1;
            }
            ++pos_;
        }
    }

    std::size_t col() const { return pos_ - line_start_ + 1; }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t line_start_ = 0;
};

template <typename T>
T to_number(const Lexeme& lx, const char* what) {
    T value{};
    auto [ptr, ec] = std::from_chars(lx.text.data(), lx.text.data() + lx.text.size(), value);
    if (ec != std::errc{} || ptr != lx.text.data() + lx.text.size())
        throw ParseError(std::string("expected ") + what + " but found '" + std::string(lx.text) + "'", lx.line,
                         lx.column);
    return value;
}

std::string format_weight(double w) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, w);
    return std::string(buf, ptr);
}

}  // namespace

Cnf parse_dimacs(std::string_view text) {
    Scanner sc(text);
    auto p = sc.next();
    if (p.text != "p") throw ParseError("malformed header: expected 'p cnf' or 'p wcnf'", p.line, p.column);
    auto fmt = sc.next();
    bool weighted = false;
    if (fmt.text == "wcnf") weighted = true;
    else if (fmt.text != "cnf") throw ParseError("malformed header: unknown format", fmt.line, fmt.column);

    auto v_lx = sc.next();
    auto c_lx = sc.next();
    if (v_lx.text.empty() || c_lx.text.empty()) throw ParseError("malformed header: missing counts", p.line, p.column);
    auto n_vars = to_number<std::int64_t>(v_lx, "variable count");
    auto n_clauses = to_number<std::int64_t>(c_lx, "clause count");
    if (n_vars < 0 || n_clauses < 0) throw ParseError("malformed header: negative count", v_lx.line, v_lx.column);
    Cnf cnf;
    cnf.n_vars = static_cast<std::size_t>(n_vars);

    Lexeme lx = sc.next();
    // WCNF TOP is optional in some producers; when present it is on the header line.
    if (weighted && !lx.text.empty() && lx.line == p.line) {
        (void)to_number<double>(lx, "TOP weight");
        lx = sc.next();
    }

    while (!lx.text.empty()) {
        Lexeme start = lx;
        double weight = 1.0;
        if (weighted) {
            weight = to_number<double>(lx, "clause weight");
            if (!(weight > 0) || !std::isfinite(weight))
                throw ParseError("clause weight must be positive", lx.line, lx.column);
            lx = sc.next();
        }
        std::vector<VarIndex> pos;
        std::vector<VarIndex> neg;
        bool terminated = false;
        while (!lx.text.empty()) {
            auto lit = to_number<std::int64_t>(lx, "literal");
            if (lit == 0) {
                terminated = true;
                lx = sc.next();
                break;
            }
            auto var = lit < 0 ? -lit : lit;
            if (var > n_vars) throw ParseError("literal out of range", lx.line, lx.column);
            (lit > 0 ? pos : neg).push_back(static_cast<VarIndex>(var - 1));
            lx = sc.next();
        }
        if (!terminated) throw ParseError("missing 0 terminator", start.line, start.column);
        try {
            cnf.clauses.emplace_back(std::move(pos), std::move(neg));
        } catch (const CompileError& e) {
            throw ParseError(e.what(), start.line, start.column);
        }
        if (weighted) cnf.weights.push_back(weight);
    }
    if (static_cast<std::int64_t>(cnf.clauses.size()) != n_clauses)
        throw ParseError("malformed header: declared " + std::to_string(n_clauses) + " clauses, found " +
                         std::to_string(cnf.clauses.size()));
    return cnf;
}

std::string render_dimacs(const Cnf& cnf) {
    std::string out;
    const bool weighted = !cnf.weights.empty();
    if (weighted) {
        out += "p wcnf " + std::to_string(cnf.n_vars) + " " + std::to_string(cnf.clauses.size()) + " " +
               format_weight(cnf.total_weight() + 1) + "\n";
    } else {
        out += "p cnf " + std::to_string(cnf.n_vars) + " " + std::to_string(cnf.clauses.size()) + "\n";
    }
    for (std::size_t m = 0; m < cnf.clauses.size(); ++m) {
        if (weighted) out += format_weight(cnf.weights[m]) + " ";
        for (auto v : cnf.clauses[m].neg()) out += "-" + std::to_string(v + 1) + " ";
        for (auto v : cnf.clauses[m].pos()) out += std::to_string(v + 1) + " ";
        out += "0\n";
    }
    return out;
}

}  // namespace lbm
