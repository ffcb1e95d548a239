#include "lbm/rbm_io.hpp"

#include <charconv>
#include <cmath>

#include "lbm/error.hpp"

namespace lbm {

using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// Appends "+ c·name" style terms; the first term carries its own sign.
void append_term(std::string& out, bool& first, double coef, const std::string& name) {
    if (coef == 0.0) return;
    const double mag = std::abs(coef);
    if (first) {
        if (coef < 0) out += "-";
    } else {
        out += coef < 0 ? " - " : " + ";
    }
    if (name.empty()) out += num(mag);
    else if (mag != 1.0) out += num(mag) + name;
    else out += name;
    first = false;
}

template <typename T>
T field(const json& doc, const char* key) {
    if (!doc.contains(key)) throw ParseError(std::string("RBM document is missing '") + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("RBM document field '") + key + "': " + e.what());
    }
}

}  // namespace

std::string visible_name(const Rbm& rbm, std::size_t i) {
    if (i < rbm.vars.size()) return rbm.vars.name(static_cast<VarIndex>(i));
    return "x" + std::to_string(i + 1);
}

json rbm_to_json(const Rbm& rbm) {
    rbm.check_shape();
    json prov = json::array();
    for (const auto& p : rbm.provenance) {
        if (!p) {
            prov.push_back(nullptr);
            continue;
        }
        prov.push_back({{"source", p->source},
                        {"weight", p->weight},
                        {"eps", p->eps},
                        {"pos", p->clause.pos()},
                        {"neg", p->clause.neg()}});
    }
    json names = json::array();
    for (std::size_t i = 0; i < rbm.n_visible; ++i) names.push_back(visible_name(rbm, i));
    return json{{"format", "lbm-rbm"},
                {"version", kRbmFormatVersion},
                {"n_visible", rbm.n_visible},
                {"n_hidden", rbm.n_hidden},
                {"variables", names},
                {"W", rbm.W},
                {"a", rbm.a},
                {"b", rbm.b},
                {"e0", rbm.e0},
                {"eps", rbm.eps},
                {"tau", rbm.tau},
                {"provenance", prov}};
}

Rbm rbm_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("RBM document must be a JSON object");
    if (field<std::string>(doc, "format") != "lbm-rbm") throw ParseError("not an lbm-rbm document");
    if (field<int>(doc, "version") != kRbmFormatVersion) throw ParseError("unsupported RBM document version");
    Rbm rbm;
    rbm.n_visible = field<std::size_t>(doc, "n_visible");
    rbm.n_hidden = field<std::size_t>(doc, "n_hidden");
    rbm.W = field<std::vector<double>>(doc, "W");
    rbm.a = field<std::vector<double>>(doc, "a");
    rbm.b = field<std::vector<double>>(doc, "b");
    rbm.e0 = field<double>(doc, "e0");
    rbm.eps = field<double>(doc, "eps");
    rbm.tau = field<double>(doc, "tau");
    if (doc.contains("variables")) rbm.vars = VarTable(field<std::vector<std::string>>(doc, "variables"));
    const auto prov = field<json>(doc, "provenance");
    if (!prov.is_array()) throw ParseError("RBM provenance must be an array");
    for (const auto& p : prov) {
        if (p.is_null()) {
            rbm.provenance.emplace_back();
            continue;
        }
        HiddenProvenance hp;
        hp.source = field<std::size_t>(p, "source");
        hp.weight = field<double>(p, "weight");
        hp.eps = field<double>(p, "eps");
        try {
            hp.clause = ConjClause(field<std::vector<VarIndex>>(p, "pos"), field<std::vector<VarIndex>>(p, "neg"));
        } catch (const CompileError& e) {
            throw ParseError(std::string("RBM provenance: ") + e.what());
        }
        rbm.provenance.emplace_back(std::move(hp));
    }
    try {
        rbm.check_shape();
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return rbm;
}

std::string energy_listing(const Rbm& rbm) {
    std::string out = "E =";
    bool any = false;
    for (std::size_t j = 0; j < rbm.n_hidden; ++j) {
        out += any ? " - " : " -";
        out += "h" + std::to_string(j + 1) + "(";
        bool first = true;
        for (std::size_t i = 0; i < rbm.n_visible; ++i) append_term(out, first, rbm.w(i, j), visible_name(rbm, i));
        append_term(out, first, rbm.b[j], "");
        if (first) out += "0";
        out += ")";
        any = true;
    }
    // Visible biases enter as -a_i x_i.
    for (std::size_t i = 0; i < rbm.n_visible; ++i) {
        if (rbm.a[i] == 0.0) continue;
        bool first = !any;
        if (first) out += " ";
        append_term(out, first, -rbm.a[i], visible_name(rbm, i));
        any = true;
    }
    if (rbm.e0 != 0.0) {
        bool first = !any;
        if (first) out += " ";
        append_term(out, first, rbm.e0, "");
        any = true;
    }
    if (!any) out += " 0";
    return out;
}

}  // namespace lbm
