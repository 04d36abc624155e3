#include "serial.hpp"

#include <algorithm>

namespace sepkern {

namespace {

double require_number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number())
        throw ParseError(where + ": missing or non-numeric field '" + key + "'");
    return j[key].get<double>();
}

int require_int(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number_integer())
        throw ParseError(where + ": missing or non-integer field '" + key + "'");
    return j[key].get<int>();
}

} // namespace

void reject_unknown_fields(const json& j, std::initializer_list<const char*> allowed,
                           const std::string& where) {
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) {
            return it.key() == k;
        });
        if (!known) throw ParseError(where + ": unknown field '" + it.key() + "'");
    }
}

json to_json(const Interval& I) { return json{{"lo", I.lo}, {"hi", I.hi}}; }

Interval interval_from_json(const json& j) {
    reject_unknown_fields(j, {"lo", "hi"}, "interval");
    return Interval(require_number(j, "lo", "interval"), require_number(j, "hi", "interval"));
}

json to_json(const FunctionAtom& a) {
    json j;
    j["kind"] = kind_name(a.kind);
    j["scale"] = a.scale;
    if (a.kind == FunctionAtom::Kind::sin || a.kind == FunctionAtom::Kind::cos)
        j["omega"] = a.omega;
    if (a.kind == FunctionAtom::Kind::monomial || a.kind == FunctionAtom::Kind::laurent)
        j["exponent"] = a.exponent;
    if (a.restriction) j["restriction"] = to_json(*a.restriction);
    return j;
}

FunctionAtom atom_from_json(const json& j) {
    reject_unknown_fields(j, {"kind", "scale", "omega", "exponent", "restriction"}, "atom");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ParseError("atom: missing 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    FunctionAtom a;
    if (kind == "constant") a.kind = FunctionAtom::Kind::constant;
    else if (kind == "sin") a.kind = FunctionAtom::Kind::sin;
    else if (kind == "cos") a.kind = FunctionAtom::Kind::cos;
    else if (kind == "monomial") a.kind = FunctionAtom::Kind::monomial;
    else if (kind == "laurent") a.kind = FunctionAtom::Kind::laurent;
    else throw ParseError("atom: unknown kind '" + kind + "'");

    a.scale = j.contains("scale") ? require_number(j, "scale", "atom") : 1.0;
    if (a.kind == FunctionAtom::Kind::sin || a.kind == FunctionAtom::Kind::cos)
        a.omega = require_number(j, "omega", "atom");
    else if (j.contains("omega"))
        throw ParseError("atom: 'omega' only applies to sin/cos");
    if (a.kind == FunctionAtom::Kind::monomial || a.kind == FunctionAtom::Kind::laurent)
        a.exponent = require_int(j, "exponent", "atom");
    else if (j.contains("exponent"))
        throw ParseError("atom: 'exponent' only applies to monomial/laurent");
    if (j.contains("restriction")) a.restriction = interval_from_json(j["restriction"]);
    a.validate();
    return a;
}

namespace {

std::vector<FunctionAtom> atoms_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a non-empty array");
    std::vector<FunctionAtom> out;
    for (const auto& e : j) out.push_back(atom_from_json(e));
    return out;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a matrix");
    const size_t rows = j.size();
    size_t cols = 0;
    for (const auto& row : j) {
        if (!row.is_array() || row.empty()) throw ParseError(where + ": ragged matrix");
        if (cols == 0) cols = row.size();
        if (row.size() != cols) throw ParseError(where + ": ragged matrix");
    }
    Eigen::MatrixXd M(rows, cols);
    for (size_t i = 0; i < rows; ++i)
        for (size_t k = 0; k < cols; ++k) {
            if (!j[i][k].is_number()) throw ParseError(where + ": non-numeric entry");
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                j[i][k].get<double>();
        }
    return M;
}

json matrix_to_json(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

json to_json(const SeparableOperator& op) {
    json j;
    j["left"] = json::array();
    for (const auto& a : op.left) j["left"].push_back(to_json(a));
    j["coeff"] = matrix_to_json(op.coeff);
    j["right"] = json::array();
    for (const auto& a : op.right) j["right"].push_back(to_json(a));
    j["domain"] = to_json(op.domain);
    j["left_support"] = to_json(op.left_support);
    return j;
}

SeparableOperator operator_from_json(const json& j) {
    reject_unknown_fields(j, {"left", "coeff", "right", "domain", "left_support"},
                          "operator");
    SeparableOperator op;
    if (!j.contains("left") || !j.contains("right") || !j.contains("coeff") ||
        !j.contains("domain") || !j.contains("left_support"))
        throw ParseError("operator: needs left, coeff, right, domain, left_support");
    op.left = atoms_from_json(j["left"], "operator.left");
    op.right = atoms_from_json(j["right"], "operator.right");
    op.coeff = matrix_from_json(j["coeff"], "operator.coeff");
    op.domain = interval_from_json(j["domain"]);
    op.left_support = interval_from_json(j["left_support"]);
    op.validate();
    return op;
}

json to_json(const ParamOperator& op) {
    json j;
    j["left"] = json::array();
    for (const auto& a : op.left) j["left"].push_back(to_json(a));
    j["right"] = json::array();
    for (const auto& a : op.right) j["right"].push_back(to_json(a));
    j["domain"] = to_json(op.domain);
    j["left_support"] = to_json(op.left_support);
    j["params"] = op.param_names;
    json rows = json::array();
    for (const auto& row : op.coeff) {
        json jr = json::array();
        for (const auto& e : row) {
            if (e.terms.empty()) {
                jr.push_back(e.constant);
            } else if (e.terms.size() == 1 && e.constant == 0.0 && e.terms[0].second == 1.0) {
                jr.push_back(op.param_names[static_cast<size_t>(e.terms[0].first)]);
            } else {
                json terms = json::array();
                for (const auto& [idx, slope] : e.terms)
                    terms.push_back(json{
                        {"param", op.param_names[static_cast<size_t>(idx)]},
                        {"scale", slope}});
                jr.push_back(json{{"const", e.constant}, {"terms", terms}});
            }
        }
        rows.push_back(std::move(jr));
    }
    j["coeff"] = std::move(rows);
    return j;
}

ParamOperator param_operator_from_json(const json& j) {
    reject_unknown_fields(j, {"left", "coeff", "right", "domain", "left_support", "params"},
                          "param_operator");
    ParamOperator op;
    if (!j.contains("params") || !j["params"].is_array())
        throw ParseError("param_operator: missing 'params' array");
    for (const auto& n : j["params"]) {
        if (!n.is_string()) throw ParseError("param_operator: parameter names must be strings");
        op.param_names.push_back(n.get<std::string>());
    }
    auto param_index = [&](const std::string& name) {
        for (size_t i = 0; i < op.param_names.size(); ++i)
            if (op.param_names[i] == name) return static_cast<int>(i);
        throw ParseError("param_operator: unknown parameter '" + name + "'");
    };

    op.left = atoms_from_json(j.at("left"), "param_operator.left");
    op.right = atoms_from_json(j.at("right"), "param_operator.right");
    op.domain = interval_from_json(j.at("domain"));
    op.left_support = interval_from_json(j.at("left_support"));

    const json& rows = j.at("coeff");
    if (!rows.is_array()) throw ParseError("param_operator: coeff must be an array");
    for (const auto& row : rows) {
        if (!row.is_array()) throw ParseError("param_operator: ragged coeff");
        std::vector<ParamOperator::Entry> out_row;
        for (const auto& cell : row) {
            ParamOperator::Entry e;
            if (cell.is_number()) {
                e.constant = cell.get<double>();
            } else if (cell.is_string()) {
                e.terms.emplace_back(param_index(cell.get<std::string>()), 1.0);
            } else if (cell.is_object() && cell.contains("param")) {
                reject_unknown_fields(cell, {"param", "scale"}, "param_operator.coeff");
                e.terms.emplace_back(param_index(cell["param"].get<std::string>()),
                                     cell.contains("scale") ? cell["scale"].get<double>()
                                                            : 1.0);
            } else if (cell.is_object()) {
                reject_unknown_fields(cell, {"const", "terms"}, "param_operator.coeff");
                if (cell.contains("const")) e.constant = cell["const"].get<double>();
                if (cell.contains("terms"))
                    for (const auto& t : cell["terms"]) {
                        reject_unknown_fields(t, {"param", "scale"},
                                              "param_operator.coeff.terms");
                        e.terms.emplace_back(param_index(t.at("param").get<std::string>()),
                                             t.contains("scale") ? t["scale"].get<double>()
                                                                 : 1.0);
                    }
            } else {
                throw ParseError("param_operator: bad coeff entry");
            }
            out_row.push_back(std::move(e));
        }
        op.coeff.push_back(std::move(out_row));
    }
    op.validate();
    return op;
}

json to_json(const KernelSum& K) {
    json terms = json::array();
    for (const auto& t : K.terms)
        terms.push_back(json{{"sign", t.sign}, {"op", to_json(t.op)}});
    return json{{"terms", std::move(terms)}};
}

KernelSum kernel_sum_from_json(const json& j) {
    reject_unknown_fields(j, {"terms"}, "kernel_sum");
    KernelSum K;
    for (const auto& t : j.at("terms")) {
        reject_unknown_fields(t, {"sign", "op"}, "kernel_sum.term");
        const int sign = t.at("sign").get<int>();
        if (sign != 1 && sign != -1) throw ParseError("kernel_sum: sign must be +-1");
        K.terms.push_back({sign, operator_from_json(t.at("op"))});
    }
    return K;
}

json to_json(const CovarianceReport& r) {
    return json{{"holds", r.holds},
                {"residual_on_G", r.residual_on_G},
                {"residual_on_GA_minus_G", r.residual_on_GA_minus_G},
                {"residual_on_GB_minus_G", r.residual_on_GB_minus_G},
                {"tolerance_used", r.tolerance_used},
                {"method", method_name(r.method)},
                {"scale", r.scale},
                {"violated_condition", r.violated_condition}};
}

json to_json(const SolveResult& r) {
    const char* kind = r.kind == SolveResult::Kind::nullspace
                           ? "nullspace"
                           : (r.kind == SolveResult::Kind::roots ? "roots" : "family");
    return json{{"kind", kind},
                {"vectors", r.vectors},
                {"nullspace_dim", r.nullspace_dim},
                {"residuals", r.residuals}};
}

json to_json(const Polynomial& p) { return json(p.coeffs); }

Polynomial polynomial_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("polynomial: expected a coefficient array");
    std::vector<double> c;
    for (const auto& v : j) {
        if (!v.is_number()) throw ParseError("polynomial: non-numeric coefficient");
        c.push_back(v.get<double>());
    }
    return Polynomial(c);
}

} // namespace sepkern
