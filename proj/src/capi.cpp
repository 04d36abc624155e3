#include "sepkern/sepkern.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

#include "scenario.hpp"

using namespace sepkern;

struct sk_operator {
    SeparableOperator op;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
sk_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return SK_OK;
    } catch (const ArgumentError& e) {
        g_last_error = e.what();
        return SK_ERR_ARGUMENT;
    } catch (const DomainError& e) {
        g_last_error = e.what();
        return SK_ERR_DOMAIN;
    } catch (const NumericalError& e) {
        g_last_error = e.what();
        return SK_ERR_NUMERICAL;
    } catch (const ParseError& e) {
        g_last_error = e.what();
        return SK_ERR_PARSE;
    } catch (const nlohmann::json::exception& e) {
        g_last_error = e.what();
        return SK_ERR_PARSE;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SK_ERR_UNKNOWN;
    }
}

sk_status require(bool ok, const char* msg) {
    if (ok) return SK_OK;
    g_last_error = msg;
    return SK_ERR_ARGUMENT;
}

} // namespace

extern "C" {

const char* sk_version(void) { return "sepkern 1.0.0"; }

const char* sk_last_error(void) { return g_last_error.c_str(); }

void sk_string_free(char* s) { std::free(s); }

sk_status sk_set_default_quad_nodes(int n) {
    return guarded([&] { set_default_quad_nodes(n); });
}

sk_status sk_operator_from_json(const char* json_text, sk_operator** out) {
    if (sk_status st = require(json_text && out, "null argument")) return st;
    return guarded([&] {
        *out = new sk_operator{operator_from_json(json::parse(json_text))};
    });
}

void sk_operator_free(sk_operator* op) { delete op; }

sk_status sk_operator_to_json(const sk_operator* op, char** json_out) {
    if (sk_status st = require(op && json_out, "null argument")) return st;
    return guarded([&] { *json_out = dup_string(to_json(op->op).dump()); });
}

sk_status sk_pair_atoms(const char* atom_u_json, const char* atom_v_json, double lo,
                        double hi, double* value_out) {
    if (sk_status st = require(atom_u_json && atom_v_json && value_out, "null argument"))
        return st;
    return guarded([&] {
        const FunctionAtom u = atom_from_json(json::parse(atom_u_json));
        const FunctionAtom v = atom_from_json(json::parse(atom_v_json));
        *value_out = pair(u, v, Interval(lo, hi));
    });
}

double sk_sigma1(double omega, double a1, double b1) { return sigma1(omega, a1, b1); }

double sk_sigma2(double omega, double a1, double b1) { return sigma2(omega, a1, b1); }

sk_status sk_detv_trig(const double theta_a[4], double delta, double s1, double s2,
                       double* out) {
    if (sk_status st = require(theta_a && out, "null argument")) return st;
    return guarded([&] { *out = detV_trig(theta_a, delta, s1, s2); });
}

sk_status sk_compose(const sk_operator* a, const sk_operator* b, sk_operator** out) {
    if (sk_status st = require(a && b && out, "null argument")) return st;
    return guarded([&] { *out = new sk_operator{compose(a->op, b->op)}; });
}

sk_status sk_power(const sk_operator* a, int m, sk_operator** out) {
    if (sk_status st = require(a && out, "null argument")) return st;
    return guarded([&] { *out = new sk_operator{power(a->op, m)}; });
}

sk_status sk_commutator_norm(const sk_operator* a, const sk_operator* b, double* out) {
    if (sk_status st = require(a && b && out, "null argument")) return st;
    return guarded([&] {
        const KernelSum K = commutator(a->op, b->op);
        const Interval X = hull(a->op.left_support, b->op.left_support);
        const auto G = intersect(a->op.domain, b->op.domain);
        *out = G ? std::sqrt(std::max(kernel_l2_norm_sq(K, X, *G), 0.0)) : 0.0;
    });
}

sk_status sk_check_covariance(const sk_operator* a, const sk_operator* b,
                              const double* poly, size_t n_coeffs, double tol,
                              char** report_json_out) {
    if (sk_status st = require(a && b && poly && n_coeffs > 0 && report_json_out,
                               "null argument"))
        return st;
    return guarded([&] {
        const Polynomial F(std::vector<double>(poly, poly + n_coeffs));
        const CovarianceReport r = check_covariance(a->op, b->op, F, tol);
        *report_json_out = dup_string(to_json(r).dump());
    });
}

sk_status sk_run_scenario(const char* scenario_json, const char* command_override,
                          char** report_json_out, char** text_out, int* exit_code_out) {
    if (sk_status st = require(scenario_json && exit_code_out, "null argument")) return st;
    return guarded([&] {
        json j = json::parse(scenario_json);
        if (command_override && *command_override) {
            if (!j.contains("command"))
                j["command"] = command_override;
            else if (j["command"] != json(command_override))
                throw ArgumentError("scenario command '" +
                                    j["command"].get<std::string>() +
                                    "' does not match the requested command '" +
                                    command_override + "'");
        }
        const RunReport rep = run(parse_scenario(j));
        if (report_json_out) *report_json_out = dup_string(rep.out.dump(2));
        if (text_out) *text_out = dup_string(rep.text);
        *exit_code_out = rep.exit_code;
    });
}

sk_status sk_reproduce(const char* id, unsigned seed, double tol, char** report_json_out,
                       char** text_out, int* exit_code_out) {
    if (sk_status st = require(id && exit_code_out, "null argument")) return st;
    return guarded([&] {
        const RunReport rep = reproduce(id, seed, tol > 0 ? tol : 1e-10);
        if (report_json_out) *report_json_out = dup_string(rep.out.dump(2));
        if (text_out) *text_out = dup_string(rep.text);
        *exit_code_out = rep.exit_code;
    });
}

sk_status sk_list_families(char** json_out) {
    if (sk_status st = require(json_out != nullptr, "null argument")) return st;
    return guarded([&] {
        json out;
        out["families"] = json::array();
        for (const auto& [id, desc] : list_families())
            out["families"].push_back(json{{"id", id}, {"description", desc}});
        *json_out = dup_string(out.dump(2));
    });
}

} // extern "C"
