#ifndef SEPKERN_SERIAL_HPP
#define SEPKERN_SERIAL_HPP

#include <json.hpp>

#include "covariance.hpp"
#include "solver.hpp"

namespace sepkern {

using json = nlohmann::json;

// Atom: {"kind": "...", "scale": s, "omega"?: w, "exponent"?: k,
//        "restriction"?: {"lo": a, "hi": b}}
json to_json(const FunctionAtom& a);
FunctionAtom atom_from_json(const json& j);

json to_json(const Interval& I);
Interval interval_from_json(const json& j);

// Operator: {"left": [...], "coeff": [[...]], "right": [...],
//            "domain": {...}, "left_support": {...}}
json to_json(const SeparableOperator& op);
SeparableOperator operator_from_json(const json& j);

// Parametric operator: like an operator, but coeff entries may be a number,
// a parameter name, {"param": name, "scale": c} or
// {"const": c0, "terms": [{"param":..., "scale":...}]}; plus "params": [names].
json to_json(const ParamOperator& op);
ParamOperator param_operator_from_json(const json& j);

json to_json(const KernelSum& K);
KernelSum kernel_sum_from_json(const json& j);

json to_json(const CovarianceReport& r);
json to_json(const SolveResult& r);

json to_json(const Polynomial& p);
Polynomial polynomial_from_json(const json& j);

// Throws ParseError when `j` has keys outside `allowed`.
void reject_unknown_fields(const json& j, std::initializer_list<const char*> allowed,
                           const std::string& where);

} // namespace sepkern

#endif
