#ifndef SEPKERN_EXPR_HPP
#define SEPKERN_EXPR_HPP

#include <map>
#include <string>

namespace sepkern {

// Arithmetic over named parameters: + - * / ^ ( ), numbers, identifiers.
// `pi` and `ln2` are built in; everything else must be present in env.
double eval_expr(const std::string& expr, const std::map<std::string, double>& env);

} // namespace sepkern

#endif
