#ifndef SEPKERN_SCENARIO_HPP
#define SEPKERN_SCENARIO_HPP

#include <string>

#include "families.hpp"
#include "serial.hpp"

namespace sepkern {

// Parsed scenario file (version 1). Unknown fields are rejected.
struct Scenario {
    enum class Command { pair, compose, power, check, solve_b, solve_a, commutator, reproduce };

    Command command = Command::check;
    std::map<std::string, SeparableOperator> operators;
    std::map<std::string, ParamOperator> templates;
    std::map<std::string, FunctionAtom> atoms;
    Polynomial polynomial;
    bool has_polynomial = false;
    std::optional<Interval> domain;

    // options
    double tol = 1e-10;
    double rank_tol = 1e-9;
    unsigned seed = 0;
    int power_exponent = 2;
    std::string family_id;
    std::vector<std::vector<double>> seeds;
    int quad_nodes = 0;  // 0: default

    // optional expectation
    json expect;
};

struct RunReport {
    std::string text;
    json out;
    int exit_code = 0;
};

const char* command_name(Scenario::Command c);
Scenario::Command command_from_name(const std::string& name);

Scenario parse_scenario(const json& j);
json scenario_to_json(const Scenario& s);

// Dispatches to the module operation for the scenario's command.
RunReport run(const Scenario& scenario);

// Reproduction programs: family ids (5 seeded draws each) plus
// "case2a-detv-factorization" (100-sample determinant factorization check).
RunReport reproduce(const std::string& id, unsigned seed, double tol);

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitError = 2;

} // namespace sepkern

#endif
