#ifndef SEPKERN_FAMILIES_HPP
#define SEPKERN_FAMILIES_HPP

#include <map>
#include <random>
#include <string>
#include <vector>

#include "covariance.hpp"
#include "serial.hpp"

namespace sepkern {

// One enumerated solution family: a parameterized (A, B, F) triple satisfying
// AB = B F(A) together with its stated side identities. Families are loaded
// from the versioned JSON registry shipped with the library.
struct Family {
    struct FreeParam {
        std::string name;
        bool nonzero = false;
    };
    struct FixedParam {
        std::string name;
        std::string expr;
    };
    struct Claims {
        std::string ba;                            // "", "equal" or "zero"
        bool ab_zero = false;
        std::vector<std::string> commute_factors;  // commute iff some factor == 0
        std::vector<std::string> extra;            // "A2=A", "AB=-A"
        bool has_fixed_delta = false;
        double fixed_delta = 1.0;                  // poly_projection only
    };

    std::string id;
    std::string description;
    std::string kind;  // trig_case1 | trig_case2 | laurent | poly_projection
    json geometry;
    std::vector<FreeParam> free;
    std::vector<FixedParam> fixed;
    std::vector<std::string> constraints;  // expressions that must stay away from 0
    Claims claims;
};

// Concrete operators for one parameter assignment.
struct FamilyInstance {
    SeparableOperator A;
    SeparableOperator B;
    Polynomial F;
    std::map<std::string, double> env;  // all parameters plus sigma1/sigma2
};

const std::vector<Family>& family_registry();
const Family& family_by_id(const std::string& id);

// Sorted (id, description) listing.
std::vector<std::pair<std::string, std::string>> list_families();

// Builds the family's operators from the free-parameter vector (ordered as in
// Family::free). Throws ArgumentError for unknown ids, wrong arity, or
// parameters violating the family's constraints.
FamilyInstance instantiate_family(const std::string& id, const std::vector<double>& params);

// Draws free parameters honoring nonzero flags and constraints.
std::vector<double> draw_family_params(const Family& fam, std::mt19937& rng);

// check_covariance on the instantiated pair, with the family's stated extra
// identities folded into `holds`.
CovarianceReport verify_family(const std::string& id, const std::vector<double>& params,
                               double tol,
                               const PairingConfig& cfg = default_pairing_config());

// The individual extra-identity residuals (for reporting); keys depend on claims.
std::map<std::string, double> family_extra_residuals(
    const FamilyInstance& inst, const Family& fam,
    const PairingConfig& cfg = default_pairing_config());

} // namespace sepkern

#endif
