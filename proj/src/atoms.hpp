#ifndef SEPKERN_ATOMS_HPP
#define SEPKERN_ATOMS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "interval.hpp"

namespace sepkern {

// A closed-form function on the line, optionally restricted by an indicator:
//   constant        scale
//   sin / cos       scale * sin(omega t), scale * cos(omega t)
//   monomial(k)     scale * t^k,   k >= 0
//   laurent(k)      scale * t^-k,  k >= 1, restriction must exclude 0
struct FunctionAtom {
    enum class Kind { constant, sin, cos, monomial, laurent };

    Kind kind = Kind::constant;
    double omega = 0.0;   // sin/cos only
    int exponent = 0;     // monomial/laurent only (laurent stores k, meaning t^-k)
    double scale = 1.0;
    std::optional<Interval> restriction;

    void validate() const;

    // scale * base(t) if t is inside the restriction, else 0.
    double eval(double t) const;

    // base function without the indicator (restriction ignored).
    double eval_unrestricted(double t) const;

    // |scale| * sup |base| over I intersect restriction (coarse upper bound).
    double sup_bound(const Interval& I) const;
};

FunctionAtom make_constant(double scale, std::optional<Interval> r = std::nullopt);
FunctionAtom make_sin(double omega, double scale = 1.0, std::optional<Interval> r = std::nullopt);
FunctionAtom make_cos(double omega, double scale = 1.0, std::optional<Interval> r = std::nullopt);
FunctionAtom make_monomial(int k, double scale = 1.0, std::optional<Interval> r = std::nullopt);
FunctionAtom make_laurent(int k, double scale, Interval r);

const char* kind_name(FunctionAtom::Kind k);

struct PairingConfig {
    enum class Method { closed_form_first, quadrature_only };
    Method method = Method::closed_form_first;
    int quad_nodes = 32;        // Gauss-Legendre nodes per panel
    double quad_tol = 1e-12;
    int max_depth = 12;         // panel count doubles up to 2^max_depth

    void validate() const;
};

// Process-wide default config; quad_nodes honors SEPKERN_QUAD_NODES at first use.
const PairingConfig& default_pairing_config();
void set_default_quad_nodes(int n);

// Composite Gauss-Legendre estimate of integral of f over G with panel doubling.
double quadrature(const std::function<double(double)>& f, const Interval& G,
                  const PairingConfig& cfg = default_pairing_config());

// Q_G(u, v) = integral over G (and both restrictions) of u * v.
// Closed form when both atoms are trigonometric (constant/sin/cos) or both are
// power-law (constant/monomial/laurent); Gauss-Legendre otherwise.
double pair(const FunctionAtom& u, const FunctionAtom& v, const Interval& G,
            const PairingConfig& cfg = default_pairing_config());

// sigma1 = integral of sin(omega s)^2 over [a1, b1]:
//   0 when omega = 0, else (b1-a1)/2 - cos(omega (a1+b1)) sin(omega (b1-a1)) / (2 omega).
double sigma1(double omega, double a1, double b1);

// sigma2 = integral of cos(omega s)^2 = (b1 - a1) - sigma1.
double sigma2(double omega, double a1, double b1);

// Nodes/weights on [-1,1]; cached per n.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace sepkern

#endif
