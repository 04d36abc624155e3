#ifndef SEPKERN_OPERATOR_CORE_HPP
#define SEPKERN_OPERATOR_CORE_HPP

#include <Eigen/Dense>
#include <vector>

#include "atoms.hpp"

namespace sepkern {

// Finite-rank integral operator with kernel
//   k(t, s) = sum_{i,j} coeff(i,j) left_i(t) right_j(s),
//   (A x)(t) = integral over `domain` of k(t, s) x(s) ds.
// `left_support` is the interval carrying the kernel's t-indicator.
struct SeparableOperator {
    std::vector<FunctionAtom> left;
    Eigen::MatrixXd coeff;    // left.size() x right.size()
    std::vector<FunctionAtom> right;
    Interval domain;
    Interval left_support;

    void validate() const;
    double kernel(double t, double s) const;
};

// Real polynomial F(z) = coeffs[0] + coeffs[1] z + ...; trailing zeros trimmed.
struct Polynomial {
    std::vector<double> coeffs{0.0};

    Polynomial() = default;
    explicit Polynomial(std::vector<double> c);

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    double at(int j) const { return j < static_cast<int>(coeffs.size()) ? coeffs[j] : 0.0; }
};

// scalar * Identity + sep; the identity part of F(A) is not separable.
struct AffineOperator {
    double scalar = 0.0;
    SeparableOperator sep;
};

// Formal signed sum of separable kernels, possibly over different domains.
struct KernelSum {
    struct Term {
        int sign = +1;  // +1 or -1
        SeparableOperator op;
    };
    std::vector<Term> terms;

    double eval(double t, double s) const;
};

SeparableOperator scaled(const SeparableOperator& a, double factor);
SeparableOperator zero_like(const SeparableOperator& a);

// Unit-scale canonical form (sin(-w) -> -sin(w), cos(-w) -> cos(w)); the
// returned factor carries the atom's scale and any sign flip.
struct CanonicalAtom {
    FunctionAtom atom;
    double factor = 1.0;
};
CanonicalAtom canonicalize(const FunctionAtom& a);

// Same base function and restriction (scales ignored).
bool same_atom(const FunctionAtom& a, const FunctionAtom& b);

// Identically zero as a function (sin with omega = 0).
bool zero_function(const FunctionAtom& a);

// All terms merged into one coefficient matrix over deduplicated canonical
// atom lists. Cancellations happen in the coefficients, which keeps the
// L2 quadratic form positive semidefinite and numerically tame.
struct ConsolidatedKernel {
    std::vector<FunctionAtom> left;
    std::vector<FunctionAtom> right;
    Eigen::MatrixXd coeff;
    bool empty() const { return left.empty() || right.empty(); }
};
ConsolidatedKernel consolidate(const KernelSum& K);

// M(i, j) = Q_G(X_i, Y_j)
Eigen::MatrixXd gram_cross(const std::vector<FunctionAtom>& X,
                           const std::vector<FunctionAtom>& Y, const Interval& G,
                           const PairingConfig& cfg = default_pairing_config());

// (A o B): left = A.left, right = B.right, domain = B.domain,
// coeff = A.coeff * W * B.coeff with W(j,k) = Q_{A.domain}(A.right_j, B.left_k).
SeparableOperator compose(const SeparableOperator& A, const SeparableOperator& B,
                          const PairingConfig& cfg = default_pairing_config());

// A^m, m >= 1, via coeff * (M coeff)^(m-1) with M(j,i) = Q_{A.domain}(A.right_j, A.left_i).
SeparableOperator power(const SeparableOperator& A, int m,
                        const PairingConfig& cfg = default_pairing_config());

// F(A) = F(0) I + separable part, accumulated Horner-style.
AffineOperator poly_eval(const Polynomial& F, const SeparableOperator& A,
                         const PairingConfig& cfg = default_pairing_config());

// B o (scalar I + sep) as the two-term sum {scalar B, B o sep}.
KernelSum compose_affine(const SeparableOperator& B, const AffineOperator& FA,
                         const PairingConfig& cfg = default_pairing_config());

// AB - BA.
KernelSum commutator(const SeparableOperator& A, const SeparableOperator& B,
                     const PairingConfig& cfg = default_pairing_config());

// Squared L2 norm of the summed kernel over t_region x s_region, evaluated
// exactly through Gram matrices of the participating atoms.
double kernel_l2_norm_sq(const KernelSum& K, const Interval& t_region,
                         const Interval& s_region,
                         const PairingConfig& cfg = default_pairing_config());

double kernel_l2_norm_sq(const SeparableOperator& op, const Interval& t_region,
                         const Interval& s_region,
                         const PairingConfig& cfg = default_pairing_config());

// Frobenius norm of coeff times the largest left/right atom bounds; the scale
// against which kernel residuals are measured.
double kernel_scale(const SeparableOperator& op);
double kernel_scale(const KernelSum& K);

// max |K(t,s)| over an n x n grid of panel midpoints.
double kernel_grid_max(const KernelSum& K, const Interval& t_region,
                       const Interval& s_region, int n = 20);

} // namespace sepkern

#endif
