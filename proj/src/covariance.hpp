#ifndef SEPKERN_COVARIANCE_HPP
#define SEPKERN_COVARIANCE_HPP

#include "operator_core.hpp"

namespace sepkern {

// Verdict for AB = B F(A), with per-region L2 residuals. The three regions are
// X x G, X x (G_A \ G) and X x (G_B \ G) for G = G_A intersect G_B; when
// G_A = G_B the outer two are measure zero and reported as 0.
struct CovarianceReport {
    enum class Method { general, rank_one, orthogonality, commutativity };

    bool holds = false;
    double residual_on_G = 0.0;
    double residual_on_GA_minus_G = 0.0;
    double residual_on_GB_minus_G = 0.0;
    double tolerance_used = 0.0;   // the relative tolerance the verdict used
    Method method = Method::general;

    double scale = 0.0;            // combined kernel scale; pass iff r <= tol*(1+scale)
    int violated_condition = 0;    // 1..3 when holds is false, else 0
};

const char* method_name(CovarianceReport::Method m);

// Full three-condition test of AB = B F(A):
//   region G:        AB - F(0) B - B o sep(F(A))
//   region G_A \ G:  B o sep(F(A))
//   region G_B \ G:  AB - F(0) B
// each measured in L2 over X_eff x region (X_eff = hull of left supports) and
// confirmed on a pointwise midpoint grid.
CovarianceReport check_covariance(const SeparableOperator& A, const SeparableOperator& B,
                                  const Polynomial& F, double tol,
                                  const PairingConfig& cfg = default_pairing_config());

// One-term kernels: decides through k1, k2 and the lambda-ratio conditions.
CovarianceReport check_rank_one(const SeparableOperator& A, const SeparableOperator& B,
                                const Polynomial& F, double tol,
                                const PairingConfig& cfg = default_pairing_config());

// Sufficient orthogonality test: all Q_G(A.right, B.left) and Q_G(B.right, A.left)
// vanish; then AB = delta B A^d = 0 for every delta and d.
bool check_orthogonality_sufficient(const SeparableOperator& A, const SeparableOperator& B,
                                    int d, double tol,
                                    const PairingConfig& cfg = default_pairing_config());

// F(z) = z; when both operators form a common-frequency four-term trig family
// the closed-form coefficient criterion is evaluated as well and must agree.
CovarianceReport check_commutativity(const SeparableOperator& A, const SeparableOperator& B,
                                     double tol,
                                     const PairingConfig& cfg = default_pairing_config());

} // namespace sepkern

#endif
