#ifndef SEPKERN_SOLVER_HPP
#define SEPKERN_SOLVER_HPP

#include <string>
#include <vector>

#include "covariance.hpp"

namespace sepkern {

// Separable operator whose coefficient entries depend affinely on a parameter
// vector: entry(i,j) = constant(i,j) + sum_k slope_k * theta_{index_k}.
struct ParamOperator {
    struct Entry {
        double constant = 0.0;
        std::vector<std::pair<int, double>> terms;  // (parameter index, slope)
    };

    std::vector<FunctionAtom> left;
    std::vector<std::vector<Entry>> coeff;  // left.size() x right.size()
    std::vector<FunctionAtom> right;
    Interval domain;
    Interval left_support;
    std::vector<std::string> param_names;

    void validate() const;
    bool homogeneous() const;
    SeparableOperator instantiate(const std::vector<double>& theta) const;
};

struct SolveResult {
    enum class Kind { nullspace, roots, family };
    Kind kind = Kind::nullspace;
    std::vector<std::vector<double>> vectors;
    int nullspace_dim = 0;
    std::vector<double> residuals;
};

// Whole linear system V theta = 0 for B given A, together with a description
// of each row (the orthogonalized atom-product it projects onto).
struct LinearSystem {
    struct RowInfo {
        FunctionAtom left_atom;   // leading product atom of the orthogonalized row
        FunctionAtom right_atom;
        Interval region;
        int condition = 0;        // 1..3, the theorem condition the row came from
        std::string label;
    };
    Eigen::MatrixXd V;
    std::vector<RowInfo> rows;
};

// Rows are projections of the residual kernel of AB - B F(A) onto an
// orthogonalized basis of the distinct left x right atom products, taken per
// region (G, G_A \ G, G_B \ G with the theorem's side-specific kernels).
// V theta = 0 iff the instantiated B satisfies AB = B F(A).
LinearSystem build_linear_system_for_B(const SeparableOperator& A, const Polynomial& F,
                                       const ParamOperator& B_template,
                                       const PairingConfig& cfg = default_pairing_config());

// Orthonormal basis of the numerical nullspace via SVD; singular values below
// rank_tol * sigma_max count as zero. Residuals are |V v| per basis vector.
SolveResult nullspace(const Eigen::MatrixXd& V, double rank_tol);

// Determinant of the exact 4x4 system matrix of the four-term trigonometric
// family (same omega, orthogonal sin/cos), assembled entry by entry.
double detV_trig(const double thetaA[4], double delta, double sigma1, double sigma2);
Eigen::Matrix4d assemble_trig_V(const double thetaA[4], double delta, double sigma1,
                                double sigma2);

// Damped Gauss-Newton search for A given B from each seed plus a small lattice;
// converged parameter vectors are deduplicated and verified via check_covariance.
SolveResult solve_for_A_given_B(const SeparableOperator& B, const Polynomial& F,
                                const ParamOperator& A_template,
                                const std::vector<std::vector<double>>& seeds, double tol,
                                const PairingConfig& cfg = default_pairing_config());

} // namespace sepkern

#endif
