#ifndef SEPKERN_TEST_ORACLES_HPP
#define SEPKERN_TEST_ORACLES_HPP

// Brute-force reference implementations used only by the tests. They stay
// independent of the library's closed forms and Gauss-Legendre machinery.

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "operator_core.hpp"

namespace oracle {

using sepkern::FunctionAtom;
using sepkern::Interval;
using sepkern::SeparableOperator;

// ---- adaptive Simpson quadrature ----------------------------------------

inline double simpson_step(const std::function<double(double)>& f, double a, double b,
                           double fa, double fm, double fb, double whole, double tol,
                           int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0) return left + right;
    if (std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

// ---- pairings over compound functions (finite atom lists) ----------------

inline double pair_lists(const std::vector<FunctionAtom>& u,
                         const std::vector<FunctionAtom>& v, const Interval& G) {
    double sum = 0.0;
    for (const auto& a : u)
        for (const auto& b : v) sum += sepkern::pair(a, b, G);
    return sum;
}

// ---- brute multi-index power oracle ---------------------------------------

// Coefficient matrix of A^m for a diagonal-coefficient operator, through the
// explicit gamma_{i_1..i_m} = prod Q(a_{i_{l+1}}, c_{i_l}) multi-index sum.
inline Eigen::MatrixXd brute_power_coeff(const SeparableOperator& A, int m) {
    const int r = static_cast<int>(A.left.size());
    if (A.right.size() != static_cast<size_t>(r))
        throw std::runtime_error("brute power oracle expects square atom lists");
    std::vector<double> d(static_cast<size_t>(r));
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j)
            if (i != j && A.coeff(i, j) != 0.0)
                throw std::runtime_error("brute power oracle expects diagonal coeff");
        d[static_cast<size_t>(i)] = A.coeff(i, i);
    }
    Eigen::MatrixXd Q(r, r);  // Q(i, j) = Q_GA(a_i, c_j)
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            Q(i, j) = sepkern::pair(A.left[static_cast<size_t>(i)],
                                    A.right[static_cast<size_t>(j)], A.domain);

    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(r, r);
    std::vector<int> idx(static_cast<size_t>(m), 0);
    for (;;) {
        double term = 1.0;
        for (int v = 0; v < m; ++v) term *= d[static_cast<size_t>(idx[static_cast<size_t>(v)])];
        for (int l = 0; l + 1 < m; ++l)
            term *= Q(idx[static_cast<size_t>(l + 1)], idx[static_cast<size_t>(l)]);
        out(idx.front(), idx.back()) += term;
        int pos = 0;
        while (pos < m && ++idx[static_cast<size_t>(pos)] == r) {
            idx[static_cast<size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == m) break;
    }
    return out;
}

// ---- operator application by quadrature -----------------------------------

inline double apply_operator(const SeparableOperator& A,
                             const std::function<double(double)>& x, double t) {
    return integrate([&](double s) { return A.kernel(t, s) * x(s); }, A.domain.lo,
                     A.domain.hi, 1e-12);
}

// ---- shared fixtures -------------------------------------------------------

// Projection pair on [0,1]: kernel I(t)(-6t(4s-3) + 12t^2(3s-2)), B = -A.
inline SeparableOperator projection_A(double alpha = -0.5, double beta = 1.5) {
    SeparableOperator A;
    const Interval support(alpha, beta);
    A.left = {sepkern::make_monomial(1, 1.0, support),
              sepkern::make_monomial(2, 1.0, support)};
    A.right = {sepkern::make_monomial(1), sepkern::make_constant(1.0)};
    A.coeff = Eigen::MatrixXd(2, 2);
    A.coeff << -24.0, 18.0, 36.0, -24.0;
    A.domain = Interval(0.0, 1.0);
    A.left_support = support;
    return A;
}

inline SeparableOperator projection_B() { return sepkern::scaled(projection_A(), -1.0); }

// Laurent pair on [1,2] with gA1 = gB1 = gA0 = 0 and gA3 = -2 ln2 gA2.
inline SeparableOperator laurent_A(double gA2, double gA0 = 0.0, double gA1 = 0.0,
                                   double gA3_override = std::nan("")) {
    const Interval support(0.5, 2.5), domain(1.0, 2.0);
    const double gA3 =
        std::isnan(gA3_override) ? -2.0 * std::log(2.0) * gA2 : gA3_override;
    SeparableOperator A;
    A.left = {sepkern::make_constant(1.0, support), sepkern::make_laurent(1, 1.0, support)};
    A.right = {sepkern::make_constant(1.0), sepkern::make_laurent(1, 1.0, domain)};
    A.coeff = Eigen::MatrixXd(2, 2);
    A.coeff << gA0, gA1, gA2, gA3;
    A.domain = domain;
    A.left_support = support;
    return A;
}

inline SeparableOperator laurent_B(double gB2, double gB1 = 0.0) {
    const Interval support(0.5, 2.5), domain(1.0, 2.0);
    SeparableOperator B;
    B.left = {sepkern::make_constant(1.0, support), sepkern::make_laurent(1, 1.0, support)};
    B.right = {sepkern::make_laurent(1, 1.0, domain), sepkern::make_constant(1.0)};
    B.coeff = Eigen::MatrixXd(2, 2);
    B.coeff << gB1, 0.0, 0.0, gB2;
    B.domain = domain;
    B.left_support = support;
    return B;
}

// Four-term trig operator on the common-omega geometry.
struct TrigGeom {
    double omega, alpha1, beta1, alpha, beta;
};

inline TrigGeom sym_geom() { return {2.0 * M_PI, 0.0, 1.0, -0.5, 1.5}; }
inline TrigGeom asym_geom() { return {10.0 * M_PI / 7.0, 0.2, 0.5, 0.0, 1.0}; }

inline SeparableOperator trig_operator(const TrigGeom& g, double t1, double t2, double t3,
                                       double t4) {
    const Interval support(g.alpha, g.beta);
    SeparableOperator op;
    op.left = {sepkern::make_sin(g.omega, 1.0, support),
               sepkern::make_cos(g.omega, 1.0, support)};
    op.right = {sepkern::make_cos(g.omega), sepkern::make_sin(g.omega)};
    op.coeff = Eigen::MatrixXd(2, 2);
    op.coeff << t1, t3, t2, t4;
    op.domain = Interval(g.alpha1, g.beta1);
    op.left_support = support;
    return op;
}

// Random single atom for property tests; laurent restricted to [0.5, 5].
inline FunctionAtom random_atom(std::mt19937& rng, bool allow_laurent = true) {
    std::uniform_real_distribution<double> omega_d(-10.0, 10.0);
    std::uniform_real_distribution<double> scale_d(-2.0, 2.0);
    std::uniform_real_distribution<double> pos(0.5, 5.0);
    std::uniform_real_distribution<double> any(-5.0, 5.0);
    std::uniform_int_distribution<int> kind_d(0, allow_laurent ? 4 : 3);
    std::uniform_int_distribution<int> exp_d(0, 3);
    std::uniform_int_distribution<int> coin(0, 1);

    const int kind = kind_d(rng);
    std::optional<Interval> restr;
    if (kind == 4) {
        double a = pos(rng), b = pos(rng);
        if (a > b) std::swap(a, b);
        restr = Interval(a, b);
    } else if (coin(rng)) {
        double a = any(rng), b = any(rng);
        if (a > b) std::swap(a, b);
        restr = Interval(a, b);
    }
    switch (kind) {
    case 0: return sepkern::make_constant(scale_d(rng), restr);
    case 1: return sepkern::make_sin(omega_d(rng), scale_d(rng), restr);
    case 2: return sepkern::make_cos(omega_d(rng), scale_d(rng), restr);
    case 3: return sepkern::make_monomial(exp_d(rng), scale_d(rng), restr);
    default: return sepkern::make_laurent(1 + exp_d(rng) % 2, scale_d(rng), *restr);
    }
}

} // namespace oracle

#endif
