#include "operator_core.hpp"

#include <cmath>

namespace sepkern {

void SeparableOperator::validate() const {
    if (left.empty() || right.empty())
        throw ArgumentError("separable operator needs at least one atom per side");
    if (coeff.rows() != static_cast<Eigen::Index>(left.size()) ||
        coeff.cols() != static_cast<Eigen::Index>(right.size()))
        throw ArgumentError("coefficient matrix shape does not match the atom lists");
    if (!coeff.allFinite())
        throw ArgumentError("coefficient matrix must be finite");
    for (const auto& a : left) a.validate();
    for (const auto& a : right) a.validate();
}

double SeparableOperator::kernel(double t, double s) const {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < coeff.rows(); ++i) {
        const double lt = left[static_cast<size_t>(i)].eval(t);
        if (lt == 0.0) continue;
        for (Eigen::Index j = 0; j < coeff.cols(); ++j) {
            const double c = coeff(i, j);
            if (c == 0.0) continue;
            sum += c * lt * right[static_cast<size_t>(j)].eval(s);
        }
    }
    return sum;
}

Polynomial::Polynomial(std::vector<double> c) : coeffs(std::move(c)) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    for (double v : coeffs)
        if (!std::isfinite(v)) throw ArgumentError("polynomial coefficients must be finite");
    while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
}

double KernelSum::eval(double t, double s) const {
    double sum = 0.0;
    for (const auto& term : terms) sum += term.sign * term.op.kernel(t, s);
    return sum;
}

SeparableOperator scaled(const SeparableOperator& a, double factor) {
    SeparableOperator out = a;
    out.coeff *= factor;
    return out;
}

SeparableOperator zero_like(const SeparableOperator& a) {
    SeparableOperator out = a;
    out.coeff.setZero();
    return out;
}

Eigen::MatrixXd gram_cross(const std::vector<FunctionAtom>& X,
                           const std::vector<FunctionAtom>& Y, const Interval& G,
                           const PairingConfig& cfg) {
    Eigen::MatrixXd M(X.size(), Y.size());
    for (size_t i = 0; i < X.size(); ++i)
        for (size_t j = 0; j < Y.size(); ++j)
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                pair(X[i], Y[j], G, cfg);
    return M;
}

SeparableOperator compose(const SeparableOperator& A, const SeparableOperator& B,
                          const PairingConfig& cfg) {
    A.validate();
    B.validate();
    const Eigen::MatrixXd W = gram_cross(A.right, B.left, A.domain, cfg);
    SeparableOperator out;
    out.left = A.left;
    out.right = B.right;
    out.coeff = A.coeff * W * B.coeff;
    out.domain = B.domain;
    out.left_support = A.left_support;
    return out;
}

SeparableOperator power(const SeparableOperator& A, int m, const PairingConfig& cfg) {
    if (m < 1) throw ArgumentError("power requires m >= 1");
    A.validate();
    if (m == 1) return A;
    const Eigen::MatrixXd M = gram_cross(A.right, A.left, A.domain, cfg);
    const Eigen::MatrixXd K = M * A.coeff;  // right-rank square step matrix
    Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(K.rows(), K.cols());
    for (int i = 1; i < m; ++i) acc = acc * K;
    SeparableOperator out = A;
    out.coeff = A.coeff * acc;
    return out;
}

AffineOperator poly_eval(const Polynomial& F, const SeparableOperator& A,
                         const PairingConfig& cfg) {
    A.validate();
    AffineOperator out;
    out.scalar = F.at(0);
    out.sep = zero_like(A);
    const int n = F.degree();
    if (n < 1) return out;
    const Eigen::MatrixXd M = gram_cross(A.right, A.left, A.domain, cfg);
    const Eigen::MatrixXd K = M * A.coeff;
    // sum_{j>=1} d_j A.coeff K^(j-1) = A.coeff * q(K), q(z) = d_1 + d_2 z + ... Horner.
    Eigen::MatrixXd q = F.at(n) * Eigen::MatrixXd::Identity(K.rows(), K.cols());
    for (int j = n - 1; j >= 1; --j)
        q = q * K + F.at(j) * Eigen::MatrixXd::Identity(K.rows(), K.cols());
    out.sep.coeff = A.coeff * q;
    return out;
}

KernelSum compose_affine(const SeparableOperator& B, const AffineOperator& FA,
                         const PairingConfig& cfg) {
    KernelSum out;
    out.terms.push_back({+1, scaled(B, FA.scalar)});
    out.terms.push_back({+1, compose(B, FA.sep, cfg)});
    return out;
}

KernelSum commutator(const SeparableOperator& A, const SeparableOperator& B,
                     const PairingConfig& cfg) {
    KernelSum out;
    out.terms.push_back({+1, compose(A, B, cfg)});
    out.terms.push_back({-1, compose(B, A, cfg)});
    return out;
}

CanonicalAtom canonicalize(const FunctionAtom& a) {
    CanonicalAtom c;
    c.atom = a;
    c.factor = a.scale;
    c.atom.scale = 1.0;
    if ((a.kind == FunctionAtom::Kind::sin || a.kind == FunctionAtom::Kind::cos) &&
        c.atom.omega < 0.0) {
        c.atom.omega = -c.atom.omega;
        if (a.kind == FunctionAtom::Kind::sin) c.factor = -c.factor;
    }
    return c;
}

namespace {

bool same_interval_opt(const std::optional<Interval>& a, const std::optional<Interval>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || (std::fabs(a->lo - b->lo) < 1e-14 && std::fabs(a->hi - b->hi) < 1e-14);
}

} // namespace

bool same_atom(const FunctionAtom& a, const FunctionAtom& b) {
    if (a.kind != b.kind) return false;
    if (!same_interval_opt(a.restriction, b.restriction)) return false;
    switch (a.kind) {
    case FunctionAtom::Kind::sin:
    case FunctionAtom::Kind::cos:
        return std::fabs(a.omega - b.omega) <= 1e-14 * (1.0 + std::fabs(a.omega));
    case FunctionAtom::Kind::monomial:
    case FunctionAtom::Kind::laurent:
        return a.exponent == b.exponent;
    case FunctionAtom::Kind::constant:
        return true;
    }
    return false;
}

bool zero_function(const FunctionAtom& a) {
    return a.kind == FunctionAtom::Kind::sin && a.omega == 0.0;
}

ConsolidatedKernel consolidate(const KernelSum& K) {
    ConsolidatedKernel out;
    auto index_of = [](std::vector<FunctionAtom>& list, const FunctionAtom& a) {
        for (size_t i = 0; i < list.size(); ++i)
            if (same_atom(list[i], a)) return static_cast<int>(i);
        list.push_back(a);
        return static_cast<int>(list.size()) - 1;
    };
    // first pass: the merged atom lists
    std::vector<std::vector<std::pair<int, double>>> lmap, rmap;  // per term, per atom
    for (const auto& term : K.terms) {
        std::vector<std::pair<int, double>> lm, rm;
        for (const auto& a : term.op.left) {
            const CanonicalAtom c = canonicalize(a);
            lm.emplace_back(zero_function(c.atom) ? -1 : index_of(out.left, c.atom),
                            c.factor);
        }
        for (const auto& a : term.op.right) {
            const CanonicalAtom c = canonicalize(a);
            rm.emplace_back(zero_function(c.atom) ? -1 : index_of(out.right, c.atom),
                            c.factor);
        }
        lmap.push_back(std::move(lm));
        rmap.push_back(std::move(rm));
    }
    out.coeff = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out.left.size()),
                                      static_cast<Eigen::Index>(out.right.size()));
    for (size_t t = 0; t < K.terms.size(); ++t) {
        const auto& term = K.terms[t];
        for (Eigen::Index i = 0; i < term.op.coeff.rows(); ++i) {
            const auto& [li, lf] = lmap[t][static_cast<size_t>(i)];
            if (li < 0) continue;
            for (Eigen::Index j = 0; j < term.op.coeff.cols(); ++j) {
                const auto& [rj, rf] = rmap[t][static_cast<size_t>(j)];
                if (rj < 0) continue;
                out.coeff(li, rj) += term.sign * term.op.coeff(i, j) * lf * rf;
            }
        }
    }
    return out;
}

double kernel_l2_norm_sq(const KernelSum& K, const Interval& t_region,
                         const Interval& s_region, const PairingConfig& cfg) {
    if (t_region.degenerate() || s_region.degenerate()) return 0.0;
    const ConsolidatedKernel ck = consolidate(K);
    if (ck.empty()) return 0.0;
    const Eigen::MatrixXd Gt = gram_cross(ck.left, ck.left, t_region, cfg);
    const Eigen::MatrixXd Gs = gram_cross(ck.right, ck.right, s_region, cfg);
    return ((ck.coeff.transpose() * Gt * ck.coeff).cwiseProduct(Gs)).sum();
}

double kernel_l2_norm_sq(const SeparableOperator& op, const Interval& t_region,
                         const Interval& s_region, const PairingConfig& cfg) {
    KernelSum K;
    K.terms.push_back({+1, op});
    return kernel_l2_norm_sq(K, t_region, s_region, cfg);
}

double kernel_scale(const SeparableOperator& op) {
    double lsup = 0.0, rsup = 0.0;
    for (const auto& a : op.left) lsup = std::max(lsup, a.sup_bound(op.left_support));
    for (const auto& a : op.right) rsup = std::max(rsup, a.sup_bound(op.domain));
    return op.coeff.norm() * lsup * rsup;
}

double kernel_scale(const KernelSum& K) {
    double s = 0.0;
    for (const auto& term : K.terms) s += kernel_scale(term.op);
    return s;
}

double kernel_grid_max(const KernelSum& K, const Interval& t_region,
                       const Interval& s_region, int n) {
    if (t_region.degenerate() || s_region.degenerate()) return 0.0;
    const double ht = t_region.measure() / n;
    const double hs = s_region.measure() / n;
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = t_region.lo + (i + 0.5) * ht;
        for (int j = 0; j < n; ++j) {
            const double s = s_region.lo + (j + 0.5) * hs;
            m = std::max(m, std::fabs(K.eval(t, s)));
        }
    }
    return m;
}

} // namespace sepkern
