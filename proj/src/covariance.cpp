#include "covariance.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <optional>
#include <sstream>

namespace sepkern {

namespace {

constexpr double kGridFloor = 1e-8;

double clamp_sqrt(double norm_sq) {
    return std::sqrt(std::max(norm_sq, 0.0));
}

// L2 norm of K over X x (union of region pieces), plus the grid maximum.
struct RegionResidual {
    double norm = 0.0;
    double grid_max = 0.0;
};

RegionResidual region_residual(const KernelSum& K, const Interval& X,
                               const std::vector<Interval>& pieces,
                               const PairingConfig& cfg) {
    RegionResidual r;
    double sq = 0.0;
    for (const auto& piece : pieces) {
        if (piece.degenerate()) continue;
        sq += kernel_l2_norm_sq(K, X, piece, cfg);
        r.grid_max = std::max(r.grid_max, kernel_grid_max(K, X, piece));
    }
    r.norm = clamp_sqrt(sq);
    return r;
}

} // namespace

const char* method_name(CovarianceReport::Method m) {
    switch (m) {
    case CovarianceReport::Method::general:       return "general";
    case CovarianceReport::Method::rank_one:      return "rank_one";
    case CovarianceReport::Method::orthogonality: return "orthogonality";
    case CovarianceReport::Method::commutativity: return "commutativity";
    }
    return "?";
}

CovarianceReport check_covariance(const SeparableOperator& A, const SeparableOperator& B,
                                  const Polynomial& F, double tol,
                                  const PairingConfig& cfg) {
    if (!(tol > 0.0)) throw ArgumentError("check_covariance requires tol > 0");
    A.validate();
    B.validate();

    const Interval X = hull(A.left_support, B.left_support);
    const std::optional<Interval> G = intersect(A.domain, B.domain);

    const SeparableOperator AB = compose(A, B, cfg);
    const AffineOperator FA = poly_eval(F, A, cfg);
    const SeparableOperator BFs = compose(B, FA.sep, cfg);
    const SeparableOperator d0B = scaled(B, FA.scalar);

    KernelSum cond1;   // AB - F(0) B - B o sep(F(A)) on X x G
    cond1.terms.push_back({+1, AB});
    cond1.terms.push_back({-1, d0B});
    cond1.terms.push_back({-1, BFs});
    KernelSum cond2;   // B o sep(F(A)) on X x (G_A \ G)
    cond2.terms.push_back({+1, BFs});
    KernelSum cond3;   // AB - F(0) B on X x (G_B \ G)
    cond3.terms.push_back({+1, AB});
    cond3.terms.push_back({-1, d0B});

    CovarianceReport rep;
    rep.method = CovarianceReport::Method::general;
    rep.tolerance_used = tol;
    rep.scale = kernel_scale(cond1);
    const double bound = tol * (1.0 + rep.scale);
    const double grid_bound = std::max(tol, kGridFloor) * (1.0 + rep.scale);

    RegionResidual r1, r2, r3;
    if (G) r1 = region_residual(cond1, X, {*G}, cfg);
    if (!(A.domain == B.domain)) {
        const auto piecesA = G ? subtract(A.domain, *G) : std::vector<Interval>{A.domain};
        const auto piecesB = G ? subtract(B.domain, *G) : std::vector<Interval>{B.domain};
        r2 = region_residual(cond2, X, piecesA, cfg);
        r3 = region_residual(cond3, X, piecesB, cfg);
    }

    rep.residual_on_G = r1.norm;
    rep.residual_on_GA_minus_G = r2.norm;
    rep.residual_on_GB_minus_G = r3.norm;

    const bool ok1 = r1.norm <= bound && r1.grid_max <= grid_bound;
    const bool ok2 = r2.norm <= bound && r2.grid_max <= grid_bound;
    const bool ok3 = r3.norm <= bound && r3.grid_max <= grid_bound;
    rep.holds = ok1 && ok2 && ok3;
    rep.violated_condition = !ok1 ? 1 : (!ok2 ? 2 : (!ok3 ? 3 : 0));
    return rep;
}

namespace {

// One-term kernels a(t) c(s) with compound factor functions: each factor is a
// finite atom list with the scales folded in.
using AtomList = std::vector<FunctionAtom>;

double pair_lists(const AtomList& u, const AtomList& v, const Interval& G,
                  const PairingConfig& cfg) {
    double sum = 0.0;
    for (const auto& x : u)
        for (const auto& y : v) sum += pair(x, y, G, cfg);
    return sum;
}

double list_l2(const AtomList& u, const Interval& I, const PairingConfig& cfg) {
    if (I.degenerate()) return 0.0;
    return clamp_sqrt(pair_lists(u, u, I, cfg));
}

// c * u(t) v(s) as a separable operator (outer-product coefficient matrix).
SeparableOperator product_kernel(const AtomList& u, const AtomList& v, double c,
                                 const Interval& domain, const Interval& support) {
    SeparableOperator op;
    op.left = u;
    op.right = v;
    op.coeff = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(u.size()),
                                         static_cast<Eigen::Index>(v.size()), c);
    op.domain = domain;
    op.left_support = support;
    return op;
}

// Splits a functional-rank-1 operator into factor lists: kernel = a(t) c(s).
// The coefficient matrix must have numerical rank <= 1.
void split_rank_one(const SeparableOperator& op, AtomList& t_side, AtomList& s_side) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(op.coeff,
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv.size() > 1 && sv(1) > 1e-12 * sv(0))
        throw ArgumentError("check_rank_one requires one-term (rank-1) kernels");
    const double s0 = sv(0);
    t_side.clear();
    s_side.clear();
    for (size_t i = 0; i < op.left.size(); ++i) {
        FunctionAtom a = op.left[i];
        a.scale *= s0 * svd.matrixU()(static_cast<Eigen::Index>(i), 0);
        t_side.push_back(a);
    }
    for (size_t j = 0; j < op.right.size(); ++j) {
        FunctionAtom cat = op.right[j];
        cat.scale *= svd.matrixV()(static_cast<Eigen::Index>(j), 0);
        s_side.push_back(cat);
    }
}

} // namespace

CovarianceReport check_rank_one(const SeparableOperator& A, const SeparableOperator& B,
                                const Polynomial& F, double tol,
                                const PairingConfig& cfg) {
    if (!(tol > 0.0)) throw ArgumentError("check_rank_one requires tol > 0");
    A.validate();
    B.validate();
    AtomList a, c, b, e;
    split_rank_one(A, a, c);
    split_rank_one(B, b, e);

    const Interval X = hull(A.left_support, B.left_support);
    const std::optional<Interval> G = intersect(A.domain, B.domain);
    const double d0 = F.at(0);

    const double q_ac = pair_lists(a, c, A.domain, cfg);
    const double q_ae = pair_lists(a, e, B.domain, cfg);
    double k1 = 0.0;
    for (int j = 1; j <= F.degree(); ++j)
        k1 += F.at(j) * std::pow(q_ac, j - 1) * q_ae;
    const double k2 = pair_lists(b, c, A.domain, cfg);

    CovarianceReport rep;
    rep.method = CovarianceReport::Method::rank_one;
    rep.tolerance_used = tol;

    // residual kernels of the three conditions, reported like check_covariance
    KernelSum cond1;   // [k2 a - d0 b] (x) e - k1 b (x) c
    cond1.terms.push_back({+1, product_kernel(a, e, k2, B.domain, A.left_support)});
    cond1.terms.push_back({-1, product_kernel(b, e, d0, B.domain, B.left_support)});
    cond1.terms.push_back({-1, product_kernel(b, c, k1, A.domain, B.left_support)});
    KernelSum cond2;   // k1 b (x) c on G_A \ G
    cond2.terms.push_back({+1, product_kernel(b, c, k1, A.domain, B.left_support)});
    KernelSum cond3;   // [k2 a - d0 b] (x) e on G_B \ G
    cond3.terms.push_back({+1, product_kernel(a, e, k2, B.domain, A.left_support)});
    cond3.terms.push_back({-1, product_kernel(b, e, d0, B.domain, B.left_support)});

    rep.scale = kernel_scale(cond1);
    const double bound = tol * (1.0 + rep.scale);

    RegionResidual r1, r2, r3;
    if (G) r1 = region_residual(cond1, X, {*G}, cfg);
    if (!(A.domain == B.domain)) {
        const auto piecesA = G ? subtract(A.domain, *G) : std::vector<Interval>{A.domain};
        const auto piecesB = G ? subtract(B.domain, *G) : std::vector<Interval>{B.domain};
        r2 = region_residual(cond2, X, piecesA, cfg);
        r3 = region_residual(cond3, X, piecesB, cfg);
    }
    rep.residual_on_G = r1.norm;
    rep.residual_on_GA_minus_G = r2.norm;
    rep.residual_on_GB_minus_G = r3.norm;

    // verdict through the corollary's branch structure
    const AtomList one = {make_constant(1.0)};
    const double b_norm = list_l2(b, X, cfg);
    const double e_norm_gb = list_l2(e, B.domain, cfg);
    bool cond1_ok;
    if (!G || G->degenerate()) {
        cond1_ok = true;
    } else if (b_norm * e_norm_gb <= tol * (1.0 + rep.scale)) {
        cond1_ok = true;  // B is (numerically) the zero operator
    } else {
        const double e_norm_g = list_l2(e, *G, cfg);
        const double c_norm_g = list_l2(c, *G, cfg);
        if (std::fabs(k2) > tol * (1.0 + rep.scale)) {
            if (e_norm_g <= tol * (1.0 + rep.scale)) {
                // e vanishes on G: condition 1 degenerates to k1 b (x) c = 0 there
                cond1_ok = std::fabs(k1) * b_norm * c_norm_g <= bound;
            } else {
                // lambda-ratio branch: k1 c = lambda e on G, k2 a = (d0+lambda) b on X
                const double lam =
                    k1 * pair_lists(c, e, *G, cfg) / pair_lists(e, e, *G, cfg);
                KernelSum s_side, t_side;
                s_side.terms.push_back({+1, product_kernel(one, c, k1, *G, X)});
                s_side.terms.push_back({-1, product_kernel(one, e, lam, *G, X)});
                t_side.terms.push_back({+1, product_kernel(a, one, k2, *G, X)});
                t_side.terms.push_back({-1, product_kernel(b, one, d0 + lam, *G, X)});
                const double rs = clamp_sqrt(kernel_l2_norm_sq(s_side, X, *G, cfg));
                const double rt = clamp_sqrt(kernel_l2_norm_sq(t_side, X, *G, cfg));
                cond1_ok = rs <= bound && rt <= bound;
            }
        } else {
            // k2 = 0 branch: k1 c(s) = -d0 e(s) on G
            KernelSum s_side;
            s_side.terms.push_back({+1, product_kernel(one, c, k1, *G, X)});
            s_side.terms.push_back({+1, product_kernel(one, e, d0, *G, X)});
            cond1_ok = clamp_sqrt(kernel_l2_norm_sq(s_side, X, *G, cfg)) <= bound;
        }
    }
    const bool cond2_ok = r2.norm <= bound;
    const bool cond3_ok = r3.norm <= bound;
    rep.holds = cond1_ok && cond2_ok && cond3_ok;
    rep.violated_condition = !cond1_ok ? 1 : (!cond2_ok ? 2 : (!cond3_ok ? 3 : 0));
    return rep;
}

bool check_orthogonality_sufficient(const SeparableOperator& A, const SeparableOperator& B,
                                    int d, double tol, const PairingConfig& cfg) {
    if (!(tol > 0.0)) throw ArgumentError("check_orthogonality_sufficient requires tol > 0");
    if (d < 1) throw ArgumentError("monomial degree d must be >= 1");
    A.validate();
    B.validate();
    if (!(A.domain == B.domain))
        throw ArgumentError("orthogonality test requires G_A = G_B");
    const Interval& G = A.domain;

    const Eigen::MatrixXd Wab = gram_cross(A.right, B.left, G, cfg);
    const Eigen::MatrixXd Wba = gram_cross(B.right, A.left, G, cfg);

    double atom_scale = 0.0;
    for (const auto& at : A.right) atom_scale = std::max(atom_scale, at.sup_bound(G));
    for (const auto& at : A.left) atom_scale = std::max(atom_scale, at.sup_bound(G));
    for (const auto& at : B.right) atom_scale = std::max(atom_scale, at.sup_bound(G));
    for (const auto& at : B.left) atom_scale = std::max(atom_scale, at.sup_bound(G));
    const double bound = tol * (1.0 + atom_scale * atom_scale * G.measure());

    const bool ortho = Wab.cwiseAbs().maxCoeff() <= bound &&
                       Wba.cwiseAbs().maxCoeff() <= bound;
    if (!ortho) return false;

    // with vanishing cross Grams both compositions must be kernel-zero
    const Interval X = hull(A.left_support, B.left_support);
    const SeparableOperator AB = compose(A, B, cfg);
    const SeparableOperator BAd = compose(B, power(A, d, cfg), cfg);
    const double guard =
        std::max(tol, 1e-10) * (1.0 + kernel_scale(A) + kernel_scale(B));
    if (clamp_sqrt(kernel_l2_norm_sq(AB, X, G, cfg)) > guard ||
        clamp_sqrt(kernel_l2_norm_sq(BAd, X, G, cfg)) > guard) {
        std::ostringstream oss;
        oss << "orthogonal cross pairings but nonzero composition; AB norm "
            << clamp_sqrt(kernel_l2_norm_sq(AB, X, G, cfg));
        throw NumericalError(oss.str());
    }
    return true;
}

namespace {

// Canonical form of a four-term common-frequency trig operator:
// theta[0] sin x cos + theta[1] cos x cos + theta[2] sin x sin + theta[3] cos x sin.
struct TrigFour {
    double theta[4] = {0, 0, 0, 0};
    double omega = 0.0;
};

bool same_restriction(const std::optional<Interval>& a, const std::optional<Interval>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || *a == *b;
}

std::optional<TrigFour> extract_trig_four(const SeparableOperator& op) {
    TrigFour out;
    bool have_omega = false;
    auto classify = [&](const FunctionAtom& at, bool& is_sin, double& sign) -> bool {
        if (at.kind == FunctionAtom::Kind::sin) {
            is_sin = true;
        } else if (at.kind == FunctionAtom::Kind::cos) {
            is_sin = false;
        } else {
            return false;
        }
        double w = at.omega;
        sign = at.scale;
        if (w < 0.0) {    // sin(-w t) = -sin(w t), cos(-w t) = cos(w t)
            w = -w;
            if (is_sin) sign = -sign;
        }
        if (w == 0.0) return false;
        if (!have_omega) {
            out.omega = w;
            have_omega = true;
        } else if (std::fabs(w - out.omega) > 1e-12 * (1.0 + out.omega)) {
            return false;
        }
        return true;
    };

    for (Eigen::Index i = 0; i < op.coeff.rows(); ++i) {
        for (Eigen::Index j = 0; j < op.coeff.cols(); ++j) {
            const double cval = op.coeff(i, j);
            if (cval == 0.0) continue;
            bool lsin = false, rsin = false;
            double lsign = 1.0, rsign = 1.0;
            if (!classify(op.left[static_cast<size_t>(i)], lsin, lsign)) return std::nullopt;
            if (!classify(op.right[static_cast<size_t>(j)], rsin, rsign)) return std::nullopt;
            const int slot = lsin ? (rsin ? 2 : 0) : (rsin ? 3 : 1);
            out.theta[slot] += cval * lsign * rsign;
        }
    }
    return have_omega ? std::optional<TrigFour>(out) : std::nullopt;
}

} // namespace

CovarianceReport check_commutativity(const SeparableOperator& A, const SeparableOperator& B,
                                     double tol, const PairingConfig& cfg) {
    CovarianceReport rep = check_covariance(A, B, Polynomial({0.0, 1.0}), tol, cfg);
    rep.method = CovarianceReport::Method::commutativity;

    if (!(A.domain == B.domain)) return rep;
    const auto ta = extract_trig_four(A);
    const auto tb = extract_trig_four(B);
    if (!ta || !tb) return rep;
    if (std::fabs(ta->omega - tb->omega) > 1e-12 * (1.0 + ta->omega)) return rep;
    // the closed-form criterion assumes one shared t-indicator and bare s-atoms
    const std::optional<Interval>& lr = A.left.front().restriction;
    for (const auto& at : A.left)
        if (!same_restriction(at.restriction, lr)) return rep;
    for (const auto& at : B.left)
        if (!same_restriction(at.restriction, lr)) return rep;
    for (const auto& at : A.right)
        if (at.restriction && !(intersect(*at.restriction, A.domain) &&
                                *intersect(*at.restriction, A.domain) == A.domain))
            return rep;
    for (const auto& at : B.right)
        if (at.restriction && !(intersect(*at.restriction, B.domain) &&
                                *intersect(*at.restriction, B.domain) == B.domain))
            return rep;

    const double w = ta->omega;
    const Interval& G = A.domain;
    const double sc = pair(make_sin(w), make_cos(w), G, cfg);
    if (std::fabs(sc) > 1e-10 * (1.0 + G.measure())) return rep;  // not the orthogonal family
    const double s1 = sigma1(w, G.lo, G.hi);
    const double s2 = sigma2(w, G.lo, G.hi);
    if (s1 == 0.0 || s2 == 0.0) return rep;   // criterion needs sigma1, sigma2 nonzero

    const double* p = ta->theta;
    const double* q = tb->theta;
    // commutator coefficients in the S/C product basis
    const double c_sc = p[2] * q[0] * s1 - q[2] * p[0] * s1 + p[0] * q[1] * s2 - q[0] * p[1] * s2;
    const double c_cc = (q[0] * p[3] - p[0] * q[3]) * s1;
    const double c_ss = (p[0] * q[3] - q[0] * p[3]) * s2;
    const double c_cs = p[3] * q[2] * s1 - q[3] * p[2] * s1 + p[1] * q[3] * s2 - q[1] * p[3] * s2;

    double th_scale = 0.0;
    for (int i = 0; i < 4; ++i)
        th_scale = std::max({th_scale, std::fabs(p[i]), std::fabs(q[i])});
    const double bound = std::max(tol, 1e-10) * (1.0 + th_scale * th_scale * (s1 + s2));
    const bool criterion = std::fabs(c_sc) <= bound && std::fabs(c_cc) <= bound &&
                           std::fabs(c_ss) <= bound && std::fabs(c_cs) <= bound;
    if (criterion != rep.holds) {
        std::ostringstream oss;
        oss << "trig commutativity criterion (" << (criterion ? "commute" : "no")
            << ") disagrees with the residual verdict (" << (rep.holds ? "commute" : "no")
            << ")";
        throw NumericalError(oss.str());
    }
    return rep;
}

} // namespace sepkern
