#include "solver.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace sepkern {

void ParamOperator::validate() const {
    if (left.empty() || right.empty())
        throw ArgumentError("parametric operator needs at least one atom per side");
    if (coeff.size() != left.size())
        throw ArgumentError("parametric coefficient rows do not match left atoms");
    for (const auto& row : coeff)
        if (row.size() != right.size())
            throw ArgumentError("parametric coefficient cols do not match right atoms");
    const int k = static_cast<int>(param_names.size());
    for (const auto& row : coeff)
        for (const auto& e : row)
            for (const auto& [idx, slope] : e.terms) {
                if (idx < 0 || idx >= k)
                    throw ArgumentError("parameter index out of range in template");
                if (!std::isfinite(slope) || !std::isfinite(e.constant))
                    throw ArgumentError("template entries must be finite");
            }
    for (const auto& a : left) a.validate();
    for (const auto& a : right) a.validate();
}

bool ParamOperator::homogeneous() const {
    for (const auto& row : coeff)
        for (const auto& e : row)
            if (e.constant != 0.0) return false;
    return true;
}

SeparableOperator ParamOperator::instantiate(const std::vector<double>& theta) const {
    validate();
    if (theta.size() != param_names.size())
        throw ArgumentError("parameter vector length does not match the template");
    SeparableOperator op;
    op.left = left;
    op.right = right;
    op.domain = domain;
    op.left_support = left_support;
    op.coeff = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(left.size()),
                                     static_cast<Eigen::Index>(right.size()));
    for (size_t i = 0; i < coeff.size(); ++i)
        for (size_t j = 0; j < coeff[i].size(); ++j) {
            double v = coeff[i][j].constant;
            for (const auto& [idx, slope] : coeff[i][j].terms)
                v += slope * theta[static_cast<size_t>(idx)];
            op.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    return op;
}

namespace {

// ---- residual projection machinery shared by the linear and nonlinear solvers ----

std::string atom_label(const FunctionAtom& a) {
    std::ostringstream oss;
    switch (a.kind) {
    case FunctionAtom::Kind::constant: oss << "1"; break;
    case FunctionAtom::Kind::sin:      oss << "sin(" << a.omega << "t)"; break;
    case FunctionAtom::Kind::cos:      oss << "cos(" << a.omega << "t)"; break;
    case FunctionAtom::Kind::monomial: oss << "t^" << a.exponent; break;
    case FunctionAtom::Kind::laurent:  oss << "t^-" << a.exponent; break;
    }
    return oss.str();
}

struct Product {
    FunctionAtom lt, rt;  // unit-scale canonical atoms
};

struct ProductBasis {
    std::vector<Product> products;
    // orthogonalized basis vectors as combinations of products: beta_a = sum_c g(a,c) p_c
    Eigen::MatrixXd gs;          // rows: basis vectors, cols: products
    Eigen::VectorXd norm_sq;     // |beta_a|^2
    Eigen::MatrixXd prod_gram;   // <p_c, p_d>
    std::vector<int> leading;    // index of the product each basis vector started from
};

int find_or_add_product(std::vector<Product>& ps, const FunctionAtom& lt,
                        const FunctionAtom& rt) {
    for (size_t i = 0; i < ps.size(); ++i)
        if (same_atom(ps[i].lt, lt) && same_atom(ps[i].rt, rt)) return static_cast<int>(i);
    ps.push_back({lt, rt});
    return static_cast<int>(ps.size()) - 1;
}

// Coefficients of a KernelSum in a product list (products must cover the sum).
Eigen::VectorXd expand_in_products(const KernelSum& K, std::vector<Product>& ps,
                                   bool allow_grow) {
    std::vector<double> coef(ps.size(), 0.0);
    for (const auto& term : K.terms) {
        for (Eigen::Index i = 0; i < term.op.coeff.rows(); ++i) {
            const CanonicalAtom cl = canonicalize(term.op.left[static_cast<size_t>(i)]);
            if (zero_function(cl.atom)) continue;
            for (Eigen::Index j = 0; j < term.op.coeff.cols(); ++j) {
                const double v = term.op.coeff(i, j);
                const CanonicalAtom cr = canonicalize(term.op.right[static_cast<size_t>(j)]);
                if (zero_function(cr.atom)) continue;
                int idx;
                if (allow_grow) {
                    idx = find_or_add_product(ps, cl.atom, cr.atom);
                    if (idx >= static_cast<int>(coef.size())) coef.resize(ps.size(), 0.0);
                } else {
                    idx = find_or_add_product(ps, cl.atom, cr.atom);
                    if (idx >= static_cast<int>(coef.size()))
                        throw NumericalError("residual product missing from the fixed basis");
                }
                coef[static_cast<size_t>(idx)] += term.sign * v * cl.factor * cr.factor;
            }
        }
    }
    coef.resize(ps.size(), 0.0);
    return Eigen::Map<Eigen::VectorXd>(coef.data(), static_cast<Eigen::Index>(coef.size()));
}

// Gram-Schmidt over the collected products with the L2(X x region) inner product.
ProductBasis orthogonalize(std::vector<Product> products, const Interval& X,
                           const Interval& region, const PairingConfig& cfg) {
    ProductBasis basis;
    basis.products = std::move(products);
    const int m = static_cast<int>(basis.products.size());
    basis.prod_gram = Eigen::MatrixXd::Zero(m, m);
    for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d)
            basis.prod_gram(c, d) =
                pair(basis.products[static_cast<size_t>(c)].lt,
                     basis.products[static_cast<size_t>(d)].lt, X, cfg) *
                pair(basis.products[static_cast<size_t>(c)].rt,
                     basis.products[static_cast<size_t>(d)].rt, region, cfg);

    std::vector<Eigen::VectorXd> kept;
    std::vector<double> kept_norm;
    std::vector<int> leading;
    for (int c = 0; c < m; ++c) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
        v(c) = 1.0;
        const double self = basis.prod_gram(c, c);
        for (size_t a = 0; a < kept.size(); ++a) {
            const double proj = kept[a].dot(basis.prod_gram * v) / kept_norm[a];
            v -= proj * kept[a];
        }
        const double nsq = v.dot(basis.prod_gram * v);
        if (nsq <= std::max(1e-24, 1e-20 * std::fabs(self))) continue;  // dependent or null
        kept.push_back(v);
        kept_norm.push_back(nsq);
        leading.push_back(c);
    }
    basis.gs = Eigen::MatrixXd::Zero(static_cast<int>(kept.size()), m);
    basis.norm_sq = Eigen::VectorXd::Zero(static_cast<int>(kept.size()));
    for (size_t a = 0; a < kept.size(); ++a) {
        basis.gs.row(static_cast<Eigen::Index>(a)) = kept[a].transpose();
        basis.norm_sq(static_cast<Eigen::Index>(a)) = kept_norm[a];
    }
    basis.leading = std::move(leading);
    return basis;
}

// Projections of a kernel sum onto the orthogonalized basis (coefficients of
// the expansion; for orthogonal products this reads the raw coefficients).
Eigen::VectorXd project(const ProductBasis& basis, const Eigen::VectorXd& coef) {
    // <K, beta_a> / |beta_a|^2 with K = sum_c coef_c p_c
    Eigen::VectorXd inner = basis.gs * (basis.prod_gram * coef);
    return inner.cwiseQuotient(basis.norm_sq);
}

struct ResidualKernels {
    KernelSum on_G;         // AB - F(0) B - B o sep(F(A))
    KernelSum on_GA_diff;   // B o sep(F(A))
    KernelSum on_GB_diff;   // AB - F(0) B
};

ResidualKernels residual_kernels(const SeparableOperator& A, const SeparableOperator& B,
                                 const Polynomial& F, const PairingConfig& cfg) {
    const SeparableOperator AB = compose(A, B, cfg);
    const AffineOperator FA = poly_eval(F, A, cfg);
    const SeparableOperator BFs = compose(B, FA.sep, cfg);
    const SeparableOperator d0B = scaled(B, FA.scalar);
    ResidualKernels r;
    r.on_G.terms = {{+1, AB}, {-1, d0B}, {-1, BFs}};
    r.on_GA_diff.terms = {{+1, BFs}};
    r.on_GB_diff.terms = {{+1, AB}, {-1, d0B}};
    return r;
}

struct RegionSpec {
    Interval region;
    int which;  // 0: G, 1: GA\G, 2: GB\G
};

std::vector<RegionSpec> residual_regions(const Interval& GA, const Interval& GB) {
    std::vector<RegionSpec> out;
    const auto G = intersect(GA, GB);
    if (G && !G->degenerate()) out.push_back({*G, 0});
    if (!(GA == GB)) {
        const auto piecesA = G ? subtract(GA, *G) : std::vector<Interval>{GA};
        const auto piecesB = G ? subtract(GB, *G) : std::vector<Interval>{GB};
        for (const auto& p : piecesA)
            if (!p.degenerate()) out.push_back({p, 1});
        for (const auto& p : piecesB)
            if (!p.degenerate()) out.push_back({p, 2});
    }
    return out;
}

const KernelSum& pick(const ResidualKernels& r, int which) {
    switch (which) {
    case 0: return r.on_G;
    case 1: return r.on_GA_diff;
    default: return r.on_GB_diff;
    }
}

} // namespace

LinearSystem build_linear_system_for_B(const SeparableOperator& A, const Polynomial& F,
                                       const ParamOperator& B_template,
                                       const PairingConfig& cfg) {
    A.validate();
    B_template.validate();
    if (!B_template.homogeneous())
        throw ArgumentError("build_linear_system_for_B requires a homogeneous template");

    const int k = static_cast<int>(B_template.param_names.size());
    if (k == 0) throw ArgumentError("template has no parameters");

    // residual at each unit parameter vector; the residual is linear in theta
    std::vector<ResidualKernels> unit(static_cast<size_t>(k));
    for (int p = 0; p < k; ++p) {
        std::vector<double> theta(static_cast<size_t>(k), 0.0);
        theta[static_cast<size_t>(p)] = 1.0;
        unit[static_cast<size_t>(p)] =
            residual_kernels(A, B_template.instantiate(theta), F, cfg);
    }

    const SeparableOperator B0 =
        B_template.instantiate(std::vector<double>(static_cast<size_t>(k), 0.0));
    const Interval X = hull(A.left_support, B0.left_support);
    const auto regions = residual_regions(A.domain, B0.domain);

    std::vector<Eigen::VectorXd> rows;
    std::vector<LinearSystem::RowInfo> infos;
    for (const auto& spec : regions) {
        // products of this region's kernels across all unit directions
        std::vector<Product> products;
        std::vector<Eigen::VectorXd> coefs(static_cast<size_t>(k));
        for (int p = 0; p < k; ++p)
            coefs[static_cast<size_t>(p)] =
                expand_in_products(pick(unit[static_cast<size_t>(p)], spec.which),
                                   products, true);
        if (products.empty()) continue;
        const ProductBasis basis = orthogonalize(products, X, spec.region, cfg);
        if (basis.gs.rows() == 0) continue;
        Eigen::MatrixXd block(basis.gs.rows(), k);
        for (int p = 0; p < k; ++p) {
            Eigen::VectorXd c = coefs[static_cast<size_t>(p)];
            const Eigen::Index old = c.size();
            c.conservativeResize(static_cast<Eigen::Index>(products.size()));
            for (Eigen::Index i = old; i < c.size(); ++i) c(i) = 0.0;
            block.col(p) = project(basis, c);
        }
        std::ostringstream region_tag;
        region_tag << " @ [" << spec.region.lo << "," << spec.region.hi << "]";
        for (Eigen::Index r = 0; r < block.rows(); ++r) {
            rows.push_back(block.row(r));
            const Product& lead =
                products[static_cast<size_t>(basis.leading[static_cast<size_t>(r)])];
            LinearSystem::RowInfo info;
            info.left_atom = lead.lt;
            info.right_atom = lead.rt;
            info.region = spec.region;
            info.condition = spec.which + 1;
            info.label = atom_label(lead.lt) + " x " + atom_label(lead.rt) +
                         region_tag.str();
            infos.push_back(std::move(info));
        }
    }

    LinearSystem sys;
    if (rows.empty()) {
        // residual vanishes identically: every parameter vector solves
        sys.V = Eigen::MatrixXd::Zero(1, k);
        LinearSystem::RowInfo info;
        info.label = "0";
        sys.rows = {info};
        return sys;
    }
    sys.V = Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), k);
    for (size_t r = 0; r < rows.size(); ++r)
        sys.V.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    sys.rows = std::move(infos);
    return sys;
}

SolveResult nullspace(const Eigen::MatrixXd& V, double rank_tol) {
    if (V.rows() == 0 || V.cols() == 0) throw ArgumentError("nullspace of an empty matrix");
    if (!(rank_tol > 0.0)) throw ArgumentError("rank_tol must be > 0");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rank_tol * smax) ++rank;
    if (smax == 0.0) rank = 0;

    SolveResult out;
    out.kind = SolveResult::Kind::nullspace;
    out.nullspace_dim = static_cast<int>(V.cols()) - rank;
    const Eigen::MatrixXd& Vmat = svd.matrixV();
    for (int i = rank; i < static_cast<int>(V.cols()); ++i) {
        Eigen::VectorXd v = Vmat.col(i);
        out.vectors.emplace_back(v.data(), v.data() + v.size());
        out.residuals.push_back((V * v).norm());
    }
    return out;
}

Eigen::Matrix4d assemble_trig_V(const double t[4], double d, double s1, double s2) {
    Eigen::Matrix4d V;
    const double cross = d * t[2] * t[0] * s1 * s1 + d * t[0] * t[1] * s1 * s2;
    V << t[2] * s1 - d * t[3] * t[0] * s1 * s2 - d * t[1] * t[1] * s2 * s2, t[0] * s2,
         -cross, 0.0,
         t[3] * s1, t[1] * s2 - d * t[3] * t[0] * s1 * s2 - d * t[1] * t[1] * s2 * s2,
         0.0, -cross,
         -d * t[1] * t[3] * s2 * s2 - d * t[3] * t[2] * s1 * s2, 0.0,
         t[2] * s1 - d * t[2] * t[2] * s1 * s1 - d * t[3] * t[0] * s1 * s2, t[0] * s2,
         0.0, -d * t[3] * t[2] * s1 * s2 - d * t[1] * t[3] * s2 * s2,
         t[3] * s1, t[1] * s2 - d * t[2] * t[2] * s1 * s1 - d * t[3] * t[0] * s1 * s2;
    return V;
}

double detV_trig(const double thetaA[4], double delta, double sigma1, double sigma2) {
    return assemble_trig_V(thetaA, delta, sigma1, sigma2).determinant();
}

namespace {

// residual vector r(theta) for the nonlinear A-solve: projections of the
// residual kernels onto a theta-independent orthogonalized product basis.
struct NonlinearResidual {
    const SeparableOperator& B;
    const Polynomial& F;
    const ParamOperator& tmpl;
    const PairingConfig& cfg;
    Interval X;
    std::vector<RegionSpec> regions;
    std::vector<std::vector<Product>> products;   // per region
    std::vector<ProductBasis> bases;              // per region
    int dim = 0;

    NonlinearResidual(const SeparableOperator& B_, const Polynomial& F_,
                      const ParamOperator& tmpl_, const PairingConfig& cfg_)
        : B(B_), F(F_), tmpl(tmpl_), cfg(cfg_) {
        const SeparableOperator A1 = tmpl.instantiate(
            std::vector<double>(tmpl.param_names.size(), 1.0));
        X = hull(A1.left_support, B.left_support);
        regions = residual_regions(A1.domain, B.domain);
        // product structure is theta-independent: collect from a generic instance
        for (const auto& spec : regions) {
            std::vector<Product> ps;
            expand_in_products(pick(residual_kernels(A1, B, F, cfg), spec.which), ps, true);
            const ProductBasis basis = orthogonalize(ps, X, spec.region, cfg);
            dim += static_cast<int>(basis.gs.rows());
            products.push_back(std::move(ps));
            bases.push_back(basis);
        }
    }

    Eigen::VectorXd operator()(const Eigen::VectorXd& theta) const {
        const std::vector<double> tv(theta.data(), theta.data() + theta.size());
        const ResidualKernels rk = residual_kernels(tmpl.instantiate(tv), B, F, cfg);
        Eigen::VectorXd out(dim);
        Eigen::Index at = 0;
        for (size_t r = 0; r < regions.size(); ++r) {
            std::vector<Product> ps = products[r];
            Eigen::VectorXd coef = expand_in_products(pick(rk, regions[r].which), ps, false);
            coef.conservativeResize(static_cast<Eigen::Index>(ps.size()));
            const Eigen::VectorXd proj = project(bases[r], coef);
            out.segment(at, proj.size()) = proj;
            at += proj.size();
        }
        return out;
    }
};

std::vector<std::vector<double>> lattice_seeds(int k, double scale) {
    std::vector<std::vector<double>> out;
    if (k > 6) {
        out.push_back(std::vector<double>(static_cast<size_t>(k), 0.0));
        return out;
    }
    std::vector<int> idx(static_cast<size_t>(k), 0);
    const double vals[3] = {-scale, 0.0, scale};
    for (;;) {
        std::vector<double> s(static_cast<size_t>(k));
        for (int i = 0; i < k; ++i) s[static_cast<size_t>(i)] = vals[idx[static_cast<size_t>(i)]];
        out.push_back(std::move(s));
        int pos = 0;
        while (pos < k && ++idx[static_cast<size_t>(pos)] == 3) {
            idx[static_cast<size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == k) break;
    }
    return out;
}

} // namespace

SolveResult solve_for_A_given_B(const SeparableOperator& B, const Polynomial& F,
                                const ParamOperator& A_template,
                                const std::vector<std::vector<double>>& seeds, double tol,
                                const PairingConfig& cfg) {
    B.validate();
    A_template.validate();
    if (!(tol > 0.0)) throw ArgumentError("solver tolerance must be > 0");
    const int k = static_cast<int>(A_template.param_names.size());
    if (k == 0) throw ArgumentError("template has no parameters");

    NonlinearResidual resid(B, F, A_template, cfg);

    std::vector<std::vector<double>> all_seeds = seeds;
    const double lead = F.degree() >= 1 ? std::fabs(F.coeffs.back()) : 0.0;
    const double lat_scale = lead > 1e-12 ? 1.0 / lead : 1.0;
    for (auto& s : lattice_seeds(k, lat_scale)) all_seeds.push_back(std::move(s));

    SolveResult out;
    out.kind = SolveResult::Kind::roots;

    if (resid.dim == 0) {
        // residual is identically zero (e.g. B = 0): every seed is a solution
        for (const auto& s : all_seeds) {
            if (s.size() != static_cast<size_t>(k))
                throw ArgumentError("seed length does not match the template");
            bool dup = false;
            for (const auto& v : out.vectors) {
                double dist = 0.0;
                for (int i = 0; i < k; ++i)
                    dist += (v[static_cast<size_t>(i)] - s[static_cast<size_t>(i)]) *
                            (v[static_cast<size_t>(i)] - s[static_cast<size_t>(i)]);
                if (std::sqrt(dist) <= 1e-6) { dup = true; break; }
            }
            if (dup) continue;
            if (check_covariance(A_template.instantiate(s), B, F, 10.0 * tol, cfg).holds)
                out.vectors.push_back(s);
        }
        out.residuals.assign(out.vectors.size(), 0.0);
        return out;
    }

    for (const auto& seed : all_seeds) {
        if (seed.size() != static_cast<size_t>(k))
            throw ArgumentError("seed length does not match the template");
        Eigen::VectorXd theta =
            Eigen::Map<const Eigen::VectorXd>(seed.data(), static_cast<Eigen::Index>(k));
        Eigen::VectorXd r = resid(theta);
        bool converged = r.norm() < tol;
        for (int it = 0; it < 60 && !converged; ++it) {
            // forward-difference Jacobian
            Eigen::MatrixXd J(resid.dim, k);
            for (int i = 0; i < k; ++i) {
                const double h = 1e-6 * (1.0 + std::fabs(theta(i)));
                Eigen::VectorXd tp = theta;
                tp(i) += h;
                J.col(i) = (resid(tp) - r) / h;
            }
            const Eigen::VectorXd step = J.colPivHouseholderQr().solve(-r);
            if (!step.allFinite()) break;
            double lambda = 1.0;
            bool improved = false;
            for (int half = 0; half < 9; ++half, lambda *= 0.5) {
                const Eigen::VectorXd cand = theta + lambda * step;
                const Eigen::VectorXd rc = resid(cand);
                if (rc.norm() < r.norm() * (1.0 - 1e-4 * lambda) || rc.norm() < tol) {
                    theta = cand;
                    r = rc;
                    improved = true;
                    break;
                }
            }
            if (!improved) break;
            converged = r.norm() < tol;
        }
        if (!converged) continue;
        bool dup = false;
        for (const auto& v : out.vectors) {
            const Eigen::VectorXd prev =
                Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(k));
            if ((prev - theta).norm() <= 1e-6) { dup = true; break; }
        }
        if (dup) continue;
        const std::vector<double> tv(theta.data(), theta.data() + theta.size());
        if (!check_covariance(A_template.instantiate(tv), B, F, 10.0 * tol, cfg).holds)
            continue;
        out.vectors.push_back(tv);
        out.residuals.push_back(r.norm());
    }
    return out;
}

} // namespace sepkern
