#include "families.hpp"

#include <algorithm>
#include <cmath>

#include "expr.hpp"
#include "families_data.hpp"

namespace sepkern {

namespace {

std::vector<Family> parse_registry(const std::string& text) {
    json doc = json::parse(text);
    if (!doc.contains("version") || doc["version"].get<int>() != 1)
        throw ParseError("family registry: unsupported version");
    std::vector<Family> out;
    for (const auto& jf : doc.at("families")) {
        Family f;
        f.id = jf.at("id").get<std::string>();
        f.description = jf.at("description").get<std::string>();
        f.kind = jf.at("kind").get<std::string>();
        f.geometry = jf.at("geometry");
        for (const auto& p : jf.at("free")) {
            Family::FreeParam fp;
            fp.name = p.at("name").get<std::string>();
            fp.nonzero = p.value("nonzero", false);
            f.free.push_back(std::move(fp));
        }
        for (const auto& p : jf.at("fixed"))
            f.fixed.push_back({p.at("name").get<std::string>(),
                               p.at("expr").get<std::string>()});
        if (jf.contains("constraints"))
            for (const auto& c : jf["constraints"])
                f.constraints.push_back(c.get<std::string>());
        const json& jc = jf.at("claims");
        f.claims.ba = jc.value("ba", "");
        f.claims.ab_zero = jc.value("ab_zero", false);
        if (jc.contains("commute_factors"))
            for (const auto& c : jc["commute_factors"])
                f.claims.commute_factors.push_back(c.get<std::string>());
        if (jc.contains("extra"))
            for (const auto& c : jc["extra"])
                f.claims.extra.push_back(c.get<std::string>());
        if (jc.contains("delta")) {
            f.claims.has_fixed_delta = true;
            f.claims.fixed_delta = jc["delta"].get<double>();
        }
        out.push_back(std::move(f));
    }
    return out;
}

double geom_number(const json& g, const char* key) {
    const json& v = g.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return eval_expr(v.get<std::string>(), {});
    throw ParseError(std::string("geometry field '") + key + "' must be number or expression");
}

struct TrigGeometry {
    double omega, alpha1, beta1, alpha, beta;
};

TrigGeometry trig_geometry(const json& g) {
    return {geom_number(g, "omega"), geom_number(g, "alpha1"), geom_number(g, "beta1"),
            geom_number(g, "alpha"), geom_number(g, "beta")};
}

SeparableOperator trig_case2_operator(const TrigGeometry& g, double t1, double t2,
                                      double t3, double t4) {
    const Interval support(g.alpha, g.beta);
    SeparableOperator op;
    op.left = {make_sin(g.omega, 1.0, support), make_cos(g.omega, 1.0, support)};
    op.right = {make_cos(g.omega), make_sin(g.omega)};
    op.coeff = Eigen::MatrixXd(2, 2);
    op.coeff << t1, t3, t2, t4;
    op.domain = Interval(g.alpha1, g.beta1);
    op.left_support = support;
    return op;
}

SeparableOperator trig_case1_operator(const json& g, double t1, double t2, double t3,
                                      double t4) {
    const Interval support(geom_number(g, "alpha"), geom_number(g, "beta"));
    const Interval domain(geom_number(g, "alpha1"), geom_number(g, "beta1"));
    const auto m = g.at("m").get<std::vector<double>>();
    const auto k = g.at("k").get<std::vector<double>>();
    if (m.size() != 4 || k.size() != 4)
        throw ParseError("case-1 geometry needs 4 left and 4 right frequencies");
    SeparableOperator op;
    op.left = {make_sin(2 * M_PI * m[0], 1.0, support), make_cos(2 * M_PI * m[1], 1.0, support),
               make_sin(2 * M_PI * m[2], 1.0, support), make_cos(2 * M_PI * m[3], 1.0, support)};
    op.right = {make_cos(2 * M_PI * k[0]), make_cos(2 * M_PI * k[1]),
                make_sin(2 * M_PI * k[2]), make_sin(2 * M_PI * k[3])};
    op.coeff = Eigen::Vector4d(t1, t2, t3, t4).asDiagonal();
    op.domain = domain;
    op.left_support = support;
    return op;
}

} // namespace

const std::vector<Family>& family_registry() {
    static const std::vector<Family> reg = parse_registry(kFamiliesJson);
    return reg;
}

const Family& family_by_id(const std::string& id) {
    for (const auto& f : family_registry())
        if (f.id == id) return f;
    throw ArgumentError("unknown family id '" + id + "'");
}

std::vector<std::pair<std::string, std::string>> list_families() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& f : family_registry()) out.emplace_back(f.id, f.description);
    std::sort(out.begin(), out.end());
    return out;
}

FamilyInstance instantiate_family(const std::string& id, const std::vector<double>& params) {
    const Family& fam = family_by_id(id);
    if (params.size() != fam.free.size())
        throw ArgumentError("family '" + id + "' expects " +
                            std::to_string(fam.free.size()) + " free parameters");

    std::map<std::string, double> env;
    if (fam.kind == "trig_case2") {
        const TrigGeometry g = trig_geometry(fam.geometry);
        env["sigma1"] = sigma1(g.omega, g.alpha1, g.beta1);
        env["sigma2"] = sigma2(g.omega, g.alpha1, g.beta1);
    } else if (fam.kind == "trig_case1") {
        const auto m = fam.geometry.at("m").get<std::vector<double>>();
        const double a1 = geom_number(fam.geometry, "alpha1");
        const double b1 = geom_number(fam.geometry, "beta1");
        env["sigma1"] = sigma1(2 * M_PI * m[2], a1, b1);
        env["sigma2"] = sigma2(2 * M_PI * m[1], a1, b1);
    }
    for (size_t i = 0; i < fam.free.size(); ++i) env[fam.free[i].name] = params[i];
    for (const auto& fx : fam.fixed) env[fx.name] = eval_expr(fx.expr, env);
    for (const auto& c : fam.constraints)
        if (std::fabs(eval_expr(c, env)) < 1e-6)
            throw ArgumentError("family '" + id + "': parameters violate constraint '" + c +
                                "'");

    FamilyInstance inst;
    inst.env = env;
    if (fam.kind == "trig_case2") {
        const TrigGeometry g = trig_geometry(fam.geometry);
        inst.A = trig_case2_operator(g, env.at("tA1"), env.at("tA2"), env.at("tA3"),
                                     env.at("tA4"));
        inst.B = trig_case2_operator(g, env.at("tB1"), env.at("tB2"), env.at("tB3"),
                                     env.at("tB4"));
        inst.F = Polynomial({0.0, 0.0, env.at("delta")});
    } else if (fam.kind == "trig_case1") {
        inst.A = trig_case1_operator(fam.geometry, env.at("tA1"), env.at("tA2"),
                                     env.at("tA3"), env.at("tA4"));
        inst.B = trig_case1_operator(fam.geometry, env.at("tB1"), env.at("tB2"),
                                     env.at("tB3"), env.at("tB4"));
        inst.F = Polynomial({0.0, 0.0, env.at("delta")});
    } else if (fam.kind == "laurent") {
        const Interval support(geom_number(fam.geometry, "alpha"),
                               geom_number(fam.geometry, "beta"));
        const Interval domain(geom_number(fam.geometry, "a1"),
                              geom_number(fam.geometry, "b1"));
        SeparableOperator A;
        A.left = {make_constant(1.0, support), make_laurent(1, 1.0, support)};
        A.right = {make_constant(1.0), make_laurent(1, 1.0, domain)};
        A.coeff = Eigen::MatrixXd(2, 2);
        A.coeff << env.at("gA0"), env.at("gA1"), env.at("gA2"), env.at("gA3");
        A.domain = domain;
        A.left_support = support;
        SeparableOperator B;
        B.left = A.left;
        B.right = {make_laurent(1, 1.0, domain), make_constant(1.0)};
        B.coeff = Eigen::MatrixXd(2, 2);
        B.coeff << env.at("gB1"), 0.0, 0.0, env.at("gB2");
        B.domain = domain;
        B.left_support = support;
        inst.A = A;
        inst.B = B;
        inst.F = Polynomial({0.0, 0.0, env.at("delta")});
    } else if (fam.kind == "poly_projection") {
        const Interval support(geom_number(fam.geometry, "alpha"),
                               geom_number(fam.geometry, "beta"));
        const Interval domain(geom_number(fam.geometry, "a1"),
                              geom_number(fam.geometry, "b1"));
        // kernel I(t)(-6t (4s-3) + 12 t^2 (3s-2)) in the monomial basis
        SeparableOperator A;
        A.left = {make_monomial(1, 1.0, support), make_monomial(2, 1.0, support)};
        A.right = {make_monomial(1), make_constant(1.0)};
        A.coeff = Eigen::MatrixXd(2, 2);
        A.coeff << -24.0, 18.0, 36.0, -24.0;
        A.domain = domain;
        A.left_support = support;
        inst.A = A;
        inst.B = scaled(A, -1.0);
        const double d = fam.claims.has_fixed_delta ? fam.claims.fixed_delta : 1.0;
        inst.F = Polynomial({0.0, 0.0, d});
        inst.env["delta"] = d;
    } else {
        throw ParseError("family '" + id + "': unknown kind '" + fam.kind + "'");
    }
    return inst;
}

std::vector<double> draw_family_params(const Family& fam, std::mt19937& rng) {
    std::uniform_real_distribution<double> any(-1.5, 1.5);
    std::uniform_real_distribution<double> mag(0.35, 1.5);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<double> params;
        params.reserve(fam.free.size());
        for (const auto& p : fam.free)
            params.push_back(p.nonzero ? (coin(rng) ? 1.0 : -1.0) * mag(rng) : any(rng));
        try {
            instantiate_family(fam.id, params);  // constraint check
            return params;
        } catch (const ArgumentError&) {
            continue;
        }
    }
    throw NumericalError("could not draw parameters satisfying constraints for family '" +
                         fam.id + "'");
}

std::map<std::string, double> family_extra_residuals(const FamilyInstance& inst,
                                                     const Family& fam,
                                                     const PairingConfig& cfg) {
    std::map<std::string, double> out;
    const Interval X = hull(inst.A.left_support, inst.B.left_support);
    const auto G = intersect(inst.A.domain, inst.B.domain);
    if (!G) return out;
    auto norm_of = [&](const KernelSum& K) {
        return std::sqrt(std::max(kernel_l2_norm_sq(K, X, *G, cfg), 0.0));
    };
    auto single = [&](const SeparableOperator& op) {
        KernelSum K;
        K.terms.push_back({+1, op});
        return norm_of(K);
    };

    const SeparableOperator AB = compose(inst.A, inst.B, cfg);
    const SeparableOperator BA = compose(inst.B, inst.A, cfg);
    if (fam.claims.ba == "equal" || !fam.claims.commute_factors.empty() ||
        fam.claims.ba == "zero") {
        KernelSum K;
        K.terms = {{+1, AB}, {-1, BA}};
        out["commutator"] = norm_of(K);
    }
    if (fam.claims.ba == "zero") {
        out["AB"] = single(AB);
        out["BA"] = single(BA);
    }
    if (fam.claims.ab_zero) {
        out["AB"] = single(AB);
        const double d = inst.F.at(inst.F.degree());
        out["dBA2"] = single(scaled(compose(inst.B, power(inst.A, 2, cfg), cfg), d));
    }
    for (const auto& ex : fam.claims.extra) {
        if (ex == "A2=A") {
            KernelSum K;
            K.terms = {{+1, power(inst.A, 2, cfg)}, {-1, inst.A}};
            out["A2-A"] = norm_of(K);
        } else if (ex == "AB=-A") {
            KernelSum K;
            K.terms = {{+1, AB}, {+1, inst.A}};
            out["AB+A"] = norm_of(K);
        } else {
            throw ParseError("unknown extra identity '" + ex + "' in family '" + fam.id +
                             "'");
        }
    }
    return out;
}

CovarianceReport verify_family(const std::string& id, const std::vector<double>& params,
                               double tol, const PairingConfig& cfg) {
    const Family& fam = family_by_id(id);
    const FamilyInstance inst = instantiate_family(id, params);
    CovarianceReport rep = check_covariance(inst.A, inst.B, inst.F, tol, cfg);

    const double bound = tol * (1.0 + rep.scale);
    const auto extras = family_extra_residuals(inst, fam, cfg);
    bool extras_ok = true;
    if (fam.claims.ba == "equal") extras_ok &= extras.at("commutator") <= bound;
    if (fam.claims.ba == "zero")
        extras_ok &= extras.at("AB") <= bound && extras.at("BA") <= bound;
    if (fam.claims.ab_zero)
        extras_ok &= extras.at("AB") <= bound && extras.at("dBA2") <= bound;
    for (const auto& [key, value] : extras)
        if (key == "A2-A" || key == "AB+A") extras_ok &= value <= bound;
    if (!fam.claims.commute_factors.empty()) {
        double pscale = 0.0;
        for (const auto& [k, v] : inst.env) pscale = std::max(pscale, std::fabs(v));
        bool predicted = false;
        for (const auto& fx : fam.claims.commute_factors)
            predicted = predicted ||
                        std::fabs(eval_expr(fx, inst.env)) <= 1e-10 * (1.0 + pscale);
        const bool actual = extras.at("commutator") <= bound;
        extras_ok &= (predicted == actual);
    }
    rep.holds = rep.holds && extras_ok;
    return rep;
}

} // namespace sepkern
