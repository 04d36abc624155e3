#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "covariance.hpp"
#include "oracles.hpp"

using namespace sepkern;

namespace {

SeparableOperator rank1(const FunctionAtom& lt, const FunctionAtom& rt, double c,
                        const Interval& domain, const Interval& support) {
    SeparableOperator op;
    op.left = {lt};
    op.right = {rt};
    op.coeff = Eigen::MatrixXd::Constant(1, 1, c);
    op.domain = domain;
    op.left_support = support;
    return op;
}

// G_A = [0,1], G_B = [0,2]: condition 1 holds, condition 3 fails.
// a = b = 0.5 t on [0,2], c = e = 1 gives k1 = k2 = 1/4 with F(z) = z^2.
struct ThreeRegionFixture {
    SeparableOperator A, B;
    Polynomial F{std::vector<double>{0.0, 0.0, 1.0}};
    ThreeRegionFixture() {
        const Interval support(0.0, 2.0);
        A = rank1(make_monomial(1, 0.5, support), make_constant(1.0), 1.0,
                  Interval(0.0, 1.0), support);
        B = rank1(make_monomial(1, 0.5, support), make_constant(1.0), 1.0,
                  Interval(0.0, 2.0), support);
    }
};

} // namespace

TEST_CASE("check_covariance on the worked examples") {
    const SeparableOperator A = oracle::projection_A();
    const SeparableOperator B = oracle::projection_B();
    const Polynomial Fsq({0.0, 0.0, 1.0});

    const CovarianceReport ok = check_covariance(A, B, Fsq, 1e-10);
    CHECK(ok.holds);
    CHECK(ok.residual_on_G < 1e-10);
    CHECK(ok.residual_on_GA_minus_G == 0.0);  // G_A = G_B
    CHECK(ok.residual_on_GB_minus_G == 0.0);
    CHECK(ok.violated_condition == 0);

    // Laurent family with random coefficients
    const CovarianceReport lk = check_covariance(
        oracle::laurent_A(0.85), oracle::laurent_B(-1.2), Polynomial({0.0, 0.0, 0.6}),
        1e-10);
    CHECK(lk.holds);

    // perturbing one coefficient breaks the relation visibly
    SeparableOperator Ap = A;
    Ap.coeff(0, 0) += 0.1;
    const CovarianceReport bad = check_covariance(Ap, B, Fsq, 1e-10);
    CHECK_FALSE(bad.holds);
    CHECK(bad.residual_on_G > 1e-3);
    CHECK(bad.violated_condition == 1);

    CHECK_THROWS_AS(check_covariance(A, B, Fsq, 0.0), ArgumentError);
}

TEST_CASE("zero-operator reductions") {
    const SeparableOperator A = oracle::projection_A();
    const SeparableOperator Z = zero_like(A);

    // B = 0 satisfies the relation for every F
    for (const auto& coeffs :
         {std::vector<double>{0.0, 1.0}, {2.0, 0.0, 1.0}, {0.5}, {0.0, 0.0, 0.0, -3.0}})
        CHECK(check_covariance(A, Z, Polynomial(coeffs), 1e-10).holds);

    // A = 0: holds iff F(0) = 0 or B = 0
    CHECK(check_covariance(Z, A, Polynomial({0.0, 1.0, 2.0}), 1e-10).holds);
    CHECK_FALSE(check_covariance(Z, A, Polynomial({1.0, 1.0}), 1e-10).holds);
    CHECK(check_covariance(Z, Z, Polynomial({1.0, 1.0}), 1e-10).holds);
}

TEST_CASE("three-region attribution: condition 3 fires on G_B minus G") {
    const ThreeRegionFixture fx;
    const CovarianceReport r = check_covariance(fx.A, fx.B, fx.F, 1e-10);
    CHECK_FALSE(r.holds);
    CHECK(r.residual_on_G <= 1e-10 * (1.0 + r.scale));
    CHECK(r.residual_on_GA_minus_G == 0.0);  // G_A subset of G_B
    CHECK(r.residual_on_GB_minus_G > 1e-3);
    CHECK(r.violated_condition == 3);

    const CovarianceReport r1 = check_rank_one(fx.A, fx.B, fx.F, 1e-10);
    CHECK(r1.holds == r.holds);
    CHECK(r1.violated_condition == 3);
}

TEST_CASE("check_rank_one worked instances") {
    const Interval G(0.0, 1.0), support(-0.5, 1.5);
    const Polynomial Fsq({0.0, 0.0, 1.0});

    // first term of the projection pair: a = -6t I, c = 4s-3 against
    // b = 6t I, e = 4s-3. One-term kernels with a compound s-side factor,
    // hence a rank-1 coefficient matrix over {s, 1}.
    auto one_term = [&](double lscale) {
        SeparableOperator op;
        op.left = {make_monomial(1, lscale, support)};
        op.right = {make_monomial(1), make_constant(1.0)};
        op.coeff = Eigen::MatrixXd(1, 2);
        op.coeff << 4.0, -3.0;
        op.domain = G;
        op.left_support = support;
        return op;
    };
    const SeparableOperator A = one_term(-6.0);
    const SeparableOperator B = one_term(6.0);
    const CovarianceReport r = check_rank_one(A, B, Fsq, 1e-10);
    CHECK(r.holds);
    CHECK(check_covariance(A, B, Fsq, 1e-10).holds);

    // k1 = k2 = 0 with delta0 = 0: trivially holds (orthogonal frequencies)
    const Interval U(0.0, 1.0);
    const SeparableOperator OA = rank1(make_sin(2.0 * M_PI, 1.0, U), make_cos(2.0 * M_PI),
                                       1.3, U, U);
    const SeparableOperator OB = rank1(make_cos(4.0 * M_PI, 1.0, U), make_sin(4.0 * M_PI),
                                       -0.9, U, U);
    CHECK(check_rank_one(OA, OB, Fsq, 1e-10).holds);
    CHECK(check_covariance(OA, OB, Fsq, 1e-10).holds);

    // delta0 = 1 with e not proportional to -k1 c / delta0: fails by 1(a)(ii)
    const SeparableOperator KA = rank1(make_sin(2.0 * M_PI, 1.0, U), make_cos(2.0 * M_PI),
                                       1.0, U, U);
    const SeparableOperator KB = rank1(make_cos(4.0 * M_PI, 1.0, U), make_sin(4.0 * M_PI),
                                       1.0, U, U);
    const Polynomial Faff({1.0, 0.5});
    const CovarianceReport kr = check_rank_one(KA, KB, Faff, 1e-10);
    CHECK_FALSE(kr.holds);
    CHECK(kr.holds == check_covariance(KA, KB, Faff, 1e-10).holds);

    // the full projection pair has matrix rank 2: rejected
    CHECK_THROWS_AS(check_rank_one(oracle::projection_A(), oracle::projection_B(), Fsq,
                                   1e-10),
                    ArgumentError);
}

TEST_CASE("rank-one agreement on random instances") {
    std::mt19937 rng(20240601);
    std::uniform_real_distribution<double> cd(-1.5, 1.5);
    std::uniform_int_distribution<int> coin(0, 1);
    const Interval U(0.0, 1.0);

    int holds_count = 0;
    for (int trial = 0; trial < 200; ++trial) {
        SeparableOperator A, B;
        if (coin(rng)) {
            // arranged orthogonal instance (usually holds)
            A = rank1(make_sin(2.0 * M_PI, cd(rng), U), make_cos(2.0 * M_PI), 1.0, U, U);
            B = rank1(make_cos(4.0 * M_PI, cd(rng), U), make_sin(4.0 * M_PI), 1.0, U, U);
        } else {
            auto any_atom = [&](bool with_restr) {
                const int k = coin(rng) * 2 + coin(rng);
                std::optional<Interval> r =
                    with_restr ? std::optional<Interval>(U) : std::nullopt;
                switch (k) {
                case 0: return make_sin(2.0 * M_PI, cd(rng), r);
                case 1: return make_cos(2.0 * M_PI, cd(rng), r);
                case 2: return make_monomial(1, cd(rng), r);
                default: return make_constant(cd(rng), r);
                }
            };
            A = rank1(any_atom(true), any_atom(false), cd(rng), U, U);
            B = rank1(any_atom(true), any_atom(false), cd(rng), U, U);
        }
        const Polynomial F = coin(rng) ? Polynomial({0.0, 0.0, cd(rng)})
                                       : Polynomial({cd(rng), cd(rng)});
        const CovarianceReport r1 = check_rank_one(A, B, F, 1e-10);
        const CovarianceReport rg = check_covariance(A, B, F, 1e-10);
        CHECK(r1.holds == rg.holds);
        holds_count += r1.holds ? 1 : 0;
    }
    CHECK(holds_count > 10);          // both verdicts exercised
    CHECK(holds_count < 190);
}

TEST_CASE("orthogonality sufficiency") {
    // case-1 style operators with disjoint frequency pairings
    const Interval U(0.0, 1.0), support(-0.25, 1.25);
    SeparableOperator A, B;
    A.left = {make_sin(2.0 * M_PI, 1.0, support), make_cos(4.0 * M_PI, 1.0, support)};
    A.right = {make_cos(10.0 * M_PI), make_sin(6.0 * M_PI)};
    A.coeff = Eigen::MatrixXd(2, 2);
    A.coeff << 1.1, 0.0, 0.0, -0.4;
    A.domain = U;
    A.left_support = support;
    B = A;
    B.right = {make_cos(14.0 * M_PI), make_sin(16.0 * M_PI)};
    CHECK(check_orthogonality_sufficient(A, B, 2, 1e-10));
    // and then both compositions vanish
    CHECK(kernel_l2_norm_sq(compose(A, B), support, U) < 1e-20);
    CHECK(kernel_l2_norm_sq(compose(B, A), support, U) < 1e-20);

    // A = B with a unit self-pairing is not orthogonal
    const SeparableOperator S =
        rank1(make_sin(2.0 * M_PI, std::sqrt(2.0), U), make_sin(2.0 * M_PI, std::sqrt(2.0)),
              1.0, U, U);
    CHECK(pair(S.left[0], S.right[0], U) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK_FALSE(check_orthogonality_sufficient(S, S, 2, 1e-10));

    SeparableOperator D = S;
    D.domain = Interval(0.0, 2.0);
    CHECK_THROWS_AS(check_orthogonality_sufficient(S, D, 2, 1e-10), ArgumentError);
}

TEST_CASE("commutativity checker and the trig criterion") {
    const oracle::TrigGeom g = oracle::asym_geom();

    // theta_A4 theta_B1 != theta_B4 theta_A1 with sigma1, sigma2 != 0: no commute
    const SeparableOperator A = oracle::trig_operator(g, 1.0, 0.3, -0.7, 2.0);
    const SeparableOperator B = oracle::trig_operator(g, 0.5, 1.1, 0.4, 0.2);
    const CovarianceReport r = check_commutativity(A, B, 1e-10);
    CHECK_FALSE(r.holds);
    CHECK(r.method == CovarianceReport::Method::commutativity);

    CHECK(check_commutativity(A, A, 1e-10).holds);

    // a1zero-item13 family: A = tA4 cos x sin, B = tB2 cos x cos;
    // commute iff tA4 = 0 or tB2 = 0
    const SeparableOperator A13 = oracle::trig_operator(g, 0.0, 0.0, 0.0, 0.9);
    const SeparableOperator B13 = oracle::trig_operator(g, 0.0, 1.2, 0.0, 0.0);
    CHECK_FALSE(check_commutativity(A13, B13, 1e-10).holds);
    CHECK(check_commutativity(oracle::trig_operator(g, 0.0, 0.0, 0.0, 0.0), B13, 1e-10)
              .holds);
    CHECK(check_commutativity(A13, oracle::trig_operator(g, 0.0, 0.0, 0.0, 0.0), 1e-10)
              .holds);

    // criterion agrees with the residual verdict across random draws
    std::mt19937 rng(1618);
    std::uniform_real_distribution<double> cd(-1.2, 1.2);
    for (int trial = 0; trial < 50; ++trial) {
        const SeparableOperator RA =
            oracle::trig_operator(g, cd(rng), cd(rng), cd(rng), cd(rng));
        const SeparableOperator RB =
            oracle::trig_operator(g, cd(rng), cd(rng), cd(rng), cd(rng));
        CHECK_NOTHROW(check_commutativity(RA, RB, 1e-10));  // throws on disagreement
    }
}

TEST_CASE("region soundness: equal domains reduce to the single-region test") {
    std::mt19937 rng(88);
    std::uniform_real_distribution<double> cd(-1.2, 1.2);
    const oracle::TrigGeom g = oracle::sym_geom();
    for (int trial = 0; trial < 20; ++trial) {
        const SeparableOperator A =
            oracle::trig_operator(g, cd(rng), cd(rng), cd(rng), cd(rng));
        const SeparableOperator B =
            oracle::trig_operator(g, cd(rng), cd(rng), cd(rng), cd(rng));
        const Polynomial F({0.0, 0.0, cd(rng)});
        const CovarianceReport full = check_covariance(A, B, F, 1e-10);

        // single-region residual, assembled by hand
        const AffineOperator FA = poly_eval(F, A);
        KernelSum cond1;
        cond1.terms = {{+1, compose(A, B)}, {-1, scaled(B, FA.scalar)},
                       {-1, compose(B, FA.sep)}};
        const Interval X = hull(A.left_support, B.left_support);
        const double resid =
            std::sqrt(std::max(kernel_l2_norm_sq(cond1, X, A.domain), 0.0));
        const bool single = resid <= 1e-10 * (1.0 + kernel_scale(cond1));
        CHECK(full.holds == single);
    }
}
