#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

using namespace sepkern;

TEST_CASE("atom evaluation") {
    const Interval unit(0.0, 1.0);
    CHECK(make_constant(1.0, unit).eval(0.5) == 1.0);

    // a_1(t) = I_[a,b](t) (-6 t) at t = 1
    const FunctionAtom a1 = make_monomial(1, -6.0, Interval(-0.5, 1.5));
    CHECK(a1.eval(1.0) == -6.0);
    CHECK(a1.eval(2.0) == 0.0);  // outside the indicator

    // e_1(s) = 1/s on [1,2]
    const FunctionAtom e1 = make_laurent(1, 1.0, Interval(1.0, 2.0));
    CHECK(e1.eval(2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(e1.eval(0.5) == 0.0);
    CHECK_THROWS_AS(e1.eval(0.0), DomainError);

    CHECK_THROWS_AS(make_laurent(1, 1.0, Interval(-1.0, 1.0)), ArgumentError);
    CHECK_THROWS_AS(make_monomial(-1, 1.0), ArgumentError);
}

TEST_CASE("pairing closed forms reproduce the worked projection values") {
    const Interval G(0.0, 1.0);
    const Interval support(-0.5, 1.5);
    // a1 = I(t)(-6t), a2 = I(t) 12 t^2; e1 = 4s-3, e2 = 3s-2 as atom lists
    const std::vector<FunctionAtom> m_a1 = {make_monomial(1, -6.0, support)};
    const std::vector<FunctionAtom> m_a2 = {make_monomial(2, 12.0, support)};
    const std::vector<FunctionAtom> m_e1 = {make_monomial(1, 4.0), make_constant(-3.0)};
    const std::vector<FunctionAtom> m_e2 = {make_monomial(1, 3.0), make_constant(-2.0)};

    CHECK(oracle::pair_lists(m_e1, m_a1, G) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(oracle::pair_lists(m_e1, m_a2, G) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(oracle::pair_lists(m_e2, m_a1, G) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(oracle::pair_lists(m_e2, m_a2, G) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("laurent and resonant trig pairings") {
    const Interval G12(1.0, 2.0);
    CHECK(pair(make_laurent(1, 1.0, G12), make_constant(1.0), G12) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-15));

    // sin x cos over one resonance window vanishes when (w/pi)(b-a) is integral
    CHECK(pair(make_sin(3.0 * M_PI), make_cos(3.0 * M_PI), Interval(0.0, 2.0)) ==
          doctest::Approx(0.0).epsilon(1e-14));
    // and when (w/pi)(b+a) is integral
    const double w = 10.0 * M_PI / 7.0;
    CHECK(pair(make_sin(w), make_cos(w), Interval(0.2, 0.5)) ==
          doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("pairing across empty effective domains and domain errors") {
    // disjoint restrictions: silently zero
    CHECK(pair(make_constant(1.0, Interval(0.0, 1.0)),
               make_constant(1.0, Interval(2.0, 3.0)), Interval(0.0, 3.0)) == 0.0);
    // negative power across zero
    CHECK_THROWS_AS(pair(make_laurent(1, 1.0, Interval(0.5, 2.0)),
                         make_laurent(1, 1.0, Interval(-1.0, -0.25)), Interval(-2.0, 2.0)),
                    DomainError);
}

TEST_CASE("sigma closed forms") {
    CHECK(sigma1(0.0, 0.0, 1.0) == 0.0);
    CHECK(sigma2(0.0, 0.0, 1.0) == 1.0);

    // brute-force quadrature oracle for the derived values
    const double s1_pi = oracle::integrate(
        [](double s) { return std::sin(M_PI * s) * std::sin(M_PI * s); }, 0.0, 1.0);
    CHECK(sigma1(M_PI, 0.0, 1.0) == doctest::Approx(s1_pi).epsilon(1e-12));
    CHECK(sigma1(M_PI, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sigma1(2.0 * M_PI, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sigma2(M_PI, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sigma2(3.7, 0.4, 0.4) == 0.0);

    std::mt19937 rng(91);
    std::uniform_real_distribution<double> wd(-10.0, 10.0), xd(-5.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        const double w = wd(rng);
        double a = xd(rng), b = xd(rng);
        if (a > b) std::swap(a, b);
        // exact-as-computed complement identity
        CHECK(sigma1(w, a, b) + sigma2(w, a, b) == b - a);
    }
}

TEST_CASE("gauss-legendre quadrature") {
    const PairingConfig cfg;
    CHECK(quadrature([](double s) { return s; }, Interval(0.0, 1.0), cfg) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(quadrature([](double s) { return 1.0 / s; }, Interval(1.0, 2.0), cfg) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-13));
    const double s2 = quadrature(
        [](double s) { return std::sin(M_PI * s) * std::sin(M_PI * s); },
        Interval(0.0, 1.0), cfg);
    CHECK(s2 == doctest::Approx(sigma1(M_PI, 0.0, 1.0)).epsilon(1e-13));

    PairingConfig tiny;
    tiny.quad_nodes = 2;
    tiny.max_depth = 1;
    tiny.quad_tol = 1e-15;
    CHECK_THROWS_AS(quadrature([](double s) { return std::pow(s, 20); },
                               Interval(0.0, 1.0), tiny),
                    NumericalError);
}

TEST_CASE("pairing properties: symmetry, bilinearity, restriction, quadrature agreement") {
    std::mt19937 rng(425);
    std::uniform_real_distribution<double> xd(-5.0, 5.0);
    std::uniform_real_distribution<double> cd(-2.0, 2.0);
    PairingConfig quad_only;
    quad_only.method = PairingConfig::Method::quadrature_only;

    int closed_checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const FunctionAtom u = oracle::random_atom(rng);
        const FunctionAtom v = oracle::random_atom(rng);
        double lo = xd(rng), hi = xd(rng);
        if (lo > hi) std::swap(lo, hi);
        Interval G(lo, hi);
        if (u.kind == FunctionAtom::Kind::laurent || v.kind == FunctionAtom::Kind::laurent)
            G = Interval(0.5, 5.0);

        double p_uv = 0.0;
        try {
            p_uv = pair(u, v, G);
        } catch (const NumericalError&) {
            continue;  // wild mixed integrand; not part of the property
        }
        const double p_vu = pair(v, u, G);
        CHECK(std::fabs(p_uv - p_vu) <= 1e-12 * (1.0 + std::fabs(p_uv)));

        // restriction: explicit clipping of G changes nothing
        std::optional<Interval> eff(G);
        if (u.restriction) eff = intersect(*eff, *u.restriction);
        if (eff && v.restriction) eff = intersect(*eff, *v.restriction);
        const double clipped = eff ? pair(u, v, *eff) : 0.0;
        CHECK(std::fabs(p_uv - clipped) <= 1e-12 * (1.0 + std::fabs(p_uv)));

        // closed form against the quadrature path where a closed form exists
        const bool both_trig =
            (u.kind == FunctionAtom::Kind::constant || u.kind == FunctionAtom::Kind::sin ||
             u.kind == FunctionAtom::Kind::cos) &&
            (v.kind == FunctionAtom::Kind::constant || v.kind == FunctionAtom::Kind::sin ||
             v.kind == FunctionAtom::Kind::cos);
        const bool both_pow =
            (u.kind == FunctionAtom::Kind::constant ||
             u.kind == FunctionAtom::Kind::monomial ||
             u.kind == FunctionAtom::Kind::laurent) &&
            (v.kind == FunctionAtom::Kind::constant ||
             v.kind == FunctionAtom::Kind::monomial ||
             v.kind == FunctionAtom::Kind::laurent);
        if (both_trig || both_pow) {
            const double q = pair(u, v, G, quad_only);
            CHECK(std::fabs(p_uv - q) <= 1e-10 * (1.0 + std::fabs(p_uv)));
            ++closed_checked;
        }

        // bilinearity in the first slot
        const double alpha = cd(rng), beta = cd(rng);
        FunctionAtom w = u;
        w.scale *= beta;
        FunctionAtom ua = u;
        ua.scale *= alpha;
        const double lhs = pair(ua, v, G) + pair(w, v, G);
        CHECK(std::fabs(lhs - (alpha + beta) * p_uv) <=
              1e-12 * (1.0 + std::fabs(lhs) + std::fabs(p_uv)));
    }
    CHECK(closed_checked > 50);
}
