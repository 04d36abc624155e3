#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "families.hpp"

using namespace sepkern;

TEST_CASE("registry listing is sorted and complete") {
    const auto listing = list_families();
    CHECK(listing.size() == family_registry().size());
    for (size_t i = 1; i < listing.size(); ++i) CHECK(listing[i - 1].first < listing[i].first);

    auto has = [&](const std::string& id) {
        for (const auto& [fid, d] : listing)
            if (fid == id) return true;
        return false;
    };
    for (int i = 1; i <= 9; ++i) CHECK(has("case1-item" + std::to_string(i)));
    for (int i = 1; i <= 8; ++i) CHECK(has("case2b-b3-2sigma-item" + std::to_string(i)));
    for (int i = 1; i <= 15; ++i) CHECK(has("case2b-a1zero-item" + std::to_string(i)));
    CHECK(has("laurent"));
    CHECK(has("example3-projection"));
    CHECK(has("case2a-item6-sub7"));

    CHECK_THROWS_AS(family_by_id("no-such-family"), ArgumentError);
    CHECK_THROWS_AS(verify_family("no-such-family", {}, 1e-10), ArgumentError);
}

TEST_CASE("every registered family verifies on seeded draws") {
    std::mt19937 rng(987654u);
    for (const auto& fam : family_registry()) {
        CAPTURE(fam.id);
        for (int draw = 0; draw < 5; ++draw) {
            const auto params = draw_family_params(fam, rng);
            const CovarianceReport rep = verify_family(fam.id, params, 1e-10);
            CAPTURE(draw);
            CAPTURE(rep.residual_on_G);
            CHECK(rep.holds);
        }
    }
}

TEST_CASE("family argument validation") {
    const Family& fam = family_by_id("case1-item9");
    CHECK_THROWS_AS(instantiate_family("case1-item9", {1.0}), ArgumentError);
    CHECK(fam.free.size() == 7);

    // constraint violation: case2a-item4-sub1 requires tA3 != 1/(delta sigma1)
    const Family& f4 = family_by_id("case2a-item4-sub1");
    REQUIRE(f4.free.size() == 4);  // tA1, tA3, tB2, delta
    const double s1 = sigma1(10.0 * M_PI / 7.0, 0.2, 0.5);
    const double delta = 1.0;
    CHECK_THROWS_AS(instantiate_family("case2a-item4-sub1",
                                       {0.5, 1.0 / (delta * s1), 0.7, delta}),
                    ArgumentError);
}

TEST_CASE("stated commutator criteria flip with the parameters") {
    // laurent: commute iff gA2 = 0 or gB2 = 0
    const Family& fam = family_by_id("laurent");
    REQUIRE(fam.free.size() == 3);  // gA2, gB2, delta
    CHECK(verify_family("laurent", {0.9, 0.7, 1.1}, 1e-10).holds);
    CHECK(verify_family("laurent", {0.0, 0.7, 1.1}, 1e-10).holds);
    CHECK(verify_family("laurent", {0.9, 0.0, 1.1}, 1e-10).holds);

    const FamilyInstance on = instantiate_family("laurent", {0.9, 0.7, 1.1});
    const auto extras = family_extra_residuals(on, fam);
    CHECK(extras.at("commutator") > 1e-3);  // genuinely non-commuting
    CHECK(extras.at("AB") < 1e-12);
    CHECK(extras.at("dBA2") < 1e-12);
}
