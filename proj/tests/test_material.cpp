#include <doctest.h>

#include <cmath>
#include <vector>

#include "fracsim/errors.hpp"
#include "fracsim/material.hpp"
#include "fracsim/mesh.hpp"

using namespace fracsim;

TEST_CASE("softening curve hits its tabulated breakpoints exactly") {
    const StepFunction sf = StepFunction::default_curve();
    CHECK(eval_step(sf, 0.0) == 1.0);
    CHECK(eval_step(sf, 2.0) == 1.0);
    CHECK(eval_step(sf, 2.2) == 0.96);
    CHECK(eval_step(sf, 2.3) == 0.85);
    CHECK(eval_step(sf, 2.4) == 0.5);
    CHECK(eval_step(sf, 2.5) == 0.2);
    CHECK(eval_step(sf, 2.6) == 0.1);
    CHECK(eval_step(sf, 2.8) == 0.05);
    CHECK(eval_step(sf, 5.0) == 0.028);
}

TEST_CASE("softening curve interpolates and clamps") {
    const StepFunction sf = StepFunction::default_curve();
    CHECK(eval_step(sf, 2.1) == doctest::Approx(0.98).epsilon(1e-12));
    CHECK(eval_step(sf, 7.0) == 0.028);     // clamp past the last breakpoint
    CHECK(eval_step(sf, 1.0) == 1.0);       // plateau
    CHECK(eval_step(sf, 2.35) == doctest::Approx(0.675).epsilon(1e-12));
    CHECK_THROWS_AS(eval_step(sf, -0.1), InputError);
}

TEST_CASE("curve is 1 on the plateau and non-increasing beyond it") {
    const StepFunction sf = StepFunction::default_curve();
    CHECK(sf.plateau_end() == 2.0);
    double prev = 2.0;  // above any E*
    for (double e = 0.0; e <= 2.0; e += 0.05) CHECK(eval_step(sf, e) == 1.0);
    prev = 1.0;
    for (double e = 2.0; e <= 6.0; e += 0.016) {
        const double v = eval_step(sf, e);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
}

TEST_CASE("stress implied by each breakpoint matches the tabulated stress") {
    // stress(MPa) = strain * E* * E_avg = (e*/6000) * E* * 6000 MPa = e* * E*
    const std::vector<std::pair<double, double>> stress_table = {
        {0.0, 0.0},  {2.0, 2.000}, {2.2, 2.112}, {2.3, 1.955}, {2.4, 1.200},
        {2.5, 0.500}, {2.6, 0.260}, {2.8, 0.140}, {5.0, 0.140}};
    const StepFunction sf = StepFunction::default_curve();
    const MaterialParams p;
    for (const auto& [estar, stress_mpa] : stress_table) {
        const double strain = estar / p.estar_scale;
        const double implied_mpa = strain * eval_step(sf, estar) * p.E_avg / 1e6;
        if (stress_mpa == 0.0) {
            CHECK(implied_mpa == 0.0);
        } else {
            CHECK(implied_mpa == doctest::Approx(stress_mpa).epsilon(0.005));
        }
    }
}

TEST_CASE("strain-dependent strain scaling floors compression at zero") {
    const MaterialParams p;
    CHECK(strain_to_estar(0.333e-3, p) == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(strain_to_estar(0.0, p) == 0.0);
    CHECK(strain_to_estar(0.833e-3, p) == doctest::Approx(5.0).epsilon(1e-3));
    CHECK(strain_to_estar(-1.0e-3, p) == 0.0);  // compression never damages
}

TEST_CASE("step function validation rejects malformed curves") {
    CHECK_NOTHROW(validate_step_function(StepFunction::default_curve()));
    CHECK_THROWS_AS(validate_step_function(StepFunction{{{0.0, 1.0}}}), ConfigError);
    CHECK_THROWS_AS(validate_step_function(StepFunction{{{0.0, 0.9}, {1.0, 0.5}}}),
                    ConfigError);  // must start at 1
    CHECK_THROWS_AS(validate_step_function(StepFunction{{{0.0, 1.0}, {0.0, 0.5}}}),
                    ConfigError);  // e* not increasing
    CHECK_THROWS_AS(validate_step_function(StepFunction{{{0.0, 1.0}, {1.0, 0.0}}}),
                    ConfigError);  // E* must stay positive
    CHECK_THROWS_AS(
        validate_step_function(StepFunction{{{0.0, 1.0}, {1.0, 0.5}, {2.0, 0.7}}}),
        ConfigError);  // E* must not increase
}

TEST_CASE("random field is deterministic, bounded and well distributed") {
    std::vector<int> patches;
    for (int p = 0; p < 10000; ++p) patches.push_back(p);

    const RandomField a = sample_field(42, patches, 6.3e9, 7.7e9);
    const RandomField b = sample_field(42, patches, 6.3e9, 7.7e9);
    CHECK(a.patch_E == b.patch_E);  // same seed, same field

    const RandomField c = sample_field(43, patches, 6.3e9, 7.7e9);
    CHECK(a.patch_E != c.patch_E);

    double mean = 0.0;
    for (const auto& [p, E] : a.patch_E) {
        CHECK(E >= 6.3e9);
        CHECK(E <= 7.7e9);
        mean += E;
    }
    mean /= static_cast<double>(a.patch_E.size());
    CHECK(mean == doctest::Approx(7.0e9).epsilon(0.01));
}

TEST_CASE("random field ignores patch ordering and duplicates") {
    const RandomField fwd = sample_field(7, {0, 1, 2, 3}, 6.3e9, 7.7e9);
    const RandomField rev = sample_field(7, {3, 2, 1, 0, 2}, 6.3e9, 7.7e9);
    CHECK(fwd.patch_E == rev.patch_E);
}

TEST_CASE("random field rejects bad inputs") {
    CHECK_THROWS_AS(sample_field(1, {}, 6.3e9, 7.7e9), ConfigError);
    CHECK_THROWS_AS(sample_field(1, {0}, 7.7e9, 6.3e9), ConfigError);
    CHECK_THROWS_AS(sample_field(1, {0}, 7.0e9, 7.0e9), ConfigError);
}

TEST_CASE("secant modulus follows the softening law with its floor") {
    const StepFunction sf = StepFunction::default_curve();
    const MaterialParams p;
    // e* = 2.4 halves the stiffness
    CHECK(secant_modulus(7.0e9, 0.4e-3, sf, p) == doctest::Approx(3.51e9).epsilon(1e-9));
    // pristine: floor plus the patch modulus
    CHECK(secant_modulus(6.0e9, 0.0, sf, p) == doctest::Approx(6.01e9).epsilon(1e-12));
    // fully softened tail
    CHECK(secant_modulus(6.0e9, 0.833e-3, sf, p) ==
          doctest::Approx(1.78e8).epsilon(1e-3));
    CHECK_THROWS_AS(secant_modulus(0.0, 0.0, sf, p), InputError);
}

TEST_CASE("secant modulus stays inside its softening bounds") {
    const StepFunction sf = StepFunction::default_curve();
    const MaterialParams p;
    const double patch_E = 6.9e9;
    for (double ep1 = -2e-3; ep1 <= 2e-3; ep1 += 1e-5) {
        const double E = secant_modulus(patch_E, ep1, sf, p);
        CHECK(E >= p.E_floor + 0.028 * patch_E - 1e-3);
        CHECK(E <= p.E_floor + patch_E + 1e-3);
    }
}

TEST_CASE("per-element initial moduli come from patches, rubber is fixed") {
    Mesh m = build_structured_mesh(0.1, 0.1, 2, 2, 1.0);
    m = attach_strip(std::move(m), 0.1, 0.01, 0.0, 1);
    m = assign_patches(std::move(m), 0.05, 0.05);
    const RandomField field = sample_field(5, m.casi_patch_ids(), 6.3e9, 7.7e9);
    const MaterialParams p;
    const std::vector<double> E = element_initial_E(m, field, p);
    REQUIRE(E.size() == m.elements.size());
    for (const Element& e : m.elements) {
        if (e.region == Region::rubber) {
            CHECK(E[e.id] == p.E_rubber);
        } else {
            CHECK(E[e.id] == field.patch_E.at(e.patch));
        }
    }
}
