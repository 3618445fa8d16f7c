#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mwi/constants.hpp"
#include "mwi/core.hpp"
#include "mwi/metrology.hpp"
#include "mwi/nearfield.hpp"

using namespace mwi;

namespace {

constexpr double pi = std::numbers::pi;

struct Bench {
    DeflectionElectrode e;
    InterferometerGeometry g;
    Particle p;
    double d = 990e-9;
};

Bench make_bench() {
    Bench b;
    b.e.gradient_coeff = 1e7;
    b.e.effective_length = 0.05;
    b.e.position_z = 0.25;
    b.g.L12 = 0.22;
    b.g.L23 = 0.22;
    b.p.mass = 840.0 * phys.amu;
    b.p.alpha_static = alpha_si_from_volume(102.0);
    return b;
}

// mt19937_64 + Box-Muller: deterministic noise across platforms
struct NormalGen {
    std::mt19937_64 eng;
    explicit NormalGen(std::uint64_t seed) : eng(seed) {}
    double uniform() { return (eng() >> 11) * (1.0 / 9007199254740992.0); }
    double gaussian() {
        double u1 = uniform(), u2 = uniform();
        if (u1 <= 0.0) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
    }
};

TalbotSetup kdtl_setup() {
    TalbotSetup s;
    s.g1.period_d = 266e-9;
    s.g1.open_fraction_f = 0.42;
    s.g1.thickness_b = 190e-9;
    s.g1.C3 = 0.0;
    OpticalGrating g2;
    g2.laser_wavelength = 532e-9;
    g2.waist_y = 500e-6;
    g2.waist_z = 100e-6;
    s.g2 = g2;
    s.g3_period = 266e-9;
    s.geometry.L12 = 0.105;
    s.geometry.L23 = 0.105;
    return s;
}

} // namespace

TEST_SUITE("metrology") {

TEST_CASE("deflection lever") {
    Bench b = make_bench();
    CHECK(deflection_lever(b.e, b.g) ==
          doctest::Approx(0.05 * (0.44 - 0.25 - 0.025)).epsilon(1e-12));

    // electrode sticking out past the detector is rejected
    DeflectionElectrode late = b.e;
    late.position_z = 0.42;
    CHECK_THROWS_AS((void)deflection_lever(late, b.g), std::invalid_argument);

    DeflectionElectrode bad = b.e;
    bad.effective_length = 0.0;
    CHECK_THROWS_AS((void)deflection_lever(bad, b.g), std::domain_error);
    bad = b.e;
    bad.gradient_coeff = 0.0;
    CHECK_THROWS_AS((void)deflection_lever(bad, b.g), std::domain_error);
    bad = b.e;
    bad.position_z = -0.01;
    CHECK_THROWS_AS((void)deflection_lever(bad, b.g), std::domain_error);
}

TEST_CASE("deflection shift") {
    Bench b = make_bench();
    const double v = 100.0;

    CHECK(deflection_shift(b.e, b.p, b.g, 0.0, v) == 0.0);

    // closed form F lever / (m v^2)
    const double lever = deflection_lever(b.e, b.g);
    const double x470 = deflection_shift(b.e, b.p, b.g, 470.0, v);
    CHECK(x470 == doctest::Approx(b.p.alpha_static * 1e7 * 470.0 * 470.0 * lever /
                                  (b.p.mass * v * v))
                      .epsilon(1e-12));

    // fringe-resolvable regime: a dozen nanometers against a ~1 um period
    CHECK(x470 > 1e-8);
    CHECK(x470 < 2e-8);

    // quadratic in voltage, even under sign flip
    CHECK(deflection_shift(b.e, b.p, b.g, -470.0, v) == doctest::Approx(x470).epsilon(1e-14));
    CHECK(deflection_shift(b.e, b.p, b.g, 235.0, v) == doctest::Approx(x470 / 4.0).epsilon(1e-12));

    // doubling the speed quarters the displacement
    CHECK(x470 / deflection_shift(b.e, b.p, b.g, 470.0, 2.0 * v) ==
          doctest::Approx(4.0).epsilon(1e-12));

    // linear in the polarizability
    Particle heavy = b.p;
    heavy.alpha_static *= 2.0;
    CHECK(deflection_shift(b.e, heavy, b.g, 470.0, v) == doctest::Approx(2.0 * x470).epsilon(1e-12));

    CHECK_THROWS_AS((void)deflection_shift(b.e, b.p, b.g, 470.0, 0.0), std::domain_error);
}

TEST_CASE("voltage scan") {
    Bench b = make_bench();
    const std::vector<double> volts = {0.0, 100.0, 200.0, 300.0, 400.0, 470.0};

    SUBCASE("monochromatic phases track the shift") {
        VelocityDistribution mono = make_gaussian_beam(100.0, 0.0);
        DeflectionScan scan = scan_fringe_vs_voltage(b.e, b.p, b.g, b.d, mono, volts);
        REQUIRE(scan.phases.size() == volts.size());
        REQUIRE(scan.contrasts.size() == volts.size());
        for (std::size_t i = 0; i < volts.size(); ++i) {
            const double expect = 2.0 * pi / b.d * deflection_shift(b.e, b.p, b.g, volts[i], 100.0);
            CHECK(scan.phases[i] == doctest::Approx(expect).epsilon(1e-12));
            CHECK(scan.contrasts[i] == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    SUBCASE("velocity spread damps the contrast at high voltage") {
        VelocityDistribution beam = make_gaussian_beam(100.0, 15.0);
        // boost the coupling so the dispersive phase spread bites
        DeflectionElectrode strong = b.e;
        strong.gradient_coeff = 4e8;
        DeflectionScan scan = scan_fringe_vs_voltage(strong, b.p, b.g, b.d, beam, volts);
        CHECK(scan.contrasts.front() == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t i = 1; i < volts.size(); ++i)
            CHECK(scan.contrasts[i] <= scan.contrasts[i - 1] + 1e-12);
        CHECK(scan.contrasts.back() < 0.9);
    }

    SUBCASE("guards") {
        VelocityDistribution mono = make_gaussian_beam(100.0, 0.0);
        CHECK_THROWS_AS(
            (void)scan_fringe_vs_voltage(b.e, b.p, b.g, 0.0, mono, volts), std::domain_error);
        CHECK_THROWS_AS(
            (void)scan_fringe_vs_voltage(b.e, b.p, b.g, b.d, mono, volts, -0.1), std::domain_error);
    }
}

TEST_CASE("static polarizability fit") {
    Bench b = make_bench();
    b.e.gradient_coeff = 4e8;  // max phase a few radians
    const std::vector<double> volts = {0.0, 100.0, 150.0, 200.0, 250.0,
                                       300.0, 350.0, 400.0, 470.0};
    VelocityDistribution beam = make_gaussian_beam(100.0, 15.0);

    SUBCASE("noiseless round trip is exact") {
        DeflectionScan scan = scan_fringe_vs_voltage(b.e, b.p, b.g, b.d, beam, volts);
        PolarizabilityFit pf =
            fit_static_polarizability(scan, b.e, b.p.mass, beam, b.d, b.g);
        CHECK(pf.alpha == doctest::Approx(b.p.alpha_static).epsilon(1e-9));
        CHECK(pf.fit.chi2 < 1e-12);
        CHECK(pf.fit.dof == static_cast<int>(volts.size()) - 2);
        CHECK(pf.fit.converged);
        // quadratic model has no linear term to leak into the intercept
        CHECK(std::abs(pf.fit.values[0]) < 1e-9);
    }

    SUBCASE("zero polarizability stays consistent with zero") {
        Particle null = b.p;
        null.alpha_static = 0.0;
        DeflectionScan scan =
            scan_fringe_vs_voltage(b.e, null, b.g, b.d, beam, volts, 0.02, 12345u);
        PolarizabilityFit pf = fit_static_polarizability(scan, b.e, null.mass, beam, b.d, b.g);
        CHECK(std::abs(pf.alpha) < 3.0 * pf.sigma_alpha);
        CHECK(pf.sigma_alpha > 0.0);
    }

    SUBCASE("noisy ensemble: accuracy and error calibration") {
        const double sigma_phase = 0.02;
        const int n_trials = 100;
        int within_5pct = 0;
        double chi2_sum = 0.0, z_sum = 0.0, z2_sum = 0.0;
        for (int t = 0; t < n_trials; ++t) {
            DeflectionScan scan = scan_fringe_vs_voltage(b.e, b.p, b.g, b.d, beam, volts,
                                                         sigma_phase, 1000u + t);
            PolarizabilityFit pf =
                fit_static_polarizability(scan, b.e, b.p.mass, beam, b.d, b.g);
            if (std::abs(pf.alpha / b.p.alpha_static - 1.0) < 0.05) ++within_5pct;
            chi2_sum += pf.fit.chi2;
            const double z = (pf.alpha - b.p.alpha_static) / pf.sigma_alpha;
            z_sum += z;
            z2_sum += z * z;
        }
        CHECK(within_5pct >= 90);

        // pooled chi^2 should match the pooled dof within statistics
        const double pooled_dof = n_trials * (static_cast<double>(volts.size()) - 2.0);
        CHECK(std::abs(chi2_sum - pooled_dof) < 6.0 * std::sqrt(2.0 * pooled_dof));

        // z-scores: unbiased, unit variance
        CHECK(std::abs(z_sum / n_trials) < 0.5);
        const double z_var = z2_sum / n_trials;
        CHECK(z_var > 0.5);
        CHECK(z_var < 1.6);
    }

    SUBCASE("guards") {
        DeflectionScan tiny;
        tiny.voltages = {0.0, 100.0};
        tiny.phases = {0.0, 0.1};
        CHECK_THROWS_AS((void)fit_static_polarizability(tiny, b.e, b.p.mass, beam, b.d, b.g),
                        std::invalid_argument);
        DeflectionScan mism;
        mism.voltages = {0.0, 100.0, 200.0};
        mism.phases = {0.0, 0.1};
        CHECK_THROWS_AS((void)fit_static_polarizability(mism, b.e, b.p.mass, beam, b.d, b.g),
                        std::invalid_argument);
    }
}

TEST_CASE("optical polarizability fit") {
    TalbotSetup setup = kdtl_setup();
    const double lambda_L = 532e-9;

    Particle truth;
    truth.mass = 720.0 * phys.amu;
    truth.alpha_optical = {alpha_si_from_volume(120.0), 0.0};
    const double sigma_abs_true = 1e-21;
    truth.alpha_optical += std::complex<double>(
        0.0, sigma_abs_true * phys.eps0 * lambda_L / (2.0 * pi));
    truth.sigma_abs_laser = sigma_abs_true;

    VelocityDistribution mono = make_gaussian_beam(190.0, 0.0);
    const std::vector<double> powers = {0.1, 0.25, 0.4, 0.55, 0.7, 0.9, 1.1};
    const std::vector<double> vis_true =
        kdtl_visibility_vs_power(setup, truth, powers, mono).visibilities;

    SUBCASE("noiseless recovery") {
        Particle start = truth;
        start.alpha_optical = {0.8 * truth.alpha_optical.real(), 0.0};
        OpticalPolarizabilityFit of =
            fit_optical_polarizability(setup, start, powers, vis_true, mono);
        CHECK(of.fit.converged);
        CHECK(of.alpha.real() == doctest::Approx(truth.alpha_optical.real()).epsilon(1e-3));
        CHECK(of.alpha.imag() == doctest::Approx(truth.alpha_optical.imag()).epsilon(1e-2));
        // absorption cross section follows from Im alpha
        CHECK(of.sigma_abs == doctest::Approx(sigma_abs_true).epsilon(1e-2));
        CHECK(of.sigma_abs ==
              doctest::Approx(2.0 * pi * of.alpha.imag() / (phys.eps0 * lambda_L)).epsilon(1e-12));
    }

    SUBCASE("non-absorbing molecule fits to zero absorption") {
        Particle clean = truth;
        clean.alpha_optical = {truth.alpha_optical.real(), 0.0};
        clean.sigma_abs_laser = 0.0;
        const std::vector<double> vis_clean =
            kdtl_visibility_vs_power(setup, clean, powers, mono).visibilities;
        Particle start = clean;
        start.alpha_optical = {0.9 * clean.alpha_optical.real(), 0.0};
        OpticalPolarizabilityFit of =
            fit_optical_polarizability(setup, start, powers, vis_clean, mono);
        CHECK(of.alpha.real() == doctest::Approx(clean.alpha_optical.real()).epsilon(1e-3));
        CHECK(std::abs(of.alpha.imag()) < 1e-3 * clean.alpha_optical.real());
    }

    SUBCASE("noisy visibilities still pin Re alpha") {
        const double sigma_v = 0.005;
        int good = 0;
        const int n_trials = 8;
        for (int t = 0; t < n_trials; ++t) {
            NormalGen gen(7700u + t);
            std::vector<double> noisy = vis_true;
            for (double& v : noisy) v = std::max(0.0, v + sigma_v * gen.gaussian());
            Particle start = truth;
            start.alpha_optical = {0.85 * truth.alpha_optical.real(), 0.0};
            OpticalPolarizabilityFit of =
                fit_optical_polarizability(setup, start, powers, noisy, mono);
            if (std::abs(of.alpha.real() / truth.alpha_optical.real() - 1.0) < 0.05) ++good;
        }
        CHECK(good >= 7);
    }

    SUBCASE("guards") {
        Particle start = truth;
        CHECK_THROWS_AS((void)fit_optical_polarizability(setup, start, {0.1, 0.2, 0.3},
                                                         {0.1, 0.2, 0.3}, mono),
                        std::invalid_argument);
        CHECK_THROWS_AS(
            (void)fit_optical_polarizability(setup, start, powers, {0.1, 0.2}, mono),
            std::invalid_argument);

        Particle cold = truth;
        cold.alpha_optical = {0.0, 0.0};
        CHECK_THROWS_AS((void)fit_optical_polarizability(setup, cold, powers, vis_true, mono),
                        std::invalid_argument);

        TalbotSetup material = setup;
        MaterialGrating g2;
        g2.period_d = 266e-9;
        g2.open_fraction_f = 0.42;
        g2.thickness_b = 190e-9;
        material.g2 = g2;
        CHECK_THROWS_AS((void)fit_optical_polarizability(material, truth, powers, vis_true, mono),
                        std::invalid_argument);
    }
}

} // TEST_SUITE
