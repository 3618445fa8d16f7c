#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mwi/constants.hpp"
#include "mwi/nearfield.hpp"
#include "support/fresnel_oracle.hpp"

using namespace mwi;
using cd = std::complex<double>;

namespace {

constexpr double pi = std::numbers::pi;

Particle heavy(double amu_mass) {
    Particle p;
    p.mass = amu_mass * phys.amu;
    return p;
}

// symmetric all-material Talbot-Lau stack with equal periods
TalbotSetup tl_stack(double d, double f1, double f2, double C3, double L) {
    TalbotSetup s;
    s.g1.period_d = d;
    s.g1.open_fraction_f = f1;
    MaterialGrating g2;
    g2.period_d = d;
    g2.open_fraction_f = f2;
    g2.thickness_b = 190e-9;
    g2.C3 = C3;
    s.g2 = g2;
    s.g3_period = d;
    s.geometry.L12 = L;
    s.geometry.L23 = L;
    return s;
}

// N-sample binary transmission, one contiguous open run of fraction f
std::vector<cd> binary_samples(int N, double f) {
    std::vector<cd> t(static_cast<std::size_t>(N), cd{0.0, 0.0});
    const int open = static_cast<int>(std::lround(f * N));
    for (int i = 0; i < open; ++i) t[static_cast<std::size_t>(i)] = cd{1.0, 0.0};
    return t;
}

} // namespace

TEST_SUITE("nearfield") {

TEST_CASE("grating Fourier coefficients") {
    SUBCASE("uniform transmission") {
        std::vector<cd> t(256, cd{1.0, 0.0});
        auto gc = grating_fourier_coeffs(t, 8);
        CHECK(gc.at(0).real() == doctest::Approx(1.0).epsilon(1e-12));
        for (int j = 1; j <= 8; ++j) {
            CHECK(std::abs(gc.at(j)) < 1e-12);
            CHECK(std::abs(gc.at(-j)) < 1e-12);
        }
        // out-of-range orders read as zero
        CHECK(gc.at(9) == cd{0.0, 0.0});
    }

    SUBCASE("binary half-open grating") {
        auto gc = grating_fourier_coeffs(binary_samples(4096, 0.5), 8);
        CHECK(std::abs(gc.at(1)) == doctest::Approx(1.0 / pi).epsilon(1e-6));
        CHECK(std::abs(gc.at(2)) < 1e-9);
        CHECK(std::abs(gc.at(3)) == doctest::Approx(1.0 / (3.0 * pi)).epsilon(1e-5));
        CHECK(gc.at(0).real() == doctest::Approx(0.5).epsilon(1e-12));
    }

    SUBCASE("sampling requirement") {
        std::vector<cd> t(32, cd{1.0, 0.0});
        CHECK_THROWS_AS((void)grating_fourier_coeffs(t, 8), std::invalid_argument);
        CHECK_THROWS_AS((void)grating_fourier_coeffs(t, -1), std::domain_error);
    }
}

TEST_CASE("optical phase grating coefficients") {
    // t(x) = exp(i phi0 cos^2(pi x/d)) carries |b_j| = |J_j(phi0/2)|
    auto gc = optical_grating_coeffs(1.0, 8);
    for (int j = 0; j <= 2; ++j)
        CHECK(std::abs(gc.at(j)) ==
              doctest::Approx(std::abs(std::cyl_bessel_j(j, 0.5))).epsilon(1e-9));

    // lossless phase grating: unit power
    auto gc2 = optical_grating_coeffs(2.0, 40);
    CHECK(gc2.power_sum() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("binary mask coefficients") {
    auto c = binary_mask_coeffs(0.5, 5);
    CHECK(c[0] == 0.5);
    for (int m = 1; m <= 5; ++m)
        CHECK(c[static_cast<std::size_t>(m)] ==
              doctest::Approx(std::sin(pi * m * 0.5) / (pi * m)).epsilon(1e-12));
    CHECK(c[1] == doctest::Approx(1.0 / pi).epsilon(1e-12));

    auto c2 = binary_mask_coeffs(0.37, 5);
    for (int m = 1; m <= 5; ++m)
        CHECK(c2[static_cast<std::size_t>(m)] ==
              doctest::Approx(std::sin(pi * m * 0.37) / (pi * m)).epsilon(1e-12));

    CHECK_THROWS_AS((void)binary_mask_coeffs(0.0, 3), std::domain_error);
    CHECK_THROWS_AS((void)binary_mask_coeffs(1.0, 3), std::domain_error);
}

TEST_CASE("material grating coefficients") {
    MaterialGrating g;
    g.period_d = 990e-9;
    g.open_fraction_f = 0.42;
    g.thickness_b = 190e-9;
    g.C3 = 0.0;
    auto gc = material_grating_coeffs(g, heavy(840), 115.0, 20.0, 6);
    for (int j = 0; j <= 5; ++j) {
        const double want = j == 0 ? 0.42 : 0.42 * std::sin(pi * j * 0.42) / (pi * j * 0.42);
        CHECK(std::abs(gc.at(j)) == doctest::Approx(std::abs(want)).epsilon(2e-3));
    }
}

TEST_CASE("Talbot self-imaging") {
    const double d = 990e-9;
    const double lambda = 4.5e-12;
    const double L_T = d * d / lambda;
    auto g2 = grating_fourier_coeffs(binary_samples(4096, 0.5), 24);

    auto base = talbot_selfimage(g2, d, lambda, 0.0);
    auto revived = talbot_selfimage(g2, d, lambda, 2.0 * L_T);
    REQUIRE(base.fourier_coeffs.size() == revived.fourier_coeffs.size());
    for (std::size_t m = 0; m < base.fourier_coeffs.size(); ++m)
        CHECK(std::abs(base.fourier_coeffs[m] - revived.fourier_coeffs[m]) <=
              1e-6 * std::max(1.0, std::abs(base.fourier_coeffs[m])));

    // half-Talbot distance: replica shifted by half a period
    auto half = talbot_selfimage(g2, d, lambda, L_T);
    for (int i = 0; i < 16; ++i) {
        const double x = d * i / 16.0;
        CHECK(half.value_at(x + 0.5 * d) == doctest::Approx(base.value_at(x)).epsilon(1e-6));
    }
}

TEST_CASE("Talbot-Lau density harmonics") {
    Particle p = heavy(840);

    SUBCASE("hermiticity with vdW phases") {
        auto s = tl_stack(990e-9, 0.48, 0.48, 10.0 * units::meV_nm3, 0.22);
        auto rho = talbot_lau_density_coeffs(s, p, 115.0, 4);
        const int M = 4;
        for (int mu = 1; mu <= M; ++mu) {
            const cd lhs = rho[static_cast<std::size_t>(-mu + M)];
            const cd rhs = std::conj(rho[static_cast<std::size_t>(mu + M)]);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
        }
        CHECK(rho[M].imag() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(rho[M].real() > 0.0);
    }

    SUBCASE("pattern positivity and periodicity") {
        auto s = tl_stack(990e-9, 0.48, 0.48, 10.0 * units::meV_nm3, 0.22);
        auto pat = talbot_lau_pattern(s, p, 115.0);
        const double A0 = pat.fourier_coeffs[0].real();
        REQUIRE(A0 > 0.0);
        for (const auto& [x, sv] : pat.samples) CHECK(sv >= -1e-9 * A0);
        CHECK(pat.period == 990e-9);
    }

    SUBCASE("exact Talbot resonance of a half-open binary stack") {
        const double d = 990e-9;
        const double L = 0.22;
        auto s = tl_stack(d, 0.5, 0.5, 0.0, L);
        // velocity tuned so L equals one Talbot length
        const double v_res = phys.h * L / (p.mass * d * d);
        auto pat = talbot_lau_pattern(s, p, v_res);
        const double v_at_res = visibility_of_pattern(pat);
        CHECK(v_at_res < 2e-3);
        // off resonance the same stack shows fringes
        auto pat2 = talbot_lau_pattern(s, p, v_res / 0.75);
        const double v_off = visibility_of_pattern(pat2);
        CHECK(v_off > 0.01);
        CHECK(v_off > 20.0 * v_at_res);
    }

    SUBCASE("period mismatch rejected") {
        auto s = tl_stack(990e-9, 0.48, 0.48, 0.0, 0.22);
        s.g3_period = 990e-9 * 1.001;
        CHECK_THROWS_AS((void)talbot_lau_pattern(s, p, 115.0), std::invalid_argument);
    }

    SUBCASE("mode guards") {
        auto s = tl_stack(990e-9, 0.48, 0.48, 0.0, 0.22);
        s.mode = TalbotMode::classical;
        CHECK_THROWS_AS((void)talbot_lau_pattern(s, p, 115.0), std::invalid_argument);
        s.mode = TalbotMode::quantum;
        CHECK_THROWS_AS((void)classical_pattern(s, p, 115.0), std::invalid_argument);
    }
}

TEST_CASE("Kirchhoff path-sum oracle") {
    // 3-slit incoherent source, desk-scale symmetric arms. The G2 window must
    // bury its own aperture truncation below the comparison tolerance: the
    // offset falls monotonically from 3.3e-3 (5 slits) to 0.9e-4 (31 slits),
    // and 25 slits leave 2.6e-4, well under the 1e-3 band.
    const double d = 1e-6, f1 = 0.25, f2 = 0.5, L = 0.09;
    const double lambda = 1e-12;
    Particle p = heavy(720);
    const double v = phys.h / (p.mass * lambda);

    auto s = tl_stack(d, f1, f2, 0.0, L);
    auto pat = talbot_lau_pattern(s, p, v);
    const double model = std::abs(pat.fourier_coeffs[1]) / pat.fourier_coeffs[0].real();

    const oracle::FresnelSettings window{3, 25, 80, 700, 1024};
    const double ref = oracle::fresnel_a1_over_a0(d, f1, f2, s.g3_f(), lambda, L, L, window);
    CHECK(std::abs(model - ref) <= 1e-3 * ref);
}

TEST_CASE("classical moire") {
    Particle p = heavy(840);

    SUBCASE("point-particle closed form and velocity independence") {
        auto s = tl_stack(990e-9, 0.3, 0.44, 0.0, 0.22);
        s.mode = TalbotMode::classical;
        auto pat = classical_pattern(s, p, 115.0);
        const double f1 = 0.3, f2 = 0.44, f3 = s.g3_f();
        auto mask = [](double f, int m) {
            return m == 0 ? f : std::sin(pi * m * f) / (pi * m);
        };
        for (int mu = 0; mu < 3; ++mu) {
            cd h;
            if (mu == 0)
                h = cd{f2, 0.0};
            else
                h = (1.0 - std::polar(1.0, -4.0 * pi * mu * f2)) / cd{0.0, 4.0 * pi * mu};
            const cd want = mask(f1, mu) * h * mask(f3, mu);
            CHECK(std::abs(pat.fourier_coeffs[static_cast<std::size_t>(mu)] - want) <=
                  1e-6 * std::max(1e-6, std::abs(want)));
        }

        auto pat2 = classical_pattern(s, p, 345.0);
        for (std::size_t m = 0; m < std::min(pat.fourier_coeffs.size(), pat2.fourier_coeffs.size());
             ++m)
            CHECK(std::abs(pat.fourier_coeffs[m] - pat2.fourier_coeffs[m]) <= 1e-14);
    }

    SUBCASE("Monte-Carlo agrees with deterministic quadrature") {
        auto s = tl_stack(990e-9, 0.48, 0.48, 4.0 * units::meV_nm3, 0.22);
        s.mode = TalbotMode::classical;
        auto det = classical_pattern(s, p, 115.0);
        auto mc = classical_pattern_mc(s, p, 115.0, 1000000, 42);
        CHECK(std::abs(visibility_of_pattern(mc) - visibility_of_pattern(det)) < 0.01);
    }

    SUBCASE("Monte-Carlo reproducible across thread counts") {
        auto s = tl_stack(990e-9, 0.48, 0.48, 4.0 * units::meV_nm3, 0.22);
        s.mode = TalbotMode::classical;
        const int before = thread_count();
        set_thread_count(1);
        auto one = classical_pattern_mc(s, p, 115.0, 300000, 7);
        set_thread_count(4);
        auto four = classical_pattern_mc(s, p, 115.0, 300000, 7);
        set_thread_count(before);
        REQUIRE(one.fourier_coeffs.size() == four.fourier_coeffs.size());
        for (std::size_t m = 0; m < one.fourier_coeffs.size(); ++m)
            CHECK(one.fourier_coeffs[m] == four.fourier_coeffs[m]);
    }

    SUBCASE("guards") {
        auto s = tl_stack(990e-9, 0.48, 0.48, 0.0, 0.22);
        s.mode = TalbotMode::classical;
        s.geometry.L23 = 0.25;
        CHECK_THROWS_AS((void)classical_pattern(s, p, 115.0), std::invalid_argument);
        auto so = s;
        so.geometry.L23 = 0.22;
        OpticalGrating og;
        og.laser_wavelength = 2.0 * 990e-9;
        so.g2 = og;
        CHECK_THROWS_AS((void)classical_pattern(so, p, 115.0), std::invalid_argument);
    }
}

TEST_CASE("short-wavelength limit") {
    // Quantum visibility meets the classical moire deep in the L/L_T < 0.01
    // regime. The gap closes only linearly in L/L_T (edge waves with j above
    // ~L_T/L keep dephasing), so the probe sits at L/L_T = 0.002.
    Particle p = heavy(840);
    auto sq = tl_stack(990e-9, 0.42, 0.42, 0.0, 0.22);
    auto sc = sq;
    sc.mode = TalbotMode::classical;
    const double v_fast = phys.h * 0.22 / (p.mass * 990e-9 * 990e-9) / 0.002;  // L/L_T = 0.002
    const double vq = visibility_of_pattern(talbot_lau_pattern(sq, p, v_fast));
    const double vc = visibility_of_pattern(classical_pattern(sc, p, v_fast));
    CHECK(std::abs(vq - vc) < 0.01);
}

TEST_CASE("visibility versus velocity curves") {
    Particle p = heavy(840);
    auto s = tl_stack(990e-9, 0.48, 0.48, 6.0 * units::meV_nm3, 0.22);
    std::vector<double> grid{100.0, 140.0, 180.0};
    auto curves = visibility_vs_velocity(s, p, grid, {0.0});
    REQUIRE(curves.size() == 4);
    CHECK(curves[0].sweep_name == "quantum_vdw");
    CHECK(curves[1].sweep_name == "quantum_point");
    CHECK(curves[2].sweep_name == "classical_vdw");
    CHECK(curves[3].sweep_name == "classical_point");
    for (const auto& c : curves) {
        REQUIRE(c.visibilities.size() == grid.size());
        for (double v : c.visibilities) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }

    // spread 0 reproduces the single-velocity quantum visibility exactly
    auto pat = talbot_lau_pattern(s, p, grid[1]);
    CHECK(curves[0].visibilities[1] ==
          doctest::Approx(visibility_of_pattern(pat)).epsilon(1e-12));

    CHECK_THROWS_AS((void)visibility_vs_velocity(s, p, {}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)visibility_vs_velocity(s, p, grid, {0.1, 0.1}),
                    std::invalid_argument);
}

TEST_CASE("KDTLI power dependence") {
    Particle p = heavy(840);
    p.alpha_optical = cd{alpha_si_from_volume(120.0), 0.0};
    p.sigma_abs_laser = 0.0;

    TalbotSetup s;
    s.g1.period_d = 266e-9;
    s.g1.open_fraction_f = 0.42;
    OpticalGrating og;
    og.laser_wavelength = 532e-9;
    og.waist_z = 100e-6;
    s.g2 = og;
    s.g3_period = 266e-9;
    s.geometry.L12 = 0.105;
    s.geometry.L23 = 0.105;

    auto vd = make_gaussian_beam(190.0, 0.0);

    SUBCASE("zero power means no grating, no fringes") {
        auto c = kdtl_visibility_vs_power(s, p, {0.0, 0.5}, vd);
        CHECK(c.visibilities[0] == 0.0);
        CHECK(c.visibilities[1] > 0.0);
        CHECK_THROWS_AS((void)kdtl_visibility_vs_power(s, p, {-1.0}, vd), std::domain_error);
    }

    SUBCASE("interior maximum as phi0 sweeps through 2 pi") {
        const double phi0_per_W =
            kdtl_phi0(p.alpha_optical.real(), 1.0, 190.0, og.waist_z);
        std::vector<double> powers;
        for (int i = 0; i <= 24; ++i)
            powers.push_back(2.0 * pi / phi0_per_W * i / 24.0);
        auto c = kdtl_visibility_vs_power(s, p, powers, vd);
        const auto it = std::max_element(c.visibilities.begin(), c.visibilities.end());
        const std::size_t imax =
            static_cast<std::size_t>(std::distance(c.visibilities.begin(), it));
        CHECK(imax > 0);
        CHECK(imax + 1 < c.visibilities.size());
        CHECK(*it > c.visibilities.back());
        CHECK(*it > 0.05);
    }

    SUBCASE("alpha and power enter only through their product") {
        Particle p2 = p;
        p2.alpha_optical = 2.0 * p.alpha_optical;
        auto cA = kdtl_visibility_vs_power(s, p, {0.4, 0.8}, vd);
        auto cB = kdtl_visibility_vs_power(s, p2, {0.2, 0.4}, vd);
        CHECK(cA.visibilities[0] == cB.visibilities[0]);
        CHECK(cA.visibilities[1] == cB.visibilities[1]);
    }

    SUBCASE("photon absorption at the optical grating costs contrast") {
        auto sg = s;
        OpticalGrating g_phase;
        g_phase.laser_wavelength = 532e-9;
        g_phase.waist_z = 100e-6;
        g_phase.phase_amplitude_phi0 = 1.5;
        g_phase.mean_absorbed_photons_n0 = 0.0;
        sg.g2 = g_phase;
        const double v0 = visibility_of_pattern(talbot_lau_pattern(sg, p, 190.0));
        g_phase.mean_absorbed_photons_n0 = 1.0;
        sg.g2 = g_phase;
        const double v1 = visibility_of_pattern(talbot_lau_pattern(sg, p, 190.0));
        CHECK(v1 < v0);
        CHECK(v0 > 0.0);
    }

    SUBCASE("classical curve request with optical grating is rejected") {
        CHECK_THROWS_AS((void)visibility_vs_velocity(s, p, {100.0}, {0.0}),
                        std::invalid_argument);
    }
}

} // TEST_SUITE
