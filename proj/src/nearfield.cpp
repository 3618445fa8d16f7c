#include "mwi/nearfield.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mwi/constants.hpp"
#include "mwi/parallel.hpp"
#include "mwi/random.hpp"

namespace mwi {

namespace {

constexpr double pi = std::numbers::pi;
using cd = std::complex<double>;

// binary-mask Fourier coefficient f sinc(pi m f); even in m
double mask_coeff(double f, long m) {
    if (m == 0) return f;
    return std::sin(pi * static_cast<double>(m) * f) / (pi * static_cast<double>(m));
}

// Uniform samples of one grating period, slit centered at d/2, eikonal vdW
// phase, opaque where the phase passes the cutoff.
std::vector<cd> material_samples(const MaterialGrating& g, double v, double cutoff_phase,
                                 int N) {
    if (v <= 0.0) throw std::domain_error("material grating: velocity must be positive");
    if (g.C3 < 0.0) throw std::domain_error("material grating: C3 must be >= 0");
    const double d = g.period_d;
    const double a = g.open_fraction_f * d;
    const double scale = g.C3 * g.thickness_b / (phys.hbar * v);
    std::vector<cd> t(static_cast<std::size_t>(N));
    const double left = 0.5 * (d - a);
    for (int i = 0; i < N; ++i) {
        const double x = d * static_cast<double>(i) / N;
        const double u = x - left;            // coordinate inside the slit
        if (u < 0.0 || u >= a) continue;      // opaque bar
        if (scale == 0.0) {
            t[static_cast<std::size_t>(i)] = 1.0;
            continue;
        }
        if (u == 0.0) continue;               // on the wall
        const double phi = scale * (1.0 / (u * u * u) + 1.0 / ((a - u) * (a - u) * (a - u)));
        if (std::abs(phi) <= cutoff_phase) t[static_cast<std::size_t>(i)] = std::polar(1.0, phi);
    }
    return t;
}

std::vector<cd> optical_samples(double phi0, int N) {
    std::vector<cd> t(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        const double c = std::cos(pi * static_cast<double>(i) / N);
        t[static_cast<std::size_t>(i)] = std::polar(1.0, phi0 * c * c);
    }
    return t;
}

// single DFT coefficient of a periodic sample set
cd dft_coeff(const std::vector<cd>& t, int j) {
    const int N = static_cast<int>(t.size());
    const cd step = std::polar(1.0, -2.0 * pi * static_cast<double>(j) / N);
    cd rot{1.0, 0.0};
    cd acc{0.0, 0.0};
    for (int i = 0; i < N; ++i) {
        acc += t[static_cast<std::size_t>(i)] * rot;
        rot *= step;
    }
    return acc / static_cast<double>(N);
}

// lazy per-harmonic DFT cache over a fixed sample grid
struct CoeffCache {
    const std::vector<cd>* samples = nullptr;
    int Jmax = 0;
    std::vector<cd> c;
    std::vector<char> have;

    CoeffCache(const std::vector<cd>& s, int jmax)
        : samples(&s), Jmax(jmax),
          c(static_cast<std::size_t>(2 * jmax + 1)),
          have(static_cast<std::size_t>(2 * jmax + 1), 0) {}

    cd get(int j) {
        if (j < -Jmax || j > Jmax) return {0.0, 0.0};
        auto idx = static_cast<std::size_t>(j + Jmax);
        if (!have[idx]) {
            c[idx] = dft_coeff(*samples, j);
            have[idx] = 1;
        }
        return c[idx];
    }
};

struct G2State {
    std::vector<cd> samples;
    bool optical = false;
    double n0 = 0.0;   // mean absorbed photons per antinode transit
};

// Resolve the second grating at a given velocity. Laser gratings scale the
// phase imprint and photon number from the power when one is set; otherwise
// the stored reference values are taken as-is.
G2State resolve_g2(const TalbotSetup& s, const Particle& p, double v, int N) {
    G2State st;
    if (std::holds_alternative<MaterialGrating>(s.g2)) {
        st.samples = material_samples(std::get<MaterialGrating>(s.g2), v, s.cutoff_phase, N);
        return st;
    }
    const auto& og = std::get<OpticalGrating>(s.g2);
    double phi0 = og.phase_amplitude_phi0;
    double n0 = og.mean_absorbed_photons_n0;
    if (og.power > 0.0) {
        phi0 = kdtl_phi0(p.alpha_optical.real(), og.power, v, og.waist_z);
        n0 = kdtl_n0(p.sigma_abs_laser, og.power, og.laser_wavelength, v, og.waist_z);
    }
    st.samples = optical_samples(phi0, N);
    st.optical = true;
    st.n0 = n0;
    return st;
}

struct ArmGeometry {
    double L1 = 0.0, L2 = 0.0, L_red = 0.0, L_T = 0.0, d = 0.0;
};

ArmGeometry arms(const TalbotSetup& s, double lambda) {
    ArmGeometry a;
    a.L1 = s.geometry.L12;
    a.L2 = s.geometry.L23;
    if (a.L1 <= 0.0 || a.L2 <= 0.0)
        throw std::domain_error("Talbot-Lau geometry: arm lengths must be positive");
    a.L_red = a.L1 * a.L2 / (a.L1 + a.L2);
    a.d = s.g1.period_d;
    a.L_T = a.d * a.d / lambda;
    return a;
}

void check_periods(const TalbotSetup& s) {
    const double d = s.g1.period_d;
    if (d <= 0.0) throw std::domain_error("Talbot-Lau: grating period must be positive");
    const double d2 = s.g2_period();
    const double d3 = s.g3_period;
    if (std::abs(d2 - d) > 1e-4 * d || std::abs(d3 - d) > 1e-4 * d)
        throw std::invalid_argument("Talbot-Lau: grating periods disagree beyond 1e-4");
}

// One stationary detected harmonic of the molecular density. The path pair
// (j, j - Delta) survives the G1 average and the G3 readout only when Delta
// maps to integer offsets on both gratings.
cd density_harmonic(CoeffCache& bc, int J, const ArmGeometry& g, double f1, long mu,
                    bool optical, double n0) {
    const double dd = static_cast<double>(mu) * (g.L1 + g.L2) / g.L1;
    const double rr = static_cast<double>(mu) * g.L2 / g.L1;
    const long delta = std::lround(dd);
    const long r = std::lround(rr);
    if (std::abs(dd - static_cast<double>(delta)) > 1e-9 * std::max(1.0, std::abs(dd)))
        return {0.0, 0.0};
    if (std::abs(rr - static_cast<double>(r)) > 1e-9 * std::max(1.0, std::abs(rr)))
        return {0.0, 0.0};
    const double q = pi * g.L_red / g.L_T;
    cd acc{0.0, 0.0};
    const long jlo = std::max<long>(-J, delta - J);
    const long jhi = std::min<long>(J, delta + J);
    for (long j = jlo; j <= jhi; ++j) {
        const cd bj = bc.get(static_cast<int>(j));
        if (bj == cd{0.0, 0.0}) continue;
        const cd bk = bc.get(static_cast<int>(j - delta));
        if (bk == cd{0.0, 0.0}) continue;
        const double ph = -q * static_cast<double>(j * j - (j - delta) * (j - delta));
        acc += bj * std::conj(bk) * std::polar(1.0, ph);
    }
    cd rho = mask_coeff(f1, r) * acc;
    if (optical && n0 > 0.0) {
        // photon absorption at G2 randomizes the fringe phase by mu pi L2/LT
        const double w = std::exp(-0.5 * n0 *
                                  (1.0 - std::cos(pi * static_cast<double>(mu) * g.L2 / g.L_T)));
        rho *= w;
    }
    return rho;
}

// density harmonics with sampling-order convergence on |rho_1| / rho_0
std::vector<cd> density_coeffs_impl(const TalbotSetup& s, const Particle& p, double v, int M) {
    check_periods(s);
    const double lambda = de_broglie_wavelength(p.mass, v);
    const ArmGeometry g = arms(s, lambda);
    constexpr int n_samp = 8192;
    G2State g2 = resolve_g2(s, p, v, n_samp);
    CoeffCache cache(g2.samples, 1024);

    int J = 32;
    double prev = -1.0;
    for (;;) {
        const cd r0 = density_harmonic(cache, J, g, s.g1.open_fraction_f, 0, g2.optical, g2.n0);
        const cd r1 = density_harmonic(cache, J, g, s.g1.open_fraction_f, 1, g2.optical, g2.n0);
        const double ratio = r0.real() > 0.0 ? std::abs(r1) / r0.real() : 0.0;
        if (prev >= 0.0 && std::abs(ratio - prev) < 1e-6) break;
        prev = ratio;
        if (J >= 512) break;
        J *= 2;
    }

    std::vector<cd> rho(static_cast<std::size_t>(2 * M + 1));
    for (long mu = -M; mu <= M; ++mu)
        rho[static_cast<std::size_t>(mu + M)] =
            density_harmonic(cache, J, g, s.g1.open_fraction_f, mu, g2.optical, g2.n0);
    return rho;
}

InterferencePattern pattern_from_harmonics(const std::vector<cd>& a_mu, double period) {
    InterferencePattern pat;
    pat.period = period;
    pat.fourier_coeffs = a_mu;
    if (!pat.fourier_coeffs.empty())
        pat.fourier_coeffs[0] = cd{std::max(0.0, pat.fourier_coeffs[0].real()), 0.0};
    pat.resample(256);
    return pat;
}

// vdW impulse kick at G2 from the eikonal phase gradient: dx = (L2/k) dphi/du
struct ClassicalG2 {
    double a = 0.0;          // slit width
    double lo = 0.0, hi = 0.0;  // transmitted window inside the slit
    double scale = 0.0;      // C3 b / (hbar v)
};

ClassicalG2 classical_window(const MaterialGrating& g, const Particle&, double v,
                             double cutoff_phase) {
    ClassicalG2 w;
    if (g.C3 < 0.0) throw std::domain_error("classical grating: C3 must be >= 0");
    w.a = g.open_fraction_f * g.period_d;
    w.scale = g.C3 * g.thickness_b / (phys.hbar * v);
    if (w.scale == 0.0) {
        w.lo = 0.0;
        w.hi = w.a;
        return w;
    }
    auto phi = [&](double u) {
        return w.scale * (1.0 / (u * u * u) + 1.0 / ((w.a - u) * (w.a - u) * (w.a - u)));
    };
    if (phi(0.5 * w.a) >= cutoff_phase) {
        w.lo = w.hi = 0.5 * w.a;  // slit fully blocked by the cutoff
        return w;
    }
    double lo = 1e-9 * w.a, hi = 0.5 * w.a;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) > cutoff_phase ? lo : hi) = mid;
    }
    w.lo = 0.5 * (lo + hi);
    w.hi = w.a - w.lo;
    return w;
}

double classical_kick(const ClassicalG2& w, double k, double L2, double u) {
    // dphi/du = 3 scale ((a-u)^-4 - u^-4)
    const double g = 3.0 * w.scale * (1.0 / std::pow(w.a - u, 4) - 1.0 / std::pow(u, 4));
    return L2 / k * g;
}

std::vector<cd> classical_coeffs_impl(const TalbotSetup& s, const Particle& p, double v, int M,
                                      int n_eta) {
    check_periods(s);
    if (!std::holds_alternative<MaterialGrating>(s.g2))
        throw std::invalid_argument("classical mode expects a material second grating");
    const double lambda = de_broglie_wavelength(p.mass, v);
    const ArmGeometry g = arms(s, lambda);
    if (std::abs(g.L1 - g.L2) > 1e-9 * (g.L1 + g.L2))
        throw std::invalid_argument("classical mode requires symmetric arms");
    const auto& g2 = std::get<MaterialGrating>(s.g2);
    const ClassicalG2 w = classical_window(g2, p, v, s.cutoff_phase);
    const double k = 2.0 * pi / lambda;
    const double d = g.d;
    const double f3 = s.g3_f();

    std::vector<cd> h(static_cast<std::size_t>(M + 1), cd{0.0, 0.0});
    const double width = w.hi - w.lo;
    if (width > 0.0) {
        const double du = width / n_eta;
        for (int i = 0; i < n_eta; ++i) {
            const double u = w.lo + (i + 0.5) * du;
            const double shift = w.scale == 0.0 ? 0.0 : classical_kick(w, k, g.L2, u);
            const double psi = -2.0 * pi * (2.0 * u + shift) / d;
            const cd e1 = std::polar(1.0, psi);
            cd e{1.0, 0.0};
            for (int mu = 0; mu <= M; ++mu) {
                h[static_cast<std::size_t>(mu)] += e;
                e *= e1;
            }
        }
        for (auto& x : h) x *= du / d;
    }
    std::vector<cd> a(static_cast<std::size_t>(M + 1));
    for (long mu = 0; mu <= M; ++mu)
        a[static_cast<std::size_t>(mu)] = mask_coeff(s.g1.open_fraction_f, mu) *
                                          h[static_cast<std::size_t>(mu)] * mask_coeff(f3, mu);
    return a;
}

} // namespace

double GratingCoefficients::power_sum() const {
    double s = 0.0;
    for (const auto& x : b) s += std::norm(x);
    return s;
}

double TalbotSetup::g2_period() const {
    if (std::holds_alternative<MaterialGrating>(g2))
        return std::get<MaterialGrating>(g2).period_d;
    return std::get<OpticalGrating>(g2).period();
}

GratingCoefficients grating_fourier_coeffs(const std::vector<cd>& t_samples, int J) {
    if (J < 0) throw std::domain_error("grating_fourier_coeffs: J must be >= 0");
    const int N = static_cast<int>(t_samples.size());
    if (N < 8 * std::max(1, J))
        throw std::invalid_argument("grating_fourier_coeffs: need at least 8 J samples");
    GratingCoefficients gc;
    gc.J = J;
    gc.b.resize(static_cast<std::size_t>(2 * J + 1));
    for (int j = -J; j <= J; ++j) gc.b[static_cast<std::size_t>(j + J)] = dft_coeff(t_samples, j);
    return gc;
}

GratingCoefficients material_grating_coeffs(const MaterialGrating& g, const Particle& p,
                                            double v, double cutoff_phase, int J) {
    (void)p;  // kept for interface symmetry; the wall constant lives on the grating
    const int N = std::max(8 * std::max(1, J), 4096);
    return grating_fourier_coeffs(material_samples(g, v, cutoff_phase, N), J);
}

GratingCoefficients optical_grating_coeffs(double phi0, int J) {
    const int N = std::max(8 * std::max(1, J), 4096);
    return grating_fourier_coeffs(optical_samples(phi0, N), J);
}

std::vector<double> binary_mask_coeffs(double f, int M) {
    if (f <= 0.0 || f >= 1.0) throw std::domain_error("binary_mask_coeffs: need 0 < f < 1");
    std::vector<double> c(static_cast<std::size_t>(M + 1));
    for (long m = 0; m <= M; ++m) c[static_cast<std::size_t>(m)] = mask_coeff(f, m);
    return c;
}

double kdtl_phi0(double alpha_re, double power, double v, double waist_z) {
    if (power < 0.0) throw std::domain_error("kdtl_phi0: power must be >= 0");
    if (v <= 0.0 || waist_z <= 0.0) throw std::domain_error("kdtl_phi0: need v > 0, waist > 0");
    return std::sqrt(8.0 / pi) * alpha_re * power / (phys.hbar * phys.c * phys.eps0 * v * waist_z);
}

double kdtl_n0(double sigma_abs, double power, double lambda_L, double v, double waist_z) {
    if (power < 0.0) throw std::domain_error("kdtl_n0: power must be >= 0");
    if (v <= 0.0 || waist_z <= 0.0 || lambda_L <= 0.0)
        throw std::domain_error("kdtl_n0: need v > 0, waist > 0, wavelength > 0");
    return std::sqrt(32.0 / pi) * sigma_abs * lambda_L * power / (phys.h * phys.c * v * waist_z);
}

std::vector<cd> talbot_lau_density_coeffs(const TalbotSetup& setup, const Particle& p, double v,
                                          int M) {
    if (M < 0) throw std::domain_error("talbot_lau_density_coeffs: M must be >= 0");
    return density_coeffs_impl(setup, p, v, M);
}

InterferencePattern talbot_lau_pattern(const TalbotSetup& setup, const Particle& p, double v) {
    if (setup.mode != TalbotMode::quantum)
        throw std::invalid_argument("talbot_lau_pattern: setup is not in quantum mode");
    const double f3 = setup.g3_f();
    int M = 8;
    std::vector<cd> a;
    for (;;) {
        const auto rho = density_coeffs_impl(setup, p, v, M);
        a.assign(static_cast<std::size_t>(M + 1), cd{});
        for (long mu = 0; mu <= M; ++mu)
            a[static_cast<std::size_t>(mu)] =
                rho[static_cast<std::size_t>(mu + M)] * mask_coeff(f3, mu);
        const double a0 = a[0].real();
        if (M >= 32 || a0 <= 0.0 || std::abs(a.back()) <= 1e-9 * a0) break;
        M *= 2;
    }
    while (a.size() > 2 && std::abs(a.back()) < 1e-15 * std::max(a[0].real(), 1e-300))
        a.pop_back();
    return pattern_from_harmonics(a, setup.g3_period);
}

InterferencePattern classical_pattern(const TalbotSetup& setup, const Particle& p, double v) {
    if (setup.mode != TalbotMode::classical)
        throw std::invalid_argument("classical_pattern: setup is not in classical mode");
    int M = 8;
    std::vector<cd> a;
    for (;;) {
        a = classical_coeffs_impl(setup, p, v, M, 400000);
        const double a0 = a[0].real();
        if (M >= 32 || a0 <= 0.0 || std::abs(a.back()) <= 1e-9 * a0) break;
        M *= 2;
    }
    while (a.size() > 2 && std::abs(a.back()) < 1e-15 * std::max(a[0].real(), 1e-300))
        a.pop_back();
    return pattern_from_harmonics(a, setup.g3_period);
}

InterferencePattern classical_pattern_mc(const TalbotSetup& setup, const Particle& p, double v,
                                         std::uint64_t n_rays, std::uint64_t seed) {
    if (setup.mode != TalbotMode::classical)
        throw std::invalid_argument("classical_pattern_mc: setup is not in classical mode");
    check_periods(setup);
    if (!std::holds_alternative<MaterialGrating>(setup.g2))
        throw std::invalid_argument("classical mode expects a material second grating");
    if (n_rays == 0) throw std::domain_error("classical_pattern_mc: need at least one ray");
    const double lambda = de_broglie_wavelength(p.mass, v);
    const ArmGeometry g = arms(setup, lambda);
    if (std::abs(g.L1 - g.L2) > 1e-9 * (g.L1 + g.L2))
        throw std::invalid_argument("classical mode requires symmetric arms");
    const auto& g2 = std::get<MaterialGrating>(setup.g2);
    const ClassicalG2 w = classical_window(g2, p, v, setup.cutoff_phase);
    const double k = 2.0 * pi / lambda;
    const double d = g.d;
    const double a1 = setup.g1.open_fraction_f * d;
    const double f3 = setup.g3_f();
    constexpr int M = 8;
    const double width = w.hi - w.lo;

    constexpr std::uint64_t chunk = 65536;
    const std::uint64_t n_chunks = (n_rays + chunk - 1) / chunk;
    std::vector<std::array<cd, M + 1>> partial(n_chunks);

    parallel_for(n_chunks, [&](std::size_t c) {
        Rng rng(seed, c);
        std::array<cd, M + 1> sum{};
        const std::uint64_t lo = c * chunk;
        const std::uint64_t hi = std::min<std::uint64_t>(lo + chunk, n_rays);
        for (std::uint64_t i = lo; i < hi; ++i) {
            const double xi = (rng.uniform() - 0.5) * a1;
            const double u = w.lo + rng.uniform() * width;
            const double shift = w.scale == 0.0 ? 0.0 : classical_kick(w, k, g.L2, u);
            const double X = 2.0 * u - xi + shift;
            const cd e1 = std::polar(1.0, -2.0 * pi * X / d);
            cd e{1.0, 0.0};
            for (int mu = 0; mu <= M; ++mu) {
                sum[static_cast<std::size_t>(mu)] += e;
                e *= e1;
            }
        }
        partial[c] = sum;
    });

    std::array<cd, M + 1> tot{};
    for (const auto& s : partial)
        for (int mu = 0; mu <= M; ++mu) tot[static_cast<std::size_t>(mu)] += s[static_cast<std::size_t>(mu)];

    // scale so the harmonics estimate the deterministic quadrature result
    const double norm = setup.g1.open_fraction_f * width / d / static_cast<double>(n_rays);
    std::vector<cd> a(static_cast<std::size_t>(M + 1));
    for (long mu = 0; mu <= M; ++mu)
        a[static_cast<std::size_t>(mu)] =
            tot[static_cast<std::size_t>(mu)] * norm * mask_coeff(f3, mu);
    return pattern_from_harmonics(a, setup.g3_period);
}

InterferencePattern talbot_selfimage(const GratingCoefficients& g2, double period, double lambda,
                                     double L) {
    if (period <= 0.0 || lambda <= 0.0 || L < 0.0)
        throw std::domain_error("talbot_selfimage: need period > 0, lambda > 0, L >= 0");
    const double L_T = period * period / lambda;
    const int J = g2.J;
    std::vector<cd> c(static_cast<std::size_t>(2 * J + 1));
    for (int j = -J; j <= J; ++j) {
        const double ph = -pi * (L / L_T) * static_cast<double>(j) * static_cast<double>(j);
        c[static_cast<std::size_t>(j + J)] = g2.at(j) * std::polar(1.0, ph);
    }
    const int M = std::min(2 * J, 96);
    std::vector<cd> a(static_cast<std::size_t>(M + 1), cd{});
    for (int m = 0; m <= M; ++m) {
        cd acc{0.0, 0.0};
        for (int j = -J; j <= J; ++j) {
            const int jm = j - m;
            if (jm < -J) continue;
            acc += c[static_cast<std::size_t>(j + J)] * std::conj(c[static_cast<std::size_t>(jm + J)]);
        }
        a[static_cast<std::size_t>(m)] = acc;
    }
    return pattern_from_harmonics(a, period);
}

std::vector<VisibilityCurve> visibility_vs_velocity(const TalbotSetup& setup, const Particle& p,
                                                    const std::vector<double>& v_grid,
                                                    const std::vector<double>& spread_rel) {
    if (v_grid.empty()) throw std::invalid_argument("visibility_vs_velocity: empty grid");
    if (spread_rel.size() != 1 && spread_rel.size() != v_grid.size())
        throw std::invalid_argument("visibility_vs_velocity: spread size mismatch");
    if (!std::holds_alternative<MaterialGrating>(setup.g2))
        throw std::invalid_argument("visibility_vs_velocity: expects a material second grating");

    TalbotSetup qs = setup;
    qs.mode = TalbotMode::quantum;
    TalbotSetup cs = setup;
    cs.mode = TalbotMode::classical;
    TalbotSetup qs0 = qs;
    std::get<MaterialGrating>(qs0.g2).C3 = 0.0;
    TalbotSetup cs0 = cs;
    std::get<MaterialGrating>(cs0.g2).C3 = 0.0;

    const std::array<const TalbotSetup*, 4> variants{&qs, &qs0, &cs, &cs0};
    const std::array<const char*, 4> names{"quantum_vdw", "quantum_point", "classical_vdw",
                                           "classical_point"};
    const std::size_t n = v_grid.size();
    std::vector<double> vis(4 * n, 0.0);

    parallel_for(4 * n, [&](std::size_t task) {
        const std::size_t var = task / n;
        const std::size_t i = task % n;
        const TalbotSetup& s = *variants[var];
        const double v0 = v_grid[i];
        const double rel = spread_rel.size() == 1 ? spread_rel[0] : spread_rel[i];
        std::vector<std::pair<double, double>> nodes;
        if (rel <= 0.0) {
            nodes = {{v0, 1.0}};
        } else {
            const double sigma = rel * v0;
            nodes = make_gaussian_beam(v0, sigma, std::max(0.2 * v0, v0 - 3.0 * sigma),
                                       v0 + 3.0 * sigma)
                        .quadrature(32);
        }
        cd a1{0.0, 0.0};
        double a0 = 0.0;
        const double f3 = s.g3_f();
        for (const auto& [vn, wn] : nodes) {
            std::vector<cd> coeffs;
            if (var < 2) {
                const auto rho = density_coeffs_impl(s, p, vn, 1);
                coeffs = {rho[1] * mask_coeff(f3, 0), rho[2] * mask_coeff(f3, 1)};
            } else {
                coeffs = classical_coeffs_impl(s, p, vn, 1, 200000);
            }
            a0 += wn * coeffs[0].real();
            a1 += wn * coeffs[1];
        }
        vis[task] = a0 > 0.0 ? std::clamp(2.0 * std::abs(a1) / a0, 0.0, 1.0) : 0.0;
    });

    std::vector<VisibilityCurve> out(4);
    for (std::size_t var = 0; var < 4; ++var) {
        out[var].sweep_name = names[var];
        out[var].sweep_values = v_grid;
        out[var].visibilities.assign(vis.begin() + static_cast<std::ptrdiff_t>(var * n),
                                     vis.begin() + static_cast<std::ptrdiff_t>((var + 1) * n));
    }
    return out;
}

VisibilityCurve kdtl_visibility_vs_power(const TalbotSetup& setup, const Particle& p,
                                         const std::vector<double>& powers,
                                         const VelocityDistribution& v_dist) {
    if (!std::holds_alternative<OpticalGrating>(setup.g2))
        throw std::invalid_argument("kdtl_visibility_vs_power: expects an optical second grating");
    for (double P : powers)
        if (P < 0.0) throw std::domain_error("kdtl_visibility_vs_power: power must be >= 0");
    const auto nodes = v_dist.quadrature(32);
    const double f3 = setup.g3_f();
    VisibilityCurve curve;
    curve.sweep_name = "power";
    curve.sweep_values = powers;
    curve.visibilities.assign(powers.size(), 0.0);

    parallel_for(powers.size(), [&](std::size_t ip) {
        TalbotSetup s = setup;
        auto& og = std::get<OpticalGrating>(s.g2);
        og.power = powers[ip];
        if (og.power == 0.0) {
            curve.visibilities[ip] = 0.0;
            return;
        }
        cd a1{0.0, 0.0};
        double a0 = 0.0;
        for (const auto& [vn, wn] : nodes) {
            const auto rho = density_coeffs_impl(s, p, vn, 1);
            a0 += wn * (rho[1] * mask_coeff(f3, 0)).real();
            a1 += wn * rho[2] * mask_coeff(f3, 1);
        }
        curve.visibilities[ip] = a0 > 0.0 ? std::clamp(2.0 * std::abs(a1) / a0, 0.0, 1.0) : 0.0;
    });
    return curve;
}

} // namespace mwi
