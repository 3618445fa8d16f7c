#include "mwi/metrology.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "mwi/constants.hpp"
#include "mwi/random.hpp"

namespace mwi {

namespace {
constexpr double pi = std::numbers::pi;

void check_electrode(const DeflectionElectrode& e) {
    if (e.effective_length <= 0.0)
        throw std::domain_error("deflection electrode: effective length must be > 0");
    if (e.position_z < 0.0)
        throw std::domain_error("deflection electrode: position must be >= 0");
    if (e.gradient_coeff <= 0.0)
        throw std::domain_error("deflection electrode: gradient coefficient must be > 0");
}

double mean_inv_v2(const VelocityDistribution& v_dist) {
    double acc = 0.0;
    for (const auto& [v, w] : v_dist.quadrature(64)) acc += w / (v * v);
    return acc;
}

} // namespace

double deflection_lever(const DeflectionElectrode& e, const InterferometerGeometry& g) {
    check_electrode(e);
    const double z_det = g.L12 + g.L23;
    const double l = e.effective_length;
    if (e.position_z + l > z_det)
        throw std::invalid_argument("deflection electrode extends past the detector");
    return l * (z_det - e.position_z - 0.5 * l);
}

double deflection_shift(const DeflectionElectrode& e, const Particle& p,
                        const InterferometerGeometry& g, double voltage, double v) {
    if (v <= 0.0) throw std::domain_error("deflection_shift: velocity must be > 0");
    const double lever = deflection_lever(e, g);
    const double force = p.alpha_static * e.gradient_coeff * voltage * voltage;
    return force * lever / (p.mass * v * v);
}

DeflectionScan scan_fringe_vs_voltage(const DeflectionElectrode& e, const Particle& p,
                                      const InterferometerGeometry& g, double grating_period,
                                      const VelocityDistribution& v_dist,
                                      const std::vector<double>& voltages, double sigma_phase,
                                      std::uint64_t seed) {
    if (grating_period <= 0.0)
        throw std::domain_error("scan_fringe_vs_voltage: period must be > 0");
    if (sigma_phase < 0.0)
        throw std::domain_error("scan_fringe_vs_voltage: noise sigma must be >= 0");
    const double lever = deflection_lever(e, g);
    const auto nodes = v_dist.quadrature(64);
    DeflectionScan scan;
    scan.voltages = voltages;
    scan.sigma_phase = sigma_phase;
    scan.phases.reserve(voltages.size());
    scan.contrasts.reserve(voltages.size());
    for (std::size_t i = 0; i < voltages.size(); ++i) {
        const double u = voltages[i];
        const double amp = 2.0 * pi / grating_period * p.alpha_static * e.gradient_coeff * u * u *
                           lever / p.mass;
        double mean_phase = 0.0;
        std::complex<double> coherence{0.0, 0.0};
        for (const auto& [v, w] : nodes) {
            const double phi = amp / (v * v);
            mean_phase += w * phi;
            coherence += w * std::polar(1.0, phi);
        }
        if (sigma_phase > 0.0) mean_phase += sigma_phase * Rng(seed, i).gaussian();
        scan.phases.push_back(mean_phase);
        scan.contrasts.push_back(std::abs(coherence));
    }
    return scan;
}

PolarizabilityFit fit_static_polarizability(const DeflectionScan& scan,
                                            const DeflectionElectrode& e, double mass,
                                            const VelocityDistribution& v_dist,
                                            double grating_period,
                                            const InterferometerGeometry& g) {
    const std::size_t n = scan.voltages.size();
    if (n < 3 || scan.phases.size() != n)
        throw std::invalid_argument("fit_static_polarizability: need >= 3 consistent points");
    if (mass <= 0.0) throw std::domain_error("fit_static_polarizability: mass must be > 0");
    const double lever = deflection_lever(e, g);
    const double inv_v2 = mean_inv_v2(v_dist);

    // phase = c0 + c1 U^2; the intercept absorbs any zero-voltage offset
    std::vector<double> design(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        design[2 * i] = 1.0;
        design[2 * i + 1] = scan.voltages[i] * scan.voltages[i];
    }
    std::vector<double> w;
    if (scan.sigma_phase > 0.0)
        w.assign(n, 1.0 / (scan.sigma_phase * scan.sigma_phase));
    FitResult fit = linear_least_squares(design, static_cast<int>(n), 2, scan.phases, w);

    const double conv = grating_period * mass / (2.0 * pi * e.gradient_coeff * lever * inv_v2);
    PolarizabilityFit pf;
    pf.fit = fit;
    pf.alpha = fit.values[1] * conv;
    pf.sigma_alpha = fit.std_errors[1] * std::abs(conv);
    return pf;
}

OpticalPolarizabilityFit fit_optical_polarizability(const TalbotSetup& setup,
                                                    const Particle& base,
                                                    const std::vector<double>& powers,
                                                    const std::vector<double>& visibilities,
                                                    const VelocityDistribution& v_dist) {
    if (powers.size() != visibilities.size() || powers.size() < 4)
        throw std::invalid_argument("fit_optical_polarizability: need >= 4 consistent points");
    if (!std::holds_alternative<OpticalGrating>(setup.g2))
        throw std::invalid_argument("fit_optical_polarizability: optical second grating required");
    const double lambda_L = std::get<OpticalGrating>(setup.g2).laser_wavelength;

    // Polarizabilities are ~1e-39 in SI units; the generic LM loop assumes O(1)
    // parameters (finite-difference steps, relative step test), so fit in units
    // of the starting Re alpha.
    const double scale = std::fabs(base.alpha_optical.real());
    if (scale == 0.0)
        throw std::invalid_argument("fit_optical_polarizability: starting Re alpha must be set");

    auto model = [&](const std::vector<double>& prm) {
        Particle p = base;
        p.alpha_optical = {prm[0] * scale, prm[1] * scale};
        p.sigma_abs_laser = 2.0 * pi * prm[1] * scale / (phys.eps0 * lambda_L);
        return kdtl_visibility_vs_power(setup, p, powers, v_dist).visibilities;
    };
    auto residuals = [&](const std::vector<double>& prm) {
        auto vis = model(prm);
        for (std::size_t i = 0; i < vis.size(); ++i) vis[i] -= visibilities[i];
        return vis;
    };

    std::vector<double> p0{base.alpha_optical.real() / scale, base.alpha_optical.imag() / scale};
    FitResult fit = levenberg_marquardt(residuals, p0, 80, 1e-10);
    for (double& v : fit.values) v *= scale;
    for (double& e : fit.std_errors) e *= scale;
    for (double& c : fit.covariance) c *= scale * scale;

    OpticalPolarizabilityFit of;
    of.fit = fit;
    of.alpha = {fit.values[0], fit.values[1]};
    of.sigma_abs = 2.0 * pi * fit.values[1] / (phys.eps0 * lambda_L);
    of.sigma_alpha_re = fit.std_errors[0];
    of.sigma_alpha_im = fit.std_errors[1];
    return of;
}

} // namespace mwi
