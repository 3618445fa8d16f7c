#include "mwi/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "mwi/constants.hpp"
#include "mwi/csvio.hpp"
#include "mwi/fit.hpp"
#include "mwi/parallel.hpp"
#include "mwi/quadrature.hpp"
#include "mwi/random.hpp"

namespace mwi {

namespace {
constexpr double pi = std::numbers::pi;
}

double fall_height(double v, double flight_length) {
    if (v <= 0.0) throw std::domain_error("fall_height: velocity must be > 0");
    if (flight_length < 0.0) throw std::domain_error("fall_height: flight length must be >= 0");
    const double t = flight_length / v;
    return 0.5 * phys.g_earth * t * t;
}

DepositImage simulate_deposit(const std::function<InterferencePattern(double)>& pattern_for_v,
                              const VelocityDistribution& v_dist, const DepositOptions& opt) {
    if (opt.n_rows < 1 || opt.n_cols < 8)
        throw std::domain_error("simulate_deposit: need n_rows >= 1, n_cols >= 8");
    if (opt.magnification <= 0.0)
        throw std::domain_error("simulate_deposit: magnification must be > 0");
    if (opt.total_counts <= 0.0)
        throw std::domain_error("simulate_deposit: total counts must be > 0");

    const double v_lo = v_dist.v_min;
    const double v_hi = v_dist.v_max;
    if (!(v_hi > v_lo) || v_lo <= 0.0)
        throw std::domain_error("simulate_deposit: velocity window must be positive");

    DepositImage img;
    img.n_rows = opt.n_rows;
    img.n_cols = opt.n_cols;
    const double dv = (v_hi - v_lo) / opt.n_rows;

    img.row_velocity.resize(static_cast<std::size_t>(opt.n_rows));
    img.y_plate.resize(static_cast<std::size_t>(opt.n_rows));
    std::vector<double> row_mass(static_cast<std::size_t>(opt.n_rows));
    for (int r = 0; r < opt.n_rows; ++r) {
        const double va = v_lo + r * dv;
        const double v_r = va + 0.5 * dv;
        img.row_velocity[static_cast<std::size_t>(r)] = v_r;
        img.y_plate[static_cast<std::size_t>(r)] = fall_height(v_r, opt.flight_length);
        row_mass[static_cast<std::size_t>(r)] =
            integrate_gl([&](double v) { return v_dist.pdf(v); }, va, va + dv, 8);
    }
    double mass_sum = 0.0;
    for (double m : row_mass) mass_sum += m;
    if (mass_sum <= 0.0) throw std::domain_error("simulate_deposit: distribution has no mass");

    // probe the pattern once to size the scan window: four plate periods
    const InterferencePattern probe = pattern_for_v(img.row_velocity.front());
    if (probe.period <= 0.0) throw std::domain_error("simulate_deposit: pattern has no period");
    img.plate_period = opt.magnification * probe.period;
    const double window = 4.0 * img.plate_period;
    img.scan_step = window / opt.n_cols;
    img.x_plate.resize(static_cast<std::size_t>(opt.n_cols));
    for (int c = 0; c < opt.n_cols; ++c)
        img.x_plate[static_cast<std::size_t>(c)] = (c + 0.5) * img.scan_step;

    img.counts.assign(static_cast<std::size_t>(opt.n_rows) * static_cast<std::size_t>(opt.n_cols),
                      0);
    parallel_for(static_cast<std::size_t>(opt.n_rows), [&](std::size_t r) {
        const double v_r = img.row_velocity[r];
        const InterferencePattern pat = pattern_for_v(v_r);
        std::vector<double> mu(static_cast<std::size_t>(opt.n_cols));
        double mu_sum = 0.0;
        for (int c = 0; c < opt.n_cols; ++c) {
            const double x_mol = img.x_plate[static_cast<std::size_t>(c)] / opt.magnification;
            const double s = std::max(0.0, pat.value_at(x_mol));
            mu[static_cast<std::size_t>(c)] = s;
            mu_sum += s;
        }
        if (mu_sum <= 0.0) return;
        const double row_counts = opt.total_counts * row_mass[r] / mass_sum;
        for (int c = 0; c < opt.n_cols; ++c) {
            const double mean = row_counts * mu[static_cast<std::size_t>(c)] / mu_sum;
            Rng rng(opt.seed, r * static_cast<std::uint64_t>(opt.n_cols) +
                                  static_cast<std::uint64_t>(c));
            const auto idx = r * static_cast<std::size_t>(opt.n_cols) + static_cast<std::size_t>(c);
            img.counts[idx] = static_cast<std::uint32_t>(rng.poisson(mean));
        }
    });
    return img;
}

RowVisibilityTable extract_row_visibility(const DepositImage& img, double min_row_counts) {
    RowVisibilityTable tab;
    const int n = img.n_cols;
    for (int r = 0; r < img.n_rows; ++r) {
        tab.row_index.push_back(r);
        tab.y.push_back(img.y_plate[static_cast<std::size_t>(r)]);
        tab.v.push_back(img.row_velocity[static_cast<std::size_t>(r)]);

        double total = 0.0;
        for (int c = 0; c < n; ++c) total += img.at(r, c);
        if (total < min_row_counts) {
            tab.visibility.push_back(0.0);
            tab.sigma.push_back(0.0);
            tab.ok.push_back(false);
            continue;
        }

        // counts = offset + a cos(2 pi x/T) + b sin(2 pi x/T), Poisson weights
        std::vector<double> design(3 * static_cast<std::size_t>(n));
        std::vector<double> y(static_cast<std::size_t>(n));
        std::vector<double> w(static_cast<std::size_t>(n));
        for (int c = 0; c < n; ++c) {
            const double ph = 2.0 * pi * img.x_plate[static_cast<std::size_t>(c)] / img.plate_period;
            design[3 * static_cast<std::size_t>(c)] = 1.0;
            design[3 * static_cast<std::size_t>(c) + 1] = std::cos(ph);
            design[3 * static_cast<std::size_t>(c) + 2] = std::sin(ph);
            const double cnt = img.at(r, c);
            y[static_cast<std::size_t>(c)] = cnt;
            w[static_cast<std::size_t>(c)] = 1.0 / std::max(cnt, 1.0);
        }
        const FitResult fit = linear_least_squares(design, n, 3, y, w);
        const double off = fit.values[0], a = fit.values[1], b = fit.values[2];
        const double amp = std::hypot(a, b);
        if (off <= 0.0 || amp == 0.0) {
            tab.visibility.push_back(0.0);
            tab.sigma.push_back(0.0);
            tab.ok.push_back(false);
            continue;
        }
        const double vis = std::min(1.0, amp / off);
        // propagate (offset, a, b) covariance through V = sqrt(a^2+b^2)/offset
        const double g0 = -amp / (off * off);
        const double g1 = a / (amp * off);
        const double g2 = b / (amp * off);
        const auto cov = [&](int i, int j) { return fit.covariance[static_cast<std::size_t>(3 * i + j)]; };
        double var = g0 * g0 * cov(0, 0) + g1 * g1 * cov(1, 1) + g2 * g2 * cov(2, 2) +
                     2.0 * (g0 * g1 * cov(0, 1) + g0 * g2 * cov(0, 2) + g1 * g2 * cov(1, 2));
        tab.visibility.push_back(vis);
        tab.sigma.push_back(var > 0.0 ? std::sqrt(var) : 0.0);
        tab.ok.push_back(true);
    }
    return tab;
}

void write_deposit_pgm(const DepositImage& img, const std::string& path) {
    std::uint32_t peak = 1;
    for (auto c : img.counts) peak = std::max(peak, c);
    std::ostringstream out;
    out << "P2\n# fringe deposit, rows sorted by velocity\n"
        << img.n_cols << ' ' << img.n_rows << "\n65535\n";
    for (int r = 0; r < img.n_rows; ++r) {
        for (int c = 0; c < img.n_cols; ++c) {
            const std::uint64_t scaled =
                static_cast<std::uint64_t>(img.at(r, c)) * 65535u / peak;
            out << scaled;
            out << (c + 1 == img.n_cols ? '\n' : ' ');
        }
    }
    atomic_write_text(path, out.str());
}

void write_row_table_csv(const RowVisibilityTable& table, const std::string& path,
                         const std::string& header_comment) {
    std::ostringstream out;
    if (!header_comment.empty()) out << header_comment;
    out << "row_index,y_m,v_mps,visibility,sigma_v\n";
    for (std::size_t i = 0; i < table.row_index.size(); ++i) {
        if (!table.ok[i]) continue;
        out << table.row_index[i] << ',' << format_double(table.y[i]) << ','
            << format_double(table.v[i]) << ',' << format_double(table.visibility[i]) << ','
            << format_double(table.sigma[i]) << '\n';
    }
    atomic_write_text(path, out.str());
}

} // namespace mwi
