#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mwi/core.hpp"

namespace mwi {

// free-fall drop over the field-free flight after the interferometer
double fall_height(double v, double flight_length);

struct DepositOptions {
    int n_rows = 64;            // velocity bins, ascending speed
    int n_cols = 256;           // scan positions across four fringe periods
    double magnification = 1.0; // plate fringe period / molecular period
    double flight_length = 0.0; // m
    double total_counts = 1e7;  // expected molecules on the plate
    double min_row_counts = 1000.0;  // rows with fewer counts are not fitted
    std::uint64_t seed = 1;
};

// Magnified fringe deposit: rows are velocity classes sorted by fall height,
// columns sample the fringe profile; counts are Poissonian.
struct DepositImage {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<std::uint32_t> counts;  // row-major
    std::vector<double> x_plate;        // column centers, m
    std::vector<double> y_plate;        // row fall heights, m
    std::vector<double> row_velocity;   // m/s
    double plate_period = 0.0;          // m
    double scan_step = 0.0;             // column pitch, m

    std::uint32_t at(int r, int c) const {
        return counts[static_cast<std::size_t>(r) * static_cast<std::size_t>(n_cols) +
                      static_cast<std::size_t>(c)];
    }
};

DepositImage simulate_deposit(const std::function<InterferencePattern(double)>& pattern_for_v,
                              const VelocityDistribution& v_dist, const DepositOptions& opt);

struct RowVisibilityTable {
    std::vector<int> row_index;
    std::vector<double> y;           // m
    std::vector<double> v;           // m/s
    std::vector<double> visibility;
    std::vector<double> sigma;
    std::vector<bool> ok;            // false when the row had too few counts
};

// per-row sinusoid fit at the known plate period
RowVisibilityTable extract_row_visibility(const DepositImage& img, double min_row_counts = 1000.0);

// 16-bit ASCII PGM of the raw counts (scaled to the full range)
void write_deposit_pgm(const DepositImage& img, const std::string& path);

// CSV row table: row_index, y_m, v_mps, visibility, sigma_v
void write_row_table_csv(const RowVisibilityTable& table, const std::string& path,
                         const std::string& header_comment = "");

} // namespace mwi
