#pragma once
#include <functional>
#include <vector>

namespace mwi {

// Result of a least-squares fit. covariance is row-major n x n.
struct FitResult {
    std::vector<double> values;
    std::vector<double> std_errors;
    std::vector<double> covariance;
    double residual_norm = 0.0;   // sqrt(sum of weighted squared residuals)
    double chi2 = 0.0;            // sum of weighted squared residuals
    int dof = 0;
    int iterations = 0;
    bool converged = true;
};

// Weighted linear least squares: y ~ sum_k beta_k * basis[k](x_i).
// design is row-major (n_points x n_params). weights are 1/sigma_i^2.
// Covariance is (A^T W A)^-1 (errors taken from the stated weights).
FitResult linear_least_squares(const std::vector<double>& design, int n_points,
                               int n_params, const std::vector<double>& y,
                               const std::vector<double>& weights);

// Levenberg-Marquardt on a residual vector r(p) (already weighted); the
// Jacobian is forward-differenced. Small dense problems only.
FitResult levenberg_marquardt(
    const std::function<std::vector<double>(const std::vector<double>&)>& residuals,
    std::vector<double> p0, int max_iter = 200, double tol = 1e-12);

} // namespace mwi
