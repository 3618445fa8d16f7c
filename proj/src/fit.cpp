#include "mwi/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace mwi {

namespace {

// solve A x = b in place for small dense systems, partial pivoting
std::vector<double> solve_dense(std::vector<double> A, std::vector<double> b, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(A[r * n + col]) > std::fabs(A[piv * n + col])) piv = r;
        if (std::fabs(A[piv * n + col]) < 1e-300)
            throw std::runtime_error("fit: singular normal equations");
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(A[col * n + c], A[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        for (int r = col + 1; r < n; ++r) {
            double fac = A[r * n + col] / A[col * n + col];
            for (int c = col; c < n; ++c) A[r * n + c] -= fac * A[col * n + c];
            b[r] -= fac * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[r * n + c] * x[c];
        x[r] = s / A[r * n + r];
    }
    return x;
}

std::vector<double> invert_dense(const std::vector<double>& A, int n) {
    std::vector<double> inv(n * n);
    for (int col = 0; col < n; ++col) {
        std::vector<double> e(n, 0.0);
        e[col] = 1.0;
        auto x = solve_dense(A, e, n);
        for (int r = 0; r < n; ++r) inv[r * n + col] = x[r];
    }
    return inv;
}

} // namespace

FitResult linear_least_squares(const std::vector<double>& design, int n_points,
                               int n_params, const std::vector<double>& y,
                               const std::vector<double>& weights) {
    if (n_points < n_params)
        throw std::invalid_argument("linear_least_squares: underdetermined system");
    std::vector<double> ata(n_params * n_params, 0.0), atb(n_params, 0.0);
    for (int i = 0; i < n_points; ++i) {
        double w = weights.empty() ? 1.0 : weights[i];
        for (int a = 0; a < n_params; ++a) {
            double da = design[i * n_params + a];
            atb[a] += w * da * y[i];
            for (int b = 0; b < n_params; ++b)
                ata[a * n_params + b] += w * da * design[i * n_params + b];
        }
    }
    FitResult out;
    out.values = solve_dense(ata, atb, n_params);
    out.covariance = invert_dense(ata, n_params);
    out.std_errors.resize(n_params);
    for (int a = 0; a < n_params; ++a)
        out.std_errors[a] = std::sqrt(std::max(0.0, out.covariance[a * n_params + a]));
    double chi2 = 0.0;
    for (int i = 0; i < n_points; ++i) {
        double w = weights.empty() ? 1.0 : weights[i];
        double model = 0.0;
        for (int a = 0; a < n_params; ++a) model += out.values[a] * design[i * n_params + a];
        chi2 += w * (y[i] - model) * (y[i] - model);
    }
    out.chi2 = chi2;
    out.residual_norm = std::sqrt(chi2);
    out.dof = n_points - n_params;
    return out;
}

FitResult levenberg_marquardt(
    const std::function<std::vector<double>(const std::vector<double>&)>& residuals,
    std::vector<double> p, int max_iter, double tol) {
    const int n = static_cast<int>(p.size());
    auto r = residuals(p);
    const int m = static_cast<int>(r.size());
    auto cost = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return s;
    };
    double c = cost(r);
    double lambda = 1e-3;
    FitResult out;
    out.converged = false;

    std::vector<double> jac(m * n);
    for (int it = 0; it < max_iter; ++it) {
        // forward-difference Jacobian
        for (int a = 0; a < n; ++a) {
            double h = 1e-7 * std::max(1.0, std::fabs(p[a]));
            auto pp = p;
            pp[a] += h;
            auto rp = residuals(pp);
            for (int i = 0; i < m; ++i) jac[i * n + a] = (rp[i] - r[i]) / h;
        }
        std::vector<double> jtj(n * n, 0.0), jtr(n, 0.0);
        for (int i = 0; i < m; ++i)
            for (int a = 0; a < n; ++a) {
                jtr[a] += jac[i * n + a] * r[i];
                for (int b = 0; b < n; ++b) jtj[a * n + b] += jac[i * n + a] * jac[i * n + b];
            }
        bool stepped = false;
        for (int tries = 0; tries < 50 && !stepped; ++tries) {
            auto lhs = jtj;
            for (int a = 0; a < n; ++a) lhs[a * n + a] += lambda * jtj[a * n + a];
            std::vector<double> delta;
            try {
                delta = solve_dense(lhs, jtr, n);
            } catch (const std::runtime_error&) {
                lambda *= 10.0;
                continue;
            }
            auto pnew = p;
            for (int a = 0; a < n; ++a) pnew[a] -= delta[a];
            auto rnew = residuals(pnew);
            double cnew = cost(rnew);
            if (cnew <= c) {
                double dstep = 0.0;
                for (int a = 0; a < n; ++a)
                    dstep = std::max(dstep, std::fabs(delta[a]) / std::max(1.0, std::fabs(p[a])));
                p = pnew;
                r = rnew;
                double improvement = c - cnew;
                c = cnew;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (dstep < tol || improvement < tol * (c + tol)) {
                    out.converged = true;
                    it = max_iter;   // leave outer loop
                }
            } else {
                lambda *= 10.0;
            }
        }
        ++out.iterations;
        if (!stepped) { out.converged = true; break; }  // no downhill step left
    }

    // covariance from (J^T J)^-1 at the solution, scaled by reduced chi^2
    for (int a = 0; a < n; ++a) {
        double h = 1e-7 * std::max(1.0, std::fabs(p[a]));
        auto pp = p;
        pp[a] += h;
        auto rp = residuals(pp);
        for (int i = 0; i < m; ++i) jac[i * n + a] = (rp[i] - r[i]) / h;
    }
    std::vector<double> jtj(n * n, 0.0);
    for (int i = 0; i < m; ++i)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) jtj[a * n + b] += jac[i * n + a] * jac[i * n + b];
    out.values = p;
    out.chi2 = c;
    out.residual_norm = std::sqrt(c);
    out.dof = std::max(1, m - n);
    try {
        out.covariance = invert_dense(jtj, n);
        double s2 = c / out.dof;
        out.std_errors.resize(n);
        for (int a = 0; a < n; ++a)
            out.std_errors[a] = std::sqrt(std::max(0.0, out.covariance[a * n + a] * s2));
    } catch (const std::runtime_error&) {
        out.covariance.assign(n * n, 0.0);
        out.std_errors.assign(n, 0.0);
    }
    return out;
}

} // namespace mwi
