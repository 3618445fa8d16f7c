#pragma once
#include <functional>
#include <utility>
#include <vector>

namespace mwi {

// Gauss-Legendre nodes/weights on [-1, 1]; results are cached per n.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n);

// integral of f over [a, b] with an n-point Gauss-Legendre rule
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n);

// adaptive Simpson with absolute tolerance on the result
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 40);

// plain N-interval trapezoid (brute-force oracle helper)
double integrate_trapezoid(const std::function<double(double)>& f, double a, double b, int n);

} // namespace mwi
