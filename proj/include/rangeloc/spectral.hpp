#pragma once

#include "rangeloc/kinematics.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

namespace rangeloc {

using Complex = std::complex<double>;

/// Fourier coefficients c_0..c_nmax of the periodic extension of z^2(t) over
/// one window, c_n ~ (1/T) * integral of z^2 exp(-j 2 pi n t / T).
struct Spectrum {
    std::vector<Complex> coefficients;
    Window window;

    int max_index() const noexcept { return static_cast<int>(coefficients.size()) - 1; }
    const Complex& operator[](int n) const { return coefficients.at(static_cast<std::size_t>(n)); }
};

/// Squared samples with the t = 0 term replaced by the midpoint of the jump
/// z^2(0), z^2(T) when the trace carries a closing sample (trapezoid rule);
/// plain squares otherwise.
std::vector<double> squared_periodic_samples(const DistanceTrace& trace);

/// (1/M) * sum_m x[m] exp(-j 2 pi n m / M) for any 0 <= n < M.
Complex dft_coefficient(std::span<const double> x, int n);

/// Throws Error(IndexOverflow) unless n_max < M/2.
Spectrum spectrum_of_squared_trace(const DistanceTrace& trace, const Window& w, int n_max);

/// Fourier coefficient of the periodic extension of (d + v t) cos(2 pi k t / T)
/// over [0, T). Requires k > 0, n > 0, T > 0.
Complex linear_cosine_coefficient(double d, double v, double period, int k, int n);

/// Fourier coefficient of the periodic extension of a t^2 + b t over [0, T).
/// Throws Error(ZeroIndex) for n = 0.
Complex quadratic_ramp_coefficient(double a, double b, double period, int n);

/// Sampled-spectrum replacement for 1/x: sum over l of 1/(x + l M), taken
/// symmetrically, which is (pi/M) cot(pi x / M). sample_count = 0 gives 1/x.
double harmonic_kernel(double x, int sample_count) noexcept;

/// Sampled-spectrum replacement for 1/n^2: (pi/M)^2 / sin^2(pi n / M).
double harmonic_kernel_squared(double n, int sample_count) noexcept;

/// Rows [1/n^2, 1/n, 1/(n-k1)+1/(n+k1), 1/(n-k2)+1/(n+k2)] for each index;
/// columns multiply (R, j I, 2U, 2W). Full rank whenever the indices, k1 and
/// k2 are distinct positive integers. Throws Error(IndexClash) otherwise.
Eigen::MatrixXd coefficient_matrix(std::span<const int> indices, int k1, int k2);

/// Smallest max index leaving at least eight spare regular indices.
int default_max_index(int k1, int k2) noexcept;

/// The `count` smallest positive indices outside {|k1|, |k2|, |k1 - k2|}.
std::vector<int> default_solve_indices(int k1, int k2, int count = 8);

}  // namespace rangeloc
