#include "rangeloc/spectral.hpp"

#include "rangeloc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <string>

namespace rangeloc {

namespace {

constexpr double kPi = M_PI;

struct Neumaier {
    double sum{0.0};
    double carry{0.0};

    void add(double v) {
        const double t = sum + v;
        carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

// cos/sin of 2 pi m / M for m = 0..M-1; indexing with (n*m) mod M keeps every
// twiddle exact to table precision.
struct TwiddleTable {
    std::vector<double> c;
    std::vector<double> s;

    explicit TwiddleTable(std::size_t m) : c(m), s(m) {
        for (std::size_t i = 0; i < m; ++i) {
            const double angle = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(m);
            c[i] = std::cos(angle);
            s[i] = std::sin(angle);
        }
    }

    // Compensated sums; `offset` is subtracted from every sample, which leaves
    // n != 0 unchanged and keeps the products small.
    Complex coefficient(std::span<const double> x, int n, double offset = 0.0) const {
        const std::size_t m = x.size();
        const std::size_t step = static_cast<std::size_t>(n) % m;
        Neumaier re;
        Neumaier im;
        std::size_t idx = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const double y = x[i] - offset;
            re.add(y * c[idx]);
            im.add(-y * s[idx]);
            idx += step;
            if (idx >= m) idx -= m;
        }
        return {re.value() / static_cast<double>(m), im.value() / static_cast<double>(m)};
    }
};

}  // namespace

std::vector<double> squared_periodic_samples(const DistanceTrace& trace) {
    std::vector<double> sq(trace.samples.size());
    std::transform(trace.samples.begin(), trace.samples.end(), sq.begin(), [](double z) { return z * z; });
    if (trace.closing_sample && !sq.empty()) {
        const double end = *trace.closing_sample;
        sq.front() = 0.5 * (sq.front() + end * end);
    }
    return sq;
}

Complex dft_coefficient(std::span<const double> x, int n) {
    if (x.empty()) throw Error(ErrorCode::InvalidArgument, "empty sample sequence");
    if (n < 0 || static_cast<std::size_t>(n) >= x.size()) {
        throw Error(ErrorCode::IndexOverflow, "DFT index " + std::to_string(n) + " outside [0, M)");
    }
    return TwiddleTable(x.size()).coefficient(x, n);
}

Spectrum spectrum_of_squared_trace(const DistanceTrace& trace, const Window& w, int n_max) {
    validate_window(w);
    if (trace.size() != static_cast<std::size_t>(w.sample_count)) {
        throw Error(ErrorCode::InvalidArgument, "trace length does not match the window sample count");
    }
    if (n_max < 0 || 2 * n_max >= w.sample_count) {
        throw Error(ErrorCode::IndexOverflow,
                    "n_max " + std::to_string(n_max) + " must stay below M/2 = " + std::to_string(w.sample_count / 2));
    }
    const std::vector<double> sq = squared_periodic_samples(trace);
    const TwiddleTable table(sq.size());
    Spectrum s;
    s.window = w;
    s.coefficients.reserve(static_cast<std::size_t>(n_max) + 1);
    const Complex mean = table.coefficient(sq, 0);
    s.coefficients.push_back(mean);
    for (int n = 1; n <= n_max; ++n) s.coefficients.push_back(table.coefficient(sq, n, mean.real()));
    return s;
}

Complex linear_cosine_coefficient(double d, double v, double period, int k, int n) {
    if (k <= 0 || n <= 0 || !(period > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "linear_cosine_coefficient requires k > 0, n > 0, T > 0");
    }
    if (n == k) {
        return {0.5 * (d + 0.5 * v * period), v * period / (8.0 * kPi * k)};
    }
    const double nn = n;
    return {0.0, v * period / (4.0 * kPi) * (1.0 / (nn - k) + 1.0 / (nn + k))};
}

Complex quadratic_ramp_coefficient(double a, double b, double period, int n) {
    if (n == 0) throw Error(ErrorCode::ZeroIndex, "quadratic ramp coefficient is undefined in closed form at n = 0");
    if (!(period > 0.0)) throw Error(ErrorCode::InvalidArgument, "period must be positive");
    const double nn = n;
    const double t2 = period * period;
    return {a * t2 / (2.0 * kPi * kPi * nn * nn), (a * t2 + period * b) / (2.0 * kPi * nn)};
}

double harmonic_kernel(double x, int sample_count) noexcept {
    if (sample_count <= 0) return 1.0 / x;
    const double m = sample_count;
    return (kPi / m) / std::tan(kPi * x / m);
}

double harmonic_kernel_squared(double n, int sample_count) noexcept {
    if (sample_count <= 0) return 1.0 / (n * n);
    const double m = sample_count;
    const double s = std::sin(kPi * n / m);
    return (kPi / m) * (kPi / m) / (s * s);
}

Eigen::MatrixXd coefficient_matrix(std::span<const int> indices, int k1, int k2) {
    if (indices.size() < 4) throw Error(ErrorCode::IndexClash, "need at least four indices");
    if (k1 <= 0 || k2 <= 0 || k1 == k2) {
        throw Error(ErrorCode::IndexClash, "k1 and k2 must be distinct positive integers");
    }
    const std::set<int> forbidden{k1, k2, std::abs(k1 - k2)};
    std::set<int> seen;
    for (int n : indices) {
        if (n <= 0 || forbidden.count(n) || !seen.insert(n).second) {
            throw Error(ErrorCode::IndexClash, "index " + std::to_string(n) + " is repeated, non-positive or clashes");
        }
    }
    Eigen::MatrixXd a(static_cast<Eigen::Index>(indices.size()), 4);
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        const double n = indices[static_cast<std::size_t>(r)];
        a(r, 0) = 1.0 / (n * n);
        a(r, 1) = 1.0 / n;
        a(r, 2) = 1.0 / (n - k1) + 1.0 / (n + k1);
        a(r, 3) = 1.0 / (n - k2) + 1.0 / (n + k2);
    }
    return a;
}

int default_max_index(int k1, int k2) noexcept {
    return std::max({std::abs(k1), std::abs(k2), std::abs(k1 - k2)}) + 12;
}

std::vector<int> default_solve_indices(int k1, int k2, int count) {
    const std::set<int> excluded{0, std::abs(k1), std::abs(k2), std::abs(k1 - k2)};
    std::vector<int> out;
    for (int n = 1; static_cast<int>(out.size()) < count; ++n) {
        if (!excluded.count(n)) out.push_back(n);
    }
    return out;
}

}  // namespace rangeloc
