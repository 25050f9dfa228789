#include "rangeloc/estimator.hpp"

#include "rangeloc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <set>
#include <string>

namespace rangeloc {

namespace {

constexpr double kPi = M_PI;
constexpr double kTieTolerance = 1e-9;
constexpr double kMinRelativeRadius = 1e-9;

struct ModelTerms {
    int k1{0};
    std::optional<int> k2;
    int samples{0};
};

// 2 S ker(n - k) - 2 conj(S) ker(n + k), skipping whichever half is singular.
Complex sideband(int n, int k, Complex amp, int samples) {
    Complex out{0.0, 0.0};
    if (n != k) out += 2.0 * amp * harmonic_kernel(n - k, samples);
    if (n != -k) out -= 2.0 * std::conj(amp) * harmonic_kernel(n + k, samples);
    return out;
}

Complex model_at(const SolveBlock& b, int n, const ModelTerms& t) {
    Complex v = b.quadratic * harmonic_kernel_squared(n, t.samples) +
                Complex(0.0, 1.0) * b.linear * harmonic_kernel(n, t.samples);
    v += sideband(n, t.k1, b.own_sideband, t.samples);
    if (t.k2) v += sideband(n, *t.k2, b.neighbor_sideband, t.samples);
    return v;
}

// Real and imaginary design blocks; columns R, I, U, W (W only with k2).
void design(std::span<const int> indices, const ModelTerms& t, Eigen::MatrixXd& re, Eigen::MatrixXd& im) {
    const int cols = t.k2 ? 4 : 3;
    const auto rows = static_cast<Eigen::Index>(indices.size());
    re.resize(rows, cols);
    im.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const int n = indices[static_cast<std::size_t>(r)];
        const int m = t.samples;
        const double q = harmonic_kernel_squared(n, m);
        const double p = harmonic_kernel(n, m);
        const double a1 = harmonic_kernel(n - t.k1, m);
        const double b1 = harmonic_kernel(n + t.k1, m);
        re(r, 0) = q;
        re(r, 1) = -p;
        re(r, 2) = 2.0 * (a1 - b1);
        im(r, 0) = q;
        im(r, 1) = p;
        im(r, 2) = 2.0 * (a1 + b1);
        if (t.k2) {
            const double a2 = harmonic_kernel(n - *t.k2, m);
            const double b2 = harmonic_kernel(n + *t.k2, m);
            re(r, 3) = 2.0 * (a2 - b2);
            im(r, 3) = 2.0 * (a2 + b2);
        }
    }
}

// Real and imaginary parts decouple into two real blocks sharing the index set.
SolveBlock fit_blocks(const Spectrum& s, std::span<const int> indices, const ModelTerms& t) {
    const int cols = t.k2 ? 4 : 3;
    Eigen::MatrixXd re;
    Eigen::MatrixXd im;
    design(indices, t, re, im);
    Eigen::VectorXd yr(re.rows());
    Eigen::VectorXd yi(re.rows());
    for (Eigen::Index r = 0; r < re.rows(); ++r) {
        yr(r) = s[indices[static_cast<std::size_t>(r)]].real();
        yi(r) = s[indices[static_cast<std::size_t>(r)]].imag();
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_re(re);
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_im(im);
    if (qr_re.rank() < cols || qr_im.rank() < cols) {
        throw Error(ErrorCode::SingularSystem, "drift/sideband system is rank deficient");
    }
    const Eigen::VectorXd xr = qr_re.solve(yr);
    const Eigen::VectorXd xi = qr_im.solve(yi);
    SolveBlock b;
    b.quadratic = {xr(0), xi(0)};
    b.linear = {xi(1), xr(1)};
    b.own_sideband = {xr(2), xi(2)};
    if (t.k2) b.neighbor_sideband = {xr(3), xi(3)};
    b.indices.assign(indices.begin(), indices.end());
    return b;
}

// Standard error of Re R for unit per-coefficient misfit.
double quadratic_sensitivity(std::span<const int> indices, const ModelTerms& t) {
    Eigen::MatrixXd re;
    Eigen::MatrixXd im;
    design(indices, t, re, im);
    const Eigen::MatrixXd normal = re.transpose() * re;
    return std::sqrt(std::max(normal.inverse()(0, 0), 0.0));
}

double spectrum_norm(const Spectrum& s) {
    double acc = 0.0;
    for (int n = 1; n <= s.max_index(); ++n) acc += std::norm(s[n]);
    return std::sqrt(acc);
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    const double hi = *mid;
    const double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
}

std::vector<int> regular_indices(int n_max, const std::set<int>& excluded) {
    std::vector<int> out;
    for (int n = 1; n <= n_max; ++n) {
        if (!excluded.count(n)) out.push_back(n);
    }
    return out;
}

void check_pair(int k1, int k2) {
    const int a = std::abs(k1);
    const int b = std::abs(k2);
    const int x = std::abs(k1 - k2);
    if (a == 0 || b == 0 || a == b || x == a || x == b) {
        throw Error(ErrorCode::IndexClash, "harmonics " + std::to_string(k1) + ", " + std::to_string(k2) +
                                               " do not give three distinct nonzero peaks");
    }
}

struct Hypothesis {
    int k2{0};
    double rho{0.0};
    double height{0.0};
    bool peaked{false};
};

}  // namespace

SolveBlock solve_drift_and_sidebands(const Spectrum& s, int k1, int k2, std::span<const int> indices) {
    check_pair(k1, k2);
    if (indices.size() < 4) throw Error(ErrorCode::IndexClash, "need at least four indices");
    const std::set<int> excluded{std::abs(k1), std::abs(k2), std::abs(k1 - k2)};
    std::set<int> seen;
    for (int n : indices) {
        if (n <= 0 || n > s.max_index() || excluded.count(n) || !seen.insert(n).second) {
            throw Error(ErrorCode::IndexClash, "solve index " + std::to_string(n) + " is not admissible");
        }
    }
    return fit_blocks(s, indices, {k1, k2, s.window.sample_count});
}

PeakIdentification identify_neighbor_harmonic(const Spectrum& s, int k1, double own_radius,
                                              const IdentifyOptions& options) {
    const int n_max = s.max_index();
    const int a1 = std::abs(k1);
    if (a1 == 0 || a1 > n_max) throw Error(ErrorCode::InvalidArgument, "own harmonic outside the spectrum");
    const int samples = s.window.sample_count;
    const double scale = spectrum_norm(s) / std::sqrt(std::max(n_max, 1));
    const double floor = 1e-9 * scale;

    std::vector<Hypothesis> hyps;
    for (int m = 1; m <= n_max; ++m) {
        if (m == a1) continue;
        for (int sign : {1, -1}) {
            const int k2 = sign * m;
            const int x = std::abs(k1 - k2);
            if (x == 0 || x == a1 || x == m || x > n_max) continue;
            const std::vector<int> idx = regular_indices(n_max, {a1, m, x});
            if (idx.size() < 6) continue;
            const ModelTerms terms{k1, k2, samples};
            SolveBlock b;
            try {
                b = fit_blocks(s, idx, terms);
            } catch (const Error&) {
                continue;
            }
            std::vector<double> dev;
            dev.reserve(idx.size());
            double sq = 0.0;
            for (int n : idx) {
                dev.push_back(std::abs(s[n] - model_at(b, n, terms)));
                sq += dev.back() * dev.back();
            }
            const double gate = std::max(options.peak_factor * median(dev), floor);
            const double peak_excess = std::abs(s[m] - model_at(b, m, terms));
            const double cross_excess = std::abs(s[x] - model_at(b, x, terms));
            hyps.push_back({k2, std::sqrt(sq / static_cast<double>(idx.size())), std::abs(s[m]),
                            peak_excess > gate && cross_excess > gate});
        }
    }

    double rho_min = std::numeric_limits<double>::infinity();
    for (const auto& h : hyps) rho_min = std::min(rho_min, h.rho);
    const Hypothesis* best = nullptr;
    for (const auto& h : hyps) {
        if (!h.peaked || h.rho > 2.0 * rho_min + floor) continue;
        if (!best || h.height > best->height) best = &h;
    }

    if (best) {
        PeakIdentification out;
        out.magnitude = std::abs(best->k2);
        for (int sign : {1, -1}) {
            const int x = std::abs(k1 - sign * out.magnitude);
            if (x != 0 && x != a1 && x != out.magnitude && x <= n_max) out.sign_candidates.push_back(sign);
        }
        return out;
    }

    // No separate peak. A neighbor at |k2| = |k1| hides under the own peak;
    // it still shows as a sideband inconsistent with the drift (k2 = k1) or as
    // a lone cross peak at 2|k1| (k2 = -k1).
    if (own_radius > 0.0 && n_max > 2 * a1) {
        const std::vector<int> idx = regular_indices(n_max, {a1});
        const ModelTerms own_only{k1, std::nullopt, samples};
        SolveBlock b = fit_blocks(s, idx, own_only);
        const double T = s.window.period;
        const double from_sideband = 4.0 * kPi * std::abs(b.own_sideband) / (own_radius * T);
        const double from_drift = speed_norm_from_quadratic(b.quadratic, T);
        const bool speed_mismatch =
            std::abs(from_sideband - from_drift) > 1e-3 * std::max(from_drift, from_sideband) + floor;

        const std::vector<int> idx2 = regular_indices(n_max, {a1, 2 * a1});
        bool lone_cross = false;
        try {
            // k2 = -k1 makes the neighbor sideband columns collinear with the
            // own ones, so fit the own model and look at 2|k1| only.
            SolveBlock c = fit_blocks(s, idx2, own_only);
            std::vector<double> dev;
            for (int n : idx2) dev.push_back(std::abs(s[n] - model_at(c, n, own_only)));
            const double gate = std::max(options.peak_factor * median(dev), floor);
            lone_cross = std::abs(s[2 * a1] - model_at(c, 2 * a1, own_only)) > gate;
        } catch (const Error&) {
        }
        if (speed_mismatch || lone_cross) {
            throw Error(ErrorCode::AmbiguousSpectrum, "neighbor peak coincides with the own harmonic " +
                                                          std::to_string(a1));
        }
    }
    throw Error(ErrorCode::NoPeak, "no neighbor peak above threshold");
}

NeighborEstimate recover_state(const Spectrum& s, const SolveBlock& blk, int k1, int k2, double r1) {
    if (!(r1 > 0.0)) throw Error(ErrorCode::DegenerateRadius, "own radius is zero; neighbor direction is unobservable");
    // The own peak scales with r1 d; below this it is lost in rounding of c_0 ~ d^2.
    if (r1 <= kMinRelativeRadius * std::sqrt(std::abs(s[0]))) {
        throw Error(ErrorCode::DegenerateRadius, "own radius too small to resolve the neighbor direction");
    }
    check_pair(k1, k2);
    const int samples = s.window.sample_count;
    const double T = s.window.period;
    const int n = std::abs(k1);
    const Complex j{0.0, 1.0};
    const Complex U = blk.own_sideband;

    Complex u = s[n] - blk.quadratic * harmonic_kernel_squared(n, samples) -
                j * blk.linear * harmonic_kernel(n, samples) - sideband(n, k2, blk.neighbor_sideband, samples);
    Complex g;
    if (k1 > 0) {
        u += 2.0 * std::conj(U) * harmonic_kernel(n + k1, samples);
        g = u;
    } else {
        u -= 2.0 * U * harmonic_kernel(n - k1, samples);
        g = std::conj(u);
    }
    const Complex h = g + 2.0 * kPi * j * U;
    const double arg_h = std::arg(h);

    NeighborEstimate e;
    e.distance = std::abs(h) / r1;
    e.own_phase = wrap_angle(arg_h - kPi);
    const Complex q = 4.0 * kPi * U / (T * r1 * std::polar(1.0, arg_h));
    e.relative_velocity = {q.imag(), q.real()};
    e.neighbor_harmonic = k2;
    e.neighbor_omega = 2.0 * kPi * k2 / T;
    e.speed_norm = e.relative_velocity.norm();

    const ModelTerms terms{k1, k2, samples};
    std::set<int> skip{n, std::abs(k2), std::abs(k1 - k2)};
    skip.insert(blk.indices.begin(), blk.indices.end());
    double mismatch = 0.0;
    for (int m : regular_indices(s.max_index(), skip)) mismatch += std::norm(s[m] - model_at(blk, m, terms));
    const double denom = spectrum_norm(s);
    e.residual = denom > 0.0 ? std::sqrt(mismatch) / denom : 0.0;
    return e;
}

std::vector<int> solve_indices(int k1, int k2, int n_max, int rows) {
    std::vector<int> idx;
    if (rows > 0) {
        idx = default_solve_indices(k1, k2, rows);
    } else {
        const std::set<int> excluded{std::abs(k1), std::abs(k2), std::abs(k1 - k2)};
        bool take = true;
        for (int n : regular_indices(n_max, excluded)) {
            if (take) idx.push_back(n);
            take = !take;
        }
    }
    if (idx.size() < 4 || idx.back() > n_max) {
        throw Error(ErrorCode::IndexOverflow, "spectrum too short for the solve rows");
    }
    return idx;
}

NeighborEstimate resolve_neighbor_sign(const Spectrum& s, int k1, int k2_magnitude, double r1,
                                       std::span<const int> signs, int solve_rows) {
    const std::vector<int> both{1, -1};
    if (signs.empty()) signs = both;
    std::vector<NeighborEstimate> results;
    for (int sign : signs) {
        const int k2 = sign * std::abs(k2_magnitude);
        const int x = std::abs(k1 - k2);
        if (k2 == 0 || x == 0 || x == std::abs(k1) || x == std::abs(k2) || x > s.max_index()) continue;
        const std::vector<int> idx = solve_indices(k1, k2, s.max_index(), solve_rows);
        results.push_back(recover_state(s, solve_drift_and_sidebands(s, k1, k2, idx), k1, k2, r1));
    }
    if (results.empty()) {
        throw Error(ErrorCode::IndexClash, "no admissible sign for |k2| = " + std::to_string(k2_magnitude));
    }
    if (results.size() == 1) return results.front();
    if (std::abs(results[0].residual - results[1].residual) <= kTieTolerance) {
        throw Error(ErrorCode::AmbiguousSign, "both rotation directions fit the spectrum equally well");
    }
    return results[0].residual < results[1].residual ? results[0] : results[1];
}

double speed_norm_from_quadratic(Complex quadratic, double period) noexcept {
    return kPi * std::sqrt(2.0 * std::max(quadratic.real(), 0.0)) / period;
}

Window choose_window(double omega1, double omega2_abs, double tol, double max_period, int sample_count) {
    if (omega1 == 0.0 || !std::isfinite(omega1)) throw Error(ErrorCode::InvalidArgument, "own omega must be nonzero");
    if (!(tol > 0.0 && tol < 0.5)) throw Error(ErrorCode::InvalidArgument, "tolerance must lie in (0, 0.5)");
    const double base = 2.0 * kPi / std::abs(omega1);
    const double limit = max_period * (1.0 + 1e-12);
    for (long m = 1; base * static_cast<double>(m) <= limit; ++m) {
        const double T = base * static_cast<double>(m);
        const double k2 = std::abs(omega2_abs) * T / (2.0 * kPi);
        const double nearest = std::round(k2);
        if (std::abs(k2 - nearest) <= tol) {
            Window w;
            w.period = T;
            w.sample_count = sample_count;
            w.harmonics = {omega1 > 0 ? static_cast<int>(m) : -static_cast<int>(m), static_cast<int>(nearest)};
            return w;
        }
    }
    throw Error(ErrorCode::NoWindow, "no commensurate window up to T = " + std::to_string(max_period));
}

FrameLink frame_link(double own_phase, double phi1_hat) noexcept {
    return {wrap_angle(own_phase - phi1_hat)};
}

LinearMotionEstimate estimate_linear_motion(const Spectrum& s) {
    const int n_max = s.max_index();
    if (n_max < 2) throw Error(ErrorCode::InvalidArgument, "need at least two nonzero indices");
    const int samples = s.window.sample_count;
    const double T = s.window.period;
    double rq = 0.0, qq = 0.0, ip = 0.0, pp = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const double q = harmonic_kernel_squared(n, samples);
        const double p = harmonic_kernel(n, samples);
        rq += s[n].real() * q;
        qq += q * q;
        ip += s[n].imag() * p;
        pp += p * p;
    }
    const double R = rq / qq;
    const double I = ip / pp;
    const double a = std::max(2.0 * kPi * kPi * R / (T * T), 0.0);
    const double b = (2.0 * kPi * I - a * T * T) / T;
    const double m = samples;
    const double d2 = s[0].real() - kPi * I + a * T * T / 6.0 - a * T * T / (6.0 * m * m);

    LinearMotionEstimate e;
    e.distance = std::sqrt(std::max(d2, 0.0));
    e.speed_norm = std::sqrt(a);
    e.along_track = e.distance > 0.0 ? b / (2.0 * e.distance) : 0.0;
    e.cross_track_magnitude = std::sqrt(std::max(a - e.along_track * e.along_track, 0.0));
    return e;
}

double estimate_speed_norm(const Spectrum& s, int k1) {
    const int n_max = s.max_index();
    const int bound = std::max(1, (n_max - 12) / 2);
    // Every neighbor hypothesis, plus none; the best-fitting one sets R.
    std::vector<std::optional<int>> hypotheses{std::nullopt};
    for (int m = 1; m <= bound; ++m) {
        for (int k2 : {m, -m}) {
            const int x = std::abs(k1 - k2);
            if (m != std::abs(k1) && x != 0 && x != m && x != std::abs(k1) && x <= n_max) hypotheses.emplace_back(k2);
        }
    }
    double best_rho = std::numeric_limits<double>::infinity();
    std::optional<Complex> best;
    double best_floor = 0.0;
    for (const std::optional<int>& k2 : hypotheses) {
        std::set<int> excluded{std::abs(k1)};
        if (k2) {
            excluded.insert(std::abs(*k2));
            excluded.insert(std::abs(k1 - *k2));
        }
        const std::vector<int> idx = regular_indices(n_max, excluded);
        if (idx.size() < 6) continue;
        const ModelTerms terms{k1, k2, s.window.sample_count};
        SolveBlock b;
        try {
            b = fit_blocks(s, idx, terms);
        } catch (const Error&) {
            continue;
        }
        double acc = 0.0;
        for (int n : idx) acc += std::norm(s[n] - model_at(b, n, terms));
        const double rho = std::sqrt(acc / static_cast<double>(idx.size()));
        if (rho < best_rho) {
            best_rho = rho;
            best = b.quadratic;
            // No fit beats the rounding of the squared samples themselves.
            const double noise = std::max(rho, std::numeric_limits<double>::epsilon() * std::abs(s[0]));
            best_floor = 10.0 * noise * quadratic_sensitivity(idx, terms);
        }
    }
    if (!best) throw Error(ErrorCode::InvalidArgument, "spectrum too short for a speed fit");
    // Within ten standard errors of zero the fit cannot tell R from zero.
    if (best->real() <= best_floor) return 0.0;
    return speed_norm_from_quadratic(*best, s.window.period);
}

NeighborEstimate estimate_neighbor(const DistanceTrace& trace, const Window& w, const OwnMotion& own,
                                   const EstimateOptions& options) {
    if (own.harmonic == 0) throw Error(ErrorCode::InvalidArgument, "own harmonic must be nonzero");
    if (!(own.radius > 0.0)) throw Error(ErrorCode::DegenerateRadius, "own radius is zero; neighbor direction is unobservable");
    int n_max = options.max_index;
    if (n_max <= 0) {
        if (options.neighbor_harmonic) {
            n_max = default_max_index(own.harmonic, *options.neighbor_harmonic);
        } else {
            if (options.max_neighbor_harmonic <= 0) {
                throw Error(ErrorCode::InvalidArgument, "unknown neighbor harmonic needs a bound");
            }
            n_max = 2 * std::max(std::abs(own.harmonic), options.max_neighbor_harmonic) + 12;
        }
    }
    const Spectrum s = spectrum_of_squared_trace(trace, w, n_max);
    if (options.neighbor_harmonic) {
        const int k2 = *options.neighbor_harmonic;
        const std::vector<int> idx = solve_indices(own.harmonic, k2, s.max_index(), options.solve_rows);
        return recover_state(s, solve_drift_and_sidebands(s, own.harmonic, k2, idx), own.harmonic, k2, own.radius);
    }
    const PeakIdentification peak = identify_neighbor_harmonic(s, own.harmonic, own.radius, options.identify);
    std::vector<int> signs = peak.sign_candidates;
    if (options.known_sign != 0) signs = {options.known_sign > 0 ? 1 : -1};
    return resolve_neighbor_sign(s, own.harmonic, peak.magnitude, own.radius, signs, options.solve_rows);
}

}  // namespace rangeloc
