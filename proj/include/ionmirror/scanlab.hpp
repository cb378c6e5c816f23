// scanlab.hpp - synthetic measurement runs and the estimators used on them.
//
// A "scan" moves the mirror through a span of positions at fixed probe
// detuning and records the transmitted probe, optionally the reflected probe
// and the atom's self-interference fringe. A "spectrum" sweeps the probe
// detuning at fixed mirror position. Both can be returned noiseless or with
// Poisson counting noise; detector draws use one RNG stream per
// (record, channel) so any subset of the channels reproduces bit-for-bit.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "aberrations.hpp"
#include "core.hpp"
#include "fp.hpp"
#include "qed.hpp"
#include "rng.hpp"

namespace ionmirror::scan {

enum class ScanModel {
    fp_exact,   ///< closed-form multi-bounce transmission
    fp_weak,    ///< single-bounce (weak scatterer) limit
    qed,        ///< detuning-aware scattering model
    aberration, ///< ensemble-averaged weak limit with wavefront error
};

struct ScanRecord {
    double position = 0.0; ///< mirror displacement from the reference, m
    double phi = 0.0;      ///< round-trip phase at this position
    double transmitted = 0.0;              ///< T/t^2 (counts/mean when noisy)
    std::optional<double> reflected;       ///< R/r^2, when the mirror reflects
    std::optional<double> fluorescence;    ///< normalized self-interference fringe
};

struct ScanParams {
    ScanModel model = ScanModel::fp_exact;
    AtomScatterer atom;
    MirrorSpec mirror;
    CavityGeometry geometry;  ///< phase_offset applies; scan_delta is swept
    ProbeSpec probe;          ///< detuning used by the qed model
    aberrations::AberrationSpec aberration; ///< drives the aberration model and fringe contrast
    double scan_span = 246.5e-9; ///< total mirror travel, m (half-wave = one fringe)
    int n_points = 256;
    bool with_reflection = true;
    bool with_fluorescence = true;
    double mean_counts = 0.0; ///< Poisson mean at unit signal; 0 = noiseless
    std::uint64_t seed = 0;
};

namespace detail {

/// Draw Poisson counts around value*mean_counts and rescale; stream is unique
/// per (record, channel).
inline double poissonized(double value, double mean_counts, std::uint64_t seed,
                          std::uint64_t stream) {
    const double mu = value * mean_counts;
    if (!(mu > 0.0)) return 0.0;
    auto eng = rng::make_stream(seed, stream);
    std::poisson_distribution<long long> d(mu);
    return double(d(eng)) / mean_counts;
}

} // namespace detail

/// Synthetic mirror scan. Positions are the half-open uniform grid
/// span * i / n, i = 0..n-1, so one span covers each phase exactly once.
inline std::vector<ScanRecord> generate_scan(const ScanParams& p) {
    if (p.n_points < 1) throw std::domain_error("generate_scan: need n_points >= 1");
    if (!(p.scan_span > 0.0)) throw std::domain_error("generate_scan: scan_span must be > 0");
    if (p.mean_counts < 0.0) throw std::domain_error("generate_scan: mean_counts must be >= 0");

    const double fringe_contrast =
        aberrations::phase_average_factor(p.aberration.model, p.aberration.eta);
    const bool reflect = p.with_reflection && p.mirror.r > 0.0 &&
                         p.model != ScanModel::aberration;

    std::vector<ScanRecord> out;
    out.reserve(std::size_t(p.n_points));
    for (int i = 0; i < p.n_points; ++i) {
        const double pos = p.scan_span * double(i) / double(p.n_points);
        CavityGeometry g(p.geometry.distance, p.geometry.phase_offset, pos);
        const double phi = round_trip_phase(g, p.atom.wavelength);

        ScanRecord rec;
        rec.position = pos;
        rec.phi = phi;
        switch (p.model) {
            case ScanModel::fp_exact:
                rec.transmitted = fp::transmission_exact_norm(p.atom, p.mirror, phi);
                break;
            case ScanModel::fp_weak:
                rec.transmitted = fp::transmission_weak_norm(p.atom, p.mirror, phi);
                break;
            case ScanModel::qed:
                rec.transmitted =
                    qed::qed_transmission_norm(p.atom, p.mirror, phi, p.probe.detuning);
                break;
            case ScanModel::aberration:
                rec.transmitted = aberrations::averaged_transmission_norm(p.aberration, phi);
                break;
        }
        if (reflect) {
            const double rr = p.model == ScanModel::qed
                                  ? qed::qed_reflection_norm(p.atom, p.mirror, phi,
                                                             p.probe.detuning)
                                  : fp::reflection_off_cavity(p.atom, p.mirror, phi) /
                                        (p.mirror.r * p.mirror.r);
            rec.reflected = rr;
        }
        if (p.with_fluorescence)
            rec.fluorescence = 1.0 + fringe_contrast * std::cos(phi);

        if (p.mean_counts > 0.0) {
            const auto idx = std::uint64_t(i);
            rec.transmitted = detail::poissonized(rec.transmitted, p.mean_counts, p.seed,
                                                  idx * 4 + 0);
            if (rec.reflected)
                rec.reflected = detail::poissonized(*rec.reflected, p.mean_counts, p.seed,
                                                    idx * 4 + 1);
            if (rec.fluorescence)
                rec.fluorescence = detail::poissonized(*rec.fluorescence, p.mean_counts,
                                                       p.seed, idx * 4 + 2);
        }
        out.push_back(rec);
    }
    return out;
}

struct SpectrumRecord {
    double detuning = 0.0; ///< rad/s
    double transmission = 0.0;
    double extinction = 0.0;
};

/// Detuning sweep at fixed mirror position (closed uniform grid), with
/// optional Poisson counting noise on the transmission channel.
inline std::vector<SpectrumRecord> generate_spectrum(const AtomScatterer& atom,
                                                     const MirrorSpec& mirror, double phi,
                                                     double delta_min, double delta_max,
                                                     int n_points, double mean_counts = 0.0,
                                                     std::uint64_t seed = 0) {
    if (n_points < 2) throw std::domain_error("generate_spectrum: need n_points >= 2");
    if (!(delta_max > delta_min))
        throw std::domain_error("generate_spectrum: need delta_max > delta_min");
    if (mean_counts < 0.0)
        throw std::domain_error("generate_spectrum: mean_counts must be >= 0");
    std::vector<SpectrumRecord> out;
    out.reserve(std::size_t(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double d = delta_min + (delta_max - delta_min) * double(i) / double(n_points - 1);
        double tr = qed::qed_transmission_norm(atom, mirror, phi, d);
        if (mean_counts > 0.0)
            tr = detail::poissonized(tr, mean_counts, seed, std::uint64_t(i));
        out.push_back({d, tr, 1.0 - tr});
    }
    return out;
}

// ---- estimators ------------------------------------------------------------

namespace detail {

/// 3x3 linear solve with partial pivoting; throws on a singular system.
inline void solve3(double a[3][3], double b[3]) {
    int piv[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(a[piv[row]][col]) > std::abs(a[piv[best]][col])) best = row;
        std::swap(piv[col], piv[best]);
        const double d = a[piv[col]][col];
        if (std::abs(d) < 1e-300) throw std::domain_error("solve3: singular system");
        for (int row = col + 1; row < 3; ++row) {
            const double f = a[piv[row]][col] / d;
            for (int k = col; k < 3; ++k) a[piv[row]][k] -= f * a[piv[col]][k];
            b[piv[row]] -= f * b[piv[col]];
        }
    }
    double x[3];
    for (int col = 2; col >= 0; --col) {
        double s = b[piv[col]];
        for (int k = col + 1; k < 3; ++k) s -= a[piv[col]][k] * x[k];
        x[col] = s / a[piv[col]][col];
    }
    b[0] = x[0]; b[1] = x[1]; b[2] = x[2];
}

/// Inverse of a symmetric positive-definite 3x3 Gram matrix (for parameter
/// covariances); throws if numerically singular. The columns behind a Gram
/// matrix can live on wildly different scales, so singularity is judged on
/// the diagonally equilibrated determinant (Hadamard-normalized, in [0, 1]).
inline void invert3(const double a[3][3], double inv[3][3]) {
    const double c00 = a[1][1] * a[2][2] - a[1][2] * a[2][1];
    const double c01 = a[1][2] * a[2][0] - a[1][0] * a[2][2];
    const double c02 = a[1][0] * a[2][1] - a[1][1] * a[2][0];
    const double det = a[0][0] * c00 + a[0][1] * c01 + a[0][2] * c02;
    double scale = 1.0;
    for (int i = 0; i < 3; ++i) {
        if (!(a[i][i] > 0.0)) throw std::domain_error("invert3: singular system");
        scale *= a[i][i];
    }
    if (!(std::abs(det) > 1e-12 * scale)) throw std::domain_error("invert3: singular system");
    const double c10 = a[0][2] * a[2][1] - a[0][1] * a[2][2];
    const double c11 = a[0][0] * a[2][2] - a[0][2] * a[2][0];
    const double c12 = a[0][1] * a[2][0] - a[0][0] * a[2][1];
    const double c20 = a[0][1] * a[1][2] - a[0][2] * a[1][1];
    const double c21 = a[0][2] * a[1][0] - a[0][0] * a[1][2];
    const double c22 = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    inv[0][0] = c00 / det; inv[0][1] = c10 / det; inv[0][2] = c20 / det;
    inv[1][0] = c01 / det; inv[1][1] = c11 / det; inv[1][2] = c21 / det;
    inv[2][0] = c02 / det; inv[2][1] = c12 / det; inv[2][2] = c22 / det;
}

} // namespace detail

/// Least-squares fit of y = offset + amplitude * cos(phi - phase).
struct SinusoidFit {
    double offset = 0.0;
    double amplitude = 0.0; ///< >= 0
    double phase = 0.0;     ///< in (-pi, pi]
    double rms_residual = 0.0;
    double se_offset = 0.0, se_amplitude = 0.0, se_phase = 0.0;
};

/// Linear least squares on the basis {1, cos phi, sin phi}. Needs >= 3
/// records spanning distinct phases; throws std::domain_error otherwise.
inline SinusoidFit fit_sinusoid(const std::vector<double>& phis,
                                const std::vector<double>& values) {
    const std::size_t n = phis.size();
    if (n != values.size()) throw std::domain_error("fit_sinusoid: size mismatch");
    if (n < 3) throw std::domain_error("fit_sinusoid: need >= 3 samples");

    double xtx[3][3] = {{0}}, xty[3] = {0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        const double basis[3] = {1.0, std::cos(phis[i]), std::sin(phis[i])};
        for (int a = 0; a < 3; ++a) {
            xty[a] += basis[a] * values[i];
            for (int b = 0; b < 3; ++b) xtx[a][b] += basis[a] * basis[b];
        }
    }
    double cov[3][3];
    detail::invert3(xtx, cov);
    const double off = cov[0][0] * xty[0] + cov[0][1] * xty[1] + cov[0][2] * xty[2];
    const double p = cov[1][0] * xty[0] + cov[1][1] * xty[1] + cov[1][2] * xty[2];
    const double q = cov[2][0] * xty[0] + cov[2][1] * xty[1] + cov[2][2] * xty[2];

    SinusoidFit fit;
    fit.offset = off;
    fit.amplitude = std::hypot(p, q);
    fit.phase = std::atan2(q, p);

    long double ssr = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const double model = off + p * std::cos(phis[i]) + q * std::sin(phis[i]);
        const double r = values[i] - model;
        ssr += (long double)r * r;
    }
    fit.rms_residual = std::sqrt(double(ssr) / double(n));
    const double s2 = n > 3 ? double(ssr) / double(n - 3) : 0.0;
    fit.se_offset = std::sqrt(std::max(cov[0][0] * s2, 0.0));
    const double vp = cov[1][1] * s2, vq = cov[2][2] * s2, vpq = cov[1][2] * s2;
    if (fit.amplitude > 0.0) {
        const double b2 = fit.amplitude * fit.amplitude;
        fit.se_amplitude = std::sqrt(std::max((p * p * vp + q * q * vq + 2 * p * q * vpq) / b2, 0.0));
        fit.se_phase = std::sqrt(std::max((q * q * vp + p * p * vq - 2 * p * q * vpq) / (b2 * b2), 0.0));
    } else {
        fit.se_amplitude = std::sqrt(std::max(vp + vq, 0.0));
        fit.se_phase = 0.0;
    }
    return fit;
}

/// Difference of two fitted phases wrapped to (-pi, pi].
inline double phase_relation(const SinusoidFit& a, const SinusoidFit& b) {
    double d = a.phase - b.phase;
    d -= two_pi * std::floor((d + std::numbers::pi) / two_pi);
    if (d <= -std::numbers::pi) d += two_pi;
    if (d > std::numbers::pi) d -= two_pi;
    return d;
}

/// Levenberg-Marquardt fit of y = depth / (1 + ((x - center)/hwhm)^2).
struct LorentzianFit {
    double center = 0.0;
    double fwhm = 0.0;
    double depth = 0.0;
    double rms_residual = 0.0;
    double se_center = 0.0, se_fwhm = 0.0, se_depth = 0.0;
    int iterations = 0;
    bool reliable = false; ///< depth resolved at > 3 standard errors
};

struct FitNotConverged : std::runtime_error {
    LorentzianFit best; ///< best parameters reached before giving up
    explicit FitNotConverged(LorentzianFit b)
        : std::runtime_error("lorentzian fit did not converge"), best(std::move(b)) {}
};

inline LorentzianFit fit_lorentzian(const std::vector<double>& xs,
                                    const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    if (n != ys.size()) throw std::domain_error("fit_lorentzian: size mismatch");
    if (n < 4) throw std::domain_error("fit_lorentzian: need >= 4 samples");

    // moment-based start: peak height, intensity-weighted center, half-width
    // from the span of points above half the peak
    std::size_t imax = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (ys[i] > ys[imax]) imax = i;
    double d0 = ys[imax];
    if (!(d0 > 0.0)) d0 = 1e-12;
    double wsum = 0.0, xsum = 0.0, lo = xs[imax], hi = xs[imax];
    for (std::size_t i = 0; i < n; ++i) {
        if (ys[i] > 0.5 * d0) {
            wsum += ys[i];
            xsum += ys[i] * xs[i];
            lo = std::min(lo, xs[i]);
            hi = std::max(hi, xs[i]);
        }
    }
    double c0 = wsum > 0.0 ? xsum / wsum : xs[imax];
    double w0 = 0.5 * (hi - lo);
    if (!(w0 > 0.0)) w0 = (xs.back() - xs.front()) / double(n);
    if (!(w0 > 0.0)) throw std::domain_error("fit_lorentzian: degenerate x grid");

    double prm[3] = {c0, w0, d0}; // center, hwhm, depth
    const auto ssr_of = [&](const double p[3]) {
        long double s = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (xs[i] - p[0]) / p[1];
            const double r = ys[i] - p[2] / (1.0 + u * u);
            s += (long double)r * r;
        }
        return double(s);
    };

    double lambda = 1e-3;
    double ssr = ssr_of(prm);
    int iter = 0;
    bool converged = false;
    for (; iter < 200; ++iter) {
        double jtj[3][3] = {{0}}, jtr[3] = {0, 0, 0};
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (xs[i] - prm[0]) / prm[1];
            const double den = 1.0 + u * u;
            const double f = prm[2] / den;
            const double r = ys[i] - f;
            const double j[3] = {prm[2] * 2.0 * u / (prm[1] * den * den),
                                 prm[2] * 2.0 * u * u / (prm[1] * den * den),
                                 1.0 / den};
            for (int a = 0; a < 3; ++a) {
                jtr[a] += j[a] * r;
                for (int b = 0; b < 3; ++b) jtj[a][b] += j[a] * j[b];
            }
        }
        double aug[3][3];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                aug[a][b] = jtj[a][b] + (a == b ? lambda * jtj[a][a] : 0.0);
        double step[3] = {jtr[0], jtr[1], jtr[2]};
        try {
            detail::solve3(aug, step);
        } catch (const std::domain_error&) {
            break;
        }
        double trial[3] = {prm[0] + step[0], prm[1] + step[1], prm[2] + step[2]};
        if (!(trial[1] > 0.0)) trial[1] = prm[1] * 0.5;
        const double trial_ssr = ssr_of(trial);
        if (trial_ssr <= ssr) {
            const double rel = std::max({std::abs(step[0]) / (std::abs(prm[0]) + prm[1]),
                                         std::abs(step[1]) / prm[1],
                                         std::abs(step[2]) / (std::abs(prm[2]) + 1e-300)});
            prm[0] = trial[0]; prm[1] = trial[1]; prm[2] = trial[2];
            ssr = trial_ssr;
            lambda = std::max(lambda * 0.1, 1e-12);
            if (rel < 1e-10) {
                converged = true;
                ++iter;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }

    LorentzianFit fit;
    fit.center = prm[0];
    fit.fwhm = 2.0 * prm[1];
    fit.depth = prm[2];
    fit.rms_residual = std::sqrt(ssr / double(n));
    fit.iterations = iter;
    {
        double jtj[3][3] = {{0}};
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (xs[i] - prm[0]) / prm[1];
            const double den = 1.0 + u * u;
            const double j[3] = {prm[2] * 2.0 * u / (prm[1] * den * den),
                                 prm[2] * 2.0 * u * u / (prm[1] * den * den),
                                 1.0 / den};
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) jtj[a][b] += j[a] * j[b];
        }
        const double s2 = n > 3 ? ssr / double(n - 3) : 0.0;
        try {
            double cov[3][3];
            detail::invert3(jtj, cov);
            fit.se_center = std::sqrt(std::max(cov[0][0] * s2, 0.0));
            fit.se_fwhm = 2.0 * std::sqrt(std::max(cov[1][1] * s2, 0.0));
            fit.se_depth = std::sqrt(std::max(cov[2][2] * s2, 0.0));
        } catch (const std::domain_error&) {
            fit.se_center = fit.se_fwhm = fit.se_depth = 0.0;
        }
    }
    fit.reliable = fit.se_depth > 0.0 ? fit.depth > 3.0 * fit.se_depth : fit.depth > 0.0;
    if (!converged) throw FitNotConverged(fit);
    return fit;
}

} // namespace ionmirror::scan
