// qed.hpp - single-mode scattering model of the driven atom in front of the
// mirror: modified decay rate and line shift, probe-detuning response, and the
// switch-on transient.
#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "core.hpp"

namespace ionmirror::qed {

using std::complex;

/// Mirror-modified spontaneous rates, both in rad/s.
struct ModifiedAtomRates {
    double gamma_mod = 0.0;  ///< modified population decay rate
    double lamb_shift = 0.0; ///< mirror-induced line shift
};

/// Closed-form modified rates: gamma_mod = gamma (1 - 2 r eps cos phi),
/// shift = -2 r eps gamma sin phi. Requires 2 r eps <= 1.
inline ModifiedAtomRates modified_rates(const AtomScatterer& atom, const MirrorSpec& mirror,
                                        double phi_L) {
    const double a = 2.0 * mirror.r * atom.epsilon;
    if (a > 1.0) throw std::domain_error("modified_rates: need 2*r*epsilon <= 1");
    const double phi = reduce_phase(phi_L);
    return {atom.gamma * (1.0 - a * std::cos(phi)), -a * atom.gamma * std::sin(phi)};
}

/// Effective atom-field coupling product eps (1 - r e^{i phi}) gamma, rad/s.
inline complex<double> coupling_product(const AtomScatterer& atom, const MirrorSpec& mirror,
                                        double phi_L) {
    const double phi = reduce_phase(phi_L);
    return atom.epsilon * atom.gamma *
           complex<double>(1.0 - mirror.r * std::cos(phi), -mirror.r * std::sin(phi));
}

namespace detail {

/// Steady-state scattering amplitude rho(delta); the loop denominator picks up
/// i delta/gamma from the probe detuning.
inline complex<double> rho_steady(const AtomScatterer& atom, const MirrorSpec& mirror,
                                  double phi, double delta) {
    const complex<double> eip(std::cos(phi), std::sin(phi));
    const complex<double> den =
        1.0 - 2.0 * mirror.r * atom.epsilon * eip + complex<double>(0.0, delta / atom.gamma);
    if (den == complex<double>(0.0, 0.0))
        throw std::domain_error("qed transmission: singular loop denominator");
    return atom.epsilon * (1.0 - mirror.r * eip) / den;
}

} // namespace detail

/// On-axis transmission normalized by t^2 at probe detuning delta (rad/s).
inline double qed_transmission_norm(const AtomScatterer& atom, const MirrorSpec& mirror,
                                    double phi_L, double delta) {
    const double phi = reduce_phase(phi_L);
    return std::norm(1.0 - 2.0 * detail::rho_steady(atom, mirror, phi, delta));
}

/// Absolute on-axis transmission t^2 |1 - 2 rho|^2.
inline double qed_transmission(const AtomScatterer& atom, const MirrorSpec& mirror,
                               double phi_L, double delta) {
    return mirror.t * mirror.t * qed_transmission_norm(atom, mirror, phi_L, delta);
}

/// Extinction 1 - T/t^2 at detuning delta.
inline double qed_extinction(const AtomScatterer& atom, const MirrorSpec& mirror,
                             double phi_L, double delta) {
    return 1.0 - qed_transmission_norm(atom, mirror, phi_L, delta);
}

/// Reflection normalized by r^2 at detuning delta. The back-scattered wave
/// carries the same detuned loop denominator as the transmission; at
/// delta = 0 this reduces to the steady-state reflection.
inline double qed_reflection_norm(const AtomScatterer& atom, const MirrorSpec& mirror,
                                  double phi_L, double delta) {
    if (!(mirror.r > 0.0))
        throw std::domain_error("qed_reflection_norm: mirror must reflect");
    const double phi = reduce_phase(phi_L);
    const complex<double> eip(std::cos(phi), std::sin(phi));
    const complex<double> den =
        1.0 - 2.0 * mirror.r * atom.epsilon * eip + complex<double>(0.0, delta / atom.gamma);
    if (den == complex<double>(0.0, 0.0))
        throw std::domain_error("qed_reflection_norm: singular loop denominator");
    const complex<double> amp =
        -mirror.r + (1.0 - mirror.r * mirror.r) * 2.0 * atom.epsilon * eip / den;
    return std::norm(amp) / (mirror.r * mirror.r);
}

/// Transmission a time `time` (s) after the probe switches on: the scattering
/// amplitude rings up as 1 - exp(-(gamma_mod + i(shift + delta)) t) toward its
/// steady value, so the approach to the line is exponential at the modified
/// rate.
inline double transient_transmission_norm(const AtomScatterer& atom, const MirrorSpec& mirror,
                                          double phi_L, double delta, double time) {
    if (!(time >= 0.0)) throw std::domain_error("transient_transmission: time must be >= 0");
    const double phi = reduce_phase(phi_L);
    const auto rates = modified_rates(atom, mirror, phi);
    const complex<double> rho = detail::rho_steady(atom, mirror, phi, delta);
    const complex<double> expo(-rates.gamma_mod * time, -(rates.lamb_shift + delta) * time);
    const complex<double> ring = 1.0 - std::exp(expo);
    return std::norm(1.0 - 2.0 * rho * ring);
}

inline double transient_transmission(const AtomScatterer& atom, const MirrorSpec& mirror,
                                     double phi_L, double delta, double time) {
    return mirror.t * mirror.t * transient_transmission_norm(atom, mirror, phi_L, delta, time);
}

struct SpectrumPoint {
    double detuning = 0.0;     ///< rad/s
    double transmission = 0.0; ///< normalized by t^2
    double extinction = 0.0;
};

struct SpectrumResult {
    std::vector<SpectrumPoint> points;
    double peak_extinction = 0.0;
    double peak_detuning = 0.0;          ///< rad/s, refined off-grid
    std::optional<double> fwhm;          ///< rad/s; empty if the half level is not bracketed
};

/// Extinction spectrum on a uniform detuning grid [delta_min, delta_max] with
/// the peak refined by ternary search and the full width at half maximum by
/// bisection on the continuous model.
inline SpectrumResult spectrum(const AtomScatterer& atom, const MirrorSpec& mirror,
                               double phi_L, double delta_min, double delta_max, int n_points) {
    if (n_points < 2) throw std::domain_error("spectrum: need at least 2 points");
    if (!(delta_max > delta_min)) throw std::domain_error("spectrum: need delta_max > delta_min");
    const double phi = reduce_phase(phi_L);
    const auto ext = [&](double d) { return qed_extinction(atom, mirror, phi, d); };

    SpectrumResult out;
    out.points.reserve(std::size_t(n_points));
    std::size_t imax = 0;
    for (int i = 0; i < n_points; ++i) {
        const double d = delta_min + (delta_max - delta_min) * double(i) / double(n_points - 1);
        const double e = ext(d);
        out.points.push_back({d, 1.0 - e, e});
        if (e > out.points[imax].extinction) imax = std::size_t(i);
    }

    // refine the peak inside the bracketing grid cells
    {
        double lo = out.points[imax > 0 ? imax - 1 : 0].detuning;
        double hi = out.points[imax + 1 < out.points.size() ? imax + 1 : imax].detuning;
        if (!(hi > lo)) {
            out.peak_detuning = out.points[imax].detuning;
            out.peak_extinction = out.points[imax].extinction;
        } else {
            for (int it = 0; it < 200; ++it) {
                const double m1 = lo + (hi - lo) / 3.0;
                const double m2 = hi - (hi - lo) / 3.0;
                if (ext(m1) < ext(m2)) lo = m1; else hi = m2;
            }
            out.peak_detuning = 0.5 * (lo + hi);
            out.peak_extinction = ext(out.peak_detuning);
        }
    }

    // half-maximum crossings, one on each side of the peak
    const double half = 0.5 * out.peak_extinction;
    const auto cross = [&](double inner, double outer) -> std::optional<double> {
        double a = inner, b = outer;
        if ((ext(a) - half) * (ext(b) - half) > 0.0) return std::nullopt;
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (a + b);
            if ((ext(a) - half) * (ext(m) - half) <= 0.0) b = m; else a = m;
        }
        return 0.5 * (a + b);
    };
    const auto left = cross(out.peak_detuning, out.points.front().detuning);
    const auto right = cross(out.peak_detuning, out.points.back().detuning);
    if (left && right) out.fwhm = *right - *left;
    return out;
}

} // namespace ionmirror::qed
