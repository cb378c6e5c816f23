// fp.hpp - Fabry-Perot picture of the ion-mirror cavity.
//
// Sign convention (Stokes relations): reflection off the outside of the
// partial mirror carries amplitude -r, reflection from inside +r, so the
// on-axis cavity reflection is -r + (1-r^2) * 2*eps*e^{i phi} / (1 - 2*r*eps*e^{i phi}).
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "core.hpp"

namespace ionmirror::fp {

using std::complex;

/// Probe response at one round-trip phase. transmission and reflection are
/// absolute intensities relative to the incident probe; extinction is
/// 1 - T/t^2 (the normalized transmission deficit).
struct FpResponse {
    double transmission = 0.0;
    double reflection = 0.0;
    double extinction = 0.0;
};

namespace detail {

inline complex<double> loop_denominator(const AtomScatterer& atom, const MirrorSpec& mirror,
                                        double phi) {
    const double a = 2.0 * mirror.r * atom.epsilon;
    return complex<double>(1.0 - a * std::cos(phi), -a * std::sin(phi));
}

inline void reject_singular(const AtomScatterer& atom, const MirrorSpec& mirror, double phi) {
    // r = 1, eps = 0.5, phi_L = 0 makes the resonant denominator vanish
    if (2.0 * mirror.r * atom.epsilon == 1.0 && std::cos(phi) == 1.0)
        throw std::domain_error("fp: singular configuration 2*r*eps = 1 at phi_L = 0");
}

} // namespace detail

/// Normalized transmission T/t^2 from the closed-form geometric sum.
inline double transmission_exact_norm(const AtomScatterer& atom, const MirrorSpec& mirror,
                                      double phi_L) {
    const double phi = reduce_phase(phi_L);
    detail::reject_singular(atom, mirror, phi);
    const double num = 1.0 - 2.0 * atom.epsilon;
    return num * num / std::norm(detail::loop_denominator(atom, mirror, phi));
}

/// Transmitted intensity T = |t (1 - 2 eps) / (1 - 2 r eps e^{i phi})|^2.
inline double transmission_exact(const AtomScatterer& atom, const MirrorSpec& mirror,
                                 double phi_L) {
    return mirror.t * mirror.t * transmission_exact_norm(atom, mirror, phi_L);
}

/// Single-bounce (weak scatterer) approximation
/// T = t^2 |1 - 2 eps + 2 eps r e^{i phi}|^2, accurate to O((2 r eps)^2).
inline double transmission_weak(const AtomScatterer& atom, const MirrorSpec& mirror,
                                double phi_L) {
    const double phi = reduce_phase(phi_L);
    const double e2 = 2.0 * atom.epsilon;
    const complex<double> amp(1.0 - e2 + e2 * mirror.r * std::cos(phi),
                              e2 * mirror.r * std::sin(phi));
    return mirror.t * mirror.t * std::norm(amp);
}

inline double transmission_weak_norm(const AtomScatterer& atom, const MirrorSpec& mirror,
                                     double phi_L) {
    const double phi = reduce_phase(phi_L);
    const double e2 = 2.0 * atom.epsilon;
    const complex<double> amp(1.0 - e2 + e2 * mirror.r * std::cos(phi),
                              e2 * mirror.r * std::sin(phi));
    return std::norm(amp);
}

/// Transmission as an explicitly truncated multiple-bounce series,
/// sum_n t (1 - 2 eps) (2 r eps e^{i phi})^n, truncated when the round-trip
/// factor drops below `truncation`. Accumulated in extended precision; used
/// as the independent route against the closed form.
inline double transmission_bounce_sum(const AtomScatterer& atom, const MirrorSpec& mirror,
                                      double phi_L, double truncation = 1e-16) {
    const double phi = reduce_phase(phi_L);
    detail::reject_singular(atom, mirror, phi);
    const double a = 2.0 * mirror.r * atom.epsilon;
    if (a >= 1.0)
        throw std::domain_error("fp: bounce series requires 2*r*eps < 1");
    const complex<long double> q(static_cast<long double>(a) * std::cos(static_cast<long double>(phi)),
                                 static_cast<long double>(a) * std::sin(static_cast<long double>(phi)));
    complex<long double> sum(0.0L, 0.0L), term(1.0L, 0.0L);
    const long double tiny = static_cast<long double>(truncation);
    // a^n < truncation bounds the neglected tail by truncation / (1 - a)
    do {
        sum += term;
        term *= q;
    } while (std::abs(term) >= tiny);
    const long double amp = static_cast<long double>(mirror.t) *
                            (1.0L - 2.0L * static_cast<long double>(atom.epsilon));
    return static_cast<double>(std::norm(amp * sum));
}

/// Intensity reflected off the cavity, normalized to the incident probe:
/// R = |-r + (1 - r^2) 2 eps e^{i phi} / (1 - 2 r eps e^{i phi})|^2.
inline double reflection_off_cavity(const AtomScatterer& atom, const MirrorSpec& mirror,
                                    double phi_L) {
    const double phi = reduce_phase(phi_L);
    detail::reject_singular(atom, mirror, phi);
    const complex<double> ephi(std::cos(phi), std::sin(phi));
    const complex<double> amp =
        -mirror.r + (1.0 - mirror.r * mirror.r) * 2.0 * atom.epsilon * ephi /
                        detail::loop_denominator(atom, mirror, phi);
    return std::norm(amp);
}

/// Extinction 1 - T/t^2.
inline double extinction(const AtomScatterer& atom, const MirrorSpec& mirror, double phi_L) {
    return 1.0 - transmission_exact_norm(atom, mirror, phi_L);
}

/// Full response at one phase.
inline FpResponse response(const AtomScatterer& atom, const MirrorSpec& mirror, double phi_L) {
    FpResponse out;
    out.transmission = transmission_exact(atom, mirror, phi_L);
    out.reflection = reflection_off_cavity(atom, mirror, phi_L);
    out.extinction = 1.0 - transmission_exact_norm(atom, mirror, phi_L);
    return out;
}

/// Cavity finesse F = pi * 2 eps r / (1 - (2 eps r)^2). Diverges as the
/// round-trip amplitude approaches 1.
inline double finesse(const AtomScatterer& atom, const MirrorSpec& mirror) {
    const double a = 2.0 * atom.epsilon * mirror.r;
    if (a >= 1.0) throw std::domain_error("fp: finesse diverges for 2*eps*r >= 1");
    return std::numbers::pi * a / (1.0 - a * a);
}

} // namespace ionmirror::fp
