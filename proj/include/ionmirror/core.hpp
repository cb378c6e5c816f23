// core.hpp - shared types and phase conventions for the ion-mirror toolkit.
//
// Conventions used throughout:
//   - amplitudes are real mirror amplitude coefficients r, t (not intensities)
//   - the atom's scattering strength is epsilon in [0, 0.5]; 2*epsilon is the
//     amplitude reflectivity of the atom at the cavity waist
//   - gamma is the free-space amplitude decay rate in rad/s
//   - phi_L is the probe round-trip phase; every operation reduces it into
//     [0, 2*pi) modulo the double-precision value of 2*pi, so shifting an
//     exactly representable argument by 2*pi is bitwise neutral
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ionmirror {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Reduce a phase into [0, 2*pi) modulo the double value of 2*pi.
inline double reduce_phase(double phi) {
    if (!std::isfinite(phi)) throw std::domain_error("reduce_phase: non-finite phase");
    double p = phi - two_pi * std::floor(phi / two_pi);
    // floor rounding can leave p marginally outside the target interval
    while (p >= two_pi) p -= two_pi;
    while (p < 0.0) p += two_pi;
    return p;
}

/// Partially transmissive mirror described by real amplitude coefficients.
/// When `lossless` is set, r^2 + t^2 = 1 must hold within 1e-12.
struct MirrorSpec {
    double r = 0.0;
    double t = 1.0;
    bool lossless = true;

    MirrorSpec() = default;
    MirrorSpec(double r_amp, double t_amp, bool lossless_flag = true)
        : r(r_amp), t(t_amp), lossless(lossless_flag) {
        if (!(r >= 0.0 && r <= 1.0)) throw std::domain_error("MirrorSpec: r must be in [0, 1]");
        if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("MirrorSpec: t must be in [0, 1]");
        if (lossless && std::abs(r * r + t * t - 1.0) > 1e-12)
            throw std::domain_error("MirrorSpec: lossless mirror requires r^2 + t^2 = 1");
    }

    /// Lossless mirror from the amplitude reflectivity alone.
    static MirrorSpec from_r(double r_amp) {
        if (!(r_amp >= 0.0 && r_amp <= 1.0)) throw std::domain_error("MirrorSpec: r must be in [0, 1]");
        return MirrorSpec(r_amp, std::sqrt(std::max(0.0, 1.0 - r_amp * r_amp)));
    }

    /// Lossless mirror from the intensity reflectivity R = r^2.
    static MirrorSpec from_intensity(double big_r) {
        if (!(big_r >= 0.0 && big_r <= 1.0))
            throw std::domain_error("MirrorSpec: intensity reflectivity must be in [0, 1]");
        return from_r(std::sqrt(big_r));
    }
};

/// Point scatterer acting as the second cavity mirror.
struct AtomScatterer {
    double epsilon = 0.0;     ///< captured solid-angle fraction, in [0, 0.5]
    double gamma = 1.0;       ///< free-space decay rate, rad/s
    double wavelength = 493e-9;  ///< probe wavelength, m

    AtomScatterer() = default;
    AtomScatterer(double eps, double gamma_rad_s, double lambda_m)
        : epsilon(eps), gamma(gamma_rad_s), wavelength(lambda_m) {
        if (!(epsilon >= 0.0 && epsilon <= 0.5))
            throw std::domain_error("AtomScatterer: epsilon must be in [0, 0.5]");
        if (!(gamma > 0.0)) throw std::domain_error("AtomScatterer: gamma must be > 0");
        if (!(wavelength > 0.0)) throw std::domain_error("AtomScatterer: wavelength must be > 0");
    }
};

/// Ion-to-mirror geometry. Only the derived round-trip phase enters any
/// response; `distance` is validated but otherwise inert (the absolute
/// standoff is not interferometrically meaningful here).
struct CavityGeometry {
    double distance = 0.30;    ///< ion-mirror separation, m
    double phase_offset = 0.0; ///< user-chosen phase at scan_delta = 0, rad
    double scan_delta = 0.0;   ///< mirror displacement along the axis, m

    CavityGeometry() = default;
    CavityGeometry(double distance_m, double phase_offset_rad, double scan_delta_m)
        : distance(distance_m), phase_offset(phase_offset_rad), scan_delta(scan_delta_m) {
        if (!(distance > 0.0)) throw std::domain_error("CavityGeometry: distance must be > 0");
        if (!std::isfinite(phase_offset) || !std::isfinite(scan_delta))
            throw std::domain_error("CavityGeometry: non-finite field");
    }
};

/// Weak probe parameters.
struct ProbeSpec {
    double detuning = 0.0;        ///< probe detuning from atomic resonance, rad/s
    double intensity_scale = 1.0; ///< linear output scaling, must be > 0

    ProbeSpec() = default;
    ProbeSpec(double detuning_rad_s, double scale = 1.0)
        : detuning(detuning_rad_s), intensity_scale(scale) {
        if (!std::isfinite(detuning)) throw std::domain_error("ProbeSpec: non-finite detuning");
        if (!(intensity_scale > 0.0)) throw std::domain_error("ProbeSpec: intensity_scale must be > 0");
    }
};

/// Fraction of the full solid angle captured by a lens of numerical
/// aperture `na`, as seen from the focus: (1 - cos(asin(na))) / 2.
inline double solid_angle_fraction(double na) {
    if (!(na > 0.0 && na <= 1.0))
        throw std::domain_error("solid_angle_fraction: NA must be in (0, 1]");
    return (1.0 - std::sqrt((1.0 - na) * (1.0 + na))) / 2.0;
}

/// Round-trip phase phi_L = (phase_offset + 4*pi*scan_delta/lambda) mod 2*pi.
/// Periodic in scan_delta with period lambda/2.
inline double round_trip_phase(const CavityGeometry& geom, double wavelength) {
    if (!(wavelength > 0.0)) throw std::domain_error("round_trip_phase: wavelength must be > 0");
    return reduce_phase(geom.phase_offset + 4.0 * std::numbers::pi * geom.scan_delta / wavelength);
}

} // namespace ionmirror
