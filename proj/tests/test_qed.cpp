#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "ionmirror/fp.hpp"
#include "ionmirror/qed.hpp"

using namespace ionmirror;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const double pi = std::numbers::pi;
}

TEST_CASE("modified rates follow the image-field closed form") {
    const AtomScatterer atom{0.02, 2 * pi * 15.1e6, 493e-9};
    const auto mirror = MirrorSpec::from_r(0.8);
    for (double phi : {0.0, 0.7, pi / 2, 2.5, pi}) {
        const auto rates = qed::modified_rates(atom, mirror, phi);
        const double a = 2 * mirror.r * atom.epsilon;
        REQUIRE_THAT(rates.gamma_mod, WithinRel(atom.gamma * (1 - a * std::cos(phi)), 1e-15));
        REQUIRE_THAT(rates.lamb_shift, WithinAbs(-a * atom.gamma * std::sin(phi), 1e-15 * atom.gamma));
    }

    // suppression and enhancement endpoints
    const auto perfect = MirrorSpec::from_r(1.0);
    REQUIRE_THAT(qed::modified_rates(atom, perfect, 0.0).gamma_mod,
                 WithinRel(atom.gamma * (1 - 2 * atom.epsilon), 1e-15));
    REQUIRE_THAT(qed::modified_rates(atom, perfect, pi).gamma_mod,
                 WithinRel(atom.gamma * (1 + 2 * atom.epsilon), 1e-15));
}

TEST_CASE("coupling product switches off and doubles at the phase endpoints") {
    const AtomScatterer atom{0.1, 2 * pi * 15.1e6, 493e-9};
    const auto perfect = MirrorSpec::from_r(1.0);
    // both endpoint magnitudes are exact in double precision
    REQUIRE(std::abs(qed::coupling_product(atom, perfect, 0.0)) == 0.0);
    REQUIRE(std::abs(qed::coupling_product(atom, perfect, pi)) ==
            2.0 * (atom.epsilon * atom.gamma));

    // generic phase: |g| = eps gamma |1 - r e^{i phi}|
    const auto mirror = MirrorSpec::from_r(0.6);
    const double phi = 1.234;
    const double expect = atom.epsilon * atom.gamma *
                          std::sqrt(1 - 2 * mirror.r * std::cos(phi) + mirror.r * mirror.r);
    REQUIRE_THAT(std::abs(qed::coupling_product(atom, mirror, phi)), WithinRel(expect, 1e-14));
}

TEST_CASE("zero-detuning transmission agrees with the stationary result") {
    double worst = 0.0;
    for (int ie = 0; ie < 12; ++ie) {
        const AtomScatterer atom{0.5 * ie / 11.0, 1.0, 493e-9};
        for (double r : {0.0, 0.3, 0.7, 0.95, 1.0}) {
            const auto mirror = MirrorSpec::from_r(r);
            for (int ip = 0; ip < 16; ++ip) {
                const double phi = 2 * pi * ip / 16.0;
                if (2 * r * atom.epsilon == 1.0 && std::cos(phi) == 1.0) continue;
                const double a = fp::transmission_exact_norm(atom, mirror, phi);
                const double b = qed::qed_transmission_norm(atom, mirror, phi, 0.0);
                worst = std::max(worst, std::abs(a - b));
            }
        }
    }
    REQUIRE(worst < 1e-13);
}

TEST_CASE("free-space line is an exact Lorentzian of width two gamma") {
    const AtomScatterer atom{0.0033863412, 2 * pi * 5.5e6, 493e-9};
    const MirrorSpec free_space{}; // r = 0
    const double e0 = 4 * atom.epsilon * (1 - atom.epsilon);
    for (double x : {0.0, 0.25, 0.5, 1.0, 2.0, 5.0}) {
        const double delta = x * atom.gamma;
        const double ext = qed::qed_extinction(atom, free_space, 0.0, delta);
        REQUIRE_THAT(ext, WithinRel(e0 / (1 + x * x), 5e-13));
    }

    const auto spec = qed::spectrum(atom, free_space, 0.0, -8 * atom.gamma, 8 * atom.gamma, 401);
    REQUIRE(spec.points.size() == 401);
    REQUIRE(spec.points.front().detuning == -8 * atom.gamma);
    REQUIRE(spec.points.back().detuning == 8 * atom.gamma);
    REQUIRE_THAT(spec.peak_extinction, WithinRel(e0, 1e-12));
    REQUIRE(std::abs(spec.peak_detuning) < 1e-5 * atom.gamma);
    REQUIRE(spec.fwhm.has_value());
    REQUIRE_THAT(*spec.fwhm, WithinRel(2 * atom.gamma, 1e-9));
}

TEST_CASE("front-mirror feedback narrows or broadens the line") {
    const AtomScatterer atom{0.02, 2 * pi * 15.1e6, 493e-9};
    const auto mirror = MirrorSpec::from_intensity(0.997);

    // enhanced decay at phi = pi broadens the dip to 2 gamma_mod
    const auto anti = qed::spectrum(atom, mirror, pi, -6 * atom.gamma, 6 * atom.gamma, 801);
    const double gamma_mod = atom.gamma * (1 + 2 * mirror.r * atom.epsilon);
    REQUIRE(anti.fwhm.has_value());
    REQUIRE_THAT(*anti.fwhm, WithinRel(2 * gamma_mod, 1e-6));

    // suppressed decay at phi = 0 narrows it
    const auto node = qed::spectrum(atom, mirror, 0.0, -6 * atom.gamma, 6 * atom.gamma, 801);
    REQUIRE(node.fwhm.has_value());
    REQUIRE(*node.fwhm < *anti.fwhm);
}

TEST_CASE("reflection dip mirrors the stationary model at zero detuning") {
    const AtomScatterer atom{0.05, 1.0, 493e-9};
    const auto mirror = MirrorSpec::from_r(0.9);
    for (double phi : {0.0, 1.0, pi}) {
        const double a = fp::reflection_off_cavity(atom, mirror, phi) / (mirror.r * mirror.r);
        const double b = qed::qed_reflection_norm(atom, mirror, phi, 0.0);
        REQUIRE_THAT(b, WithinAbs(a, 1e-14));
    }
    // far off resonance the atom decouples and the mirror reflects fully
    REQUIRE_THAT(qed::qed_reflection_norm(atom, mirror, pi, 1e4 * atom.gamma),
                 WithinAbs(1.0, 1e-6));
    REQUIRE_THROWS_AS(qed::qed_reflection_norm(atom, MirrorSpec{}, 0.0, 0.0),
                      std::domain_error);
}

TEST_CASE("transient response rings up to the stationary line") {
    const AtomScatterer atom{0.04, 2 * pi * 15.1e6, 493e-9};
    const auto mirror = MirrorSpec::from_r(0.95);
    const double phi = 2.1;
    const double delta = 0.4 * atom.gamma;
    const auto rates = qed::modified_rates(atom, mirror, phi);

    // before any scattering the probe passes unhindered
    REQUIRE(qed::transient_transmission_norm(atom, mirror, phi, delta, 0.0) == 1.0);

    const double steady = qed::qed_transmission_norm(atom, mirror, phi, delta);
    REQUIRE_THAT(qed::transient_transmission_norm(atom, mirror, phi, delta, 60.0 / rates.gamma_mod),
                 WithinAbs(steady, 1e-15));

    // the approach is bounded by the decaying envelope
    for (double gt : {2.0, 4.0, 6.0, 8.0}) {
        const double t = gt / rates.gamma_mod;
        const double now = qed::transient_transmission_norm(atom, mirror, phi, delta, t);
        const double dev = std::abs(now - steady);
        // |T - T_inf| <= |w| (2|u| + |w|), u = 1 - 2 rho, w = 2 rho e^{-gamma_mod t}
        const double rho_mag = 0.5 * (1 + std::sqrt(steady));
        const double w = 2 * rho_mag * std::exp(-gt);
        REQUIRE(dev <= w * (2 * (1 + 2 * rho_mag) + w) + 1e-18);
    }

    REQUIRE_THROWS_AS(qed::transient_transmission_norm(atom, mirror, phi, delta, -1e-9),
                      std::domain_error);
    // absolute transmission carries the t^2 prefactor
    REQUIRE_THAT(qed::transient_transmission(atom, mirror, phi, delta, 1e-9),
                 WithinRel(mirror.t * mirror.t *
                               qed::transient_transmission_norm(atom, mirror, phi, delta, 1e-9),
                           1e-15));
}

TEST_CASE("ring-up deviation obeys the exponential envelope at five lifetimes") {
    const AtomScatterer atom{0.003387, 2 * pi * 15.1e6, 493e-9};
    const auto mirror = MirrorSpec::from_intensity(0.997);
    const double gamma_mod = qed::modified_rates(atom, mirror, pi).gamma_mod;
    const double steady = qed::qed_transmission_norm(atom, mirror, pi, 0.0);
    const double depth = 1.0 - steady;
    const double now = qed::transient_transmission_norm(atom, mirror, pi, 0.0, 5.0 / gamma_mod);
    REQUIRE(std::abs(now - steady) < 2.0 * std::exp(-5.0) * depth);
}

TEST_CASE("line widths narrow and broaden by the modified decay ratio") {
    // near-unit mirror: at exactly r = 1 the node dip closes, so probe just
    // below it where both lineshapes stay extractable
    const AtomScatterer atom{0.1, 2 * pi * 15.1e6, 493e-9};
    const auto mirror = MirrorSpec::from_r(0.9999);
    const double a = 2 * mirror.r * atom.epsilon;
    const auto node = qed::spectrum(atom, mirror, 0.0, -6 * atom.gamma, 6 * atom.gamma, 801);
    const auto anti = qed::spectrum(atom, mirror, pi, -6 * atom.gamma, 6 * atom.gamma, 801);
    REQUIRE(node.fwhm.has_value());
    REQUIRE(anti.fwhm.has_value());
    const double ratio = *node.fwhm / *anti.fwhm;
    REQUIRE_THAT(ratio, WithinRel((1 - a) / (1 + a), 1e-6));
    REQUIRE_THAT(ratio, WithinAbs(2.0 / 3.0, 1e-3));
}

TEST_CASE("spectrum argument validation") {
    const AtomScatterer atom{0.01, 1.0, 493e-9};
    REQUIRE_THROWS_AS(qed::spectrum(atom, MirrorSpec{}, 0.0, -1.0, 1.0, 1), std::domain_error);
    REQUIRE_THROWS_AS(qed::spectrum(atom, MirrorSpec{}, 0.0, 1.0, -1.0, 11), std::domain_error);
}
