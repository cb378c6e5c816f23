#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ionmirror/fp.hpp"

using namespace ionmirror;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const double kGamma = two_pi * 5.5e6;
const double kLambda = 493e-9;

AtomScatterer atom_with(double eps) { return AtomScatterer(eps, kGamma, kLambda); }
} // namespace

TEST_CASE("closed form hits a frozen reference point") {
    // strong-mirror working point, evaluated independently with an extended
    // precision geometric sum
    const auto atom = atom_with(0.003387);
    const auto mirror = MirrorSpec::from_intensity(0.997);
    REQUIRE_THAT(fp::transmission_exact_norm(atom, mirror, std::numbers::pi),
                 WithinRel(0.9732870606610292, 1e-13));
}

TEST_CASE("no atom means no extinction") {
    const auto atom = atom_with(0.0);
    for (double r : {0.0, 0.3, 0.9, 1.0}) {
        const auto mirror = MirrorSpec::from_r(r);
        for (double phi : {0.0, 1.0, 3.0, 5.5}) {
            REQUIRE(fp::transmission_exact_norm(atom, mirror, phi) == 1.0);
            REQUIRE(fp::extinction(atom, mirror, phi) == 0.0);
        }
    }
}

TEST_CASE("bounce series agrees with the closed form across the grid") {
    double worst = 0.0;
    for (double eps : {0.05, 0.15, 0.25, 0.35, 0.45}) {
        const auto atom = atom_with(eps);
        for (double r : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const auto mirror = MirrorSpec::from_r(r);
            for (int k = 0; k < 32; ++k) {
                const double phi = two_pi * k / 32.0;
                const double exact = fp::transmission_exact(atom, mirror, phi);
                const double series = fp::transmission_bounce_sum(atom, mirror, phi);
                worst = std::max(worst, std::abs(exact - series));
            }
        }
    }
    REQUIRE(worst < 1e-13);
}

TEST_CASE("bounce series stays accurate close to the singular ring") {
    // 2 r eps = 0.999 needs tens of thousands of bounces
    const AtomScatterer atom(0.999 / (2.0 * 0.9995), kGamma, kLambda);
    const auto mirror = MirrorSpec::from_r(0.9995);
    for (double phi : {0.0, 0.4, 2.0, std::numbers::pi}) {
        const double exact = fp::transmission_exact(atom, mirror, phi);
        const double series = fp::transmission_bounce_sum(atom, mirror, phi);
        REQUIRE_THAT(series, WithinAbs(exact, 1e-12));
    }
}

TEST_CASE("bounce series rejects a non-convergent configuration") {
    const AtomScatterer atom(0.5, kGamma, kLambda);
    const auto mirror = MirrorSpec::from_r(1.0);
    REQUIRE_THROWS_AS(fp::transmission_bounce_sum(atom, mirror, 1.0), std::domain_error);
}

TEST_CASE("weak form converges to the exact one at second order") {
    const auto mirror = MirrorSpec::from_r(0.9);
    const auto worst_diff = [&](double eps) {
        const auto atom = atom_with(eps);
        double worst = 0.0;
        for (int k = 0; k < 64; ++k) {
            const double phi = two_pi * k / 64.0;
            worst = std::max(worst, std::abs(fp::transmission_exact_norm(atom, mirror, phi) -
                                             fp::transmission_weak_norm(atom, mirror, phi)));
        }
        return worst;
    };
    const double d3 = worst_diff(1e-3);
    const double d4 = worst_diff(1e-4);
    // halving order: shrinking eps by 10 shrinks the gap by ~100
    REQUIRE(d4 < d3 / 50.0);
    REQUIRE(d3 < 1e-4); // already tiny in absolute terms
}

TEST_CASE("weak form works for a fully reflective mirror") {
    const auto atom = atom_with(0.003387);
    const auto mirror = MirrorSpec::from_r(1.0);
    const double t_norm = fp::transmission_weak_norm(atom, mirror, std::numbers::pi);
    // the weak amplitude is 1 - 4 eps at phi = pi, r = 1
    const double e4 = 1.0 - 4.0 * atom.epsilon;
    REQUIRE_THAT(t_norm, WithinRel(e4 * e4, 1e-12));
}

TEST_CASE("reflection limits behave") {
    const auto atom = atom_with(0.01);
    // no mirror: only the atom's back-scattering, |2 eps|^2
    const auto no_mirror = MirrorSpec::from_r(0.0);
    for (double phi : {0.0, 1.0, 2.5})
        REQUIRE_THAT(fp::reflection_off_cavity(atom, no_mirror, phi),
                     WithinRel(4.0 * atom.epsilon * atom.epsilon, 1e-12));
    // perfect mirror: everything comes back
    const auto perfect = MirrorSpec::from_r(1.0);
    for (double phi : {0.0, 1.0, 2.5})
        REQUIRE_THAT(fp::reflection_off_cavity(atom, perfect, phi), WithinRel(1.0, 1e-12));
}

TEST_CASE("transmitted plus reflected power never exceeds the input") {
    for (double eps : {0.0, 0.01, 0.1, 0.3, 0.5}) {
        const auto atom = atom_with(eps);
        for (double r : {0.0, 0.2, 0.6, 0.95}) {
            const auto mirror = MirrorSpec::from_r(r);
            for (int k = 0; k < 16; ++k) {
                const double phi = two_pi * k / 16.0;
                const auto resp = fp::response(atom, mirror, phi);
                REQUIRE(resp.transmission + resp.reflection <= 1.0 + 1e-12);
                REQUIRE(resp.transmission >= 0.0);
                REQUIRE(resp.reflection >= 0.0);
            }
        }
    }
}

TEST_CASE("response bundles the individual quantities") {
    const auto atom = atom_with(0.02);
    const auto mirror = MirrorSpec::from_intensity(0.75);
    const double phi = 2.2;
    const auto resp = fp::response(atom, mirror, phi);
    REQUIRE(resp.transmission == fp::transmission_exact(atom, mirror, phi));
    REQUIRE(resp.reflection == fp::reflection_off_cavity(atom, mirror, phi));
    REQUIRE(resp.extinction == fp::extinction(atom, mirror, phi));
    REQUIRE_THAT(resp.extinction,
                 WithinAbs(1.0 - fp::transmission_exact_norm(atom, mirror, phi), 1e-15));
}

TEST_CASE("singular configuration is rejected, neighbors are fine") {
    const AtomScatterer atom(0.5, kGamma, kLambda);
    const auto mirror = MirrorSpec::from_r(1.0);
    REQUIRE_THROWS_AS(fp::transmission_exact_norm(atom, mirror, 0.0), std::domain_error);
    REQUIRE_THROWS_AS(fp::reflection_off_cavity(atom, mirror, 0.0), std::domain_error);
    REQUIRE_NOTHROW(fp::transmission_exact_norm(atom, mirror, 0.01));
    REQUIRE_NOTHROW(fp::transmission_exact_norm(atom, mirror, std::numbers::pi));
}

TEST_CASE("finesse formula and its numeric width check") {
    const double a = 0.9; // loop gain 2 r eps
    const AtomScatterer atom(0.45, kGamma, kLambda);
    const auto mirror = MirrorSpec::from_r(1.0);
    REQUIRE(2.0 * mirror.r * atom.epsilon == a);

    // the implemented figure of merit
    REQUIRE_THAT(fp::finesse(atom, mirror), WithinRel(std::numbers::pi * a / (1.0 - a * a), 1e-12));

    // numeric fringe-spacing / width ratio of the resonance at phi = 0:
    // half-max points of 1/|1 - a e^{i phi}|^2 sit at sin(phi/2) = (1-a)/(2 sqrt a),
    // so FSR/FWHM -> pi sqrt(a)/(1-a)
    const auto t_norm = [&](double phi) { return fp::transmission_exact_norm(atom, mirror, phi); };
    const double peak = t_norm(0.0);
    const double half = 0.5 * peak;
    double lo = 0.0, hi = std::numbers::pi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (t_norm(mid) > half) lo = mid; else hi = mid;
    }
    const double fwhm = 2.0 * 0.5 * (lo + hi);
    const double measured = two_pi / fwhm;
    REQUIRE_THAT(measured, WithinRel(std::numbers::pi * std::sqrt(a) / (1.0 - a), 0.02));

    // diverges at the singular ring
    const AtomScatterer strong(0.5, kGamma, kLambda);
    REQUIRE_THROWS_AS(fp::finesse(strong, mirror), std::domain_error);
}
