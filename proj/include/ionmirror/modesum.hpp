// modesum.hpp - spherical-harmonic cap integrals and the mirror-modified
// vacuum-mode sum.
//
// Mode function at the focus, up to a common normalization:
//   T_{l,m} = (2i/4pi) * int dOmega Y_{l,m} * [ standing + (-1)^l through ]
// where over the mirror cap (polar angle <= theta_max) the standing factor is
// (1 - r e^{i phi}) and the through factor is t, and over the rest of the
// upper hemisphere both factors are 1 (free propagation from either side).
// Axial symmetry kills every m != 0 integral exactly. Overlaps are reported
// normalized so the free-space l = 0 overlap equals 1, which makes the decay
// ratio gamma_tilde/gamma equal to the plain sum of |overlap|^2.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "core.hpp"
#include "legendre.hpp"

namespace ionmirror::qed {

using std::complex;

/// (1/4pi) * integral of Y_{l,m} over the polar cap theta <= theta_max.
/// Exactly zero for m != 0; |m| > l is a domain error.
inline complex<double> cap_harmonic_integral(int l, int m, double theta_max) {
    if (l < 0) throw std::domain_error("cap_harmonic_integral: l must be >= 0");
    if (std::abs(m) > l) throw std::domain_error("cap_harmonic_integral: |m| must be <= l");
    if (!(theta_max > 0.0 && theta_max <= std::numbers::pi / 2.0))
        throw std::domain_error("cap_harmonic_integral: theta_max must be in (0, pi/2]");
    if (m != 0) return {0.0, 0.0};
    const double c = std::cos(theta_max);
    // int_cap Y_l0 dOmega = 2*pi * sqrt((2l+1)/4pi) * int_c^1 P_l(x) dx
    const double raw = 2.0 * std::numbers::pi *
                       std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi)) *
                       numeric::legendre_cap_integral(l, c);
    return {raw / (4.0 * std::numbers::pi), 0.0};
}

/// Overlap of one standing spherical wave with the focus, normalized so that
/// mode_overlap(0, 0, ..., mirror_covers_cap = false) == 1. With the mirror
/// absent the parity structure collapses to (1 + (-1)^l): only l = 0 survives.
inline complex<double> mode_overlap(int l, int m, const MirrorSpec& mirror, double phi,
                                    double theta_max, bool mirror_covers_cap) {
    if (l < 0) throw std::domain_error("mode_overlap: l must be >= 0");
    if (std::abs(m) > l) throw std::domain_error("mode_overlap: |m| must be <= l");
    if (!(theta_max > 0.0 && theta_max <= std::numbers::pi / 2.0))
        throw std::domain_error("mode_overlap: theta_max must be in (0, pi/2]");
    if (m != 0) return {0.0, 0.0};
    const double p = reduce_phase(phi);
    const double c = std::cos(theta_max);
    const double sq = std::sqrt(std::numbers::pi * (2.0 * l + 1.0));
    const double cap = sq * numeric::legendre_cap_integral(l, c);   // int_cap Y_l0 dOmega
    const double hemi = sq * numeric::legendre_cap_integral(l, 0.0); // int_hemisphere Y_l0 dOmega
    const double r = mirror_covers_cap ? mirror.r : 0.0;
    const double t = mirror_covers_cap ? mirror.t : 1.0;
    const complex<double> standing(1.0 - r * std::cos(p), -r * std::sin(p));
    const double parity = (l % 2 == 0) ? 1.0 : -1.0;
    const complex<double> bracket = standing * cap + (hemi - cap) + parity * (t * cap + (hemi - cap));
    return bracket / (2.0 * std::sqrt(std::numbers::pi));
}

struct ModeSumOptions {
    int lmax = 200;           ///< Gauss-Legendre fidelity; node count is 4*lmax
    double tol = 1e-7;        ///< target absolute tolerance on the decay ratio
    std::int64_t max_l = std::int64_t(1) << 23; ///< hard cap on the continued series
};

struct ModeSumResult {
    double ratio = 0.0;          ///< gamma_tilde / gamma
    std::int64_t terms = 0;      ///< highest l summed explicitly
    double tail_estimate = 0.0;  ///< completed tail, also the error scale
};

/// Numeric decay-rate ratio gamma_tilde/gamma = sum |T_{l,m}|^2 (mirror)
/// over sum |T_{l,m}|^2 (free space), m = 0 only since the rest vanish.
///
/// For l <= lmax the cap and hemisphere integrals come from a 4*lmax-node
/// Gauss-Legendre rule (exact for these polynomial integrands); beyond lmax
/// the series is continued with the antiderivative-identity recurrence. The
/// partial sums converge like 1/l (the mode function is discontinuous at the
/// cap edge), so block-averaged 1/l^2 term envelopes are used to estimate and
/// complete the tail; blocks are accumulated in index order.
inline ModeSumResult decay_ratio_mode_sum(const MirrorSpec& mirror, double phi,
                                          double theta_max, ModeSumOptions opts = {}) {
    if (!(theta_max > 0.0 && theta_max <= std::numbers::pi / 2.0))
        throw std::domain_error("decay_ratio_mode_sum: theta_max must be in (0, pi/2]");
    if (opts.lmax < 1) throw std::domain_error("decay_ratio_mode_sum: lmax must be >= 1");
    if (!(opts.tol > 0.0)) throw std::domain_error("decay_ratio_mode_sum: tol must be > 0");

    const double p = reduce_phase(phi);
    const double c = std::cos(theta_max);
    const complex<double> standing(1.0 - mirror.r * std::cos(p), -mirror.r * std::sin(p));
    const double t = mirror.t;
    const double inv4pi = 1.0 / (4.0 * std::numbers::pi);

    // |normalized overlap|^2 from the raw angular integrals
    const auto term = [&](double cap, double hemi, int parity, bool with_mirror) {
        const complex<double> stand = with_mirror ? standing : complex<double>(1.0, 0.0);
        const double thr = with_mirror ? t : 1.0;
        const complex<double> bracket =
            stand * cap + (hemi - cap) + double(parity) * (thr * cap + (hemi - cap));
        return std::norm(bracket) * inv4pi;
    };

    long double num = 0.0L, den = 0.0L;

    // quadrature phase: P_l at the mapped nodes by streaming recurrence
    {
        const auto base = numeric::gauss_legendre(4 * opts.lmax);
        const auto cap_rule = numeric::mapped(base, c, 1.0);
        const auto hemi_rule = numeric::mapped(base, 0.0, 1.0);
        const std::size_t n = base.x.size();
        std::vector<double> cap_pm1(n, 1.0), cap_p(cap_rule.x);
        std::vector<double> hemi_pm1(n, 1.0), hemi_p(hemi_rule.x);
        int parity = 1;
        for (int l = 0; l <= opts.lmax; ++l) {
            double qcap = 0.0, qhemi = 0.0;
            if (l == 0) {
                for (std::size_t j = 0; j < n; ++j) qcap += cap_rule.w[j];
                for (std::size_t j = 0; j < n; ++j) qhemi += hemi_rule.w[j];
            } else if (l == 1) {
                for (std::size_t j = 0; j < n; ++j) qcap += cap_rule.w[j] * cap_p[j];
                for (std::size_t j = 0; j < n; ++j) qhemi += hemi_rule.w[j] * hemi_p[j];
            } else {
                for (std::size_t j = 0; j < n; ++j) {
                    const double pn = ((2.0 * l - 1.0) * cap_rule.x[j] * cap_p[j] -
                                      (l - 1.0) * cap_pm1[j]) / l;
                    cap_pm1[j] = cap_p[j];
                    cap_p[j] = pn;
                    qcap += cap_rule.w[j] * pn;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double pn = ((2.0 * l - 1.0) * hemi_rule.x[j] * hemi_p[j] -
                                      (l - 1.0) * hemi_pm1[j]) / l;
                    hemi_pm1[j] = hemi_p[j];
                    hemi_p[j] = pn;
                    qhemi += hemi_rule.w[j] * pn;
                }
            }
            const double scale = 2.0 * std::numbers::pi *
                                 std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi));
            const double cap_int = scale * qcap;
            const double hemi_int = scale * qhemi;
            num += term(cap_int, hemi_int, parity, true);
            den += term(cap_int, hemi_int, parity, false);
            parity = -parity;
        }
    }

    // continuation phase: antiderivative identity, block-wise with tail completion
    ModeSumResult out;
    out.terms = opts.lmax;
    {
        // seed the streams one step before lmax+1
        numeric::LegendreDeltaStream sc(c), s0(0.0);
        while (sc.l() <= opts.lmax) { (void)sc.delta(); sc.advance(); }
        while (s0.l() <= opts.lmax) { (void)s0.delta(); s0.advance(); }
        const std::int64_t block = 1 << 14;
        int parity = (opts.lmax + 1) % 2 == 0 ? 1 : -1;
        std::int64_t l = opts.lmax + 1;
        while (l <= opts.max_l) {
            const std::int64_t lstart = l;
            long double bnum = 0.0L, bden = 0.0L;
            for (std::int64_t k = 0; k < block && l <= opts.max_l; ++k, ++l) {
                const double sq = std::sqrt(std::numbers::pi / (2.0 * double(l) + 1.0));
                const double cap_int = sq * sc.delta();
                const double hemi_int = sq * s0.delta();
                sc.advance();
                s0.advance();
                bnum += term(cap_int, hemi_int, parity, true);
                bden += term(cap_int, hemi_int, parity, false);
                parity = -parity;
            }
            num += bnum;
            den += bden;
            const std::int64_t counted = l - lstart;
            const double est_tail = double(bnum) * double(lstart) / double(counted);
            if (est_tail < opts.tol / 2.0 || l > opts.max_l) {
                out.tail_estimate = est_tail;
                num += est_tail; // 1/l^2 envelope completion
                break;
            }
        }
        out.terms = l - 1;
    }

    out.ratio = double(num / den);
    return out;
}

} // namespace ionmirror::qed
