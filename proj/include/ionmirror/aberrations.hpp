// aberrations.hpp - wavefront-error model for the weak-mirror interferometer.
//
// Each ray picks up a static phase error phi_err on its mirror round trip; in
// the weak-scatterer limit the transmission is linear in e^{i phi_err}, so an
// ensemble average only needs <cos phi_err> and <sin phi_err>. Two error
// ensembles are supported: a sinusoidal corrugation sampled at uniform random
// position (average J0(eta)) and a gaussian phase spread (average
// exp(-eta^2/2)). A Monte Carlo path samples the same averages with errors,
// sharing one draw set across the whole fringe so the curve is smooth in phi.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "core.hpp"
#include "rng.hpp"

namespace ionmirror::aberrations {

enum class PhaseModel {
    sinusoidal_corrugation, ///< phi_err = eta * cos(u), u uniform on [0, 2pi)
    gaussian_phase,         ///< phi_err ~ Normal(0, eta^2)
};

struct AberrationSpec {
    PhaseModel model = PhaseModel::sinusoidal_corrugation;
    double eta = 0.0;       ///< corrugation amplitude / gaussian sigma, radians
    double eps_prime = 0.0; ///< effective single-pass scattering fraction

    AberrationSpec() = default;
    AberrationSpec(PhaseModel model_, double eta_, double eps_prime_)
        : model(model_), eta(eta_), eps_prime(eps_prime_) {
        if (!(eta >= 0.0)) throw std::domain_error("AberrationSpec: eta must be >= 0");
        if (!(eps_prime >= 0.0 && eps_prime <= 0.25))
            throw std::domain_error("AberrationSpec: eps_prime must be in [0, 0.25]");
    }
};

inline double bessel_j0(double x) { return std::cyl_bessel_j(0.0, std::abs(x)); }

/// <e^{i phi_err}> for the ensemble (real by symmetry).
inline double phase_average_factor(PhaseModel model, double eta) {
    if (!(eta >= 0.0)) throw std::domain_error("phase_average_factor: eta must be >= 0");
    switch (model) {
        case PhaseModel::sinusoidal_corrugation: return bessel_j0(eta);
        case PhaseModel::gaussian_phase: return std::exp(-0.5 * eta * eta);
    }
    throw std::domain_error("phase_average_factor: unknown model");
}

/// Weak-limit transmission (normalized by t^2) of a single ray whose round
/// trip acquires the extra phase phi_err.
inline double per_ray_transmission(double eps_prime, double phi_err, double phi_L) {
    const double phi = reduce_phase(phi_L);
    return 1.0 - 4.0 * eps_prime * (std::cos(phi_err) - std::cos(phi_err + phi));
}

/// Ensemble-averaged extinction 4 eps' A(eta) (1 - cos phi_L) with A the
/// phase average factor.
inline double averaged_extinction(const AberrationSpec& spec, double phi_L) {
    const double phi = reduce_phase(phi_L);
    return 4.0 * spec.eps_prime * phase_average_factor(spec.model, spec.eta) *
           (1.0 - std::cos(phi));
}

inline double averaged_transmission_norm(const AberrationSpec& spec, double phi_L) {
    return 1.0 - averaged_extinction(spec, phi_L);
}

/// Self-interference fringe of the atom's own emission through the system.
struct FringeModel {
    double i0 = 1.0;      ///< mean intensity, arbitrary units
    double contrast = 1.0;

    FringeModel() = default;
    FringeModel(double i0_, double contrast_) : i0(i0_), contrast(contrast_) {
        if (!(i0 > 0.0)) throw std::domain_error("FringeModel: i0 must be > 0");
        if (!(contrast >= 0.0 && contrast <= 1.0))
            throw std::domain_error("FringeModel: contrast must be in [0, 1]");
    }
};

inline double self_interference_intensity(const FringeModel& fringe, double phi_L) {
    return fringe.i0 * (1.0 + fringe.contrast * std::cos(reduce_phase(phi_L)));
}

/// Michelson contrast (max-min)/(max+min) of a sampled curve. A constant
/// curve carries no fringe information and is rejected.
inline double michelson_contrast(const std::vector<double>& curve) {
    if (curve.size() < 2) throw std::domain_error("michelson_contrast: need >= 2 samples");
    const auto [lo, hi] = std::minmax_element(curve.begin(), curve.end());
    if (*lo == *hi) throw std::domain_error("michelson_contrast: curve is constant");
    if (*lo + *hi == 0.0) throw std::domain_error("michelson_contrast: zero-mean curve");
    return (*hi - *lo) / (*hi + *lo);
}

struct ContrastPair {
    double fringe = 0.0;     ///< emission-fringe contrast V
    double extinction = 0.0; ///< extinction-curve contrast V'
};

/// Contrasts of the two measured curves taken over the same scan.
inline ContrastPair contrasts(const std::vector<double>& extinction_curve,
                              const std::vector<double>& intensity_curve) {
    return {michelson_contrast(intensity_curve), michelson_contrast(extinction_curve)};
}

// ---- Monte Carlo ensemble sampling ----------------------------------------

struct McOptions {
    std::uint64_t seed = 0;
    std::int64_t samples = 1'000'000;
    std::int64_t chunk = 65'536; ///< draws per RNG stream
    int threads = 0;             ///< 0 = hardware concurrency
};

/// First and second moments of (cos phi_err, sin phi_err) over the ensemble.
struct PhaseStats {
    std::int64_t n = 0;
    double mean_cos = 0.0, mean_sin = 0.0;
    double var_cos = 0.0, var_sin = 0.0, cov = 0.0; ///< sample (co)variances
    double se_cos = 0.0, se_sin = 0.0;              ///< standard errors of the means
};

/// Sample phi_err from the ensemble and accumulate cos/sin moments. Chunk k
/// always uses rng stream k of `seed`, and chunk partials are reduced in
/// index order, so the result does not depend on the thread count.
inline PhaseStats sample_phase_stats(PhaseModel model, double eta, const McOptions& opts) {
    if (opts.samples < 2) throw std::domain_error("sample_phase_stats: need >= 2 samples");
    if (opts.chunk < 1) throw std::domain_error("sample_phase_stats: chunk must be >= 1");
    if (!(eta >= 0.0)) throw std::domain_error("sample_phase_stats: eta must be >= 0");

    const std::int64_t nchunks = (opts.samples + opts.chunk - 1) / opts.chunk;
    struct Partial {
        long double c = 0.0L, s = 0.0L, cc = 0.0L, ss = 0.0L, cs = 0.0L;
    };
    std::vector<Partial> partials(static_cast<std::size_t>(nchunks));

    const auto run_chunk = [&](std::int64_t k) {
        auto eng = rng::make_stream(opts.seed, std::uint64_t(k));
        const std::int64_t lo = k * opts.chunk;
        const std::int64_t hi = std::min(lo + opts.chunk, opts.samples);
        Partial p;
        if (model == PhaseModel::sinusoidal_corrugation) {
            std::uniform_real_distribution<double> u(0.0, two_pi);
            for (std::int64_t i = lo; i < hi; ++i) {
                const double phi_err = eta * std::cos(u(eng));
                const double c = std::cos(phi_err), s = std::sin(phi_err);
                p.c += c; p.s += s; p.cc += c * c; p.ss += s * s; p.cs += c * s;
            }
        } else {
            std::normal_distribution<double> g(0.0, eta > 0.0 ? eta : 1e-300);
            for (std::int64_t i = lo; i < hi; ++i) {
                const double phi_err = g(eng);
                const double c = std::cos(phi_err), s = std::sin(phi_err);
                p.c += c; p.s += s; p.cc += c * c; p.ss += s * s; p.cs += c * s;
            }
        }
        partials[std::size_t(k)] = p;
    };

    int nthreads = opts.threads > 0 ? opts.threads : int(std::thread::hardware_concurrency());
    if (nthreads < 1) nthreads = 1;
    nthreads = int(std::min<std::int64_t>(nthreads, nchunks));
    if (nthreads == 1) {
        for (std::int64_t k = 0; k < nchunks; ++k) run_chunk(k);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(nthreads));
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&, t] {
                for (std::int64_t k = t; k < nchunks; k += nthreads) run_chunk(k);
            });
        for (auto& th : pool) th.join();
    }

    long double c = 0.0L, s = 0.0L, cc = 0.0L, ss = 0.0L, cs = 0.0L;
    for (const auto& p : partials) { c += p.c; s += p.s; cc += p.cc; ss += p.ss; cs += p.cs; }

    PhaseStats st;
    st.n = opts.samples;
    const long double n = opts.samples;
    st.mean_cos = double(c / n);
    st.mean_sin = double(s / n);
    st.var_cos = double((cc - c * c / n) / (n - 1));
    st.var_sin = double((ss - s * s / n) / (n - 1));
    st.cov = double((cs - c * s / n) / (n - 1));
    st.var_cos = std::max(st.var_cos, 0.0);
    st.var_sin = std::max(st.var_sin, 0.0);
    st.se_cos = std::sqrt(st.var_cos / double(n));
    st.se_sin = std::sqrt(st.var_sin / double(n));
    return st;
}

struct McCurvePoint {
    double phi = 0.0;
    double extinction = 0.0;
    double std_error = 0.0;
};

struct McCurve {
    PhaseStats stats;
    std::vector<McCurvePoint> points;
};

/// Monte Carlo extinction curve over a fringe-phase grid. One shared draw set
/// feeds every grid point: E(phi) = 4 eps' [<cos>(1 - cos phi) + <sin> sin phi],
/// with the per-point standard error propagated from the moment matrix. The
/// shared draws make the sampled curve exactly zero at phi = 0.
inline McCurve mc_extinction_curve(const AberrationSpec& spec, const std::vector<double>& phis,
                                   const McOptions& opts) {
    McCurve out;
    out.stats = sample_phase_stats(spec.model, spec.eta, opts);
    out.points.reserve(phis.size());
    const double k = 4.0 * spec.eps_prime;
    for (const double phi_raw : phis) {
        const double phi = reduce_phase(phi_raw);
        const double a = 1.0 - std::cos(phi);
        const double b = std::sin(phi);
        const double e = k * (a * out.stats.mean_cos + b * out.stats.mean_sin);
        const double var = (a * a * out.stats.var_cos + b * b * out.stats.var_sin +
                            2.0 * a * b * out.stats.cov) / double(out.stats.n);
        out.points.push_back({phi_raw, e, k * std::sqrt(std::max(var, 0.0))});
    }
    return out;
}

/// Monte Carlo emission-fringe contrast from the same draw set,
/// sqrt(<cos>^2 + <sin>^2), with a first-order propagated standard error.
struct McContrast {
    double value = 0.0;
    double std_error = 0.0;
};

inline McContrast mc_fringe_contrast(const PhaseStats& st) {
    const double v = std::hypot(st.mean_cos, st.mean_sin);
    if (v == 0.0) return {0.0, std::sqrt(st.var_cos / double(st.n))};
    const double a = st.mean_cos / v, b = st.mean_sin / v;
    const double var = (a * a * st.var_cos + b * b * st.var_sin + 2.0 * a * b * st.cov) /
                       double(st.n);
    return {v, std::sqrt(std::max(var, 0.0))};
}

} // namespace ionmirror::aberrations
