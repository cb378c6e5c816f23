// commands.hpp - the four subcommands behind the `sim` tool. Each one loads a
// run configuration, writes its outputs under --out, and returns a process
// exit code (0 ok, 1 runtime failure, 2 usage error — the last is produced by
// the argument parser, not here).
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aberrations.hpp"
#include "config.hpp"
#include "fp.hpp"
#include "io.hpp"
#include "qed.hpp"
#include "scanlab.hpp"

namespace ionmirror::cli {

struct CommandOptions {
    std::filesystem::path config_path; ///< empty = built-in defaults
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;   ///< overrides the config seed
    std::optional<int> points;           ///< overrides the command's main grid
    bool svg = false;
};

namespace detail {

using nlohmann::ordered_json;

inline cfg::RunConfig load(const CommandOptions& opt) {
    cfg::RunConfig c =
        opt.config_path.empty() ? cfg::RunConfig{} : cfg::load_config(opt.config_path);
    if (opt.seed) c.seed = *opt.seed;
    return c;
}

inline std::filesystem::path prepare_out(const CommandOptions& opt) {
    if (opt.out_dir.empty()) throw std::runtime_error("missing output directory");
    std::filesystem::create_directories(opt.out_dir);
    return opt.out_dir;
}

inline ordered_json atom_json(const AtomScatterer& a) {
    return {{"epsilon", a.epsilon},
            {"gamma_hz", a.gamma / two_pi},
            {"wavelength_nm", a.wavelength * 1e9}};
}

inline ordered_json mirror_json(const MirrorSpec& m) {
    return {{"r", m.r}, {"t", m.t}, {"reflectivity", m.r * m.r}};
}

inline ordered_json fit_json(const scan::SinusoidFit& f) {
    return {{"offset", f.offset},       {"amplitude", f.amplitude},
            {"phase", f.phase},         {"rms_residual", f.rms_residual},
            {"se_offset", f.se_offset}, {"se_amplitude", f.se_amplitude},
            {"se_phase", f.se_phase}};
}

} // namespace detail

/// Probe-detuning sweep at fixed mirror position: spectrum.csv, a Lorentzian
/// fit plus model-level peak/width analysis in spectrum.json, optional SVG.
inline int run_spectrum(const CommandOptions& opt) {
    using detail::ordered_json;
    cfg::RunConfig c = detail::load(opt);
    if (opt.points) c.spectrum_points = *opt.points;
    if (c.spectrum_points < 2) throw std::runtime_error("spectrum needs at least 2 points");
    const auto out = detail::prepare_out(opt);

    const double phi = round_trip_phase(c.geometry, c.atom.wavelength);
    const double half = 0.5 * c.spectrum_span;
    const auto records =
        scan::generate_spectrum(c.atom, c.mirror, phi, -half, half, c.spectrum_points,
                                c.spectrum_mean_counts, c.seed);
    const auto model = qed::spectrum(c.atom, c.mirror, phi, -half, half, c.spectrum_points);

    std::vector<std::vector<double>> rows;
    std::vector<double> xs, ys;
    rows.reserve(records.size());
    for (const auto& rec : records) {
        rows.push_back({rec.detuning / two_pi, rec.transmission, rec.extinction});
        xs.push_back(rec.detuning);
        ys.push_back(rec.extinction);
    }
    io::write_csv(out / "spectrum.csv", {"detuning_hz", "transmission", "extinction"}, rows);

    ordered_json fitj;
    try {
        const auto fit = scan::fit_lorentzian(xs, ys);
        fitj = {{"converged", true},
                {"center_hz", fit.center / two_pi},
                {"fwhm_hz", fit.fwhm / two_pi},
                {"depth", fit.depth},
                {"rms_residual", fit.rms_residual},
                {"se_center_hz", fit.se_center / two_pi},
                {"se_fwhm_hz", fit.se_fwhm / two_pi},
                {"se_depth", fit.se_depth},
                {"iterations", fit.iterations},
                {"reliable", fit.reliable}};
    } catch (const scan::FitNotConverged& e) {
        fitj = {{"converged", false},
                {"center_hz", e.best.center / two_pi},
                {"fwhm_hz", e.best.fwhm / two_pi},
                {"depth", e.best.depth},
                {"rms_residual", e.best.rms_residual},
                {"iterations", e.best.iterations},
                {"reliable", false}};
    }

    const auto rates = qed::modified_rates(c.atom, c.mirror, phi);
    ordered_json j{{"command", "spectrum"},
                   {"seed", c.seed},
                   {"atom", detail::atom_json(c.atom)},
                   {"mirror", detail::mirror_json(c.mirror)},
                   {"phase", phi},
                   {"points", c.spectrum_points},
                   {"mean_counts", c.spectrum_mean_counts},
                   {"peak_extinction", model.peak_extinction},
                   {"peak_detuning_hz", model.peak_detuning / two_pi},
                   {"fwhm_hz", model.fwhm ? ordered_json(*model.fwhm / two_pi)
                                          : ordered_json(nullptr)},
                   {"lorentzian_fit", fitj},
                   {"modified_rates",
                    {{"gamma_ratio", rates.gamma_mod / c.atom.gamma},
                     {"shift_ratio", rates.lamb_shift / c.atom.gamma}}}};
    io::write_json(out / "spectrum.json", j);

    if (opt.svg) {
        io::SvgSeries meas{"measured", {}, {}};
        io::SvgSeries theory{"model", {}, {}};
        for (const auto& rec : records) {
            meas.x.push_back(rec.detuning / two_pi);
            meas.y.push_back(rec.extinction);
        }
        for (const auto& pt : model.points) {
            theory.x.push_back(pt.detuning / two_pi);
            theory.y.push_back(pt.extinction);
        }
        io::write_svg(out / "spectrum.svg", {meas, theory}, "detuning (Hz)", "extinction");
    }
    return 0;
}

/// Mirror-position sweep: scan.csv with the recorded channels, sinusoid fits
/// and the contrast/phase summary in scan.json, optional SVG.
inline int run_scan(const CommandOptions& opt) {
    using detail::ordered_json;
    cfg::RunConfig c = detail::load(opt);
    if (opt.points) c.scan_points = *opt.points;
    if (c.scan_points < 3) throw std::runtime_error("scan needs at least 3 points");
    const auto out = detail::prepare_out(opt);

    scan::ScanParams p;
    p.model = c.model;
    p.atom = c.atom;
    p.mirror = c.mirror;
    p.geometry = c.geometry;
    p.probe = c.probe;
    p.aberration = c.aberration;
    p.scan_span = c.scan_span;
    p.n_points = c.scan_points;
    p.with_reflection = c.with_reflection;
    p.with_fluorescence = c.with_fluorescence;
    p.mean_counts = c.scan_mean_counts;
    p.seed = c.seed;
    const auto records = scan::generate_scan(p);

    const bool has_r = records.front().reflected.has_value();
    const bool has_f = records.front().fluorescence.has_value();
    std::vector<std::string> header{"position_nm", "phi", "transmitted"};
    if (has_r) header.push_back("reflected");
    if (has_f) header.push_back("fluorescence");

    std::vector<std::vector<double>> rows;
    std::vector<double> phis, trans, extinct, refl, fluor;
    for (const auto& rec : records) {
        std::vector<double> row{rec.position * 1e9, rec.phi, rec.transmitted};
        if (has_r) row.push_back(*rec.reflected);
        if (has_f) row.push_back(*rec.fluorescence);
        rows.push_back(std::move(row));
        phis.push_back(rec.phi);
        trans.push_back(rec.transmitted);
        extinct.push_back(1.0 - rec.transmitted);
        if (has_r) refl.push_back(*rec.reflected);
        if (has_f) fluor.push_back(*rec.fluorescence);
    }
    io::write_csv(out / "scan.csv", header, rows);

    const auto model_name = [](scan::ScanModel m) {
        switch (m) {
            case scan::ScanModel::fp_exact: return "fp_exact";
            case scan::ScanModel::fp_weak: return "fp_weak";
            case scan::ScanModel::qed: return "qed";
            case scan::ScanModel::aberration: return "aberration";
        }
        return "fp_exact";
    };

    const auto fit_t = scan::fit_sinusoid(phis, trans);
    const auto fit_e = scan::fit_sinusoid(phis, extinct);
    std::optional<scan::SinusoidFit> fit_r, fit_f;
    if (has_r) fit_r = scan::fit_sinusoid(phis, refl);
    if (has_f) fit_f = scan::fit_sinusoid(phis, fluor);

    ordered_json fits{{"transmitted", detail::fit_json(fit_t)},
                      {"extinction", detail::fit_json(fit_e)}};
    if (fit_r) fits["reflected"] = detail::fit_json(*fit_r);
    if (fit_f) fits["fluorescence"] = detail::fit_json(*fit_f);

    ordered_json summary;
    if (fit_f && fit_f->offset > 0.0)
        summary["v"] = fit_f->amplitude / fit_f->offset;
    else
        summary["v"] = nullptr;
    try {
        summary["v_prime"] = aberrations::michelson_contrast(extinct);
    } catch (const std::domain_error&) {
        summary["v_prime"] = nullptr;
    }
    if (fit_r)
        summary["phase_relation"] = scan::phase_relation(fit_t, *fit_r);
    else if (fit_f)
        summary["phase_relation"] = scan::phase_relation(fit_t, *fit_f);
    else
        summary["phase_relation"] = nullptr;

    ordered_json j{{"command", "scan"},
                   {"seed", c.seed},
                   {"model", model_name(c.model)},
                   {"atom", detail::atom_json(c.atom)},
                   {"mirror", detail::mirror_json(c.mirror)},
                   {"phase_offset", c.geometry.phase_offset},
                   {"span_nm", c.scan_span * 1e9},
                   {"points", c.scan_points},
                   {"mean_counts", c.scan_mean_counts},
                   {"detuning_hz", c.probe.detuning / two_pi},
                   {"fits", fits},
                   {"summary", summary}};
    if (c.model == scan::ScanModel::aberration)
        j["aberration"] = {{"model", c.aberration.model ==
                                             aberrations::PhaseModel::sinusoidal_corrugation
                                         ? "sinusoidal"
                                         : "gaussian"},
                           {"eta", c.aberration.eta},
                           {"eps_prime", c.aberration.eps_prime}};
    io::write_json(out / "scan.json", j);

    if (opt.svg) {
        std::vector<io::SvgSeries> series;
        io::SvgSeries st{"transmitted", {}, {}};
        for (const auto& rec : records) {
            st.x.push_back(rec.position * 1e9);
            st.y.push_back(rec.transmitted);
        }
        series.push_back(std::move(st));
        if (has_r) {
            io::SvgSeries sr{"reflected", {}, {}};
            for (const auto& rec : records) {
                sr.x.push_back(rec.position * 1e9);
                sr.y.push_back(*rec.reflected);
            }
            series.push_back(std::move(sr));
        }
        if (has_f) {
            io::SvgSeries sf{"fluorescence", {}, {}};
            for (const auto& rec : records) {
                sf.x.push_back(rec.position * 1e9);
                sf.y.push_back(*rec.fluorescence);
            }
            series.push_back(std::move(sf));
        }
        io::write_svg(out / "scan.svg", series, "mirror position (nm)", "normalized signal");
    }
    return 0;
}

/// Cross-checks the three transmission routes on an (epsilon, r, phi) grid:
/// closed form vs detuning model at zero detuning everywhere, and vs the
/// explicit bounce series where it converges. Writes equivalence.json.
inline int run_equivalence(const CommandOptions& opt) {
    using detail::ordered_json;
    cfg::RunConfig c = detail::load(opt);
    if (opt.points) c.eq_phase_points = *opt.points;
    const auto out = detail::prepare_out(opt);

    const double tol = 1e-12;
    double max_diff = 0.0, bounce_max = 0.0;
    std::int64_t compared = 0, skipped = 0;
    for (int ie = 0; ie < c.eq_eps_points; ++ie) {
        const double eps = 0.5 * double(ie) / double(c.eq_eps_points - 1);
        for (int ir = 0; ir < c.eq_r_points; ++ir) {
            const double r = double(ir) / double(c.eq_r_points - 1);
            const AtomScatterer atom(eps, 1.0, 493e-9);
            const MirrorSpec mirror = MirrorSpec::from_r(r);
            for (int ip = 0; ip < c.eq_phase_points; ++ip) {
                const double phi = two_pi * double(ip) / double(c.eq_phase_points);
                if (2.0 * r * eps == 1.0 && std::cos(phi) == 1.0) {
                    ++skipped; // singular configuration has no finite response
                    continue;
                }
                const double exact = fp::transmission_exact_norm(atom, mirror, phi);
                const double qed0 = qed::qed_transmission_norm(atom, mirror, phi, 0.0);
                max_diff = std::max(max_diff, std::abs(exact - qed0));
                ++compared;
                if (2.0 * r * eps <= 0.98) {
                    // the bounce series carries the full t^2 prefactor, so
                    // compare absolute transmissions on this route
                    const double bounce = fp::transmission_bounce_sum(atom, mirror, phi);
                    bounce_max = std::max(
                        bounce_max, std::abs(fp::transmission_exact(atom, mirror, phi) - bounce));
                } else {
                    ++skipped; // bounce series too slow near the singular ring
                }
            }
        }
    }

    const bool pass = max_diff <= tol && bounce_max <= tol;
    ordered_json j{{"command", "equivalence"},
                   {"grid",
                    {{"eps_points", c.eq_eps_points},
                     {"r_points", c.eq_r_points},
                     {"phase_points", c.eq_phase_points}}},
                   {"grid_size", compared},
                   {"skipped_points", skipped},
                   {"tolerance", tol},
                   {"max_abs_diff", max_diff},
                   {"bounce_max_abs_diff", bounce_max},
                   {"pass", pass}};
    io::write_json(out / "equivalence.json", j);
    return pass ? 0 : 1;
}

/// Wavefront-error study: ensemble-averaged extinction curves against their
/// Monte Carlo estimates for each requested corrugation amplitude, plus the
/// corrugation band compatible with a fringe contrast between 0.3 and 0.4.
inline int run_aberration(const CommandOptions& opt) {
    using detail::ordered_json;
    cfg::RunConfig c = detail::load(opt);
    if (opt.points) c.scan_points = *opt.points;
    if (c.scan_points < 3) throw std::runtime_error("aberration needs at least 3 points");
    const auto out = detail::prepare_out(opt);

    std::vector<double> phis;
    phis.reserve(std::size_t(c.scan_points));
    for (int i = 0; i < c.scan_points; ++i)
        phis.push_back(two_pi * double(i) / double(c.scan_points));

    aberrations::McOptions mc;
    mc.seed = c.seed;
    mc.samples = c.mc_samples;

    std::vector<std::vector<double>> rows;
    ordered_json per_eta = ordered_json::array();
    for (std::size_t k = 0; k < c.eta_grid.size(); ++k) {
        const double eta = c.eta_grid[k];
        aberrations::AberrationSpec spec(c.aberration.model, eta,
                                         c.aberration.eps_prime > 0.0 ? c.aberration.eps_prime
                                                                      : 0.004);
        aberrations::McOptions mck = mc;
        mck.seed = rng::mix(c.seed ^ (0x5eedULL + k)); // one draw set per eta
        const auto curve = aberrations::mc_extinction_curve(spec, phis, mck);

        std::vector<double> emc;
        double max_dev = 0.0;
        for (std::size_t i = 0; i < phis.size(); ++i) {
            const double analytic = aberrations::averaged_extinction(spec, phis[i]);
            const auto& pt = curve.points[i];
            rows.push_back({eta, phis[i], analytic, pt.extinction, pt.std_error});
            emc.push_back(pt.extinction);
            max_dev = std::max(max_dev, std::abs(pt.extinction - analytic));
        }
        const auto fringe = aberrations::mc_fringe_contrast(curve.stats);
        const double factor =
            aberrations::phase_average_factor(spec.model, eta);

        ordered_json ej{{"eta", eta},
                        {"phase_factor", factor},
                        {"phase_factor_mc", curve.stats.mean_cos},
                        {"phase_factor_mc_se", curve.stats.se_cos},
                        {"fringe_contrast_mc", fringe.value},
                        {"fringe_contrast_mc_se", fringe.std_error},
                        {"max_abs_dev", max_dev}};
        try {
            ej["v_prime_mc"] = aberrations::michelson_contrast(emc);
        } catch (const std::domain_error&) {
            ej["v_prime_mc"] = nullptr;
        }
        per_eta.push_back(std::move(ej));
    }
    io::write_csv(out / "aberration.csv",
                  {"eta", "phi", "extinction_avg", "extinction_mc", "mc_std_error"}, rows);

    // corrugation amplitudes whose sinusoidal-ensemble fringe contrast lies in
    // [0.3, 0.4]; J0 is monotone on [0, first zero], so bisection inverts it
    const auto invert_j0 = [](double v) {
        double lo = 0.0, hi = 2.4048255576957724;
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (lo + hi);
            if (aberrations::bessel_j0(m) > v) lo = m; else hi = m;
        }
        return 0.5 * (lo + hi);
    };
    ordered_json j{{"command", "aberration"},
                   {"seed", c.seed},
                   {"samples", c.mc_samples},
                   {"model", c.aberration.model ==
                                     aberrations::PhaseModel::sinusoidal_corrugation
                                 ? "sinusoidal"
                                 : "gaussian"},
                   {"eps_prime",
                    c.aberration.eps_prime > 0.0 ? c.aberration.eps_prime : 0.004},
                   {"points", c.scan_points},
                   {"per_eta", per_eta},
                   {"contrast_band",
                    {{"contrast_lo", 0.3},
                     {"contrast_hi", 0.4},
                     {"eta_lo", invert_j0(0.4)},
                     {"eta_hi", invert_j0(0.3)}}}};
    io::write_json(out / "aberration.json", j);

    if (opt.svg) {
        std::vector<io::SvgSeries> series;
        for (std::size_t k = 0; k < c.eta_grid.size(); ++k) {
            io::SvgSeries s{"eta=" + io::format_double(c.eta_grid[k]).substr(0, 6), {}, {}};
            for (std::size_t i = 0; i < phis.size(); ++i) {
                const auto& row = rows[k * phis.size() + i];
                s.x.push_back(row[1]);
                s.y.push_back(row[3]);
            }
            series.push_back(std::move(s));
        }
        io::write_svg(out / "aberration.svg", series, "fringe phase (rad)", "extinction");
    }
    return 0;
}

} // namespace ionmirror::cli
