// config.hpp - JSON run configuration for the command-line tool.
//
// Every key is optional (the defaults reproduce the free-space extinction
// spectrum of the reference ion), but unknown keys anywhere in the document
// are rejected so typos fail loudly instead of silently running defaults.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aberrations.hpp"
#include "core.hpp"
#include "scanlab.hpp"

namespace ionmirror::cfg {

struct RunConfig {
    AtomScatterer atom{0.0033863412, two_pi * 5.5e6, 493e-9};
    MirrorSpec mirror{};                 ///< default: no mirror (free space)
    CavityGeometry geometry{};
    ProbeSpec probe{};
    scan::ScanModel model = scan::ScanModel::fp_exact;
    aberrations::AberrationSpec aberration{};

    // scan command
    double scan_span = 246.5e-9;         ///< m; half-wave covers one fringe
    int scan_points = 256;
    double scan_mean_counts = 0.0;
    bool with_reflection = true;
    bool with_fluorescence = true;

    // spectrum command
    double spectrum_span = two_pi * 80e6; ///< full detuning span, rad/s
    int spectrum_points = 401;
    double spectrum_mean_counts = 0.0;

    // equivalence command grid
    int eq_eps_points = 20;
    int eq_r_points = 20;
    int eq_phase_points = 64;

    // aberration command
    std::int64_t mc_samples = 1'000'000;
    std::vector<double> eta_grid{0.5, 1.0, 1.5, 2.40483};

    std::uint64_t seed = 0;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& where,
                           std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) { ok = true; break; }
        if (!ok)
            throw std::runtime_error("config: unknown key '" + where + key + "'");
    }
}

inline double num(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw std::runtime_error(std::string("config: '") + key + "' must be a number");
    return v.get<double>();
}

inline std::int64_t integer(const json& obj, const char* key, std::int64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw std::runtime_error(std::string("config: '") + key + "' must be an integer");
    return v.get<std::int64_t>();
}

inline bool boolean(const json& obj, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) throw std::runtime_error(std::string("config: '") + key + "' must be a boolean");
    return v.get<bool>();
}

inline std::string text(const json& obj, const char* key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string()) throw std::runtime_error(std::string("config: '") + key + "' must be a string");
    return v.get<std::string>();
}

} // namespace detail

/// Parse and validate a configuration file. Domain violations surface as
/// std::runtime_error (bad JSON, unknown keys, wrong types) or
/// std::domain_error (out-of-range physics parameters).
inline RunConfig load_config(const std::filesystem::path& path) {
    using detail::json;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path.string());
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config: " + path.string() + ": " + e.what());
    }
    if (!root.is_object()) throw std::runtime_error("config: top level must be an object");

    detail::reject_unknown(root, "",
                           {"atom", "mirror", "geometry", "probe", "model", "aberration",
                            "scan", "spectrum", "equivalence", "mc", "seed"});

    RunConfig c;

    if (root.contains("atom")) {
        const auto& a = root.at("atom");
        detail::reject_unknown(a, "atom.", {"epsilon", "gamma_hz", "wavelength_nm"});
        c.atom = AtomScatterer(detail::num(a, "epsilon", c.atom.epsilon),
                               two_pi * detail::num(a, "gamma_hz", c.atom.gamma / two_pi),
                               1e-9 * detail::num(a, "wavelength_nm", c.atom.wavelength * 1e9));
    }
    if (root.contains("mirror")) {
        const auto& m = root.at("mirror");
        detail::reject_unknown(m, "mirror.", {"reflectivity"});
        c.mirror = MirrorSpec::from_intensity(detail::num(m, "reflectivity", 0.0));
    }
    if (root.contains("geometry")) {
        const auto& g = root.at("geometry");
        detail::reject_unknown(g, "geometry.", {"distance_m", "phase_offset", "scan_delta_m"});
        c.geometry = CavityGeometry(detail::num(g, "distance_m", c.geometry.distance),
                                    detail::num(g, "phase_offset", c.geometry.phase_offset),
                                    detail::num(g, "scan_delta_m", c.geometry.scan_delta));
    }
    if (root.contains("probe")) {
        const auto& p = root.at("probe");
        detail::reject_unknown(p, "probe.", {"detuning_hz", "intensity_scale"});
        c.probe = ProbeSpec(two_pi * detail::num(p, "detuning_hz", c.probe.detuning / two_pi),
                            detail::num(p, "intensity_scale", c.probe.intensity_scale));
    }
    {
        const std::string m = detail::text(root, "model", "fp_exact");
        if (m == "fp_exact") c.model = scan::ScanModel::fp_exact;
        else if (m == "fp_weak") c.model = scan::ScanModel::fp_weak;
        else if (m == "qed") c.model = scan::ScanModel::qed;
        else if (m == "aberration") c.model = scan::ScanModel::aberration;
        else throw std::runtime_error("config: model must be one of fp_exact, fp_weak, qed, aberration");
    }
    if (root.contains("aberration")) {
        const auto& a = root.at("aberration");
        detail::reject_unknown(a, "aberration.", {"model", "eta", "eps_prime"});
        const std::string m = detail::text(a, "model", "sinusoidal");
        aberrations::PhaseModel pm;
        if (m == "sinusoidal") pm = aberrations::PhaseModel::sinusoidal_corrugation;
        else if (m == "gaussian") pm = aberrations::PhaseModel::gaussian_phase;
        else throw std::runtime_error("config: aberration.model must be sinusoidal or gaussian");
        c.aberration = aberrations::AberrationSpec(pm, detail::num(a, "eta", 0.0),
                                                   detail::num(a, "eps_prime", 0.0));
    }
    if (root.contains("scan")) {
        const auto& s = root.at("scan");
        detail::reject_unknown(s, "scan.",
                               {"span_nm", "points", "mean_counts", "with_reflection",
                                "with_fluorescence"});
        c.scan_span = 1e-9 * detail::num(s, "span_nm", c.scan_span * 1e9);
        c.scan_points = int(detail::integer(s, "points", c.scan_points));
        c.scan_mean_counts = detail::num(s, "mean_counts", c.scan_mean_counts);
        c.with_reflection = detail::boolean(s, "with_reflection", c.with_reflection);
        c.with_fluorescence = detail::boolean(s, "with_fluorescence", c.with_fluorescence);
        if (c.scan_points < 1) throw std::domain_error("config: scan.points must be >= 1");
        if (!(c.scan_span > 0.0)) throw std::domain_error("config: scan.span_nm must be > 0");
        if (c.scan_mean_counts < 0.0)
            throw std::domain_error("config: scan.mean_counts must be >= 0");
    }
    if (root.contains("spectrum")) {
        const auto& s = root.at("spectrum");
        detail::reject_unknown(s, "spectrum.", {"span_hz", "points", "mean_counts"});
        c.spectrum_span = two_pi * detail::num(s, "span_hz", c.spectrum_span / two_pi);
        c.spectrum_points = int(detail::integer(s, "points", c.spectrum_points));
        c.spectrum_mean_counts = detail::num(s, "mean_counts", c.spectrum_mean_counts);
        if (c.spectrum_points < 2) throw std::domain_error("config: spectrum.points must be >= 2");
        if (!(c.spectrum_span > 0.0)) throw std::domain_error("config: spectrum.span_hz must be > 0");
        if (c.spectrum_mean_counts < 0.0)
            throw std::domain_error("config: spectrum.mean_counts must be >= 0");
    }
    if (root.contains("equivalence")) {
        const auto& e = root.at("equivalence");
        detail::reject_unknown(e, "equivalence.", {"eps_points", "r_points", "phase_points"});
        c.eq_eps_points = int(detail::integer(e, "eps_points", c.eq_eps_points));
        c.eq_r_points = int(detail::integer(e, "r_points", c.eq_r_points));
        c.eq_phase_points = int(detail::integer(e, "phase_points", c.eq_phase_points));
        if (c.eq_eps_points < 2 || c.eq_r_points < 2 || c.eq_phase_points < 1)
            throw std::domain_error("config: equivalence grid sizes too small");
    }
    if (root.contains("mc")) {
        const auto& m = root.at("mc");
        detail::reject_unknown(m, "mc.", {"samples", "eta_grid"});
        c.mc_samples = detail::integer(m, "samples", c.mc_samples);
        if (c.mc_samples < 2) throw std::domain_error("config: mc.samples must be >= 2");
        if (m.contains("eta_grid")) {
            const auto& g = m.at("eta_grid");
            if (!g.is_array() || g.empty())
                throw std::runtime_error("config: mc.eta_grid must be a non-empty array");
            c.eta_grid.clear();
            for (const auto& v : g) {
                if (!v.is_number())
                    throw std::runtime_error("config: mc.eta_grid entries must be numbers");
                const double eta = v.get<double>();
                if (!(eta >= 0.0)) throw std::domain_error("config: mc.eta_grid entries must be >= 0");
                c.eta_grid.push_back(eta);
            }
        }
    }
    {
        const std::int64_t s = detail::integer(root, "seed", std::int64_t(c.seed));
        if (s < 0) throw std::domain_error("config: seed must be >= 0");
        c.seed = std::uint64_t(s);
    }
    return c;
}

} // namespace ionmirror::cfg
