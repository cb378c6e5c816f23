#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string sim = SIM_BINARY_PATH;

int run(const std::string& args) {
    const std::string cmd = sim + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& leaf) {
    const fs::path p = fs::temp_directory_path() / "ionmirror_cli" / leaf;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& j) {
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << j.dump(2) << '\n';
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("spectrum command produces the documented outputs") {
    const auto dir = fresh_dir("spectrum");
    const auto cfg = write_config(dir, "cfg.json", json::object());
    const auto out = dir / "out";

    REQUIRE(run("spectrum --config " + cfg.string() + " --out " + out.string()) == 0);
    REQUIRE(fs::exists(out / "spectrum.csv"));
    REQUIRE(fs::exists(out / "spectrum.json"));

    const auto rows = lines_of(out / "spectrum.csv");
    REQUIRE(rows.size() == 402); // header + default grid
    REQUIRE(rows[0] == "detuning_hz,transmission,extinction");

    const json meta = json::parse(slurp(out / "spectrum.json"));
    REQUIRE(meta.at("command") == "spectrum");
    REQUIRE(meta.at("points") == 401);
    REQUIRE(meta.at("peak_extinction").get<double>() > 0.01);

    // --points overrides the grid, --svg adds a plot
    const auto out2 = dir / "out2";
    REQUIRE(run("spectrum --config " + cfg.string() + " --out " + out2.string() +
                " --points 11 --svg") == 0);
    REQUIRE(lines_of(out2 / "spectrum.csv").size() == 12);
    REQUIRE(fs::exists(out2 / "spectrum.svg"));
}

TEST_CASE("scan outputs are byte-for-byte reproducible under a fixed seed") {
    const auto dir = fresh_dir("scan");
    json cfg = {
        {"mirror", {{"reflectivity", 0.997}}},
        {"atom", {{"epsilon", 0.02}, {"gamma_hz", 15.1e6}, {"wavelength_nm", 493.0}}},
        {"scan", {{"points", 48}, {"mean_counts", 300.0}}},
        {"seed", 5},
    };
    const auto cfgp = write_config(dir, "cfg.json", cfg);

    const auto a = dir / "a";
    const auto b = dir / "b";
    REQUIRE(run("scan --config " + cfgp.string() + " --out " + a.string()) == 0);
    REQUIRE(run("scan --config " + cfgp.string() + " --out " + b.string()) == 0);
    REQUIRE(slurp(a / "scan.csv") == slurp(b / "scan.csv"));
    REQUIRE(slurp(a / "scan.json") == slurp(b / "scan.json"));

    // a different seed must actually change the draws
    const auto c = dir / "c";
    REQUIRE(run("scan --config " + cfgp.string() + " --out " + c.string() + " --seed 7") == 0);
    REQUIRE(slurp(a / "scan.csv") != slurp(c / "scan.csv"));

    const auto rows = lines_of(a / "scan.csv");
    REQUIRE(rows.size() == 49);
    REQUIRE(rows[0] == "position_nm,phi,transmitted,reflected,fluorescence");
}

TEST_CASE("equivalence command cross-checks the stationary models") {
    const auto dir = fresh_dir("equivalence");
    const json cfg = {
        {"equivalence", {{"eps_points", 6}, {"r_points", 6}, {"phase_points", 8}}},
    };
    const auto cfgp = write_config(dir, "cfg.json", cfg);
    const auto out = dir / "out";
    REQUIRE(run("equivalence --config " + cfgp.string() + " --out " + out.string()) == 0);

    const json rep = json::parse(slurp(out / "equivalence.json"));
    REQUIRE(rep.at("pass") == true);
    REQUIRE(rep.at("max_abs_diff").get<double>() < 1e-12);
    REQUIRE(rep.at("bounce_max_abs_diff").get<double>() < 1e-12);
}

TEST_CASE("aberration command sweeps the corrugation grid") {
    const auto dir = fresh_dir("aberration");
    const json cfg = {
        {"mc", {{"samples", 5000}, {"eta_grid", {0.5, 1.0}}}},
        {"aberration", {{"model", "sinusoidal"}, {"eta", 0.5}, {"eps_prime", 0.004}}},
    };
    const auto cfgp = write_config(dir, "cfg.json", cfg);
    const auto out = dir / "out";
    REQUIRE(run("aberration --config " + cfgp.string() + " --out " + out.string() +
                " --points 16") == 0);

    const auto rows = lines_of(out / "aberration.csv");
    REQUIRE(rows.size() == 1 + 2 * 16);
    REQUIRE(rows[0] == "eta,phi,extinction_avg,extinction_mc,mc_std_error");

    const json rep = json::parse(slurp(out / "aberration.json"));
    REQUIRE(rep.at("per_eta").size() == 2);
    REQUIRE(rep.at("contrast_band").at("eta_lo").get<double>() > 1.0);
}

TEST_CASE("config and argument errors exit distinctly") {
    const auto dir = fresh_dir("errors");
    const auto bad_key = write_config(dir, "bad_key.json", {{"atoms", json::object()}});
    const auto bad_type =
        write_config(dir, "bad_type.json", {{"atom", {{"epsilon", "tiny"}}}});
    const auto out = dir / "out";

    // config problems are runtime failures
    REQUIRE(run("spectrum --config " + bad_key.string() + " --out " + out.string()) == 1);
    REQUIRE(run("spectrum --config " + bad_type.string() + " --out " + out.string()) == 1);

    // argument problems are parse failures
    REQUIRE(run("spectrum --out " + out.string()) == 2);
    REQUIRE(run("warble --config " + bad_key.string() + " --out " + out.string()) == 2);
    REQUIRE(run("--help") == 0);
}
