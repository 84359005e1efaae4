// End-to-end tests for the liouville-lab binary: exit codes, report shapes,
// and byte-level reproducibility.  The binary path and the source tree come
// in through compile definitions so the tests run from any build directory.

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string preset(const std::string& name) {
    return std::string(LAB_SOURCE_DIR) + "/presets/" + name + ".json";
}

std::string fixture(const std::string& name) {
    return std::string(LAB_SOURCE_DIR) + "/tests/fixtures/" + name;
}

// fresh scratch directory per test section
fs::path scratch() {
    static int counter = 0;
    const fs::path p =
        fs::temp_directory_path() / ("lab_cli_" + std::to_string(::getpid()) + "_" +
                                     std::to_string(counter++));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_lab(const std::string& args, const fs::path& stderr_to = {}) {
    std::string cmd = std::string(LAB_BINARY) + " " + args + " > /dev/null";
    cmd += stderr_to.empty() ? " 2>&1" : " 2> " + stderr_to.string();
    const int raw = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(raw));
    return WEXITSTATUS(raw);
}

json load_json(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return json::parse(in);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const json* find_cert(const json& rep, const std::string& name) {
    for (const auto& c : rep.at("certificates"))
        if (c.at("name") == name) return &c;
    return nullptr;
}

}  // namespace

TEST_CASE("build passes on every shipped preset", "[cli][build]") {
    const char* names[] = {"global_liouville",      "klein_liouville", "linear_integral_torus",
                           "jordan_foliation",      "mixed_foliation", "reeb_foliation",
                           "flat_torus"};
    for (const char* name : names) {
        const fs::path out = scratch();
        const int rc = run_lab("build " + preset(name) + " --out " + out.string() +
                               " --no-timestamp");
        INFO(name);
        CHECK(rc == 0);
        const json rep = load_json(out / "build_report.json");
        CHECK(rep.at("family") == name);
        CHECK(rep.at("all_passed") == true);
        CHECK(!rep.at("certificates").empty());
        CHECK(!rep.contains("timestamp"));
        fs::remove_all(out);
    }
}

TEST_CASE("build fails certificates for broken configs", "[cli][build]") {
    SECTION("profile period incompatible with the lattice") {
        const fs::path out = scratch();
        const int rc = run_lab("build " + fixture("bad_periodicity.json") + " --out " +
                               out.string() + " --no-timestamp");
        CHECK(rc == 2);
        const json rep = load_json(out / "build_report.json");
        const json* c = find_cert(rep, "periodicity_b");
        REQUIRE(c != nullptr);
        CHECK(c->at("passed") == false);
        CHECK(rep.at("all_passed") == false);
        fs::remove_all(out);
    }
    SECTION("separating profiles collide") {
        const fs::path out = scratch();
        const int rc = run_lab("build " + fixture("bad_separation.json") + " --out " +
                               out.string() + " --no-timestamp");
        CHECK(rc == 2);
        const json rep = load_json(out / "build_report.json");
        const json* c = find_cert(rep, "separation_a");
        REQUIRE(c != nullptr);
        CHECK(c->at("passed") == false);
        fs::remove_all(out);
    }
}

TEST_CASE("bad input exits with code 1", "[cli][errors]") {
    const fs::path out = scratch();
    SECTION("missing config file") {
        CHECK(run_lab("build " + out.string() + "/nope.json --out " + out.string()) == 1);
    }
    SECTION("unknown key") {
        const fs::path cfg = out / "unknown.json";
        std::ofstream(cfg) << R"({"family": "flat_torus", "bogus": 3})";
        const fs::path err = out / "err.txt";
        CHECK(run_lab("build " + cfg.string() + " --out " + out.string(), err) == 1);
        CHECK(slurp(err).find("bogus") != std::string::npos);
    }
    SECTION("malformed json reports line and column") {
        const fs::path cfg = out / "broken.json";
        std::ofstream(cfg) << "{\"family\": \"flat_torus\",\n   []";
        const fs::path err = out / "err.txt";
        CHECK(run_lab("build " + cfg.string() + " --out " + out.string(), err) == 1);
        const std::string msg = slurp(err);
        CHECK(msg.find("line 2") != std::string::npos);
        CHECK(msg.find("column") != std::string::npos);
    }
    fs::remove_all(out);
}

TEST_CASE("classify matches the known type fractions", "[cli][classify]") {
    SECTION("mixed foliation splits half and half") {
        const fs::path out = scratch();
        REQUIRE(run_lab("classify " + preset("mixed_foliation") + " --grid 128 --out " +
                        out.string() + " --no-timestamp") == 0);
        const json rep = load_json(out / "classification.json");
        CHECK(rep.at("jordan_fraction").get<double>() ==
              Catch::Approx(0.5).margin(0.05));
        CHECK(rep.at("fractions").at("LIOUVILLE").get<double>() ==
              Catch::Approx(0.5).margin(0.05));

        // the CSV carries one labelled cell center per grid cell
        std::ifstream csv(out / "classification.csv");
        std::string line;
        REQUIRE(std::getline(csv, line));
        CHECK(line == "x,y,label");
        int rows = 0;
        while (std::getline(csv, line)) ++rows;
        CHECK(rows == 128 * 128);
        fs::remove_all(out);
    }
    SECTION("global liouville preset is liouville everywhere") {
        const fs::path out = scratch();
        REQUIRE(run_lab("classify " + preset("global_liouville") + " --grid 64 --out " +
                        out.string() + " --no-timestamp") == 0);
        const json rep = load_json(out / "classification.json");
        CHECK(rep.at("fractions").at("LIOUVILLE").get<double>() == 1.0);
        fs::remove_all(out);
    }
    SECTION("flat torus with F = p_x^2 is jordan everywhere") {
        const fs::path out = scratch();
        REQUIRE(run_lab("classify " + preset("flat_torus") + " --grid 32 --out " +
                        out.string() + " --no-timestamp") == 0);
        const json rep = load_json(out / "classification.json");
        CHECK(rep.at("jordan_fraction").get<double>() == 1.0);
        fs::remove_all(out);
    }
}

TEST_CASE("flow conserves the integrals of the global preset", "[cli][flow]") {
    const fs::path out = scratch();
    REQUIRE(run_lab("flow " + preset("global_liouville") +
                    " --random 10 --T 10 --seed 42 --out " + out.string() +
                    " --no-timestamp") == 0);
    const json rep = load_json(out / "flow_report.json");
    CHECK(rep.at("max_integral_drift").get<double>() <= 1e-6);
    CHECK(rep.at("max_h_drift").get<double>() <= 1e-8);
    CHECK(rep.at("underflow_count") == 0);
    CHECK(fs::exists(out / "trajectory_09.csv"));

    // header carries time, reduced position, momenta, energy, one integral
    std::ifstream csv(out / "trajectory_00.csv");
    std::string header;
    REQUIRE(std::getline(csv, header));
    CHECK(header == "t,x,y,px,py,H,F_0");
    fs::remove_all(out);
}

TEST_CASE("flat geodesic lands on the expected lattice image", "[cli][flow]") {
    const fs::path out = scratch();
    REQUIRE(run_lab("flow " + preset("flat_torus") + " --ic " + fixture("flat_ic.csv") +
                    " --T 4 --out " + out.string() + " --no-timestamp") == 0);
    const json rep = load_json(out / "flow_report.json");
    const json& tj = rep.at("trajectories").at(0);
    REQUIRE(tj.at("status") == "ok");
    // IC (0,0,1,2) run for T=4 ends at (4,8), same lattice class as (4,2)
    const double dx = tj.at("final").at(0).get<double>() - 4.0;
    const double dy = tj.at("final").at(1).get<double>() - 2.0;
    CHECK(std::abs(dx - std::round(dx)) <= 1e-9);
    CHECK(std::abs(dy - std::round(dy)) <= 1e-9);
    fs::remove_all(out);
}

TEST_CASE("flow reports an underflow and keeps going", "[cli][flow]") {
    const fs::path out = scratch();
    REQUIRE(run_lab("flow " + fixture("jordan_block.json") + " --ic " +
                    fixture("degenerate_ic.csv") + " --T 3 --out " + out.string() +
                    " --no-timestamp") == 0);
    const json rep = load_json(out / "flow_report.json");
    REQUIRE(rep.at("trajectories").size() == 2);
    CHECK(rep.at("trajectories").at(0).at("status") == "step_underflow");
    CHECK(rep.at("trajectories").at(0).contains("detail"));
    CHECK(rep.at("trajectories").at(1).at("status") == "ok");
    CHECK(rep.at("underflow_count") == 1);
    CHECK(!fs::exists(out / "trajectory_00.csv"));
    CHECK(fs::exists(out / "trajectory_01.csv"));
    fs::remove_all(out);
}

TEST_CASE("equivalent produces a partner sharing geodesics", "[cli][equivalent]") {
    const fs::path out = scratch();
    REQUIRE(run_lab("equivalent " + preset("global_liouville") +
                    " --geodesics 4 --T 2 --out " + out.string() + " --no-timestamp") == 0);
    const json rep = load_json(out / "equivalence_report.json");
    CHECK(rep.at("all_passed") == true);
    CHECK(rep.at("equivalence_residual").get<double>() <= 1e-4);

    // reported profile extrema must agree with a direct 1-D scan at 10x density
    double x_min = std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();
    const int n = 6400;
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / n;
        x_min = std::min(x_min, 3.0 + std::cos(2.0 * M_PI * t));
        y_max = std::max(y_max, std::sin(2.0 * M_PI * t));
    }
    CHECK(rep.at("x_min").get<double>() == Catch::Approx(x_min).margin(1e-6));
    CHECK(rep.at("y_max").get<double>() == Catch::Approx(y_max).margin(1e-6));

    const json* c = find_cert(rep, "gbar_positive_definite");
    REQUIRE(c != nullptr);
    CHECK(c->at("passed") == true);
    fs::remove_all(out);
}

TEST_CASE("equivalent rejects profiles without a gap", "[cli][equivalent]") {
    const fs::path out = scratch();
    CHECK(run_lab("equivalent " + fixture("bad_ordering.json") + " --out " + out.string() +
                  " --no-timestamp") == 2);
    const json rep = load_json(out / "equivalence_report.json");
    const json* c = find_cert(rep, "profile_ordering");
    REQUIRE(c != nullptr);
    CHECK(c->at("passed") == false);
    fs::remove_all(out);
}

TEST_CASE("super measures the span of independent integrals", "[cli][super]") {
    SECTION("flat torus carries a rank 3 span and zero curvature") {
        const fs::path out = scratch();
        REQUIRE(run_lab("super " + preset("flat_torus") + " --out " + out.string() +
                        " --no-timestamp") == 0);
        const json rep = load_json(out / "super_report.json");
        CHECK(rep.at("rank") == 3);
        CHECK(rep.at("rejected").empty());
        CHECK(rep.at("curvature").at("max_abs").get<double>() <= 1e-8);
        fs::remove_all(out);
    }
    SECTION("global preset stops at rank 2 with nonconstant curvature") {
        const fs::path out = scratch();
        REQUIRE(run_lab("super " + preset("global_liouville") + " --out " + out.string() +
                        " --no-timestamp") == 0);
        const json rep = load_json(out / "super_report.json");
        CHECK(rep.at("rank") == 2);
        CHECK(rep.at("curvature").at("max_deviation").get<double>() > 1e-3);
        fs::remove_all(out);
    }
    SECTION("a corrupted candidate is flagged and the rest are ranked") {
        const fs::path out = scratch();
        REQUIRE(run_lab("super " + fixture("corrupted_super.json") + " --out " +
                        out.string() + " --no-timestamp") == 0);
        const json rep = load_json(out / "super_report.json");
        const auto& rejected = rep.at("rejected");
        REQUIRE(rejected.size() == 1);
        CHECK(rejected.at(0) == "corrupted");
        CHECK(rep.at("rank") == 2);
        CHECK(rep.at("singular_values").size() == 2);
        fs::remove_all(out);
    }
}

TEST_CASE("reports are byte identical without timestamps", "[cli][determinism]") {
    const fs::path a = scratch(), b = scratch();
    const std::string args = " --random 3 --T 1 --seed 11 --no-timestamp";
    REQUIRE(run_lab("flow " + preset("global_liouville") + args + " --out " + a.string()) == 0);
    REQUIRE(run_lab("flow " + preset("global_liouville") + args + " --out " + b.string()) == 0);
    CHECK(slurp(a / "flow_report.json") == slurp(b / "flow_report.json"));
    CHECK(slurp(a / "trajectory_02.csv") == slurp(b / "trajectory_02.csv"));

    REQUIRE(run_lab("classify " + preset("mixed_foliation") + " --grid 32 --out " +
                    a.string() + " --no-timestamp") == 0);
    REQUIRE(run_lab("classify " + preset("mixed_foliation") + " --grid 32 --out " +
                    b.string() + " --no-timestamp") == 0);
    CHECK(slurp(a / "classification.json") == slurp(b / "classification.json"));
    CHECK(slurp(a / "classification.csv") == slurp(b / "classification.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}
