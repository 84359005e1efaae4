// liouville_lab: command line front end for the header library.
//
// Subcommands: build, classify, flow, equivalent, super.  Each one loads a
// JSON family config, runs the corresponding pipeline, and writes reports
// into --out.  Exit codes: 0 success, 1 bad input, 2 a mathematical
// certificate or residual bound failed.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "liouville/config.hpp"
#include "liouville/equivalence.hpp"
#include "liouville/families.hpp"
#include "liouville/flow.hpp"
#include "liouville/integral.hpp"
#include "liouville/report.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<double> tol;
    std::optional<int> grid;
    std::optional<std::uint64_t> seed;
    bool no_timestamp = false;
};

void add_common(CLI::App* sub, CommonOpts& o) {
    sub->add_option("config", o.config_path, "family config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_dir, "directory for reports")->capture_default_str();
    sub->add_option("--tol", o.tol, "override the command tolerance");
    sub->add_option("--grid", o.grid, "override the sampling grid size")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "override the RNG seed");
    sub->add_flag("--no-timestamp", o.no_timestamp,
                  "omit timestamps and timings so reports are byte reproducible");
}

double resolve_tol(const CommonOpts& o, const liouville::FamilyConfig& cfg, double dflt) {
    if (o.tol) return *o.tol;
    if (cfg.tol) return *cfg.tol;
    return dflt;
}

int resolve_grid(const CommonOpts& o, const liouville::FamilyConfig& cfg, int dflt) {
    if (o.grid) return *o.grid;
    if (cfg.grid) return *cfg.grid;
    return dflt;
}

std::uint64_t resolve_seed(const CommonOpts& o, const liouville::FamilyConfig& cfg,
                           std::uint64_t dflt) {
    if (o.seed) return *o.seed;
    if (cfg.seed) return *cfg.seed;
    return dflt;
}

// Echo of the raw config file, reparsed so the report stays valid JSON.
json config_echo(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return json::parse(in);
}

json base_report(const std::string& command, const CommonOpts& o,
                 const liouville::FamilyConfig& cfg) {
    json rep;
    rep["command"] = command;
    rep["family"] = cfg.family;
    rep["config"] = config_echo(o.config_path);
    if (!o.no_timestamp) rep["timestamp"] = liouville::utc_timestamp();
    return rep;
}

fs::path report_path(const CommonOpts& o, const std::string& name) {
    fs::create_directories(o.out_dir);
    return fs::path(o.out_dir) / name;
}

void emit(const CommonOpts& o, const std::string& name, const json& rep) {
    const fs::path p = report_path(o, name);
    liouville::write_report(p.string(), rep);
    std::printf("wrote %s\n", p.string().c_str());
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

// Construction failures and certificate failures describe the same defects,
// so a throwing constructor is folded into the certificate list under the
// name the check would have carried.
liouville::Certificate synthesized_failure(const std::exception& e, const std::string& name) {
    return liouville::cert(name, false, 0.0, 0.0, e.what());
}

int cmd_build(const CommonOpts& o) {
    using namespace liouville;
    const FamilyConfig cfg = load_config(o.config_path);
    json rep = base_report("build", o, cfg);

    std::vector<Certificate> certs;
    bool constructed = false;
    try {
        const TorusSystem S = cfg.build();
        constructed = true;
        certs = S.certificates;
        rep["integral_count"] = S.integrals.size() + cfg.extra_integrals.size();
        rep["has_killing_field"] = S.killing.has_value();
        rep["has_lattice"] = S.lattice.has_value();
        rep["domain"] = json::array({S.domain.x0, S.domain.x1, S.domain.y0, S.domain.y1});
    } catch (const collision_error& e) {
        certs.push_back(synthesized_failure(e, "separation_a"));
    } catch (const periodicity_error& e) {
        certs.push_back(synthesized_failure(e, "periodicity_b"));
    } catch (const symmetry_error& e) {
        certs.push_back(synthesized_failure(e, "gluing_invariance"));
    } catch (const zero_crossing_error& e) {
        certs.push_back(synthesized_failure(e, "nonvanishing_factor"));
    } catch (const cr_violation_error& e) {
        certs.push_back(synthesized_failure(e, "cr_residual"));
    } catch (const degenerate_metric_error& e) {
        certs.push_back(synthesized_failure(e, "signature"));
    }

    bool passed = constructed;
    for (const auto& c : certs)
        if (!c.passed && !c.advisory) passed = false;

    rep["certificates"] = certificates_to_json(certs);
    rep["all_passed"] = passed;
    emit(o, "build_report.json", rep);
    std::printf("%s\n", passed ? "PASS" : "FAIL");
    return passed ? 0 : 2;
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

int cmd_classify(const CommonOpts& o) {
    using namespace liouville;
    const FamilyConfig cfg = load_config(o.config_path);
    const TorusSystem S = cfg.build();
    if (!S.all_passed()) {
        std::fprintf(stderr, "classify: construction certificates failed\n");
        return 2;
    }

    const int n = resolve_grid(o, cfg, 128);
    const double rel = resolve_tol(o, cfg, 1e-7);
    const ClassificationReport cr = classify_grid(S.integral(), S.metric, S.domain, n, n, rel);

    json rep = base_report("classify", o, cfg);
    rep["grid"] = json::array({cr.nx, cr.ny});
    rep["zero_tol"] = cr.zero_tol;
    rep["boundary_cells"] = cr.boundary_cells;
    json counts, fractions;
    for (int t = 0; t < 5; ++t) {
        const auto label = static_cast<TypeLabel>(t);
        counts[to_string(label)] = cr.counts[t];
        fractions[to_string(label)] = cr.fraction(label);
    }
    rep["counts"] = counts;
    rep["fractions"] = fractions;
    rep["jordan_fraction"] = cr.jordan_fraction();
    emit(o, "classification.json", rep);

    const fs::path csv = report_path(o, "classification.csv");
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw config_error("classify: cannot write " + csv.string());
    out << "x,y,label\n";
    const Rect& r = S.domain;
    for (int j = 0; j < cr.ny; ++j) {
        const double y = r.y0 + (j + 0.5) * (r.y1 - r.y0) / cr.ny;
        for (int i = 0; i < cr.nx; ++i) {
            const double x = r.x0 + (i + 0.5) * (r.x1 - r.x0) / cr.nx;
            out << csv_number(x) << ',' << csv_number(y) << ','
                << to_string(cr.labels[static_cast<std::size_t>(j) * cr.nx + i]) << '\n';
        }
    }
    std::printf("wrote %s\n", csv.string().c_str());
    return 0;
}

// ---------------------------------------------------------------------------
// flow
// ---------------------------------------------------------------------------

std::vector<liouville::PhaseState> read_initial_conditions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw liouville::config_error("flow: cannot open " + path);
    std::vector<liouville::PhaseState> states;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream row(line);
        liouville::PhaseState s{};
        char c1 = 0, c2 = 0, c3 = 0;
        if (!(row >> s.x >> c1 >> s.y >> c2 >> s.px >> c3 >> s.py) || c1 != ',' ||
            c2 != ',' || c3 != ',')
            throw liouville::config_error("flow: bad initial condition at " + path + ":" +
                                          std::to_string(line_no));
        states.push_back(s);
    }
    if (states.empty()) throw liouville::config_error("flow: no initial conditions in " + path);
    return states;
}

void write_trajectory_csv(const CommonOpts& o, const liouville::TorusSystem& S, int index,
                          const liouville::Trajectory& traj) {
    using namespace liouville;
    char name[32];
    std::snprintf(name, sizeof name, "trajectory_%02d.csv", index);
    const fs::path p = report_path(o, name);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw config_error("flow: cannot write " + p.string());

    out << "t,x,y,px,py,H";
    for (std::size_t k = 0; k < S.integrals.size(); ++k) out << ",F_" << k;
    out << '\n';
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const PhaseState& s = traj.states[i];
        const PhaseState shown = S.lattice ? reduce_position(s, *S.lattice) : s;
        out << csv_number(traj.times[i]) << ',' << csv_number(shown.x) << ','
            << csv_number(shown.y) << ',' << csv_number(shown.px) << ','
            << csv_number(shown.py) << ',' << csv_number(hamiltonian_at(S.metric, s));
        for (const auto& F : S.integrals)
            out << ',' << csv_number(F.value(s.x, s.y, s.mom()));
        out << '\n';
    }
    std::printf("wrote %s\n", p.string().c_str());
}

int cmd_flow(const CommonOpts& o, double T, double t0, double h, const std::string& ic_path,
             int n_random) {
    using namespace liouville;
    const FamilyConfig cfg = load_config(o.config_path);
    const TorusSystem S = cfg.build();
    if (!S.all_passed()) {
        std::fprintf(stderr, "flow: construction certificates failed\n");
        return 2;
    }

    const std::uint64_t seed = resolve_seed(o, cfg, 1234);
    StepControl ctrl;
    ctrl.h = h;
    ctrl.tol = resolve_tol(o, cfg, 1e-8);

    std::vector<PhaseState> starts;
    if (!ic_path.empty()) {
        starts = read_initial_conditions(ic_path);
    } else {
        std::mt19937_64 rng(seed);
        for (int k = 0; k < n_random; ++k)
            starts.push_back(random_unit_energy_state(S.metric, S.domain, rng));
    }

    json rep = base_report("flow", o, cfg);
    rep["T"] = T;
    rep["t0"] = t0;
    rep["h"] = ctrl.h;
    rep["tol"] = ctrl.tol;
    rep["seed"] = seed;
    rep["trajectories"] = json::array();

    double max_h_drift = 0.0, max_f_drift = 0.0;
    int underflows = 0;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        const PhaseState& s0 = starts[k];
        json tj;
        tj["index"] = k;
        tj["initial"] = json::array({s0.x, s0.y, s0.px, s0.py});
        try {
            Trajectory traj = integrate(S.metric, s0, T, ctrl, t0);
            traj.integral_drifts.clear();
            for (std::size_t i = 0; i < S.integrals.size(); ++i)
                traj.integral_drifts.emplace_back("F_" + std::to_string(i),
                                                  conservation_report(traj, S.integrals[i]));
            if (S.killing)
                traj.integral_drifts.emplace_back("killing",
                                                  conservation_report(traj, *S.killing));

            tj["status"] = "ok";
            tj["h_used"] = traj.h_used;
            tj["h_drift"] = traj.h_drift;
            tj["end_error_estimate"] = traj.end_error_estimate;
            const PhaseState fin =
                S.lattice ? reduce_position(traj.end(), *S.lattice) : traj.end();
            tj["final"] = json::array({fin.x, fin.y, fin.px, fin.py});
            json drifts;
            for (const auto& [name, d] : traj.integral_drifts) {
                drifts[name] = d;
                if (name != "killing") max_f_drift = std::max(max_f_drift, d);
            }
            tj["drifts"] = drifts;
            max_h_drift = std::max(max_h_drift, traj.h_drift);
            write_trajectory_csv(o, S, static_cast<int>(k), traj);
        } catch (const step_underflow_error& e) {
            tj["status"] = "step_underflow";
            tj["detail"] = e.what();
            ++underflows;
        } catch (const degenerate_metric_error& e) {
            tj["status"] = "degenerate_metric";
            tj["detail"] = e.what();
            ++underflows;
        }
        rep["trajectories"].push_back(tj);
    }

    rep["max_h_drift"] = max_h_drift;
    rep["max_integral_drift"] = max_f_drift;
    rep["underflow_count"] = underflows;
    emit(o, "flow_report.json", rep);
    return 0;
}

// ---------------------------------------------------------------------------
// equivalent
// ---------------------------------------------------------------------------

int cmd_equivalent(const CommonOpts& o, int n_geodesics, double T) {
    using namespace liouville;
    const FamilyConfig cfg = load_config(o.config_path);
    const TorusSystem S = cfg.build();
    if (!S.all_passed()) {
        std::fprintf(stderr, "equivalent: construction certificates failed\n");
        return 2;
    }

    json rep = base_report("equivalent", o, cfg);
    const double bound = resolve_tol(o, cfg, 1e-4);
    const std::uint64_t seed = resolve_seed(o, cfg, 1234);

    MetricPair pair;
    try {
        pair = riemannianize(S, resolve_grid(o, cfg, 64));
    } catch (const ordering_error& e) {
        rep["certificates"] =
            certificates_to_json({synthesized_failure(e, "profile_ordering")});
        rep["all_passed"] = false;
        emit(o, "equivalence_report.json", rep);
        std::printf("FAIL\n");
        return 2;
    }

    const double residual = geodesic_equivalence_check(pair, n_geodesics, T, seed);

    bool certs_ok = true;
    for (const auto& c : pair.certificates)
        if (!c.passed && !c.advisory) certs_ok = false;
    const bool passed = certs_ok && residual <= bound;

    rep["x_min"] = pair.x_min;
    rep["y_max"] = pair.y_max;
    rep["geodesics"] = n_geodesics;
    rep["T"] = T;
    rep["seed"] = seed;
    rep["equivalence_residual"] = residual;
    rep["residual_bound"] = bound;
    rep["certificates"] = certificates_to_json(pair.certificates);
    rep["all_passed"] = passed;
    emit(o, "equivalence_report.json", rep);
    std::printf("%s\n", passed ? "PASS" : "FAIL");
    return passed ? 0 : 2;
}

// ---------------------------------------------------------------------------
// super
// ---------------------------------------------------------------------------

int cmd_super(const CommonOpts& o) {
    using namespace liouville;
    const FamilyConfig cfg = load_config(o.config_path);
    const TorusSystem S = cfg.build();
    if (!S.all_passed()) {
        std::fprintf(stderr, "super: construction certificates failed\n");
        return 2;
    }

    std::vector<std::pair<std::string, QuadraticIntegral>> named;
    named.emplace_back("hamiltonian", hamiltonian_coefficients(S.metric));
    for (std::size_t i = 0; i < S.integrals.size(); ++i)
        named.emplace_back("integral_" + std::to_string(i), S.integrals[i]);
    for (const auto& extra : cfg.extra_integrals) named.emplace_back(extra.name, extra.build());

    const int n = resolve_grid(o, cfg, 16);
    const double tol = resolve_tol(o, cfg, 1e-8);
    const RankReport rr = superintegrability_report(S.metric, named, S.domain, n, tol);

    // A rank-3 span forces constant curvature; report the sweep either way.
    double k_max = 0.0, k_sum = 0.0;
    std::vector<double> ks;
    const int cn = 64;
    ks.reserve(static_cast<std::size_t>(cn) * cn);
    for (int j = 0; j < cn; ++j)
        for (int i = 0; i < cn; ++i) {
            const double x = S.domain.x0 + (i + 0.5) * (S.domain.x1 - S.domain.x0) / cn;
            const double y = S.domain.y0 + (j + 0.5) * (S.domain.y1 - S.domain.y0) / cn;
            const double k = gauss_curvature_at(S.metric, x, y);
            ks.push_back(k);
            k_max = std::max(k_max, std::abs(k));
            k_sum += k;
        }
    const double k_mean = k_sum / static_cast<double>(ks.size());
    double k_dev = 0.0;
    for (double k : ks) k_dev = std::max(k_dev, std::abs(k - k_mean));

    json rep = base_report("super", o, cfg);
    json names = json::array();
    for (const auto& [name, F] : named) names.push_back(name);
    rep["candidates"] = names;
    rep["rank"] = rr.rank;
    rep["rejected"] = rr.rejected;
    rep["singular_values"] = rr.singular_values;
    rep["bracket_worst"] = rr.bracket_worst;
    rep["bracket_tol"] = tol;
    rep["grid"] = n;
    rep["curvature"] = {{"max_abs", k_max}, {"mean", k_mean}, {"max_deviation", k_dev}};
    emit(o, "super_report.json", rep);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"integrable metric families on the torus: build, verify, explore"};
    app.require_subcommand(1);

    CommonOpts ob, oc, of, oe, os;
    double flow_T = 10.0, flow_t0 = 0.0, flow_h = 1e-3;
    std::string flow_ic;
    int flow_random = 10;
    int eq_geodesics = 10;
    double eq_T = 5.0;

    CLI::App* build = app.add_subcommand("build", "construct a family and run its certificates");
    add_common(build, ob);

    CLI::App* classify =
        app.add_subcommand("classify", "label the integral type on a grid");
    add_common(classify, oc);

    CLI::App* flow = app.add_subcommand("flow", "integrate geodesics and track drifts");
    add_common(flow, of);
    flow->add_option("--T", flow_T, "integration horizon")->capture_default_str();
    flow->add_option("--t0", flow_t0, "initial time")->capture_default_str();
    flow->add_option("--step", flow_h, "initial step size")->capture_default_str();
    CLI::Option* ic_opt =
        flow->add_option("--ic", flow_ic, "CSV file of initial conditions x,y,px,py");
    flow->add_option("--random", flow_random, "number of random unit-energy starts")
        ->capture_default_str()
        ->excludes(ic_opt);

    CLI::App* equivalent = app.add_subcommand(
        "equivalent", "build the positive-definite partner and test shared geodesics");
    add_common(equivalent, oe);
    equivalent->add_option("--geodesics", eq_geodesics, "geodesics to sample")
        ->capture_default_str();
    equivalent->add_option("--T", eq_T, "horizon per geodesic")->capture_default_str();

    CLI::App* super =
        app.add_subcommand("super", "bracket-test candidates and measure the span rank");
    add_common(super, os);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (build->parsed()) return cmd_build(ob);
        if (classify->parsed()) return cmd_classify(oc);
        if (flow->parsed()) return cmd_flow(of, flow_T, flow_t0, flow_h, flow_ic, flow_random);
        if (equivalent->parsed()) return cmd_equivalent(oe, eq_geodesics, eq_T);
        if (super->parsed()) return cmd_super(os);
    } catch (const liouville::config_error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 1;
    } catch (const liouville::lab_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
