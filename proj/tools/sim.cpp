#include "cmr/config.hpp"
#include "cmr/constants.hpp"
#include "cmr/tuneup.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <thread>
#include <vector>

// Experiment runner: one experiment kind per invocation, CSV plus a JSON
// manifest into --out. Everything is deterministic for a fixed config.

namespace {

using cmr::ConfigError;
using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

double num_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) fail(std::string("field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

double num_req(const json& j, const char* key) {
    if (!j.contains(key)) fail(std::string("experiment needs '") + key + "'");
    return num_or(j, key, 0.0);
}

int int_or(const json& j, const char* key, int fallback) {
    return static_cast<int>(num_or(j, key, fallback));
}

std::string str_or(const json& j, const char* key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<std::string>();
}

cmr::GateKind gate_kind_of(const std::string& s) {
    if (s == "iswap") return cmr::GateKind::iswap;
    if (s == "cz") return cmr::GateKind::cz;
    fail("unknown gate '" + s + "'");
}

std::vector<int> qubit_modes(const cmr::CoupledModeModel& m) {
    std::vector<int> q;
    for (size_t i = 0; i < m.modes.size(); ++i)
        if (m.modes[i].kind == cmr::ModeKind::qubit) q.push_back(static_cast<int>(i));
    return q;
}

std::vector<int> coupler_modes(const cmr::CoupledModeModel& m) {
    std::vector<int> c;
    for (size_t i = 0; i < m.modes.size(); ++i)
        if (m.modes[i].kind == cmr::ModeKind::coupler) c.push_back(static_cast<int>(i));
    return c;
}

int coupler_of(const cmr::CoupledModeModel& m, int qubit_mode) {
    for (int c : coupler_modes(m))
        if (m.find_coupling(qubit_mode, c) >= 0) return c;
    fail("qubit mode " + std::to_string(qubit_mode) + " has no coupler");
}

// qubit_a / qubit_b in configs index the qubit list, not the mode table
cmr::GateSpec spec_from(const cmr::CoupledModeModel& m, const json& ex) {
    const std::vector<int> qs = qubit_modes(m);
    const int n = static_cast<int>(qs.size());
    const int ia = int_or(ex, "qubit_a", 0);
    const int ib = int_or(ex, "qubit_b", n - 1);
    if (ia < 0 || ia >= n || ib < 0 || ib >= n || ia == ib)
        fail("qubit_a/qubit_b must be distinct qubit indices below " + std::to_string(n));
    cmr::GateSpec s;
    s.kind = gate_kind_of(str_or(ex, "gate", "iswap"));
    s.qubit_a = qs[ia];
    s.qubit_b = qs[ib];
    s.coupler_a = coupler_of(m, s.qubit_a);
    s.coupler_b = coupler_of(m, s.qubit_b);
    s.order = int_or(ex, "order", 2);
    return s;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v;
    if (n == 1) return {lo};
    for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
    return v;
}

cmr::SearchOptions search_from(const json& ex, const cmr::PropagateOptions& prop) {
    cmr::SearchOptions so;
    // the config's propagation block is for verification runs; the search
    // keeps its own coarser step unless asked otherwise
    so.prop.rwa = prop.rwa;
    so.prop.dt = num_or(ex, "search_dt", so.prop.dt);
    so.f_c_lo = num_or(ex, "f_c_lo", so.f_c_lo);
    so.f_c_hi = num_or(ex, "f_c_hi", so.f_c_hi);
    so.coarse = int_or(ex, "coarse", so.coarse);
    so.df_q_span = num_or(ex, "df_q_span", so.df_q_span);
    so.df_q_coarse = int_or(ex, "df_q_coarse", so.df_q_coarse);
    return so;
}

struct RunResult {
    std::vector<std::string> outputs;
    int rows = 0;
};

void write_report(const std::string& path, const json& body) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << body.dump(2) << "\n";
}

json outcome_json(const cmr::GateOutcome& o) {
    return {{"tg", o.point.tg},
            {"f_c", o.point.f_c},
            {"df_q", o.point.df_q},
            {"f_avg", o.budget.f_avg},
            {"f_zz", o.budget.f_zz},
            {"f_pop", o.budget.f_pop},
            {"f_leak", o.budget.f_leak},
            {"eps_zz", o.budget.eps_zz},
            {"eps_pt", o.budget.eps_pt},
            {"eps_leak", o.budget.eps_leak},
            {"leak_max", o.leak_max},
            {"phi", o.phi},
            {"sin_zz", o.sin_zz},
            {"delta_cz", o.delta_cz}};
}

void outcome_row(cmr::CsvWriter& w, const cmr::GateOutcome& o) {
    w.row({o.point.tg, o.point.f_c, o.point.df_q, o.budget.f_avg, o.budget.f_zz,
           o.budget.f_pop, o.budget.f_leak, o.leak_max, o.sin_zz, o.delta_cz});
}

const std::vector<std::string> outcome_cols = {
    "tg", "f_c", "df_q", "f_avg", "f_zz", "f_pop", "f_leak",
    "leak_max", "sin_zz", "delta_cz"};

RunResult run_quantize(const cmr::RunConfig& cfg, const std::string& out) {
    const cmr::CoupledModeModel m = cfg.device.model();
    RunResult r;

    cmr::CsvWriter modes(out + "/quantize_modes.csv",
                         {"mode", "kind", "f_ghz", "alpha_ghz", "cap_ff"});
    for (size_t i = 0; i < m.modes.size(); ++i) {
        const cmr::UnitSpec* u = nullptr;
        double cap = cfg.device.chain.c_r;
        if (m.modes[i].kind != cmr::ModeKind::resonator) {
            // mode order is Q1 C1 R C2 Q2 C3 Q3 ...: unit 0 owns modes 0, 1
            const int unit = i < 2 ? 0 : (static_cast<int>(i) - 1) / 2;
            u = &cfg.device.chain.units[unit];
            cap = m.modes[i].kind == cmr::ModeKind::qubit ? u->c_q : u->c_c;
        }
        modes.row({double(i), double(static_cast<int>(m.modes[i].kind)),
                   m.modes[i].omega / cmr::two_pi, m.modes[i].alpha / cmr::two_pi, cap});
    }
    r.rows += modes.rows_written();

    cmr::CsvWriter gs(out + "/quantize_couplings.csv", {"mode_a", "mode_b", "g_ghz"});
    for (const cmr::Coupling& c : m.couplings)
        gs.row({double(c.a), double(c.b), m.g_of(c) / cmr::two_pi});
    r.rows += gs.rows_written();

    r.outputs = {"quantize_modes.csv", "quantize_couplings.csv"};
    return r;
}

RunResult run_spectrum(const cmr::RunConfig& cfg, const std::string& out) {
    const cmr::CoupledModeModel m = cfg.device.model();
    const json& ex = cfg.experiment;
    const std::vector<int> qs = qubit_modes(m);
    const int ia = int_or(ex, "qubit_a", 0);
    const int ib = int_or(ex, "qubit_b", static_cast<int>(qs.size()) - 1);

    std::vector<int> movers = coupler_modes(m);
    if (ex.contains("couplers")) {
        movers.clear();
        const std::vector<int> cs = coupler_modes(m);
        for (int i : ex.at("couplers").get<std::vector<int>>()) {
            if (i < 0 || i >= static_cast<int>(cs.size()))
                fail("coupler index out of range");
            movers.push_back(cs[i]);
        }
    }

    RunResult r;
    cmr::CsvWriter w(out + "/spectrum.csv", {"f_c", "two_g_mhz", "zeta_khz"});
    for (double f : linspace(num_or(ex, "f_lo", 4.2), num_or(ex, "f_hi", 5.8),
                             int_or(ex, "n", 57))) {
        cmr::CoupledModeModel mc = m;
        for (int c : movers) mc = mc.with_mode_frequency(c, cmr::two_pi * f);
        const double two_g = cmr::exchange_splitting(mc, qs.at(ia), qs.at(ib));
        const double zeta = cmr::zz_coefficient(mc, qs.at(ia), qs.at(ib));
        w.row({f, 1e3 * two_g / cmr::two_pi, 1e6 * zeta / cmr::two_pi});
    }
    r.rows = w.rows_written();
    r.outputs = {"spectrum.csv"};
    return r;
}

RunResult run_zz_map(const cmr::RunConfig& cfg, const std::string& out) {
    const cmr::CoupledModeModel m = cfg.device.model();
    const Eigen::MatrixXd zz = cmr::four_qubit_selectivity(m);

    RunResult r;
    cmr::CsvWriter w(out + "/zz_map.csv", {"qubit_i", "qubit_j", "zeta_khz"});
    for (int i = 0; i < zz.rows(); ++i)
        for (int j = i + 1; j < zz.cols(); ++j)
            w.row({double(i), double(j), 1e6 * zz(i, j) / cmr::two_pi});
    r.rows = w.rows_written();
    r.outputs = {"zz_map.csv"};
    return r;
}

RunResult run_chevron(const cmr::RunConfig& cfg, const std::string& out) {
    const cmr::CoupledModeModel m = cfg.device.model();
    const json& ex = cfg.experiment;
    const cmr::GateSpec spec = spec_from(m, ex);

    cmr::PropagateOptions prop = cfg.prop;
    prop.check_convergence = false;  // a scan is diagnostic, not a verdict
    const auto pts = cmr::chevron(
        m, spec,
        linspace(num_or(ex, "tg_lo", 20.0), num_or(ex, "tg_hi", 80.0),
                 int_or(ex, "n_tg", 13)),
        linspace(num_or(ex, "fc_lo", 4.2), num_or(ex, "fc_hi", 4.6),
                 int_or(ex, "n_fc", 21)),
        prop);

    RunResult r;
    cmr::CsvWriter w(out + "/chevron.csv", {"tg", "f_c", "transfer", "leak"});
    for (const cmr::ChevronPoint& p : pts) w.row({p.tg, p.f_c, p.transfer, p.leak});
    r.rows = w.rows_written();
    r.outputs = {"chevron.csv"};
    return r;
}

RunResult run_gate(const cmr::RunConfig& cfg, const std::string& out) {
    const cmr::CoupledModeModel m = cfg.device.model();
    const json& ex = cfg.experiment;
    const cmr::GateSpec spec = spec_from(m, ex);
    const cmr::GatePoint point{num_req(ex, "tg"), num_req(ex, "f_c"),
                               num_or(ex, "df_q", 0.0)};

    const bool reduced = ex.value("reduced", false);
    const cmr::Basis basis = cmr::gate_basis(m, spec, reduced);
    const cmr::ComputationalFrame frame =
        cmr::computational_frame(m, basis, qubit_modes(m), true, cfg.prop.rwa);
    const cmr::GateOutcome o = cmr::evaluate_gate(m, basis, frame, spec, point, cfg.prop);

    RunResult r;
    cmr::CsvWriter w(out + "/gate.csv", outcome_cols);
    outcome_row(w, o);
    r.rows = w.rows_written();
    json report = outcome_json(o);
    report["reduced_basis"] = reduced;
    write_report(out + "/gate_report.json", report);
    r.outputs = {"gate.csv", "gate_report.json"};
    return r;
}

RunResult run_tuneup(const cmr::RunConfig& cfg, const std::string& out) {
    const cmr::CoupledModeModel m = cfg.device.model();
    const json& ex = cfg.experiment;
    const cmr::GateSpec spec = spec_from(m, ex);
    const double tg = num_req(ex, "tg");
    const cmr::SearchOptions so = search_from(ex, cfg.prop);

    const cmr::GateOutcome o = spec.kind == cmr::GateKind::iswap
                                   ? cmr::calibrate_iswap(m, spec, tg, so)
                                   : cmr::calibrate_cz(m, spec, tg, so);

    RunResult r;
    cmr::CsvWriter w(out + "/tuneup.csv", outcome_cols);
    outcome_row(w, o);
    r.rows = w.rows_written();
    write_report(out + "/tuneup_report.json", outcome_json(o));
    r.outputs = {"tuneup.csv", "tuneup_report.json"};
    return r;
}

RunResult run_zz_free(const cmr::RunConfig& cfg, const std::string& out) {
    const cmr::CoupledModeModel m = cfg.device.model();
    const json& ex = cfg.experiment;
    const cmr::GateSpec spec = spec_from(m, ex);
    const cmr::SearchOptions so = search_from(ex, cfg.prop);

    const cmr::ZzFreeScan scan = cmr::zz_free_scan(
        m, spec, num_or(ex, "tg_lo", 40.0), num_or(ex, "tg_hi", 100.0),
        int_or(ex, "n_tg", 13), so, num_or(ex, "sin_limit", 1e-3),
        num_or(ex, "leak_limit", 1e-4));

    RunResult r;
    cmr::CsvWriter w(out + "/zz_free.csv", {"tg", "f_c", "sin_zz", "leak", "f_avg"});
    for (const cmr::ZzFreePoint& p : scan.points)
        w.row({p.tg, p.f_c, p.sin_zz, p.leak, p.f_avg});
    r.rows = w.rows_written();
    write_report(out + "/zz_free_report.json",
                 {{"compromise_tg", scan.compromise_tg}, {"fallback", scan.fallback}});
    r.outputs = {"zz_free.csv", "zz_free_report.json"};
    return r;
}

RunResult run_coherence(const cmr::RunConfig& cfg, const std::string& out) {
    const cmr::CoupledModeModel m = cfg.device.model();
    const json& ex = cfg.experiment;
    const cmr::GateKind kind = gate_kind_of(str_or(ex, "gate", "iswap"));
    const double tg = num_req(ex, "tg");
    const int n = static_cast<int>(qubit_modes(m).size());
    const int ia = int_or(ex, "qubit_a", 0);
    const int ib = int_or(ex, "qubit_b", 1);

    RunResult r;
    cmr::CsvWriter w(out + "/coherence.csv", {"t_us", "fidelity"});
    for (double t_us : linspace(num_or(ex, "t_lo_us", 10.0),
                                num_or(ex, "t_hi_us", 300.0), int_or(ex, "n", 30))) {
        cmr::CoherenceTimes times;
        times.t1.assign(n, 1e3 * t_us);
        times.tphi.assign(n, 1e3 * t_us);
        w.row({t_us, cmr::coherence_limited_fidelity(kind, tg, times, ia, ib)});
    }
    r.rows = w.rows_written();
    r.outputs = {"coherence.csv"};
    return r;
}

RunResult run_suite(const cmr::RunConfig& cfg, const std::string& out) {
    const cmr::CoupledModeModel m = cfg.device.model();
    const json& ex = cfg.experiment;

    cmr::SuiteOptions opt;
    opt.search = search_from(ex, cfg.prop);
    if (ex.contains("tg_grid")) opt.tg_grid = ex.at("tg_grid").get<std::vector<double>>();
    opt.leak_limit = num_or(ex, "leak_limit", opt.leak_limit);
    opt.sin_limit = num_or(ex, "sin_limit", opt.sin_limit);
    opt.infid_limit = num_or(ex, "infid_limit", opt.infid_limit);
    opt.cz_tg_min = num_or(ex, "cz_tg_min", opt.cz_tg_min);
    opt.verify.dt = num_or(ex, "verify_dt", opt.verify.dt);

    const auto entries = cmr::four_qubit_suite(m, opt);
    const std::vector<int> qs = qubit_modes(m);
    auto list_index = [&](int mode) {
        for (size_t i = 0; i < qs.size(); ++i)
            if (qs[i] == mode) return static_cast<int>(i);
        return -1;
    };

    RunResult r;
    std::vector<std::string> cols = {"gate", "qubit_a", "qubit_b"};
    cols.insert(cols.end(), outcome_cols.begin(), outcome_cols.end());
    cols.push_back("tg_fallback");
    cmr::CsvWriter w(out + "/four_qubit_suite.csv", cols);
    for (const cmr::SuiteEntry& e : entries) {
        std::vector<double> row = {double(static_cast<int>(e.kind)),
                                   double(list_index(e.qubit_a)),
                                   double(list_index(e.qubit_b))};
        const cmr::GateOutcome& o = e.outcome;
        for (double v : {o.point.tg, o.point.f_c, o.point.df_q, o.budget.f_avg,
                         o.budget.f_zz, o.budget.f_pop, o.budget.f_leak, o.leak_max,
                         o.sin_zz, o.delta_cz})
            row.push_back(v);
        row.push_back(e.tg_fallback ? 1.0 : 0.0);
        w.row(row);
    }
    r.rows = w.rows_written();
    r.outputs = {"four_qubit_suite.csv"};
    return r;
}

int run_validate(const cmr::RunConfig& cfg) {
    const cmr::CoupledModeModel m = cfg.device.model();
    const std::vector<int> qs = qubit_modes(m);

    std::vector<std::string> problems;
    // idle hierarchy: every coupler must park above every qubit so that the
    // dips, not the idles, set the interaction strengths
    double worst = std::numeric_limits<double>::infinity();
    for (int c : coupler_modes(m))
        for (int q : qs) worst = std::min(worst, m.modes[c].omega - m.modes[q].omega);
    if (worst <= 0.0)
        problems.push_back("a coupler idles at or below a qubit");

    std::vector<double> f, a;
    for (int q : qs) {
        f.push_back(m.modes[q].omega / cmr::two_pi);
        a.push_back(m.modes[q].alpha / cmr::two_pi);
    }
    const double tau = num_or(cfg.experiment, "collision_tau", 0.03);
    for (const std::string& hit : cmr::check_frequency_collisions(f, a, tau))
        problems.push_back("collision: " + hit);

    if (problems.empty()) {
        std::cout << "valid: " << qs.size() << " qubits, 0 collisions\n";
        return 0;
    }
    for (const std::string& p : problems) std::cout << p << "\n";
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupled-mode gate simulator"};
    std::string experiment, config_path, out_dir = ".";
    int threads = 0;
    app.add_option("experiment", experiment,
                   "experiment kind, or 'validate' for a no-simulation check")
        ->required();
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory (created if missing)");
    app.add_option("--threads", threads, "worker threads (default: SIM_THREADS or all)");
    CLI11_PARSE(app, argc, argv);

    try {
        cmr::RunConfig cfg = cmr::load_config(config_path);

        if (threads <= 0)
            if (const char* env = std::getenv("SIM_THREADS")) threads = std::atoi(env);
        if (threads <= 0 && cfg.raw.contains("threads")) threads = cfg.threads;
        if (threads <= 0)
            threads = static_cast<int>(std::thread::hardware_concurrency());
        cfg.threads = std::max(1, threads);
        Eigen::setNbThreads(cfg.threads);

        if (experiment == "validate") return run_validate(cfg);
        if (experiment != cfg.kind)
            fail("experiment '" + cfg.kind + "' in the config does not match '" +
                 experiment + "'");

        std::filesystem::create_directories(out_dir);
        RunResult r;
        if (cfg.kind == "quantize") r = run_quantize(cfg, out_dir);
        else if (cfg.kind == "spectrum") r = run_spectrum(cfg, out_dir);
        else if (cfg.kind == "zz-map") r = run_zz_map(cfg, out_dir);
        else if (cfg.kind == "chevron") r = run_chevron(cfg, out_dir);
        else if (cfg.kind == "gate") r = run_gate(cfg, out_dir);
        else if (cfg.kind == "tuneup") r = run_tuneup(cfg, out_dir);
        else if (cfg.kind == "zz-free") r = run_zz_free(cfg, out_dir);
        else if (cfg.kind == "coherence") r = run_coherence(cfg, out_dir);
        else if (cfg.kind == "four-qubit-suite") r = run_suite(cfg, out_dir);

        cmr::write_manifest(out_dir + "/" + cfg.kind + ".manifest.json", cfg,
                            r.outputs, r.rows);
        std::cout << cfg.kind << ": " << r.rows << " rows into " << out_dir << "\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << json{{"error", e.what()}, {"exit", 2}}.dump() << "\n";
        return 2;
    } catch (const cmr::ConvergenceError& e) {
        std::cerr << json{{"error", e.what()}, {"exit", 3}}.dump() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}, {"exit", 1}}.dump() << "\n";
        return 1;
    }
}
