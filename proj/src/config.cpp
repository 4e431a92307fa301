#include "cmr/config.hpp"

#include <algorithm>
#include <iomanip>
#include <set>

namespace cmr {

using nlohmann::json;

namespace {

const std::set<std::string> known_kinds = {
    "quantize", "spectrum", "zz-map", "chevron", "gate",
    "tuneup", "zz-free", "coherence", "four-qubit-suite"};

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

double get_num(const json& j, const std::string& key, bool positive = false) {
    if (!j.contains(key)) fail("missing field '" + key + "'");
    if (!j.at(key).is_number()) fail("field '" + key + "' must be a number");
    const double v = j.at(key).get<double>();
    if (positive && v <= 0.0) fail("field '" + key + "' must be positive");
    return v;
}

// scalar broadcast or per-unit array
std::vector<double> get_vec(const json& j, const std::string& key, int n) {
    if (!j.contains(key)) fail("missing field '" + key + "'");
    const json& v = j.at(key);
    if (v.is_number()) return std::vector<double>(n, v.get<double>());
    if (!v.is_array() || static_cast<int>(v.size()) != n)
        fail("field '" + key + "' must be a number or an array of length " +
             std::to_string(n));
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) fail("field '" + key + "' has a non-numeric entry");
        out.push_back(x.get<double>());
    }
    return out;
}

} // namespace

json preset_device(const std::string& name) {
    json d;
    d["qubit_alpha"] = -0.220;
    d["coupler_alpha"] = -0.268;
    d["c_qc"] = 3.7;
    d["c_qr"] = 1.0;
    d["c_cr"] = 37.4;
    d["a"] = 1.0;
    d["resonator_f"] = 3.85;
    d["resonator_z0"] = 50.0;
    if (name == "paper-2q") {
        d["qubit_f"] = {4.0, 4.0};
        d["coupler_f"] = {5.85, 5.85};
    } else if (name == "paper-4q") {
        d["qubit_f"] = {4.0, 4.34, 4.63, 4.97};
        d["coupler_f"] = {6.1, 6.4, 6.7, 7.0};
    } else {
        fail("unknown preset '" + name + "'");
    }
    return d;
}

CoupledModeModel DeviceConfig::model() const {
    return build_model(chain, freqs, alpha_q, alpha_c);
}

namespace {

DeviceConfig parse_device(json dev) {
    if (dev.contains("preset")) {
        json base = preset_device(dev.at("preset").get<std::string>());
        dev.erase("preset");
        base.update(dev);  // explicit fields win
        dev = std::move(base);
    }

    if (!dev.contains("qubit_f") || !dev.at("qubit_f").is_array())
        fail("device needs a 'qubit_f' array");
    const int n = static_cast<int>(dev.at("qubit_f").size());
    if (n < 1) fail("device needs at least one unit");

    DeviceConfig d;
    d.freqs.qubit = get_vec(dev, "qubit_f", n);
    d.freqs.coupler = get_vec(dev, "coupler_f", n);
    d.alpha_q = get_vec(dev, "qubit_alpha", n);
    d.alpha_c = get_vec(dev, "coupler_alpha", n);
    const auto c_qc = get_vec(dev, "c_qc", n);
    const auto c_qr = get_vec(dev, "c_qr", n);
    const auto c_cr = get_vec(dev, "c_cr", n);
    const auto a = get_vec(dev, "a", n);

    if (dev.contains("resonator_c")) {
        d.freqs.resonator = get_num(dev, "resonator_f", true);
        d.chain.c_r = get_num(dev, "resonator_c", true);
    } else {
        d.freqs.resonator = get_num(dev, "resonator_f", true);
        d.chain.c_r = resonator_capacitance(d.freqs.resonator,
                                            get_num(dev, "resonator_z0", true));
    }

    for (int i = 0; i < n; ++i) {
        if (d.freqs.qubit[i] <= 0.0 || d.freqs.coupler[i] <= 0.0)
            fail("frequencies must be positive");
        if (d.alpha_q[i] >= 0.0 || d.alpha_c[i] >= 0.0)
            fail("anharmonicities must be negative");
        if (c_qc[i] <= 0.0 || c_qr[i] < 0.0 || c_cr[i] <= 0.0)
            fail("coupling capacitances must be positive");
        UnitSpec u;
        u.c_q = transmon_from_target(d.freqs.qubit[i], d.alpha_q[i]).cap_fF();
        u.c_c = transmon_from_target(d.freqs.coupler[i], d.alpha_c[i]).cap_fF();
        u.c_qc = c_qc[i];
        u.c_qr = c_qr[i];
        u.c_cr = c_cr[i];
        u.a = a[i];
        d.chain.units.push_back(u);
    }
    return d;
}

PropagateOptions parse_prop(const json& j) {
    PropagateOptions p;
    if (!j.contains("propagation")) return p;
    const json& pr = j.at("propagation");
    if (pr.contains("dt")) p.dt = get_num(pr, "dt", true);
    if (pr.contains("rwa")) p.rwa = pr.at("rwa").get<bool>();
    if (pr.contains("check_convergence"))
        p.check_convergence = pr.at("check_convergence").get<bool>();
    if (pr.contains("tol")) p.tol = get_num(pr, "tol", true);
    if (pr.contains("max_halvings")) {
        p.max_halvings = pr.at("max_halvings").get<int>();
        if (p.max_halvings < 1 || p.max_halvings > 12)
            fail("max_halvings must be in 1..12");
    }
    return p;
}

} // namespace

RunConfig parse_config(const json& j) {
    RunConfig cfg;
    cfg.raw = j;
    if (!j.contains("device")) fail("missing 'device' section");
    cfg.device = parse_device(j.at("device"));
    cfg.prop = parse_prop(j);

    if (!j.contains("experiment")) fail("missing 'experiment' section");
    cfg.experiment = j.at("experiment");
    if (!cfg.experiment.contains("kind")) fail("experiment needs a 'kind'");
    cfg.kind = cfg.experiment.at("kind").get<std::string>();
    if (!known_kinds.count(cfg.kind)) fail("unknown experiment kind '" + cfg.kind + "'");

    if (j.contains("threads")) {
        cfg.threads = j.at("threads").get<int>();
        if (cfg.threads < 1) fail("threads must be at least 1");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        fail(std::string("parse error: ") + e.what());
    }
    return parse_config(j);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : out_(path), n_cols_(columns.size()) {
    if (!out_) throw ConfigError("cannot write '" + path + "'");
    out_ << std::setprecision(12);
    for (size_t i = 0; i < columns.size(); ++i)
        out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != n_cols_)
        throw ConfigError("csv row width does not match the header");
    for (size_t i = 0; i < values.size(); ++i)
        out_ << (i ? "," : "") << values[i];
    out_ << "\n";
    ++rows_;
}

void write_manifest(const std::string& path, const RunConfig& cfg,
                    const std::vector<std::string>& outputs, int rows) {
    json m;
    m["tool"] = "sim";
    m["version"] = "1.0.0";
    m["kind"] = cfg.kind;
    m["outputs"] = outputs;
    m["rows"] = rows;
    m["config"] = cfg.raw;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << m.dump(2) << "\n";
}

} // namespace cmr
