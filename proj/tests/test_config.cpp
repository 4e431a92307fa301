#include <doctest.h>

#include "cmr/config.hpp"
#include "cmr/constants.hpp"

#include <cstdio>
#include <fstream>

using namespace cmr;
using nlohmann::json;

namespace {

json explicit_device() {
    return {{"qubit_f", {4.0, 4.3}},   {"coupler_f", 5.85},
            {"qubit_alpha", -0.22},    {"coupler_alpha", -0.268},
            {"c_qc", 3.7},             {"c_qr", 1.0},
            {"c_cr", 37.4},            {"a", 1.0},
            {"resonator_f", 3.85},     {"resonator_z0", 50.0}};
}

json base_config() {
    return {{"device", {{"preset", "paper-2q"}}},
            {"experiment", {{"kind", "spectrum"}}}};
}

} // namespace

TEST_CASE("preset device tables") {
    const json d2 = preset_device("paper-2q");
    CHECK(d2.at("qubit_f") == json({4.0, 4.0}));
    CHECK(d2.at("coupler_f") == json({5.85, 5.85}));
    CHECK(d2.at("qubit_alpha").get<double>() == doctest::Approx(-0.220));
    CHECK(d2.at("c_qc").get<double>() == doctest::Approx(3.7));

    const json d4 = preset_device("paper-4q");
    CHECK(d4.at("qubit_f").size() == 4);
    CHECK(d4.at("coupler_f") == json({6.1, 6.4, 6.7, 7.0}));

    CHECK_THROWS_WITH_AS(preset_device("paper-8q"),
                         "config: unknown preset 'paper-8q'", ConfigError);
}

TEST_CASE("scalar fields broadcast across units") {
    json j = base_config();
    j["device"] = explicit_device();
    const RunConfig cfg = parse_config(j);

    CHECK(cfg.device.n_units() == 2);
    REQUIRE(cfg.device.freqs.qubit.size() == 2);
    CHECK(cfg.device.freqs.qubit[1] == doctest::Approx(4.3));
    CHECK(cfg.device.freqs.coupler[0] == doctest::Approx(5.85));
    CHECK(cfg.device.freqs.coupler[1] == doctest::Approx(5.85));
    CHECK(cfg.device.alpha_c[1] == doctest::Approx(-0.268));
    CHECK(cfg.device.chain.units[0].c_qc == doctest::Approx(3.7));

    // qubit capacitance is derived from the frequency target, and the
    // resonator from its impedance
    CHECK(cfg.device.chain.units[0].c_q == doctest::Approx(88.046).epsilon(1e-3));
    CHECK(cfg.device.chain.c_r == doctest::Approx(1298.70).epsilon(1e-3));

    const CoupledModeModel m = cfg.device.model();
    REQUIRE(m.modes.size() == 5);
    CHECK(m.modes[0].kind == ModeKind::qubit);
    CHECK(m.modes[2].kind == ModeKind::resonator);
    CHECK(m.modes[4].omega == doctest::Approx(two_pi * 4.3));
}

TEST_CASE("explicit device fields override the preset") {
    json j = base_config();
    j["device"]["qubit_f"] = {4.1, 4.2};
    const RunConfig cfg = parse_config(j);
    CHECK(cfg.device.freqs.qubit[0] == doctest::Approx(4.1));
    CHECK(cfg.device.freqs.qubit[1] == doctest::Approx(4.2));
    CHECK(cfg.device.freqs.coupler[0] == doctest::Approx(5.85));
}

TEST_CASE("explicit resonator capacitance bypasses the impedance rule") {
    json j = base_config();
    j["device"] = explicit_device();
    j["device"]["resonator_c"] = 1500.0;
    const RunConfig cfg = parse_config(j);
    CHECK(cfg.device.chain.c_r == doctest::Approx(1500.0));
}

TEST_CASE("config validation names the offending field") {
    CHECK_THROWS_WITH_AS(parse_config(json::object()),
                         "config: missing 'device' section", ConfigError);

    json j = {{"device", {{"preset", "paper-2q"}}}};
    CHECK_THROWS_WITH_AS(parse_config(j),
                         "config: missing 'experiment' section", ConfigError);

    j["experiment"] = json::object();
    CHECK_THROWS_WITH_AS(parse_config(j),
                         "config: experiment needs a 'kind'", ConfigError);

    j["experiment"]["kind"] = "teleport";
    CHECK_THROWS_WITH_AS(parse_config(j),
                         "config: unknown experiment kind 'teleport'", ConfigError);

    j = base_config();
    j["device"] = explicit_device();
    j["device"].erase("qubit_f");
    CHECK_THROWS_WITH_AS(parse_config(j),
                         "config: device needs a 'qubit_f' array", ConfigError);

    j = base_config();
    j["device"] = explicit_device();
    j["device"]["coupler_f"] = {5.85, 5.85, 5.85};
    CHECK_THROWS_WITH_AS(
        parse_config(j),
        "config: field 'coupler_f' must be a number or an array of length 2",
        ConfigError);

    j = base_config();
    j["device"] = explicit_device();
    j["device"]["qubit_alpha"] = 0.22;
    CHECK_THROWS_WITH_AS(parse_config(j),
                         "config: anharmonicities must be negative", ConfigError);

    j = base_config();
    j["device"] = explicit_device();
    j["device"]["qubit_f"] = {4.0, -4.3};
    CHECK_THROWS_WITH_AS(parse_config(j),
                         "config: frequencies must be positive", ConfigError);

    j = base_config();
    j["device"] = explicit_device();
    j["device"]["resonator_f"] = 0.0;
    CHECK_THROWS_WITH_AS(parse_config(j),
                         "config: field 'resonator_f' must be positive", ConfigError);

    j = base_config();
    j["threads"] = 0;
    CHECK_THROWS_WITH_AS(parse_config(j),
                         "config: threads must be at least 1", ConfigError);
}

TEST_CASE("propagation overrides") {
    json j = base_config();
    RunConfig cfg = parse_config(j);
    CHECK(cfg.prop.dt == doctest::Approx(0.01));
    CHECK(cfg.prop.rwa);
    CHECK(cfg.prop.check_convergence);
    CHECK(cfg.threads == 1);

    j["propagation"] = {{"dt", 0.005},
                        {"rwa", false},
                        {"check_convergence", false},
                        {"tol", 1e-6},
                        {"max_halvings", 3}};
    j["threads"] = 4;
    cfg = parse_config(j);
    CHECK(cfg.prop.dt == doctest::Approx(0.005));
    CHECK(!cfg.prop.rwa);
    CHECK(!cfg.prop.check_convergence);
    CHECK(cfg.prop.tol == doctest::Approx(1e-6));
    CHECK(cfg.prop.max_halvings == 3);
    CHECK(cfg.threads == 4);

    j["propagation"]["max_halvings"] = 0;
    CHECK_THROWS_WITH_AS(parse_config(j),
                         "config: max_halvings must be in 1..12", ConfigError);
}

TEST_CASE("csv writer") {
    const std::string path = "test_config_tmp.csv";
    {
        CsvWriter w(path, {"x", "y"});
        w.row({1.5, 2.25});
        w.row({-3.0, 4.0});
        CHECK(w.rows_written() == 2);
        CHECK_THROWS_AS(w.row({1.0}), ConfigError);
    }
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,y");
    std::getline(in, line);
    CHECK(line == "1.5,2.25");
    std::getline(in, line);
    CHECK(line == "-3,4");
    std::remove(path.c_str());
}

TEST_CASE("manifest round trip") {
    const std::string path = "test_config_tmp_manifest.json";
    const RunConfig cfg = parse_config(base_config());
    write_manifest(path, cfg, {"spectrum.csv"}, 7);

    std::ifstream in(path);
    json m;
    in >> m;
    CHECK(m.at("tool") == "sim");
    CHECK(m.at("kind") == "spectrum");
    CHECK(m.at("rows") == 7);
    CHECK(m.at("outputs") == json({"spectrum.csv"}));
    CHECK(m.at("config") == cfg.raw);
    std::remove(path.c_str());
}

TEST_CASE("load config from disk") {
    const std::string path = "test_config_tmp_load.json";
    {
        std::ofstream out(path);
        out << base_config().dump();
    }
    const RunConfig cfg = load_config(path);
    CHECK(cfg.kind == "spectrum");
    CHECK(cfg.raw == base_config());
    std::remove(path.c_str());

    CHECK_THROWS_WITH_AS(load_config("no_such_file.json"),
                         "config: cannot open 'no_such_file.json'", ConfigError);

    {
        std::ofstream out(path);
        out << "{not json";
    }
    CHECK_THROWS_AS(load_config(path), ConfigError);
    std::remove(path.c_str());
}
