#include <doctest.h>

#include "cmr/config.hpp"
#include "cmr/constants.hpp"
#include "cmr/tuneup.hpp"

#include <cmath>
#include <stdexcept>

using namespace cmr;

namespace {

CoupledModeModel model_2q() {
    RunConfig cfg = parse_config({{"experiment", {{"kind", "gate"}}},
                                  {"device", {{"preset", "paper-2q"}}}});
    return cfg.device.model();
}

CoupledModeModel model_4q() {
    RunConfig cfg = parse_config({{"experiment", {{"kind", "gate"}}},
                                  {"device", {{"preset", "paper-4q"}}}});
    return cfg.device.model();
}

const GateSpec iswap_pair{GateKind::iswap, 0, 4, 1, 3, 2};
const GateSpec cz_pair{GateKind::cz, 0, 4, 1, 3, 2};

} // namespace

TEST_CASE("gate schedules dip the couplers and move the right qubit") {
    const CoupledModeModel m2 = model_2q();

    // resonant pair: the iswap needs no qubit move at df_q = 0
    PulseSchedule s = make_schedule(m2, iswap_pair, {60.0, 4.3, 0.0});
    CHECK(s.tg == doctest::Approx(60.0));
    REQUIRE(s.moving.size() == 2);
    for (int i : {0, 1}) {
        const Trajectory& tr = s.moving[i];
        CHECK(tr.mode == (i == 0 ? 1 : 3));
        CHECK(tr.omega_idle == doctest::Approx(two_pi * 5.85));
        CHECK(tr.excursion == doctest::Approx(two_pi * (5.85 - 4.3)));
        CHECK(tr.order == 2);
        CHECK(trajectory_value(tr, 0.0, 60.0) == doctest::Approx(tr.omega_idle));
        CHECK(trajectory_value(tr, 30.0, 60.0) == doctest::Approx(two_pi * 4.3));
        CHECK(trajectory_value(tr, 60.0, 60.0) == doctest::Approx(tr.omega_idle));
    }

    // a qubit offset adds the third trajectory, moving Q2 up by df_q
    s = make_schedule(m2, iswap_pair, {60.0, 4.3, 0.002});
    REQUIRE(s.moving.size() == 3);
    CHECK(s.moving[2].mode == 4);
    CHECK(s.moving[2].excursion == doctest::Approx(-two_pi * 0.002));

    // cz sends the moving qubit to w_a - alpha_b + df_q, which is above its
    // idle here, so the excursion is negative
    s = make_schedule(m2, cz_pair, {80.0, 4.4, -0.01});
    REQUIRE(s.moving.size() == 3);
    CHECK(s.moving[2].mode == 4);
    CHECK(s.moving[2].omega_idle == doctest::Approx(two_pi * 4.0));
    CHECK(s.moving[2].excursion == doctest::Approx(two_pi * (4.0 - 4.21)));

    // order propagates from the spec into every trajectory
    GateSpec steep = iswap_pair;
    steep.order = 3;
    s = make_schedule(m2, steep, {60.0, 4.3, 0.002});
    for (const Trajectory& tr : s.moving) CHECK(tr.order == 3);

    // detuned pair: the iswap moves the higher qubit down onto the lower one
    const CoupledModeModel m4 = model_4q();
    s = make_schedule(m4, iswap_pair, {60.0, 4.36, 0.0});
    REQUIRE(s.moving.size() == 3);
    CHECK(s.moving[2].mode == 4);
    CHECK(s.moving[2].excursion == doctest::Approx(two_pi * 0.34));
}

TEST_CASE("calibration bases for the preset devices") {
    const CoupledModeModel m2 = model_2q();
    const Basis r2 = gate_basis(m2, iswap_pair, true);
    const Basis f2 = gate_basis(m2, iswap_pair, false);
    CHECK(r2.dim() == 21);
    CHECK(f2.dim() == 21);
    REQUIRE(r2.blocks_by_total().size() == 3);
    CHECK(r2.blocks_by_total()[0].size() == 1);
    CHECK(r2.blocks_by_total()[1].size() == 5);
    CHECK(r2.blocks_by_total()[2].size() == 15);

    const CoupledModeModel m4 = model_4q();
    const Basis r4 = gate_basis(m4, iswap_pair, true);
    const Basis f4 = gate_basis(m4, iswap_pair, false);
    CHECK(r4.dim() == 34);
    CHECK(f4.dim() == 430);
    REQUIRE(f4.blocks_by_total().size() == 5);
    CHECK(f4.blocks_by_total()[1].size() == 9);
    CHECK(f4.blocks_by_total()[2].size() == 45);
    CHECK(f4.blocks_by_total()[3].size() == 126);
    CHECK(f4.blocks_by_total()[4].size() == 249);
}

TEST_CASE("gate outcome fields are mutually consistent") {
    const CoupledModeModel m2 = model_2q();
    const Basis basis = gate_basis(m2, iswap_pair, true);
    const ComputationalFrame frame = computational_frame(m2, basis, {0, 4}, true, true);
    PropagateOptions prop;
    prop.dt = 0.02;
    prop.check_convergence = false;

    const GateOutcome o = evaluate_gate(m2, basis, frame, iswap_pair,
                                        {50.0, 4.30, 0.0}, prop);
    CHECK(o.point.f_c == doctest::Approx(4.30));
    CHECK(o.budget.f_avg <= o.budget.f_zz + 1e-12);
    CHECK(o.budget.f_zz <= o.budget.f_pop + 1e-12);
    CHECK(o.budget.f_pop <= o.budget.f_leak + 1e-12);
    CHECK(o.budget.f_leak <= 1.0 + 1e-12);
    CHECK(o.leak_max >= 0.0);
    CHECK(o.sin_zz == doctest::Approx(std::abs(std::sin(o.phi))));
    CHECK(o.delta_cz ==
          doctest::Approx(std::remainder(o.phi - std::numbers::pi,
                                         2.0 * std::numbers::pi)));
}

TEST_CASE("chevron transfer peaks near the exchange resonance") {
    const CoupledModeModel m2 = model_2q();
    PropagateOptions prop;
    prop.dt = 0.02;
    prop.check_convergence = false;
    const auto pts = chevron(m2, iswap_pair, {60.0}, {4.30, 4.60}, prop);
    REQUIRE(pts.size() == 2);
    for (const ChevronPoint& p : pts) {
        CHECK(p.transfer >= 0.0);
        CHECK(p.transfer <= 1.0 + 1e-9);
        CHECK(p.leak >= -1e-9);
        CHECK(p.leak < 1.0);
    }
    // the deep dip is close to a full swap at this gate time; the shallow
    // dip has less effective coupling and transfers much less
    CHECK(pts[0].transfer > 0.9);
    CHECK(pts[0].transfer > pts[1].transfer + 0.3);
}

TEST_CASE("cz landscape returns the requested grid") {
    const CoupledModeModel m2 = model_2q();
    PropagateOptions prop;
    prop.dt = 0.02;
    prop.check_convergence = false;
    const auto grid = cz_landscape(m2, cz_pair, 60.0, {4.36, 4.40}, {-0.015}, prop);
    REQUIRE(grid.size() == 2);
    CHECK(grid[0].point.f_c == doctest::Approx(4.36));
    CHECK(grid[1].point.f_c == doctest::Approx(4.40));
    CHECK(grid[0].point.df_q == doctest::Approx(-0.015));
    for (const GateOutcome& o : grid) CHECK(std::isfinite(o.budget.f_avg));
}

TEST_CASE("iswap calibration finds the quiet point on the two-qubit device") {
    const CoupledModeModel m2 = model_2q();
    SearchOptions opt;
    opt.f_c_lo = 4.39;
    opt.f_c_hi = 4.45;
    opt.coarse = 5;
    const GateOutcome o = calibrate_iswap(m2, iswap_pair, 90.0, opt);
    CHECK(o.point.f_c > 4.40);
    CHECK(o.point.f_c < 4.43);
    CHECK(std::abs(o.point.df_q) < 2e-3);
    CHECK(1.0 - o.budget.f_avg < 5e-5);
    CHECK(o.sin_zz < 2e-3);
    CHECK(o.leak_max < 1e-4);
    CHECK_THROWS_AS(calibrate_iswap(m2, cz_pair, 90.0, opt), std::invalid_argument);
}

TEST_CASE("cz calibration lands on the dressed resonance above the floor") {
    const CoupledModeModel m2 = model_2q();
    SearchOptions opt;
    // window floor below the dispersive limit; calibrate_cz must clamp it
    opt.f_c_lo = 4.10;
    opt.f_c_hi = 4.45;
    opt.coarse = 7;
    const GateOutcome o = calibrate_cz(m2, cz_pair, 100.0, opt);
    CHECK(o.point.f_c > 4.34);
    CHECK(o.point.f_c < 4.38);
    CHECK(o.point.df_q > -0.020);
    CHECK(o.point.df_q < -0.010);
    CHECK(1.0 - o.budget.f_avg < 2e-4);
    CHECK(std::abs(o.delta_cz) < 2e-3);
    CHECK(o.leak_max < 2e-4);
    CHECK_THROWS_AS(calibrate_cz(m2, iswap_pair, 100.0, opt), std::invalid_argument);
}

TEST_CASE("zz free scan finds the phase crossing") {
    const CoupledModeModel m2 = model_2q();
    SearchOptions opt;
    opt.f_c_lo = 4.33;
    opt.f_c_hi = 4.49;
    opt.coarse = 5;

    const ZzFreeScan scan = zz_free_scan(m2, iswap_pair, 85.0, 95.0, 3, opt);
    REQUIRE(scan.points.size() == 3);
    CHECK(scan.points[0].tg == doctest::Approx(85.0));
    CHECK(scan.points[2].tg == doctest::Approx(95.0));
    // the residual phase crosses zero near 90 ns and grows on both sides
    CHECK(scan.points[1].sin_zz < 1e-3);
    CHECK(scan.points[0].sin_zz > 2e-3);
    CHECK(scan.points[2].sin_zz > 1e-3);
    CHECK(scan.points[1].leak < 1e-4);
    CHECK(!scan.fallback);
    CHECK(scan.compromise_tg == doctest::Approx(90.0));

    // unattainable threshold: the best residual is reported as a fallback
    const ZzFreeScan hard = zz_free_scan(m2, iswap_pair, 85.0, 95.0, 3, opt, 1e-9);
    CHECK(hard.fallback);
    CHECK(hard.compromise_tg == doctest::Approx(90.0));

    CHECK_THROWS_AS(zz_free_scan(m2, iswap_pair, 85.0, 95.0, 0, opt),
                    std::invalid_argument);
}

TEST_CASE("frequency collision checks") {
    const std::vector<double> a2{-0.22, -0.22};

    // direct collision
    auto hits = check_frequency_collisions({4.00, 4.02, 4.50},
                                           {-0.22, -0.22, -0.22}, 0.03);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].find("Q1 on Q2") != std::string::npos);
    CHECK(hits[0].find("gap 20 MHz") != std::string::npos);

    // 0-1 on a neighbor's 1-2
    hits = check_frequency_collisions({3.79, 4.00}, {-0.22, -0.21}, 0.03);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].find("Q1 on Q2 1-2 transition") != std::string::npos);

    // two-photon: f1 + f2 = 2 f3 + alpha3
    hits = check_frequency_collisions({4.00, 4.50, 4.36},
                                      {-0.22, -0.22, -0.22}, 0.03);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].find("Q1+Q2 two-photon on Q3") != std::string::npos);

    // the preset idle plan is clean at a 30 MHz guard
    hits = check_frequency_collisions({4.00, 4.34, 4.63, 4.97},
                                      {-0.22, -0.22, -0.22, -0.22}, 0.03);
    CHECK(hits.empty());

    CHECK_THROWS_AS(check_frequency_collisions({4.0, 4.3}, {-0.22}, 0.03),
                    std::invalid_argument);
}

TEST_CASE("idle frequency scan probes a spectator state") {
    const CoupledModeModel m4 = model_4q();
    PropagateOptions prop;
    prop.dt = 0.02;
    prop.check_convergence = false;
    Label probe(9, 0);
    probe[6] = 1;  // Q3 excited while Q1-Q2 run their gate

    const IdleScanResult res = optimize_idle_frequency(
        m4, 5, iswap_pair, {60.0, 4.36, 0.0}, probe, 6.6, 6.8, 3, prop);
    REQUIRE(res.trace.size() == 3);
    CHECK(res.trace.front().f_idle == doctest::Approx(6.6));
    CHECK(res.trace.back().f_idle == doctest::Approx(6.8));
    for (const IdleScanPoint& p : res.trace) {
        CHECK(p.leak > -1e-9);
        CHECK(p.leak < 1.0);
    }
    CHECK(res.best >= 6.6);
    CHECK(res.best <= 6.8);

    CHECK_THROWS_AS(optimize_idle_frequency(m4, 6, iswap_pair, {60.0, 4.36, 0.0},
                                            probe, 6.6, 6.8, 3, prop),
                    std::invalid_argument);
    CHECK_THROWS_AS(optimize_idle_frequency(m4, 5, iswap_pair, {60.0, 4.36, 0.0},
                                            Label(5, 0), 6.6, 6.8, 3, prop),
                    std::invalid_argument);
    Label bad = probe;
    bad[5] = 1;  // a coupler excitation is not a computational probe
    CHECK_THROWS_AS(optimize_idle_frequency(m4, 5, iswap_pair, {60.0, 4.36, 0.0},
                                            bad, 6.6, 6.8, 3, prop),
                    std::invalid_argument);
    bad = probe;
    bad[6] = 2;
    CHECK_THROWS_AS(optimize_idle_frequency(m4, 5, iswap_pair, {60.0, 4.36, 0.0},
                                            bad, 6.6, 6.8, 3, prop),
                    std::invalid_argument);
}

TEST_CASE("suite policy on the two-qubit device") {
    const CoupledModeModel m2 = model_2q();
    SuiteOptions opt;
    opt.tg_grid = {90.0};
    opt.search.f_c_lo = 4.30;
    opt.search.f_c_hi = 4.46;
    opt.search.coarse = 5;

    const auto entries = four_qubit_suite(m2, opt);
    REQUIRE(entries.size() == 2);

    const SuiteEntry& sw = entries[0];
    CHECK(sw.kind == GateKind::iswap);
    CHECK(sw.qubit_a == 0);
    CHECK(sw.qubit_b == 4);
    CHECK(sw.outcome.point.tg == doctest::Approx(90.0));
    // 90 ns sits on the phase crossing, so the policy accepts it outright
    CHECK(!sw.tg_fallback);
    CHECK(sw.outcome.point.f_c > 4.40);
    CHECK(sw.outcome.point.f_c < 4.44);
    CHECK(sw.outcome.budget.f_avg > 0.9995);

    const SuiteEntry& cz = entries[1];
    CHECK(cz.kind == GateKind::cz);
    // the conditional-phase loop does not close cleanly by 90 ns, so the
    // policy falls back to the best grid point instead of approving one
    CHECK(cz.tg_fallback);
    CHECK(cz.outcome.point.tg == doctest::Approx(90.0));
    CHECK(cz.outcome.budget.f_avg > 0.985);

    SuiteOptions empty = opt;
    empty.tg_grid.clear();
    CHECK_THROWS_AS(four_qubit_suite(m2, empty), std::invalid_argument);
}

TEST_CASE("search and suite option defaults") {
    const SearchOptions s;
    CHECK(s.f_c_lo == doctest::Approx(4.05));
    CHECK(s.f_c_hi == doctest::Approx(4.95));
    CHECK(s.coarse == 13);
    CHECK(s.df_q_span == doctest::Approx(0.03));
    CHECK(s.df_q_coarse == 7);
    CHECK(s.prop.dt == doctest::Approx(0.02));
    CHECK(!s.prop.check_convergence);

    const SuiteOptions o;
    REQUIRE(o.tg_grid.size() == 4);
    CHECK(o.tg_grid.front() == doctest::Approx(55.0));
    CHECK(o.tg_grid.back() == doctest::Approx(145.0));
    CHECK(o.cz_tg_min == doctest::Approx(85.0));
    CHECK(o.verify.dt == doctest::Approx(0.02));
    CHECK(!o.verify.check_convergence);
    CHECK(o.leak_limit == doctest::Approx(1e-4));
    CHECK(o.sin_limit == doctest::Approx(1e-3));
    CHECK(o.infid_limit == doctest::Approx(1e-3));
}
