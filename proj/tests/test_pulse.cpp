#include <doctest.h>

#include "cmr/constants.hpp"
#include "cmr/pulse.hpp"

#include <complex>

using namespace cmr;

namespace {

ChainSpec reference_chain() {
    const double c_q = transmon_from_target(4.0, -0.220).cap_fF();
    const double c_c = transmon_from_target(4.3, -0.268).cap_fF();
    ChainSpec chain;
    chain.c_r = resonator_capacitance(3.85, 50.0);
    chain.units.push_back({c_q, c_c, 3.7, 1.0, 37.4, 1.0});
    chain.units.push_back({c_q, c_c, 3.7, 1.0, 37.4, 1.0});
    return chain;
}

CoupledModeModel idle_model() {
    ChainFrequencies f;
    f.qubit = {4.0, 4.0};
    f.coupler = {5.85, 5.85};
    f.resonator = 3.85;
    return build_model(reference_chain(), f, {-0.220, -0.220}, {-0.268, -0.268});
}

Basis small_basis() {
    BasisFilter f;
    f.levels.assign(5, 3);
    f.total_max = 2;
    return Basis::build(f);
}

// both couplers dip from idle toward the qubits
PulseSchedule coupler_dip(const CoupledModeModel& m, double tg) {
    PulseSchedule s;
    s.tg = tg;
    s.moving.push_back({1, m.modes[1].omega, two_pi * 1.55, 2});
    s.moving.push_back({3, m.modes[3].omega, two_pi * 1.55, 2});
    return s;
}

} // namespace

TEST_CASE("trajectory shape") {
    const Trajectory tr{0, two_pi * 5.85, two_pi * 1.55, 2};
    const double tg = 40.0;
    CHECK(trajectory_value(tr, 0.0, tg) == tr.omega_idle);
    CHECK(trajectory_value(tr, tg, tg) == tr.omega_idle);
    CHECK(trajectory_value(tr, -1.0, tg) == tr.omega_idle);
    CHECK(trajectory_value(tr, tg / 2, tg) ==
          doctest::Approx(tr.omega_idle - tr.excursion).epsilon(1e-15));

    // quarter point: 1 - (1/2)^(2n)
    CHECK(trajectory_value(tr, tg / 4, tg) ==
          doctest::Approx(tr.omega_idle - tr.excursion * (1.0 - 1.0 / 16.0)).epsilon(1e-12));

    // higher order spends longer near the bottom
    Trajectory tr4 = tr;
    tr4.order = 4;
    CHECK(trajectory_value(tr4, tg / 4, tg) < trajectory_value(tr, tg / 4, tg));
}

TEST_CASE("static evolution accumulates exact phases") {
    CoupledModeModel m;
    m.modes.push_back({ModeKind::qubit, two_pi * 4.0, two_pi * -0.22});
    const Basis b = Basis::product({3});

    PulseSchedule s;
    s.tg = 7.3;
    PropagateOptions opt;
    opt.dt = 1.0;  // static Hamiltonian, every step is exact
    const Eigen::MatrixXcd u =
        propagate(m, b, s, Eigen::MatrixXcd::Identity(3, 3), opt);

    using cd = std::complex<double>;
    const double w = m.modes[0].omega, a = m.modes[0].alpha;
    CHECK(std::abs(u(0, 0) - cd(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(u(1, 1) - std::exp(cd(0.0, -w * s.tg))) < 1e-12);
    CHECK(std::abs(u(2, 2) - std::exp(cd(0.0, -(2.0 * w + a) * s.tg))) < 1e-12);
    CHECK(std::abs(u(1, 0)) < 1e-15);
}

TEST_CASE("resonant pair undergoes vacuum Rabi exchange") {
    CoupledModeModel m;
    m.modes.push_back({ModeKind::qubit, two_pi * 4.0, two_pi * -0.22});
    m.modes.push_back({ModeKind::qubit, two_pi * 4.0, two_pi * -0.22});
    m.couplings.push_back({0, 1, 0.003});
    const double g = m.g_of(0);
    const Basis b = Basis::product({2, 2});

    Eigen::MatrixXcd init = Eigen::MatrixXcd::Zero(4, 1);
    init(b.index({1, 0}), 0) = 1.0;

    const double t_swap = two_pi / 4.0 / g;  // gt = pi/2, full transfer
    PropagateOptions opt;
    opt.dt = 0.5;
    for (double t : {0.2 * t_swap, 0.7 * t_swap, t_swap}) {
        PulseSchedule s;
        s.tg = t;
        const Eigen::MatrixXcd u = propagate(m, b, s, init, opt);
        const std::complex<double> a01 = u(b.index({0, 1}), 0);
        CHECK(std::norm(a01) == doctest::Approx(std::pow(std::sin(g * t), 2)).epsilon(1e-9));
    }

    // at the full transfer the amplitude carries the -i exchange phase
    PulseSchedule s;
    s.tg = t_swap;
    Eigen::MatrixXcd u = propagate(m, b, s, init, opt);
    std::complex<double> a01 = u(b.index({0, 1}), 0);
    // strip the bare rotating phase exp(-i w t)
    a01 *= std::exp(std::complex<double>(0.0, m.modes[0].omega * s.tg));
    CHECK(a01.real() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(a01.imag() == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("propagation is unitary, block-diagonal, and deterministic") {
    const CoupledModeModel m = idle_model();
    const Basis b = small_basis();
    const PulseSchedule s = coupler_dip(m, 30.0);

    PropagateOptions opt;
    opt.dt = 0.02;
    opt.check_convergence = false;
    const Eigen::MatrixXcd u =
        propagate(m, b, s, Eigen::MatrixXcd::Identity(b.dim(), b.dim()), opt);

    const Eigen::MatrixXcd gram = u.adjoint() * u;
    CHECK((gram - Eigen::MatrixXcd::Identity(b.dim(), b.dim())).cwiseAbs().maxCoeff() < 1e-8);

    // the rotating-wave evolution never leaves a total-occupation block
    double cross = 0.0;
    for (int i = 0; i < b.dim(); ++i)
        for (int j = 0; j < b.dim(); ++j)
            if (b.total(i) != b.total(j)) cross = std::max(cross, std::abs(u(i, j)));
    CHECK(cross < 1e-10);

    const Eigen::MatrixXcd u2 =
        propagate(m, b, s, Eigen::MatrixXcd::Identity(b.dim(), b.dim()), opt);
    CHECK((u - u2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("step halving converges and gives up honestly") {
    const CoupledModeModel m = idle_model();
    const Basis b = small_basis();
    const PulseSchedule s = coupler_dip(m, 20.0);

    Eigen::MatrixXcd init = Eigen::MatrixXcd::Zero(b.dim(), 1);
    init(b.index({1, 0, 0, 0, 0}), 0) = 1.0;

    PropagateOptions coarse;
    coarse.dt = 0.2;
    coarse.tol = 1e-8;
    coarse.max_halvings = 10;
    const Eigen::MatrixXcd u = propagate(m, b, s, init, coarse);

    PropagateOptions fine;
    fine.dt = 0.002;
    fine.check_convergence = false;
    const Eigen::MatrixXcd v = propagate(m, b, s, init, fine);
    CHECK((u - v).cwiseAbs().maxCoeff() < 1e-6);

    PropagateOptions strict;
    strict.dt = 0.8;
    strict.tol = 1e-15;
    strict.max_halvings = 1;
    CHECK_THROWS_AS(propagate(m, b, s, init, strict), ConvergenceError);

    CHECK_THROWS(propagate(m, b, PulseSchedule{{}, -1.0}, init, coarse));
    CHECK_THROWS(propagate(m, b, s, Eigen::MatrixXcd::Identity(3, 3), coarse));
}

TEST_CASE("computational frame in register order") {
    const CoupledModeModel m = idle_model();
    const Basis b = small_basis();
    const ComputationalFrame frame = computational_frame(m, b, {0, 4});

    REQUIRE(frame.comp_labels.size() == 4);
    // qubit 0 is the most significant bit
    CHECK(frame.comp_labels[1] == Label{0, 0, 0, 0, 1});
    CHECK(frame.comp_labels[2] == Label{1, 0, 0, 0, 0});
    CHECK(frame.comp_labels[3] == Label{1, 0, 0, 0, 1});

    // dressed references are orthonormal and dominated by their bare label
    const Eigen::MatrixXcd gram = frame.reference.adjoint() * frame.reference;
    CHECK((gram - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    for (int s = 0; s < 4; ++s)
        CHECK(std::abs(frame.reference(b.index(frame.comp_labels[s]), s)) > 0.9);

    const ComputationalFrame bare = computational_frame(m, b, {0, 4}, false);
    for (int s = 0; s < 4; ++s)
        CHECK(std::abs(bare.reference(b.index(bare.comp_labels[s]), s)) ==
              doctest::Approx(1.0));

    CHECK_THROWS(computational_frame(m, b, {}));
}

TEST_CASE("extraction against the frame itself is the identity") {
    const CoupledModeModel m = idle_model();
    const Basis b = small_basis();
    const ComputationalFrame frame = computational_frame(m, b, {0, 4});

    const ComputationalGate gate = extract_computational(frame, frame.reference);
    CHECK((gate.u - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(gate.leakage.cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS(extract_computational(frame, Eigen::MatrixXcd::Identity(3, 3)));
}

TEST_CASE("phase stripping undoes single-qubit Z layers") {
    using cd = std::complex<double>;
    Eigen::MatrixXcd iswap = Eigen::MatrixXcd::Zero(4, 4);
    iswap(0, 0) = 1.0;
    iswap(3, 3) = 1.0;
    iswap(2, 1) = cd(0.0, 1.0);
    iswap(1, 2) = cd(0.0, 1.0);

    for (const auto& [p1, p2, gl] : {std::tuple{0.37, -1.21, 0.55},
                                     std::tuple{-2.9, 0.04, -1.7}}) {
        Eigen::MatrixXcd v = iswap * std::exp(cd(0.0, gl));
        for (int r = 0; r < 4; ++r) {
            const double chi = p1 * ((r >> 1) & 1) + p2 * (r & 1);
            v.row(r) *= std::exp(cd(0.0, chi));
        }

        const StripResult sr = strip_single_qubit_phases(v);
        CHECK(std::abs(sr.u(0, 0) - cd(1.0, 0.0)) < 1e-12);
        CHECK(std::abs(sr.u(2, 1) - cd(1.0, 0.0)) < 1e-12);  // transfer phases absorbed
        CHECK(std::abs(sr.u(1, 2) - cd(1.0, 0.0)) < 1e-12);
        CHECK(std::abs(sr.u(3, 3) - cd(-1.0, 0.0)) < 1e-12); // the entangling pi remains
        CHECK(std::abs(std::abs(sr.theta(3)) - std::acos(-1.0)) < 1e-12);
        CHECK(sr.theta(1) == doctest::Approx(0.0));
        CHECK(sr.theta(2) == doctest::Approx(0.0));
        CHECK(sr.out_row[1] == 2);
        CHECK(sr.out_row[2] == 1);
    }

    CHECK_THROWS(strip_single_qubit_phases(Eigen::MatrixXcd::Identity(3, 3)));
    CHECK_THROWS(strip_single_qubit_phases(Eigen::MatrixXcd::Identity(4, 3)));
}
