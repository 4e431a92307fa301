#include "cmr/metrics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cmr {

namespace {

void check_pair(int d, const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& u_ideal) {
    if (u.rows() != d || u.cols() != d || u_ideal.rows() != d || u_ideal.cols() != d)
        throw std::invalid_argument("fidelity needs two square matrices of equal size");
}

double fidelity_functional(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& u_ideal) {
    const double d = static_cast<double>(u.rows());
    const std::complex<double> tr_cross = (u_ideal.adjoint() * u).trace();
    const double tr_uu = (u.adjoint() * u).trace().real();
    return (std::norm(tr_cross) + tr_uu) / (d * (d + 1.0));
}

Eigen::MatrixXcd magnitudes(const Eigen::MatrixXcd& u) {
    return u.cwiseAbs().cast<std::complex<double>>();
}

int register_size(const Eigen::MatrixXcd& u) {
    const int d = static_cast<int>(u.rows());
    int n = 0;
    while ((1 << n) < d) ++n;
    if ((1 << n) != d || n < 1)
        throw std::invalid_argument("matrix dimension is not a power of two");
    return n;
}

int bit_of(int n, int qubit) { return 1 << (n - 1 - qubit); }

} // namespace

double average_fidelity(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& u_ideal) {
    check_pair(static_cast<int>(u.rows()), u, u_ideal);
    return fidelity_functional(u, u_ideal);
}

double population_fidelity(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& u_ideal) {
    check_pair(static_cast<int>(u.rows()), u, u_ideal);
    return fidelity_functional(magnitudes(u), magnitudes(u_ideal));
}

double leakage_fidelity(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& u_ideal) {
    const int d = static_cast<int>(u.rows());
    check_pair(d, u, u_ideal);
    Eigen::MatrixXcd routed = Eigen::MatrixXcd::Zero(d, d);
    for (int c = 0; c < d; ++c) {
        int r_best = 0;
        double best = -1.0;
        for (int r = 0; r < d; ++r) {
            if (std::abs(u_ideal(r, c)) > best) {
                best = std::abs(u_ideal(r, c));
                r_best = r;
            }
        }
        routed(r_best, c) = u.col(c).norm();
    }
    return fidelity_functional(routed, magnitudes(u_ideal));
}

double zz_masked_fidelity(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& u_ideal,
                          int target_a, int target_b) {
    const int d = static_cast<int>(u.rows());
    check_pair(d, u, u_ideal);
    const int n = register_size(u);
    if (target_a == target_b || target_a < 0 || target_b < 0 || target_a >= n || target_b >= n)
        throw std::invalid_argument("bad target qubit indices");

    const int mask = bit_of(n, target_a) | bit_of(n, target_b);
    Eigen::MatrixXcd fixed = u;
    for (int c = 0; c < d; ++c) {
        if ((c & mask) != mask) continue;
        int r_best = 0;
        double best = -1.0;
        for (int r = 0; r < d; ++r) {
            if (std::abs(u_ideal(r, c)) > best) {
                best = std::abs(u_ideal(r, c));
                r_best = r;
            }
        }
        const double shift = std::arg(u_ideal(r_best, c)) - std::arg(u(r_best, c));
        fixed.col(c) *= std::complex<double>(std::cos(shift), std::sin(shift));
    }
    return fidelity_functional(fixed, u_ideal);
}

ErrorBudget error_budget(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& u_ideal,
                         int target_a, int target_b) {
    ErrorBudget b;
    b.f_avg = average_fidelity(u, u_ideal);
    b.f_zz = zz_masked_fidelity(u, u_ideal, target_a, target_b);
    b.f_pop = population_fidelity(u, u_ideal);
    b.f_leak = leakage_fidelity(u, u_ideal);
    b.eps_leak = 1.0 - b.f_leak;
    b.eps_pt = b.f_leak - b.f_pop;
    b.eps_zz = b.f_pop - b.f_zz;
    b.eps_gate_zz = b.f_zz - b.f_avg;
    return b;
}

Eigen::MatrixXcd ideal_iswap(int n, int target_a, int target_b) {
    const int d = 1 << n;
    const int ba = bit_of(n, target_a), bb = bit_of(n, target_b);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(d, d);
    const std::complex<double> im(0.0, 1.0);
    for (int s = 0; s < d; ++s) {
        const bool na = s & ba, nb = s & bb;
        if (na == nb) {
            u(s, s) = 1.0;
        } else {
            u(s ^ ba ^ bb, s) = im;
        }
    }
    return u;
}

Eigen::MatrixXcd ideal_cz(int n, int target_a, int target_b) {
    const int d = 1 << n;
    const int mask = bit_of(n, target_a) | bit_of(n, target_b);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(d, d);
    for (int s = 0; s < d; ++s)
        u(s, s) = (s & mask) == mask ? -1.0 : 1.0;
    return u;
}

IswapPhases iswap_phase_diagnostics(const StripResult& s, int n, int target_a, int target_b) {
    const int state = bit_of(n, target_a) | bit_of(n, target_b);
    IswapPhases out;
    out.phi_zz = s.theta(state);
    out.sin_abs = std::abs(std::sin(out.phi_zz));
    return out;
}

CzPhases cz_phase_diagnostics(const StripResult& s, int n, int target_a, int target_b) {
    const int state = bit_of(n, target_a) | bit_of(n, target_b);
    CzPhases out;
    out.phi_cz = s.theta(state);
    out.delta = std::remainder(out.phi_cz - std::numbers::pi, 2.0 * std::numbers::pi);
    return out;
}

double coherence_limited_generic(int n, double tg_ns, const CoherenceTimes& times) {
    const double d = static_cast<double>(1 << n);
    double rate = 0.0;
    for (int q = 0; q < n; ++q)
        rate += 1.0 / times.t1[q] + 1.0 / times.tphi[q];
    return 1.0 - d / (2.0 * (d + 1.0)) * tg_ns * rate;
}

double coherence_limited_fidelity(GateKind kind, double tg_ns, const CoherenceTimes& times,
                                  int target_a, int target_b) {
    const int n = static_cast<int>(times.t1.size());
    if (static_cast<int>(times.tphi.size()) != n || n < 2)
        throw std::invalid_argument("need T1 and Tphi for at least two qubits");
    if (target_a == target_b || target_a < 0 || target_b < 0 || target_a >= n || target_b >= n)
        throw std::invalid_argument("bad target qubit indices");

    if (kind == GateKind::iswap) {
        if (n == 2) {
            double rate = 0.0;
            for (int q = 0; q < 2; ++q)
                rate += 1.0 / times.t1[q] + 1.0 / times.tphi[q];
            return 1.0 - 0.4 * tg_ns * rate;
        }
        return coherence_limited_generic(n, tg_ns, times);
    }

    // CZ: the target transiently populating its second excited state decays
    // faster, so the two targets carry different weights
    if (n == 2) {
        return 1.0 - tg_ns * (0.5 / times.t1[target_a] + 0.3 / times.t1[target_b] +
                              (31.0 / 40.0) / times.tphi[target_a] +
                              (3.0 / 8.0) / times.tphi[target_b]);
    }
    if (n == 4) {
        double f = 1.0 - tg_ns * ((10.0 / 17.0) / times.t1[target_a] +
                                  (6.0 / 17.0) / times.t1[target_b] +
                                  (245.0 / 272.0) / times.tphi[target_a] +
                                  (117.0 / 272.0) / times.tphi[target_b]);
        for (int q = 0; q < n; ++q) {
            if (q == target_a || q == target_b) continue;
            f -= tg_ns * (8.0 / 17.0) * (1.0 / times.t1[q] + 1.0 / times.tphi[q]);
        }
        return f;
    }
    throw std::invalid_argument("no closed-form CZ coherence limit for this register size");
}

} // namespace cmr
