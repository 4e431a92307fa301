#pragma once

#include "cmr/pulse.hpp"

#include <Eigen/Dense>
#include <vector>

// Gate-quality metrics on the extracted computational matrix. All fidelities
// take the simulated and ideal matrices in the same stripped frame.

namespace cmr {

// (|tr(U_id^dag U)|^2 + tr(U^dag U)) / (d (d + 1)); tolerates non-unitary U,
// which is how leakage enters.
double average_fidelity(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& u_ideal);

// Same functional applied to element-wise magnitudes; blind to phase errors.
double population_fidelity(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& u_ideal);

// Fidelity of a fictitious gate that routes each column's surviving population
// entirely to the ideal output row; only leakage out of the register hurts it.
double leakage_fidelity(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& u_ideal);

// Average fidelity after snapping the output phases of the columns that have
// both target qubits excited to their ideal values. The difference against
// population_fidelity isolates spectator (ZZ) phase errors; the difference
// against average_fidelity isolates the target-pair phase error.
double zz_masked_fidelity(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& u_ideal,
                          int target_a, int target_b);

struct ErrorBudget {
    double f_avg, f_zz, f_pop, f_leak;
    double eps_leak;      // 1 - f_leak
    double eps_pt;        // f_leak - f_pop, misrouted population
    double eps_zz;        // f_pop - f_zz, spectator phase errors
    double eps_gate_zz;   // f_zz - f_avg, target-pair phase error
};

ErrorBudget error_budget(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& u_ideal,
                         int target_a, int target_b);

// Ideal gates on an n-qubit register (qubit 0 is the most significant bit).
Eigen::MatrixXcd ideal_iswap(int n, int target_a, int target_b);
Eigen::MatrixXcd ideal_cz(int n, int target_a, int target_b);

// Conditional-phase readouts from a stripped gate. phi is the residual theta
// of the state with both targets excited and all spectators idle.
struct IswapPhases {
    double phi_zz;        // ideal value pi for an iSWAP
    double sin_abs;       // |sin(phi_zz)|, the ZZ dephasing figure
};
IswapPhases iswap_phase_diagnostics(const StripResult& s, int n, int target_a, int target_b);

struct CzPhases {
    double phi_cz;        // ideal value pi
    double delta;         // phi_cz - pi wrapped to (-pi, pi]
};
CzPhases cz_phase_diagnostics(const StripResult& s, int n, int target_a, int target_b);

// Closed-form coherence-limited average fidelity. Times in ns.
enum class GateKind { iswap, cz };

struct CoherenceTimes {
    std::vector<double> t1;    // per register qubit
    std::vector<double> tphi;
};

double coherence_limited_fidelity(GateKind kind, double tg_ns, const CoherenceTimes& times,
                                  int target_a = 0, int target_b = 1);

// Register-size-only decoherence rate, 1 - d/(2(d+1)) t sum(1/T1 + 1/Tphi).
// Coincides with the two-qubit iSWAP expression at n = 2.
double coherence_limited_generic(int n, double tg_ns, const CoherenceTimes& times);

} // namespace cmr
