#pragma once

#include "cmr/circuit.hpp"
#include "cmr/hilbert.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

// Coupled Duffing-oscillator model and its Hamiltonian on a truncated basis.
// Everything here is in angular GHz (rad/ns); the circuit layer converts once.

namespace cmr {

enum class ModeKind { qubit, coupler, resonator };

struct Mode {
    ModeKind kind;
    double omega;   // angular GHz
    double alpha;   // angular GHz, zero for the resonator
};

struct Coupling {
    int a, b;
    // Capacitive prefactor: g = k * sqrt(omega_a * omega_b). Storing k instead
    // of g makes frequency sweeps rescale the coupling the way the circuit does.
    double k;
};

struct CoupledModeModel {
    std::vector<Mode> modes;
    std::vector<Coupling> couplings;

    double g_of(const Coupling& c) const {
        return c.k * std::sqrt(modes[c.a].omega * modes[c.b].omega);
    }
    double g_of(int i) const { return g_of(couplings[i]); }
    int find_coupling(int a, int b) const;
    CoupledModeModel with_mode_frequency(int mode, double omega_angular) const;
};

// Assemble the model for a chain: mode order Q1, C1, R, C2, Q2, ...
// Inputs in ordinary GHz, output model in angular GHz.
CoupledModeModel build_model(const ChainSpec& chain, const ChainFrequencies& freqs,
                             const std::vector<double>& alpha_q_ghz,
                             const std::vector<double>& alpha_c_ghz);

// Duffing self terms plus capacitive couplings. With rwa the exchange part
// g(a'b + ab') is kept; otherwise the full -g(a' - a)(b' - b). Real symmetric.
Eigen::MatrixXd build_hamiltonian(const CoupledModeModel& model, const Basis& basis,
                                  bool rwa = true);

// Excitation-conserving Hamiltonian restricted to a set of basis indices
// (a block of fixed total occupation under the RWA).
Eigen::MatrixXd build_block(const CoupledModeModel& model, const Basis& basis,
                            const std::vector<int>& idx);

// Second-order effective model after eliminating couplers and resonator.
// All values angular GHz.
struct EffectiveUnit {
    double omega_q;   // dressed qubit frequency
    double g_qr;      // net qubit-resonator coupling
    double delta_qc;  // qubit-coupler detuning
};

struct EffectiveModel {
    std::vector<EffectiveUnit> units;
    double omega_r;          // dressed resonator frequency
    Eigen::MatrixXd g_qq;    // pairwise effective qubit-qubit coupling
};

// Throws std::domain_error naming the offending pair when a required detuning
// vanishes.
EffectiveModel effective_model(const CoupledModeModel& model);

} // namespace cmr
