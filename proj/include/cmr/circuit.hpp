#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

// Circuit-level description of the device: a chain of transmon/coupler units
// capacitively loaded onto one shared bus resonator. All quantities at this
// layer are in fF and ordinary GHz.
//
// Node ordering for an N-unit chain (2N+1 modes):
//   Q1, C1, R, C2, Q2, C3, Q3, ..., CN, QN

namespace cmr {

struct UnitSpec {
    double c_q;        // qubit shunt [fF]
    double c_c;        // coupler shunt [fF]
    double c_qc;       // qubit-coupler coupling cap [fF]
    double c_qr;       // qubit-resonator coupling cap [fF]
    double c_cr;       // coupler-resonator coupling cap [fF]
    double a = 1.0;    // resonator mode sampling coefficient at this unit
};

struct ChainSpec {
    std::vector<UnitSpec> units;
    double c_r;        // resonator effective capacitance [fF]

    int n_units() const { return static_cast<int>(units.size()); }
    int n_modes() const { return 2 * n_units() + 1; }
};

// Node index helpers, 0-based: unit index j is 0-based too.
inline int qubit_node(int j) { return j == 0 ? 0 : 2 * j + 2; }
inline int coupler_node(int j) { return j == 0 ? 1 : 2 * j + 1; }
inline constexpr int resonator_node = 2;

// Full Maxwell capacitance matrix. Diagonals are node totals; off-diagonals
// carry -C_ij, with the resonator rows weighted by the sampling coefficients.
Eigen::MatrixXd build_capacitance_matrix(const ChainSpec& chain);

// Leading-order closed-form inverse. Only the retained elements are filled
// (diagonals, Q-C and C-R and Q-R within a unit, C-C between units); everything
// else is zero. With use_node_totals the denominators use the diagonal entries
// of the full matrix instead of the bare shunt values, which is what actually
// tracks the exact inverse.
Eigen::MatrixXd analytic_inverse(const ChainSpec& chain, bool use_node_totals = true);

// Transmon in the E_J >> E_C regime. Energies in GHz.
struct Transmon {
    double ej;
    double ec;

    double omega() const;                 // sqrt(8 EJ EC) - EC
    double alpha() const { return -ec; }
    double cap_fF() const;                // shunt capacitance giving this EC
};

// Invert (omega, alpha) -> (E_J, E_C); alpha must be negative.
Transmon transmon_from_target(double omega_ghz, double alpha_ghz);

// Effective lumped capacitance of a lambda/2 resonator mode: C = 1/(4 f Z0).
double resonator_capacitance(double f_ghz, double z0_ohm);

struct ChainFrequencies {
    std::vector<double> qubit;     // [GHz]
    std::vector<double> coupler;   // [GHz]
    double resonator;              // [GHz]
};

// Pairwise coupling strengths from the leading-order inverse, in GHz.
struct CouplingSet {
    std::vector<double> g_qc;      // qubit j - coupler j
    std::vector<double> g_cr;      // coupler j - resonator
    std::vector<double> g_qr;      // qubit j - resonator
    Eigen::MatrixXd g_cc;          // coupler i - coupler j, symmetric, zero diagonal
};

CouplingSet coupling_strengths(const ChainSpec& chain, const ChainFrequencies& freqs,
                               bool use_node_totals = false);

// Sanity warnings when coupling caps are not small against the shunts they
// join. Returns human-readable messages; empty means clean.
std::vector<std::string> validate_hierarchy(const ChainSpec& chain, double ratio_limit = 0.3);

} // namespace cmr
