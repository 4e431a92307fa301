#pragma once

#include "cmr/hamiltonian.hpp"
#include "cmr/hilbert.hpp"

#include <Eigen/Dense>
#include <vector>

// Dressed-state spectroscopy: assign eigenpairs to bare labels and read off
// exchange splittings and ZZ coefficients. Energies are angular GHz.

namespace cmr {

struct SpectrumOptions {
    int levels = 3;      // per-mode truncation
    int total_max = 2;   // total-occupation cap (exchange-conserving sector)
    bool rwa = true;
};

struct TrackedStates {
    Eigen::VectorXd energies;      // one per requested target
    Eigen::MatrixXd vectors;       // matching eigenvectors, one column per target
    std::vector<int> eigen_index;  // position of the assigned eigenpair
};

// Greedy bijective maximal-overlap assignment of eigenpairs to bare labels.
// Each eigenpair is used at most once; this keeps sums over a degenerate
// multiplet trace-invariant, which matters at exact resonances.
TrackedStates eigen_tracked(const Eigen::MatrixXd& h, const Basis& basis,
                            const std::vector<Label>& targets);

// ZZ coefficient zeta = E11 - E10 - E01 + E00 for a pair of qubit modes.
double zz_coefficient(const CoupledModeModel& model, int qubit_a, int qubit_b,
                      const SpectrumOptions& opt = {});

// Splitting of the two single-excitation dressed states sitting on a pair of
// resonant qubits; equals twice the effective swap coupling.
double exchange_splitting(const CoupledModeModel& model, int qubit_a, int qubit_b,
                          const SpectrumOptions& opt = {});

// Effective swap coupling: half the minimum of exchange_splitting over a
// sweep of qubit_b, which locates the avoided crossing. Range in angular GHz.
double exchange_coupling(const CoupledModeModel& model, int qubit_a, int qubit_b,
                         double omega_b_lo, double omega_b_hi,
                         const SpectrumOptions& opt = {});

// Gap between the dressed |11> and |02_b> branches at the current operating
// point (two-excitation sector).
double cz_gap(const CoupledModeModel& model, int qubit_a, int qubit_b,
              const SpectrumOptions& opt = {});

// Location and size of the 11-02 avoided crossing over a sweep of qubit_b's
// frequency. The resonant omega_b sits below the bare condition omega_a -
// alpha_b once the couplers repel the moving qubit. Range in angular GHz.
struct CzResonance {
    double omega_b;   // argmin of the gap [angular GHz]
    double gap;       // full splitting at the crossing [angular GHz]
};

CzResonance cz_resonance(const CoupledModeModel& model, int qubit_a, int qubit_b,
                         double omega_b_lo, double omega_b_hi,
                         const SpectrumOptions& opt = {});

// Just the splitting, for callers that do not need the location.
double cz_coupling(const CoupledModeModel& model, int qubit_a, int qubit_b,
                   double omega_b_lo, double omega_b_hi,
                   const SpectrumOptions& opt = {});

// All pairwise ZZ coefficients between qubit modes, from one diagonalization.
// Entry (i,j) indexes qubits in mode order; diagonal is zero.
Eigen::MatrixXd four_qubit_selectivity(const CoupledModeModel& model,
                                       const SpectrumOptions& opt = {});

} // namespace cmr
