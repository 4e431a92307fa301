#pragma once

#include "cmr/hamiltonian.hpp"
#include "cmr/hilbert.hpp"

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

// Flat-top-free frequency trajectories, piecewise-exact propagation, and
// extraction of the computational-subspace gate. Angular GHz and ns.

namespace cmr {

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Even-power dip: omega(t) = idle - excursion * (1 - (2 t / tg - 1)^(2 n)).
// Starts and ends at the idle frequency, reaches idle - excursion at tg/2.
struct Trajectory {
    int mode;
    double omega_idle;    // angular GHz
    double excursion;     // angular GHz, positive means downward
    int order = 2;        // the n in the even power
};

double trajectory_value(const Trajectory& tr, double t, double tg);

struct PulseSchedule {
    std::vector<Trajectory> moving;
    double tg;            // ns, full support of the pulse
};

struct PropagateOptions {
    double dt = 0.01;            // ns, initial step
    bool rwa = true;
    bool check_convergence = true;
    double tol = 1e-8;           // max |delta U_ij| between dt and dt/2
    int max_halvings = 6;
};

// Propagate the given columns through the schedule with midpoint-sampled
// piecewise-constant steps, each applied by exact eigendecomposition. Under
// the RWA the evolution is done per total-occupation block. With convergence
// checking on, the step is halved until the result moves by less than tol;
// throws ConvergenceError if max_halvings is exhausted.
Eigen::MatrixXcd propagate(const CoupledModeModel& model, const Basis& basis,
                           const PulseSchedule& schedule, const Eigen::MatrixXcd& init,
                           const PropagateOptions& opt = {});

// Computational register: one column per bitstring, in register order
// (qubits[0] is the most significant bit). With dressed references the columns
// are the eigenvectors of the idle Hamiltonian assigned to the computational
// labels; otherwise bare Fock states.
struct ComputationalFrame {
    std::vector<int> qubits;
    Eigen::MatrixXcd reference;       // basis.dim() x 2^n
    std::vector<Label> comp_labels;
};

ComputationalFrame computational_frame(const CoupledModeModel& model, const Basis& basis,
                                       const std::vector<int>& qubits,
                                       bool dressed = true, bool rwa = true);

struct ComputationalGate {
    Eigen::MatrixXcd u;         // 2^n x 2^n overlap matrix
    Eigen::VectorXd leakage;    // per column: population outside the register
};

ComputationalGate extract_computational(const ComputationalFrame& frame,
                                        const Eigen::MatrixXcd& propagated);

// Remove the global phase and one Z-rotation per qubit, chosen to zero the
// phases of the single-excitation columns at their dominant output rows. The
// residual theta per column is the phase left at that column's dominant row.
struct StripResult {
    Eigen::MatrixXcd u;
    Eigen::VectorXd theta;            // per column
    std::vector<int> out_row;         // dominant row per column
    double global_phase;
    std::vector<double> qubit_phase;  // applied Z angle per register qubit
};

StripResult strip_single_qubit_phases(const Eigen::MatrixXcd& u);

} // namespace cmr
