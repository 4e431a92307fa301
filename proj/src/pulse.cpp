#include "cmr/pulse.hpp"
#include "cmr/spectrum.hpp"

#include <cmath>
#include <complex>
#include <unordered_map>

namespace cmr {

double trajectory_value(const Trajectory& tr, double t, double tg) {
    if (t <= 0.0 || t >= tg) return tr.omega_idle;
    const double x = 2.0 * t / tg - 1.0;
    double p = 1.0;
    for (int i = 0; i < 2 * tr.order; ++i) p *= x;
    return tr.omega_idle - tr.excursion * (1.0 - p);
}

namespace {

// Exchange-coupling matrix with unit strength on a block of basis states.
Eigen::MatrixXd coupling_block(const Basis& basis, const std::vector<int>& idx,
                               const std::unordered_map<int, int>& pos,
                               const Coupling& c, bool rwa) {
    const int d = static_cast<int>(idx.size());
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(d, d);
    for (int r = 0; r < d; ++r) {
        const Label& l = basis.label(idx[r]);
        if (l[c.b] > 0) {
            Label t = l;
            ++t[c.a];
            --t[c.b];
            const int gi = basis.index(t);
            if (gi >= 0) {
                auto it = pos.find(gi);
                if (it != pos.end()) {
                    const double amp = std::sqrt((l[c.a] + 1.0) * l[c.b]);
                    x(it->second, r) += amp;
                    x(r, it->second) += amp;
                }
            }
        }
        if (!rwa) {
            Label t = l;
            ++t[c.a];
            ++t[c.b];
            const int gi = basis.index(t);
            if (gi >= 0) {
                auto it = pos.find(gi);
                if (it != pos.end()) {
                    const double amp = -std::sqrt((l[c.a] + 1.0) * (l[c.b] + 1.0));
                    x(it->second, r) += amp;
                    x(r, it->second) += amp;
                }
            }
        }
    }
    return x;
}

struct BlockWork {
    std::vector<int> idx;
    Eigen::MatrixXd h_static;                          // everything that does not move
    std::vector<Eigen::VectorXd> n_moving;             // occupation of each moving mode
    std::vector<std::pair<int, Eigen::MatrixXd>> x_moving;  // coupling index, unit matrix
    Eigen::MatrixXd re, im;                            // propagated components
};

Eigen::MatrixXcd run_once(const CoupledModeModel& model, const Basis& basis,
                          const PulseSchedule& schedule, const Eigen::MatrixXcd& init,
                          double dt, bool rwa) {
    const int m = basis.n_modes();
    std::vector<bool> moving(m, false);
    for (const Trajectory& tr : schedule.moving) moving[tr.mode] = true;

    // block layout: per total occupation under the RWA, one big block otherwise
    std::vector<std::vector<int>> layout;
    if (rwa) {
        layout = basis.blocks_by_total();
    } else {
        layout.emplace_back();
        for (int i = 0; i < basis.dim(); ++i) layout[0].push_back(i);
    }

    const int ncols = static_cast<int>(init.cols());
    std::vector<BlockWork> work;
    for (const std::vector<int>& idx : layout) {
        if (idx.empty()) continue;
        const int d = static_cast<int>(idx.size());

        Eigen::MatrixXd re(d, ncols), im(d, ncols);
        for (int r = 0; r < d; ++r) {
            for (int c = 0; c < ncols; ++c) {
                re(r, c) = init(idx[r], c).real();
                im(r, c) = init(idx[r], c).imag();
            }
        }
        if (re.cwiseAbs().maxCoeff() == 0.0 && im.cwiseAbs().maxCoeff() == 0.0)
            continue;

        BlockWork w;
        w.idx = idx;
        w.re = std::move(re);
        w.im = std::move(im);

        std::unordered_map<int, int> pos;
        pos.reserve(idx.size());
        for (int r = 0; r < d; ++r) pos[idx[r]] = r;

        // static diagonal: full anharmonicity, plus omega*n for static modes
        w.h_static = Eigen::MatrixXd::Zero(d, d);
        for (int r = 0; r < d; ++r) {
            const Label& l = basis.label(idx[r]);
            double e = 0.0;
            for (int mm = 0; mm < m; ++mm) {
                const double n = l[mm];
                e += 0.5 * model.modes[mm].alpha * n * (n - 1.0);
                if (!moving[mm]) e += model.modes[mm].omega * n;
            }
            w.h_static(r, r) = e;
        }
        for (const Trajectory& tr : schedule.moving) {
            Eigen::VectorXd n(d);
            for (int r = 0; r < d; ++r) n(r) = basis.label(idx[r])[tr.mode];
            w.n_moving.push_back(n);
        }
        for (size_t ci = 0; ci < model.couplings.size(); ++ci) {
            const Coupling& c = model.couplings[ci];
            Eigen::MatrixXd x = coupling_block(basis, idx, pos, c, rwa);
            if (moving[c.a] || moving[c.b]) {
                w.x_moving.emplace_back(static_cast<int>(ci), std::move(x));
            } else {
                w.h_static += model.g_of(c) * x;
            }
        }
        work.push_back(std::move(w));
    }

    const int nsteps = std::max(1, static_cast<int>(std::llround(schedule.tg / dt)));
    const double dt_eff = schedule.tg / nsteps;

    std::vector<double> omega_now(m);
    Eigen::MatrixXd h, tre, tim;
    for (int k = 0; k < nsteps; ++k) {
        const double t_mid = (k + 0.5) * dt_eff;
        for (int mm = 0; mm < m; ++mm) omega_now[mm] = model.modes[mm].omega;
        for (const Trajectory& tr : schedule.moving)
            omega_now[tr.mode] = trajectory_value(tr, t_mid, schedule.tg);

        for (BlockWork& w : work) {
            h = w.h_static;
            for (size_t ti = 0; ti < schedule.moving.size(); ++ti)
                h.diagonal() += omega_now[schedule.moving[ti].mode] * w.n_moving[ti];
            for (const auto& [ci, x] : w.x_moving) {
                const Coupling& c = model.couplings[ci];
                const double g = c.k * std::sqrt(omega_now[c.a] * omega_now[c.b]);
                h += g * x;
            }

            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
            if (es.info() != Eigen::Success)
                throw std::runtime_error("eigendecomposition failed during propagation");
            const Eigen::MatrixXd& v = es.eigenvectors();
            tre.noalias() = v.transpose() * w.re;
            tim.noalias() = v.transpose() * w.im;
            // multiply row r by exp(-i w_r dt)
            for (int r = 0; r < h.rows(); ++r) {
                const double ph = es.eigenvalues()(r) * dt_eff;
                const double cs = std::cos(ph), sn = std::sin(ph);
                for (int c = 0; c < tre.cols(); ++c) {
                    const double a = tre(r, c), b = tim(r, c);
                    tre(r, c) = a * cs + b * sn;
                    tim(r, c) = b * cs - a * sn;
                }
            }
            w.re.noalias() = v * tre;
            w.im.noalias() = v * tim;
        }
    }

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(basis.dim(), ncols);
    for (const BlockWork& w : work)
        for (size_t r = 0; r < w.idx.size(); ++r)
            for (int c = 0; c < ncols; ++c)
                out(w.idx[r], c) = std::complex<double>(w.re(r, c), w.im(r, c));
    return out;
}

} // namespace

Eigen::MatrixXcd propagate(const CoupledModeModel& model, const Basis& basis,
                           const PulseSchedule& schedule, const Eigen::MatrixXcd& init,
                           const PropagateOptions& opt) {
    if (init.rows() != basis.dim())
        throw std::invalid_argument("initial columns do not match basis dimension");
    if (schedule.tg <= 0.0)
        throw std::invalid_argument("gate time must be positive");
    if (opt.dt <= 0.0)
        throw std::invalid_argument("time step must be positive");

    double dt = opt.dt;
    Eigen::MatrixXcd u = run_once(model, basis, schedule, init, dt, opt.rwa);
    if (!opt.check_convergence) return u;

    for (int halvings = 0; halvings < opt.max_halvings; ++halvings) {
        dt *= 0.5;
        Eigen::MatrixXcd u2 = run_once(model, basis, schedule, init, dt, opt.rwa);
        if ((u2 - u).cwiseAbs().maxCoeff() < opt.tol) return u2;
        u = std::move(u2);
    }
    throw ConvergenceError("propagation did not converge under step halving");
}

ComputationalFrame computational_frame(const CoupledModeModel& model, const Basis& basis,
                                       const std::vector<int>& qubits,
                                       bool dressed, bool rwa) {
    const int n = static_cast<int>(qubits.size());
    if (n < 1 || n > 10)
        throw std::invalid_argument("register size out of range");
    const int d = 1 << n;
    const int m = basis.n_modes();

    ComputationalFrame frame;
    frame.qubits = qubits;
    frame.comp_labels.reserve(d);
    for (int s = 0; s < d; ++s) {
        Label l(m, 0);
        for (int i = 0; i < n; ++i)
            l[qubits[i]] = (s >> (n - 1 - i)) & 1;
        if (basis.index(l) < 0)
            throw std::invalid_argument("computational label outside the basis");
        frame.comp_labels.push_back(std::move(l));
    }

    frame.reference = Eigen::MatrixXcd::Zero(basis.dim(), d);
    if (dressed) {
        const Eigen::MatrixXd h = build_hamiltonian(model, basis, rwa);
        const TrackedStates ts = eigen_tracked(h, basis, frame.comp_labels);
        // localize within the tracked eigenspace: resonant qubits hybridize
        // 50/50, so rotate to the combinations nearest the bare labels
        // (symmetric orthogonalization keeps the span, hence the leakage)
        Eigen::MatrixXd m_overlap(d, d);
        for (int c = 0; c < d; ++c)
            m_overlap.col(c) = ts.vectors.row(basis.index(frame.comp_labels[c])).transpose();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(
            m_overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::MatrixXd q = svd.matrixU() * svd.matrixV().transpose();
        frame.reference = (ts.vectors * q).cast<std::complex<double>>();
    } else {
        for (int s = 0; s < d; ++s)
            frame.reference(basis.index(frame.comp_labels[s]), s) = 1.0;
    }
    return frame;
}

ComputationalGate extract_computational(const ComputationalFrame& frame,
                                        const Eigen::MatrixXcd& propagated) {
    if (propagated.rows() != frame.reference.rows() ||
        propagated.cols() != frame.reference.cols())
        throw std::invalid_argument("propagated columns do not match the frame");

    ComputationalGate gate;
    gate.u = frame.reference.adjoint() * propagated;
    const int d = static_cast<int>(gate.u.cols());
    gate.leakage.resize(d);
    for (int c = 0; c < d; ++c)
        gate.leakage(c) = 1.0 - gate.u.col(c).squaredNorm();
    return gate;
}

StripResult strip_single_qubit_phases(const Eigen::MatrixXcd& u) {
    const int d = static_cast<int>(u.rows());
    if (d < 2 || u.cols() != d || (d & (d - 1)) != 0)
        throw std::invalid_argument("expected a square matrix over a qubit register");
    int n = 0;
    while ((1 << n) < d) ++n;

    StripResult out;
    out.global_phase = std::arg(u(0, 0));
    out.qubit_phase.assign(n, 0.0);

    // assign each single-excitation column to a single-excitation output row,
    // bijectively, strongest overlaps first
    std::vector<int> single(n);
    for (int i = 0; i < n; ++i) single[i] = 1 << (n - 1 - i);  // qubit i's state
    Eigen::MatrixXd mag(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            mag(i, j) = std::abs(u(single[i], single[j]));

    std::vector<bool> row_done(n, false), col_done(n, false);
    for (int step = 0; step < n; ++step) {
        int bi = -1, bj = -1;
        double best = -1.0;
        for (int i = 0; i < n; ++i) {
            if (row_done[i]) continue;
            for (int j = 0; j < n; ++j) {
                if (col_done[j]) continue;
                if (mag(i, j) > best) {
                    best = mag(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        row_done[bi] = true;
        col_done[bj] = true;
        out.qubit_phase[bi] = std::arg(u(single[bi], single[bj])) - out.global_phase;
    }

    out.u.resize(d, d);
    for (int r = 0; r < d; ++r) {
        double chi = out.global_phase;
        for (int i = 0; i < n; ++i)
            if (r & single[i]) chi += out.qubit_phase[i];
        const std::complex<double> ph(std::cos(chi), -std::sin(chi));
        out.u.row(r) = u.row(r) * ph;
    }

    out.theta.resize(d);
    out.out_row.resize(d);
    for (int c = 0; c < d; ++c) {
        int r_best = 0;
        double best = -1.0;
        for (int r = 0; r < d; ++r) {
            if (std::abs(out.u(r, c)) > best) {
                best = std::abs(out.u(r, c));
                r_best = r;
            }
        }
        out.out_row[c] = r_best;
        out.theta(c) = std::arg(out.u(r_best, c));
    }
    return out;
}

} // namespace cmr
