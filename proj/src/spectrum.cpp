#include "cmr/spectrum.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cmr {

namespace {

Basis spectroscopy_basis(const CoupledModeModel& model, const SpectrumOptions& opt) {
    BasisFilter f;
    f.levels.assign(model.modes.size(), opt.levels);
    if (opt.rwa) f.total_max = opt.total_max;
    return Basis::build(f);
}

Eigen::MatrixXd spectroscopy_hamiltonian(const CoupledModeModel& model,
                                         const Basis& basis,
                                         const SpectrumOptions& opt) {
    return build_hamiltonian(model, basis, opt.rwa);
}

std::vector<int> qubit_modes(const CoupledModeModel& model) {
    std::vector<int> q;
    for (size_t i = 0; i < model.modes.size(); ++i)
        if (model.modes[i].kind == ModeKind::qubit) q.push_back(static_cast<int>(i));
    return q;
}

Label unit_label(int n_modes, int mode, int count = 1) {
    Label l(n_modes, 0);
    l[mode] = count;
    return l;
}

} // namespace

TrackedStates eigen_tracked(const Eigen::MatrixXd& h, const Basis& basis,
                            const std::vector<Label>& targets) {
    const int t = static_cast<int>(targets.size());
    if (t == 0) throw std::invalid_argument("no tracking targets given");
    if (t > basis.dim())
        throw std::invalid_argument("more tracking targets than basis states");

    std::vector<int> rows(t);
    for (int i = 0; i < t; ++i) {
        rows[i] = basis.index(targets[i]);
        if (rows[i] < 0)
            throw std::invalid_argument("tracking target outside the basis");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed");
    const Eigen::VectorXd& w = es.eigenvalues();
    const Eigen::MatrixXd& v = es.eigenvectors();
    const int d = basis.dim();

    Eigen::MatrixXd overlap(t, d);
    for (int i = 0; i < t; ++i)
        overlap.row(i) = v.row(rows[i]).array().square();

    TrackedStates out;
    out.energies.resize(t);
    out.vectors.resize(d, t);
    out.eigen_index.assign(t, -1);

    std::vector<bool> target_done(t, false), eig_used(d, false);
    for (int step = 0; step < t; ++step) {
        int bi = -1, bk = -1;
        double best = -1.0;
        for (int i = 0; i < t; ++i) {
            if (target_done[i]) continue;
            for (int k = 0; k < d; ++k) {
                if (eig_used[k]) continue;
                if (overlap(i, k) > best) {
                    best = overlap(i, k);
                    bi = i;
                    bk = k;
                }
            }
        }
        target_done[bi] = true;
        eig_used[bk] = true;
        out.eigen_index[bi] = bk;
        out.energies(bi) = w(bk);
        // fix the sign so the bare component is positive
        out.vectors.col(bi) = v.col(bk) * (v(rows[bi], bk) < 0.0 ? -1.0 : 1.0);
    }
    return out;
}

double zz_coefficient(const CoupledModeModel& model, int qubit_a, int qubit_b,
                      const SpectrumOptions& opt) {
    const Basis basis = spectroscopy_basis(model, opt);
    const Eigen::MatrixXd h = spectroscopy_hamiltonian(model, basis, opt);
    const int m = basis.n_modes();

    Label both(m, 0);
    both[qubit_a] = 1;
    both[qubit_b] = 1;
    const std::vector<Label> targets = {Label(m, 0), unit_label(m, qubit_a),
                                        unit_label(m, qubit_b), both};
    const TrackedStates ts = eigen_tracked(h, basis, targets);
    return ts.energies(3) - ts.energies(1) - ts.energies(2) + ts.energies(0);
}

double exchange_splitting(const CoupledModeModel& model, int qubit_a, int qubit_b,
                          const SpectrumOptions& opt) {
    const Basis basis = spectroscopy_basis(model, opt);
    const Eigen::MatrixXd h = spectroscopy_hamiltonian(model, basis, opt);
    const int m = basis.n_modes();
    const std::vector<Label> targets = {unit_label(m, qubit_a), unit_label(m, qubit_b)};
    const TrackedStates ts = eigen_tracked(h, basis, targets);
    return std::abs(ts.energies(0) - ts.energies(1));
}

double exchange_coupling(const CoupledModeModel& model, int qubit_a, int qubit_b,
                         double omega_b_lo, double omega_b_hi,
                         const SpectrumOptions& opt) {
    if (omega_b_hi <= omega_b_lo)
        throw std::invalid_argument("empty frequency range for exchange_coupling");

    double lo = omega_b_lo, hi = omega_b_hi;
    double best_w = lo, best = 0.0;
    for (int round = 0; round < 3; ++round) {
        const int pts = round == 0 ? 81 : 21;
        best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < pts; ++i) {
            const double w = lo + (hi - lo) * i / (pts - 1);
            const double s = exchange_splitting(model.with_mode_frequency(qubit_b, w),
                                                qubit_a, qubit_b, opt);
            if (s < best) {
                best = s;
                best_w = w;
            }
        }
        const double span = (hi - lo) / (pts - 1);
        lo = best_w - span;
        hi = best_w + span;
    }
    return 0.5 * best;
}

double cz_gap(const CoupledModeModel& model, int qubit_a, int qubit_b,
              const SpectrumOptions& opt) {
    const Basis basis = spectroscopy_basis(model, opt);
    const Eigen::MatrixXd h = spectroscopy_hamiltonian(model, basis, opt);
    const int m = basis.n_modes();
    Label eleven(m, 0);
    eleven[qubit_a] = 1;
    eleven[qubit_b] = 1;
    const std::vector<Label> targets = {eleven, unit_label(m, qubit_b, 2)};
    const TrackedStates ts = eigen_tracked(h, basis, targets);
    return std::abs(ts.energies(0) - ts.energies(1));
}

CzResonance cz_resonance(const CoupledModeModel& model, int qubit_a, int qubit_b,
                         double omega_b_lo, double omega_b_hi,
                         const SpectrumOptions& opt) {
    if (omega_b_hi <= omega_b_lo)
        throw std::invalid_argument("empty frequency range for cz_resonance");

    double lo = omega_b_lo, hi = omega_b_hi;
    double best_w = lo, best_gap = 0.0;
    for (int round = 0; round < 3; ++round) {
        const int pts = round == 0 ? 81 : 21;
        best_gap = std::numeric_limits<double>::infinity();
        for (int i = 0; i < pts; ++i) {
            const double w = lo + (hi - lo) * i / (pts - 1);
            const double gap = cz_gap(model.with_mode_frequency(qubit_b, w),
                                      qubit_a, qubit_b, opt);
            if (gap < best_gap) {
                best_gap = gap;
                best_w = w;
            }
        }
        const double span = (hi - lo) / (pts - 1);
        lo = best_w - span;
        hi = best_w + span;
    }
    return {best_w, best_gap};
}

double cz_coupling(const CoupledModeModel& model, int qubit_a, int qubit_b,
                   double omega_b_lo, double omega_b_hi,
                   const SpectrumOptions& opt) {
    return cz_resonance(model, qubit_a, qubit_b, omega_b_lo, omega_b_hi, opt).gap;
}

Eigen::MatrixXd four_qubit_selectivity(const CoupledModeModel& model,
                                       const SpectrumOptions& opt) {
    const std::vector<int> qs = qubit_modes(model);
    const int nq = static_cast<int>(qs.size());
    if (nq < 2) throw std::invalid_argument("selectivity needs at least two qubits");

    const Basis basis = spectroscopy_basis(model, opt);
    const Eigen::MatrixXd h = spectroscopy_hamiltonian(model, basis, opt);
    const int m = basis.n_modes();

    // vacuum, all singles, all pairs, assigned together in one bijection
    std::vector<Label> targets;
    targets.push_back(Label(m, 0));
    for (int i = 0; i < nq; ++i) targets.push_back(unit_label(m, qs[i]));
    std::vector<std::pair<int, int>> pair_at;
    for (int i = 0; i < nq; ++i) {
        for (int j = i + 1; j < nq; ++j) {
            Label l(m, 0);
            l[qs[i]] = 1;
            l[qs[j]] = 1;
            targets.push_back(l);
            pair_at.emplace_back(i, j);
        }
    }
    const TrackedStates ts = eigen_tracked(h, basis, targets);

    Eigen::MatrixXd zeta = Eigen::MatrixXd::Zero(nq, nq);
    const double e0 = ts.energies(0);
    for (size_t p = 0; p < pair_at.size(); ++p) {
        const auto [i, j] = pair_at[p];
        const double z = ts.energies(1 + nq + static_cast<int>(p)) -
                         ts.energies(1 + i) - ts.energies(1 + j) + e0;
        zeta(i, j) = zeta(j, i) = z;
    }
    return zeta;
}

} // namespace cmr
