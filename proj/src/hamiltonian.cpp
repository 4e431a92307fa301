#include "cmr/hamiltonian.hpp"
#include "cmr/constants.hpp"

#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace cmr {

int CoupledModeModel::find_coupling(int a, int b) const {
    for (size_t i = 0; i < couplings.size(); ++i) {
        const Coupling& c = couplings[i];
        if ((c.a == a && c.b == b) || (c.a == b && c.b == a))
            return static_cast<int>(i);
    }
    return -1;
}

CoupledModeModel CoupledModeModel::with_mode_frequency(int mode, double omega_angular) const {
    CoupledModeModel m = *this;
    m.modes.at(mode).omega = omega_angular;
    return m;
}

CoupledModeModel build_model(const ChainSpec& chain, const ChainFrequencies& freqs,
                             const std::vector<double>& alpha_q_ghz,
                             const std::vector<double>& alpha_c_ghz) {
    const int nu = chain.n_units();
    if (static_cast<int>(alpha_q_ghz.size()) != nu ||
        static_cast<int>(alpha_c_ghz.size()) != nu)
        throw std::invalid_argument("anharmonicity list length does not match chain");

    const CouplingSet gs = coupling_strengths(chain, freqs);

    CoupledModeModel m;
    m.modes.resize(chain.n_modes());
    m.modes[resonator_node] = {ModeKind::resonator, two_pi * freqs.resonator, 0.0};
    for (int j = 0; j < nu; ++j) {
        m.modes[qubit_node(j)] = {ModeKind::qubit, two_pi * freqs.qubit[j],
                                  two_pi * alpha_q_ghz[j]};
        m.modes[coupler_node(j)] = {ModeKind::coupler, two_pi * freqs.coupler[j],
                                    two_pi * alpha_c_ghz[j]};
    }

    // k = g / sqrt(w_a w_b); with g and w both scaled by 2pi the stored k picks
    // up no extra factor relative to ordinary units
    auto add = [&](int a, int b, double g_ghz, double wa_ghz, double wb_ghz) {
        m.couplings.push_back({a, b, g_ghz / std::sqrt(wa_ghz * wb_ghz)});
    };
    for (int j = 0; j < nu; ++j) {
        add(qubit_node(j), coupler_node(j), gs.g_qc[j], freqs.qubit[j], freqs.coupler[j]);
        add(coupler_node(j), resonator_node, gs.g_cr[j], freqs.coupler[j], freqs.resonator);
        add(qubit_node(j), resonator_node, gs.g_qr[j], freqs.qubit[j], freqs.resonator);
    }
    for (int i = 0; i < nu; ++i)
        for (int j = i + 1; j < nu; ++j)
            add(coupler_node(i), coupler_node(j), gs.g_cc(i, j), freqs.coupler[i],
                freqs.coupler[j]);
    return m;
}

namespace {

void check_model(const CoupledModeModel& model, const Basis& basis) {
    if (static_cast<int>(model.modes.size()) != basis.n_modes())
        throw std::invalid_argument("model and basis mode counts differ");
}

void add_diagonal(const CoupledModeModel& model, const Basis& basis,
                  const std::vector<int>& idx, Eigen::MatrixXd& h) {
    for (size_t r = 0; r < idx.size(); ++r) {
        const Label& l = basis.label(idx[r]);
        double e = 0.0;
        for (size_t m = 0; m < l.size(); ++m) {
            const double n = l[m];
            e += model.modes[m].omega * n + 0.5 * model.modes[m].alpha * n * (n - 1.0);
        }
        h(r, r) = e;
    }
}

} // namespace

Eigen::MatrixXd build_hamiltonian(const CoupledModeModel& model, const Basis& basis,
                                  bool rwa) {
    check_model(model, basis);
    const int d = basis.dim();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);

    std::vector<int> all(d);
    for (int i = 0; i < d; ++i) all[i] = i;
    add_diagonal(model, basis, all, h);

    for (const Coupling& c : model.couplings) {
        const double g = model.g_of(c);
        for (int j = 0; j < d; ++j) {
            const Label& l = basis.label(j);
            // a'b: raise a, lower b
            if (l[c.b] > 0) {
                Label t = l;
                ++t[c.a];
                --t[c.b];
                const int i = basis.index(t);
                if (i >= 0) {
                    const double amp = g * std::sqrt((l[c.a] + 1.0) * l[c.b]);
                    h(i, j) += amp;
                    h(j, i) += amp;
                }
            }
            if (!rwa) {
                // a'b': raise both; the lowering pair is the transpose
                Label t = l;
                ++t[c.a];
                ++t[c.b];
                const int i = basis.index(t);
                if (i >= 0) {
                    const double amp = -g * std::sqrt((l[c.a] + 1.0) * (l[c.b] + 1.0));
                    h(i, j) += amp;
                    h(j, i) += amp;
                }
            }
        }
    }
    return h;
}

Eigen::MatrixXd build_block(const CoupledModeModel& model, const Basis& basis,
                            const std::vector<int>& idx) {
    check_model(model, basis);
    const int d = static_cast<int>(idx.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
    add_diagonal(model, basis, idx, h);

    // local position of each global basis index inside this block
    std::unordered_map<int, int> pos;
    pos.reserve(idx.size());
    for (int r = 0; r < d; ++r) pos[idx[r]] = r;

    for (const Coupling& c : model.couplings) {
        const double g = model.g_of(c);
        for (int r = 0; r < d; ++r) {
            const Label& l = basis.label(idx[r]);
            if (l[c.b] == 0) continue;
            Label t = l;
            ++t[c.a];
            --t[c.b];
            const int gi = basis.index(t);
            if (gi < 0) continue;
            auto it = pos.find(gi);
            if (it == pos.end()) continue;
            const double amp = g * std::sqrt((l[c.a] + 1.0) * l[c.b]);
            h(it->second, r) += amp;
            h(r, it->second) += amp;
        }
    }
    return h;
}

namespace {

[[noreturn]] void resonance_error(const std::string& a, const std::string& b) {
    std::ostringstream os;
    os << "effective model is singular: " << a << " and " << b
       << " are exactly resonant";
    throw std::domain_error(os.str());
}

std::string mode_name(const CoupledModeModel& model, int i) {
    int nth = 0;
    for (int m = 0; m <= i; ++m)
        if (model.modes[m].kind == model.modes[i].kind) ++nth;
    switch (model.modes[i].kind) {
        case ModeKind::qubit: return "qubit " + std::to_string(nth);
        case ModeKind::coupler: return "coupler " + std::to_string(nth);
        default: return "resonator";
    }
}

} // namespace

EffectiveModel effective_model(const CoupledModeModel& model) {
    int res = -1;
    std::vector<int> qubits, couplers;
    for (size_t i = 0; i < model.modes.size(); ++i) {
        switch (model.modes[i].kind) {
            case ModeKind::qubit: qubits.push_back(static_cast<int>(i)); break;
            case ModeKind::coupler: couplers.push_back(static_cast<int>(i)); break;
            case ModeKind::resonator: res = static_cast<int>(i); break;
        }
    }
    if (res < 0 || qubits.empty())
        throw std::invalid_argument("effective model needs a resonator and at least one qubit");

    const double wr = model.modes[res].omega;

    EffectiveModel em;
    em.omega_r = wr;
    for (int c : couplers) {
        const int icr = model.find_coupling(c, res);
        if (icr < 0) continue;
        const double drc = wr - model.modes[c].omega;
        if (drc == 0.0) resonance_error("resonator", mode_name(model, c));
        const double gcr = model.g_of(icr);
        em.omega_r += gcr * gcr / drc;
    }

    const int nq = static_cast<int>(qubits.size());
    em.units.resize(nq);
    for (int qi = 0; qi < nq; ++qi) {
        const int q = qubits[qi];
        const double wq = model.modes[q].omega;

        // the coupler this qubit hangs off
        int c = -1;
        for (int cand : couplers)
            if (model.find_coupling(q, cand) >= 0) { c = cand; break; }
        if (c < 0) throw std::invalid_argument("qubit without a coupler in effective model");

        const double wc = model.modes[c].omega;
        const double dqc = wq - wc;
        const double drc = wr - wc;
        if (dqc == 0.0) resonance_error(mode_name(model, q), mode_name(model, c));
        if (drc == 0.0) resonance_error("resonator", mode_name(model, c));

        const double gqc = model.g_of(model.find_coupling(q, c));
        const double gcr = model.g_of(model.find_coupling(c, res));
        const int iqr = model.find_coupling(q, res);
        const double gqr = iqr >= 0 ? model.g_of(iqr) : 0.0;

        EffectiveUnit& u = em.units[qi];
        u.delta_qc = dqc;
        u.omega_q = wq + gqc * gqc / dqc;
        // virtual exchange through the coupler plus the direct term
        const double inv_delta = 0.5 * (1.0 / dqc + 1.0 / drc);
        u.g_qr = gqc * gcr * inv_delta + gqr;
    }

    em.g_qq = Eigen::MatrixXd::Zero(nq, nq);
    for (int i = 0; i < nq; ++i) {
        for (int j = i + 1; j < nq; ++j) {
            const double di = em.units[i].omega_q - em.omega_r;
            const double dj = em.units[j].omega_q - em.omega_r;
            if (di == 0.0) resonance_error(mode_name(model, qubits[i]), "resonator");
            if (dj == 0.0) resonance_error(mode_name(model, qubits[j]), "resonator");
            const double g = 0.5 * em.units[i].g_qr * em.units[j].g_qr *
                             (1.0 / di + 1.0 / dj);
            em.g_qq(i, j) = em.g_qq(j, i) = g;
        }
    }
    return em;
}

} // namespace cmr
