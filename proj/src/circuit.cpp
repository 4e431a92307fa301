#include "cmr/circuit.hpp"
#include "cmr/constants.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cmr {

Eigen::MatrixXd build_capacitance_matrix(const ChainSpec& chain) {
    const int n = chain.n_modes();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
    c(resonator_node, resonator_node) = chain.c_r;

    for (int j = 0; j < chain.n_units(); ++j) {
        const UnitSpec& u = chain.units[j];
        const int q = qubit_node(j);
        const int k = coupler_node(j);

        c(q, q) = u.c_q + u.c_qc + u.c_qr;
        c(k, k) = u.c_c + u.c_qc + u.c_cr;
        c(resonator_node, resonator_node) += u.a * u.a * (u.c_qr + u.c_cr);

        c(q, k) = c(k, q) = -u.c_qc;
        c(k, resonator_node) = c(resonator_node, k) = -u.a * u.c_cr;
        c(q, resonator_node) = c(resonator_node, q) = -u.a * u.c_qr;
    }
    return c;
}

Eigen::MatrixXd analytic_inverse(const ChainSpec& chain, bool use_node_totals) {
    const int n = chain.n_modes();
    const Eigen::MatrixXd full = build_capacitance_matrix(chain);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);

    auto cap = [&](int node, double bare) {
        return use_node_totals ? full(node, node) : bare;
    };
    const double cr = cap(resonator_node, chain.c_r);

    for (int i = 0; i < n; ++i) d(i, i) = 1.0 / full(i, i);
    if (!use_node_totals) {
        d(resonator_node, resonator_node) = 1.0 / chain.c_r;
        for (int j = 0; j < chain.n_units(); ++j) {
            d(qubit_node(j), qubit_node(j)) = 1.0 / chain.units[j].c_q;
            d(coupler_node(j), coupler_node(j)) = 1.0 / chain.units[j].c_c;
        }
    }

    for (int j = 0; j < chain.n_units(); ++j) {
        const UnitSpec& u = chain.units[j];
        const int q = qubit_node(j);
        const int k = coupler_node(j);
        const double cq = cap(q, u.c_q);
        const double cc = cap(k, u.c_c);

        d(q, k) = d(k, q) = u.c_qc / (cq * cc);
        d(k, resonator_node) = d(resonator_node, k) = u.a * u.c_cr / (cc * cr);
        d(q, resonator_node) = d(resonator_node, q) =
            u.a * (u.c_qr * cc + u.c_qc * u.c_cr) / (cq * cc * cr);
    }

    for (int i = 0; i < chain.n_units(); ++i) {
        for (int j = i + 1; j < chain.n_units(); ++j) {
            const UnitSpec& ui = chain.units[i];
            const UnitSpec& uj = chain.units[j];
            const double cci = cap(coupler_node(i), ui.c_c);
            const double ccj = cap(coupler_node(j), uj.c_c);
            const double v = ui.a * uj.a * ui.c_cr * uj.c_cr / (cci * ccj * cr);
            d(coupler_node(i), coupler_node(j)) = v;
            d(coupler_node(j), coupler_node(i)) = v;
        }
    }
    return d;
}

double Transmon::omega() const {
    return std::sqrt(8.0 * ej * ec) - ec;
}

double Transmon::cap_fF() const {
    return cap_fF_from_ec_ghz(ec);
}

Transmon transmon_from_target(double omega_ghz, double alpha_ghz) {
    if (alpha_ghz >= 0.0)
        throw std::invalid_argument("transmon anharmonicity must be negative");
    if (omega_ghz <= 0.0)
        throw std::invalid_argument("transmon frequency must be positive");
    const double ec = -alpha_ghz;
    const double ej = (omega_ghz + ec) * (omega_ghz + ec) / (8.0 * ec);
    return {ej, ec};
}

double resonator_capacitance(double f_ghz, double z0_ohm) {
    if (f_ghz <= 0.0 || z0_ohm <= 0.0)
        throw std::invalid_argument("resonator frequency and impedance must be positive");
    return 1e6 / (4.0 * f_ghz * z0_ohm);
}

CouplingSet coupling_strengths(const ChainSpec& chain, const ChainFrequencies& freqs,
                               bool use_node_totals) {
    const int nu = chain.n_units();
    if (static_cast<int>(freqs.qubit.size()) != nu ||
        static_cast<int>(freqs.coupler.size()) != nu)
        throw std::invalid_argument("frequency list length does not match chain");

    const Eigen::MatrixXd full = build_capacitance_matrix(chain);
    auto cap = [&](int node, double bare) {
        return use_node_totals ? full(node, node) : bare;
    };
    const double cr = cap(resonator_node, chain.c_r);
    const double wr = freqs.resonator;

    CouplingSet out;
    out.g_qc.resize(nu);
    out.g_cr.resize(nu);
    out.g_qr.resize(nu);
    out.g_cc = Eigen::MatrixXd::Zero(nu, nu);

    for (int j = 0; j < nu; ++j) {
        const UnitSpec& u = chain.units[j];
        const double cq = cap(qubit_node(j), u.c_q);
        const double cc = cap(coupler_node(j), u.c_c);
        const double wq = freqs.qubit[j];
        const double wc = freqs.coupler[j];

        out.g_qc[j] = 0.5 * u.c_qc / std::sqrt(cq * cc) * std::sqrt(wq * wc);
        out.g_cr[j] = 0.5 * u.a * u.c_cr / std::sqrt(cc * cr) * std::sqrt(wc * wr);
        out.g_qr[j] = 0.5 * u.a * (u.c_qr * cc + u.c_qc * u.c_cr) /
                      (cc * std::sqrt(cq * cr)) * std::sqrt(wq * wr);
    }

    for (int i = 0; i < nu; ++i) {
        for (int j = i + 1; j < nu; ++j) {
            const UnitSpec& ui = chain.units[i];
            const UnitSpec& uj = chain.units[j];
            const double cci = cap(coupler_node(i), ui.c_c);
            const double ccj = cap(coupler_node(j), uj.c_c);
            const double g = 0.5 * ui.a * uj.a * ui.c_cr * uj.c_cr /
                             (std::sqrt(cci * ccj) * cr) *
                             std::sqrt(freqs.coupler[i] * freqs.coupler[j]);
            out.g_cc(i, j) = out.g_cc(j, i) = g;
        }
    }
    return out;
}

std::vector<std::string> validate_hierarchy(const ChainSpec& chain, double ratio_limit) {
    std::vector<std::string> warnings;
    auto check = [&](double c_off, double ca, double cb, int unit, const char* name) {
        const double r = c_off / std::sqrt(ca * cb);
        if (r > ratio_limit) {
            std::ostringstream os;
            os << "unit " << unit + 1 << ": " << name << " ratio " << r
               << " exceeds " << ratio_limit;
            warnings.push_back(os.str());
        }
    };
    for (int j = 0; j < chain.n_units(); ++j) {
        const UnitSpec& u = chain.units[j];
        check(u.c_qc, u.c_q, u.c_c, j, "C_qc/sqrt(C_q C_c)");
        check(u.c_cr, u.c_c, chain.c_r, j, "C_cr/sqrt(C_c C_r)");
        check(u.c_qr, u.c_q, chain.c_r, j, "C_qr/sqrt(C_q C_r)");
    }
    return warnings;
}

} // namespace cmr
