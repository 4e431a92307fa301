#include "cmr/hilbert.hpp"

#include <stdexcept>

namespace cmr {

namespace {

std::uint64_t pack(const Label& l) {
    // 4 bits per mode is plenty for the truncations used here
    std::uint64_t key = 0;
    for (int n : l) key = (key << 4) | static_cast<std::uint64_t>(n & 0xf);
    return key;
}

} // namespace

void Basis::finalize() {
    totals_.resize(labels_.size());
    index_.reserve(labels_.size());
    int max_total = 0;
    for (size_t i = 0; i < labels_.size(); ++i) {
        int t = 0;
        for (int n : labels_[i]) t += n;
        totals_[i] = t;
        max_total = std::max(max_total, t);
        index_[pack(labels_[i])] = static_cast<int>(i);
    }
    blocks_.assign(max_total + 1, {});
    for (size_t i = 0; i < labels_.size(); ++i)
        blocks_[totals_[i]].push_back(static_cast<int>(i));
}

Basis Basis::build(const BasisFilter& filter) {
    if (filter.levels.empty())
        throw std::invalid_argument("basis needs at least one mode");
    for (int l : filter.levels)
        if (l < 1 || l > 16)
            throw std::invalid_argument("per-mode levels must be in 1..16");

    Basis b;
    b.levels_ = filter.levels;
    const int m = b.n_modes();

    std::vector<bool> capped(m, false);
    for (int i : filter.capped_modes) {
        if (i < 0 || i >= m) throw std::invalid_argument("capped mode index out of range");
        capped[i] = true;
    }

    Label cur(m, 0);
    while (true) {
        int total = 0, capped_total = 0;
        for (int i = 0; i < m; ++i) {
            total += cur[i];
            if (capped[i]) capped_total += cur[i];
        }
        bool keep = true;
        if (filter.total_max && total > *filter.total_max) keep = false;
        if (filter.total_exact && total != *filter.total_exact) keep = false;
        if (filter.capped_total_max && capped_total > *filter.capped_total_max) keep = false;
        if (keep) b.labels_.push_back(cur);

        // odometer increment, mode 0 most significant
        int i = m - 1;
        while (i >= 0 && cur[i] == filter.levels[i] - 1) {
            cur[i] = 0;
            --i;
        }
        if (i < 0) break;
        ++cur[i];
    }

    if (b.labels_.empty())
        throw std::invalid_argument("basis filter admits no states");
    b.finalize();
    return b;
}

Basis Basis::product(const std::vector<int>& levels) {
    BasisFilter f;
    f.levels = levels;
    return build(f);
}

int Basis::index(const Label& l) const {
    if (static_cast<int>(l.size()) != n_modes()) return -1;
    auto it = index_.find(pack(l));
    return it == index_.end() ? -1 : it->second;
}

Eigen::MatrixXd ladder(const Basis& basis, int mode) {
    if (mode < 0 || mode >= basis.n_modes())
        throw std::invalid_argument("ladder mode index out of range");
    const int d = basis.dim();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j < d; ++j) {
        const Label& l = basis.label(j);
        if (l[mode] == 0) continue;
        Label down = l;
        --down[mode];
        const int i = basis.index(down);
        if (i >= 0) a(i, j) = std::sqrt(static_cast<double>(l[mode]));
    }
    return a;
}

Eigen::VectorXd number_diag(const Basis& basis, int mode) {
    if (mode < 0 || mode >= basis.n_modes())
        throw std::invalid_argument("number mode index out of range");
    Eigen::VectorXd n(basis.dim());
    for (int i = 0; i < basis.dim(); ++i) n(i) = basis.label(i)[mode];
    return n;
}

Eigen::VectorXcd embed(const Eigen::VectorXcd& v, const Basis& from, const Basis& to) {
    if (v.size() != from.dim())
        throw std::invalid_argument("state dimension does not match source basis");
    if (from.n_modes() != to.n_modes())
        throw std::invalid_argument("bases span different mode sets");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(to.dim());
    for (int i = 0; i < from.dim(); ++i) {
        const int j = to.index(from.label(i));
        if (j >= 0) out(j) = v(i);
    }
    return out;
}

} // namespace cmr
