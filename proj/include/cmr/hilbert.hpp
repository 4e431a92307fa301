#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace cmr {

// Occupation-number label, one entry per mode.
using Label = std::vector<int>;

struct BasisFilter {
    std::vector<int> levels;              // per-mode dimension (occupations 0..L-1)
    std::optional<int> total_max;         // keep sum(n) <= total_max
    std::optional<int> total_exact;       // keep sum(n) == total_exact
    std::vector<int> capped_modes;        // modes sharing a joint occupation cap
    std::optional<int> capped_total_max;  // the joint cap for capped_modes
};

// Deterministic truncated Fock basis. Labels are enumerated in lexicographic
// order (mode 0 most significant) and then filtered; the surviving order is
// the basis order.
class Basis {
public:
    static Basis build(const BasisFilter& filter);
    static Basis product(const std::vector<int>& levels);

    int dim() const { return static_cast<int>(labels_.size()); }
    int n_modes() const { return static_cast<int>(levels_.size()); }
    const Label& label(int i) const { return labels_[i]; }
    int index(const Label& l) const;   // -1 when the label is not in the basis
    int total(int i) const { return totals_[i]; }
    const std::vector<int>& levels() const { return levels_; }

    // Basis indices grouped by total occupation, ascending. Within a group the
    // basis order is preserved.
    const std::vector<std::vector<int>>& blocks_by_total() const { return blocks_; }

private:
    std::vector<int> levels_;
    std::vector<Label> labels_;
    std::vector<int> totals_;
    std::vector<std::vector<int>> blocks_;
    std::unordered_map<std::uint64_t, int> index_;

    void finalize();
};

// Annihilation operator of one mode on this basis. Matrix elements whose
// source or target label falls outside the basis are dropped.
Eigen::MatrixXd ladder(const Basis& basis, int mode);

// Diagonal of the number operator of one mode.
Eigen::VectorXd number_diag(const Basis& basis, int mode);

// Re-express a state on a different basis over the same modes by matching
// labels; amplitudes whose label is absent from the target are dropped.
Eigen::VectorXcd embed(const Eigen::VectorXcd& v, const Basis& from, const Basis& to);

} // namespace cmr
