#pragma once

#include "cmr/circuit.hpp"
#include "cmr/hamiltonian.hpp"
#include "cmr/pulse.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

// Run configuration: JSON in, CSV plus a JSON manifest out. All file-facing
// quantities are ordinary GHz, fF, ns.

namespace cmr {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DeviceConfig {
    ChainSpec chain;
    ChainFrequencies freqs;               // idle frequencies [GHz]
    std::vector<double> alpha_q, alpha_c; // [GHz]

    CoupledModeModel model() const;
    int n_units() const { return chain.n_units(); }
};

struct RunConfig {
    DeviceConfig device;
    std::string kind;                 // experiment kind
    nlohmann::json experiment;        // kind-specific payload
    nlohmann::json raw;               // whole config for the manifest
    PropagateOptions prop;
    int threads = 1;
};

// Parse and semantically validate; throws ConfigError with a message naming
// the offending field. The "preset" key fills in the device before explicit
// fields are applied on top.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const nlohmann::json& j);

// The preset device tables ("paper-2q", "paper-4q").
nlohmann::json preset_device(const std::string& name);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    int rows_written() const { return rows_; }

private:
    std::ofstream out_;
    size_t n_cols_;
    int rows_ = 0;
};

// Sidecar describing a finished run; deterministic (no clocks, no paths
// beyond what the caller passes).
void write_manifest(const std::string& path, const RunConfig& cfg,
                    const std::vector<std::string>& outputs, int rows);

} // namespace cmr
