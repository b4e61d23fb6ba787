#pragma once

#include "towlab/harness/config.hpp"

#include <string>
#include <vector>

namespace towlab {

/// One verification metric. Every metric passes iff value <= tolerance,
/// and carries the oracle or structural identity it was checked against.
struct Metric {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string provenance;
};

struct NamedTable {
    std::string filename;
    std::string csv;
};

struct ExperimentReport {
    std::string name;
    InstanceConfig config;
    std::vector<Metric> metrics;
    std::vector<NamedTable> tables;
    bool all_pass() const;
};

const std::vector<std::string>& experiment_names();

/// Run one named experiment: heat_check, operator_limit, value_match,
/// barrier_check, comparison_check, convolution_check, m_convergence or
/// boundary_sensitivity. Unknown names raise ConfigError.
ExperimentReport run_experiment(const std::string& name,
                                const InstanceConfig& config);

/// Write metrics CSV, the experiment's value tables, and a JSON sidecar
/// with the full config echo and seed. File names are deterministic;
/// returns the manifest of paths written. Empty metric lists produce the
/// sidecar only.
std::vector<std::string> emit_tables(const ExperimentReport& report,
                                     const std::string& out_dir);

} // namespace towlab
