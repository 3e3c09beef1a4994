#pragma once

#include <string>
#include <vector>

#include "fbnn/config.hpp"
#include "fbnn/dataset.hpp"

namespace fbnn {

// Exit codes shared by the CLI commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitPairing = 3;

// Generate the dataset suite into <out_dir>/datasets plus a suite manifest.
int cmd_gen(const RunConfig& cfg);

// Fit every (dataset, model, t) unit: exact NNGP inference or NUTS over the
// (optionally low-pass filtered) BNN. Writes draws, diagnostics and metric
// rows per unit, then deterministic aggregates. Resumable via the progress
// ledger; failed units are recorded and skipped on aggregate.
int cmd_fit(const RunConfig& cfg);

// Aggregate metrics into the paired-delta CSV and, when enabled, the LDL and
// spectrum study CSVs.
int cmd_report(const RunConfig& cfg);

// Helpers shared with tests.
std::string unit_key(const std::string& dataset_id, const std::string& model, int width,
                     double t);
std::vector<std::string> read_suite_manifest(const std::string& out_dir);
std::vector<Dataset> load_suite(const RunConfig& cfg);

}  // namespace fbnn
