#pragma once

#include "techmap/config.hpp"
#include "techmap/error.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace techmap::pipeline {

/// Stage order; each writes into <output_dir>/<name>/ plus a manifest.json.
const std::vector<std::string>& stage_names();

struct StageResult {
    std::string stage;
    std::vector<std::string> outputs; // relative to output_dir
    Diagnostics diagnostics;
};

StageResult run_ingest(const config::PipelineConfig& c);
StageResult run_extract(const config::PipelineConfig& c);
StageResult run_build(const config::PipelineConfig& c);
StageResult run_analyze(const config::PipelineConfig& c);
StageResult run_layout(const config::PipelineConfig& c);
StageResult run_export(const config::PipelineConfig& c);

StageResult run_stage(const std::string& name, const config::PipelineConfig& c);

/// All stages in order; the first failure propagates.
std::vector<StageResult> run_pipeline(const config::PipelineConfig& c);

/// Prints the analysis summary. Throws StageError without analysis output.
void run_report(const config::PipelineConfig& c, std::ostream& out);

/// Checks every manifest under output_dir: recorded output hashes against the
/// files, and recorded input hashes against the upstream files. Returns one
/// message per mismatch; empty means the chain is intact.
std::vector<std::string> verify_manifests(const std::filesystem::path& output_dir);

/// Exit code for an exception: 1 config/usage/stage, 2 data, 3 numerical.
int exit_code(const std::exception& e);

} // namespace techmap::pipeline
