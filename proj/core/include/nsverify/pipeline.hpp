#pragma once

#include <optional>
#include <string>

#include "nsverify/config.hpp"
#include "nsverify/verifier.hpp"

namespace nsverify {

/// Exit-code contract: 0 = certified some horizon > 0, 2 = pipeline completed
/// but nothing certified, 1 = pipeline failure (unsolvable step, bad config).
struct PipelineResult {
    int exit_code = 1;
    std::string report_json;
    std::optional<VerificationReport> report;
    std::string error;
    int failed_step = -1;
};

/// solve -> estimate -> certify. With certify_stage = false the certification
/// pass is skipped (ledgers and checkpoints are still written).
PipelineResult run_pipeline(const RunConfig& config, bool certify_stage = true);

/// Materialised data functions for a config (also used by the checkpoint
/// loader, which must re-create the forcing).
Forcing make_forcing(const RunConfig& config);

}  // namespace nsverify
