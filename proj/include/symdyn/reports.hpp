#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "symdyn/config.hpp"
#include "symdyn/speccheck.hpp"

namespace symdyn {

inline constexpr const char* kArtifactVersion = "0.1.0";

enum class ExitCode : int {
    Ok = 0,
    Internal = 1,
    Input = 2,
    Budget = 3,
    Inconsistent = 4,
    Fail = 5,
    PreconditionFail = 6,
};

struct RunOptions {
    std::string out_dir;  // empty: the config's output_dir
    int threads = 1;
};

struct CommandResult {
    ExitCode code = ExitCode::Ok;
    std::string status;  // ok, fail, precondition_fail, input_error, budget_exhausted, inconsistent, internal_error
    std::string message;
    std::string out_dir;
    std::vector<std::string> files;  // written payload files, manifest last
};

/// Runs one command: enumerate, pressure, gap-profile, verify (tag required),
/// equilibrium, anchors. Input errors write nothing; other outcomes write the
/// payloads produced so far plus manifest_<command>.json.
CommandResult run_command(const ExperimentConfig& cfg, const std::string& command, const std::string& tag = "",
                          const RunOptions& options = {});

std::vector<std::string> command_names();

/// %.17g, with inf and nan spelled out.
std::string format_real(double x);

nlohmann::ordered_json report_json(const BoundReport& rep, const std::string& digest);

ExitCode exit_code_for(BoundVerdict v);

} // namespace symdyn
