#pragma once

#include <ostream>

#include "stagpoint/config.hpp"

namespace stagpoint {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

// Each command writes its files into cfg.out_dir and a short summary to log.
int cmd_synth(const RunConfig& cfg, std::ostream& log);
int cmd_analyze(const RunConfig& cfg, std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::ostream& log);
int cmd_blowup(const RunConfig& cfg, std::ostream& log);
int cmd_classify(const RunConfig& cfg, std::ostream& log);

// Dispatch on cfg.command; maps configuration, parse and input errors to kExitConfig.
int run_command(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace stagpoint
