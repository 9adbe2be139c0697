#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "vote_audit/election_data.hpp"
#include "vote_audit/scenario.hpp"

namespace vote_audit::cli {

enum class OutputFormat { human, json };

enum ExitCode : int { kExitOk = 0, kExitDataError = 1, kExitUsage = 2 };

inline constexpr std::uint64_t kDefaultSeed = 20160522;
inline constexpr std::size_t kDefaultReplications = 10000;

struct RunConfiguration {
  std::string input_path;
  Variant variant = Variant::red_only;
  OutputFormat output_format = OutputFormat::human;
  std::optional<std::uint64_t> seed;
  std::optional<double> level;
  std::optional<Count> scenario_votes;
  std::optional<std::string> out_path;
  std::size_t replications = kDefaultReplications;
  unsigned threads = 1;
  WinRule win_rule = WinRule::half_margin_rounded_up;
  scenario::AllocationBase allocation_base = scenario::AllocationBase::mail_total;
};

// Each command writes its report to `out` and diagnostics to `err`, and
// returns the process exit status.
int cmd_analyze(const RunConfiguration& cfg, std::ostream& out, std::ostream& err);
int cmd_scenario(const RunConfiguration& cfg, std::ostream& out, std::ostream& err);
int cmd_plot(const RunConfiguration& cfg, std::ostream& out, std::ostream& err);
int cmd_calibrate(const RunConfiguration& cfg, std::ostream& out, std::ostream& err);
int cmd_validate(const RunConfiguration& cfg, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vote_audit::cli
