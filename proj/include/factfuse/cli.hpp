#pragma once

// Command-line front end.
//
// Subcommands:
//   validate  — parse an instance file and report per-instance status
//   select    — run one selection pass per instance and print the chosen
//               task set, its answer entropy, and the per-step gains
//   simulate  — run the budgeted multi-round loop against a simulated crowd
//               (or replayed answers) and write a run log
//   run       — simulate and emit the metrics CSV (plus a run log next to it)
//   report    — rebuild the metrics CSV from previously written run logs
//
// run_cli returns a process exit code: 0 on success, 1 on any failure.
// Errors are printed to `err` as a single line
//   error: <category>: <message>
// where category is one of parse, config, io, internal.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace factfuse {

struct CliOptions {
  std::string command;
  std::string instances_path;
  std::string selector = "greedy";
  std::size_t k = 1;
  std::size_t budget = 10;
  double pc = 0.8;
  std::uint64_t seed = 0;
  bool prune = false;
  bool preprocess = false;
  std::vector<std::uint32_t> foi;
  std::string out_path;
  std::string replay_path;
};

int cmd_validate(const CliOptions& options, std::ostream& out,
                 std::ostream& err);
int cmd_select(const CliOptions& options, std::ostream& out,
               std::ostream& err);
int cmd_simulate(const CliOptions& options, std::ostream& out,
                 std::ostream& err);
int cmd_run(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_report(const CliOptions& options, std::ostream& out,
               std::ostream& err);

// Parses argv and dispatches to the subcommand handlers above.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace factfuse
