#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "factfuse/engine.hpp"

namespace factfuse {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest-exact textual form is not used; doubles are written with 17
// significant digits so that save -> load round-trips bit-exactly.
std::string format_double(double value);

// Instance files: line-oriented text, one `instance <id> ... end` block per
// instance. A prior is either an explicit sparse joint (`prior joint <m>`
// followed by `world <bits> <prob>` lines) or independent per-fact marginals
// (`prior marginals independent <n>` followed by `marginal <i> <p>` lines).
// World strings put fact 0 in the leftmost character. In strict mode,
// instances whose joint is off from 1 by at most the sum tolerance are
// renormalized and anything worse is rejected; with strict=false the
// distributions are returned as written so they can be inspected.
std::vector<InstanceState> load_instances(const std::string& path,
                                          bool strict = true);
void save_instances(const std::string& path,
                    std::span<const InstanceState> instances);

struct RunHeader {
  std::string selector = "greedy";
  std::size_t k = 1;
  std::size_t budget = 0;
  double pc = 0.8;
  std::uint64_t seed = 0;
  bool prune = false;
  bool preprocess = false;
  std::vector<std::uint32_t> foi;  // empty = whole fact set / not used
};

struct LoadedRunLog {
  RunHeader header;
  std::vector<InstanceRunLog> logs;
};

// Run logs record the full configuration plus every round's
// (fact, judgment) pairs, evidence, utility and F1, so a run can be
// re-executed answer-for-answer without the RNG.
void write_runlog(const std::string& path, const RunHeader& header,
                  std::span<const InstanceRunLog> logs);
LoadedRunLog load_runlog(const std::string& path);
ReplaySource replay_from(const LoadedRunLog& log);

// CSV schema: selector,k,pc,seed,instance,round,tasks_cum,utility,f1
// One row per instance per executed round, then one aggregate row per round
// with the reserved instance id ALL (summed tasks/utility, pooled F1).
std::string csv_header();
std::string csv_text(const RunHeader& header, const RunResult& result);
void write_csv(const std::string& path, const RunHeader& header,
               const RunResult& result);

// Rebuilds the same CSV rows from recorded run logs (instances that never
// executed a round leave no log and therefore no rows).
std::string report_csv(std::span<const LoadedRunLog> runs);

}  // namespace factfuse
