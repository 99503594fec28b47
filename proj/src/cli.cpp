#include "factfuse/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "factfuse/engine.hpp"
#include "factfuse/io.hpp"

namespace factfuse {

namespace {

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "error: parse: " << e.what() << "\n";
  } catch (const std::logic_error& e) {
    err << "error: config: " << e.what() << "\n";
  } catch (const std::runtime_error& e) {
    err << "error: io: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
  }
  return 1;
}

std::optional<FoiQuery> make_foi(const CliOptions& options) {
  if (options.foi.empty()) return std::nullopt;
  FoiQuery query;
  query.facts.reserve(options.foi.size());
  for (std::uint32_t id : options.foi) query.facts.push_back(FactId{id});
  return query;
}

std::string join_ids(std::span<const FactId> ids) {
  if (ids.empty()) return "(none)";
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i)
    out += (i ? "," : "") + std::to_string(ids[i].value);
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

struct SimOutcome {
  RunHeader header;
  RunResult result;
};

SimOutcome run_simulation(const CliOptions& options) {
  std::vector<InstanceState> states =
      load_instances(options.instances_path, /*strict=*/true);
  RoundConfig config;
  config.selector = selector_from_name(options.selector);
  config.k = options.k;
  config.budget = options.budget;
  config.model = CrowdModel(options.pc);
  config.seed = options.seed;
  config.options = SelectionOptions{options.prune, options.preprocess};
  config.foi = make_foi(options);
  if (config.selector == SelectorKind::Query && !config.foi)
    throw std::invalid_argument("the query selector requires --foi");

  RunResult result;
  if (!options.replay_path.empty()) {
    ReplaySource source = replay_from(load_runlog(options.replay_path));
    result = run_budget(states, config, source);
  } else {
    SimulatedCrowd source(options.seed, config.model);
    result = run_budget(states, config, source);
  }
  RunHeader header;
  header.selector = options.selector;
  header.k = options.k;
  header.budget = options.budget;
  header.pc = options.pc;
  header.seed = options.seed;
  header.prune = options.prune;
  header.preprocess = options.preprocess;
  header.foi = options.foi;
  return SimOutcome{std::move(header), std::move(result)};
}

void print_summary(const RunResult& result, std::ostream& out) {
  out << "instances " << result.logs.size() << "\n";
  if (result.metrics.trajectory.empty()) {
    out << "rounds 0\n";
    return;
  }
  const MetricsPoint& last = result.metrics.trajectory.back();
  out << "rounds " << result.metrics.trajectory.size() << "\n";
  out << "tasks " << last.tasks_cum << "\n";
  out << "utility_sum " << format_double(last.utility_sum) << "\n";
  out << "f1_pooled "
      << (last.f1_pooled ? format_double(*last.f1_pooled) : "nan") << "\n";
}

}  // namespace

int cmd_validate(const CliOptions& options, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&]() -> int {
    const std::vector<InstanceState> instances =
        load_instances(options.instances_path, /*strict=*/false);
    std::size_t bad = 0;
    for (const InstanceState& inst : instances) {
      if (auto violation = validate(inst.joint)) {
        ++bad;
        out << inst.id << ": " << violation->invariant
            << " violation (magnitude " << format_double(violation->magnitude)
            << "): " << violation->detail << "\n";
      } else {
        out << inst.id << ": ok (facts=" << inst.joint.fact_count()
            << ", worlds=" << inst.joint.entries().size()
            << ", entropy=" << format_double(entropy(inst.joint.normalized()))
            << " bits)\n";
      }
    }
    out << (instances.size() - bad) << "/" << instances.size()
        << " instances valid\n";
    return bad == 0 ? 0 : 1;
  });
}

int cmd_select(const CliOptions& options, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&]() -> int {
    const std::vector<InstanceState> instances =
        load_instances(options.instances_path, /*strict=*/true);
    const CrowdModel model(options.pc);
    const SelectorKind kind = selector_from_name(options.selector);
    const std::optional<FoiQuery> foi = make_foi(options);
    if (kind == SelectorKind::Query && !foi)
      throw std::invalid_argument("the query selector requires --foi");

    for (const InstanceState& inst : instances) {
      SelectionResult result;
      switch (kind) {
        case SelectorKind::Greedy:
          result = select_greedy(inst.joint, options.k, model,
                                 SelectionOptions{options.prune,
                                                  options.preprocess});
          break;
        case SelectorKind::Opt:
          result = select_opt(inst.joint, options.k, model);
          break;
        case SelectorKind::Query:
          result = select_greedy_query(inst.joint, *foi, options.k, model);
          break;
        case SelectorKind::Random: {
          SplitRng rng(options.seed, inst.id + "/select");
          const std::size_t count =
              std::min(options.k, inst.joint.fact_count());
          result.tasks = random_selection(inst.joint.fact_count(), count, rng);
          result.task_entropy_bits =
              task_entropy(inst.joint, result.tasks, model);
          result.k_star = result.tasks.size();
          break;
        }
      }
      out << "instance " << inst.id << "\n";
      out << "tasks " << join_ids(result.tasks.facts()) << "\n";
      out << "entropy " << format_double(result.task_entropy_bits)
          << " bits\n";
      out << "k_star " << result.k_star << "\n";
      if (!result.gains.empty()) {
        out << "gains ";
        for (std::size_t i = 0; i < result.gains.size(); ++i)
          out << (i ? "," : "") << format_double(result.gains[i]);
        out << "\n";
      }
      if (kind == SelectorKind::Greedy)
        out << "pruned " << result.pruned_count << "\n";
    }
    return 0;
  });
}

int cmd_simulate(const CliOptions& options, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&]() -> int {
    SimOutcome outcome = run_simulation(options);
    write_runlog(options.out_path, outcome.header, outcome.result.logs);
    print_summary(outcome.result, out);
    out << "runlog " << options.out_path << "\n";
    return 0;
  });
}

int cmd_run(const CliOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    SimOutcome outcome = run_simulation(options);
    const std::string log_path = options.out_path + ".log";
    write_csv(options.out_path, outcome.header, outcome.result);
    write_runlog(log_path, outcome.header, outcome.result.logs);
    print_summary(outcome.result, out);
    out << "csv " << options.out_path << "\n";
    out << "runlog " << log_path << "\n";
    return 0;
  });
}

int cmd_report(const CliOptions& options, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&]() -> int {
    namespace fs = std::filesystem;
    std::vector<std::string> paths;
    const fs::path root(options.replay_path);
    if (fs::is_directory(root)) {
      for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_regular_file() && entry.path().extension() == ".log")
          paths.push_back(entry.path().string());
      std::sort(paths.begin(), paths.end());
    } else if (fs::is_regular_file(root)) {
      paths.push_back(root.string());
    } else {
      throw std::runtime_error("no such file or directory: " +
                               options.replay_path);
    }
    std::vector<LoadedRunLog> runs;
    runs.reserve(paths.size());
    for (const std::string& path : paths) runs.push_back(load_runlog(path));
    const std::string csv = report_csv(runs);
    if (options.out_path.empty()) {
      out << csv;
    } else {
      write_text_file(options.out_path, csv);
      out << "csv " << options.out_path << "\n";
    }
    return 0;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"entropy-guided crowdsourcing over uncertain fact bases"};
  app.require_subcommand(1);
  CliOptions options;

  auto add_selection_options = [&options](CLI::App* cmd, bool with_budget) {
    cmd->add_option("--instances", options.instances_path,
                    "instance file (see README for the format)")
        ->required();
    cmd->add_option("--selector", options.selector,
                    "greedy | opt | query | random")
        ->capture_default_str();
    cmd->add_option("--k", options.k, "max tasks per round")
        ->capture_default_str();
    if (with_budget)
      cmd->add_option("--budget", options.budget,
                      "total task budget per instance")
          ->capture_default_str();
    cmd->add_option("--pc", options.pc, "crowd accuracy in [0.5, 1]")
        ->capture_default_str();
    cmd->add_option("--seed", options.seed, "master random seed")
        ->capture_default_str();
    cmd->add_flag("--prune", options.prune, "skip provably dominated tasks");
    cmd->add_flag("--preprocess", options.preprocess,
                  "use the precomputed answer table");
    cmd->add_option("--foi", options.foi,
                    "facts of interest, comma separated ids")
        ->delimiter(',');
  };

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "check an instance file");
  validate_cmd
      ->add_option("--instances", options.instances_path, "instance file")
      ->required();

  CLI::App* select_cmd = app.add_subcommand(
      "select", "one-shot task selection for every instance");
  add_selection_options(select_cmd, /*with_budget=*/false);

  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "budgeted multi-round simulation, writes a run log");
  add_selection_options(simulate_cmd, /*with_budget=*/true);
  simulate_cmd->add_option("--out", options.out_path, "run log output path")
      ->required();
  simulate_cmd->add_option("--replay", options.replay_path,
                           "replay answers from an existing run log");

  CLI::App* run_cmd = app.add_subcommand(
      "run", "simulate and write the metrics CSV (run log goes to <out>.log)");
  add_selection_options(run_cmd, /*with_budget=*/true);
  run_cmd->add_option("--out", options.out_path, "CSV output path")
      ->required();
  run_cmd->add_option("--replay", options.replay_path,
                      "replay answers from an existing run log");

  CLI::App* report_cmd = app.add_subcommand(
      "report", "rebuild the metrics CSV from recorded run logs");
  report_cmd
      ->add_option("--replay", options.replay_path,
                   "run log file, or directory of *.log files")
      ->required();
  report_cmd->add_option("--out", options.out_path,
                         "CSV output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: config: " << e.what() << "\n";
    return 1;
  }

  if (app.got_subcommand(validate_cmd)) return cmd_validate(options, out, err);
  if (app.got_subcommand(select_cmd)) return cmd_select(options, out, err);
  if (app.got_subcommand(simulate_cmd)) return cmd_simulate(options, out, err);
  if (app.got_subcommand(run_cmd)) return cmd_run(options, out, err);
  if (app.got_subcommand(report_cmd)) return cmd_report(options, out, err);
  err << "error: internal: no subcommand dispatched\n";
  return 1;
}

}  // namespace factfuse
