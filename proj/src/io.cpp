#include "factfuse/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace factfuse {

namespace {

std::string loc(const std::string& path, std::size_t line_no) {
  return path + ":" + std::to_string(line_no) + ": ";
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream iss(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (iss >> tok) tokens.push_back(tok);
  return tokens;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

double parse_double(const std::string& tok, const std::string& where) {
  if (tok == "nan") return std::nan("");
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(where + "expected a number, got '" + tok + "'");
  return value;
}

std::uint64_t parse_uint(const std::string& tok, const std::string& where) {
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(where + "expected a non-negative integer, got '" + tok +
                     "'");
  return value;
}

struct Line {
  std::size_t no;
  std::string text;
};

std::vector<Line> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Line> lines;
  std::string text;
  std::size_t no = 0;
  while (std::getline(in, text)) {
    ++no;
    const std::size_t first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos || text[first] == '#') continue;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    lines.push_back({no, text});
  }
  return lines;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::vector<InstanceState> load_instances(const std::string& path,
                                          bool strict) {
  const std::vector<Line> lines = read_lines(path);
  std::vector<InstanceState> instances;
  std::set<std::string> seen_ids;
  std::size_t i = 0;

  auto expect = [&](const char* what) -> const Line& {
    if (i >= lines.size())
      throw ParseError(path + ": unexpected end of file, expected " +
                       std::string(what));
    return lines[i];
  };

  while (i < lines.size()) {
    // instance <id>
    {
      const Line& line = expect("'instance <id>'");
      const auto toks = split_ws(line.text);
      if (toks.size() != 2 || toks[0] != "instance")
        throw ParseError(loc(path, line.no) + "expected 'instance <id>'");
      const std::string& id = toks[1];
      if (id == "ALL" || id.find(',') != std::string::npos)
        throw ParseError(loc(path, line.no) + "instance id '" + id +
                         "' is reserved or contains a comma");
      if (!seen_ids.insert(id).second)
        throw ParseError(loc(path, line.no) + "duplicate instance id '" + id +
                         "'");
      instances.push_back(InstanceState{
          id, JointDistribution(FactSet({Fact{FactId{0}, "-", "-", "-"}}),
                                {{WorldId{0}, 1.0}}),
          std::nullopt});
      ++i;
    }
    InstanceState& inst = instances.back();

    // facts <n> followed by n fact lines
    std::size_t n = 0;
    {
      const Line& line = expect("'facts <n>'");
      const auto toks = split_ws(line.text);
      if (toks.size() != 2 || toks[0] != "facts")
        throw ParseError(loc(path, line.no) + "expected 'facts <n>'");
      n = parse_uint(toks[1], loc(path, line.no));
      ++i;
    }
    std::vector<Fact> facts;
    facts.reserve(n);
    for (std::size_t f = 0; f < n; ++f) {
      const Line& line = expect("a 'fact' line");
      const auto fields = split_on(line.text, '\t');
      const auto head = split_ws(fields[0]);
      if (fields.size() != 4 || head.size() != 2 || head[0] != "fact")
        throw ParseError(loc(path, line.no) +
                         "expected 'fact <i>\\t<subject>\\t<predicate>\\t"
                         "<object>'");
      const std::uint64_t idx = parse_uint(head[1], loc(path, line.no));
      facts.push_back(Fact{FactId{static_cast<std::uint32_t>(idx)}, fields[1],
                           fields[2], fields[3]});
      ++i;
    }
    std::shared_ptr<const FactSet> fact_set;
    try {
      fact_set = std::make_shared<const FactSet>(std::move(facts));
    } catch (const std::exception& e) {
      throw ParseError("instance " + inst.id + ": " + e.what());
    }

    // prior joint <m> | prior marginals independent <n>
    {
      const Line& line = expect("a 'prior' line");
      const auto toks = split_ws(line.text);
      if (toks.size() == 3 && toks[0] == "prior" && toks[1] == "joint") {
        const std::uint64_t m = parse_uint(toks[2], loc(path, line.no));
        ++i;
        std::vector<JointDistribution::Entry> entries;
        entries.reserve(m);
        for (std::uint64_t w = 0; w < m; ++w) {
          const Line& wl = expect("a 'world' line");
          const auto wt = split_ws(wl.text);
          if (wt.size() != 3 || wt[0] != "world")
            throw ParseError(loc(path, wl.no) +
                             "expected 'world <bits> <prob>'");
          try {
            entries.emplace_back(world_from_string(wt[1], n),
                                 parse_double(wt[2], loc(path, wl.no)));
          } catch (const std::invalid_argument& e) {
            throw ParseError(loc(path, wl.no) + e.what());
          }
          ++i;
        }
        try {
          inst.joint = JointDistribution(fact_set, std::move(entries));
        } catch (const std::exception& e) {
          throw ParseError("instance " + inst.id + ": " + e.what());
        }
      } else if (toks.size() == 4 && toks[0] == "prior" &&
                 toks[1] == "marginals" && toks[2] == "independent") {
        const std::uint64_t m = parse_uint(toks[3], loc(path, line.no));
        if (m != n)
          throw ParseError(loc(path, line.no) +
                           "need exactly one marginal per fact");
        ++i;
        std::vector<double> marginals(n, 0.0);
        std::vector<bool> given(n, false);
        for (std::uint64_t w = 0; w < m; ++w) {
          const Line& ml = expect("a 'marginal' line");
          const auto mt = split_ws(ml.text);
          if (mt.size() != 3 || mt[0] != "marginal")
            throw ParseError(loc(path, ml.no) + "expected 'marginal <i> <p>'");
          const std::uint64_t idx = parse_uint(mt[1], loc(path, ml.no));
          if (idx >= n || given[idx])
            throw ParseError(loc(path, ml.no) + "bad or repeated fact id " +
                             mt[1]);
          given[idx] = true;
          marginals[idx] = parse_double(mt[2], loc(path, ml.no));
          ++i;
        }
        try {
          inst.joint = independent_prior(FactSet(*fact_set), marginals);
        } catch (const std::exception& e) {
          throw ParseError("instance " + inst.id + ": " + e.what());
        }
      } else {
        throw ParseError(loc(path, line.no) +
                         "expected 'prior joint <m>' or 'prior marginals "
                         "independent <n>'");
      }
    }

    // optional truth, then end
    while (true) {
      const Line& line = expect("'truth <bits>' or 'end'");
      const auto toks = split_ws(line.text);
      if (toks.size() == 2 && toks[0] == "truth") {
        try {
          const WorldId w = world_from_string(toks[1], n);
          std::vector<bool> truth(n);
          for (std::size_t b = 0; b < n; ++b) truth[b] = (w.bits >> b) & 1u;
          inst.ground_truth = std::move(truth);
        } catch (const std::invalid_argument& e) {
          throw ParseError(loc(path, line.no) + e.what());
        }
        ++i;
      } else if (toks.size() == 1 && toks[0] == "end") {
        ++i;
        break;
      } else {
        throw ParseError(loc(path, line.no) + "expected 'truth <bits>' or "
                                              "'end'");
      }
    }

    if (strict) {
      if (auto violation = validate(inst.joint))
        throw ParseError("instance " + inst.id + ": " + violation->invariant +
                         " violation (magnitude " +
                         format_double(violation->magnitude) + "): " +
                         violation->detail);
      inst.joint = inst.joint.normalized();
    }
  }
  if (instances.empty())
    throw ParseError(path + ": no instances found");
  return instances;
}

void save_instances(const std::string& path,
                    std::span<const InstanceState> instances) {
  std::string out;
  for (const InstanceState& inst : instances) {
    const std::size_t n = inst.joint.fact_count();
    out += "instance " + inst.id + "\n";
    out += "facts " + std::to_string(n) + "\n";
    for (const Fact& f : inst.joint.fact_set().facts())
      out += "fact " + std::to_string(f.id.value) + "\t" + f.subject + "\t" +
             f.predicate + "\t" + f.object + "\n";
    out += "prior joint " + std::to_string(inst.joint.entries().size()) + "\n";
    for (const auto& [w, p] : inst.joint.entries())
      out += "world " + world_to_string(w, n) + " " + format_double(p) + "\n";
    if (inst.ground_truth) {
      WorldId w;
      for (std::size_t b = 0; b < n; ++b)
        if ((*inst.ground_truth)[b]) w.bits |= 1u << b;
      out += "truth " + world_to_string(w, n) + "\n";
    }
    out += "end\n";
  }
  write_file(path, out);
}

void write_runlog(const std::string& path, const RunHeader& header,
                  std::span<const InstanceRunLog> logs) {
  std::string out = "runlog v1\n";
  out += "selector " + header.selector + "\n";
  out += "k " + std::to_string(header.k) + "\n";
  out += "budget " + std::to_string(header.budget) + "\n";
  out += "pc " + format_double(header.pc) + "\n";
  out += "seed " + std::to_string(header.seed) + "\n";
  out += "prune " + std::string(header.prune ? "1" : "0") + "\n";
  out += "preprocess " + std::string(header.preprocess ? "1" : "0") + "\n";
  if (!header.foi.empty()) {
    out += "foi ";
    for (std::size_t i = 0; i < header.foi.size(); ++i)
      out += (i ? "," : "") + std::to_string(header.foi[i]);
    out += "\n";
  }
  for (const InstanceRunLog& il : logs) {
    out += "instance " + il.instance_id + "\n";
    for (const RoundLog& r : il.rounds) {
      out += "round " + std::to_string(r.round) + " tasks ";
      for (std::size_t i = 0; i < r.tasks.size(); ++i)
        out += (i ? "," : "") + std::to_string(r.tasks[i].value) + "=" +
               (r.answers[i] ? "1" : "0");
      out += " evidence " + format_double(r.evidence);
      out += " utility " + format_double(r.utility_after);
      if (r.f1_after && r.counts_after)
        out += " f1 " + format_double(*r.f1_after) + " counts " +
               std::to_string(r.counts_after->tp) + " " +
               std::to_string(r.counts_after->fp) + " " +
               std::to_string(r.counts_after->fn);
      if (r.rejected) out += " rejected";
      out += "\n";
    }
  }
  out += "end\n";
  write_file(path, out);
}

LoadedRunLog load_runlog(const std::string& path) {
  const std::vector<Line> lines = read_lines(path);
  if (lines.empty() || lines[0].text != "runlog v1")
    throw ParseError(path + ": not a runlog (missing 'runlog v1' header)");
  LoadedRunLog run;
  std::size_t i = 1;
  // header key/value lines
  for (; i < lines.size(); ++i) {
    const auto toks = split_ws(lines[i].text);
    const std::string& where = loc(path, lines[i].no);
    if (toks.empty()) continue;
    if (toks[0] == "instance" || toks[0] == "end") break;
    if (toks.size() < 2) throw ParseError(where + "expected 'key value'");
    if (toks[0] == "selector")
      run.header.selector = toks[1];
    else if (toks[0] == "k")
      run.header.k = parse_uint(toks[1], where);
    else if (toks[0] == "budget")
      run.header.budget = parse_uint(toks[1], where);
    else if (toks[0] == "pc")
      run.header.pc = parse_double(toks[1], where);
    else if (toks[0] == "seed")
      run.header.seed = parse_uint(toks[1], where);
    else if (toks[0] == "prune")
      run.header.prune = parse_uint(toks[1], where) != 0;
    else if (toks[0] == "preprocess")
      run.header.preprocess = parse_uint(toks[1], where) != 0;
    else if (toks[0] == "foi") {
      for (const std::string& part : split_on(toks[1], ','))
        run.header.foi.push_back(
            static_cast<std::uint32_t>(parse_uint(part, where)));
    } else
      throw ParseError(where + "unknown header key '" + toks[0] + "'");
  }
  // instance sections
  while (i < lines.size() && lines[i].text != "end") {
    const auto toks = split_ws(lines[i].text);
    const std::string& where = loc(path, lines[i].no);
    if (toks.size() != 2 || toks[0] != "instance")
      throw ParseError(where + "expected 'instance <id>' or 'end'");
    run.logs.push_back(InstanceRunLog{toks[1], {}});
    ++i;
    while (i < lines.size()) {
      const auto rt = split_ws(lines[i].text);
      if (rt.empty() || rt[0] != "round") break;
      const std::string& rwhere = loc(path, lines[i].no);
      RoundLog round;
      std::size_t t = 1;
      auto need = [&](const char* what) -> const std::string& {
        if (t >= rt.size())
          throw ParseError(rwhere + "truncated round line, expected " +
                           std::string(what));
        return rt[t];
      };
      round.round = parse_uint(need("round number"), rwhere);
      ++t;
      if (need("'tasks'") != "tasks")
        throw ParseError(rwhere + "expected 'tasks'");
      ++t;
      for (const std::string& part : split_on(need("task list"), ',')) {
        const auto eq = split_on(part, '=');
        if (eq.size() != 2 || (eq[1] != "0" && eq[1] != "1"))
          throw ParseError(rwhere + "expected '<fact>=<0|1>', got '" + part +
                           "'");
        round.tasks.push_back(
            FactId{static_cast<std::uint32_t>(parse_uint(eq[0], rwhere))});
        round.answers.push_back(eq[1] == "1");
      }
      ++t;
      while (t < rt.size()) {
        const std::string key = rt[t];
        if (key == "rejected") {
          round.rejected = true;
          ++t;
        } else if (key == "evidence") {
          ++t;
          round.evidence = parse_double(need("evidence value"), rwhere);
          ++t;
        } else if (key == "utility") {
          ++t;
          round.utility_after = parse_double(need("utility value"), rwhere);
          ++t;
        } else if (key == "f1") {
          ++t;
          const double f1 = parse_double(need("f1 value"), rwhere);
          if (!std::isnan(f1)) round.f1_after = f1;
          ++t;
        } else if (key == "counts") {
          ++t;
          F1Counts counts;
          counts.tp = parse_uint(need("tp"), rwhere);
          ++t;
          counts.fp = parse_uint(need("fp"), rwhere);
          ++t;
          counts.fn = parse_uint(need("fn"), rwhere);
          ++t;
          round.counts_after = counts;
        } else {
          throw ParseError(rwhere + "unknown round field '" + key + "'");
        }
      }
      run.logs.back().rounds.push_back(std::move(round));
      ++i;
    }
  }
  if (i >= lines.size())
    throw ParseError(path + ": unexpected end of file, expected 'end'");
  return run;
}

ReplaySource replay_from(const LoadedRunLog& log) {
  ReplaySource source;
  for (const InstanceRunLog& il : log.logs)
    for (const RoundLog& r : il.rounds)
      for (std::size_t i = 0; i < r.tasks.size(); ++i)
        source.record(il.instance_id, r.round, r.tasks[i], r.answers[i]);
  return source;
}

std::string csv_header() {
  return "selector,k,pc,seed,instance,round,tasks_cum,utility,f1";
}

namespace {

std::string csv_prefix(const RunHeader& h) {
  return h.selector + "," + std::to_string(h.k) + "," + format_double(h.pc) +
         "," + std::to_string(h.seed) + ",";
}

std::string csv_row(const std::string& prefix, const std::string& instance,
                    std::size_t round, std::size_t tasks_cum, double utility,
                    const std::optional<double>& f1) {
  return prefix + instance + "," + std::to_string(round) + "," +
         std::to_string(tasks_cum) + "," + format_double(utility) + "," +
         (f1 ? format_double(*f1) : "nan") + "\n";
}

std::string instance_rows(const RunHeader& header,
                          std::span<const InstanceRunLog> logs) {
  std::string out;
  const std::string prefix = csv_prefix(header);
  for (const InstanceRunLog& il : logs) {
    std::size_t cum = 0;
    for (const RoundLog& r : il.rounds) {
      cum += r.tasks.size();
      out += csv_row(prefix, il.instance_id, r.round, cum, r.utility_after,
                     r.f1_after);
    }
  }
  return out;
}

}  // namespace

std::string csv_text(const RunHeader& header, const RunResult& result) {
  std::string out = csv_header() + "\n";
  out += instance_rows(header, result.logs);
  const std::string prefix = csv_prefix(header);
  for (std::size_t i = 0; i < result.metrics.trajectory.size(); ++i) {
    const MetricsPoint& pt = result.metrics.trajectory[i];
    out += csv_row(prefix, "ALL", i + 1, pt.tasks_cum, pt.utility_sum,
                   pt.f1_pooled);
  }
  return out;
}

void write_csv(const std::string& path, const RunHeader& header,
               const RunResult& result) {
  write_file(path, csv_text(header, result));
}

std::string report_csv(std::span<const LoadedRunLog> runs) {
  std::string out = csv_header() + "\n";
  for (const LoadedRunLog& run : runs) {
    out += instance_rows(run.header, run.logs);
    const std::string prefix = csv_prefix(run.header);
    std::size_t max_rounds = 0;
    for (const InstanceRunLog& il : run.logs)
      max_rounds = std::max(max_rounds, il.rounds.size());
    for (std::size_t r = 1; r <= max_rounds; ++r) {
      std::size_t tasks_cum = 0;
      double utility_sum = 0.0;
      F1Counts pooled;
      bool any_counts = false;
      for (const InstanceRunLog& il : run.logs) {
        if (il.rounds.empty()) continue;
        const std::size_t last = std::min(r, il.rounds.size());
        std::size_t cum = 0;
        for (std::size_t q = 0; q < last; ++q)
          cum += il.rounds[q].tasks.size();
        tasks_cum += cum;
        const RoundLog& latest = il.rounds[last - 1];
        utility_sum += latest.utility_after;
        if (latest.counts_after) {
          pooled.tp += latest.counts_after->tp;
          pooled.fp += latest.counts_after->fp;
          pooled.fn += latest.counts_after->fn;
          any_counts = true;
        }
      }
      out += csv_row(prefix, "ALL", r, tasks_cum, utility_sum,
                     any_counts ? std::optional<double>(pooled.score())
                                : std::nullopt);
    }
  }
  return out;
}

}  // namespace factfuse
