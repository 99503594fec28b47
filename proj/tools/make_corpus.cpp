// Deterministic generator for the bundled 40-instance benchmark corpus.
// Usage: make_corpus [output-path]   (default: data/corpus40.tsv)
//
// Instances alternate between compact independent-marginal priors (4-8 facts)
// and sparse joint priors (9-12 facts, 48-112 worlds). Every instance carries
// a ground truth sampled from its own prior so that simulated runs can score
// themselves. Regenerating with the same build reproduces the file byte for
// byte (fixed master seed, fixed-width float formatting).

#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "factfuse/io.hpp"
#include "factfuse/rng.hpp"
#include "factfuse/world.hpp"

using factfuse::SplitRng;
using factfuse::WorldId;

int main(int argc, char** argv) {
  const std::string out_path = argc > 1 ? argv[1] : "data/corpus40.tsv";
  std::string out =
      "# synthetic 40-instance corpus, written by make_corpus (seed "
      "20260814)\n";
  SplitRng rng(20260814, "corpus");

  for (int i = 0; i < 40; ++i) {
    char id[8];
    std::snprintf(id, sizeof(id), "c%02d", i);
    const std::size_t n = 4 + static_cast<std::size_t>(i % 9);
    out += "instance " + std::string(id) + "\n";
    out += "facts " + std::to_string(n) + "\n";
    for (std::size_t j = 0; j < n; ++j)
      out += "fact " + std::to_string(j) + "\tentity-" + std::to_string(i) +
             "\tattr-" + std::to_string(j) + "\tvalue-" + std::to_string(j) +
             "\n";

    WorldId truth;
    if (n <= 8) {
      std::vector<double> marginals(n);
      for (double& p : marginals) p = 0.05 + 0.9 * rng.next_unit();
      out += "prior marginals independent " + std::to_string(n) + "\n";
      for (std::size_t j = 0; j < n; ++j)
        out += "marginal " + std::to_string(j) + " " +
               factfuse::format_double(marginals[j]) + "\n";
      for (std::size_t j = 0; j < n; ++j)
        if (rng.bernoulli(marginals[j])) truth.bits |= 1u << j;
    } else {
      const std::uint64_t space = std::uint64_t{1} << n;
      const std::size_t m = 48 + static_cast<std::size_t>(i % 5) * 16;
      std::set<std::uint32_t> worlds;
      while (worlds.size() < m)
        worlds.insert(static_cast<std::uint32_t>(rng.below(space)));
      std::vector<double> weights;
      weights.reserve(m);
      double total = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double w = 0.01 + rng.next_unit();
        weights.push_back(w);
        total += w;
      }
      out += "prior joint " + std::to_string(m) + "\n";
      std::size_t j = 0;
      for (std::uint32_t w : worlds)
        out += "world " + factfuse::world_to_string(WorldId{w}, n) + " " +
               factfuse::format_double(weights[j++] / total) + "\n";
      const double u = rng.next_unit();
      double acc = 0.0;
      j = 0;
      truth = WorldId{*worlds.begin()};
      for (std::uint32_t w : worlds) {
        acc += weights[j++] / total;
        if (u < acc) {
          truth = WorldId{w};
          break;
        }
      }
    }
    out += "truth " + factfuse::world_to_string(truth, n) + "\n";
    out += "end\n";
  }

  std::FILE* f = std::fopen(out_path.c_str(), "wb");
  if (!f) {
    std::fprintf(stderr, "cannot open %s for writing\n", out_path.c_str());
    return 1;
  }
  std::fwrite(out.data(), 1, out.size(), f);
  std::fclose(f);
  std::printf("wrote %s (40 instances)\n", out_path.c_str());
  return 0;
}
