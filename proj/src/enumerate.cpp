#include <cmath>
#include <sstream>

#include "geodesics/error.hpp"
#include "geodesics/group_core.hpp"
#include "parallel.hpp"
#include "word_codes.hpp"

namespace geodesics {

double estimate_class_count(const SurfacePresentation& p, int n_max) {
  const double branching = 2.0 * p.generator_count() - 1.0;
  double total = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    total += (std::pow(branching, n) + 2.0 * p.generator_count()) / n;
  }
  return total;
}

void check_memory_budget(const SurfacePresentation& p, int n_max, const EnumerationOptions& opts) {
  const double bytes = estimate_class_count(p, n_max) * static_cast<double>(opts.bytes_per_class);
  if (bytes > static_cast<double>(opts.memory_budget_bytes)) {
    std::ostringstream msg;
    msg << "estimated " << static_cast<long long>(estimate_class_count(p, n_max))
        << " classes (" << bytes / (1 << 20) << " MiB) for n_max=" << n_max
        << " exceeds the memory budget of " << opts.memory_budget_bytes / (1 << 20) << " MiB";
    throw MemoryBudgetExceeded(msg.str());
  }
}

namespace {

// Classes of one shard, bucketed by length, codes stored back to back.
struct ShardBuckets {
  std::vector<std::vector<std::uint8_t>> codes;
  std::vector<std::vector<int>> periods;
};

}  // namespace

void for_each_class(const SurfacePresentation& p, int n_max,
                    const std::function<void(const ConjugacyClass&)>& sink,
                    const EnumerationOptions& opts) {
  check_memory_budget(p, n_max, opts);
  const NecklaceEnumerator engine(p, n_max);
  std::vector<ShardBuckets> shards(engine.shard_count());
  detail::parallel_for(shards.size(), opts.workers, [&](std::size_t s) {
    auto& out = shards[s];
    out.codes.resize(static_cast<std::size_t>(n_max) + 1);
    out.periods.resize(static_cast<std::size_t>(n_max) + 1);
    engine.run_shard(s, [&](const RawClass& rc) {
      const std::size_t n = rc.codes.size();
      out.codes[n].insert(out.codes[n].end(), rc.codes.begin(), rc.codes.end());
      out.periods[n].push_back(rc.period);
    });
  });

  const int rank = p.generator_count();
  for (int n = 1; n <= n_max; ++n) {
    for (const auto& shard : shards) {
      const auto& codes = shard.codes[static_cast<std::size_t>(n)];
      const auto& periods = shard.periods[static_cast<std::size_t>(n)];
      for (std::size_t i = 0; i < periods.size(); ++i) {
        detail::Codes w(codes.begin() + static_cast<std::ptrdiff_t>(i * n),
                        codes.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
        const int per = periods[i];
        CyclicWord rep = mark_canonical(CyclicWord(detail::to_letters(w, rank)));
        detail::Codes root(w.begin(), w.begin() + per);
        ConjugacyClass cls{rep, n, per == n, CyclicWord(detail::to_letters(root, rank)), n / per};
        sink(cls);
      }
    }
  }
}

std::vector<ConjugacyClass> enumerate_classes(const SurfacePresentation& p, int n_max,
                                              const EnumerationOptions& opts) {
  std::vector<ConjugacyClass> out;
  for_each_class(p, n_max, [&](const ConjugacyClass& c) { out.push_back(c); }, opts);
  return out;
}

}  // namespace geodesics
