// SPDX-License-Identifier: Apache-2.0

#include "spm/oracle.hpp"

#include "spm/parallel.hpp"

namespace spm {

std::vector<Match> brute_force_match(const SearchContext& ctx,
                                     unsigned threads) {
  const int n = ctx.query().size();
  std::vector<Match> best(n);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    const auto query_sp = static_cast<int>(i);
    Match winner;
    for (int image = 0; image < ctx.library().entry_count(); ++image) {
      const int count = ctx.library().entry(image).decomposition.size();
      for (int sp = 0; sp < count; ++sp) {
        const Match candidate = ctx.evaluate(query_sp, image, sp);
        if (candidate.distance < winner.distance) winner = candidate;
      }
    }
    best[i] = winner;
  });
  return best;
}

}  // namespace spm
