// SPDX-License-Identifier: Apache-2.0

#ifndef SPM_SEARCH_HPP
#define SPM_SEARCH_HPP

#include <atomic>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "spm/library.hpp"
#include "spm/random.hpp"
#include "spm/superpatch.hpp"

namespace spm {

struct Match {
  int image_id = -1;
  int superpixel_id = -1;
  double distance = std::numeric_limits<double>::infinity();

  bool same_target(const Match& other) const {
    return image_id == other.image_id && superpixel_id == other.superpixel_id;
  }
};

/// Deterministic preference among equally distant matches.
inline bool match_less(const Match& a, const Match& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  return a.superpixel_id < b.superpixel_id;
}

struct SpmParams {
  double radius = 0.0;        // superpatch radius, pixels
  int k = 1;                  // independent searches
  int iterations = 5;
  DistanceParams distance;    // leave sigma1 <= 0 to derive defaults
  double random_search_decay = 0.5;
  double random_search_floor = 1.0;  // smallest sampled radius, pixels
};

/// k matches per test superpixel with the per-iteration best-distance trace
/// (index 0 is the initialization distance).
struct AnnField {
  int k = 0;
  std::vector<std::vector<Match>> matches;               // [superpixel][run]
  std::vector<std::vector<std::vector<double>>> traces;  // [sp][run][step]

  int superpixel_count() const { return static_cast<int>(matches.size()); }

  /// Minimum-distance match among the k runs, ties to lowest ids.
  Match best(int superpixel) const;
};

struct SearchStats {
  std::int64_t distance_evaluations = 0;
  std::int64_t candidate_evaluations_per_superpixel_per_iteration = 0;
  double search_seconds = 0.0;
};

/// Shared immutable state for searches against one query image: the query
/// superpatches, the library superpatches at the same radius, and the
/// distance parameters (defaults derived from the query decomposition).
class SearchContext {
 public:
  SearchContext(const Decomposition& query, const FeatureTable& query_features,
                const ExemplarLibrary& library, const SpmParams& params);

  const Decomposition& query() const { return *query_; }
  const ExemplarLibrary& library() const { return *library_; }
  const SpmParams& params() const { return params_; }
  const DistanceParams& distance_params() const { return distance_; }

  /// Evaluates the superpatch distance for (query superpixel, library image,
  /// library superpixel) and counts the evaluation.
  Match evaluate(int query_superpixel, int image_id, int superpixel_id) const;

  std::int64_t evaluations() const {
    return evaluations_.load(std::memory_order_relaxed);
  }

  int random_search_initial_radius() const { return initial_radius_; }
  int random_search_steps() const;

  /// Candidate evaluations per superpixel per iteration: one per adjacent
  /// neighbor on average plus the fixed random-search budget. Only the
  /// random-search part depends on library size, and only through the
  /// largest image dimension.
  std::int64_t random_search_budget() const;

 private:
  const Decomposition* query_;
  const FeatureTable* query_features_;
  const ExemplarLibrary* library_;
  SpmParams params_;
  DistanceParams distance_;
  int initial_radius_ = 1;
  std::vector<SuperPatch> query_patches_;
  std::vector<std::vector<SuperPatch>> library_patches_;
  mutable std::atomic<std::int64_t> evaluations_{0};
};

/// One random (image, superpixel) assignment per query superpixel, uniform
/// over the library's flat superpixel enumeration, with evaluated distances.
/// Draws use per-superpixel substreams of `rng`.
std::vector<Match> initialize_matches(const SearchContext& ctx,
                                      const RandomSource& rng);

/// The propagation rule: given neighbor i' of i and i''s current match, picks
/// the adjacent superpixel of the match whose angle (from the match's
/// barycenter) is circularly closest to the direction from c_{i'} toward c_i.
/// Returns the match unchanged when it has no adjacent superpixels. The
/// returned candidate carries no evaluated distance.
Match propagation_candidate(const Decomposition& query, int i, int i_prime,
                            const Match& neighbor_match,
                            const ExemplarLibrary& library);

/// One independent search: initialization plus alternating propagation and
/// random-search passes, with per-superpixel substreams so results do not
/// depend on visit interleaving.
class SpmRun {
 public:
  SpmRun(const SearchContext& ctx, const RandomSource& run_rng);

  void initialize();
  /// Scan-order pass (reverse order when forward = false); every neighbor
  /// already processed in the pass contributes one candidate, adopted only
  /// on strict improvement.
  void propagate_pass(bool forward);
  /// Exponentially decaying box sampling around the current match, probing
  /// the match's image and one random other library image per radius step.
  void random_search_pass();

  const std::vector<Match>& matches() const { return matches_; }
  std::vector<Match>& matches() { return matches_; }

 private:
  const SearchContext* ctx_;
  std::vector<Match> matches_;
  std::vector<RandomSource> streams_;  // one per query superpixel
};

/// k independent runs of (initialize; iterations x (propagate, random
/// search)), even iterations scanning forward, odd ones in reverse.
AnnField spm_search(const SearchContext& ctx, const RandomSource& rng,
                    unsigned threads = 1, SearchStats* stats = nullptr);

/// Convenience overload building the context in place.
AnnField spm_search(const Decomposition& query,
                    const FeatureTable& query_features,
                    const ExemplarLibrary& library, const SpmParams& params,
                    const RandomSource& rng, unsigned threads = 1,
                    SearchStats* stats = nullptr);

/// JSON-lines serialization: one {"i": ..., "matches": [...]} record per
/// query superpixel.
void save_ann_field(const AnnField& field, const std::string& path);
AnnField load_ann_field(const std::string& path);

}  // namespace spm

#endif  // SPM_SEARCH_HPP
