// SPDX-License-Identifier: Apache-2.0

#include "spm/search.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "spm/errors.hpp"
#include "spm/parallel.hpp"

namespace spm {

namespace {

using json = nlohmann::json;

double circular_difference(double a, double b) {
  double d = std::fmod(std::fabs(a - b), 2.0 * std::numbers::pi);
  if (d > std::numbers::pi) d = 2.0 * std::numbers::pi - d;
  return d;
}

double angle_of(const Eigen::Vector2d& v) { return std::atan2(v.y(), v.x()); }

}  // namespace

Match AnnField::best(int superpixel) const {
  Match best;
  for (const auto& m : matches[superpixel])
    if (match_less(m, best)) best = m;
  return best;
}

SearchContext::SearchContext(const Decomposition& query,
                             const FeatureTable& query_features,
                             const ExemplarLibrary& library,
                             const SpmParams& params)
    : query_(&query),
      query_features_(&query_features),
      library_(&library),
      params_(params) {
  if (library.entry_count() == 0) throw DomainError("exemplar library is empty");
  if (params.k < 1) throw DomainError("k must be >= 1");
  if (params.iterations < 1) throw DomainError("iterations must be >= 1");
  if (params.radius < 0.0) throw DomainError("superpatch radius must be >= 0");
  if (query_features.rows() != query.size())
    throw DomainError("query feature table does not cover all superpixels");
  for (int e = 0; e < library.entry_count(); ++e)
    if (library.entry(e).features.cols() != query_features.cols())
      throw DomainError(
          "feature configuration mismatch between query and library");

  distance_ = params.distance;
  if (distance_.sigma1 <= 0.0) {
    const DistanceParams defaults =
        default_distance_params(query, params.radius);
    distance_.sigma1 = defaults.sigma1;
    if (distance_.sigma2 <= 0.0) distance_.sigma2 = defaults.sigma2;
  } else if (distance_.sigma2 <= 0.0) {
    distance_.sigma2 = params.radius > 0.0 ? std::sqrt(2.0) * params.radius
                                           : 1.0;
  }

  initial_radius_ = library.max_image_dimension();
  query_patches_ = build_all_superpatches(query, params.radius);
  library_patches_.reserve(library.entry_count());
  for (int e = 0; e < library.entry_count(); ++e)
    library_patches_.push_back(
        build_all_superpatches(library.entry(e).decomposition, params.radius));
}

Match SearchContext::evaluate(int query_superpixel, int image_id,
                              int superpixel_id) const {
  const LibraryEntry& entry = library_->entry(image_id);
  const double d = superpatch_distance(
      query_patches_[query_superpixel], library_patches_[image_id][superpixel_id],
      *query_features_, entry.features, distance_);
  evaluations_.fetch_add(1, std::memory_order_relaxed);
  return Match{image_id, superpixel_id, d};
}

int SearchContext::random_search_steps() const {
  int steps = 0;
  for (double r = initial_radius_; r >= params_.random_search_floor;
       r *= params_.random_search_decay)
    ++steps;
  return steps;
}

std::int64_t SearchContext::random_search_budget() const {
  const int probes_per_step = library_->entry_count() > 1 ? 2 : 1;
  return static_cast<std::int64_t>(random_search_steps()) * probes_per_step;
}

std::vector<Match> initialize_matches(const SearchContext& ctx,
                                      const RandomSource& rng) {
  const auto& lib = ctx.library();
  const std::int64_t total = lib.total_superpixels();
  std::vector<Match> matches(ctx.query().size());
  for (int i = 0; i < ctx.query().size(); ++i) {
    RandomSource stream = rng.split(static_cast<std::uint64_t>(i));
    const auto [image_id, superpixel_id] = lib.flat_to_pair(
        static_cast<std::int64_t>(stream.uniform_below(total)));
    matches[i] = ctx.evaluate(i, image_id, superpixel_id);
  }
  return matches;
}

Match propagation_candidate(const Decomposition& query, int i, int i_prime,
                            const Match& neighbor_match,
                            const ExemplarLibrary& library) {
  const Decomposition& target =
      library.entry(neighbor_match.image_id).decomposition;
  const auto& neighbors = target.adjacency[neighbor_match.superpixel_id];
  if (neighbors.empty()) return neighbor_match;

  // Direction from the neighbor toward the processed superpixel; the
  // candidate should sit at the mirrored position relative to the match.
  const Eigen::Vector2d ci = query.superpixels[i].barycenter;
  const Eigen::Vector2d ci_prime = query.superpixels[i_prime].barycenter;
  const double wanted = angle_of(ci - ci_prime);

  const Eigen::Vector2d cb =
      target.superpixels[neighbor_match.superpixel_id].barycenter;
  int best = -1;
  double best_diff = std::numeric_limits<double>::infinity();
  for (const int k : neighbors) {
    const double theta = angle_of(target.superpixels[k].barycenter - cb);
    const double diff = circular_difference(theta, wanted);
    if (diff < best_diff) {  // ascending ids, so ties keep the lowest
      best_diff = diff;
      best = k;
    }
  }
  return Match{neighbor_match.image_id, best,
               std::numeric_limits<double>::infinity()};
}

SpmRun::SpmRun(const SearchContext& ctx, const RandomSource& run_rng)
    : ctx_(&ctx) {
  const int n = ctx.query().size();
  matches_.resize(n);
  streams_.reserve(n);
  for (int i = 0; i < n; ++i)
    streams_.push_back(run_rng.split(static_cast<std::uint64_t>(i)));
}

void SpmRun::initialize() {
  const auto& lib = ctx_->library();
  const std::int64_t total = lib.total_superpixels();
  for (int i = 0; i < ctx_->query().size(); ++i) {
    const auto [image_id, superpixel_id] = lib.flat_to_pair(
        static_cast<std::int64_t>(streams_[i].uniform_below(total)));
    matches_[i] = ctx_->evaluate(i, image_id, superpixel_id);
  }
}

void SpmRun::propagate_pass(bool forward) {
  const Decomposition& query = ctx_->query();
  std::vector<char> processed(query.size(), 0);
  const auto& order = query.scan_order;
  for (int step = 0; step < static_cast<int>(order.size()); ++step) {
    const int i = forward ? order[step]
                          : order[order.size() - 1 - static_cast<std::size_t>(step)];
    for (const int i_prime : query.adjacency[i]) {
      if (!processed[i_prime]) continue;
      const Match candidate =
          propagation_candidate(query, i, i_prime, matches_[i_prime],
                                ctx_->library());
      const Match evaluated =
          ctx_->evaluate(i, candidate.image_id, candidate.superpixel_id);
      if (evaluated.distance < matches_[i].distance) matches_[i] = evaluated;
    }
    processed[i] = 1;
  }
}

void SpmRun::random_search_pass() {
  const auto& lib = ctx_->library();
  const SpmParams& params = ctx_->params();

  auto sample_axis = [](RandomSource& rng, double center, double radius,
                        int extent) {
    int lo = static_cast<int>(std::ceil(center - radius));
    int hi = static_cast<int>(std::floor(center + radius));
    lo = std::max(lo, 0);
    hi = std::min(hi, extent - 1);
    if (lo > hi)
      lo = hi = std::clamp(static_cast<int>(std::lround(center)), 0, extent - 1);
    return static_cast<int>(rng.uniform_int(lo, hi));
  };

  for (int i = 0; i < ctx_->query().size(); ++i) {
    RandomSource& rng = streams_[i];
    Match& current = matches_[i];
    for (double r = ctx_->random_search_initial_radius();
         r >= params.random_search_floor; r *= params.random_search_decay) {
      {  // probe within the current best image
        const LibraryEntry& entry = lib.entry(current.image_id);
        const Eigen::Vector2d c =
            entry.decomposition.superpixels[current.superpixel_id].barycenter;
        const int x = sample_axis(rng, c.x(), r, entry.image.width());
        const int y = sample_axis(rng, c.y(), r, entry.image.height());
        const Match candidate =
            ctx_->evaluate(i, current.image_id,
                           entry.decomposition.superpixel_at(x, y));
        if (candidate.distance < current.distance) current = candidate;
      }
      if (lib.entry_count() > 1) {  // probe one random other image
        std::int64_t pick = static_cast<std::int64_t>(
            rng.uniform_below(static_cast<std::uint64_t>(lib.entry_count() - 1)));
        if (pick >= current.image_id) ++pick;
        const int other_id = static_cast<int>(pick);
        const LibraryEntry& from = lib.entry(current.image_id);
        const LibraryEntry& other = lib.entry(other_id);
        const Eigen::Vector2d c =
            from.decomposition.superpixels[current.superpixel_id].barycenter;
        const double sx = c.x() * other.image.width() / from.image.width();
        const double sy = c.y() * other.image.height() / from.image.height();
        const int x = sample_axis(rng, sx, r, other.image.width());
        const int y = sample_axis(rng, sy, r, other.image.height());
        const Match candidate = ctx_->evaluate(
            i, other_id, other.decomposition.superpixel_at(x, y));
        if (candidate.distance < current.distance) current = candidate;
      }
    }
  }
}

AnnField spm_search(const SearchContext& ctx, const RandomSource& rng,
                    unsigned threads, SearchStats* stats) {
  const auto started = std::chrono::steady_clock::now();
  const std::int64_t evals_before = ctx.evaluations();
  const int n = ctx.query().size();
  const SpmParams& params = ctx.params();

  AnnField field;
  field.k = params.k;
  field.matches.assign(n, std::vector<Match>(params.k));
  field.traces.assign(n, std::vector<std::vector<double>>(
                             params.k,
                             std::vector<double>(params.iterations + 1)));

  parallel_for(static_cast<std::size_t>(params.k), threads, [&](std::size_t run) {
    SpmRun search(ctx, rng.split(run));
    search.initialize();
    for (int i = 0; i < n; ++i)
      field.traces[i][run][0] = search.matches()[i].distance;
    for (int iter = 0; iter < params.iterations; ++iter) {
      search.propagate_pass(iter % 2 == 0);
      search.random_search_pass();
      for (int i = 0; i < n; ++i)
        field.traces[i][run][iter + 1] = search.matches()[i].distance;
    }
    for (int i = 0; i < n; ++i) field.matches[i][run] = search.matches()[i];
  });

  if (stats) {
    stats->distance_evaluations = ctx.evaluations() - evals_before;
    const std::int64_t denom =
        static_cast<std::int64_t>(n) * params.k * params.iterations;
    stats->candidate_evaluations_per_superpixel_per_iteration =
        denom > 0 ? stats->distance_evaluations / denom : 0;
    stats->search_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
  }
  return field;
}

AnnField spm_search(const Decomposition& query,
                    const FeatureTable& query_features,
                    const ExemplarLibrary& library, const SpmParams& params,
                    const RandomSource& rng, unsigned threads,
                    SearchStats* stats) {
  const SearchContext ctx(query, query_features, library, params);
  return spm_search(ctx, rng, threads, stats);
}

void save_ann_field(const AnnField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (int i = 0; i < field.superpixel_count(); ++i) {
    json record;
    record["i"] = i;
    json matches = json::array();
    for (const auto& m : field.matches[i])
      matches.push_back(
          {{"img", m.image_id}, {"sp", m.superpixel_id}, {"d", m.distance}});
    record["matches"] = std::move(matches);
    out << record.dump() << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

AnnField load_ann_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  AnnField field;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError("bad ANN field record in " + path + ": " + e.what());
    }
    std::vector<Match> matches;
    for (const auto& m : record.at("matches"))
      matches.push_back(Match{m.at("img").get<int>(), m.at("sp").get<int>(),
                              m.at("d").get<double>()});
    field.matches.push_back(std::move(matches));
  }
  field.k = field.matches.empty() ? 0 : static_cast<int>(field.matches[0].size());
  return field;
}

}  // namespace spm
