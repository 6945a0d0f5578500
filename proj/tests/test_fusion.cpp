// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "spm/errors.hpp"
#include "spm/fusion.hpp"

using namespace spm;
using spm::testing::make_block_decomposition;
using spm::testing::make_uniform_image;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Library of one image whose decomposition mirrors the query block grid,
/// with hand-assigned superpixel labels.
ExemplarLibrary mirrored_library(const Decomposition& decomp,
                                 const std::vector<int>& labels) {
  FeatureConfig config;
  config.kind = FeatureKind::kMeanColor;
  ExemplarLibrary lib(config);
  LibraryEntry entry;
  entry.image = make_uniform_image(decomp.width(), decomp.height(), 0.5f);
  entry.decomposition = decomp;
  entry.features = compute_features(decomp, entry.image, config);
  entry.superpixel_labels = labels;
  lib.add_entry(std::move(entry));
  return lib;
}

AnnField field_of(int superpixels,
                  const std::vector<std::vector<Match>>& matches) {
  AnnField field;
  field.k = matches.empty() ? 0 : static_cast<int>(matches[0].size());
  field.matches = matches;
  field.matches.resize(superpixels);
  return field;
}

}  // namespace

TEST_CASE("weight of the minimum-distance match is exp(1 - 1/alpha^2)") {
  FusionParams params;  // alpha = 2
  params.beta = kInf;
  const double w = fusion_weight(0.2, 0.2, 123.0, params);
  CHECK(w == doctest::Approx(std::exp(0.75)).epsilon(1e-9));
}

TEST_CASE("coincident barycenters kill the spatial term") {
  FusionParams params;  // beta = 4
  const double w = fusion_weight(0.2, 0.2, 0.0, params);
  CHECK(w == doctest::Approx(std::exp(0.75)).epsilon(1e-9));
}

TEST_CASE("paper defaults produce the expected closed-form value") {
  FusionParams params;  // alpha = 2, beta = 4
  const double distance = 0.3, minimum = 0.1, spatial = 8.0;
  const double expected =
      std::exp(1.0 - (distance / (4.0 * (minimum + params.epsilon)) +
                      spatial / 16.0));
  CHECK(fusion_weight(distance, minimum, spatial, params) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("a single match yields a one-hot row") {
  const Decomposition decomp = make_block_decomposition(2, 1, 2, 2);
  const ExemplarLibrary lib = mirrored_library(decomp, {2, 1});
  const AnnField field =
      field_of(2, {{Match{0, 0, 0.4}}, {Match{0, 1, 0.1}}});
  const LabelFusionMap fusion = label_fusion(field, decomp, lib, {});
  CHECK(fusion.probabilities(0, 2) == doctest::Approx(1.0));
  CHECK(fusion.probabilities(0, 0) == 0.0);
  CHECK(fusion.probabilities(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("two equal-weight matches with different labels split evenly") {
  const Decomposition decomp = make_block_decomposition(2, 1, 2, 2);
  const ExemplarLibrary lib = mirrored_library(decomp, {0, 1});
  FusionParams params;
  params.beta = kInf;
  const AnnField field =
      field_of(2, {{Match{0, 0, 0.3}, Match{0, 1, 0.3}},
                   {Match{0, 0, 0.3}, Match{0, 1, 0.3}}});
  const LabelFusionMap fusion = label_fusion(field, decomp, lib, params);
  CHECK(fusion.probabilities(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fusion.probabilities(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("three hand-set matches reproduce the direct arithmetic") {
  const Decomposition decomp = make_block_decomposition(3, 1, 2, 2);
  const ExemplarLibrary lib = mirrored_library(decomp, {0, 1, 0});
  FusionParams params;
  params.beta = kInf;
  const AnnField field = field_of(
      3, {{Match{0, 0, 0.2}, Match{0, 1, 0.4}, Match{0, 2, 0.3}},
          {Match{0, 0, 0.0}, Match{0, 1, 0.0}, Match{0, 2, 0.5}},
          {Match{0, 1, 0.7}, Match{0, 1, 0.7}, Match{0, 1, 0.7}}});
  const LabelFusionMap fusion = label_fusion(field, decomp, lib, params);

  {  // superpixel 0: min D = 0.2, labels (0, 1, 0)
    const double h2 = 4.0 * (0.2 + params.epsilon);
    const double w0 = std::exp(1.0 - 0.2 / h2);
    const double w1 = std::exp(1.0 - 0.4 / h2);
    const double w2 = std::exp(1.0 - 0.3 / h2);
    CHECK(fusion.probabilities(0, 0) ==
          doctest::Approx((w0 + w2) / (w0 + w1 + w2)).epsilon(1e-9));
    CHECK(fusion.probabilities(0, 1) ==
          doctest::Approx(w1 / (w0 + w1 + w2)).epsilon(1e-9));
  }
  {  // superpixel 1: zero minimum exercises the epsilon guard
    const double h2 = 4.0 * params.epsilon;
    const double w0 = std::exp(1.0);
    const double w2 = std::exp(1.0 - 0.5 / h2);  // underflows to zero
    const double total = w0 + w0 + w2;
    CHECK(fusion.probabilities(1, 0) ==
          doctest::Approx(w0 / total).epsilon(1e-9));
    CHECK(fusion.probabilities(1, 1) ==
          doctest::Approx(w0 / total).epsilon(1e-9));
  }
  // superpixel 2: all matches share label 1
  CHECK(fusion.probabilities(2, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rows sum to one whenever a superpixel has matches") {
  RandomSource rng(10);
  const Decomposition decomp = make_block_decomposition(4, 1, 2, 2);
  const ExemplarLibrary lib = mirrored_library(decomp, {0, 1, 2, 1});
  for (int t = 0; t < 50; ++t) {
    std::vector<std::vector<Match>> matches(4);
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 5; ++k)
        matches[i].push_back(Match{0, static_cast<int>(rng.uniform_below(4)),
                                   rng.uniform_real()});
    const LabelFusionMap fusion =
        label_fusion(field_of(4, matches), decomp, lib, {});
    for (int i = 0; i < 4; ++i)
      CHECK(std::fabs(fusion.probabilities.row(i).sum() - 1.0) <= 1e-12);
  }
}

TEST_CASE("beta = inf equals coincident-barycenter spatial runs") {
  // Query and library share the same decomposition, and every match points
  // at the query superpixel itself, so c_j = c_i and the finite-beta spatial
  // term vanishes identically.
  const Decomposition decomp = make_block_decomposition(2, 2, 2, 2);
  const ExemplarLibrary lib = mirrored_library(decomp, {0, 1, 1, 0});
  std::vector<std::vector<Match>> matches(4);
  RandomSource rng(3);
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 3; ++k)
      matches[i].push_back(Match{0, i, rng.uniform_real()});
  FusionParams with_beta;  // beta = 4
  FusionParams no_beta;
  no_beta.beta = kInf;
  const LabelFusionMap a =
      label_fusion(field_of(4, matches), decomp, lib, with_beta);
  const LabelFusionMap b =
      label_fusion(field_of(4, matches), decomp, lib, no_beta);
  CHECK((a.probabilities - b.probabilities).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scaling all distances preserves the weight ranking") {
  FusionParams params;
  params.beta = kInf;
  RandomSource rng(77);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> distances(6);
    for (auto& d : distances) d = 0.05 + rng.uniform_real();
    const double minimum = *std::min_element(distances.begin(),
                                             distances.end());
    const double scale = 0.1 + rng.uniform_real() * 10.0;
    for (std::size_t i = 0; i < distances.size(); ++i)
      for (std::size_t j = 0; j < distances.size(); ++j) {
        const double wi = fusion_weight(distances[i], minimum, 0.0, params);
        const double wj = fusion_weight(distances[j], minimum, 0.0, params);
        const double si =
            fusion_weight(scale * distances[i], scale * minimum, 0.0, params);
        const double sj =
            fusion_weight(scale * distances[j], scale * minimum, 0.0, params);
        if (wi < wj) CHECK(si <= sj);
        if (wi > wj) CHECK(si >= sj);
      }
  }
}

TEST_CASE("weights stay strictly positive for comparable distances") {
  FusionParams params;
  RandomSource rng(8);
  for (int t = 0; t < 1000; ++t) {
    const double minimum = 0.01 + rng.uniform_real();
    const double distance = minimum * (1.0 + rng.uniform_real() * 20.0);
    CHECK(fusion_weight(distance, minimum, rng.uniform_real() * 50.0, params) >
          0.0);
  }
}

TEST_CASE("unlabeled library entries are rejected") {
  const Decomposition decomp = make_block_decomposition(2, 1, 2, 2);
  FeatureConfig config;
  config.kind = FeatureKind::kMeanColor;
  ExemplarLibrary lib(config);
  LibraryEntry entry;
  entry.image = make_uniform_image(4, 2, 0.5f);
  entry.decomposition = decomp;
  entry.features = compute_features(decomp, entry.image, config);
  lib.add_entry(std::move(entry));  // no labels
  const AnnField field = field_of(2, {{Match{0, 0, 0.1}}, {Match{0, 1, 0.1}}});
  CHECK_THROWS_AS(label_fusion(field, decomp, lib, {}), DomainError);
}

TEST_CASE("argmax breaks ties toward the lowest label") {
  LabelFusionMap fusion;
  fusion.probabilities.resize(3, 3);
  fusion.probabilities << 0.2, 0.5, 0.3,
                          0.5, 0.5, 0.0,
                          1.0 / 3, 1.0 / 3, 1.0 / 3;
  const std::vector<int> labels = argmax_label(fusion);
  CHECK(labels == std::vector<int>{1, 0, 0});
}

TEST_CASE("pixel expansion mirrors the decomposition mask") {
  const Decomposition decomp = make_block_decomposition(2, 1, 2, 2);
  const LabelMap map = expand_to_pixels({0, 1}, decomp);
  for (int y = 0; y < 2; ++y) {
    CHECK(map.at(0, y) == 0);
    CHECK(map.at(1, y) == 0);
    CHECK(map.at(2, y) == 1);
    CHECK(map.at(3, y) == 1);
  }

  const Decomposition single = testing::make_decomposition({{0, 0}, {0, 0}});
  const LabelMap constant = expand_to_pixels({5}, single);
  CHECK((constant.labels == 5).all());
}

TEST_CASE("majority vote over the expansion recovers the labeling") {
  const Decomposition decomp = make_block_decomposition(3, 2, 3, 3);
  const std::vector<int> labeling{2, 0, 1, 1, 0, 2};
  const LabelMap expanded = expand_to_pixels(labeling, decomp);
  CHECK(superpixel_labels_from_pixels(decomp, expanded) == labeling);
}
