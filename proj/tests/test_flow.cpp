// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "spm/flow.hpp"

using namespace spm;
using spm::testing::make_block_decomposition;
using spm::testing::make_textured_image;

namespace {

ExemplarLibrary self_library(const ImageGrid& image,
                             const Decomposition& decomp) {
  FeatureConfig config;
  config.kind = FeatureKind::kMeanColor;
  ExemplarLibrary lib(config);
  LibraryEntry entry;
  entry.image = image;
  entry.decomposition = decomp;
  entry.features = compute_features(decomp, image, config);
  lib.add_entry(std::move(entry));
  return lib;
}

}  // namespace

TEST_CASE("identity matching produces an all-zero field") {
  const ImageGrid image = make_textured_image(16, 16, 3);
  const Decomposition decomp = make_block_decomposition(4, 4, 4, 4);
  const ExemplarLibrary lib = self_library(image, decomp);
  AnnField field;
  field.k = 1;
  field.matches.resize(decomp.size());
  for (int i = 0; i < decomp.size(); ++i)
    field.matches[i] = {Match{0, i, 0.0}};
  const DisplacementField flow = displacement_field(field, decomp, lib);
  for (const auto& d : flow.displacement) CHECK(d.norm() == 0.0);
}

TEST_CASE("best-of-k selection feeds the field") {
  const ImageGrid image = make_textured_image(8, 8, 9);
  const Decomposition decomp = make_block_decomposition(2, 2, 4, 4);
  const ExemplarLibrary lib = self_library(image, decomp);
  AnnField field;
  field.k = 2;
  field.matches.resize(decomp.size());
  for (int i = 0; i < decomp.size(); ++i)
    field.matches[i] = {Match{0, (i + 1) % 4, 0.9}, Match{0, i, 0.1}};
  const DisplacementField flow = displacement_field(field, decomp, lib);
  for (const auto& d : flow.displacement) CHECK(d.norm() == 0.0);
}

TEST_CASE("an all-zero field renders pure white") {
  const Decomposition decomp = make_block_decomposition(2, 2, 2, 2);
  DisplacementField field;
  field.displacement.assign(4, Eigen::Vector2d::Zero());
  const ImageGrid image = render_flow(field, decomp);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < image.height(); ++y)
      for (int x = 0; x < image.width(); ++x) CHECK(image(x, y, c) == 1.0f);
}

TEST_CASE("only displaced superpixels take color") {
  const Decomposition decomp = make_block_decomposition(2, 1, 2, 2);
  DisplacementField field;
  field.displacement = {Eigen::Vector2d(3.0, 0.0), Eigen::Vector2d::Zero()};
  const ImageGrid image = render_flow(field, decomp);
  bool colored = false;
  for (int c = 0; c < 3; ++c) colored |= image(0, 0, c) < 1.0f;
  CHECK(colored);
  for (int c = 0; c < 3; ++c) CHECK(image(2, 0, c) == 1.0f);
}

TEST_CASE("rendering is invariant to doubling every displacement") {
  const Decomposition decomp = make_block_decomposition(3, 1, 2, 2);
  DisplacementField field;
  field.displacement = {Eigen::Vector2d(2.0, 1.0), Eigen::Vector2d(-1.0, 3.0),
                        Eigen::Vector2d(0.5, -0.5)};
  DisplacementField doubled;
  for (const auto& d : field.displacement)
    doubled.displacement.push_back(2.0 * d);
  const ImageGrid a = render_flow(field, decomp);
  const ImageGrid b = render_flow(doubled, decomp);
  for (int c = 0; c < 3; ++c)
    CHECK((a.plane(c) == b.plane(c)).all());
}

TEST_CASE("affine fit recovers an exact affine map") {
  Eigen::Matrix<double, 2, 3> truth;
  truth << 1.1, 0.2, -3.0,
           -0.1, 0.9, 5.0;
  RandomSource rng(2);
  std::vector<Eigen::Vector2d> src, dst;
  for (int i = 0; i < 12; ++i) {
    const Eigen::Vector2d p(rng.uniform_real() * 50, rng.uniform_real() * 50);
    src.push_back(p);
    dst.push_back(truth.leftCols<2>() * p + truth.col(2));
  }
  const auto fitted = fit_affine(src, dst);
  CHECK((fitted - truth).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("median handles odd and even counts") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(median({7.0}) == 7.0);
}
