// SPDX-License-Identifier: Apache-2.0

#ifndef SPM_TESTS_HELPERS_HPP
#define SPM_TESTS_HELPERS_HPP

#include <initializer_list>
#include <vector>

#include "spm/decomposition.hpp"
#include "spm/features.hpp"
#include "spm/image.hpp"
#include "spm/random.hpp"
#include "spm/superpatch.hpp"

namespace spm::testing {

inline LabelMap make_labelmap(std::initializer_list<std::vector<int>> rows) {
  const int height = static_cast<int>(rows.size());
  const int width = static_cast<int>(rows.begin()->size());
  LabelMap map(width, height);
  int y = 0;
  for (const auto& row : rows) {
    for (int x = 0; x < width; ++x) map.at(x, y) = row[x];
    ++y;
  }
  return map;
}

inline Decomposition make_decomposition(
    std::initializer_list<std::vector<int>> rows) {
  return import_decomposition(make_labelmap(rows));
}

/// Regular grid of bw x bh blocks covering a (bw*nx) x (bh*ny) image.
inline Decomposition make_block_decomposition(int nx, int ny, int bw, int bh) {
  LabelMap map(nx * bw, ny * bh);
  for (int y = 0; y < ny * bh; ++y)
    for (int x = 0; x < nx * bw; ++x)
      map.at(x, y) = (y / bh) * nx + (x / bw);
  return import_decomposition(map);
}

/// Smooth multi-octave value noise; locally distinctive, natural-image-like.
inline ImageGrid make_textured_image(int width, int height,
                                     std::uint64_t seed, int channels = 3) {
  ImageGrid image(width, height, channels);
  RandomSource rng = RandomSource(seed).split(0x7e47);
  for (int c = 0; c < channels; ++c) {
    auto& plane = image.plane(c);
    plane.setZero();
    double amplitude = 0.5;
    for (int octave = 0; octave < 4; ++octave) {
      const int cell = std::max(2, (octave == 0 ? width : width >> octave) / 4);
      const int gw = width / cell + 2;
      const int gh = height / cell + 2;
      std::vector<float> grid(static_cast<std::size_t>(gw) * gh);
      for (auto& v : grid) v = static_cast<float>(rng.uniform_real());
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          const double fx = static_cast<double>(x) / cell;
          const double fy = static_cast<double>(y) / cell;
          const int ix = static_cast<int>(fx);
          const int iy = static_cast<int>(fy);
          const double tx = fx - ix;
          const double ty = fy - iy;
          const double v00 = grid[iy * gw + ix];
          const double v10 = grid[iy * gw + ix + 1];
          const double v01 = grid[(iy + 1) * gw + ix];
          const double v11 = grid[(iy + 1) * gw + ix + 1];
          const double v = (1 - ty) * ((1 - tx) * v00 + tx * v10) +
                           ty * ((1 - tx) * v01 + tx * v11);
          plane(y, x) += static_cast<float>(amplitude * v);
        }
      }
      amplitude *= 0.5;
    }
    const float lo = plane.minCoeff();
    const float hi = plane.maxCoeff();
    if (hi > lo) plane = (plane - lo) / (hi - lo);
  }
  return image;
}

inline ImageGrid make_uniform_image(int width, int height, float value,
                                    int channels = 3) {
  return ImageGrid(width, height, channels, value);
}

/// Independent direct translation of the weighted-distance definition: plain
/// double loop over member pairs with explicit exponentials, no stabilization.
inline double reference_superpatch_distance(const SuperPatch& a,
                                            const SuperPatch& b,
                                            const FeatureTable& fa,
                                            const FeatureTable& fb,
                                            double sigma1, double sigma2) {
  double numerator = 0.0;
  double denominator = 0.0;
  for (const auto& ma : a.members) {
    for (const auto& mb : b.members) {
      const Eigen::Vector2d x = mb.offset - ma.offset;
      const double w = std::exp(-x.squaredNorm() / (sigma1 * sigma1)) *
                       std::exp(-ma.offset.squaredNorm() / (sigma2 * sigma2)) *
                       std::exp(-mb.offset.squaredNorm() / (sigma2 * sigma2));
      const double d =
          (fa.row(ma.superpixel) - fb.row(mb.superpixel)).norm();
      numerator += w * d;
      denominator += w;
    }
  }
  return numerator / denominator;
}

}  // namespace spm::testing

#endif  // SPM_TESTS_HELPERS_HPP
