// SPDX-License-Identifier: Apache-2.0

#include "spm/features.hpp"

#include <cmath>
#include <numbers>

#include "spm/errors.hpp"
#include "spm/hash.hpp"

namespace spm {

namespace {

constexpr int kOrientationBins = 9;

// Binds whole tables and column blocks of row-major tables alike.
using FeatureBlock = Eigen::Ref<FeatureTable, 0, Eigen::OuterStride<>>;

void accumulate_mean_color(const Decomposition& decomp, const ImageGrid& image,
                           FeatureBlock block) {
  block.setZero();
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) {
      const int i = decomp.superpixel_at(x, y);
      for (int c = 0; c < image.channels(); ++c) block(i, c) += image(x, y, c);
    }
  for (int i = 0; i < decomp.size(); ++i)
    block.row(i) /= static_cast<double>(decomp.superpixels[i].pixel_count);
}

void accumulate_cumulative_histogram(const Decomposition& decomp,
                                     const ImageGrid& image, int bins,
                                     FeatureBlock block) {
  block.setZero();
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) {
      const int i = decomp.superpixel_at(x, y);
      for (int c = 0; c < image.channels(); ++c) {
        const int bin = std::min(
            bins - 1, static_cast<int>(image(x, y, c) * bins));
        block(i, c * bins + bin) += 1.0;
      }
    }
  // Per-channel counts become CDFs ending at exactly 1.
  for (int i = 0; i < decomp.size(); ++i) {
    const double inv = 1.0 / static_cast<double>(decomp.superpixels[i].pixel_count);
    for (int c = 0; c < image.channels(); ++c) {
      double running = 0.0;
      for (int b = 0; b < bins; ++b) {
        running += block(i, c * bins + b);
        block(i, c * bins + b) = running * inv;
      }
      block(i, c * bins + bins - 1) = 1.0;
    }
  }
}

void accumulate_orientation_histogram(const Decomposition& decomp,
                                      const ImageGrid& image,
                                      FeatureBlock block) {
  block.setZero();
  const Eigen::ArrayXXf luma = image.luminance();
  const int w = image.width();
  const int h = image.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = 0.5 * (luma(y, std::min(x + 1, w - 1)) -
                               luma(y, std::max(x - 1, 0)));
      const double gy = 0.5 * (luma(std::min(y + 1, h - 1), x) -
                               luma(std::max(y - 1, 0), x));
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double theta = std::atan2(gy, gx);  // (-pi, pi]
      if (theta < 0.0) theta += std::numbers::pi;
      if (theta >= std::numbers::pi) theta -= std::numbers::pi;
      const int bin = std::min(
          kOrientationBins - 1,
          static_cast<int>(theta / std::numbers::pi * kOrientationBins));
      block(decomp.superpixel_at(x, y), bin) += mag;
    }
  }
  for (int i = 0; i < decomp.size(); ++i) {
    const double norm = block.row(i).norm();
    if (norm > 0.0) block.row(i) /= norm;  // flat regions stay all-zero
  }
}

}  // namespace

FeatureConfig FeatureConfig::parse(const std::string& name) {
  FeatureConfig config;
  if (name == "mean-color") {
    config.kind = FeatureKind::kMeanColor;
  } else if (name == "cumulative-histogram") {
    config.kind = FeatureKind::kCumulativeHistogram;
  } else if (name == "orientation-histogram") {
    config.kind = FeatureKind::kOrientationHistogram;
  } else if (name == "concat") {
    config.kind = FeatureKind::kConcat;
  } else {
    throw DomainError("unknown feature kind '" + name + "'");
  }
  return config;
}

std::string FeatureConfig::name() const {
  switch (kind) {
    case FeatureKind::kMeanColor:
      return "mean-color";
    case FeatureKind::kCumulativeHistogram:
      return "cumulative-histogram";
    case FeatureKind::kOrientationHistogram:
      return "orientation-histogram";
    case FeatureKind::kConcat:
      return "concat";
  }
  return "unknown";
}

std::uint64_t FeatureConfig::content_hash() const {
  ContentHash h;
  h.update_value(static_cast<int>(kind)).update_value(bins);
  h.update_value(color_weight).update_value(texture_weight);
  return h.digest();
}

int FeatureConfig::dimension(int channels) const {
  switch (kind) {
    case FeatureKind::kMeanColor:
      return channels;
    case FeatureKind::kCumulativeHistogram:
      return bins * channels;
    case FeatureKind::kOrientationHistogram:
      return kOrientationBins;
    case FeatureKind::kConcat:
      return bins * channels + kOrientationBins;
  }
  return 0;
}

FeatureTable compute_features(const Decomposition& decomp,
                              const ImageGrid& image,
                              const FeatureConfig& config) {
  if (decomp.width() != image.width() || decomp.height() != image.height())
    throw DomainError("decomposition does not match image dimensions");
  if (config.bins < 1) throw DomainError("histogram bins must be >= 1");

  FeatureTable table(decomp.size(), config.dimension(image.channels()));
  switch (config.kind) {
    case FeatureKind::kMeanColor:
      accumulate_mean_color(decomp, image, table);
      break;
    case FeatureKind::kCumulativeHistogram:
      accumulate_cumulative_histogram(decomp, image, config.bins, table);
      break;
    case FeatureKind::kOrientationHistogram:
      accumulate_orientation_histogram(decomp, image, table);
      break;
    case FeatureKind::kConcat: {
      const int color_dim = config.bins * image.channels();
      accumulate_cumulative_histogram(decomp, image, config.bins,
                                      table.leftCols(color_dim));
      accumulate_orientation_histogram(decomp, image,
                                       table.rightCols(kOrientationBins));
      table.leftCols(color_dim) *= config.color_weight;
      table.rightCols(kOrientationBins) *= config.texture_weight;
      break;
    }
  }
  return table;
}

}  // namespace spm
