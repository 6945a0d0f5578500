// SPDX-License-Identifier: Apache-2.0

#ifndef SPM_IMAGE_HPP
#define SPM_IMAGE_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace spm {

/// Dense multi-channel raster with values normalized to [0, 1]. Channels are
/// stored as separate height x width planes; pixel (x, y) addresses column x
/// of row y. Immutable in practice once loaded or filled.
class ImageGrid {
 public:
  ImageGrid() = default;
  ImageGrid(int width, int height, int channels, float fill = 0.0f);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return static_cast<int>(planes_.size()); }
  std::int64_t pixel_count() const {
    return static_cast<std::int64_t>(width_) * height_;
  }

  float operator()(int x, int y, int c) const { return planes_[c](y, x); }
  float& operator()(int x, int y, int c) { return planes_[c](y, x); }

  const Eigen::ArrayXXf& plane(int c) const { return planes_[c]; }
  Eigen::ArrayXXf& plane(int c) { return planes_[c]; }

  bool same_size(const ImageGrid& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  /// Scalar intensity plane: Rec.601 luma for 3-channel images, the channel
  /// itself for single-channel, otherwise the channel mean.
  Eigen::ArrayXXf luminance() const;

  std::uint64_t content_hash() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Eigen::ArrayXXf> planes_;
};

/// Per-pixel non-negative integer labels, same raster layout as ImageGrid.
struct LabelMap {
  Eigen::ArrayXXi labels;  // height x width

  LabelMap() = default;
  LabelMap(int width, int height, int fill = 0)
      : labels(Eigen::ArrayXXi::Constant(height, width, fill)) {}

  int width() const { return static_cast<int>(labels.cols()); }
  int height() const { return static_cast<int>(labels.rows()); }
  int at(int x, int y) const { return labels(y, x); }
  int& at(int x, int y) { return labels(y, x); }

  /// Number of classes implied by the stored labels (max + 1), 0 when empty.
  int label_count() const;
};

/// Loads a PNG (8/16-bit) or PGM/PPM raster; format selected by extension.
/// Values are scaled to [0, 1]; channel count is preserved (alpha stripped).
ImageGrid load_image(const std::string& path);

/// Writes PNG or PGM/PPM by extension. bit_depth is 8 or 16; values are
/// clamped to [0, 1] and quantized.
void save_image(const ImageGrid& image, const std::string& path,
                int bit_depth = 8);

/// Loads C aligned single-channel rasters into one C-channel grid.
ImageGrid load_channel_stack(const std::vector<std::string>& paths);

/// Loads a label map from a single-channel PNG (8/16-bit) or a CSV grid of
/// integers. Labels are kept as stored; negative values are rejected.
LabelMap load_labelmap_pixelwise(const std::string& path);

/// Writes a label map as 16-bit gray PNG or CSV by extension.
void save_labelmap(const LabelMap& map, const std::string& path);

}  // namespace spm

#endif  // SPM_IMAGE_HPP
