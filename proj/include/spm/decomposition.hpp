// SPDX-License-Identifier: Apache-2.0

#ifndef SPM_DECOMPOSITION_HPP
#define SPM_DECOMPOSITION_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "spm/image.hpp"
#include "spm/random.hpp"

namespace spm {

struct SuperpixelRecord {
  int index = 0;
  Eigen::Vector2d barycenter = Eigen::Vector2d::Zero();  // (x, y) pixel units
  std::int64_t pixel_count = 0;
  std::int64_t first_raster_pixel = 0;
  bool connected = true;  // imports may carry split superpixels, flagged here
};

/// A partition of an image into superpixels: per-pixel indices in [0, n),
/// per-superpixel records, the 4-adjacency graph, and the raster scan order.
struct Decomposition {
  Eigen::ArrayXXi labelmap;  // height x width, values in [0, n)
  std::vector<SuperpixelRecord> superpixels;
  std::vector<std::vector<int>> adjacency;  // sorted, symmetric, irreflexive
  std::vector<int> scan_order;              // ascending first raster pixel

  int width() const { return static_cast<int>(labelmap.cols()); }
  int height() const { return static_cast<int>(labelmap.rows()); }
  int size() const { return static_cast<int>(superpixels.size()); }
  std::int64_t pixel_count() const { return labelmap.size(); }
  int superpixel_at(int x, int y) const { return labelmap(y, x); }

  std::uint64_t content_hash() const;
};

/// SLIC-style decomposition: grid-seeded k-means on (color, position) with
/// distance ||dc||^2 + (compactness/S)^2 ||dxy||^2, S = sqrt(h*w/K). Seeds are
/// jittered from the rng and snapped to the lowest-gradient pixel in a 3x3
/// window; connectivity is enforced by absorbing orphan components into the
/// largest adjacent superpixel. Deterministic for fixed inputs and seed.
Decomposition slic_decompose(const ImageGrid& image, int target_count,
                             double compactness, int iterations,
                             RandomSource rng);

/// Builds a Decomposition from an arbitrary label map. Labels are remapped to
/// [0, n) in ascending value order; disconnected superpixels are kept but
/// flagged via SuperpixelRecord::connected.
Decomposition import_decomposition(const LabelMap& labelmap);

/// Neighbor lists under 4-adjacency: edge (i, j) iff some pixel of i touches
/// a pixel of j horizontally or vertically.
std::vector<std::vector<int>> build_adjacency(const Eigen::ArrayXXi& labelmap,
                                              int superpixel_count);

/// Superpixel visit order: ascending first raster occurrence (left to right,
/// top to bottom).
std::vector<int> compute_scan_order(
    const std::vector<SuperpixelRecord>& superpixels);

/// Writes the label image (16-bit PNG) next to a JSON sidecar holding
/// barycenters, adjacency edges and scan order.
void export_decomposition(const Decomposition& decomp,
                          const std::string& label_png_path,
                          const std::string& sidecar_json_path);

/// Reads back an exported decomposition. Derived data is recomputed from the
/// label image and validated against the sidecar.
Decomposition import_decomposition_files(const std::string& label_png_path,
                                         const std::string& sidecar_json_path);

/// Mean spacing between superpixel barycenters, sqrt(h*w/n) pixels.
double mean_superpixel_spacing(const Decomposition& decomp);

}  // namespace spm

#endif  // SPM_DECOMPOSITION_HPP
