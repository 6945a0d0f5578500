// SPDX-License-Identifier: Apache-2.0

#ifndef SPM_LIBRARY_HPP
#define SPM_LIBRARY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spm/decomposition.hpp"
#include "spm/features.hpp"
#include "spm/image.hpp"

namespace spm {

struct LibraryEntry {
  ImageGrid image;
  Decomposition decomposition;
  FeatureTable features;
  std::vector<int> superpixel_labels;  // empty when unlabeled
  std::string name;

  bool labeled() const { return !superpixel_labels.empty(); }
};

/// The pooled set of decomposed, featured exemplar images searched by the
/// correspondence algorithm. All entries share one feature configuration;
/// superpixels are additionally enumerable through a flat index.
class ExemplarLibrary {
 public:
  explicit ExemplarLibrary(FeatureConfig config) : config_(config) {}

  /// Validates feature dimensions and label ranges, then takes ownership.
  void add_entry(LibraryEntry entry);

  const FeatureConfig& config() const { return config_; }
  int entry_count() const { return static_cast<int>(entries_.size()); }
  const LibraryEntry& entry(int i) const { return entries_[i]; }

  std::int64_t total_superpixels() const { return total_superpixels_; }

  /// Maps a flat superpixel index to (image id, superpixel id).
  std::pair<int, int> flat_to_pair(std::int64_t flat) const;

  bool fully_labeled() const;

  /// Number of classes across all labeled entries (max label + 1).
  int label_count() const;

  /// Largest image dimension across entries; the initial random-search radius.
  int max_image_dimension() const;

 private:
  FeatureConfig config_;
  std::vector<LibraryEntry> entries_;
  std::vector<std::int64_t> flat_offsets_;
  std::int64_t total_superpixels_ = 0;
};

/// Majority label of each superpixel's pixels; ties pick the lowest label.
std::vector<int> superpixel_labels_from_pixels(const Decomposition& decomp,
                                               const LabelMap& truth);

/// Binary feature-table cache keyed by content hashes of the image, the
/// decomposition, and the feature configuration.
void save_feature_cache(const std::string& path, std::uint64_t image_hash,
                        std::uint64_t decomposition_hash,
                        std::uint64_t config_hash, const FeatureTable& table);

/// Returns the cached table when the key matches, std::nullopt when the file
/// does not exist, and throws FormatError on a stale or foreign cache.
std::optional<FeatureTable> load_feature_cache(const std::string& path,
                                               std::uint64_t image_hash,
                                               std::uint64_t decomposition_hash,
                                               std::uint64_t config_hash);

}  // namespace spm

#endif  // SPM_LIBRARY_HPP
