// SPDX-License-Identifier: Apache-2.0

#include "spm/library.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "spm/errors.hpp"

namespace spm {

void ExemplarLibrary::add_entry(LibraryEntry entry) {
  const int n = entry.decomposition.size();
  if (entry.image.width() != entry.decomposition.width() ||
      entry.image.height() != entry.decomposition.height())
    throw DomainError("entry decomposition does not match its image: " +
                      entry.name);
  if (entry.features.rows() != n)
    throw DomainError("entry feature table does not cover all superpixels: " +
                      entry.name);
  const int expected_dim = config_.dimension(entry.image.channels());
  if (entry.features.cols() != expected_dim)
    throw DomainError("entry features disagree with the library feature "
                      "config: " + entry.name);
  if (!entry.superpixel_labels.empty()) {
    if (static_cast<int>(entry.superpixel_labels.size()) != n)
      throw DomainError("entry labels do not cover all superpixels: " +
                        entry.name);
    for (const int label : entry.superpixel_labels)
      if (label < 0)
        throw DomainError("entry labels must be non-negative: " + entry.name);
  }
  flat_offsets_.push_back(total_superpixels_);
  total_superpixels_ += n;
  entries_.push_back(std::move(entry));
}

std::pair<int, int> ExemplarLibrary::flat_to_pair(std::int64_t flat) const {
  const auto it =
      std::upper_bound(flat_offsets_.begin(), flat_offsets_.end(), flat);
  const int image = static_cast<int>(it - flat_offsets_.begin()) - 1;
  return {image, static_cast<int>(flat - flat_offsets_[image])};
}

bool ExemplarLibrary::fully_labeled() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const LibraryEntry& e) { return e.labeled(); });
}

int ExemplarLibrary::label_count() const {
  int max_label = -1;
  for (const auto& entry : entries_)
    for (const int label : entry.superpixel_labels)
      max_label = std::max(max_label, label);
  return max_label + 1;
}

int ExemplarLibrary::max_image_dimension() const {
  int dim = 0;
  for (const auto& entry : entries_)
    dim = std::max({dim, entry.image.width(), entry.image.height()});
  return dim;
}

std::vector<int> superpixel_labels_from_pixels(const Decomposition& decomp,
                                               const LabelMap& truth) {
  if (decomp.width() != truth.width() || decomp.height() != truth.height())
    throw DomainError("label map does not match decomposition dimensions");
  const int classes = truth.label_count();
  std::vector<std::vector<std::int64_t>> votes(
      decomp.size(), std::vector<std::int64_t>(classes, 0));
  for (int y = 0; y < decomp.height(); ++y)
    for (int x = 0; x < decomp.width(); ++x)
      ++votes[decomp.superpixel_at(x, y)][truth.at(x, y)];

  std::vector<int> labels(decomp.size(), 0);
  for (int i = 0; i < decomp.size(); ++i) {
    const auto& v = votes[i];
    labels[i] = static_cast<int>(
        std::max_element(v.begin(), v.end()) - v.begin());
  }
  return labels;
}

namespace {

constexpr std::uint64_t kCacheMagic = 0x53504d4643414348ULL;  // "SPMFCACH"

struct CacheHeader {
  std::uint64_t magic;
  std::uint64_t image_hash;
  std::uint64_t decomposition_hash;
  std::uint64_t config_hash;
  std::int64_t rows;
  std::int64_t cols;
};

}  // namespace

void save_feature_cache(const std::string& path, std::uint64_t image_hash,
                        std::uint64_t decomposition_hash,
                        std::uint64_t config_hash, const FeatureTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  const CacheHeader header{kCacheMagic, image_hash, decomposition_hash,
                           config_hash, table.rows(), table.cols()};
  out.write(reinterpret_cast<const char*>(&header), sizeof(header));
  out.write(reinterpret_cast<const char*>(table.data()),
            sizeof(double) * table.size());
  if (!out) throw IoError("failed writing " + path);
}

std::optional<FeatureTable> load_feature_cache(const std::string& path,
                                               std::uint64_t image_hash,
                                               std::uint64_t decomposition_hash,
                                               std::uint64_t config_hash) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  CacheHeader header{};
  in.read(reinterpret_cast<char*>(&header), sizeof(header));
  if (!in || header.magic != kCacheMagic)
    throw FormatError("not a feature cache: " + path);
  if (header.image_hash != image_hash ||
      header.decomposition_hash != decomposition_hash ||
      header.config_hash != config_hash)
    throw FormatError("stale feature cache " + path +
                      "; rebuild it (delete the file or pass --rebuild-cache)");
  if (header.rows < 0 || header.cols < 0)
    throw FormatError("corrupt feature cache: " + path);
  FeatureTable table(header.rows, header.cols);
  in.read(reinterpret_cast<char*>(table.data()),
          sizeof(double) * table.size());
  if (!in) throw IoError("truncated feature cache: " + path);
  return table;
}

}  // namespace spm
