// SPDX-License-Identifier: Apache-2.0

#include "spm/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "spm/errors.hpp"
#include "spm/hash.hpp"

namespace spm {

namespace {

using json = nlohmann::json;

constexpr int kNeighborDx[4] = {1, -1, 0, 0};
constexpr int kNeighborDy[4] = {0, 0, 1, -1};

std::vector<SuperpixelRecord> build_records(const Eigen::ArrayXXi& labelmap,
                                            int count) {
  std::vector<SuperpixelRecord> records(count);
  for (int i = 0; i < count; ++i) {
    records[i].index = i;
    records[i].first_raster_pixel = -1;
  }
  const int h = static_cast<int>(labelmap.rows());
  const int w = static_cast<int>(labelmap.cols());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto& rec = records[labelmap(y, x)];
      rec.barycenter += Eigen::Vector2d(x, y);
      if (rec.pixel_count == 0)
        rec.first_raster_pixel = static_cast<std::int64_t>(y) * w + x;
      ++rec.pixel_count;
    }
  }
  for (auto& rec : records) {
    if (rec.pixel_count == 0)
      throw DomainError("superpixel " + std::to_string(rec.index) +
                        " is empty");
    rec.barycenter /= static_cast<double>(rec.pixel_count);
  }
  return records;
}

/// Per-pixel connected-component ids under 4-adjacency within equal labels.
/// Returns the number of components and fills component_of.
int connected_components(const Eigen::ArrayXXi& labelmap,
                         Eigen::ArrayXXi& component_of) {
  const int h = static_cast<int>(labelmap.rows());
  const int w = static_cast<int>(labelmap.cols());
  component_of = Eigen::ArrayXXi::Constant(h, w, -1);
  int components = 0;
  std::deque<std::pair<int, int>> queue;
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      if (component_of(y0, x0) >= 0) continue;
      const int label = labelmap(y0, x0);
      const int comp = components++;
      component_of(y0, x0) = comp;
      queue.emplace_back(x0, y0);
      while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        for (int k = 0; k < 4; ++k) {
          const int nx = x + kNeighborDx[k];
          const int ny = y + kNeighborDy[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (component_of(ny, nx) >= 0 || labelmap(ny, nx) != label) continue;
          component_of(ny, nx) = comp;
          queue.emplace_back(nx, ny);
        }
      }
    }
  }
  return components;
}

void flag_disconnected(const Eigen::ArrayXXi& labelmap,
                       std::vector<SuperpixelRecord>& records) {
  Eigen::ArrayXXi component_of;
  connected_components(labelmap, component_of);
  const int h = static_cast<int>(labelmap.rows());
  const int w = static_cast<int>(labelmap.cols());
  std::vector<int> seen_component(records.size(), -1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int label = labelmap(y, x);
      if (seen_component[label] < 0) {
        seen_component[label] = component_of(y, x);
      } else if (seen_component[label] != component_of(y, x)) {
        records[label].connected = false;
      }
    }
  }
}

/// Relabels every non-largest component of each superpixel into the largest
/// superpixel adjacent to that component. Components are handled in raster
/// order against the live map.
void enforce_connectivity(Eigen::ArrayXXi& labelmap, int count) {
  const int h = static_cast<int>(labelmap.rows());
  const int w = static_cast<int>(labelmap.cols());
  Eigen::ArrayXXi component_of;
  const int n_comp = connected_components(labelmap, component_of);

  std::vector<std::int64_t> comp_size(n_comp, 0);
  std::vector<int> comp_label(n_comp, -1);
  std::vector<std::int64_t> comp_first(n_comp,
                                       std::numeric_limits<std::int64_t>::max());
  std::vector<std::vector<std::pair<int, int>>> comp_pixels(n_comp);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int c = component_of(y, x);
      ++comp_size[c];
      comp_label[c] = labelmap(y, x);
      comp_first[c] = std::min(comp_first[c],
                               static_cast<std::int64_t>(y) * w + x);
      comp_pixels[c].emplace_back(x, y);
    }
  }

  // The dominant component of each label keeps it; ties go to the earlier one.
  std::vector<int> keeper(count, -1);
  for (int c = 0; c < n_comp; ++c) {
    const int label = comp_label[c];
    if (keeper[label] < 0 || comp_size[c] > comp_size[keeper[label]] ||
        (comp_size[c] == comp_size[keeper[label]] &&
         comp_first[c] < comp_first[keeper[label]]))
      keeper[label] = c;
  }

  std::vector<std::int64_t> label_size(count, 0);
  for (int c = 0; c < n_comp; ++c)
    label_size[comp_label[c]] += comp_size[c];

  std::vector<int> orphan_order;
  for (int c = 0; c < n_comp; ++c)
    if (keeper[comp_label[c]] != c) orphan_order.push_back(c);
  std::sort(orphan_order.begin(), orphan_order.end(),
            [&](int a, int b) { return comp_first[a] < comp_first[b]; });

  for (const int c : orphan_order) {
    const int own = comp_label[c];
    int best = -1;
    std::int64_t best_size = -1;
    for (const auto& [x, y] : comp_pixels[c]) {
      for (int k = 0; k < 4; ++k) {
        const int nx = x + kNeighborDx[k];
        const int ny = y + kNeighborDy[k];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const int other = labelmap(ny, nx);
        if (other == own) continue;
        if (label_size[other] > best_size ||
            (label_size[other] == best_size && other < best)) {
          best = other;
          best_size = label_size[other];
        }
      }
    }
    if (best < 0) continue;  // single-label image, nothing to absorb into
    for (const auto& [x, y] : comp_pixels[c]) labelmap(y, x) = best;
    label_size[own] -= comp_size[c];
    label_size[best] += comp_size[c];
  }
}

/// Compacts label values to [0, n) preserving ascending value order.
int remap_labels(Eigen::ArrayXXi& labelmap) {
  std::map<int, int> remap;
  const int h = static_cast<int>(labelmap.rows());
  const int w = static_cast<int>(labelmap.cols());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) remap.emplace(labelmap(y, x), 0);
  int next = 0;
  for (auto& [old_value, new_value] : remap) new_value = next++;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) labelmap(y, x) = remap[labelmap(y, x)];
  return next;
}

Decomposition finalize(Eigen::ArrayXXi labelmap, int count) {
  Decomposition out;
  out.labelmap = std::move(labelmap);
  out.superpixels = build_records(out.labelmap, count);
  out.adjacency = build_adjacency(out.labelmap, count);
  out.scan_order = compute_scan_order(out.superpixels);
  flag_disconnected(out.labelmap, out.superpixels);
  return out;
}

}  // namespace

std::uint64_t Decomposition::content_hash() const {
  ContentHash h;
  h.update_value(width()).update_value(height()).update_value(size());
  h.update(labelmap.data(), sizeof(int) * labelmap.size());
  return h.digest();
}

std::vector<std::vector<int>> build_adjacency(const Eigen::ArrayXXi& labelmap,
                                              int superpixel_count) {
  const int h = static_cast<int>(labelmap.rows());
  const int w = static_cast<int>(labelmap.cols());
  std::vector<std::vector<int>> adj(superpixel_count);
  auto link = [&adj](int a, int b) {
    if (a == b) return;
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) link(labelmap(y, x), labelmap(y, x + 1));
      if (y + 1 < h) link(labelmap(y, x), labelmap(y + 1, x));
    }
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

std::vector<int> compute_scan_order(
    const std::vector<SuperpixelRecord>& superpixels) {
  std::vector<int> order(superpixels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return superpixels[a].first_raster_pixel <
           superpixels[b].first_raster_pixel;
  });
  return order;
}

Decomposition import_decomposition(const LabelMap& labelmap) {
  if (labelmap.labels.size() == 0)
    throw DomainError("label map carries no labels");
  if (labelmap.labels.minCoeff() < 0)
    throw DomainError("superpixel labels must be non-negative");
  Eigen::ArrayXXi map = labelmap.labels;
  const int count = remap_labels(map);
  return finalize(std::move(map), count);
}

Decomposition slic_decompose(const ImageGrid& image, int target_count,
                             double compactness, int iterations,
                             RandomSource rng) {
  const int w = image.width();
  const int h = image.height();
  const std::int64_t npix = image.pixel_count();
  if (target_count < 1) throw DomainError("superpixel count must be >= 1");
  if (target_count > npix)
    throw DomainError("superpixel count exceeds pixel count");
  if (compactness <= 0.0) throw DomainError("compactness must be positive");
  if (iterations < 1) throw DomainError("iterations must be >= 1");

  const int channels = image.channels();
  const double spacing = std::sqrt(static_cast<double>(npix) / target_count);

  // Seed grid, jittered then snapped to the lowest-gradient 3x3 neighbor.
  const int grid_x = std::max(1, static_cast<int>(std::lround(w / spacing)));
  const int grid_y = std::max(1, static_cast<int>(std::lround(h / spacing)));
  const Eigen::ArrayXXf luma = image.luminance();
  auto gradient2 = [&](int x, int y) {
    const float gx = luma(y, std::min(x + 1, w - 1)) -
                     luma(y, std::max(x - 1, 0));
    const float gy = luma(std::min(y + 1, h - 1), x) -
                     luma(std::max(y - 1, 0), x);
    return gx * gx + gy * gy;
  };

  const int jitter = std::min<int>(3, static_cast<int>(spacing / 8.0));
  struct Cluster {
    Eigen::VectorXd color;
    double cx = 0.0, cy = 0.0;
  };
  std::vector<Cluster> clusters;
  clusters.reserve(static_cast<std::size_t>(grid_x) * grid_y);
  for (int gy = 0; gy < grid_y; ++gy) {
    for (int gx = 0; gx < grid_x; ++gx) {
      int x = static_cast<int>((gx + 0.5) * w / grid_x);
      int y = static_cast<int>((gy + 0.5) * h / grid_y);
      if (jitter > 0) {
        x += static_cast<int>(rng.uniform_int(-jitter, jitter));
        y += static_cast<int>(rng.uniform_int(-jitter, jitter));
      }
      x = std::clamp(x, 0, w - 1);
      y = std::clamp(y, 0, h - 1);
      int bx = x, by = y;
      float bg = gradient2(x, y);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = std::clamp(x + dx, 0, w - 1);
          const int ny = std::clamp(y + dy, 0, h - 1);
          const float g = gradient2(nx, ny);
          if (g < bg) {
            bg = g;
            bx = nx;
            by = ny;
          }
        }
      }
      Cluster c;
      c.cx = bx;
      c.cy = by;
      c.color.resize(channels);
      for (int ch = 0; ch < channels; ++ch) c.color[ch] = image(bx, by, ch);
      clusters.push_back(std::move(c));
    }
  }
  const int n_clusters = static_cast<int>(clusters.size());

  Eigen::ArrayXXi labels = Eigen::ArrayXXi::Constant(h, w, -1);
  Eigen::ArrayXXd best_dist(h, w);
  const double spatial_scale =
      (compactness / spacing) * (compactness / spacing);
  const int window = static_cast<int>(std::ceil(spacing));

  for (int iter = 0; iter < iterations; ++iter) {
    best_dist.setConstant(std::numeric_limits<double>::max());
    labels.setConstant(-1);
    for (int k = 0; k < n_clusters; ++k) {
      const auto& c = clusters[k];
      const int x0 = std::max(0, static_cast<int>(c.cx) - window);
      const int x1 = std::min(w - 1, static_cast<int>(c.cx) + window);
      const int y0 = std::max(0, static_cast<int>(c.cy) - window);
      const int y1 = std::min(h - 1, static_cast<int>(c.cy) + window);
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          double dc = 0.0;
          for (int ch = 0; ch < channels; ++ch) {
            const double diff = image(x, y, ch) - c.color[ch];
            dc += diff * diff;
          }
          const double dx = x - c.cx;
          const double dy = y - c.cy;
          const double dist = dc + spatial_scale * (dx * dx + dy * dy);
          if (dist < best_dist(y, x)) {
            best_dist(y, x) = dist;
            labels(y, x) = k;
          }
        }
      }
    }

    // Pixels outside every window (possible after strong center drift) go to
    // the nearest center without the window restriction.
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (labels(y, x) >= 0) continue;
        double best = std::numeric_limits<double>::max();
        for (int k = 0; k < n_clusters; ++k) {
          const auto& c = clusters[k];
          double dc = 0.0;
          for (int ch = 0; ch < channels; ++ch) {
            const double diff = image(x, y, ch) - c.color[ch];
            dc += diff * diff;
          }
          const double dx = x - c.cx;
          const double dy = y - c.cy;
          const double dist = dc + spatial_scale * (dx * dx + dy * dy);
          if (dist < best) {
            best = dist;
            labels(y, x) = k;
          }
        }
      }
    }

    std::vector<Eigen::VectorXd> color_acc(
        n_clusters, Eigen::VectorXd::Zero(channels));
    std::vector<double> xacc(n_clusters, 0.0), yacc(n_clusters, 0.0);
    std::vector<std::int64_t> counts(n_clusters, 0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int k = labels(y, x);
        for (int ch = 0; ch < channels; ++ch)
          color_acc[k][ch] += image(x, y, ch);
        xacc[k] += x;
        yacc[k] += y;
        ++counts[k];
      }
    }
    for (int k = 0; k < n_clusters; ++k) {
      if (counts[k] == 0) continue;  // vanished cluster keeps its center
      clusters[k].color = color_acc[k] / static_cast<double>(counts[k]);
      clusters[k].cx = xacc[k] / counts[k];
      clusters[k].cy = yacc[k] / counts[k];
    }
  }

  enforce_connectivity(labels, n_clusters);
  const int count = remap_labels(labels);
  return finalize(std::move(labels), count);
}

void export_decomposition(const Decomposition& decomp,
                          const std::string& label_png_path,
                          const std::string& sidecar_json_path) {
  LabelMap map(decomp.width(), decomp.height());
  map.labels = decomp.labelmap;
  save_labelmap(map, label_png_path);

  json sidecar;
  sidecar["n"] = decomp.size();
  json bary = json::array();
  for (const auto& rec : decomp.superpixels)
    bary.push_back({rec.barycenter.x(), rec.barycenter.y()});
  sidecar["barycenters"] = std::move(bary);
  json edges = json::array();
  for (int i = 0; i < decomp.size(); ++i)
    for (int j : decomp.adjacency[i])
      if (i < j) edges.push_back({i, j});
  sidecar["adjacency"] = std::move(edges);
  sidecar["scan_order"] = decomp.scan_order;

  std::ofstream out(sidecar_json_path);
  if (!out) throw IoError("cannot write " + sidecar_json_path);
  out << sidecar.dump() << '\n';
  if (!out) throw IoError("failed writing " + sidecar_json_path);
}

Decomposition import_decomposition_files(const std::string& label_png_path,
                                         const std::string& sidecar_json_path) {
  Decomposition decomp =
      import_decomposition(load_labelmap_pixelwise(label_png_path));

  std::ifstream in(sidecar_json_path);
  if (!in) throw IoError("cannot open " + sidecar_json_path);
  json sidecar;
  try {
    in >> sidecar;
  } catch (const json::exception& e) {
    throw FormatError("bad decomposition sidecar " + sidecar_json_path + ": " +
                      e.what());
  }
  if (sidecar.value("n", -1) != decomp.size())
    throw FormatError("sidecar superpixel count disagrees with label image " +
                      label_png_path);
  return decomp;
}

double mean_superpixel_spacing(const Decomposition& decomp) {
  return std::sqrt(static_cast<double>(decomp.pixel_count()) / decomp.size());
}

}  // namespace spm
