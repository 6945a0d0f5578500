// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <deque>
#include <filesystem>
#include <numeric>

#include "helpers.hpp"
#include "spm/decomposition.hpp"
#include "spm/errors.hpp"

using namespace spm;
using spm::testing::make_decomposition;
using spm::testing::make_labelmap;
using spm::testing::make_textured_image;
using spm::testing::make_uniform_image;

TEST_CASE("uniform image with K=4 gives four near-square superpixels") {
  const ImageGrid image = make_uniform_image(64, 64, 0.5f);
  const Decomposition decomp =
      slic_decompose(image, 4, 0.2, 10, RandomSource(11));
  REQUIRE(decomp.size() == 4);
  std::int64_t total = 0;
  for (const auto& rec : decomp.superpixels) {
    total += rec.pixel_count;
    CHECK(rec.pixel_count > 700);
    CHECK(rec.pixel_count < 1400);
    CHECK(rec.connected);
  }
  CHECK(total == 64 * 64);
}

TEST_CASE("250x250 with K=250 lands near 16x16 superpixels") {
  const ImageGrid image = make_textured_image(250, 250, 21);
  const Decomposition decomp =
      slic_decompose(image, 250, 0.2, 10, RandomSource(3));
  CHECK(decomp.size() >= 200);
  CHECK(decomp.size() <= 300);
  const double mean_area = 250.0 * 250.0 / decomp.size();
  CHECK(mean_area > 200.0);
  CHECK(mean_area < 320.0);
}

TEST_CASE("saturated K gives one superpixel per pixel") {
  const ImageGrid image = make_uniform_image(6, 6, 0.5f);
  const Decomposition decomp =
      slic_decompose(image, 36, 0.2, 10, RandomSource(0));
  REQUIRE(decomp.size() == 36);
  for (const auto& rec : decomp.superpixels) CHECK(rec.pixel_count == 1);
}

TEST_CASE("invalid K is a domain error") {
  const ImageGrid image = make_uniform_image(8, 8, 0.5f);
  CHECK_THROWS_AS(slic_decompose(image, 0, 0.2, 10, RandomSource(0)),
                  DomainError);
  CHECK_THROWS_AS(slic_decompose(image, 65, 0.2, 10, RandomSource(0)),
                  DomainError);
}

TEST_CASE("slic is deterministic per seed and varies across seeds") {
  const ImageGrid image = make_textured_image(48, 48, 8);
  const Decomposition a = slic_decompose(image, 16, 0.2, 10, RandomSource(5));
  const Decomposition b = slic_decompose(image, 16, 0.2, 10, RandomSource(5));
  CHECK((a.labelmap == b.labelmap).all());
  const Decomposition c = slic_decompose(image, 16, 0.2, 10, RandomSource(6));
  CHECK(!(a.labelmap == c.labelmap).all());
}

TEST_CASE("import computes barycenters from pixel centers") {
  const Decomposition decomp = make_decomposition({{0, 0}, {1, 1}});
  REQUIRE(decomp.size() == 2);
  CHECK(decomp.superpixels[0].barycenter.x() == doctest::Approx(0.5));
  CHECK(decomp.superpixels[0].barycenter.y() == doctest::Approx(0.0));
  CHECK(decomp.superpixels[1].barycenter.x() == doctest::Approx(0.5));
  CHECK(decomp.superpixels[1].barycenter.y() == doctest::Approx(1.0));
}

TEST_CASE("import remaps sparse label values") {
  const Decomposition decomp = make_decomposition({{3, 3}, {7, 7}});
  REQUIRE(decomp.size() == 2);
  CHECK(decomp.superpixel_at(0, 0) == 0);
  CHECK(decomp.superpixel_at(0, 1) == 1);
}

TEST_CASE("import keeps split superpixels but flags them") {
  const Decomposition decomp = make_decomposition({{0, 1, 0}, {1, 1, 1}});
  REQUIRE(decomp.size() == 2);
  CHECK(!decomp.superpixels[0].connected);
  CHECK(decomp.superpixels[1].connected);
}

TEST_CASE("block grid adjacency excludes diagonals") {
  const Decomposition decomp = testing::make_block_decomposition(2, 2, 2, 2);
  REQUIRE(decomp.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(decomp.adjacency[i].size() == 2);
  CHECK(decomp.adjacency[0] == std::vector<int>{1, 2});
  CHECK(decomp.adjacency[3] == std::vector<int>{1, 2});
}

TEST_CASE("stripe adjacency distinguishes middle from ends") {
  const Decomposition decomp = make_decomposition({{0}, {1}, {2}});
  CHECK(decomp.adjacency[0] == std::vector<int>{1});
  CHECK(decomp.adjacency[1] == std::vector<int>{0, 2});
  CHECK(decomp.adjacency[2] == std::vector<int>{1});
}

TEST_CASE("single superpixel has an empty graph") {
  const Decomposition decomp = make_decomposition({{0, 0}, {0, 0}});
  REQUIRE(decomp.size() == 1);
  CHECK(decomp.adjacency[0].empty());
  CHECK(decomp.scan_order == std::vector<int>{0});
}

TEST_CASE("scan order follows first raster occurrence") {
  CHECK(make_decomposition({{0, 0, 1}, {2, 2, 1}}).scan_order ==
        std::vector<int>{0, 1, 2});
  CHECK(make_decomposition({{2, 2}, {0, 1}}).scan_order ==
        std::vector<int>{2, 0, 1});
}

TEST_CASE("partition and barycenter invariants hold for slic output") {
  const ImageGrid image = make_textured_image(40, 30, 77);
  const Decomposition decomp =
      slic_decompose(image, 12, 0.2, 10, RandomSource(2));
  std::int64_t total = 0;
  std::vector<Eigen::Vector2d> sums(decomp.size(), Eigen::Vector2d::Zero());
  std::vector<std::int64_t> counts(decomp.size(), 0);
  for (int y = 0; y < decomp.height(); ++y)
    for (int x = 0; x < decomp.width(); ++x) {
      const int i = decomp.superpixel_at(x, y);
      sums[i] += Eigen::Vector2d(x, y);
      ++counts[i];
      ++total;
    }
  CHECK(total == decomp.pixel_count());
  for (int i = 0; i < decomp.size(); ++i) {
    CHECK(counts[i] == decomp.superpixels[i].pixel_count);
    const Eigen::Vector2d mean = sums[i] / static_cast<double>(counts[i]);
    CHECK((mean - decomp.superpixels[i].barycenter).norm() < 1e-9);
    CHECK(decomp.superpixels[i].connected);  // enforced for slic output
  }
}

TEST_CASE("adjacency graph of a full decomposition is connected") {
  const ImageGrid image = make_textured_image(32, 32, 13);
  const Decomposition decomp =
      slic_decompose(image, 10, 0.2, 10, RandomSource(4));
  std::vector<char> seen(decomp.size(), 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  int visited = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    ++visited;
    for (const int v : decomp.adjacency[u])
      if (!seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
  }
  CHECK(visited == decomp.size());
}

TEST_CASE("export and import of decomposition files round trips") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "spm_decomp_tests";
  fs::create_directories(dir);
  const ImageGrid image = make_textured_image(32, 24, 31);
  const Decomposition decomp =
      slic_decompose(image, 8, 0.2, 10, RandomSource(9));
  const std::string png = (dir / "d.png").string();
  const std::string json = (dir / "d.json").string();
  export_decomposition(decomp, png, json);
  const Decomposition loaded = import_decomposition_files(png, json);
  CHECK((loaded.labelmap == decomp.labelmap).all());
  CHECK(loaded.scan_order == decomp.scan_order);
  for (int i = 0; i < decomp.size(); ++i)
    CHECK((loaded.superpixels[i].barycenter -
           decomp.superpixels[i].barycenter).norm() < 1e-12);
}

TEST_CASE("empty label map is rejected") {
  LabelMap map;
  CHECK_THROWS_AS(import_decomposition(map), DomainError);
}
