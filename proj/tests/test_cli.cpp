// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the installed command-line surface; every test shells
// out to the real binary.

#include <doctest.h>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "spm/image.hpp"

namespace fs = std::filesystem;

namespace {

const char* cli_path() { return SPM_CLI_PATH; }

int run(const std::string& args) {
  const std::string command = std::string(cli_path()) + " " + args +
                              " > /dev/null 2> /dev/null";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

fs::path workdir() {
  // Per-process directory: cached artifacts must never leak across runs of
  // differently built binaries.
  static const fs::path dir =
      fs::temp_directory_path() /
      ("spm_cli_tests_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_test_data(const fs::path& dir) {
  using namespace spm;
  const ImageGrid query = testing::make_textured_image(32, 32, 1);
  save_image(query, (dir / "query.png").string());
  for (int e = 0; e < 2; ++e) {
    const ImageGrid img = testing::make_textured_image(32, 32, 10 + e);
    save_image(img, (dir / ("lib" + std::to_string(e) + ".png")).string());
    LabelMap labels(32, 32);
    labels.labels.rightCols(16) = 1 + e;
    save_labelmap(labels,
                  (dir / ("lib" + std::to_string(e) + "_labels.png")).string());
  }
  std::ofstream manifest(dir / "manifest.json");
  manifest << R"([{"image": "lib0.png", "labels": "lib0_labels.png"},)"
           << R"({"image": "lib1.png", "labels": "lib1_labels.png"}])";
}

}  // namespace

TEST_CASE("missing input files exit with the validation code") {
  const fs::path dir = workdir();
  CHECK(run("decompose " + (dir / "nope.png").string() + " --k 4 --out " +
            (dir / "o1").string()) == 2);
}

TEST_CASE("invalid parameters exit with the validation code") {
  const fs::path dir = workdir();
  write_test_data(dir);
  CHECK(run("decompose " + (dir / "query.png").string() + " --k 0 --out " +
            (dir / "o2").string()) == 2);
}

TEST_CASE("decompose writes the label image and sidecar") {
  const fs::path dir = workdir();
  write_test_data(dir);
  const fs::path out = dir / "o3";
  REQUIRE(run("decompose " + (dir / "query.png").string() + " --k 9 --out " +
              out.string()) == 0);
  CHECK(fs::exists(out / "query.decomp.png"));
  CHECK(fs::exists(out / "query.decomp.json"));
  CHECK(fs::exists(out / "config.txt"));
}

TEST_CASE("match emits the correspondence field and flow rendering") {
  const fs::path dir = workdir();
  write_test_data(dir);
  const fs::path out = dir / "o4";
  REQUIRE(run("match " + (dir / "query.png").string() + " " +
              (dir / "manifest.json").string() +
              " --k 2 --radius 8 --iters 3 --seed 5 --superpixels 9 --out " +
              out.string()) == 0);
  CHECK(fs::exists(out / "annfield.jsonl"));
  CHECK(fs::exists(out / "flow.png"));
}

TEST_CASE("equal seeds give byte-identical field and labeling outputs") {
  const fs::path dir = workdir();
  write_test_data(dir);
  const std::string common =
      "label " + (dir / "query.png").string() + " " +
      (dir / "manifest.json").string() +
      " --k 3 --radius 8 --iters 3 --seed 7 --superpixels 9 --out ";
  const fs::path out_a = dir / "o5a";
  const fs::path out_b = dir / "o5b";
  REQUIRE(run(common + out_a.string()) == 0);
  REQUIRE(run(common + out_b.string()) == 0);
  CHECK(file_bytes(out_a / "annfield.jsonl") ==
        file_bytes(out_b / "annfield.jsonl"));
  CHECK(file_bytes(out_a / "labeling.png") ==
        file_bytes(out_b / "labeling.png"));
  CHECK(!file_bytes(out_a / "annfield.jsonl").empty());
}

TEST_CASE("labeling against itself scores perfectly through eval") {
  const fs::path dir = workdir();
  write_test_data(dir);
  const fs::path out = dir / "o6";
  fs::create_directories(out);
  using namespace spm;
  LabelMap pred(8, 8);
  pred.labels.rightCols(4) = 1;
  save_labelmap(pred, (out / "pred.png").string());
  REQUIRE(run("eval " + (out / "pred.png").string() + " " +
              (out / "pred.png").string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "metrics.json"));
}

TEST_CASE("stale feature caches are rejected with advice") {
  const fs::path dir = workdir() / "cache_case";
  fs::create_directories(dir);
  write_test_data(dir);
  const std::string base = "match " + (dir / "query.png").string() + " " +
                           (dir / "manifest.json").string() +
                           " --k 1 --radius 4 --iters 1 --superpixels 9 "
                           "--cache-features --out ";
  REQUIRE(run(base + (dir / "c1").string()) == 0);
  // A different feature configuration must refuse the existing cache.
  CHECK(run(base + (dir / "c2").string() + " --feature mean-color") == 2);
  // Rebuilding clears the mismatch.
  CHECK(run(base + (dir / "c3").string() +
            " --feature mean-color --rebuild-cache") == 0);
}

TEST_CASE("config file values are overridden by explicit flags") {
  const fs::path dir = workdir();
  write_test_data(dir);
  std::ofstream cfg(dir / "run.cfg");
  cfg << "k = 2\nradius = 8\nsuperpixels = 9\niterations = 2\n";
  cfg.close();
  const fs::path out = dir / "o7";
  REQUIRE(run("match " + (dir / "query.png").string() + " " +
              (dir / "manifest.json").string() + " --config " +
              (dir / "run.cfg").string() + " --seed 3 --out " +
              out.string()) == 0);
  const std::string echoed = file_bytes(out / "config.txt");
  CHECK(echoed.find("k = 2") != std::string::npos);
  CHECK(echoed.find("radius = 8") != std::string::npos);

  const fs::path out2 = dir / "o8";
  REQUIRE(run("match " + (dir / "query.png").string() + " " +
              (dir / "manifest.json").string() + " --config " +
              (dir / "run.cfg").string() + " --k 4 --seed 3 --out " +
              out2.string()) == 0);
  CHECK(file_bytes(out2 / "config.txt").find("k = 4") != std::string::npos);
}
