// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: superpixel decomposition, superpatch
// correspondence search against an exemplar library, exemplar-based
// labeling, brute-force verification, and metric evaluation.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spm/decomposition.hpp"
#include "spm/errors.hpp"
#include "spm/flow.hpp"
#include "spm/fusion.hpp"
#include "spm/hash.hpp"
#include "spm/library.hpp"
#include "spm/metrics.hpp"
#include "spm/oracle.hpp"
#include "spm/parallel.hpp"
#include "spm/regularize.hpp"
#include "spm/search.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;

// Stream ids carving independent substreams out of the run seed.
constexpr std::uint64_t kStreamSearch = 0x5ea7c4;
constexpr std::uint64_t kStreamQueryDecomposition = 0xdec0;
constexpr std::uint64_t kStreamLibraryDecomposition = 0xdec1000;

struct Options {
  std::string config_path;
  std::string out = "out";
  std::uint64_t seed = 0;
  unsigned threads = spm::default_thread_count();

  // decomposition
  int superpixels = 0;  // 0: derived as round(h*w/256)
  double compactness = 0.2;
  int slic_iterations = 10;

  // features
  std::string feature = "cumulative-histogram";
  int bins = 16;
  double color_weight = 1.0;
  double texture_weight = 1.0;

  // search
  double radius = 0.0;
  int k = 1;
  int iterations = 5;
  double sigma1 = 0.0;  // 0: half the mean superpixel spacing
  double sigma2 = 0.0;  // 0: sqrt(2) * radius

  // fusion / regularization
  double alpha = 2.0;
  std::string beta = "4";
  double gamma = 0.5;
  double epsilon = 1e-12;

  bool cache_features = false;
  bool rebuild_cache = false;
  bool emit_flow = true;

  double beta_value() const {
    if (beta == "inf" || beta == "INF" || beta == "infinity")
      return std::numeric_limits<double>::infinity();
    return std::stod(beta);
  }
};

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

/// Referenced paths must exist before any work starts.
void require_exists(const std::string& path) {
  if (!path.empty() && !fs::exists(path))
    throw spm::DomainError("path does not exist: " + path);
}

/// Flat `key = value` file; '#' starts a comment. Returns the parsed pairs.
std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw spm::IoError("cannot open config file " + path);
  std::map<std::string, std::string> values;
  std::string line;
  int line_no = 0;
  auto trim = [](std::string s) {
    const auto from = s.find_first_not_of(" \t\r");
    const auto to = s.find_last_not_of(" \t\r");
    return from == std::string::npos ? std::string()
                                     : s.substr(from, to - from + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw spm::FormatError(path + ":" + std::to_string(line_no) +
                             ": expected key = value");
    values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return values;
}

void apply_config(const std::map<std::string, std::string>& cfg,
                  Options& opt) {
  auto get = [&](const char* key, auto& target) {
    const auto it = cfg.find(key);
    if (it == cfg.end()) return;
    std::istringstream in(it->second);
    in >> target;
    if (in.fail())
      throw spm::FormatError(std::string("bad config value for ") + key);
  };
  get("out", opt.out);
  get("seed", opt.seed);
  get("threads", opt.threads);
  get("superpixels", opt.superpixels);
  get("compactness", opt.compactness);
  get("slic-iterations", opt.slic_iterations);
  get("feature", opt.feature);
  get("bins", opt.bins);
  get("color-weight", opt.color_weight);
  get("texture-weight", opt.texture_weight);
  get("radius", opt.radius);
  get("k", opt.k);
  get("iterations", opt.iterations);
  get("sigma1", opt.sigma1);
  get("sigma2", opt.sigma2);
  get("alpha", opt.alpha);
  get("beta", opt.beta);
  get("gamma", opt.gamma);
  get("epsilon", opt.epsilon);
}

void write_resolved_config(const Options& opt, const std::string& command) {
  fs::create_directories(opt.out);
  std::ofstream out(fs::path(opt.out) / "config.txt");
  out << "command = " << command << "\n"
      << "seed = " << opt.seed << "\n"
      << "threads = " << opt.threads << "\n"
      << "superpixels = " << opt.superpixels << "\n"
      << "compactness = " << format_double(opt.compactness) << "\n"
      << "slic-iterations = " << opt.slic_iterations << "\n"
      << "feature = " << opt.feature << "\n"
      << "bins = " << opt.bins << "\n"
      << "color-weight = " << format_double(opt.color_weight) << "\n"
      << "texture-weight = " << format_double(opt.texture_weight) << "\n"
      << "radius = " << format_double(opt.radius) << "\n"
      << "k = " << opt.k << "\n"
      << "iterations = " << opt.iterations << "\n"
      << "sigma1 = " << format_double(opt.sigma1) << "\n"
      << "sigma2 = " << format_double(opt.sigma2) << "\n"
      << "alpha = " << format_double(opt.alpha) << "\n"
      << "beta = " << opt.beta << "\n"
      << "gamma = " << format_double(opt.gamma) << "\n"
      << "epsilon = " << format_double(opt.epsilon) << "\n";
  if (!out) throw spm::IoError("cannot write resolved config under " + opt.out);
}

spm::FeatureConfig feature_config(const Options& opt) {
  spm::FeatureConfig config = spm::FeatureConfig::parse(opt.feature);
  config.bins = opt.bins;
  config.color_weight = opt.color_weight;
  config.texture_weight = opt.texture_weight;
  return config;
}

int derived_superpixel_count(const spm::ImageGrid& image, const Options& opt) {
  if (opt.superpixels > 0) return opt.superpixels;
  const auto target =
      static_cast<int>(std::lround(image.pixel_count() / 256.0));
  return std::max(1, target);
}

/// Loads the decomposition for an image: an explicit file if given, else a
/// cache beside the image, else a fresh SLIC run that seeds the cache.
spm::Decomposition obtain_decomposition(const std::string& image_path,
                                        const spm::ImageGrid& image,
                                        const std::string& explicit_path,
                                        const Options& opt,
                                        const spm::RandomSource& rng) {
  if (!explicit_path.empty()) {
    fs::path sidecar(explicit_path);
    sidecar.replace_extension(".json");
    return spm::import_decomposition_files(explicit_path, sidecar.string());
  }
  const std::string cache_png = image_path + ".decomp.png";
  const std::string cache_json = image_path + ".decomp.json";
  if (fs::exists(cache_png) && fs::exists(cache_json) && !opt.rebuild_cache)
    return spm::import_decomposition_files(cache_png, cache_json);

  spm::Decomposition decomp =
      spm::slic_decompose(image, derived_superpixel_count(image, opt),
                          opt.compactness, opt.slic_iterations, rng);
  spm::export_decomposition(decomp, cache_png, cache_json);
  return decomp;
}

spm::FeatureTable obtain_features(const std::string& image_path,
                                  const spm::ImageGrid& image,
                                  const spm::Decomposition& decomp,
                                  const spm::FeatureConfig& config,
                                  const Options& opt) {
  if (!opt.cache_features)
    return spm::compute_features(decomp, image, config);
  const std::string cache_path = image_path + ".features.bin";
  const std::uint64_t image_hash = image.content_hash();
  const std::uint64_t decomp_hash = decomp.content_hash();
  const std::uint64_t config_hash = config.content_hash();
  if (!opt.rebuild_cache) {
    auto cached = spm::load_feature_cache(cache_path, image_hash, decomp_hash,
                                          config_hash);
    if (cached) return std::move(*cached);
  }
  spm::FeatureTable table = spm::compute_features(decomp, image, config);
  spm::save_feature_cache(cache_path, image_hash, decomp_hash, config_hash,
                          table);
  return table;
}

struct ManifestEntry {
  std::string image;
  std::string labels;
  std::string decomposition;
};

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw spm::IoError("cannot open manifest " + path);
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw spm::FormatError("bad manifest " + path + ": " + e.what());
  }
  if (!manifest.is_array() || manifest.empty())
    throw spm::FormatError("manifest must be a non-empty JSON array: " + path);

  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&base](const std::string& p) {
    return fs::path(p).is_absolute() ? p : (base / p).string();
  };
  std::vector<ManifestEntry> entries;
  for (const auto& item : manifest) {
    ManifestEntry entry;
    entry.image = resolve(item.at("image").get<std::string>());
    if (item.contains("labels"))
      entry.labels = resolve(item.at("labels").get<std::string>());
    if (item.contains("decomposition"))
      entry.decomposition = resolve(item.at("decomposition").get<std::string>());
    entries.push_back(std::move(entry));
  }
  return entries;
}

spm::ExemplarLibrary build_library(const std::vector<ManifestEntry>& entries,
                                   const Options& opt,
                                   const spm::RandomSource& root,
                                   bool require_labels) {
  spm::ExemplarLibrary library(feature_config(opt));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& m = entries[i];
    spm::LibraryEntry entry;
    entry.name = m.image;
    entry.image = spm::load_image(m.image);
    entry.decomposition = obtain_decomposition(
        m.image, entry.image, m.decomposition, opt,
        root.split(kStreamLibraryDecomposition + i));
    entry.features = obtain_features(m.image, entry.image,
                                     entry.decomposition, library.config(), opt);
    if (!m.labels.empty()) {
      const spm::LabelMap truth = spm::load_labelmap_pixelwise(m.labels);
      entry.superpixel_labels =
          spm::superpixel_labels_from_pixels(entry.decomposition, truth);
    } else if (require_labels) {
      throw spm::DomainError("library entry has no labels: " + m.image);
    }
    library.add_entry(std::move(entry));
  }
  return library;
}

spm::SpmParams search_params(const Options& opt) {
  spm::SpmParams params;
  params.radius = opt.radius;
  params.k = opt.k;
  params.iterations = opt.iterations;
  params.distance.sigma1 = opt.sigma1;  // <= 0 derives the default
  params.distance.sigma2 = opt.sigma2;
  return params;
}

void save_probability_maps(const spm::LabelFusionMap& fusion,
                           const spm::Decomposition& decomp,
                           const fs::path& out_dir) {
  for (int m = 0; m < fusion.label_count(); ++m) {
    spm::ImageGrid prob(decomp.width(), decomp.height(), 1);
    for (int y = 0; y < decomp.height(); ++y)
      for (int x = 0; x < decomp.width(); ++x)
        prob(x, y, 0) = static_cast<float>(
            fusion.probabilities(decomp.superpixel_at(x, y), m));
    const std::string stem = "probability_" + std::to_string(m);
    spm::save_image(prob, (out_dir / (stem + ".png")).string(), 16);

    std::ofstream csv(out_dir / (stem + ".csv"));
    csv.precision(17);
    for (int y = 0; y < decomp.height(); ++y) {
      for (int x = 0; x < decomp.width(); ++x) {
        if (x) csv << ',';
        csv << fusion.probabilities(decomp.superpixel_at(x, y), m);
      }
      csv << '\n';
    }
  }
}

int cmd_decompose(const std::string& image_path, const Options& opt) {
  require_exists(image_path);
  write_resolved_config(opt, "decompose");
  const spm::ImageGrid image = spm::load_image(image_path);
  const spm::RandomSource root(opt.seed);
  const spm::Decomposition decomp =
      spm::slic_decompose(image, derived_superpixel_count(image, opt),
                          opt.compactness, opt.slic_iterations,
                          root.split(kStreamQueryDecomposition));
  const fs::path out_dir(opt.out);
  const std::string stem = fs::path(image_path).stem().string();
  spm::export_decomposition(decomp,
                            (out_dir / (stem + ".decomp.png")).string(),
                            (out_dir / (stem + ".decomp.json")).string());
  std::cout << "decomposed " << image_path << " into " << decomp.size()
            << " superpixels\n";
  return 0;
}

struct QueryData {
  spm::ImageGrid image;
  spm::Decomposition decomposition;
  spm::FeatureTable features;
};

QueryData load_query(const std::string& image_path,
                     const std::string& decomp_path, const Options& opt,
                     const spm::RandomSource& root,
                     const spm::FeatureConfig& config) {
  QueryData query;
  query.image = spm::load_image(image_path);
  query.decomposition =
      obtain_decomposition(image_path, query.image, decomp_path, opt,
                           root.split(kStreamQueryDecomposition));
  query.features = obtain_features(image_path, query.image,
                                   query.decomposition, config, opt);
  return query;
}

int cmd_match(const std::string& image_path, const std::string& manifest_path,
              const std::string& decomp_path, const Options& opt) {
  require_exists(image_path);
  require_exists(manifest_path);
  require_exists(decomp_path);
  write_resolved_config(opt, "match");
  const spm::RandomSource root(opt.seed);
  const spm::ExemplarLibrary library =
      build_library(read_manifest(manifest_path), opt, root, false);
  const QueryData query =
      load_query(image_path, decomp_path, opt, root, library.config());

  spm::SearchStats stats;
  const spm::SearchContext ctx(query.decomposition, query.features, library,
                               search_params(opt));
  const spm::AnnField field =
      spm::spm_search(ctx, root.split(kStreamSearch), opt.threads, &stats);

  const fs::path out_dir(opt.out);
  spm::save_ann_field(field, (out_dir / "annfield.jsonl").string());
  if (opt.emit_flow) {
    const spm::DisplacementField displacement =
        spm::displacement_field(field, query.decomposition, library);
    spm::save_image(spm::render_flow(displacement, query.decomposition),
                    (out_dir / "flow.png").string());
  }
  std::cout << "search: " << stats.search_seconds << " s, "
            << stats.distance_evaluations << " distance evaluations ("
            << stats.candidate_evaluations_per_superpixel_per_iteration
            << " per superpixel per iteration)\n";
  return 0;
}

int cmd_label(const std::string& image_path, const std::string& manifest_path,
              const std::string& decomp_path, const std::string& truth_path,
              const Options& opt) {
  require_exists(image_path);
  require_exists(manifest_path);
  require_exists(decomp_path);
  require_exists(truth_path);
  write_resolved_config(opt, "label");
  const spm::RandomSource root(opt.seed);
  const spm::ExemplarLibrary library =
      build_library(read_manifest(manifest_path), opt, root, true);
  const QueryData query =
      load_query(image_path, decomp_path, opt, root, library.config());

  spm::SearchStats stats;
  const spm::SearchContext ctx(query.decomposition, query.features, library,
                               search_params(opt));
  const spm::AnnField field =
      spm::spm_search(ctx, root.split(kStreamSearch), opt.threads, &stats);

  spm::FusionParams fusion_params;
  fusion_params.alpha = opt.alpha;
  fusion_params.beta = opt.beta_value();
  fusion_params.epsilon = opt.epsilon;

  const auto fusion_started = std::chrono::steady_clock::now();
  const spm::LabelFusionMap fusion =
      spm::label_fusion(field, query.decomposition, library, fusion_params);
  const std::vector<int> argmax = spm::argmax_label(fusion);
  const double fusion_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    fusion_started)
          .count();

  spm::RegularizeParams reg_params;
  reg_params.gamma = opt.gamma;
  const auto reg_started = std::chrono::steady_clock::now();
  const std::vector<int> regularized = spm::regularize(
      fusion, query.decomposition, query.features, reg_params);
  const double reg_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    reg_started)
          .count();

  const fs::path out_dir(opt.out);
  spm::save_ann_field(field, (out_dir / "annfield.jsonl").string());
  save_probability_maps(fusion, query.decomposition, out_dir);
  spm::save_labelmap(spm::expand_to_pixels(argmax, query.decomposition),
                     (out_dir / "labeling_argmax.png").string());
  spm::save_labelmap(spm::expand_to_pixels(regularized, query.decomposition),
                     (out_dir / "labeling.png").string());

  if (!truth_path.empty()) {
    const spm::LabelMap truth = spm::load_labelmap_pixelwise(truth_path);
    const std::vector<int> truth_sp =
        spm::superpixel_labels_from_pixels(query.decomposition, truth);
    spm::MetricsReport report =
        spm::accuracy_metrics(regularized, truth_sp, query.decomposition,
                              &fusion);
    report.wall_time_sec.search = stats.search_seconds;
    report.wall_time_sec.fusion = fusion_seconds;
    report.wall_time_sec.regularization = reg_seconds;
    report.distance_evaluations = stats.distance_evaluations;
    report.evaluations_per_superpixel_per_iteration =
        stats.candidate_evaluations_per_superpixel_per_iteration;
    std::ofstream json_out(out_dir / "metrics.json");
    json_out << report.to_json() << '\n';
    std::cout << report.to_table();
  } else {
    std::cout << "search: " << stats.search_seconds << " s, fusion: "
              << fusion_seconds << " s, regularization: " << reg_seconds
              << " s\n";
  }
  return 0;
}

int cmd_oracle(const std::string& image_path, const std::string& manifest_path,
               const std::string& decomp_path, const Options& opt) {
  require_exists(image_path);
  require_exists(manifest_path);
  require_exists(decomp_path);
  write_resolved_config(opt, "oracle");
  const spm::RandomSource root(opt.seed);
  const spm::ExemplarLibrary library =
      build_library(read_manifest(manifest_path), opt, root, false);
  const QueryData query =
      load_query(image_path, decomp_path, opt, root, library.config());

  const spm::SearchContext ctx(query.decomposition, query.features, library,
                               search_params(opt));
  const spm::AnnField field =
      spm::spm_search(ctx, root.split(kStreamSearch), opt.threads);
  const std::vector<spm::Match> oracle =
      spm::brute_force_match(ctx, opt.threads);

  json report;
  json rows = json::array();
  int within = 0;
  std::vector<double> ratios;
  for (int i = 0; i < query.decomposition.size(); ++i) {
    const spm::Match best = field.best(i);
    const double ratio = oracle[i].distance > 0.0
                             ? best.distance / oracle[i].distance
                             : (best.distance == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
    ratios.push_back(ratio);
    within += ratio <= 1.05;
    rows.push_back({{"i", i},
                    {"oracle", oracle[i].distance},
                    {"spm", best.distance},
                    {"ratio", ratio}});
  }
  report["superpixels"] = std::move(rows);
  report["fraction_within_1.05"] =
      static_cast<double>(within) / query.decomposition.size();
  report["median_ratio"] = spm::median(ratios);

  const fs::path out_dir(opt.out);
  std::ofstream out(out_dir / "oracle_report.json");
  out << report.dump(2) << '\n';
  std::cout << "oracle agreement: " << report["fraction_within_1.05"]
            << " of superpixels within 1.05x of the exhaustive minimum\n";
  return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& truth_path,
             const std::string& decomp_path, const Options& opt) {
  require_exists(pred_path);
  require_exists(truth_path);
  require_exists(decomp_path);
  write_resolved_config(opt, "eval");
  const spm::LabelMap predicted = spm::load_labelmap_pixelwise(pred_path);
  const spm::LabelMap truth = spm::load_labelmap_pixelwise(truth_path);
  if (predicted.width() != truth.width() ||
      predicted.height() != truth.height())
    throw spm::DomainError("prediction and truth differ in size");

  spm::MetricsReport report;
  report.pixel_accuracy = spm::pixel_accuracy(predicted, truth);
  const int classes =
      std::max(predicted.label_count(), truth.label_count());
  report.dice.resize(classes);
  for (int m = 0; m < classes; ++m)
    report.dice[m] = spm::dice_for_label(predicted, truth, m);

  if (!decomp_path.empty()) {
    fs::path sidecar(decomp_path);
    sidecar.replace_extension(".json");
    const spm::Decomposition decomp =
        spm::import_decomposition_files(decomp_path, sidecar.string());
    report.superpixel_accuracy = spm::superpixel_accuracy(
        spm::superpixel_labels_from_pixels(decomp, predicted),
        spm::superpixel_labels_from_pixels(decomp, truth));
  }

  const fs::path out_dir(opt.out);
  std::ofstream json_out(out_dir / "metrics.json");
  json_out << report.to_json() << '\n';
  std::cout << report.to_table();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;

  // The config file seeds the defaults; explicit flags override it.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) {
      opt.config_path = argv[i + 1];
    } else if (arg.rfind("--config=", 0) == 0) {
      opt.config_path = arg.substr(9);
    }
  }
  try {
    if (!opt.config_path.empty())
      apply_config(read_config_file(opt.config_path), opt);
  } catch (const spm::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  CLI::App app{"superpatch correspondence search and exemplar-based labeling"};
  app.require_subcommand(1);
  app.add_option("--config", opt.config_path,
                 "flat key = value config file (flags win)");

  std::string image_path, manifest_path, decomp_path, truth_path, pred_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path,
                    "flat key = value config file (flags win)");
    cmd->add_option("--out", opt.out, "output directory");
    cmd->add_option("--seed", opt.seed, "random seed");
    cmd->add_option("--threads", opt.threads, "worker cap");
    cmd->add_option("--superpixels", opt.superpixels,
                    "decomposition target count (0: from image size)");
    cmd->add_option("--compactness", opt.compactness, "SLIC compactness");
    cmd->add_option("--slic-iterations", opt.slic_iterations);
    cmd->add_option("--feature", opt.feature,
                    "mean-color | cumulative-histogram | "
                    "orientation-histogram | concat");
    cmd->add_option("--bins", opt.bins, "histogram bins per channel");
    cmd->add_option("--color-weight", opt.color_weight);
    cmd->add_option("--texture-weight", opt.texture_weight);
    cmd->add_flag("--cache-features", opt.cache_features,
                  "cache feature tables beside images");
    cmd->add_flag("--rebuild-cache", opt.rebuild_cache,
                  "recompute cached decompositions and features");
  };
  auto add_search = [&](CLI::App* cmd) {
    cmd->add_option("--radius", opt.radius, "superpatch radius, pixels");
    cmd->add_option("--k", opt.k, "independent searches")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--iters", opt.iterations, "search iterations");
    cmd->add_option("--sigma1", opt.sigma1, "registration scale (0: auto)");
    cmd->add_option("--sigma2", opt.sigma2, "member weight scale (0: auto)");
    cmd->add_option("--test-decomp", decomp_path,
                    "decomposition label PNG for the test image");
  };

  CLI::App* decompose =
      app.add_subcommand("decompose", "superpixel decomposition of an image");
  decompose->add_option("image", image_path)->required();
  decompose->add_option("--k", opt.superpixels, "superpixel target count")
      ->check(CLI::PositiveNumber);
  add_common(decompose);

  CLI::App* match = app.add_subcommand(
      "match", "correspondence search against a library manifest");
  match->add_option("image", image_path)->required();
  match->add_option("manifest", manifest_path)->required();
  add_common(match);
  add_search(match);
  match->add_flag("!--no-flow", opt.emit_flow, "skip the flow rendering");

  CLI::App* label = app.add_subcommand(
      "label", "search, label fusion and regularized labeling");
  label->add_option("image", image_path)->required();
  label->add_option("manifest", manifest_path)->required();
  add_common(label);
  add_search(label);
  label->add_option("--truth", truth_path, "pixel label map for metrics");
  label->add_option("--alpha", opt.alpha);
  label->add_option("--beta", opt.beta, "spatial prior scale or 'inf'");
  label->add_option("--gamma", opt.gamma, "regularization scale");
  label->add_option("--epsilon", opt.epsilon);

  CLI::App* oracle = app.add_subcommand(
      "oracle", "exhaustive-search comparison for the randomized search");
  oracle->add_option("image", image_path)->required();
  oracle->add_option("manifest", manifest_path)->required();
  add_common(oracle);
  add_search(oracle);

  CLI::App* eval =
      app.add_subcommand("eval", "metrics between two pixel label maps");
  eval->add_option("prediction", pred_path)->required();
  eval->add_option("truth", truth_path)->required();
  eval->add_option("--decomp", decomp_path,
                   "decomposition label PNG for superpixel accuracy");
  add_common(eval);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*decompose) return cmd_decompose(image_path, opt);
    if (*match) return cmd_match(image_path, manifest_path, decomp_path, opt);
    if (*label)
      return cmd_label(image_path, manifest_path, decomp_path, truth_path, opt);
    if (*oracle) return cmd_oracle(image_path, manifest_path, decomp_path, opt);
    if (*eval) return cmd_eval(pred_path, truth_path, decomp_path, opt);
  } catch (const spm::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const spm::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const spm::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
