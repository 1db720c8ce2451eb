#include "cli.hpp"

#include <curl/curl.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "scssim/cupid.hpp"
#include "scssim/distortions.hpp"
#include "scssim/error.hpp"
#include "scssim/image.hpp"
#include "scssim/metric.hpp"
#include "scssim/parallel.hpp"
#include "scssim/synthetic.hpp"

namespace scssim::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

struct MetricFlags {
  int cuts = 64;
  double lambda = 25.0;

  MetricConfig config() const {
    MetricConfig cfg;
    cfg.n_cuts = cuts;
    cfg.lambda = lambda;
    cfg.validate();
    return cfg;
  }
};

void add_metric_flags(CLI::App* cmd, MetricFlags& flags) {
  cmd->add_option("--cuts", flags.cuts, "Number of greedy cuts per tree")->capture_default_str();
  cmd->add_option("--lambda", flags.lambda, "Decay rate of the similarity")->capture_default_str();
}

std::string format_fixed6(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, 6);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (const char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string read_text(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorKind::FileNotFound, "no such file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to `path`, or to `out` when path is empty or "-".
void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::Io, "cannot write: " + path);
  file << text;
  if (!file) throw Error(ErrorKind::Io, "write failed: " + path);
}

double parse_number(const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw Error(ErrorKind::InvalidParameter, "not a number: '" + text + "'");
  }
  return value;
}

// "a,b,c" or "start:stop:step" (stop included).
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw Error(ErrorKind::InvalidParameter, "grid range must be start:stop:step");
    const double start = parse_number(parts[0]);
    const double stop = parse_number(parts[1]);
    const double step = parse_number(parts[2]);
    if (!(step > 0.0) || stop < start) throw Error(ErrorKind::InvalidParameter, "empty grid range");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) grid.push_back(start + static_cast<double>(i) * step);
  } else {
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ',');) grid.push_back(parse_number(item));
  }
  if (grid.empty()) throw Error(ErrorKind::InvalidParameter, "empty grid");
  return grid;
}

std::vector<double> parse_sizes(const std::string& spec) {
  std::vector<double> sizes = parse_grid(spec);
  for (const double s : sizes) {
    if (s < 2 || s != std::floor(s) || s > kMaxImageExtent) {
      throw Error(ErrorKind::InvalidParameter, "sizes must be integers in [2, 16384]");
    }
  }
  return sizes;
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".ppm";
}

ordered_json direction_json(const DirectionalResult& d) {
  return {{"similarity", d.similarity},
          {"mean_log_ratio", d.mean_log_ratio},
          {"c0", d.reference_curve.values},
          {"c", d.test_curve.values}};
}

PreparedImage prepare(const RgbImage& img, const std::string& tree_path, int cuts) {
  if (tree_path.empty()) return PreparedImage(img, cuts);
  return PreparedImage(img, tree_from_json(read_text(tree_path)), cuts);
}

// ---------------------------------------------------------------- commands

struct CompareArgs {
  std::string reference;
  std::string test;
  std::string reference_tree;
  std::string test_tree;
  bool json = false;
  MetricFlags metric;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  const MetricConfig cfg = a.metric.config();
  const PreparedImage ref = prepare(load_image(a.reference), a.reference_tree, cfg.n_cuts);
  const PreparedImage test = prepare(load_image(a.test), a.test_tree, cfg.n_cuts);
  const ScssimResult r = scssim_detailed(test, ref, cfg);
  if (!a.json) {
    out << format_fixed6(r.score) << "\n";
    return kOk;
  }
  const ordered_json doc = {
      {"scssim", r.score},
      {"config", {{"cuts", cfg.n_cuts}, {"lambda", cfg.lambda}}},
      {"reference", a.reference},
      {"test", a.test},
      {"test_vs_reference", direction_json(r.a_vs_b)},
      {"reference_vs_test", direction_json(r.b_vs_a)},
  };
  out << doc.dump(2) << "\n";
  return kOk;
}

struct CurveArgs {
  std::string image;
  std::string against;
  std::string out;
  MetricFlags metric;
};

int cmd_curve(const CurveArgs& a, std::ostream& out) {
  const MetricConfig cfg = a.metric.config();
  const PreparedImage img(load_image(a.image), cfg.n_cuts);
  const std::optional<PreparedImage> ref =
      a.against.empty() ? std::nullopt : std::optional<PreparedImage>(std::in_place, load_image(a.against), cfg.n_cuts);
  const DirectionalResult d = directional_similarity(img, ref ? *ref : img, cfg);
  std::string csv = "i,c0,c\n";
  for (std::size_t i = 0; i < d.test_curve.values.size(); ++i) {
    csv += std::to_string(i + 1) + "," + format_number(d.reference_curve.values[i]) + "," +
           format_number(d.test_curve.values[i]) + "\n";
  }
  emit(csv, a.out, out);
  return kOk;
}

struct TreeArgs {
  std::string image;
  std::string out;
  int cuts = 64;
};

int cmd_tree(const TreeArgs& a, std::ostream& out) {
  const RgbImage img = load_image(a.image);
  emit(tree_to_json(build_tree(img, a.cuts)), a.out, out);
  return kOk;
}

struct SweepArgs {
  std::string reference;
  std::string distortion;
  std::string grid;
  std::string out;
  std::uint64_t seed = 0;
  int jobs = 0;
  MetricFlags metric;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const MetricConfig cfg = a.metric.config();
  const std::vector<double> grid = a.grid.empty() ? default_grid(a.distortion) : parse_grid(a.grid);
  const RgbImage source = load_image(a.reference);
  // Compositional kinds change the frame, so the baseline is the same
  // operation at its neutral level (e.g. the unrotated centre crop).
  const RgbImage baseline =
      apply_distortion(source, make_distortion(a.distortion, neutral_level(a.distortion), a.seed));
  const PreparedImage ref(baseline, cfg.n_cuts);

  std::vector<double> scores(grid.size());
  parallel_for(grid.size(), a.jobs, [&](std::size_t i) {
    const DistortionSpec spec = make_distortion(a.distortion, grid[i], derive_seed(a.seed, i));
    scores[i] = scssim(PreparedImage(apply_distortion(source, spec), cfg.n_cuts), ref, cfg);
  });

  std::string csv = "distortion,level,scssim,seed,cuts,lambda,reference\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv += a.distortion + "," + format_number(grid[i]) + "," + format_number(scores[i]) + "," +
           std::to_string(a.seed) + "," + std::to_string(cfg.n_cuts) + "," +
           format_number(cfg.lambda) + "," + csv_field(a.reference) + "\n";
  }
  emit(csv, a.out, out);
  return kOk;
}

struct MatrixArgs {
  std::string dir;
  std::string out;
  std::string heatmap;
  int cell = 16;
  int jobs = 0;
  MetricFlags metric;
};

int cmd_matrix(const MatrixArgs& a, std::ostream& out) {
  const MetricConfig cfg = a.metric.config();
  std::error_code ec;
  if (!fs::is_directory(a.dir, ec)) throw Error(ErrorKind::FileNotFound, "no such directory: " + a.dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(a.dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& x, const fs::path& y) { return x.filename() < y.filename(); });
  if (files.empty()) throw Error(ErrorKind::FileNotFound, "no PNG or PPM images in " + a.dir);
  if (a.cell < 1) throw Error(ErrorKind::InvalidParameter, "heatmap cell size must be positive");

  const std::size_t n = files.size();
  std::vector<std::unique_ptr<PreparedImage>> prepared(n);
  parallel_for(n, a.jobs, [&](std::size_t i) {
    prepared[i] = std::make_unique<PreparedImage>(load_image(files[i]), cfg.n_cuts);
  });

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> matrix(n * n);
  parallel_for(pairs.size(), a.jobs, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    const double s = scssim(*prepared[i], *prepared[j], cfg);
    matrix[i * n + j] = s;
    matrix[j * n + i] = s;
  });

  std::string csv = "image";
  for (const auto& f : files) csv += "," + csv_field(f.filename().string());
  csv += "\n";
  for (std::size_t i = 0; i < n; ++i) {
    csv += csv_field(files[i].filename().string());
    for (std::size_t j = 0; j < n; ++j) csv += "," + format_number(matrix[i * n + j]);
    csv += "\n";
  }
  emit(csv, a.out, out);

  if (!a.heatmap.empty()) {
    const int side = static_cast<int>(n) * a.cell;
    RgbImage heat(side, side);
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) {
        const double v = matrix[static_cast<std::size_t>(y / a.cell) * n + static_cast<std::size_t>(x / a.cell)];
        const auto g = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
        heat.set(x, y, {g, g, g});
      }
    }
    save_image(heat, a.heatmap);
  }
  return kOk;
}

struct BenchArgs {
  std::string sizes = "128,256,512,1024";
  std::string out;
  int repeats = 5;
  std::uint64_t seed = 0;
  MetricFlags metric;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  const MetricConfig cfg = a.metric.config();
  if (a.repeats < 1) throw Error(ErrorKind::InvalidParameter, "repeats must be at least 1");
  std::string csv = "pixels,mean_ms,std_ms\n";
  for (const double side_d : parse_sizes(a.sizes)) {
    const int side = static_cast<int>(side_d);
    const RgbImage reference = synthetic::landscape(side, side, a.seed);
    const RgbImage test = apply_distortion(reference, {GaussianNoise{10.0}, derive_seed(a.seed, 0)});
    std::vector<double> ms;
    for (int r = 0; r < a.repeats; ++r) {
      const auto start = std::chrono::steady_clock::now();
      const double s = scssim(reference, test, cfg);
      const auto stop = std::chrono::steady_clock::now();
      if (!(s > 0.0)) throw std::logic_error("benchmark produced an invalid score");
      ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
    }
    const double mean = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
    double var = 0.0;
    for (const double t : ms) var += (t - mean) * (t - mean);
    const double sd = ms.size() > 1 ? std::sqrt(var / static_cast<double>(ms.size() - 1)) : 0.0;
    csv += std::to_string(static_cast<long long>(side) * side) + "," + format_number(mean) + "," +
           format_number(sd) + "\n";
  }
  emit(csv, a.out, out);
  return kOk;
}

struct DistortArgs {
  std::string image;
  std::string distortion;
  std::string out;
  double level = 0.0;
  std::uint64_t seed = 0;
};

int cmd_distort(const DistortArgs& a) {
  const RgbImage img = load_image(a.image);
  save_image(apply_distortion(img, make_distortion(a.distortion, a.level, a.seed)), a.out);
  return kOk;
}

struct FetchArgs {
  std::string dest;
  std::string base_url = "https://r0k.us/graphics/kodak/kodak/";
  std::vector<int> images;
};

std::size_t append_bytes(char* data, std::size_t size, std::size_t count, void* user) {
  auto* buffer = static_cast<std::string*>(user);
  buffer->append(data, size * count);
  return size * count;
}

int cmd_fetch_kodak(const FetchArgs& a, std::ostream& out) {
  const fs::path dest = a.dest.empty() ? kodak_dir() : fs::path(a.dest);
  fs::create_directories(dest);
  std::vector<int> ids = a.images;
  if (ids.empty()) {
    ids.resize(24);
    std::iota(ids.begin(), ids.end(), 1);
  }
  curl_global_init(CURL_GLOBAL_DEFAULT);
  const std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), curl_easy_cleanup);
  if (!curl) throw Error(ErrorKind::Io, "cannot initialise libcurl");
  for (const int id : ids) {
    if (id < 1 || id > 24) throw Error(ErrorKind::InvalidParameter, "Kodak images are numbered 1..24");
    char name[32];
    std::snprintf(name, sizeof(name), "kodim%02d.png", id);
    const fs::path target = dest / name;
    if (fs::exists(target)) {
      out << "have " << target.string() << "\n";
      continue;
    }
    std::string body;
    const std::string url = a.base_url + name;
    curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
    curl_easy_setopt(curl.get(), CURLOPT_FOLLOWLOCATION, 1L);
    curl_easy_setopt(curl.get(), CURLOPT_FAILONERROR, 1L);
    curl_easy_setopt(curl.get(), CURLOPT_CONNECTTIMEOUT, 20L);
    curl_easy_setopt(curl.get(), CURLOPT_TIMEOUT, 120L);
    curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, append_bytes);
    curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, &body);
    const CURLcode rc = curl_easy_perform(curl.get());
    if (rc != CURLE_OK) {
      throw Error(ErrorKind::Io, "download failed for " + url + ": " + curl_easy_strerror(rc));
    }
    // Reject anything that does not decode before it lands in the cache.
    decode_png(std::span(reinterpret_cast<const std::uint8_t*>(body.data()), body.size()));
    const fs::path partial = target.string() + ".part";
    emit(body, partial.string(), out);
    fs::rename(partial, target);
    out << "fetched " << target.string() << "\n";
  }
  return kOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::FileNotFound:
    case ErrorKind::UnsupportedFormat:
    case ErrorKind::CorruptData:
    case ErrorKind::SchemaViolation:
    case ErrorKind::Io:
      return kIoError;
    case ErrorKind::DegenerateImage:
      return kDegenerate;
    case ErrorKind::ImageTooSmall:
      return kTooSmall;
    case ErrorKind::InvalidParameter:
    case ErrorKind::WindowOutOfBounds:
      return kBadFlags;
    case ErrorKind::RegionOutOfBounds:
      return kInternal;
  }
  return kInternal;
}

}  // namespace

fs::path kodak_dir() {
  if (const char* cache = std::getenv("SCSSIM_CACHE"); cache != nullptr && *cache != '\0') {
    return fs::path(cache) / "kodak";
  }
  const char* home = std::getenv("HOME");
  return fs::path(home != nullptr ? home : ".") / ".cache" / "scssim" / "kodak";
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scene composition structure similarity (SCSSIM) toolkit", "scssim"};
  app.require_subcommand(1);

  CompareArgs compare;
  auto* c = app.add_subcommand("compare", "Score two images; prints SCSSIM");
  c->add_option("reference", compare.reference, "Reference image")->required();
  c->add_option("test", compare.test, "Test image")->required();
  c->add_option("--tree", compare.reference_tree, "Precomputed tree JSON for the reference");
  c->add_option("--test-tree", compare.test_tree, "Precomputed tree JSON for the test image");
  c->add_flag("--json", compare.json, "Emit both directions, k-bar values and curves as JSON");
  add_metric_flags(c, compare.metric);

  CurveArgs curve;
  auto* cv = app.add_subcommand("curve", "Cumulative gain curve CSV (i,c0,c)");
  cv->add_option("image", curve.image, "Image whose tree is replayed")->required();
  cv->add_option("--against", curve.against, "Reference image the tree is applied to");
  cv->add_option("--out", curve.out, "Output CSV (default stdout)");
  add_metric_flags(cv, curve.metric);

  TreeArgs tree;
  auto* t = app.add_subcommand("tree", "Dump the greedy partition tree as JSON");
  t->add_option("image", tree.image, "Image")->required();
  t->add_option("--cuts", tree.cuts, "Number of cuts")->capture_default_str();
  t->add_option("--out", tree.out, "Output JSON (default stdout)");

  SweepArgs sweep;
  auto* s = app.add_subcommand("sweep", "SCSSIM across a distortion grid");
  s->add_option("reference", sweep.reference, "Reference image")->required();
  s->add_option("--distortion", sweep.distortion, "Distortion kind")
      ->required()
      ->check(CLI::IsMember(distortion_names()));
  s->add_option("--grid", sweep.grid, "Levels: a,b,c or start:stop:step (default per kind)");
  s->add_option("--seed", sweep.seed, "Base seed for noise kinds")->capture_default_str();
  s->add_option("--out", sweep.out, "Output CSV (default stdout)");
  s->add_option("--jobs", sweep.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  add_metric_flags(s, sweep.metric);

  MatrixArgs matrix;
  auto* m = app.add_subcommand("matrix", "Pairwise SCSSIM matrix of a directory of images");
  m->add_option("dir", matrix.dir, "Directory of PNG/PPM images")->required();
  m->add_option("--out", matrix.out, "Output CSV (default stdout)");
  m->add_option("--heatmap", matrix.heatmap, "Grayscale heatmap image (PPM, or PNG by extension)");
  m->add_option("--cell", matrix.cell, "Heatmap cell size in pixels")->capture_default_str();
  m->add_option("--jobs", matrix.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  add_metric_flags(m, matrix.metric);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Time tree building plus scoring on synthetic images");
  b->add_option("--sizes", bench.sizes, "Square image sides")->capture_default_str();
  b->add_option("--repeats", bench.repeats, "Timings per size")->capture_default_str();
  b->add_option("--seed", bench.seed, "Scene seed")->capture_default_str();
  b->add_option("--out", bench.out, "Output CSV (default stdout)");
  add_metric_flags(b, bench.metric);

  DistortArgs distort;
  auto* d = app.add_subcommand("distort", "Apply one distortion and write the result");
  d->add_option("image", distort.image, "Input image")->required();
  d->add_option("--distortion", distort.distortion, "Distortion kind")
      ->required()
      ->check(CLI::IsMember(distortion_names()));
  d->add_option("--level", distort.level, "Density, sigma, degrees, factor or dx");
  d->add_option("--seed", distort.seed, "Seed for noise kinds")->capture_default_str();
  d->add_option("--out", distort.out, "Output image (.png or .ppm)")->required();

  FetchArgs fetch;
  auto* f = app.add_subcommand("fetch-kodak", "Download the Kodak test images into the cache");
  f->add_option("--dest", fetch.dest, "Target directory (default $SCSSIM_CACHE/kodak)");
  f->add_option("--images", fetch.images, "Image numbers (default 1..24)")->delimiter(',');
  f->add_option("--base-url", fetch.base_url, "Mirror URL")->capture_default_str();

  std::vector<const char*> argv{"scssim"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kBadFlags;
  }

  try {
    if (*c) return cmd_compare(compare, out);
    if (*cv) return cmd_curve(curve, out);
    if (*t) return cmd_tree(tree, out);
    if (*s) return cmd_sweep(sweep, out);
    if (*m) return cmd_matrix(matrix, out);
    if (*b) return cmd_bench(bench, out);
    if (*d) return cmd_distort(distort);
    if (*f) return cmd_fetch_kodak(fetch, out);
  } catch (const Error& e) {
    err << "scssim: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "scssim: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    err << "scssim: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kBadFlags;
}

}  // namespace scssim::cli
