#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "scssim/distortions.hpp"
#include "scssim/image.hpp"
#include "scssim/metric.hpp"
#include "scssim/synthetic.hpp"
#include "temp_dir.hpp"

namespace scssim {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) v.push_back(line);
  return v;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    base_ = synthetic::landscape(128, 96, 51);
    save_image(base_, dir_ / "a.png");
    save_image(apply_distortion(base_, make_distortion("gaussian-noise", 15, 2)), dir_ / "b.ppm");
    save_image(apply_distortion(base_, make_distortion("rotate90", 0)), dir_ / "c.png");
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  testing::TempDir dir_;
  RgbImage base_;
};

TEST_F(CliTest, CompareIdentity) {
  const Result r = run({"compare", path("a.png"), path("a.png")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "1.000000\n");
}

TEST_F(CliTest, CompareIsSymmetricAndMatchesLibrary) {
  const Result ab = run({"compare", path("a.png"), path("b.ppm")});
  const Result ba = run({"compare", path("b.ppm"), path("a.png")});
  ASSERT_EQ(ab.code, 0) << ab.err;
  EXPECT_EQ(ab.out, ba.out);
  char expect[32];
  std::snprintf(expect, sizeof expect, "%.6f\n", scssim(load_image(path("a.png")), load_image(path("b.ppm"))));
  EXPECT_EQ(ab.out, expect);
}

TEST_F(CliTest, CompareJson) {
  const Result r = run({"compare", path("a.png"), path("c.png"), "--json", "--cuts", "16"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["config"]["cuts"], 16);
  for (const char* key : {"test_vs_reference", "reference_vs_test"}) {
    EXPECT_EQ(j[key]["c0"].size(), 16u);
    EXPECT_EQ(j[key]["c"].size(), 16u);
    EXPECT_TRUE(j[key].contains("mean_log_ratio"));
  }
  const double m1 = j["test_vs_reference"]["similarity"];
  const double m2 = j["reference_vs_test"]["similarity"];
  EXPECT_DOUBLE_EQ(j["scssim"].get<double>(), (m1 + m2) / 2);
}

TEST_F(CliTest, CurveAgainstSelf) {
  const Result r = run({"curve", path("a.png"), "--cuts", "32"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 33u);
  EXPECT_EQ(rows[0], "i,c0,c");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::istringstream row(rows[i]);
    std::string idx, c0, c;
    std::getline(row, idx, ',');
    std::getline(row, c0, ',');
    std::getline(row, c, ',');
    EXPECT_EQ(std::stoul(idx), i);
    EXPECT_EQ(c0, c);
  }
}

TEST_F(CliTest, CurveOfTwoBandsSaturatesAtFirstCut) {
  save_image(synthetic::two_bands(32, 32, 10, true, {0, 0, 0}, {200, 40, 90}), dir_ / "bands.png");
  const Result r = run({"curve", path("bands.png"), "--cuts", "4", "--out", path("bands.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(slurp(dir_ / "bands.csv"));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[1], "1,1,1");
}

TEST_F(CliTest, TreeDumpAndReuse) {
  save_image(synthetic::two_bands(2, 2, 1, false, {0, 0, 0}, {255, 255, 255}), dir_ / "tiny.ppm");
  Result r = run({"tree", path("tiny.ppm"), "--cuts", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["cuts"].size(), 1u);
  EXPECT_EQ(j["cuts"][0]["axis"], "V");
  EXPECT_EQ(j["cuts"][0]["offset"], 1);
  EXPECT_EQ(j["cuts"][0]["gain"], 195075.0);

  ASSERT_EQ(run({"tree", path("a.png"), "--cuts", "80", "--out", path("a.json")}).code, 0);
  ASSERT_EQ(run({"tree", path("b.ppm"), "--out", path("b.json")}).code, 0);
  const Result direct = run({"compare", path("a.png"), path("b.ppm")});
  const Result reused = run({"compare", path("a.png"), path("b.ppm"), "--tree", path("a.json"),
                             "--test-tree", path("b.json")});
  ASSERT_EQ(reused.code, 0) << reused.err;
  EXPECT_EQ(direct.out, reused.out);
}

TEST_F(CliTest, TreeForWrongImageIsRejected) {
  ASSERT_EQ(run({"tree", path("c.png"), "--out", path("c.json")}).code, 0);
  EXPECT_NE(run({"compare", path("a.png"), path("b.ppm"), "--tree", path("c.json")}).code, 0);
  std::ofstream(dir_ / "bad.json") << "{\"source\":{}}";
  EXPECT_EQ(run({"compare", path("a.png"), path("b.ppm"), "--tree", path("bad.json")}).code, 2);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"compare", path("a.png"), path("missing.png")}).code, 2);
  std::ofstream(dir_ / "junk.ppm") << "P6\n4 4\n255\nxx";
  EXPECT_EQ(run({"compare", path("a.png"), path("junk.ppm")}).code, 2);
  save_image(RgbImage(32, 32, Rgb{9, 9, 9}), dir_ / "flat.png");
  EXPECT_EQ(run({"compare", path("flat.png"), path("a.png")}).code, 3);
  save_image(synthetic::landscape(4, 4, 1), dir_ / "small.png");
  EXPECT_EQ(run({"compare", path("small.png"), path("small.png")}).code, 4);
  EXPECT_EQ(run({"compare", path("a.png")}).code, 5);
  EXPECT_EQ(run({"compare", path("a.png"), path("a.png"), "--cuts", "0"}).code, 5);
  EXPECT_EQ(run({"compare", path("a.png"), path("a.png"), "--lambda", "-2"}).code, 5);
  EXPECT_EQ(run({"frobnicate"}).code, 5);
  EXPECT_EQ(run({"sweep", path("a.png"), "--distortion", "pan"}).code, 5);
  const Result help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("compare"), std::string::npos);
}

TEST_F(CliTest, SweepRows) {
  const Result r = run({"sweep", path("a.png"), "--distortion", "gaussian-noise", "--seed", "4",
                        "--grid", "5:25:5", "--jobs", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], "distortion,level,scssim,seed,cuts,lambda,reference");
  EXPECT_EQ(rows[1].rfind("gaussian-noise,5,", 0), 0u);
  EXPECT_EQ(rows[5].rfind("gaussian-noise,25,", 0), 0u);
  const Result serial = run({"sweep", path("a.png"), "--distortion", "gaussian-noise", "--seed", "4",
                             "--grid", "5,10,15,20,25", "--jobs", "1"});
  EXPECT_EQ(serial.out, r.out);
  const Result blur = run({"sweep", path("a.png"), "--distortion", "blur"});
  EXPECT_EQ(lines(blur.out).size(), default_grid("blur").size() + 1);
}

TEST_F(CliTest, MatrixIsSymmetricWithUnitDiagonal) {
  testing::TempDir images;
  save_image(base_, images / "x1.png");
  save_image(apply_distortion(base_, make_distortion("blur", 2)), images / "x2.ppm");
  save_image(synthetic::landscape(96, 128, 52), images / "x3.png");
  std::ofstream(images / "notes.txt") << "ignored";
  const Result r = run({"matrix", images.path().string(), "--heatmap", path("heat.ppm"), "--jobs", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], "image,x1.png,x2.ppm,x3.png");
  std::vector<std::vector<std::string>> cells;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::istringstream row(rows[i]);
    std::vector<std::string> fields;
    for (std::string f; std::getline(row, f, ',');) fields.push_back(f);
    ASSERT_EQ(fields.size(), 4u);
    cells.push_back(fields);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(std::stod(cells[i][i + 1]), 1.0);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(cells[i][j + 1], cells[j][i + 1]);
  }
  const RgbImage heat = load_image(dir_ / "heat.ppm");
  EXPECT_EQ(heat.width(), 48);
  EXPECT_EQ(heat.height(), 48);
  EXPECT_EQ(heat.at(0, 0), (Rgb{255, 255, 255}));
}

TEST_F(CliTest, MatrixSingleImage) {
  testing::TempDir images;
  save_image(base_, images / "only.png");
  const Result r = run({"matrix", images.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "image,only.png\nonly.png,1\n");
}

TEST_F(CliTest, Bench) {
  const Result r = run({"bench", "--sizes", "32,64", "--repeats", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "pixels,mean_ms,std_ms");
  EXPECT_EQ(rows[1].rfind("1024,", 0), 0u);
  EXPECT_EQ(rows[2].rfind("4096,", 0), 0u);
}

TEST_F(CliTest, DistortWritesDeterministicOutput) {
  ASSERT_EQ(run({"distort", path("a.png"), "--distortion", "salt-pepper", "--level", "0.2",
                 "--seed", "9", "--out", path("sp1.png")}).code, 0);
  ASSERT_EQ(run({"distort", path("a.png"), "--distortion", "salt-pepper", "--level", "0.2",
                 "--seed", "9", "--out", path("sp2.png")}).code, 0);
  EXPECT_EQ(slurp(dir_ / "sp1.png"), slurp(dir_ / "sp2.png"));
  EXPECT_EQ(load_image(dir_ / "sp1.png"),
            apply_distortion(base_, make_distortion("salt-pepper", 0.2, 9)));
  EXPECT_EQ(run({"distort", path("a.png"), "--distortion", "pan", "--level", "8",
                 "--out", path("p.png")}).code, 5);
}

TEST_F(CliTest, FetchKodakFromMirror) {
  testing::TempDir mirror, cache;
  save_image(base_, mirror / "kodim16.png");
  std::ofstream(mirror / "kodim08.png") << "<html>not found</html>";
  const std::string url = "file://" + mirror.path().string() + "/";
  Result r = run({"fetch-kodak", "--dest", cache.path().string(), "--images", "16", "--base-url", url});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(cache / "kodim16.png"), slurp(mirror / "kodim16.png"));
  r = run({"fetch-kodak", "--dest", cache.path().string(), "--images", "16", "--base-url", url});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("have"), std::string::npos);
  r = run({"fetch-kodak", "--dest", cache.path().string(), "--images", "8", "--base-url", url});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(std::filesystem::exists(cache / "kodim08.png"));
  EXPECT_EQ(run({"fetch-kodak", "--dest", cache.path().string(), "--images", "3", "--base-url", url}).code, 2);
  EXPECT_EQ(run({"fetch-kodak", "--dest", cache.path().string(), "--images", "25"}).code, 5);
}

TEST(CliPaths, KodakCacheFollowsEnvironment) {
  const char* old = std::getenv("SCSSIM_CACHE");
  const std::string saved = old ? old : "";
  ::setenv("SCSSIM_CACHE", "/tmp/scssim-cache-probe", 1);
  EXPECT_EQ(cli::kodak_dir(), std::filesystem::path("/tmp/scssim-cache-probe/kodak"));
  if (old) {
    ::setenv("SCSSIM_CACHE", saved.c_str(), 1);
  } else {
    ::unsetenv("SCSSIM_CACHE");
  }
}

TEST(CliFormat, ShortestNumbers) {
  EXPECT_EQ(cli::format_number(1.0), "1");
  EXPECT_EQ(cli::format_number(0.25), "0.25");
  EXPECT_EQ(cli::format_number(0.1), "0.1");
}

}  // namespace
}  // namespace scssim
