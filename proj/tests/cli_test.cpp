#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "singosc/format.hpp"

#include <gtest/gtest.h>

#include "cli.hpp"

namespace fs = std::filesystem;
using singosc::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("singosc_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST(Cli, TransitionsIdentityAtZero) {
  const auto r = call({"transitions", "--d", "1e5", "--r", "0", "--rows", "4", "--cols", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "n,m0,m1,m2,m3\n"
            "0,1.00000000000e+00,0.00000000000e+00,0.00000000000e+00,0.00000000000e+00\n"
            "1,0.00000000000e+00,1.00000000000e+00,0.00000000000e+00,0.00000000000e+00\n"
            "2,0.00000000000e+00,0.00000000000e+00,1.00000000000e+00,0.00000000000e+00\n"
            "3,0.00000000000e+00,0.00000000000e+00,0.00000000000e+00,1.00000000000e+00\n");
}

TEST(Cli, ParamsJson) {
  const auto r = call({"params", "--mu-ratio", "1e5", "--voltage", "100", "--half-spacing", "1e-3"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* key : {"\"g_star\"", "\"d\"", "\"n_max\"", "\"omega_g\"", "\"x_e\"", "\"x_g\"", "\"Omega_e\"",
                          "\"Omega_g\"", "\"V_min\"", "\"Vg_min\"", "\"g_SI\"", "\"inputs\"", "\"version\""}) {
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
  }
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(call({}).code, 1);
  EXPECT_EQ(call({"bogus"}).code, 1);
  EXPECT_EQ(call({"transitions", "--d", "1e5", "--r", "1e-5", "--nonsense", "3"}).code, 1);
  EXPECT_EQ(call({"transitions", "--d", "1e5"}).code, 1);
  const auto gap = call({"density", "--state", "alpha", "--alpha-re", "1", "--d", "200", "--x-min", "1", "--x-max", "30"});
  EXPECT_EQ(gap.code, 2);
  EXPECT_EQ(std::count(gap.err.begin(), gap.err.end(), '\n'), 1);
  EXPECT_EQ(call({"transitions", "--d", "1e5", "--r", "1.5"}).code, 2);
  EXPECT_EQ(call({"transitions", "--d", "10", "--r", "0.1", "--regime", "large-d"}).code, 2);
  EXPECT_EQ(call({"figure", "fig9"}).code, 1);
  EXPECT_EQ(call({"--help"}).code, 0);
}

TEST_F(TempDir, TransitionsSidecar) {
  const auto csv = path("w.csv");
  const auto r = call({"transitions", "--d", "1e5", "--rd", "1", "--rows", "3", "--cols", "40", "--regime", "large-d",
                       "-o", csv});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto side = slurp(csv + ".json");
  EXPECT_NE(side.find("\"row_sums\""), std::string::npos);
  EXPECT_NE(side.find("\"tail_bounds\""), std::string::npos);
  EXPECT_NE(side.find("\"large-d\""), std::string::npos);
}

TEST_F(TempDir, ConfigFileWithOverride) {
  const auto cfg = path("run.cfg");
  std::ofstream(cfg) << "# transition run\ncommand = transitions\nd = 1e5\nr = 0\nrows = 2\ncols = 2\n";
  auto r = call({"--config", cfg});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "n,m0,m1\n0,1.00000000000e+00,0.00000000000e+00\n1,0.00000000000e+00,1.00000000000e+00\n");
  r = call({"transitions", "--config", cfg, "--rows", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "n,m0,m1\n0,1.00000000000e+00,0.00000000000e+00\n");
  std::ofstream(path("bad.cfg")) << "d 1e5\n";
  EXPECT_EQ(call({"transitions", "--config", path("bad.cfg")}).code, 1);
}

TEST_F(TempDir, DensityDeterministicAndNormalized) {
  const std::vector<std::string> args{"density", "--state", "number", "--n", "1", "--d", "4", "--profile", "ramp",
                                      "--omega-i", "1", "--omega-f", "1.5", "--duration", "6", "--times", "0,4,9",
                                      "--points", "801"};
  auto a = args, b = args;
  a.insert(a.end(), {"-o", path("a.csv")});
  b.insert(b.end(), {"-o", path("b.csv")});
  ASSERT_EQ(call(a).code, 0);
  ASSERT_EQ(call(b).code, 0);
  const auto text = slurp(path("a.csv"));
  EXPECT_EQ(text, slurp(path("b.csv")));
  // trapezoid integral of each time slice
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,x,density");
  std::map<double, std::vector<std::pair<double, double>>> slices;
  while (std::getline(in, line)) {
    double t, x, w;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &x, &w), 3);
    slices[t].push_back({x, w});
  }
  EXPECT_EQ(slices.size(), 3u);
  for (const auto& [t, pts] : slices) {
    double acc = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) acc += 0.5 * (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second);
    EXPECT_NEAR(acc, 1.0, 1e-3) << "t=" << t;
  }
}

TEST_F(TempDir, SymmetricDisplayHalvesDensity) {
  const auto r = call({"density", "--d", "2", "--x-min", "0.5", "--x-max", "1", "--points", "2", "--symmetric"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[1].substr(0, 36), "0.00000000000e+00,-1.00000000000e+00");
  EXPECT_EQ(rows[4], "0.00000000000e+00,1.00000000000e+00," + std::string(singosc::format_real(0.5 * std::exp(-1.0))));
}

TEST_F(TempDir, ModeSidecarHasReflection) {
  const auto csv = path("mode.csv");
  const auto r = call({"mode", "--profile", "ramp", "--omega-i", "1", "--omega-f", "1.1", "--duration", "100", "--t1",
                       "150", "--rtol", "1e-12", "-o", csv});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(csv).substr(0, 64), "t,re_eps,im_eps,re_eps_dot,im_eps_dot,abs_eps_sq,wronskian_drift");
  const auto side = slurp(csv + ".json");
  EXPECT_NE(side.find("\"r\""), std::string::npos);
  EXPECT_NE(side.find("\"max_wronskian_drift\""), std::string::npos);
}

TEST_F(TempDir, FiguresAndManifests) {
  for (const char* name : {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6"}) {
    const auto r = call({"figure", name, "--output-dir", dir_.string(), "--points", "101"});
    ASSERT_EQ(r.code, 0) << name << ": " << r.err;
    const auto manifest = slurp(dir_ / (std::string(name) + ".manifest.json"));
    EXPECT_NE(manifest.find("\"version\""), std::string::npos);
    EXPECT_NE(manifest.find("\"parameters\""), std::string::npos);
    EXPECT_NE(manifest.find("\"regenerate\""), std::string::npos);
    EXPECT_FALSE(slurp(dir_ / (std::string(name) + ".csv")).empty());
  }
  const auto fig3 = slurp(dir_ / "fig3.csv");
  EXPECT_EQ(fig3.substr(0, fig3.find('\n')), "rd,W_5^0,W_5^2,W_5^5,W_5^10");
  const auto before = slurp(dir_ / "fig5.csv");
  ASSERT_EQ(call({"figure", "fig5", "--output-dir", dir_.string()}).code, 0);
  EXPECT_EQ(before, slurp(dir_ / "fig5.csv"));
}

TEST(Cli, ConfigReader) {
  const auto p = fs::temp_directory_path() / "singosc_cfg_reader.cfg";
  std::ofstream(p) << "  a = 1  # trailing\n\n# only comment\nb=two words\n";
  const auto kv = singosc::cli::read_config(p.string());
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv[0], std::make_pair(std::string("a"), std::string("1")));
  EXPECT_EQ(kv[1], std::make_pair(std::string("b"), std::string("two words")));
  fs::remove(p);
}
