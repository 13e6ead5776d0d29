#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "psdpath/report_io.hpp"
#include "psdpath/tensor_field.hpp"
#include "psdpath_cli/cli.hpp"
#include "support/test_helpers.hpp"

namespace psdpath {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "psdpath");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("psdpath_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    write("a.json", "[2, 1, 0, 1, 0, 1]\n");
    write("b.json", "[1, 0, 0, 4, 0, 2]\n");
    write("bad.json", "[1, 5, 0, 1, 0, 1]\n");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { write_text_file(dir_ / name, text); }

  fs::path dir_;
};

TEST_F(Cli, InterpWritesTensor) {
  const auto r = run({"interp", path("a.json"), path("b.json"), "--p", "1"});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  EXPECT_TRUE(testing::matrices_near(parse_tensor(r.out), parse_tensor("[2, 1, 0, 1, 0, 1]"), 1e-14));
}

TEST_F(Cli, InterpCsvAndOutFile) {
  const auto r = run({"interp", path("a.json"), path("b.json"), "--metric", "euclidean-root",
                      "--format", "csv", "--out", path("mid.csv")});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(read_text_file(path("mid.csv")).rfind("xx,xy,xz,yy,yz,zz\n", 0), 0u);
}

TEST_F(Cli, InputErrorsExitWithTwo) {
  EXPECT_EQ(run({"interp", path("a.json"), path("bad.json")}).code, cli::kInputError);
  EXPECT_EQ(run({"interp", path("a.json"), path("missing.json")}).code, cli::kInputError);
  EXPECT_EQ(run({"interp", path("a.json"), path("b.json"), "--metric", "nope"}).code,
            cli::kInputError);
  EXPECT_EQ(run({"interp", path("a.json"), path("b.json"), "--format", "xml"}).code,
            cli::kInputError);
  EXPECT_EQ(run({}).code, cli::kInputError);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kInputError);
  EXPECT_EQ(run({"verify", "--dim", "1"}).code, cli::kInputError);
  EXPECT_EQ(run({"verify", "--property", "Nope"}).code, cli::kInputError);
  EXPECT_EQ(run({"search-extrapolation", "--p", "0.5", "--trials", "10"}).code, cli::kInputError);
}

TEST_F(Cli, HelpExitsWithZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, cli::kSuccess);
  EXPECT_NE(r.out.find("verify"), std::string::npos);
}

TEST_F(Cli, UpsampleProducesRefinedField) {
  write("field.json", R"({"dims": [2, 1, 1], "spacing": [1, 1, 1],
                          "tensors": [[2, 1, 0, 1, 0, 1], [1, 0, 0, 4, 0, 2]]})");
  const auto r = run({"upsample", path("field.json"), "--factor", "3"});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  const TensorField f = parse_field(r.out);
  EXPECT_EQ(f.dims, (std::array<std::size_t, 3>{4, 1, 1}));
}

TEST_F(Cli, UpsampleRejectsInconsistentField) {
  write("short.json", R"({"dims": [2, 2, 2], "spacing": [1, 1, 1],
                          "tensors": [[1, 0, 0, 1, 0, 1]]})");
  const auto r = run({"upsample", path("short.json")});
  EXPECT_EQ(r.code, cli::kInputError);
  EXPECT_NE(r.err.find("expected 8 tensors"), std::string::npos) << r.err;
}

TEST_F(Cli, SwellingCsv) {
  const auto r = run({"swelling", path("a.json"), path("b.json"), "--steps", "5"});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  EXPECT_EQ(r.out.rfind("p,euclidean-root,procrustes\n", 0), 0u);
  EXPECT_NE(r.out.find("# procrustes <= euclidean-root at every p in [0, 1]"), std::string::npos);
}

TEST_F(Cli, SwellingJson) {
  const auto r = run({"swelling", path("a.json"), path("b.json"), "--format", "json", "--metric",
                      "euclidean-root", "--metric", "procrustes", "--metric", "riemannian"});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  EXPECT_NE(r.out.find("\"procrustes_exceeds_root_at\": []"), std::string::npos) << r.out;
}

TEST_F(Cli, VerifyPassesAndWritesReport) {
  const auto r = run({"verify", "--dim", "3", "--trials", "50", "--property", "MainTheorem",
                      "--property", "DetGeoMean", "--rank-mode", "mixed"});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  const auto reports = reports_from_json(r.out);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_NE(r.err.find("MainTheorem: trials=50 failures=0"), std::string::npos) << r.err;
}

TEST_F(Cli, InvertedSelfTestExitsWithOne) {
  const auto r = run({"verify", "--trials", "20", "--property", "MainTheorem",
                      "--self-test-invert"});
  EXPECT_EQ(r.code, cli::kPropertyViolation);
  EXPECT_NE(r.err.find("FAIL"), std::string::npos);
}

TEST_F(Cli, SearchExtrapolationCsv) {
  const auto r = run({"search-extrapolation", "--trials", "2000", "--format", "csv"});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  EXPECT_NE(r.out.find("ExtrapolationSearch,3,full,42,2000,0,"), std::string::npos) << r.out;
}

}  // namespace
}  // namespace psdpath
