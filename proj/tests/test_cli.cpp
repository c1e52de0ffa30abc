#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "fixtures.hpp"

using namespace fchi;
namespace fs = std::filesystem;

namespace {

struct Run {
  int rc = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = {}) {
  std::string cmd = env + (env.empty() ? "" : " ") + FCHI_CLI_PATH + std::string(" ") + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  int status = pclose(pipe);
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("fchi_cli_" + std::to_string(getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write_coloring(const std::string& name, const ColoredCompleteGraph& c) const {
    write_text_file(path(name), to_json_text(Json(ColoringFile{kFormatVersion, c, Json::object()})));
    return path(name);
  }

  fs::path dir_;
};

Json last_json_line(const std::string& out) {
  auto end = out.find_last_not_of('\n');
  auto start = out.rfind('\n', end);
  return Json::parse(out.substr(start == std::string::npos ? 0 : start + 1, end - (start == std::string::npos ? 0 : start + 1) + 1));
}

}  // namespace

TEST_F(Cli, ConstructBinary) {
  auto r = run("construct binary --r 2 -o " + path("b2.json"));
  ASSERT_EQ(r.rc, 0);
  auto f = load_coloring(path("b2.json"));
  EXPECT_EQ(f.coloring.n(), 4);
  EXPECT_EQ(f.coloring, binary_coloring(2));
  auto j = parse_json(read_text_file(path("b2.json")));
  EXPECT_EQ(j["edges"].size(), 6u);
  EXPECT_EQ(j["metadata"]["construction"], "binary");

  auto one = run("construct binary --r 1");
  ASSERT_EQ(one.rc, 0);
  EXPECT_EQ(from_json_text<ColoringFile>(one.out).coloring.n(), 2);

  EXPECT_EQ(run("construct binary --r 7").rc, 1);
  EXPECT_EQ(run("construct binary").rc, 1);
}

TEST_F(Cli, VerifyChromaticPq) {
  auto b2 = write_coloring("b2.json", binary_coloring(2));
  EXPECT_EQ(run("verify chromatic-pq --p 5 --q 3 " + b2).rc, 0);

  Rng rng(8);
  auto two = write_coloring("k5.json", fixtures::random_coloring(5, 2, rng));
  auto r = run("verify chromatic-pq --p 5 --q 3 " + two);
  EXPECT_EQ(r.rc, 2);
  auto w = last_json_line(r.out);
  EXPECT_EQ(w["colors"], Json({1, 2}));
  EXPECT_EQ(w["chi"], 5);

  write_text_file(path("bad.json"), "{\"format_version\": 1, \"n\": 3");
  EXPECT_EQ(run("verify chromatic-pq --p 5 --q 3 " + path("bad.json")).rc, 1);
  EXPECT_EQ(run("verify chromatic-pq --p 5 --q 3 " + path("missing.json")).rc, 1);
}

TEST_F(Cli, VerifySparsity) {
  write_coloring("b4.json", binary_coloring(4));
  RestrictionProfile p;
  p.q = 3;
  p.eps = Rational(1, 2);
  p.classes = {{1, 2, 3}, {4}};
  p.x_vec = {1.0, 1.0 / 8};
  p.rebuild_r_vec();
  write_text_file(path("ok.json"), Json{{"format_version", 1}, {"coloring", "b4.json"}, {"profile", p}}.dump());
  EXPECT_EQ(run("verify sparsity --profile " + path("ok.json")).rc, 0);

  p.x_vec = {1.0, 0.0};
  write_text_file(path("zero.json"), Json{{"format_version", 1}, {"coloring", "b4.json"}, {"profile", p}}.dump());
  auto r = run("verify sparsity --profile " + path("zero.json"));
  EXPECT_EQ(r.rc, 2);
  EXPECT_EQ(last_json_line(r.out)["color"], 4);

  write_text_file(path("dangling.json"), Json{{"format_version", 1}, {"coloring", "nope.json"}, {"profile", p}}.dump());
  EXPECT_EQ(run("verify sparsity --profile " + path("dangling.json")).rc, 1);
}

TEST_F(Cli, ReduceTwoVerticesHalts) {
  auto c = write_coloring("k2.json", binary_coloring(1));
  auto r = run("reduce --q 2 --quiet " + c + " -o " + path("k2.cert.json"));
  ASSERT_EQ(r.rc, 0);
  auto cert = load_certificate(path("k2.cert.json"));
  ASSERT_EQ(cert.trace.steps.size(), 1u);
  EXPECT_EQ(cert.trace.steps[0].kind, StepKind::base_case);
  EXPECT_EQ(cert.trace.outcome, RunOutcome::halt);
}

TEST_F(Cli, ReduceBinaryFourGivesWitness) {
  auto c = write_coloring("b4.json", binary_coloring(4));
  auto r = run("reduce --q 3 " + c + " -o " + path("b4.cert.json"));
  EXPECT_EQ(r.rc, 2);
  auto w = last_json_line(r.out);
  EXPECT_EQ(w["colors"].size(), 3u);
  EXPECT_EQ(w["chi"], 8);
  EXPECT_EQ(run("replay " + path("b4.cert.json") + " " + c).rc, 0);
}

TEST_F(Cli, ReduceIsByteIdentical) {
  auto c = write_coloring("k20.json", fixtures::k20_five_colors());
  ASSERT_EQ(run("reduce --q 3 --seed 17 --quiet " + c + " -o " + path("a.json")).rc, 0);
  ASSERT_EQ(run("reduce --q 3 --seed 17 --quiet " + c + " -o " + path("b.json")).rc, 0);
  EXPECT_EQ(read_text_file(path("a.json")), read_text_file(path("b.json")));
}

TEST_F(Cli, ReduceWithManualParams) {
  auto c = write_coloring("rr.json", fixtures::round_robin(16));
  auto p = fixtures::manual_params(2, 15, 16, Rational(1, 64), 1.0 / 16);
  write_text_file(path("params.json"), Json(p).dump());
  EXPECT_EQ(run("reduce --q 2 --quiet --params " + path("params.json") + " " + c + " -o " + path("m.json")).rc, 0);
  EXPECT_EQ(load_certificate(path("m.json")).params.source, ParamSource::manual);
  EXPECT_EQ(run("reduce --q 3 --quiet --params " + path("params.json") + " " + c).rc, 1);
  EXPECT_EQ(run("reduce --q 2 --paper-params --params " + path("params.json") + " " + c).rc, 1);
}

TEST_F(Cli, Search) {
  auto a = run("search --kind Fchi --r 2 --p 5 --q 3 --n-max 6");
  ASSERT_EQ(a.rc, 0);
  EXPECT_EQ(Json::parse(a.out)["value"], 5);
  auto b = run("search --kind F --r 5 --p 2 --q 2 --n-max 3");
  ASSERT_EQ(b.rc, 0);
  EXPECT_EQ(Json::parse(b.out)["value"], 2);
  auto c = run("search --kind Fchi --r 3 --p 4 --q 3 --n-max 4 --witness-out " + path("w.json"));
  ASSERT_EQ(c.rc, 0);
  auto j = Json::parse(c.out);
  if (j["value"].is_null()) {
    EXPECT_EQ(j["unknown_above"], 4);
  } else {
    EXPECT_LE(j["value"].get<int>(), 5);
  }
  auto d = run("search --kind Fchi --r 3 --p 8 --q 4 --n-max 16", "FCHI_SEARCH_BUDGET=50");
  ASSERT_EQ(d.rc, 0);
  EXPECT_TRUE(Json::parse(d.out)["value"].is_null());
  EXPECT_EQ(run("search --kind G --r 2 --p 5 --q 3 --n-max 6").rc, 1);
}

TEST_F(Cli, Replay) {
  auto c = write_coloring("rr.json", fixtures::round_robin(16));
  ASSERT_EQ(run("reduce --q 2 --quiet " + c + " -o " + path("cert.json")).rc, 0);
  EXPECT_EQ(run("replay " + path("cert.json") + " " + c).rc, 0);

  auto j = parse_json(read_text_file(path("cert.json")));
  ASSERT_GE(j["trace"]["steps"].size(), 2u);
  j["trace"]["steps"][0]["surviving_set"] = Json{0, 1, 2};
  write_text_file(path("tampered.json"), to_json_text(j));
  auto t = run("replay " + path("tampered.json") + " " + c);
  EXPECT_NE(t.rc, 0);
  EXPECT_NE(t.out.find("step 0"), std::string::npos);

  Rng rng(6);
  auto other = write_coloring("other.json", fixtures::relabel(fixtures::round_robin(16), rng));
  EXPECT_EQ(run("replay " + path("cert.json") + " " + other).rc, 1);
}
