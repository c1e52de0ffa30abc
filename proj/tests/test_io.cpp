#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace fchi;

TEST(ColoringFile, RoundTripGenerated) {
  Rng rng(2);
  std::vector<ColoredCompleteGraph> cs{binary_coloring(1), binary_coloring(3), fixtures::round_robin(9),
                                       fixtures::circulant_distance(12), fixtures::k20_five_colors()};
  for (int i = 0; i < 10; ++i) cs.push_back(fixtures::random_coloring(2 + i * 3, 1 + i % 5, rng));
  for (const auto& c : cs) {
    ColoringFile f{kFormatVersion, c, Json{{"seed", 2}}};
    auto text = to_json_text(Json(f));
    auto back = from_json_text<ColoringFile>(text);
    EXPECT_EQ(back, f);
    EXPECT_EQ(to_json_text(Json(back)), text);
  }
}

TEST(ColoringFile, EdgeInvariantsEnforced) {
  auto good = Json(ColoringFile{kFormatVersion, binary_coloring(2), Json::object()});
  auto missing = good;
  missing["edges"].erase(missing["edges"].begin());
  EXPECT_THROW(from_json_text<ColoringFile>(missing.dump()), Error);
  auto dup = good;
  dup["edges"][1] = dup["edges"][0];
  EXPECT_THROW(from_json_text<ColoringFile>(dup.dump()), Error);
  auto color = good;
  color["edges"][0][2] = 3;
  EXPECT_THROW(from_json_text<ColoringFile>(color.dump()), Error);
  auto order = good;
  order["edges"][0] = Json{1, 0, 1};
  EXPECT_THROW(from_json_text<ColoringFile>(order.dump()), Error);
  auto version = good;
  version["format_version"] = 2;
  EXPECT_THROW(from_json_text<ColoringFile>(version.dump()), Error);
  try {
    from_json_text<ColoringFile>("{\"n\": ");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse);
  }
}

TEST(CertificateFile, RoundTripTraces) {
  Rng rng(4);
  for (int q : {2, 3}) {
    for (int n : {2, 8, 16, 20}) {
      auto c = fixtures::relabel(fixtures::round_robin(n), rng);
      auto p = paper_params(q, c.r(), n);
      auto f = make_certificate_file(c, p, run_reduction(c, q, p), 9);
      auto text = to_json_text(Json(f));
      auto back = from_json_text<CertificateFile>(text);
      EXPECT_EQ(back.trace.steps, f.trace.steps);
      EXPECT_EQ(back.replay_digest, f.replay_digest);
      EXPECT_EQ(back.seed, 9u);
      EXPECT_EQ(to_json_text(Json(back)), text);
    }
  }
  auto b = binary_coloring(4);
  auto p = q3_params(4, 16);
  auto f = make_certificate_file(b, p, run_reduction(b, 3, p));
  auto back = from_json_text<CertificateFile>(to_json_text(Json(f)));
  ASSERT_TRUE(back.trace.steps.back().violation.has_value());
  EXPECT_EQ(back.trace.steps, f.trace.steps);
}

TEST(CertificateFile, ParamsRoundTripExactly) {
  for (int q = 2; q <= 8; ++q) {
    auto p = paper_params(q, 1000, 64);
    auto back = Json(p).get<EngineParams>();
    EXPECT_EQ(Json(back).dump(), Json(p).dump());
    EXPECT_EQ(back.log_alpha, p.log_alpha);
    EXPECT_EQ(back.eps, p.eps);
  }
}

TEST(Digest, DependsOnColoringAndParams) {
  auto c = fixtures::round_robin(8);
  auto p = paper_params(2, 7, 8);
  auto d = input_digest(c, p);
  EXPECT_EQ(d.size(), 16u);
  EXPECT_EQ(d, input_digest(c, p));
  Rng rng(1);
  EXPECT_NE(d, input_digest(fixtures::relabel(c, rng), p));
  auto p2 = p;
  p2.R = 9;
  EXPECT_NE(d, input_digest(c, p2));
  // metadata does not enter the digest
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Json, ScalarArraysStayOnOneLine) {
  auto text = to_json_text(Json{{"a", Json{1, 2, 3}}, {"b", Json::array()}});
  EXPECT_EQ(text, "{\n \"a\": [1,2,3],\n \"b\": []\n}\n");
}
