#include <cmath>
#include <limits>

#include "doctest.h"
#include "npcmaj/json_io.hpp"
#include "npcmaj/sampling.hpp"
#include "support/helpers.hpp"

using namespace npcmaj;
using namespace npcmaj::test;

TEST_CASE("doubles round-trip bit-exactly") {
  Rng rng(1);
  for (int k = 0; k < 2000; ++k) {
    const double v = std::ldexp(rng.normal(), static_cast<int>(rng.below(200)) - 100);
    const std::string text = format_double(v);
    CHECK(std::stod(text) == v);
    const Json j = parse_json_text(Json(v).dump());
    CHECK(j.get<double>() == v);
  }
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("points and spaces round-trip") {
  Rng rng(2);
  std::vector<Space> spaces = model_spaces();
  spaces.push_back(Space::wasserstein1d(3));
  spaces.push_back(Space::product({Space::spd(3), Space::wasserstein1d(2)}));
  for (const Space& s : spaces) {
    CHECK(space_from_json(parse_json_text(to_json(s).dump())) == s);
    CHECK(space_from_json(Json(s.describe())) == s);
    for (int k = 0; k < 20; ++k) {
      const Point p = random_point(s, rng);
      const Point back = point_from_json(s, parse_json_text(to_json(p).dump()));
      CHECK(back == p);
    }
  }
}

TEST_CASE("encodings") {
  CHECK(to_json(hp(1, 2)) == Json::parse(R"({"re": 1.0, "im": 2.0})"));
  CHECK(to_json(spd_diag(1, 4)) == Json::parse("[[1.0, 0.0], [0.0, 4.0]]"));
  CHECK(to_json(Space::spd(2)) == Json::parse(R"({"kind": "spd", "order": 2})"));
  CHECK(to_json(Point::measure(Measure1D::dirac(3))) == Json::parse(R"({"atoms": [3.0], "weights": [1.0]})"));
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_json_text("{\n  \"space\": [1,\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK(code_of([] { space_from_json(Json::parse(R"({"kind": "euclidean", "dim": 2, "extra": 1})")); }) ==
        ErrorCode::ParseError);
  CHECK(code_of([] { space_from_json(Json::parse(R"({"kind": "torus"})")); }) == ErrorCode::ParseError);
  CHECK(code_of([] { point_from_json(Space::half_plane(), Json::parse("[1, 2]")); }) == ErrorCode::ParseError);
  CHECK(code_of([] { point_from_json(Space::euclidean(2), Json::parse(R"([1, "a"])")); }) == ErrorCode::ParseError);
  CHECK(code_of([] { matrix_from_json(Json::parse("[[1, 2], [3]]")); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("report serialization") {
  CheckReport r;
  r.check = "schur";
  r.functional = "pairwise_dist^2";
  r.space = "product(euclidean:1,halfplane)";
  r.record(0, -0.5);
  r.record(1, 1.0);
  r.record(2, 2.0);
  const std::vector<CheckReport> rs{r};
  CHECK(reports_to_csv(rs) ==
        "functional,space,trials,violations,worst_slack,seeds\n"
        "schur/pairwise_dist^2,\"product(euclidean:1,halfplane)\",3,2,2,1;2\n");
  const Json j = to_json(r);
  CHECK(j["violations"] == 2);
  CHECK(j["violating_seeds"] == Json::parse("[1, 2]"));
}
