#include <doctest.h>

#include "support/fixtures.hpp"
#include "vistrack/mask_ops.hpp"
#include "vistrack/types.hpp"

using namespace vistrack;
using namespace vistrack::testing;

namespace {

GroundTruthDataset two_video_dataset() {
  GroundTruthDataset ds;
  ds.videos.push_back({1, 4, 4, 2, {"a.jpg", "b.jpg"}});
  ds.videos.push_back({2, 4, 4, 3, {}});
  ds.categories.push_back({1, "fish"});
  ds.categories.push_back({2, "turtle"});
  RleMask m = rle_encode(rect_mask(4, 4, 0, 0, 2, 2));
  GtInstance inst;
  inst.id = 1;
  inst.video_id = 1;
  inst.category_id = 1;
  inst.segmentations = {m, std::nullopt};
  inst.bboxes = {BoundingBox{0, 0, 2, 2}, std::nullopt};
  ds.instances.push_back(inst);
  GtInstance inst2;
  inst2.id = 2;
  inst2.video_id = 2;
  inst2.category_id = 2;
  inst2.segmentations = {std::nullopt, m, m};
  inst2.bboxes = {std::nullopt, BoundingBox{0, 0, 2, 2}, BoundingBox{0, 0, 2, 2}};
  ds.instances.push_back(inst2);
  return ds;
}

}  // namespace

TEST_CASE("validate_dataset accepts a well-formed dataset") {
  CHECK(validate_dataset(two_video_dataset()).empty());
}

TEST_CASE("validate_dataset flags a short segmentation list") {
  auto ds = two_video_dataset();
  ds.instances[1].segmentations.pop_back();
  auto violations = validate_dataset(ds);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].entity == "annotation 2");
  CHECK(violations[0].rule.find("segmentations length 2") != std::string::npos);
}

TEST_CASE("validate_dataset flags an unknown category and names the instance") {
  auto ds = two_video_dataset();
  ds.instances[0].category_id = 99;
  auto violations = validate_dataset(ds);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].entity == "annotation 1");
  CHECK(violations[0].message().find("annotation 1") != std::string::npos);
  CHECK(violations[0].rule.find("99") != std::string::npos);
}

TEST_CASE("validate_dataset flags structural problems") {
  auto ds = two_video_dataset();
  ds.videos.push_back({1, 4, 4, 2, {}});  // duplicate id
  ds.videos.push_back({3, 0, 4, 2, {}});  // empty dimensions
  ds.instances[0].segmentations[0]->runs = {3};  // run-sum mismatch
  ds.instances.push_back(ds.instances[0]);       // duplicate annotation id
  auto violations = validate_dataset(ds);
  CHECK(violations.size() >= 4);
}

TEST_CASE("tracklet frame indices iterate strictly increasing") {
  Tracklet t;
  t.track_id = 1;
  for (int frame : {5, 1, 3}) {
    Detection d;
    d.frame_index = frame;
    d.score = 0.5;
    d.category_id = 1;
    t.entries[frame] = d;
  }
  int prev = -1;
  for (const auto& [frame, det] : t.entries) {
    CHECK(frame > prev);
    prev = frame;
  }
  CHECK(t.first_frame() == 1);
  CHECK(t.last_frame() == 5);
}

TEST_CASE("direction round-trips through strings") {
  for (auto d : {TrackDirection::forward, TrackDirection::backward,
                 TrackDirection::merged})
    CHECK(direction_from_string(to_string(d)) == d);
  CHECK_THROWS_AS(direction_from_string("sideways"), std::invalid_argument);
}
