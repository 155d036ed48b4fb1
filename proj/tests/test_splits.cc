#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "oracles.h"
#include "turnkit/error.h"
#include "turnkit/splits.h"

using namespace turnkit;

namespace {

Segment S(double a, double b) { return Segment::FromSeconds(a, b); }

Interview MakeInterview(std::string id, Group g) {
  Interview iv;
  iv.file_id = std::move(id);
  iv.duration = Seconds(600);
  iv.reference_path = "ref/" + iv.file_id + ".rttm";
  iv.group = g;
  iv.roles = {{"np", Role::kNeuropsychologist}, {"it", Role::kInterviewee}};
  return iv;
}

// 22 controls, 18 premanifest and 54 manifest carriers.
CorpusManifest StudyManifest() {
  std::vector<Interview> v;
  for (int i = 0; i < 94; ++i) {
    const Group g = i < 22 ? Group::kControl : i < 40 ? Group::kPreHD : Group::kHD;
    v.push_back(MakeInterview("int" + std::to_string(i), g));
  }
  return CorpusManifest(v);
}

CorpusManifest SmallManifest(std::size_t n) {
  std::vector<Interview> v;
  for (std::size_t i = 0; i < n; ++i) {
    v.push_back(MakeInterview("f" + std::to_string(i), kAllGroups[i % 3]));
  }
  return CorpusManifest(v);
}

std::array<std::size_t, 3> GroupCounts(const CorpusManifest &m,
                                       const std::set<std::string> &ids) {
  std::array<std::size_t, 3> c{};
  for (const auto &id : ids) ++c[static_cast<std::size_t>(m.At(id).group)];
  return c;
}

}  // namespace

TEST_CASE("manifest validation", "[splits]") {
  auto a = MakeInterview("a", Group::kHD);
  CHECK_THROWS_AS(CorpusManifest({a, a}), InputError);
  auto bad = MakeInterview("b", Group::kHD);
  bad.roles = {{"x", Role::kInterviewee}, {"y", Role::kInterviewee}};
  CHECK_THROWS_AS(CorpusManifest({bad}), InputError);
  CHECK(ParseRole("NP") == Role::kNeuropsychologist);
  CHECK(ParseGroup("preHD") == Group::kPreHD);
  CHECK(!ParseGroup("X"));
}

TEST_CASE("meta split sizes", "[splits]") {
  const auto s94 = MetaSplitSizes(94);
  CHECK(s94.train == 57);
  CHECK(s94.dev == 18);
  CHECK(s94.test == 19);
  const auto s5 = MetaSplitSizes(5);
  CHECK(s5.train == 3);
  CHECK(s5.dev == 1);
  CHECK(s5.test == 1);
}

TEST_CASE("94-interview manifest splits 57/18/19 with the reference group counts", "[splits]") {
  const CorpusManifest m = StudyManifest();
  const SplitAssignment s = MakeMetaSplit(m, 42);
  CHECK(s.meta_train.size() == 57);
  CHECK(s.meta_dev.size() == 18);
  CHECK(s.meta_test.size() == 19);
  CHECK(GroupCounts(m, s.meta_train) == std::array<std::size_t, 3>{13, 11, 33});
  CHECK(GroupCounts(m, s.meta_dev) == std::array<std::size_t, 3>{4, 4, 10});
  CHECK(GroupCounts(m, s.meta_test) == std::array<std::size_t, 3>{5, 3, 11});
}

TEST_CASE("meta split is deterministic, disjoint and covering", "[splits][property]") {
  for (std::size_t n : {5, 6, 7, 13, 31, 94}) {
    const CorpusManifest m = SmallManifest(n);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      for (bool stratify : {true, false}) {
        const SplitAssignment s = MakeMetaSplit(m, seed, stratify);
        CHECK(s == MakeMetaSplit(m, seed, stratify));
        std::set<std::string> all;
        for (Subset sub : {Subset::kTrain, Subset::kDev, Subset::kTest}) {
          for (const auto &id : s.Members(sub)) CHECK(all.insert(id).second);
        }
        CHECK(all.size() == n);
        const auto sizes = MetaSplitSizes(n);
        CHECK(s.meta_dev.size() == sizes.dev);
        CHECK(s.meta_test.size() == sizes.test);
      }
    }
  }
  CHECK(MakeMetaSplit(SmallManifest(30), 1) != MakeMetaSplit(SmallManifest(30), 2));
  CHECK_THROWS_AS(MakeMetaSplit(SmallManifest(4), 1), InputError);
}

TEST_CASE("stratified split keeps each group near 60/20/20", "[splits][property]") {
  const CorpusManifest m = StudyManifest();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SplitAssignment s = MakeMetaSplit(m, seed);
    const auto dev = GroupCounts(m, s.meta_dev);
    const std::array<double, 3> sizes = {22, 18, 54};
    for (std::size_t g = 0; g < 3; ++g) {
      CHECK(std::fabs(static_cast<double>(dev[g]) - 0.2 * sizes[g]) < 1.0);
    }
  }
}

TEST_CASE("split validation", "[splits]") {
  SplitAssignment s;
  s.meta_train = {"a"};
  s.meta_dev = {"a"};
  CHECK_THROWS_AS(s.Validate(), InputError);
  s.meta_dev = {"b"};
  CHECK_NOTHROW(s.Validate());
  s.t_dev = Seconds(200);
  CHECK_THROWS_AS(s.Validate(), InputError);
}

TEST_CASE("split interview examples", "[splits]") {
  const Annotation a("f", {{S(10, 20), "A"}, {S(100, 130), "B"}, {S(200, 210), "A"}});
  const auto parts = SplitInterview(a, Seconds(120), Seconds(180), Seconds(300));
  CHECK(parts.dev.size() == 2);
  CHECK(parts.dev.entries()[1].segment == S(100, 130));  // straddling tDev, kept whole
  CHECK(parts.test_extent == S(180, 300));
  CHECK(parts.enrollment_impossible.empty());

  const Annotation late("f", {{S(10, 20), "A"}, {S(200, 210), "B"}});
  const auto p2 = SplitInterview(late, Seconds(180), Seconds(180), Seconds(300));
  CHECK(p2.enrollment_impossible == std::vector<std::string>{"B"});

  const std::vector<std::string> speakers = {"A", "C"};
  const auto p3 = SplitInterview(late, Seconds(180), Seconds(180), Seconds(300), speakers);
  CHECK(p3.enrollment_impossible == std::vector<std::string>{"C"});

  CHECK_THROWS_AS(SplitInterview(a, Seconds(120), Seconds(180), Seconds(180)), InputError);
  CHECK_THROWS_AS(SplitInterview(a, Seconds(190), Seconds(180), Seconds(300)), InputError);
}

TEST_CASE("dev segments are monotone in tDev and the test extent is fixed",
          "[splits][property]") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Annotation a = oracle::RandomAnnotation(rng, "f", {"A", "B"}, 3000000, 100, 30);
    std::optional<InterviewSplit> prev;
    for (int t = 90; t <= 180; t += 10) {
      const auto parts = SplitInterview(a, Seconds(t), Seconds(180), Seconds(301));
      for (const auto &e : parts.dev.entries()) CHECK(e.segment.start() < Seconds(t));
      CHECK(parts.test_extent == S(180, 301));
      if (prev) {
        for (const auto &e : prev->dev.entries()) {
          CHECK(std::find(parts.dev.entries().begin(), parts.dev.entries().end(), e) !=
                parts.dev.entries().end());
        }
      }
      prev = parts;
    }
  }
}

TEST_CASE("subsample train", "[splits]") {
  const CorpusManifest m = StudyManifest();
  const SplitAssignment s = MakeMetaSplit(m, 1);
  CHECK(SubsampleTrain(s, 1.0, 5) == s);
  const auto tenth = SubsampleTrain(s, 0.1, 5);
  CHECK(tenth.meta_train.size() == 6);
  CHECK(tenth.meta_dev == s.meta_dev);
  CHECK(tenth.meta_test == s.meta_test);
  for (const auto &id : tenth.meta_train) CHECK(s.meta_train.count(id));
  CHECK(SubsampleTrain(s, 0.5, 5) == SubsampleTrain(s, 0.5, 5));
  CHECK(SubsampleTrain(s, 0.5, 5).meta_train.size() == 29);
  CHECK(SubsampleTrain(s, 0.2, 5).meta_train.size() == 12);
  CHECK_THROWS_AS(SubsampleTrain(s, 0.3, 5), InputError);
}
