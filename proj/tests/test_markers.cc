#include <random>

#include "catch_amalgamated.hpp"
#include "oracles.h"
#include "turnkit/error.h"
#include "turnkit/markers.h"

using namespace turnkit;
using Catch::Matchers::WithinAbs;

namespace {

Segment S(double a, double b) { return Segment::FromSeconds(a, b); }
Annotation A(std::vector<LabeledSegment> e) { return Annotation("f", std::move(e)); }

// Splits every entry at a random interior tick into two abutting entries.
Annotation SplitEntries(const Annotation &a, std::mt19937_64 &rng) {
  std::vector<LabeledSegment> out;
  for (const auto &e : a.entries()) {
    const std::int64_t len = e.segment.duration().ticks();
    if (len < 2) {
      out.push_back(e);
      continue;
    }
    const Time cut = e.segment.start() + Time::FromTicks(1 + static_cast<std::int64_t>(rng() % (len - 1)));
    out.push_back({Segment(e.segment.start(), cut), e.label});
    out.push_back({Segment(cut, e.segment.end()), e.label});
  }
  return Annotation(a.file_id(), out);
}

}  // namespace

TEST_CASE("silence ratio examples", "[markers]") {
  CHECK(SilenceRatio(A({{S(0, 10), "A"}}), S(0, 10)) == 0.0);
  CHECK(SilenceRatio(A({}), S(0, 10)) == 1.0);
  CHECK(SilenceRatio(A({{S(0, 4), "A"}, {S(6, 8), "B"}}), S(0, 10)) == 0.4);
  CHECK(SilenceRatio(A({{S(0, 4), "A"}, {S(2, 8), "B"}}), S(0, 10)) == 1.0 - 0.8);
  CHECK(SilenceRatio(A({{S(0, 4), "A"}, {S(6, 8), "B"}}), S(0, 10), "B") == 0.8);
}

TEST_CASE("utterance duration SD examples", "[markers]") {
  const auto constant = UtteranceDurationSD(
      A({{S(0, 2), "A"}, {S(3, 5), "A"}, {S(6, 8), "A"}}), "A", S(0, 10));
  CHECK(constant.count == 3);
  CHECK(*constant.sd == 0.0);
  CHECK(*UtteranceDurationSD(A({{S(0, 1), "A"}, {S(2, 5), "A"}}), "A", S(0, 10)).sd == 1.0);
  const auto single = UtteranceDurationSD(A({{S(0, 1), "A"}, {S(2, 5), "B"}}), "A", S(0, 10));
  CHECK(single.count == 1);
  CHECK(!single.sd);
  // Splitting an utterance changes the SD even though the speech is the same.
  CHECK(*UtteranceDurationSD(A({{S(0, 4), "A"}, {S(5, 7), "A"}}), "A", S(0, 10)).sd == 1.0);
  CHECK(*UtteranceDurationSD(A({{S(0, 2), "A"}, {S(2, 4), "A"}, {S(5, 7), "A"}}), "A", S(0, 10)).sd == 0.0);
  // Durations are cropped to the extent first: {1, 1}.
  CHECK(*UtteranceDurationSD(A({{S(0, 4), "A"}, {S(5, 6), "A"}}), "A", S(3, 10)).sd == 0.0);
}

TEST_CASE("marker properties", "[markers][property]") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const Annotation a = oracle::RandomAnnotation(rng, "f", {"A", "B"}, 100000, 1, 10);
    const Segment extent = S(0, 10);
    const Annotation split = SplitEntries(a, rng);
    // Splitting into abutting pieces keeps the silence ratio.
    CHECK(SilenceRatio(split, extent) == SilenceRatio(a, extent));
    // ... but changes the utterance statistics whenever something was split.
    const auto before = UtteranceDurationSD(a, "A", extent);
    const auto after = UtteranceDurationSD(split, "A", extent);
    CHECK(after.count >= before.count);
    // A perfect prediction reproduces the reference markers exactly.
    const Annotation copy = a;
    const auto ref = ComputeMarkers(a, "C", MarkerSource::kReference, "A", extent);
    const auto pred = ComputeMarkers(copy, "C", MarkerSource::kPredicted, "A", extent);
    CHECK(ref.silence_ratio == pred.silence_ratio);
    CHECK(ref.utterance_sd == pred.utterance_sd);
    CHECK(ref.utterance_count == pred.utterance_count);
    CHECK(ref.silence_ratio >= 0.0);
    CHECK(ref.silence_ratio <= 1.0);
  }
}

TEST_CASE("marker agreement", "[markers]") {
  auto report = [](std::string id, std::string group, double sr, std::optional<double> sd) {
    MarkerReport r;
    r.file_id = std::move(id);
    r.group = std::move(group);
    r.silence_ratio = sr;
    r.utterance_sd = sd;
    r.utterance_count = sd ? 3 : 1;
    return r;
  };
  const std::vector<MarkerReport> ref = {report("a", "C", 0.2, 1.0), report("b", "HD", 0.4, 2.0),
                                         report("c", "HD", 0.1, std::nullopt)};
  SECTION("perfect prediction") {
    const auto g = ComputeMarkerAgreement(ref, ref);
    for (const auto &[name, e] : g.groups) {
      CHECK(e.silence_ratio_mean_error == 0.0);
      CHECK(*e.utterance_sd_mean_error == 0.0);
    }
    CHECK(g.groups.at("HD").utterance_sd_files == 1);
    CHECK(g.groups.at("HD").silence_ratio_files == 2);
  }
  SECTION("constant shift") {
    std::vector<MarkerReport> pred = ref;
    for (auto &p : pred) {
      p.silence_ratio += 0.05;
      p.source = MarkerSource::kPredicted;
    }
    const auto g = ComputeMarkerAgreement(ref, pred);
    for (const auto &[name, e] : g.groups) {
      CHECK_THAT(e.silence_ratio_mean_error, WithinAbs(0.05, 1e-12));
    }
    CHECK(g.pairs.size() == 3);
  }
  SECTION("mismatch") {
    const std::vector<MarkerReport> fewer = {ref[0]};
    CHECK_THROWS_AS(ComputeMarkerAgreement(ref, fewer), InputError);
  }
}
