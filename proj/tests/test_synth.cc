#include "catch_amalgamated.hpp"
#include "turnkit/enrollment.h"
#include "turnkit/error.h"
#include "turnkit/synth.h"

using namespace turnkit;

namespace {

SynthConfig Small(std::uint64_t seed = 1) {
  SynthConfig sc;
  sc.seed = seed;
  sc.file_count = 4;
  sc.file_duration = Seconds(300);
  return sc;
}

bool HasCrossOverlap(const Annotation &a) {
  const auto e = a.entries();
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i + 1; j < e.size() && e[j].segment.start() < e[i].segment.end(); ++j) {
      if (e[i].segment.Overlaps(e[j].segment)) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("synth config validation", "[synth]") {
  SynthConfig sc;
  CHECK_NOTHROW(sc.Validate());
  sc.overlap_probability = 1.5;
  CHECK_THROWS_AS(sc.Validate(), InputError);
  sc = SynthConfig{};
  sc.frame_step = Time();
  CHECK_THROWS_AS(sc.Validate(), InputError);
  sc = SynthConfig{};
  sc.score_noise_sigma = -1;
  CHECK_THROWS_AS(GenerateCorpus(sc), InputError);
}

TEST_CASE("same seed gives a bit-identical corpus", "[synth]") {
  SynthConfig sc = Small();
  sc.score_noise_sigma = 0.2;
  sc.embedding_noise_sigma = 0.1;
  const SynthCorpus a = GenerateCorpus(sc);
  const SynthCorpus b = GenerateCorpus(sc);
  CHECK(a.corpus.references == b.corpus.references);
  for (const auto &[id, fs] : a.corpus.scores) {
    CHECK(fs.streams == b.corpus.scores.at(id).streams);
    const Segment s = Segment::FromSeconds(10, 12.5);
    CHECK(a.embeddings->Embed(id, s) == b.embeddings->Embed(id, s));
  }
  sc.seed = 2;
  CHECK(GenerateCorpus(sc).corpus.references != a.corpus.references);
}

TEST_CASE("corpus shape", "[synth]") {
  const SynthCorpus c = GenerateCorpus(Small());
  REQUIRE(c.corpus.manifest.size() == 4);
  const auto ivs = c.corpus.manifest.interviews();
  CHECK(ivs[0].group == Group::kControl);
  CHECK(ivs[1].group == Group::kPreHD);
  CHECK(ivs[2].group == Group::kHD);
  CHECK(ivs[3].group == Group::kControl);
  for (const auto &iv : ivs) {
    const Annotation &ref = c.corpus.references.at(iv.file_id);
    CHECK(ref.Labels().size() == 2);
    CHECK(ref.EndTime() <= iv.duration);
    // The interviewee talks longer than the neuropsychologist.
    CHECK(ref.DurationOf(iv.SpeakerFor(Role::kInterviewee)) >
          ref.DurationOf(iv.SpeakerFor(Role::kNeuropsychologist)));
    const ScoreStream &s = c.corpus.scores.at(iv.file_id).streams.at(0);
    CHECK(s.ChannelIndex("Neuropsychologist"));
    CHECK(s.ChannelIndex("Interviewee"));
    CHECK(s.ChannelIndex("speech"));
    CHECK(s.ChannelIndex("change"));
    CHECK(*s.Extent() == Segment(Time(), iv.duration));
    // The first turn belongs to the neuropsychologist.
    CHECK(ref.entries()[0].label == iv.SpeakerFor(Role::kNeuropsychologist));
  }
}

TEST_CASE("overlap probability controls cross-speaker overlap", "[synth]") {
  SynthConfig sc = Small();
  sc.overlap_probability = 0.0;
  for (const auto &[id, ref] : GenerateCorpus(sc).corpus.references) CHECK(!HasCrossOverlap(ref));
  sc.overlap_probability = 0.5;
  bool any = false;
  for (const auto &[id, ref] : GenerateCorpus(sc).corpus.references) any = any || HasCrossOverlap(ref);
  CHECK(any);
}

TEST_CASE("snapping puts every boundary on the frame grid", "[synth]") {
  SynthConfig sc = Small();
  for (const auto &[id, ref] : GenerateCorpus(sc).corpus.references) {
    for (const auto &e : ref.entries()) {
      CHECK(e.segment.start().ticks() % sc.frame_step.ticks() == 0);
      CHECK(e.segment.end().ticks() % sc.frame_step.ticks() == 0);
    }
  }
}

TEST_CASE("embedding provider", "[synth]") {
  SynthConfig sc = Small();
  const SynthCorpus c = GenerateCorpus(sc);
  const auto &iv = c.corpus.manifest.interviews()[0];
  const Annotation &ref = c.corpus.references.at(iv.file_id);
  const auto &e = ref.entries()[0];
  const auto v = c.embeddings->Embed(iv.file_id, e.segment);
  const auto &centroid = c.embeddings->Centroid(iv.file_id, e.label);
  CHECK(std::vector<double>(v.values().begin(), v.values().end()) == centroid);
  // Rebuilding from the manifest and references gives the same model.
  const SynthEmbeddingProvider again(sc.EmbeddingParams(), c.corpus.manifest, c.corpus.references);
  CHECK(again.Embed(iv.file_id, e.segment) == v);
  CHECK_THROWS_AS(c.embeddings->Embed("nope", e.segment), InputError);
  // Centroids are centroid_separation apart.
  const auto &a = c.embeddings->Centroid(iv.file_id, iv.SpeakerFor(Role::kNeuropsychologist));
  const auto &b = c.embeddings->Centroid(iv.file_id, iv.SpeakerFor(Role::kInterviewee));
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
  CHECK(std::sqrt(d2) == Catch::Approx(sc.centroid_separation));
}

TEST_CASE("quantization floor", "[synth]") {
  const Annotation a("f", {{Segment::FromSeconds(0, 10), "A"}, {Segment::FromSeconds(10, 20), "B"}});
  const Annotation *refs[] = {&a};
  const Segment extents[] = {Segment::FromSeconds(0, 20)};
  CHECK(QuantizationFloor(refs, extents, Seconds(0.01)) == 2 * 0.01 * 2 / 20.0);
}

TEST_CASE("corpus statistics", "[synth]") {
  SECTION("empty corpus") {
    const auto s = ComputeCorpusStatistics(CorpusManifest(), {});
    REQUIRE(s.columns.size() == 1);
    CHECK(s.columns[0].interviews == 0);
    CHECK(s.columns[0].duration_overlap == Time());
  }
  SECTION("one file, one segment per role") {
    Interview iv;
    iv.file_id = "f";
    iv.duration = Seconds(20);
    iv.group = Group::kHD;
    iv.roles = {{"n", Role::kNeuropsychologist}, {"i", Role::kInterviewee}};
    const CorpusManifest m({iv});
    const std::map<std::string, Annotation> refs = {
        {"f", Annotation("f", {{Segment::FromSeconds(0, 5), "n"}, {Segment::FromSeconds(4, 9), "i"}})}};
    const auto s = ComputeCorpusStatistics(m, refs);
    CHECK(s.columns[0].segments_np == 1);
    CHECK(s.columns[0].segments_it == 1);
    CHECK(s.columns[0].duration_overlap == Seconds(1));
    CHECK(s.columns[0].groups == std::array<std::size_t, 3>{0, 0, 1});
  }
  SECTION("per split columns") {
    const SynthCorpus c = GenerateCorpus(Small());
    SplitAssignment split;
    const auto ivs = c.corpus.manifest.interviews();
    split.meta_train = {ivs[0].file_id, ivs[1].file_id};
    split.meta_dev = {ivs[2].file_id};
    split.meta_test = {ivs[3].file_id};
    const auto s = ComputeCorpusStatistics(c.corpus.manifest, c.corpus.references, &split);
    REQUIRE(s.columns.size() == 3);
    CHECK(s.columns[0].name == "train");
    CHECK(s.columns[0].interviews == 2);
    CHECK(s.columns[2].groups == std::array<std::size_t, 3>{1, 0, 0});
  }
}

TEST_CASE("embedding noise degrades enrollment monotonically on average", "[synth][property]") {
  // Mean enrollment IER over 20 seeds per noise level; ground-truth
  // segmentation isolates the identification step.
  std::vector<double> means;
  for (double sigma : {0.0, 0.3, 0.6}) {
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      SynthConfig sc;
      sc.seed = seed;
      sc.file_count = 2;
      sc.file_duration = Seconds(240);
      sc.overlap_probability = 0.0;
      sc.embedding_noise_sigma = sigma;
      sc.embedding_dim = 8;
      const SynthCorpus c = GenerateCorpus(sc);
      SplitAssignment split;
      for (const auto &iv : c.corpus.manifest.interviews()) split.meta_test.insert(iv.file_id);
      EnrollmentConfig cfg;
      cfg.segmentation = SegmentationSource::kGroundTruth;
      sum += *RunEnrollmentPipeline(c.corpus, split, *c.embeddings, cfg).Summary().global.ier();
    }
    means.push_back(sum / 20.0);
  }
  CHECK(means[0] <= means[1]);
  CHECK(means[1] <= means[2]);
  CHECK(means[2] > means[0]);
}
