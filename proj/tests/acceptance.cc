// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cli_harness.h"
#include "io_cases.h"
#include "oracles.h"
#include "turnkit/enrollment.h"
#include "turnkit/io.h"
#include "turnkit/markers.h"
#include "turnkit/metrics.h"
#include "turnkit/rng.h"
#include "turnkit/roles.h"
#include "turnkit/splits.h"
#include "turnkit/synth.h"

using namespace turnkit;

namespace {

using Clock = std::chrono::steady_clock;

double Elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

Segment S(double a, double b) { return Segment::FromSeconds(a, b); }

std::string Fmt(const char *f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

SplitAssignment AllTest(const CorpusManifest &m) {
  SplitAssignment s;
  for (const auto &iv : m.interviews()) s.meta_test.insert(iv.file_id);
  return s;
}

// Quantization floor over the role-mapped references cropped to the test
// extents of the given subset.
double Floor(const SynthCorpus &c, const SplitAssignment &split, Subset subset) {
  std::vector<Annotation> refs;
  std::vector<Segment> extents;
  for (const Interview *iv : InterviewsIn(c.corpus.manifest, split, subset)) {
    refs.push_back(iv->ToRoles(c.corpus.references.at(iv->file_id)));
    extents.push_back(Segment(split.t_test_boundary, iv->duration));
  }
  std::vector<const Annotation *> ptrs;
  for (const auto &r : refs) ptrs.push_back(&r);
  return QuantizationFloor(ptrs, extents, c.config.frame_step);
}

Outcome MetricOracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  int overlapped = 0;
  // The brute force misplaces every boundary that falls between frame
  // centers by up to 0.5 ms, so its own error is about boundaries * 0.5 ms
  // / total. Even trials put boundaries on the 1 ms frame grid over 20 s;
  // odd trials use arbitrary 0.1 ms boundaries over 120 s.
  for (int trial = 0; trial < 1000; ++trial) {
    const bool on_grid = trial % 2 == 0;
    const std::int64_t horizon = on_grid ? 200000 : 1200000;
    const std::int64_t grid = on_grid ? 10 : 1;
    const Segment extent(Time(), Time::FromTicks(horizon));
    const Annotation ref = oracle::RandomAnnotation(rng, "f", {"A", "B", "C"}, horizon, grid);
    const Annotation hyp = oracle::RandomAnnotation(rng, "f", {"A", "B", "C"}, horizon, grid);
    const auto exact = IdentificationErrorRate(ref, hyp, extent);
    const auto brute = oracle::BruteForceIer(ref, hyp, 0, horizon);
    for (const auto &r : CotemporalRegions(ref, hyp, extent)) {
      if (r.ref_labels.size() > 1) {
        ++overlapped;
        break;
      }
    }
    if (!exact.ier()) {
      if (brute.total != 0.0) worst = 1.0;
      continue;
    }
    worst = std::max(worst, std::fabs(*exact.ier() - brute.ier()));
  }
  const double secs = Elapsed(t0);
  return {worst <= 2e-3 && secs < 30.0 && overlapped > 0,
          "max |delta| " + Fmt("%.2e", worst) + ", " + std::to_string(overlapped) +
              " pairs with overlapped reference, " + Fmt("%.1f s", secs)};
}

Outcome HandCases() {
  const Annotation ref_a("f", {{S(0, 10), "A"}, {S(10, 20), "B"}});
  const Annotation hyp_a("f", {{S(0, 12), "A"}, {S(12, 20), "B"}});
  const double a = *IdentificationErrorRate(ref_a, hyp_a, S(0, 20)).ier();
  // Two speakers overlap for 1 s; the hypothesis only has one of them.
  const Annotation ref_b("f", {{S(0, 2), "A"}, {S(0, 1), "B"}});
  const Annotation hyp_b("f", {{S(0, 2), "A"}});
  const double b = *IdentificationErrorRate(ref_b, hyp_b, S(0, 2)).ier();
  const double c = *IdentificationErrorRate(ref_a, Annotation("f"), S(0, 20)).ier();
  return {a == 0.1 && b == 1.0 / 3.0 && c == 1.0,
          "(a) " + Fmt("%.17g", a) + " (b) " + Fmt("%.17g", b) + " (c) " + Fmt("%.17g", c)};
}

Outcome Recoverability() {
  const auto t0 = Clock::now();
  SynthConfig sc;
  sc.seed = 3;
  sc.file_count = 20;
  sc.file_duration = Seconds(600);
  sc.score_noise_sigma = 0.0;
  sc.embedding_noise_sigma = 0.0;
  sc.overlap_probability = 0.0;
  const SynthCorpus c = GenerateCorpus(sc);
  const SplitAssignment split = AllTest(c.corpus.manifest);
  const double floor = Floor(c, split, Subset::kTest);

  const auto roles = RunRolePipeline(c.corpus, split, RolePipelineConfig::Defaults());
  const auto enroll = RunEnrollmentPipeline(c.corpus, split, *c.embeddings, EnrollmentConfig{});
  const double role_ier = *roles.Summary().global.ier();
  const double enroll_ier = *enroll.Summary().global.ier();
  const double secs = Elapsed(t0);
  const bool scored_all = roles.skipped.empty() && enroll.skipped.empty();
  return {scored_all && role_ier <= floor && enroll_ier <= floor && secs < 120.0,
          "role " + Fmt("%.5f", role_ier) + ", enroll " + Fmt("%.5f", enroll_ier) + ", floor " +
              Fmt("%.5f", floor) + ", " + Fmt("%.1f s", secs)};
}

SynthConfig NoisyConfig(std::uint64_t seed) {
  SynthConfig sc;
  sc.seed = seed;
  sc.file_count = 15;
  sc.file_duration = Seconds(400);
  sc.score_noise_sigma = 0.25;
  return sc;
}

Outcome ToplineDominance() {
  std::string detail;
  bool pass = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthConfig sc = NoisyConfig(seed);
    sc.embedding_noise_sigma = 0.1;
    const SynthCorpus c = GenerateCorpus(sc);
    const SplitAssignment split = MakeMetaSplit(c.corpus.manifest, seed);
    EnrollmentConfig cfg;
    const double decoded = *RunEnrollmentPipeline(c.corpus, split, *c.embeddings, cfg).Summary().global.ier();
    cfg.segmentation = SegmentationSource::kGroundTruth;
    const double topline = *RunEnrollmentPipeline(c.corpus, split, *c.embeddings, cfg).Summary().global.ier();
    pass = pass && topline <= decoded;
    if (seed <= 3) detail += Fmt("%.4f", topline) + "<=" + Fmt("%.4f", decoded) + " ";
  }
  return {pass, detail + "(first 3 of 10 seeds)"};
}

Outcome ChanceCriterion() {
  bool beaten = true;
  std::size_t picks0 = 0, rows = 0;
  double worst_margin = 1.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthConfig sc = NoisyConfig(seed);
    sc.embedding_noise_sigma = 0.05;
    const SynthCorpus c = GenerateCorpus(sc);
    const SplitAssignment split = MakeMetaSplit(c.corpus.manifest, seed);

    EnrollmentConfig cfg;
    const double enroll = *RunEnrollmentPipeline(c.corpus, split, *c.embeddings, cfg).Summary().global.ier();
    const double role = *RunRolePipeline(c.corpus, split, RolePipelineConfig::Defaults()).Summary().global.ier();
    cfg.identifier = Identifier::kChance;
    cfg.chance_seed = seed;
    const double chance = *RunEnrollmentPipeline(c.corpus, split, *c.embeddings, cfg).Summary().global.ier();
    beaten = beaten && chance > enroll && chance > role;
    worst_margin = std::min(worst_margin, chance - std::max(enroll, role));

    // Label frequencies of the permutation baseline on the ground-truth
    // candidates of every file.
    for (const auto &iv : c.corpus.manifest.interviews()) {
      const Annotation &ref = c.corpus.references.at(iv.file_id);
      std::vector<SpeakerTemplate> templates;
      const InterviewSplit is = SplitInterview(ref, split.t_dev, split.t_test_boundary, iv.duration);
      for (const auto &speaker : iv.SpeakersInRoleOrder()) {
        std::vector<SegmentRef> segs;
        for (const auto &e : is.dev.entries()) {
          if (e.label == speaker) segs.push_back({iv.file_id, e.segment});
        }
        templates.push_back(BuildTemplate(*c.embeddings, segs, speaker));
      }
      std::vector<Segment> candidates;
      for (const auto &e : ref.entries()) candidates.push_back(e.segment);
      const auto scores = ScoreCandidates(*c.embeddings, iv.file_id, candidates, templates);
      for (std::size_t col : ChanceBaseline(scores.distances, MixSeeds(seed, rows))) {
        picks0 += col == 0;
        ++rows;
      }
    }
  }
  const double p = oracle::BinomialTwoSidedHalf(picks0, rows);
  return {beaten && p > 0.01,
          "template 0 chosen " + std::to_string(picks0) + "/" + std::to_string(rows) + ", p " +
              Fmt("%.3f", p) + ", smallest chance margin " + Fmt("%.4f", worst_margin)};
}

Outcome SplitProtocol() {
  std::vector<Interview> ivs;
  for (int i = 0; i < 94; ++i) {
    Interview iv;
    iv.file_id = "iv" + std::to_string(i);
    iv.duration = Seconds(600);
    iv.group = i < 22 ? Group::kControl : i < 40 ? Group::kPreHD : Group::kHD;
    iv.roles = {{"np", Role::kNeuropsychologist}, {"it", Role::kInterviewee}};
    ivs.push_back(iv);
  }
  const SplitAssignment s = MakeMetaSplit(CorpusManifest(ivs), 1);
  const bool sizes = s.meta_train.size() == 57 && s.meta_dev.size() == 18 && s.meta_test.size() == 19;

  // Dev sets grow with tDev.
  std::mt19937_64 rng(8);
  bool monotone = true;
  for (int trial = 0; trial < 200; ++trial) {
    const Annotation a = oracle::RandomAnnotation(rng, "f", {"A", "B"}, 6000000, 100, 30);
    std::vector<LabeledSegment> prev;
    for (int t = 90; t <= 180; t += 10) {
      const auto dev = SplitInterview(a, Seconds(t), Seconds(180), Seconds(600)).dev;
      const std::vector<LabeledSegment> cur(dev.entries().begin(), dev.entries().end());
      monotone = monotone && std::includes(cur.begin(), cur.end(), prev.begin(), prev.end());
      prev = cur;
    }
  }

  // The test extent and the scored reference do not depend on tDev.
  SynthConfig sc = NoisyConfig(4);
  sc.embedding_noise_sigma = 0.1;
  const SynthCorpus c = GenerateCorpus(sc);
  const SplitAssignment cs = MakeMetaSplit(c.corpus.manifest, 4);
  bool identical = true;
  const std::vector<Time> grid = ParseTimeGrid("90:180:10");
  for (const Interview *iv : InterviewsIn(c.corpus.manifest, cs, Subset::kTest)) {
    std::string first;
    for (Time t : grid) {
      const Segment ext =
          SplitInterview(c.corpus.references.at(iv->file_id), t, cs.t_test_boundary, iv->duration).test_extent;
      const Annotation cropped = Crop(iv->ToRoles(c.corpus.references.at(iv->file_id)), ext);
      const std::string bytes = FormatSeconds(ext.start(), 4) + "," + FormatSeconds(ext.end(), 4) + "\n" +
                                EmitRttm(std::span(&cropped, 1), 4);
      if (first.empty()) first = bytes;
      identical = identical && bytes == first;
    }
  }
  const auto rows = SweepTDev(c.corpus, cs, *c.embeddings, EnrollmentConfig{}, grid);
  for (const auto &r : rows) identical = identical && r.report.total == rows[0].report.total;

  return {sizes && monotone && identical && rows.size() == 10,
          std::to_string(s.meta_train.size()) + "/" + std::to_string(s.meta_dev.size()) + "/" +
              std::to_string(s.meta_test.size()) + ", monotone " + (monotone ? "yes" : "no") +
              ", test extent identical over " + std::to_string(rows.size()) + " tDev values " +
              (identical ? "yes" : "no")};
}

Outcome HarnessShapes() {
  const auto d = cli::Scratch("acceptance");
  std::FILE *f = std::fopen((d / "synth.cfg").c_str(), "w");
  std::fputs("fileCount=10\nfileDuration=300\nscoreNoiseSigma=0.2\nembeddingNoiseSigma=0.1\n", f);
  std::fclose(f);
  const auto corpus = d / "corpus";
  cli::Run("synth --config " + (d / "synth.cfg").string() + " --out " + corpus.string());
  cli::Run("split --manifest " + (corpus / "manifest.csv").string() + " --seed 1 --out " +
           (d / "split.txt").string());
  const std::string args =
      "--manifest " + (corpus / "manifest.csv").string() + " --split " + (d / "split.txt").string();

  const auto sweep = cli::Run("sweep-tdev " + args + " --synth-embeddings " + (corpus / "synth.cfg").string());
  const auto sl = cli::Lines(sweep.out);
  bool sweep_ok = sweep.exit_code == 0 && sl.size() == 11 &&
                  sl[0] == "tDev,falseAlarm,missedDetection,confusion,total,ier";
  for (int i = 0; sweep_ok && i < 10; ++i) {
    sweep_ok = sl[i + 1].starts_with(std::to_string(90 + 10 * i) + ".0000,");
  }

  const auto ablate = cli::Run("ablate " + args + " --fractions 0.1,0.2,0.5,1.0 --seed 1");
  const auto al = cli::Lines(ablate.out);
  const char *fractions[] = {"0.1,", "0.2,", "0.5,", "1,"};
  bool ablate_ok = ablate.exit_code == 0 && al.size() == 5 && al[0] == "fraction,MD,FA,Conf,IER";
  for (int i = 0; ablate_ok && i < 4; ++i) {
    ablate_ok = al[i + 1].starts_with(fractions[i]) &&
                std::count(al[i + 1].begin(), al[i + 1].end(), ',') == 4;
  }
  std::filesystem::remove_all(d);
  return {sweep_ok && ablate_ok, "sweep-tdev rows " + std::to_string(sl.empty() ? 0 : sl.size() - 1) +
                                     ", ablate rows " + std::to_string(al.empty() ? 0 : al.size() - 1)};
}

Outcome Markers() {
  std::mt19937_64 rng(77);
  bool exact = true, invariant = true;
  int sensitive = 0, splits = 0;
  const Segment extent = S(0, 60);
  for (int trial = 0; trial < 500; ++trial) {
    const Annotation a = oracle::RandomAnnotation(rng, "f", {"A", "B"}, 600000, 1, 12);
    const Annotation pred(a.file_id(), std::vector<LabeledSegment>(a.entries().begin(), a.entries().end()));
    const auto r = ComputeMarkers(a, "C", MarkerSource::kReference, "A", extent);
    const auto p = ComputeMarkers(pred, "C", MarkerSource::kPredicted, "A", extent);
    exact = exact && r.silence_ratio == p.silence_ratio && r.utterance_sd == p.utterance_sd &&
            r.utterance_count == p.utterance_count;

    // Split the longest A entry in two at a third of its length.
    std::vector<LabeledSegment> e(a.entries().begin(), a.entries().end());
    auto longest = e.end();
    for (auto it = e.begin(); it != e.end(); ++it) {
      if (it->label == "A" && (longest == e.end() || it->segment.duration() > longest->segment.duration())) {
        longest = it;
      }
    }
    if (longest == e.end() || longest->segment.duration().ticks() < 3) continue;
    const Segment whole = longest->segment;
    const Time cut = whole.start() + Time::FromTicks(whole.duration().ticks() / 3);
    *longest = {Segment(whole.start(), cut), "A"};
    e.push_back({Segment(cut, whole.end()), "A"});
    const Annotation split(a.file_id(), e);
    ++splits;
    invariant = invariant && SilenceRatio(split, extent) == SilenceRatio(a, extent) &&
                SilenceRatio(split, extent, "A") == SilenceRatio(a, extent, "A");
    const auto before = UtteranceDurationSD(a, "A", extent);
    const auto after = UtteranceDurationSD(split, "A", extent);
    sensitive += after.count == before.count + 1 && after.sd && (!before.sd || *after.sd != *before.sd);
  }
  return {exact && invariant && sensitive == splits && splits > 0,
          "perfect prediction exact " + std::string(exact ? "yes" : "no") + ", silence ratio split-invariant " +
              (invariant ? "yes" : "no") + ", SD changed on " + std::to_string(sensitive) + "/" +
              std::to_string(splits) + " splits"};
}

Outcome Parsers() {
  std::mt19937_64 rng(9);
  int rttm = 0, stream = 0, manifest = 0;
  for (int i = 0; i < 500; ++i) {
    const auto anns = iocases::RandomRttm(rng);
    const std::string text = EmitRttm(anns);
    const auto parsed = ParseRttm(text);
    bool same = parsed.size() == anns.size();
    for (const auto &a : anns) same = same && parsed.count(a.file_id()) && parsed.at(a.file_id()) == a;
    rttm += same;

    const ScoreStream s = iocases::RandomStream(rng);
    const std::string st = EmitScoreStream(s);
    const ScoreStream sp = ParseScoreStream(st);
    stream += sp == s && EmitScoreStream(sp) == st;

    const CorpusManifest m = iocases::RandomManifest(rng);
    const std::string mt = EmitManifest(m);
    const CorpusManifest mp = ParseManifest(mt);
    manifest += iocases::SameManifest(mp, m) && EmitManifest(mp) == mt;
  }
  int located = 0;
  const auto cases = iocases::MalformedInputs();
  for (const auto &c : cases) {
    try {
      c.parse(c.text);
    } catch (const ParseError &e) {
      located += e.line() == c.line;
    } catch (...) {
    }
  }
  return {rttm == 500 && stream == 500 && manifest == 500 && located == 20 && cases.size() == 20,
          "round trips rttm " + std::to_string(rttm) + "/500, stream " + std::to_string(stream) +
              "/500, manifest " + std::to_string(manifest) + "/500; located errors " +
              std::to_string(located) + "/" + std::to_string(cases.size())};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"metric oracle", MetricOracle},
      {"hand-derived IER cases", HandCases},
      {"zero-noise recoverability", Recoverability},
      {"topline dominance", ToplineDominance},
      {"chance baseline", ChanceCriterion},
      {"split protocol", SplitProtocol},
      {"harness shapes", HarnessShapes},
      {"markers", Markers},
      {"parsers", Parsers},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
