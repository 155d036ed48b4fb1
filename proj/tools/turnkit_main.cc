// turnkit command line: evaluation, splits, both pipelines, sweeps,
// ablations, markers, synthetic corpora and comparisons.
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "turnkit/corpus.h"
#include "turnkit/decoding.h"
#include "turnkit/enrollment.h"
#include "turnkit/error.h"
#include "turnkit/io.h"
#include "turnkit/markers.h"
#include "turnkit/metrics.h"
#include "turnkit/reports.h"
#include "turnkit/roles.h"
#include "turnkit/splits.h"
#include "turnkit/synth.h"

namespace fs = std::filesystem;
using namespace turnkit;

namespace {

struct Globals {
  int jobs = 0;
  Execution exec() const { return jobs == 1 ? Execution::kSerial : Execution::kParallel; }
};

void Emit(const std::string &out, const std::string &text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    WriteFile(out, text);
  }
}

void ReportSkipped(const std::vector<SkippedFile> &skipped) {
  for (const auto &s : skipped) std::cerr << "skipped " << s.file_id << ": " << s.reason << "\n";
}

LoadedCorpus Load(const std::string &manifest, const Globals &g) {
  LoadedCorpus c = LoadCorpus(manifest, g.exec());
  for (const auto &f : c.failures) std::cerr << "load failed " << f.file_id << ": " << f.reason << "\n";
  return c;
}

// ------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string ref, hyp, uem, manifest, out;
  double collar = 0.0;
  bool map_roles = false;
};

void RunEvaluate(const EvaluateArgs &a) {
  const auto refs = ParseRttm(ReadFile(a.ref));
  const auto hyps = ParseRttm(ReadFile(a.hyp));
  std::map<std::string, Segment> uem;
  if (!a.uem.empty()) uem = ParseUem(ReadFile(a.uem));
  std::optional<CorpusManifest> manifest;
  if (!a.manifest.empty()) manifest = ParseManifest(ReadFile(a.manifest));
  if (a.map_roles && !manifest) throw InputError("--map-roles needs --manifest");

  std::set<std::string> ids;
  for (const auto &kv : refs) ids.insert(kv.first);
  for (const auto &kv : hyps) ids.insert(kv.first);
  if (manifest) {
    for (const auto &iv : manifest->interviews()) ids.insert(iv.file_id);
  }

  std::vector<FileReport> reports;
  std::vector<SkippedFile> skipped;
  const Time collar = Time::FromSeconds(a.collar);
  for (const auto &id : ids) {
    const Interview *iv = manifest ? manifest->Find(id) : nullptr;
    if (manifest && !iv) {
      skipped.push_back({id, "not in the manifest"});
      continue;
    }
    Annotation ref = refs.count(id) ? refs.at(id) : Annotation(id);
    const Annotation hyp = hyps.count(id) ? hyps.at(id) : Annotation(id);
    try {
      if (a.map_roles) ref = iv->ToRoles(ref);
      std::optional<Segment> extent;
      if (auto u = uem.find(id); u != uem.end()) {
        extent = u->second;
      } else if (!uem.empty()) {
        skipped.push_back({id, "no UEM extent"});
        continue;
      } else if (iv) {
        extent = Segment(Time(), iv->duration);
      } else {
        const Time end = std::max(ref.EndTime(), hyp.EndTime());
        if (end > Time()) extent = Segment(Time(), end);
      }
      if (!extent) {
        skipped.push_back({id, "empty reference and hypothesis"});
        continue;
      }
      const std::string group = iv ? std::string(GroupName(iv->group)) : "NA";
      reports.push_back({id, group, IdentificationErrorRate(ref, hyp, *extent, collar)});
    } catch (const InputError &e) {
      skipped.push_back({id, e.what()});
    }
  }
  ReportSkipped(skipped);
  const AggregateReport agg = Aggregate(reports);
  Emit(a.out, EmitIerReport(agg));
  if (!a.out.empty() && a.out != "-") std::cout << SummaryLine(agg) << "\n";
}

// ---------------------------------------------------------------- split

struct SplitArgs {
  std::string manifest, out;
  std::uint64_t seed = 0;
  bool stratify = true;
  double t_dev = kDefaultTDev.seconds();
  double boundary = kDefaultTestBoundary.seconds();
};

void RunSplit(const SplitArgs &a) {
  const CorpusManifest m = ParseManifest(ReadFile(a.manifest));
  const SplitAssignment s = MakeMetaSplit(m, a.seed, a.stratify,
                                          Time::FromSeconds(a.t_dev),
                                          Time::FromSeconds(a.boundary));
  Emit(a.out, EmitSplit(s));
  std::cerr << "train=" << s.meta_train.size() << " dev=" << s.meta_dev.size()
            << " test=" << s.meta_test.size() << "\n";
}

// ------------------------------------------------------------ enrollment

struct EnrollArgs {
  std::string manifest, split, embeddings, synth_embeddings, out, subset = "test";
  std::optional<double> t_dev;
  bool topline = false;
  bool chance = false;
  std::uint64_t seed = 0;
  double collar = 0.0;
  double vad_onset = 0.5, vad_offset = 0.5;
  double change_threshold = 0.5, min_gap = 0.25, smoothing = 0.1;
};

struct EnrollSetup {
  LoadedCorpus loaded;
  SplitAssignment split;
  std::shared_ptr<const EmbeddingProvider> provider;
  EnrollmentConfig cfg;
};

EnrollSetup PrepareEnrollment(const EnrollArgs &a, const Globals &g) {
  EnrollSetup s;
  s.loaded = Load(a.manifest, g);
  s.split = ParseSplit(ReadFile(a.split));
  if (!a.embeddings.empty() == !a.synth_embeddings.empty()) {
    throw InputError("give exactly one of --embeddings and --synth-embeddings");
  }
  if (!a.embeddings.empty()) {
    s.provider = ParseEmbeddingCache(ReadFile(a.embeddings));
  } else {
    const SynthConfig sc = ParseSynthConfig(ReadFile(a.synth_embeddings));
    s.provider = std::make_shared<SynthEmbeddingProvider>(
        sc.EmbeddingParams(), s.loaded.corpus.manifest, s.loaded.corpus.references);
  }
  EnrollmentConfig &c = s.cfg;
  c.vad.onset = a.vad_onset;
  c.vad.offset = a.vad_offset;
  c.change.threshold = a.change_threshold;
  c.change.min_gap = Time::FromSeconds(a.min_gap);
  c.change.smoothing = Time::FromSeconds(a.smoothing);
  c.t_dev = a.t_dev ? Time::FromSeconds(*a.t_dev) : s.split.t_dev;
  c.segmentation = a.topline ? SegmentationSource::kGroundTruth : SegmentationSource::kDecoded;
  c.identifier = a.chance ? Identifier::kChance : Identifier::kArgmin;
  c.chance_seed = a.seed;
  c.collar = Time::FromSeconds(a.collar);
  auto subset = ParseSubset(a.subset);
  if (!subset) throw InputError("--subset must be train, dev or test");
  c.evaluate_on = *subset;
  return s;
}

void WritePipelineOutput(const PipelineResult &r, const std::string &dir) {
  ReportSkipped(r.skipped);
  const AggregateReport agg = r.Summary();
  WriteFile(fs::path(dir) / "reports.csv", EmitIerReport(agg));
  std::vector<Annotation> hyps;
  for (const auto &kv : r.hypotheses) hyps.push_back(kv.second);
  WriteFile(fs::path(dir) / "hyp.rttm", EmitRttm(hyps, 4));
  std::string skipped = "fileId,reason\n";
  for (const auto &s : r.skipped) skipped += s.file_id + "," + s.reason + "\n";
  WriteFile(fs::path(dir) / "skipped.csv", skipped);
  std::cout << SummaryLine(agg) << " skipped=" << r.skipped.size() << "\n";
}

void RunEnroll(const EnrollArgs &a, const Globals &g) {
  EnrollSetup s = PrepareEnrollment(a, g);
  const PipelineResult r =
      RunEnrollmentPipeline(s.loaded.corpus, s.split, *s.provider, s.cfg, g.exec());
  WritePipelineOutput(r, a.out);
}

struct SweepArgs {
  EnrollArgs enroll;
  std::string grid = "90:180:10";
};

void RunSweep(const SweepArgs &a, const Globals &g) {
  EnrollSetup s = PrepareEnrollment(a.enroll, g);
  const auto grid = ParseTimeGrid(a.grid);
  const auto rows =
      SweepTDev(s.loaded.corpus, s.split, *s.provider, s.cfg, grid, g.exec());
  for (const auto &r : rows) {
    if (r.skipped > 0) {
      std::cerr << "tDev=" << FormatSeconds(r.t_dev, 1) << ": " << r.skipped
                << " file(s) skipped\n";
    }
  }
  Emit(a.enroll.out, EmitSweep(rows));
}

// ----------------------------------------------------------------- roles

struct RolesArgs {
  std::string manifest, split, out, tune_on, subset = "test";
  double collar = 0.0;
  double onset = 0.5, offset = 0.5;
};

void RunRoles(const RolesArgs &a, const Globals &g) {
  const LoadedCorpus loaded = Load(a.manifest, g);
  const SplitAssignment split = ParseSplit(ReadFile(a.split));
  RolePipelineConfig cfg = RolePipelineConfig::Defaults();
  for (auto &kv : cfg.per_role) {
    kv.second.onset = a.onset;
    kv.second.offset = a.offset;
  }
  cfg.t_test_boundary = split.t_test_boundary;
  cfg.collar = Time::FromSeconds(a.collar);
  auto subset = ParseSubset(a.subset);
  if (!subset) throw InputError("--subset must be train, dev or test");
  cfg.evaluate_on = *subset;
  std::string thresholds;
  if (!a.tune_on.empty()) {
    auto tune = ParseSubset(a.tune_on);
    if (!tune) throw InputError("--tune-on must be train, dev or test");
    const auto grid = DefaultThresholdGrid();
    cfg.per_role = TuneRoleThresholds(loaded.corpus, split, *tune, grid, g.exec());
  }
  for (const auto &[role, c] : cfg.per_role) {
    thresholds += role + ".onset=" + std::to_string(c.onset) + "\n" + role +
                  ".offset=" + std::to_string(c.offset) + "\n";
  }
  const PipelineResult r = RunRolePipeline(loaded.corpus, split, cfg, g.exec());
  WriteFile(fs::path(a.out) / "thresholds.txt", thresholds);
  WritePipelineOutput(r, a.out);
}

// ---------------------------------------------------------------- ablate

struct AblateArgs {
  std::string manifest, split, out;
  std::vector<double> fractions{0.1, 0.2, 0.5, 1.0};
  std::uint64_t seed = 0;
};

void RunAblate(const AblateArgs &a, const Globals &g) {
  const LoadedCorpus loaded = Load(a.manifest, g);
  const SplitAssignment split = ParseSplit(ReadFile(a.split));
  RolePipelineConfig base = RolePipelineConfig::Defaults();
  base.t_test_boundary = split.t_test_boundary;
  const auto grid = DefaultThresholdGrid();
  const auto rows =
      AblateTrainFraction(loaded.corpus, split, a.fractions, grid, a.seed, base, g.exec());
  Emit(a.out, EmitAblation(rows));
}

// --------------------------------------------------------------- markers

struct MarkersArgs {
  std::string annotations, pred, manifest, role = "Interviewee", out, agreement;
  std::optional<double> from;
};

std::vector<MarkerReport> MarkersOf(const std::map<std::string, Annotation> &all,
                                    const std::optional<CorpusManifest> &manifest,
                                    MarkerSource source, const MarkersArgs &a,
                                    std::vector<SkippedFile> &skipped) {
  std::vector<MarkerReport> out;
  for (const auto &[id, ann] : all) {
    const Interview *iv = manifest ? manifest->Find(id) : nullptr;
    try {
      if (manifest && !iv) throw InputError("not in the manifest");
      Annotation a_roles = ann;
      // Speaker-labeled annotations are mapped to roles when possible.
      if (iv) {
        const auto labels = ann.Labels();
        const bool speakers = std::all_of(labels.begin(), labels.end(), [&](const auto &l) {
          return iv->roles.count(l) > 0;
        });
        if (speakers && !labels.empty()) a_roles = iv->ToRoles(ann);
      }
      const Time end = iv ? iv->duration : ann.EndTime();
      const Time start = a.from ? Time::FromSeconds(*a.from) : Time();
      if (end <= start) throw InputError("empty extent");
      const std::string group = iv ? std::string(GroupName(iv->group)) : "NA";
      out.push_back(ComputeMarkers(a_roles, group, source, a.role, Segment(start, end)));
    } catch (const InputError &e) {
      skipped.push_back({id, e.what()});
    }
  }
  return out;
}

void RunMarkers(const MarkersArgs &a) {
  std::optional<CorpusManifest> manifest;
  if (!a.manifest.empty()) manifest = ParseManifest(ReadFile(a.manifest));
  std::vector<SkippedFile> skipped;
  auto ref = MarkersOf(ParseRttm(ReadFile(a.annotations)), manifest,
                       MarkerSource::kReference, a, skipped);
  std::vector<MarkerReport> all = ref;
  if (!a.pred.empty()) {
    auto pred = MarkersOf(ParseRttm(ReadFile(a.pred)), manifest, MarkerSource::kPredicted,
                          a, skipped);
    all.insert(all.end(), pred.begin(), pred.end());
    if (!a.agreement.empty()) {
      // Compare only files present on both sides.
      std::set<std::string> both;
      for (const auto &p : pred) both.insert(p.file_id);
      std::vector<MarkerReport> ref_kept;
      std::set<std::string> ref_ids;
      for (const auto &r : ref) {
        if (both.count(r.file_id)) {
          ref_kept.push_back(r);
          ref_ids.insert(r.file_id);
        }
      }
      std::vector<MarkerReport> pred_kept;
      for (const auto &p : pred) {
        if (ref_ids.count(p.file_id)) pred_kept.push_back(p);
      }
      WriteFile(a.agreement, EmitMarkerAgreement(ComputeMarkerAgreement(ref_kept, pred_kept)));
    }
  }
  ReportSkipped(skipped);
  Emit(a.out, EmitMarkers(all));
}

// ----------------------------------------------------------------- synth

struct SynthArgs {
  std::string config, out;
  std::optional<std::uint64_t> seed;
  bool stats = false;
};

void RunSynth(const SynthArgs &a) {
  SynthConfig cfg = a.config.empty() ? SynthConfig{} : ParseSynthConfig(ReadFile(a.config));
  if (a.seed) cfg.seed = *a.seed;
  const SynthCorpus sc = GenerateCorpus(cfg);
  WriteCorpus(sc.corpus, a.out);
  WriteFile(fs::path(a.out) / "synth.cfg", EmitSynthConfig(cfg));
  std::cout << "wrote " << sc.corpus.manifest.size() << " interviews to " << a.out << "\n";
}

// --------------------------------------------------------------- compare

struct CompareArgs {
  std::string role, enroll, topline, chance, out;
};

std::vector<FileReport> ReportsAt(const std::string &p) {
  if (p.empty()) return {};
  fs::path path(p);
  if (fs::is_directory(path)) path /= "reports.csv";
  try {
    return ParseIerReport(ReadFile(path));
  } catch (const ParseError &e) {
    throw ParseError(e.line(), e.column(), path.string() + ": " + e.what());
  }
}

void RunCompare(const CompareArgs &a) {
  const auto role = ReportsAt(a.role);
  const auto enroll = ReportsAt(a.enroll);
  const auto top = ReportsAt(a.topline);
  const auto chance = ReportsAt(a.chance);
  const Comparison c = CompareApproaches(role, enroll, top, chance);
  Emit(a.out, EmitComparison(c));
  if (!a.out.empty() && a.out != "-") std::cout << "overall winner: " << c.overall.winner << "\n";
}

// ----------------------------------------------------------------- stats

struct StatsArgs {
  std::string manifest, split, out;
};

void RunStats(const StatsArgs &a, const Globals &g) {
  const LoadedCorpus loaded = Load(a.manifest, g);
  std::optional<SplitAssignment> split;
  if (!a.split.empty()) split = ParseSplit(ReadFile(a.split));
  const auto stats = ComputeCorpusStatistics(loaded.corpus.manifest, loaded.corpus.references,
                                             split ? &*split : nullptr);
  Emit(a.out, EmitCorpusStatistics(stats));
}

void AddEnrollOptions(CLI::App *cmd, EnrollArgs &e) {
  cmd->add_option("--manifest", e.manifest, "Corpus manifest CSV")->required();
  cmd->add_option("--split", e.split, "Split file")->required();
  cmd->add_option("--embeddings", e.embeddings, "Embedding cache CSV");
  cmd->add_option("--synth-embeddings", e.synth_embeddings,
                  "synth.cfg of a synthetic corpus; rebuilds its embedding model");
  cmd->add_flag("--topline", e.topline, "Use ground-truth segmentation");
  cmd->add_flag("--chance", e.chance, "Permutation chance baseline");
  cmd->add_option("--seed", e.seed, "Seed of the chance baseline");
  cmd->add_option("--subset", e.subset, "Meta set to evaluate (train, dev, test)");
  cmd->add_option("--collar", e.collar, "Scoring collar in seconds");
  cmd->add_option("--vad-onset", e.vad_onset);
  cmd->add_option("--vad-offset", e.vad_offset);
  cmd->add_option("--change-threshold", e.change_threshold);
  cmd->add_option("--min-gap", e.min_gap, "Minimum gap between change points (s)");
  cmd->add_option("--smoothing", e.smoothing, "Change score smoothing window (s)");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"turnkit: speaker turn detection and identification toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--jobs", g.jobs, "Worker threads (1 = serial reference path)")
      ->check(CLI::NonNegativeNumber);

  EvaluateArgs ev;
  auto *evaluate = app.add_subcommand("evaluate", "Score a hypothesis RTTM against a reference");
  evaluate->add_option("--ref", ev.ref, "Reference RTTM")->required();
  evaluate->add_option("--hyp", ev.hyp, "Hypothesis RTTM")->required();
  evaluate->add_option("--uem", ev.uem, "Scoring extents");
  evaluate->add_option("--collar", ev.collar, "Collar in seconds")->check(CLI::NonNegativeNumber);
  evaluate->add_option("--manifest", ev.manifest, "Manifest for extents and groups");
  evaluate->add_flag("--map-roles", ev.map_roles, "Map reference speakers to roles");
  evaluate->add_option("--out", ev.out, "Output CSV (default stdout)");

  SplitArgs sp;
  auto *split = app.add_subcommand("split", "Meta-train/dev/test split of a manifest");
  split->add_option("--manifest", sp.manifest)->required();
  split->add_option("--seed", sp.seed)->required();
  split->add_flag("--stratify,!--no-stratify", sp.stratify,
                  "Stratify by clinical group (default on)");
  split->add_option("--tdev", sp.t_dev, "Enrollment horizon in seconds");
  split->add_option("--test-boundary", sp.boundary, "Start of every test extent in seconds");
  split->add_option("--out", sp.out, "Split file (default stdout)");

  auto *pipeline = app.add_subcommand("pipeline", "Run one of the two pipelines");
  pipeline->require_subcommand(1);
  EnrollArgs en;
  auto *enroll = pipeline->add_subcommand("enroll", "Speaker enrollment pipeline");
  AddEnrollOptions(enroll, en);
  enroll->add_option("--tdev", en.t_dev, "Enrollment horizon (s); default from the split");
  enroll->add_option("--out", en.out, "Output directory")->required();

  RolesArgs ro;
  auto *roles = pipeline->add_subcommand("roles", "Speaker role recognition pipeline");
  roles->add_option("--manifest", ro.manifest)->required();
  roles->add_option("--split", ro.split)->required();
  roles->add_option("--tune-on", ro.tune_on, "Tune role thresholds on this meta set");
  roles->add_option("--subset", ro.subset, "Meta set to evaluate");
  roles->add_option("--onset", ro.onset);
  roles->add_option("--offset", ro.offset);
  roles->add_option("--collar", ro.collar);
  roles->add_option("--out", ro.out, "Output directory")->required();

  SweepArgs sw;
  auto *sweep = app.add_subcommand("sweep-tdev", "Enrollment IER as a function of tDev");
  AddEnrollOptions(sweep, sw.enroll);
  sweep->add_option("--grid", sw.grid, "lo:hi:step or a,b,c in seconds");
  sweep->add_option("--out", sw.enroll.out, "Output CSV (default stdout)");

  AblateArgs ab;
  auto *ablate = app.add_subcommand("ablate", "Role pipeline vs meta-train fraction");
  ablate->add_option("--manifest", ab.manifest)->required();
  ablate->add_option("--split", ab.split)->required();
  ablate->add_option("--fractions", ab.fractions)->delimiter(',');
  ablate->add_option("--seed", ab.seed);
  ablate->add_option("--out", ab.out, "Output CSV (default stdout)");

  MarkersArgs mk;
  auto *markers = app.add_subcommand("markers", "Silence ratio and utterance duration SD");
  markers->add_option("--annotations", mk.annotations, "Reference RTTM")->required();
  markers->add_option("--pred", mk.pred, "Predicted RTTM");
  markers->add_option("--manifest", mk.manifest, "Manifest for extents, groups and roles");
  markers->add_option("--role", mk.role, "Label whose utterances are measured");
  markers->add_option("--from", mk.from, "Extent start in seconds (e.g. the test boundary)");
  markers->add_option("--agreement", mk.agreement, "Write the paired agreement table here");
  markers->add_option("--out", mk.out, "Output CSV (default stdout)");

  SynthArgs sy;
  auto *synth = app.add_subcommand("synth", "Write a synthetic corpus");
  synth->add_option("--config", sy.config, "key=value SynthConfig file");
  synth->add_option("--seed", sy.seed, "Overrides the config seed");
  synth->add_option("--out", sy.out, "Output directory")->required();

  CompareArgs cm;
  auto *compare = app.add_subcommand("compare", "Align per-file reports of the approaches");
  compare->add_option("--role", cm.role, "Role pipeline reports (dir or CSV)")->required();
  compare->add_option("--enroll", cm.enroll, "Enrollment reports")->required();
  compare->add_option("--topline", cm.topline);
  compare->add_option("--chance", cm.chance);
  compare->add_option("--out", cm.out, "Output CSV (default stdout)");

  StatsArgs st;
  auto *stats = app.add_subcommand("stats", "Corpus statistics per meta set");
  stats->add_option("--manifest", st.manifest)->required();
  stats->add_option("--split", st.split);
  stats->add_option("--out", st.out, "Output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);
  SetThreadCount(g.jobs);

  try {
    if (*evaluate) RunEvaluate(ev);
    else if (*split) RunSplit(sp);
    else if (*enroll) RunEnroll(en, g);
    else if (*roles) RunRoles(ro, g);
    else if (*sweep) RunSweep(sw, g);
    else if (*ablate) RunAblate(ab, g);
    else if (*markers) RunMarkers(mk);
    else if (*synth) RunSynth(sy);
    else if (*compare) RunCompare(cm);
    else if (*stats) RunStats(st, g);
  } catch (const std::exception &e) {
    std::cerr << "turnkit: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
