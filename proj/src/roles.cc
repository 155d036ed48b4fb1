#include "turnkit/roles.h"

#include <algorithm>
#include <map>
#include <set>

#include "turnkit/error.h"

namespace turnkit {

RolePipelineConfig RolePipelineConfig::Defaults() {
  RolePipelineConfig cfg;
  for (const auto &r : RoleVocabulary()) cfg.per_role[r] = BinarizeConfig{};
  return cfg;
}

void RolePipelineConfig::Validate() const {
  const auto roles = RoleVocabulary();
  if (per_role.size() != roles.size()) {
    throw InputError("role pipeline needs a config for exactly the two roles");
  }
  for (const auto &r : roles) {
    auto it = per_role.find(r);
    if (it == per_role.end()) throw InputError("no config for role '" + r + "'");
    it->second.Validate();
  }
}

namespace {

const ScoreStream *RoleStream(const Corpus &corpus, const std::string &id) {
  auto it = corpus.scores.find(id);
  if (it == corpus.scores.end()) return nullptr;
  for (const auto &s : it->second.streams) {
    bool all = true;
    for (Role r : kAllRoles) all = all && s.ChannelIndex(RoleName(r)).has_value();
    if (all) return &s;
  }
  return nullptr;
}

struct FileOutcome {
  std::optional<FileReport> report;
  std::optional<SkippedFile> skipped;
  Annotation hypothesis;
};

}  // namespace

PipelineResult RunRolePipeline(const Corpus &corpus,
                               const SplitAssignment &split,
                               const RolePipelineConfig &cfg, Execution exec) {
  cfg.Validate();
  const auto files = InterviewsIn(corpus.manifest, split, cfg.evaluate_on);
  const auto vocab = RoleVocabulary();
  const auto outcomes = MapIndex<FileOutcome>(files.size(), exec, [&](std::size_t i) {
    const Interview &iv = *files[i];
    FileOutcome o;
    auto ref = corpus.references.find(iv.file_id);
    const ScoreStream *stream = RoleStream(corpus, iv.file_id);
    if (ref == corpus.references.end()) {
      o.skipped = SkippedFile{iv.file_id, "no reference annotation"};
      return o;
    }
    if (!stream) {
      o.skipped = SkippedFile{iv.file_id, "no stream with both role channels"};
      return o;
    }
    try {
      if (cfg.t_test_boundary >= iv.duration) {
        throw InputError("file ends before the test boundary");
      }
      const Segment extent(cfg.t_test_boundary, iv.duration);
      o.hypothesis = Crop(DecodeRoles(*stream, cfg.per_role), extent);
      const Annotation ref_roles = Crop(iv.ToRoles(ref->second), extent);
      o.report = FileReport{
          iv.file_id, std::string(GroupName(iv.group)),
          IdentificationErrorRate(ref_roles, o.hypothesis, extent, cfg.collar, vocab)};
    } catch (const InputError &e) {
      o.skipped = SkippedFile{iv.file_id, e.what()};
    }
    return o;
  });

  PipelineResult result;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (outcomes[i].report) {
      result.reports.push_back(*outcomes[i].report);
      result.hypotheses.emplace(files[i]->file_id, outcomes[i].hypothesis);
    } else {
      result.skipped.push_back(*outcomes[i].skipped);
    }
  }
  return result;
}

RoleConfigs TuneRoleThresholds(const Corpus &corpus,
                               const SplitAssignment &split, Subset subset,
                               std::span<const BinarizeConfig> grid,
                               Execution exec) {
  std::vector<Annotation> refs;
  std::vector<const ScoreStream *> streams;
  std::vector<Segment> extents;
  for (const Interview *iv : InterviewsIn(corpus.manifest, split, subset)) {
    auto ref = corpus.references.find(iv->file_id);
    const ScoreStream *stream = RoleStream(corpus, iv->file_id);
    if (ref == corpus.references.end() || !stream ||
        split.t_test_boundary >= iv->duration) {
      continue;
    }
    refs.push_back(iv->ToRoles(ref->second));
    streams.push_back(stream);
    extents.emplace_back(split.t_test_boundary, iv->duration);
  }
  std::vector<TuningItem> items;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    items.push_back({streams[i], &refs[i], extents[i]});
  }
  const auto roles = RoleVocabulary();
  return TuneThresholds(items, roles, grid, Objective::kIdentification, exec);
}

std::vector<AblationRow> AblateTrainFraction(
    const Corpus &corpus, const SplitAssignment &split,
    std::span<const double> fractions, std::span<const BinarizeConfig> grid,
    std::uint64_t seed, const RolePipelineConfig &base, Execution exec) {
  if (fractions.empty()) throw InputError("no fractions to ablate");
  std::vector<AblationRow> rows;
  for (double f : fractions) {
    const SplitAssignment sub = SubsampleTrain(split, f, seed);
    AblationRow row;
    row.fraction = f;
    row.train_files = sub.meta_train.size();
    row.thresholds = TuneRoleThresholds(corpus, sub, Subset::kTrain, grid, exec);
    RolePipelineConfig cfg = base;
    cfg.per_role = row.thresholds;
    cfg.evaluate_on = Subset::kTest;
    row.report = RunRolePipeline(corpus, sub, cfg, exec).Summary().global;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string_view ApproachName(Approach a) {
  switch (a) {
    case Approach::kRole:
      return "role";
    case Approach::kEnrollment:
      return "enroll";
    case Approach::kTopline:
      return "topline";
    case Approach::kChance:
      return "chance";
  }
  return "?";
}

namespace {

std::string Winner(const std::optional<IerReport> &role,
                   const std::optional<IerReport> &enroll) {
  if (!role || !enroll) return "NA";
  const auto a = role->ier();
  const auto b = enroll->ier();
  if (!a || !b) return "NA";
  if (*a < *b) return "role";
  if (*b < *a) return "enroll";
  return "tie";
}

}  // namespace

Comparison CompareApproaches(std::span<const FileReport> role,
                             std::span<const FileReport> enroll,
                             std::span<const FileReport> topline,
                             std::span<const FileReport> chance) {
  auto index = [](std::span<const FileReport> reports, std::string_view name) {
    std::map<std::string, const FileReport *> m;
    for (const auto &r : reports) {
      if (!m.emplace(r.file_id, &r).second) {
        throw InputError(std::string(name) + " reports list '" + r.file_id +
                         "' twice");
      }
    }
    return m;
  };
  const auto role_m = index(role, "role");
  const auto enroll_m = index(enroll, "enroll");
  const auto top_m = index(topline, "topline");
  const auto chance_m = index(chance, "chance");

  auto keys = [](const std::map<std::string, const FileReport *> &m) {
    std::set<std::string> k;
    for (const auto &kv : m) k.insert(kv.first);
    return k;
  };
  const auto files = keys(role_m);
  if (files.empty()) throw InputError("no reports to compare");
  auto check = [&](const std::map<std::string, const FileReport *> &m,
                   std::string_view name, bool optional) {
    if (optional && m.empty()) return;
    if (keys(m) != files) {
      throw InputError(std::string(name) +
                       " reports cover a different file set than role reports");
    }
  };
  check(enroll_m, "enroll", false);
  check(top_m, "topline", true);
  check(chance_m, "chance", true);

  Comparison out;
  out.overall.file_id = "__global__";
  out.overall.group = "ALL";
  auto add = [](std::optional<IerReport> &acc, const IerReport &r) {
    if (!acc) acc = IerReport{};
    *acc += r;
  };
  for (const auto &id : files) {
    ComparisonRow row;
    row.file_id = id;
    row.group = role_m.at(id)->group;
    row.role = role_m.at(id)->report;
    row.enroll = enroll_m.at(id)->report;
    add(out.overall.role, *row.role);
    add(out.overall.enroll, *row.enroll);
    if (!top_m.empty()) {
      row.topline = top_m.at(id)->report;
      add(out.overall.topline, *row.topline);
    }
    if (!chance_m.empty()) {
      row.chance = chance_m.at(id)->report;
      add(out.overall.chance, *row.chance);
    }
    row.winner = Winner(row.role, row.enroll);
    out.rows.push_back(std::move(row));
  }
  out.overall.winner = Winner(out.overall.role, out.overall.enroll);
  return out;
}

}  // namespace turnkit
