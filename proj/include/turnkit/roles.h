// Speaker role recognition path: role score streams decoded straight into
// a role-labeled annotation, scored on the same test extents as the
// enrollment path, plus the side-by-side comparison of approaches.
#ifndef TURNKIT_ROLES_H_
#define TURNKIT_ROLES_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "turnkit/corpus.h"
#include "turnkit/decoding.h"
#include "turnkit/metrics.h"
#include "turnkit/parallel.h"
#include "turnkit/splits.h"

namespace turnkit {

struct RolePipelineConfig {
  RoleConfigs per_role;  // keyed by role name; exactly the two roles
  Time t_test_boundary = kDefaultTestBoundary;
  Subset evaluate_on = Subset::kTest;
  Time collar;

  // Default binarization for both roles.
  static RolePipelineConfig Defaults();
  // Throws InputError unless per_role holds exactly the two role names.
  void Validate() const;
};

// decode roles, crop to [t_test_boundary, end), score against the
// role-mapped reference. Files without a stream carrying both role
// channels are skipped and reported.
PipelineResult RunRolePipeline(const Corpus &corpus,
                               const SplitAssignment &split,
                               const RolePipelineConfig &cfg,
                               Execution exec = Execution::kParallel);

// Tunes per-role thresholds on the test extents of the given subset with
// the joint identification objective.
RoleConfigs TuneRoleThresholds(const Corpus &corpus,
                               const SplitAssignment &split, Subset subset,
                               std::span<const BinarizeConfig> grid,
                               Execution exec = Execution::kParallel);

struct AblationRow {
  double fraction = 1.0;
  std::size_t train_files = 0;
  RoleConfigs thresholds;
  IerReport report;  // aggregate over the scored test files
};

// Training-size ablation. For each fraction, meta-train is subsampled with
// SubsampleTrain, role thresholds are tuned on the kept interviews and the
// role pipeline is scored on meta-test.
std::vector<AblationRow> AblateTrainFraction(
    const Corpus &corpus, const SplitAssignment &split,
    std::span<const double> fractions, std::span<const BinarizeConfig> grid,
    std::uint64_t seed, const RolePipelineConfig &base = RolePipelineConfig::Defaults(),
    Execution exec = Execution::kParallel);

enum class Approach { kRole, kEnrollment, kTopline, kChance };
std::string_view ApproachName(Approach a);  // "role", "enroll", ...

struct ComparisonRow {
  std::string file_id;  // "__global__" for the aggregate row
  std::string group;
  std::optional<IerReport> role, enroll, topline, chance;
  // Lower-IER pipeline between role and enrollment: "role", "enroll" or
  // "tie".
  std::string winner;
};

struct Comparison {
  std::vector<ComparisonRow> rows;  // per file, sorted by file id
  ComparisonRow overall;
};

// Aligns the report sets by file id. topline and chance may be empty
// (column left out). Throws InputError when any provided set covers a
// different file set.
Comparison CompareApproaches(std::span<const FileReport> role,
                             std::span<const FileReport> enroll,
                             std::span<const FileReport> topline = {},
                             std::span<const FileReport> chance = {});

}  // namespace turnkit

#endif  // TURNKIT_ROLES_H_
