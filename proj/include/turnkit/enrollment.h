// Speaker enrollment back end: per-speaker mean templates, cosine scoring
// of candidate segments, argmin identification, the permutation chance
// baseline, and the full enrollment pipeline with its tDev sweep.
#ifndef TURNKIT_ENROLLMENT_H_
#define TURNKIT_ENROLLMENT_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "turnkit/corpus.h"
#include "turnkit/decoding.h"
#include "turnkit/error.h"
#include "turnkit/metrics.h"
#include "turnkit/parallel.h"
#include "turnkit/splits.h"
#include "turnkit/timeline.h"

namespace turnkit {

class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  // Throws InputError on an empty or non-finite vector.
  explicit EmbeddingVector(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t dim() const { return values_.size(); }
  double Norm() const;

  bool operator==(const EmbeddingVector &) const = default;

 private:
  std::vector<double> values_;
};

// Stand-in for the segment embedding model. Implementations must be
// deterministic and safe to call concurrently.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  virtual EmbeddingVector Embed(std::string_view file_id,
                                const Segment &segment) const = 0;
};

// Precomputed embeddings keyed by (file id, start tick, end tick). Embed()
// throws InputError for a segment that is not in the cache.
class CachedEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit CachedEmbeddingProvider(std::size_t dim) : dim_(dim) {}

  // Throws InputError on a dimension mismatch or a duplicate key.
  void Add(std::string file_id, const Segment &segment, EmbeddingVector v);

  std::size_t dim() const override { return dim_; }
  std::size_t size() const { return cache_.size(); }
  EmbeddingVector Embed(std::string_view file_id,
                        const Segment &segment) const override;

 private:
  using Key = std::tuple<std::string, std::int64_t, std::int64_t>;
  std::size_t dim_;
  std::map<Key, EmbeddingVector> cache_;
};

inline const Time kDefaultMinEmbeddable = Time::FromTicks(kTicksPerSecond / 10);

struct SpeakerTemplate {
  std::string speaker;
  EmbeddingVector vector;  // unweighted mean of support_count embeddings
  std::size_t support_count = 0;
  Time support_duration;
  std::size_t skipped_count = 0;  // segments shorter than the minimum
};

struct SegmentRef {
  std::string file_id;
  Segment segment;
};

// Thrown when a speaker has no usable enrollment segment.
class EnrollmentImpossible : public InputError {
 public:
  using InputError::InputError;
};

// Mean embedding over the segments at least min_duration long.
SpeakerTemplate BuildTemplate(const EmbeddingProvider &provider,
                              std::span<const SegmentRef> dev_segments,
                              std::string speaker,
                              Time min_duration = kDefaultMinEmbeddable);

// (1 - cos(u, m)) / 2, in [0, 1]. Throws InputError on a zero-norm input
// or a dimension mismatch.
double CosineDistance(const EmbeddingVector &u, const EmbeddingVector &m);

// Row-major candidates x templates.
struct DistanceMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

// Column of the smallest entry per row; ties go to the lower column.
std::vector<std::size_t> ArgminPerRow(const DistanceMatrix &d);

// Permutes all matrix entries uniformly at random (across rows as well as
// columns), then takes the argmin per row. Throws InputError on a
// non-finite entry or an empty matrix.
std::vector<std::size_t> ChanceBaseline(const DistanceMatrix &d,
                                        std::uint64_t seed);

struct IdentifyDiagnostics {
  std::size_t too_short = 0;  // labeled from the nearest identified neighbor
  std::size_t zero_norm = 0;  // labeled with the first template
};

enum class CandidateStatus { kScored, kTooShort, kZeroNorm };

// Embeddings of the candidates long enough to embed, scored against the
// templates. row_of[k] is the matrix row of candidate k when status[k] is
// kScored.
struct CandidateScores {
  DistanceMatrix distances;
  std::vector<std::size_t> row_of;
  std::vector<CandidateStatus> status;
  IdentifyDiagnostics diagnostics;
};

CandidateScores ScoreCandidates(const EmbeddingProvider &provider,
                                std::string_view file_id,
                                std::span<const Segment> candidates,
                                std::span<const SpeakerTemplate> templates,
                                Time min_duration = kDefaultMinEmbeddable);

struct Identification {
  Annotation annotation;               // speaker-labeled
  std::vector<std::size_t> template_of;  // per candidate
  IdentifyDiagnostics diagnostics;
};

// Labels every candidate from a per-row template choice. Candidates
// without a row take the label of the nearest (in time) candidate that has
// one, earlier neighbor on ties, or the first template if none exists.
// Zero-norm candidates take the first template.
Identification AssignLabels(std::string file_id,
                            std::span<const Segment> candidates,
                            std::span<const SpeakerTemplate> templates,
                            const CandidateScores &scores,
                            std::span<const std::size_t> choice_per_row);

// Argmin cosine identification of every candidate. Overlapping candidates
// are allowed; same-label overlaps in the output are merged.
Identification Identify(const EmbeddingProvider &provider,
                        std::string file_id,
                        std::span<const Segment> candidates,
                        std::span<const SpeakerTemplate> templates,
                        Time min_duration = kDefaultMinEmbeddable);

enum class SegmentationSource { kDecoded, kGroundTruth };
enum class Identifier { kArgmin, kChance };

struct EnrollmentConfig {
  BinarizeConfig vad;
  ChangeConfig change;
  std::string vad_channel{kSpeechChannel};
  std::string change_channel{kChangeChannel};
  Time t_dev = kDefaultTDev;
  Time min_embeddable = kDefaultMinEmbeddable;
  SegmentationSource segmentation = SegmentationSource::kDecoded;
  Identifier identifier = Identifier::kArgmin;
  std::uint64_t chance_seed = 0;
  Subset evaluate_on = Subset::kTest;
  Time collar;
};

// Per interview of cfg.evaluate_on: VAD, change points, candidates,
// templates from the dev window at cfg.t_dev, identification, speaker to
// role mapping, crop to [t_test_boundary, end) and scoring. Files with a
// speaker that cannot be enrolled, or with missing data, are skipped and
// reported.
PipelineResult RunEnrollmentPipeline(const Corpus &corpus,
                                     const SplitAssignment &split,
                                     const EmbeddingProvider &provider,
                                     const EnrollmentConfig &cfg,
                                     Execution exec = Execution::kParallel);

struct SweepRow {
  Time t_dev;
  IerReport report;      // aggregate over scored files
  std::size_t files = 0;
  std::size_t skipped = 0;
};

// One pipeline run per grid value, all scored on the same test extents.
// Throws InputError on an empty grid or a value outside
// (0, t_test_boundary].
std::vector<SweepRow> SweepTDev(const Corpus &corpus,
                                const SplitAssignment &split,
                                const EmbeddingProvider &provider,
                                const EnrollmentConfig &cfg,
                                std::span<const Time> grid,
                                Execution exec = Execution::kParallel);

// "lo:hi:step" in seconds, inclusive of hi when reachable.
std::vector<Time> ParseTimeGrid(std::string_view text);

}  // namespace turnkit

#endif  // TURNKIT_ENROLLMENT_H_
