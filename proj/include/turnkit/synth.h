// Synthetic two-party interviews with known ground truth: reference
// annotations, noisy score streams and toy segment embeddings.
#ifndef TURNKIT_SYNTH_H_
#define TURNKIT_SYNTH_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "turnkit/corpus.h"
#include "turnkit/enrollment.h"

namespace turnkit {

struct SynthEmbeddingParams {
  std::uint64_t seed = 1;
  std::size_t dim = 32;
  double centroid_separation = 1.0;
  double noise_sigma = 0.0;
};

struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t file_count = 10;
  Time file_duration = Time::FromTicks(600 * kTicksPerSecond);
  // Mean utterance duration and mean utterances per turn, per role.
  Time np_utterance = Time::FromTicks(25 * kTicksPerSecond / 10);
  Time it_utterance = Time::FromTicks(35 * kTicksPerSecond / 10);
  double np_utterances_per_turn = 1.2;
  double it_utterances_per_turn = 3.0;
  Time min_utterance = Time::FromTicks(kTicksPerSecond / 2);
  // Pause = min_pause + exponential with mean pause_duration.
  Time pause_duration = Time::FromTicks(kTicksPerSecond / 2);
  Time min_pause = Time::FromTicks(kTicksPerSecond / 5);
  // Probability that a turn starts before the previous one ends, and the
  // mean length of such overlaps (capped at half the overlapped utterance).
  double overlap_probability = 0.1;
  Time overlap_duration = Time::FromTicks(kTicksPerSecond / 2);
  double score_noise_sigma = 0.0;
  // Half width of the triangular change impulse at each boundary.
  Time change_half_width = Time::FromTicks(kTicksPerSecond / 10);
  Time frame_step = Time::FromTicks(kTicksPerSecond / 100);
  // Round every reference boundary to the frame grid.
  bool snap_to_frames = true;
  std::size_t embedding_dim = 32;
  double centroid_separation = 1.0;
  double embedding_noise_sigma = 0.0;

  // Throws InputError on an invalid value.
  void Validate() const;
  SynthEmbeddingParams EmbeddingParams() const {
    return {seed, embedding_dim, centroid_separation, embedding_noise_sigma};
  }
};

// Deterministic toy embedding model. Each file gets two speaker centroids
// centroid_separation apart; a segment embeds to the centroid of the
// speaker with the most speech inside it, plus Gaussian noise seeded by
// (file, segment). Segments with no reference speech embed to a per-file
// background direction.
class SynthEmbeddingProvider : public EmbeddingProvider {
 public:
  SynthEmbeddingProvider(const SynthEmbeddingParams &params,
                         const CorpusManifest &manifest,
                         const std::map<std::string, Annotation> &references);

  std::size_t dim() const override { return params_.dim; }
  EmbeddingVector Embed(std::string_view file_id,
                        const Segment &segment) const override;
  // Noise-free centroid of a speaker.
  const std::vector<double> &Centroid(const std::string &file_id,
                                      const std::string &speaker) const;

 private:
  struct FileModel {
    std::uint64_t noise_seed = 0;
    std::vector<LabeledSegment> entries;
    Time longest;
    std::map<std::string, std::vector<double>> centroids;
    std::vector<std::string> speakers;  // role order
    std::vector<double> background;
  };

  SynthEmbeddingParams params_;
  std::map<std::string, FileModel, std::less<>> files_;
};

struct SynthCorpus {
  SynthConfig config;
  Corpus corpus;
  std::shared_ptr<const SynthEmbeddingProvider> embeddings;
};

// Alternating turns starting with the neuropsychologist. Streams carry
// the channels Neuropsychologist, Interviewee, speech and change: ground
// truth indicators (sampled at frame centers) and triangular change
// impulses, plus clipped Gaussian noise. Fully determined by config.seed.
SynthCorpus GenerateCorpus(const SynthConfig &config);

// Boundary quantization bound on the IER of a perfect decoder:
// 2 * frame_step * (number of reference entries) / total reference time,
// over the given extents.
double QuantizationFloor(std::span<const Annotation *const> references,
                         std::span<const Segment> extents, Time frame_step);

struct CorpusStatsColumn {
  std::string name;
  std::size_t interviews = 0;
  std::size_t segments_it = 0;
  std::size_t segments_np = 0;
  Time duration_it;
  Time duration_np;
  Time duration_overlap;  // time with two or more active speakers
  std::array<std::size_t, 3> groups{};  // C, preHD, HD
};

struct CorpusStatistics {
  std::vector<CorpusStatsColumn> columns;
};

// One column per meta set when split is given, otherwise a single "all"
// column.
CorpusStatistics ComputeCorpusStatistics(
    const CorpusManifest &manifest,
    const std::map<std::string, Annotation> &references,
    const SplitAssignment *split = nullptr);

}  // namespace turnkit

#endif  // TURNKIT_SYNTH_H_
