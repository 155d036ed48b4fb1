// Frame-level score streams to segments: hysteresis binarization for
// speech and role channels, peak picking for speaker change, and the
// candidate speaker-homogeneous segments built from both.
#ifndef TURNKIT_DECODING_H_
#define TURNKIT_DECODING_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "turnkit/metrics.h"
#include "turnkit/parallel.h"
#include "turnkit/time.h"
#include "turnkit/timeline.h"

namespace turnkit {

// Frame i covers [start + i*step, start + (i+1)*step). Scores are stored
// frame-major: scores[i * channels + c].
class ScoreStream {
 public:
  ScoreStream() = default;
  // Throws InputError on step <= 0, negative start, duplicate or empty
  // channel names, a score matrix of the wrong size, or a score that is
  // not finite or outside [0, 1].
  ScoreStream(std::string file_id, Time frame_step, Time start_time,
              std::vector<std::string> channels, std::vector<double> scores);

  const std::string &file_id() const { return file_id_; }
  Time frame_step() const { return frame_step_; }
  Time start_time() const { return start_time_; }
  std::span<const std::string> channels() const { return channels_; }
  std::span<const double> scores() const { return scores_; }
  std::size_t num_frames() const { return num_frames_; }
  std::size_t num_channels() const { return channels_.size(); }

  double score(std::size_t frame, std::size_t channel) const {
    return scores_[frame * channels_.size() + channel];
  }
  Time FrameStart(std::size_t frame) const {
    return start_time_ + frame_step_ * static_cast<std::int64_t>(frame);
  }
  std::optional<std::size_t> ChannelIndex(std::string_view label) const;
  // Throws InputError when the channel is missing.
  std::vector<double> Column(std::string_view label) const;
  // [start, start + frames*step); nullopt for an empty stream.
  std::optional<Segment> Extent() const;

  bool operator==(const ScoreStream &) const = default;

 private:
  std::string file_id_;
  Time frame_step_;
  Time start_time_;
  std::vector<std::string> channels_;
  std::vector<double> scores_;
  std::size_t num_frames_ = 0;
};

struct BinarizeConfig {
  double onset = 0.5;
  double offset = 0.5;
  Time min_duration_on = Time::FromTicks(kTicksPerSecond / 10);
  Time min_duration_off = Time::FromTicks(kTicksPerSecond / 10);
  Time pad_onset;
  Time pad_offset;

  // Throws InputError unless 0 <= offset <= onset <= 1 and all durations
  // are non-negative.
  void Validate() const;
  bool operator==(const BinarizeConfig &) const = default;
};

// Hysteresis decoding of one channel: a region opens on a frame with
// score >= onset and closes on the first later frame with score < offset.
// Then regions shorter than min_duration_on are dropped, gaps shorter than
// min_duration_off are filled, pads are applied, the result is re-supported
// and clipped to the stream extent.
Timeline Binarize(const ScoreStream &stream, std::string_view channel,
                  const BinarizeConfig &cfg);

struct ChangeConfig {
  double threshold = 0.5;
  Time min_gap = Time::FromTicks(kTicksPerSecond / 4);
  // Centered moving-average window; zero disables smoothing.
  Time smoothing = Time::FromTicks(kTicksPerSecond / 10);
};

// Frame-start times of local maxima of the smoothed change score that
// exceed the threshold. Peaks are kept greedily from the highest down,
// discarding any within min_gap of one already kept. Strictly increasing.
std::vector<Time> DetectChangePoints(const ScoreStream &stream,
                                     std::string_view channel,
                                     const ChangeConfig &cfg);

// Splits every VAD segment at each change point strictly inside it.
// Change points outside all segments are ignored. Throws InputError if
// change_points is not increasing.
Timeline CandidateSegments(const Timeline &vad,
                           std::span<const Time> change_points);

using RoleConfigs = std::map<std::string, BinarizeConfig>;

// Binarizes one channel per role and combines the results into one
// annotation labeled by role. Overlapping roles stay overlapping. Throws
// InputError when a role has no channel.
Annotation DecodeRoles(const ScoreStream &stream, const RoleConfigs &cfg);

enum class Objective {
  // Channel c against the reference entries labeled c, jointly over all
  // channels (full identification error rate).
  kIdentification,
  // Each channel independently against the speech support of the whole
  // reference.
  kDetection,
};

struct TuningItem {
  const ScoreStream *stream;
  const Annotation *reference;
  Segment extent;
};

// Grid search for the per-channel config minimizing the aggregate error
// rate (summed errors over summed reference time) of the items. For
// kIdentification the search runs over the product grid across channels;
// for kDetection each channel is searched alone. Ties go to the earliest
// grid element (first channel most significant). Throws InputError on an
// empty item list or grid.
RoleConfigs TuneThresholds(std::span<const TuningItem> items,
                           std::span<const std::string> channels,
                           std::span<const BinarizeConfig> grid,
                           Objective objective,
                           Execution exec = Execution::kParallel);

// onset = offset in {0.1, 0.2, ..., 0.9}; other fields default. Contains
// the default config.
std::vector<BinarizeConfig> DefaultThresholdGrid();

}  // namespace turnkit

#endif  // TURNKIT_DECODING_H_
