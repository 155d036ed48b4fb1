#include "turnkit/decoding.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "turnkit/error.h"

namespace turnkit {

ScoreStream::ScoreStream(std::string file_id, Time frame_step, Time start_time,
                         std::vector<std::string> channels,
                         std::vector<double> scores)
    : file_id_(std::move(file_id)),
      frame_step_(frame_step),
      start_time_(start_time),
      channels_(std::move(channels)),
      scores_(std::move(scores)) {
  if (frame_step_ <= Time()) throw InputError("frame step must be positive");
  if (start_time_ < Time()) throw InputError("stream start must be >= 0");
  if (channels_.empty()) throw InputError("score stream has no channels");
  std::set<std::string> seen;
  for (const auto &c : channels_) {
    if (c.empty()) throw InputError("empty channel name");
    if (!seen.insert(c).second) {
      throw InputError("duplicate channel '" + c + "'");
    }
  }
  if (scores_.size() % channels_.size() != 0) {
    throw InputError("score matrix size is not a multiple of channel count");
  }
  num_frames_ = scores_.size() / channels_.size();
  for (std::size_t k = 0; k < scores_.size(); ++k) {
    const double v = scores_[k];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw InputError("score at frame " + std::to_string(k / channels_.size()) +
                       ", channel '" + channels_[k % channels_.size()] +
                       "' is not in [0, 1]");
    }
  }
}

std::optional<std::size_t> ScoreStream::ChannelIndex(
    std::string_view label) const {
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    if (channels_[c] == label) return c;
  }
  return std::nullopt;
}

std::vector<double> ScoreStream::Column(std::string_view label) const {
  auto c = ChannelIndex(label);
  if (!c) {
    throw InputError("stream '" + file_id_ + "' has no channel '" +
                     std::string(label) + "'");
  }
  std::vector<double> col(num_frames_);
  for (std::size_t i = 0; i < num_frames_; ++i) col[i] = score(i, *c);
  return col;
}

std::optional<Segment> ScoreStream::Extent() const {
  if (num_frames_ == 0) return std::nullopt;
  return Segment(start_time_, FrameStart(num_frames_));
}

void BinarizeConfig::Validate() const {
  if (!(offset >= 0.0 && offset <= onset && onset <= 1.0)) {
    throw InputError("binarize thresholds must satisfy 0 <= offset <= onset <= 1");
  }
  if (min_duration_on < Time() || min_duration_off < Time() ||
      pad_onset < Time() || pad_offset < Time()) {
    throw InputError("binarize durations and pads must be non-negative");
  }
}

Timeline Binarize(const ScoreStream &stream, std::string_view channel,
                  const BinarizeConfig &cfg) {
  cfg.Validate();
  const std::vector<double> x = stream.Column(channel);
  const auto extent = stream.Extent();
  if (!extent) return Timeline();

  std::vector<std::pair<Time, Time>> regions;
  bool active = false;
  std::size_t opened = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!active && x[i] >= cfg.onset) {
      active = true;
      opened = i;
    } else if (active && x[i] < cfg.offset) {
      active = false;
      regions.emplace_back(stream.FrameStart(opened), stream.FrameStart(i));
    }
  }
  if (active) {
    regions.emplace_back(stream.FrameStart(opened), extent->end());
  }

  std::erase_if(regions, [&](const auto &r) {
    return r.second - r.first < cfg.min_duration_on;
  });

  std::vector<std::pair<Time, Time>> filled;
  for (const auto &r : regions) {
    if (!filled.empty() && r.first - filled.back().second < cfg.min_duration_off) {
      filled.back().second = r.second;
    } else {
      filled.push_back(r);
    }
  }

  std::vector<Segment> padded;
  padded.reserve(filled.size());
  for (const auto &[s, e] : filled) {
    const Time start = std::max(extent->start(), s - cfg.pad_onset);
    const Time end = std::min(extent->end(), e + cfg.pad_offset);
    padded.emplace_back(start, end);
  }
  return Support(Timeline(std::move(padded)));
}

std::vector<Time> DetectChangePoints(const ScoreStream &stream,
                                     std::string_view channel,
                                     const ChangeConfig &cfg) {
  if (cfg.min_gap < Time()) throw InputError("min gap must be non-negative");
  if (cfg.smoothing < Time()) throw InputError("smoothing must be non-negative");
  const std::vector<double> raw = stream.Column(channel);
  const std::size_t n = raw.size();

  const auto half = static_cast<std::size_t>(std::llround(
      static_cast<double>(cfg.smoothing.ticks()) /
      (2.0 * static_cast<double>(stream.frame_step().ticks()))));
  std::vector<double> s(n);
  if (half == 0) {
    s = raw;
  } else {
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + raw[i];
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i >= half ? i - half : 0;
      const std::size_t hi = std::min(n, i + half + 1);
      s[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    }
  }

  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < n; ++i) {
    const bool rising = i == 0 || s[i] > s[i - 1];
    const bool falling = i + 1 == n || s[i] >= s[i + 1];
    if (rising && falling && s[i] > cfg.threshold) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });

  std::vector<Time> kept;
  for (std::size_t i : peaks) {
    const Time t = stream.FrameStart(i);
    const bool clear = std::none_of(kept.begin(), kept.end(), [&](Time k) {
      const Time d = t > k ? t - k : k - t;
      return d < cfg.min_gap;
    });
    if (clear) kept.push_back(t);
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  return kept;
}

Timeline CandidateSegments(const Timeline &vad,
                           std::span<const Time> change_points) {
  if (!std::is_sorted(change_points.begin(), change_points.end())) {
    throw InputError("change points must be increasing");
  }
  std::vector<Segment> out;
  for (const Segment &seg : vad) {
    auto it = std::upper_bound(change_points.begin(), change_points.end(),
                               seg.start());
    Time cursor = seg.start();
    for (; it != change_points.end() && *it < seg.end(); ++it) {
      if (*it > cursor) {
        out.emplace_back(cursor, *it);
        cursor = *it;
      }
    }
    out.emplace_back(cursor, seg.end());
  }
  return Timeline(std::move(out));
}

Annotation DecodeRoles(const ScoreStream &stream, const RoleConfigs &cfg) {
  std::vector<std::pair<std::string, Timeline>> per_role;
  for (const auto &[role, c] : cfg) {
    if (!stream.ChannelIndex(role)) {
      throw InputError("stream '" + stream.file_id() +
                       "' has no channel for role '" + role + "'");
    }
    per_role.emplace_back(role, Binarize(stream, role, c));
  }
  return Annotation::FromTimelines(stream.file_id(), per_role);
}

namespace {

Annotation Labeled(const std::string &file_id, const std::string &label,
                   const Timeline &t) {
  std::vector<LabeledSegment> entries;
  entries.reserve(t.size());
  for (const Segment &s : t) entries.push_back({s, label});
  return Annotation(file_id, std::move(entries));
}

}  // namespace

RoleConfigs TuneThresholds(std::span<const TuningItem> items,
                           std::span<const std::string> channels,
                           std::span<const BinarizeConfig> grid,
                           Objective objective, Execution exec) {
  if (items.empty()) throw InputError("threshold tuning needs at least one file");
  if (grid.empty()) throw InputError("threshold grid is empty");
  if (channels.empty()) throw InputError("no channels to tune");
  const std::size_t n = items.size();
  const std::size_t nc = channels.size();
  const std::size_t ng = grid.size();

  // decoded[(i * nc + c) * ng + g]
  const auto decoded = MapIndex<Timeline>(n * nc * ng, exec, [&](std::size_t k) {
    const std::size_t g = k % ng;
    const std::size_t c = (k / ng) % nc;
    const std::size_t i = k / (ng * nc);
    const ScoreStream &stream = *items[i].stream;
    return Crop(Binarize(stream, channels[c], grid[g]), items[i].extent);
  });
  auto at = [&](std::size_t i, std::size_t c, std::size_t g) -> const Timeline & {
    return decoded[(i * nc + c) * ng + g];
  };

  RoleConfigs best;
  if (objective == Objective::kDetection) {
    const auto errors = MapIndex<Time>(nc * ng * n, exec, [&](std::size_t k) {
      const std::size_t i = k % n;
      const std::size_t g = (k / n) % ng;
      const std::size_t c = k / (n * ng);
      const Annotation hyp =
          Labeled(items[i].stream->file_id(), "speech", at(i, c, g));
      return DetectionErrorRate(*items[i].reference, hyp, items[i].extent)
          .errors();
    });
    // The reference total does not depend on the config, so comparing
    // summed errors is comparing error rates.
    for (std::size_t c = 0; c < nc; ++c) {
      std::size_t arg = 0;
      Time lowest;
      for (std::size_t g = 0; g < ng; ++g) {
        Time sum;
        for (std::size_t i = 0; i < n; ++i) sum += errors[(c * ng + g) * n + i];
        if (g == 0 || sum < lowest) {
          lowest = sum;
          arg = g;
        }
      }
      best[channels[c]] = grid[arg];
    }
    return best;
  }

  std::size_t combos = 1;
  for (std::size_t c = 0; c < nc; ++c) {
    combos *= ng;
    if (combos > 1'000'000) {
      throw InputError("joint threshold grid is too large");
    }
  }
  auto digit = [&](std::size_t combo, std::size_t c) {
    std::size_t v = combo;
    for (std::size_t k = nc - 1; k > c; --k) v /= ng;
    return v % ng;
  };
  const auto errors = MapIndex<Time>(combos * n, exec, [&](std::size_t k) {
    const std::size_t i = k % n;
    const std::size_t combo = k / n;
    std::vector<std::pair<std::string, Timeline>> per_channel;
    for (std::size_t c = 0; c < nc; ++c) {
      per_channel.emplace_back(channels[c], at(i, c, digit(combo, c)));
    }
    const Annotation hyp =
        Annotation::FromTimelines(items[i].stream->file_id(), per_channel);
    return IdentificationErrorRate(*items[i].reference, hyp, items[i].extent)
        .errors();
  });
  std::size_t arg = 0;
  Time lowest;
  for (std::size_t combo = 0; combo < combos; ++combo) {
    Time sum;
    for (std::size_t i = 0; i < n; ++i) sum += errors[combo * n + i];
    if (combo == 0 || sum < lowest) {
      lowest = sum;
      arg = combo;
    }
  }
  for (std::size_t c = 0; c < nc; ++c) best[channels[c]] = grid[digit(arg, c)];
  return best;
}

std::vector<BinarizeConfig> DefaultThresholdGrid() {
  std::vector<BinarizeConfig> grid;
  for (int k = 1; k <= 9; ++k) {
    BinarizeConfig c;
    c.onset = c.offset = k / 10.0;
    grid.push_back(c);
  }
  return grid;
}

}  // namespace turnkit
