#include "turnkit/timeline.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "turnkit/error.h"

namespace turnkit {

Time Time::FromSeconds(double seconds) {
  if (!std::isfinite(seconds)) {
    throw InputError("time value is not finite");
  }
  return Time(static_cast<std::int64_t>(std::llround(seconds * kTicksPerSecond)));
}

std::string FormatSeconds(Time t, int decimals) {
  decimals = std::clamp(decimals, 0, 4);
  std::int64_t scale = 1;
  for (int i = decimals; i < 4; ++i) scale *= 10;
  std::int64_t ticks = t.ticks();
  const bool negative = ticks < 0;
  if (negative) ticks = -ticks;
  std::int64_t units = (ticks + scale / 2) / scale;
  std::int64_t per_second = kTicksPerSecond / scale;
  std::string s = negative && units != 0 ? "-" : "";
  s += std::to_string(units / per_second);
  if (decimals > 0) {
    std::string frac = std::to_string(units % per_second);
    s += '.';
    s += std::string(decimals - frac.size(), '0');
    s += frac;
  }
  return s;
}

Segment::Segment(Time start, Time end) : start_(start), end_(end) {
  if (start < Time()) {
    throw InputError("segment start " + FormatSeconds(start, 4) +
                     " is negative");
  }
  if (!(end > start)) {
    throw InputError("segment [" + FormatSeconds(start, 4) + ", " +
                     FormatSeconds(end, 4) + "] has non-positive duration");
  }
}

Segment Segment::FromSeconds(double start, double end) {
  return Segment(Time::FromSeconds(start), Time::FromSeconds(end));
}

std::optional<Segment> Segment::Intersect(const Segment &other) const {
  Time s = std::max(start_, other.start_);
  Time e = std::min(end_, other.end_);
  if (e <= s) return std::nullopt;
  return Segment(s, e);
}

Timeline::Timeline(std::vector<Segment> segments)
    : segments_(std::move(segments)) {
  std::sort(segments_.begin(), segments_.end());
}

Time Timeline::TotalDuration() const {
  Time total;
  for (const auto &s : segments_) total += s.duration();
  return total;
}

Timeline Support(const Timeline &t) {
  std::vector<Segment> out;
  for (const auto &s : t) {
    if (!out.empty() && s.start() <= out.back().end()) {
      if (s.end() > out.back().end()) {
        out.back() = Segment(out.back().start(), s.end());
      }
    } else {
      out.push_back(s);
    }
  }
  return Timeline(std::move(out));
}

Timeline Gaps(const Timeline &t, const Segment &extent) {
  std::vector<Segment> out;
  Time cursor = extent.start();
  for (const auto &s : Support(t)) {
    if (s.end() <= cursor) continue;
    if (s.start() >= extent.end()) break;
    if (s.start() > cursor) out.emplace_back(cursor, s.start());
    cursor = std::max(cursor, s.end());
  }
  if (cursor < extent.end()) out.emplace_back(cursor, extent.end());
  return Timeline(std::move(out));
}

Timeline Crop(const Timeline &t, const Segment &extent) {
  std::vector<Segment> out;
  for (const auto &s : t) {
    if (auto i = s.Intersect(extent)) out.push_back(*i);
  }
  return Timeline(std::move(out));
}

std::optional<std::pair<std::size_t, std::size_t>> FindSelfOverlap(
    std::span<const LabeledSegment> sorted_entries) {
  // label -> (latest end so far, index of that entry)
  std::map<std::string, std::pair<Time, std::size_t>, std::less<>> last;
  for (std::size_t j = 0; j < sorted_entries.size(); ++j) {
    const auto &e = sorted_entries[j];
    auto it = last.find(e.label);
    if (it != last.end()) {
      if (e.segment.start() < it->second.first) {
        return std::make_pair(it->second.second, j);
      }
      if (e.segment.end() > it->second.first) {
        it->second = {e.segment.end(), j};
      }
    } else {
      last.emplace(e.label, std::make_pair(e.segment.end(), j));
    }
  }
  return std::nullopt;
}

Annotation::Annotation(std::string file_id, std::vector<LabeledSegment> entries)
    : file_id_(std::move(file_id)), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end());
  if (auto clash = FindSelfOverlap(entries_)) {
    const auto &a = entries_[clash->first];
    const auto &b = entries_[clash->second];
    throw InputError("file '" + file_id_ + "': label '" + a.label +
                     "' overlaps itself at [" +
                     FormatSeconds(a.segment.start(), 4) + ", " +
                     FormatSeconds(a.segment.end(), 4) + "] and [" +
                     FormatSeconds(b.segment.start(), 4) + ", " +
                     FormatSeconds(b.segment.end(), 4) + "]");
  }
}

Annotation Annotation::FromTimelines(
    std::string file_id,
    std::span<const std::pair<std::string, Timeline>> per_label) {
  std::map<std::string, std::vector<Segment>> merged;
  for (const auto &[label, timeline] : per_label) {
    auto &acc = merged[label];
    acc.insert(acc.end(), timeline.begin(), timeline.end());
  }
  std::vector<LabeledSegment> entries;
  for (auto &[label, segs] : merged) {
    std::sort(segs.begin(), segs.end());
    std::vector<Segment> out;
    for (const auto &s : segs) {
      if (!out.empty() && s.start() < out.back().end()) {
        if (s.end() > out.back().end()) {
          out.back() = Segment(out.back().start(), s.end());
        }
      } else {
        out.push_back(s);
      }
    }
    for (const auto &s : out) entries.push_back({s, label});
  }
  return Annotation(std::move(file_id), std::move(entries));
}

std::vector<std::string> Annotation::Labels() const {
  std::vector<std::string> labels;
  for (const auto &e : entries_) labels.push_back(e.label);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

Timeline Annotation::TimelineOf(const std::string &label) const {
  std::vector<Segment> segs;
  for (const auto &e : entries_) {
    if (e.label == label) segs.push_back(e.segment);
  }
  return Timeline(std::move(segs));
}

Timeline Annotation::AllSegments() const {
  std::vector<Segment> segs;
  segs.reserve(entries_.size());
  for (const auto &e : entries_) segs.push_back(e.segment);
  return Timeline(std::move(segs));
}

Time Annotation::DurationOf(const std::string &label) const {
  Time total;
  for (const auto &e : entries_) {
    if (e.label == label) total += e.segment.duration();
  }
  return total;
}

Time Annotation::EndTime() const {
  Time end;
  for (const auto &e : entries_) end = std::max(end, e.segment.end());
  return end;
}

Annotation Crop(const Annotation &a, const Segment &extent) {
  std::vector<LabeledSegment> out;
  for (const auto &e : a.entries()) {
    if (auto i = e.segment.Intersect(extent)) out.push_back({*i, e.label});
  }
  return Annotation(a.file_id(), std::move(out));
}

TimeGrid::TimeGrid(std::span<const Annotation *const> annotations,
                   const Segment &extent) {
  boundaries_.push_back(extent.start());
  boundaries_.push_back(extent.end());
  for (const Annotation *a : annotations) {
    for (const auto &e : a->entries()) {
      for (Time t : {e.segment.start(), e.segment.end()}) {
        if (t > extent.start() && t < extent.end()) boundaries_.push_back(t);
      }
    }
  }
  std::sort(boundaries_.begin(), boundaries_.end());
  boundaries_.erase(std::unique(boundaries_.begin(), boundaries_.end()),
                    boundaries_.end());
}

namespace {

// Walks one cropped annotation across grid cells. Every entry endpoint is a
// grid boundary, so an entry is active on cell [b_k, b_k+1) iff
// start <= b_k < end.
class ActiveSet {
 public:
  explicit ActiveSet(const Annotation &a) : entries_(a.entries()) {
    for (std::size_t i = 0; i < entries_.size(); ++i) by_end_.push_back(i);
    std::sort(by_end_.begin(), by_end_.end(), [&](std::size_t x, std::size_t y) {
      return entries_[x].segment.end() < entries_[y].segment.end();
    });
  }

  // Labels active at t; calls must use non-decreasing t.
  std::vector<std::string> At(Time t) {
    while (next_start_ < entries_.size() &&
           entries_[next_start_].segment.start() <= t) {
      ++counts_[entries_[next_start_].label];
      ++next_start_;
    }
    while (next_end_ < by_end_.size() &&
           entries_[by_end_[next_end_]].segment.end() <= t) {
      auto it = counts_.find(entries_[by_end_[next_end_]].label);
      if (--it->second == 0) counts_.erase(it);
      ++next_end_;
    }
    std::vector<std::string> labels;
    labels.reserve(counts_.size());
    for (const auto &kv : counts_) labels.push_back(kv.first);
    return labels;
  }

 private:
  std::span<const LabeledSegment> entries_;
  std::vector<std::size_t> by_end_;
  std::size_t next_start_ = 0;
  std::size_t next_end_ = 0;
  std::map<std::string, int> counts_;
};

}  // namespace

std::vector<Region> CotemporalRegions(const Annotation &ref,
                                      const Annotation &hyp,
                                      const Segment &extent) {
  const Annotation ref_c = Crop(ref, extent);
  const Annotation hyp_c = Crop(hyp, extent);
  const Annotation *both[] = {&ref_c, &hyp_c};
  const TimeGrid grid(both, extent);
  auto b = grid.boundaries();

  ActiveSet ref_active(ref_c);
  ActiveSet hyp_active(hyp_c);
  std::vector<Region> regions;
  regions.reserve(b.size() - 1);
  for (std::size_t k = 0; k + 1 < b.size(); ++k) {
    regions.push_back(
        {Segment(b[k], b[k + 1]), ref_active.At(b[k]), hyp_active.At(b[k])});
  }
  return regions;
}

}  // namespace turnkit
