// Interval arithmetic over segments, unlabeled timelines and labeled
// annotations. All values are immutable after construction.
#ifndef TURNKIT_TIMELINE_H_
#define TURNKIT_TIMELINE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "turnkit/time.h"

namespace turnkit {

// Half-open interval [start, end) with end > start >= 0.
class Segment {
 public:
  // Throws InputError unless 0 <= start < end.
  Segment(Time start, Time end);
  static Segment FromSeconds(double start, double end);

  Time start() const { return start_; }
  Time end() const { return end_; }
  Time duration() const { return end_ - start_; }

  // Positive-length intersection, if any. Abutting segments do not overlap.
  std::optional<Segment> Intersect(const Segment &other) const;
  bool Overlaps(const Segment &other) const {
    return start_ < other.end_ && other.start_ < end_;
  }
  bool Contains(Time t) const { return start_ <= t && t < end_; }

  auto operator<=>(const Segment &) const = default;

 private:
  Time start_;
  Time end_;
};

// Segments sorted by (start, end). Overlaps are allowed; Support() removes
// them.
class Timeline {
 public:
  Timeline() = default;
  explicit Timeline(std::vector<Segment> segments);

  std::span<const Segment> segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  bool empty() const { return segments_.empty(); }
  auto begin() const { return segments_.begin(); }
  auto end() const { return segments_.end(); }
  const Segment &operator[](std::size_t i) const { return segments_[i]; }

  // Sum of segment durations; overlapping time is counted once per segment.
  Time TotalDuration() const;

  bool operator==(const Timeline &) const = default;

 private:
  std::vector<Segment> segments_;
};

// Minimal set of disjoint segments with the same union. Overlapping and
// abutting segments merge.
Timeline Support(const Timeline &t);
// Complement of Support(t) within extent.
Timeline Gaps(const Timeline &t, const Segment &extent);
// Intersection of every segment with extent; empty intersections dropped.
Timeline Crop(const Timeline &t, const Segment &extent);

struct LabeledSegment {
  Segment segment;
  std::string label;

  auto operator<=>(const LabeledSegment &) const = default;
};

// "Who speaks when" for one file. Entries are sorted by (start, end, label).
// Entries of one label never overlap each other; entries of different
// labels may. Abutting same-label entries are kept distinct.
class Annotation {
 public:
  explicit Annotation(std::string file_id = {},
                      std::vector<LabeledSegment> entries = {});

  // Builds one entry per segment of every timeline. Segments of the same
  // label that overlap are merged; abutting ones are not.
  static Annotation FromTimelines(
      std::string file_id,
      std::span<const std::pair<std::string, Timeline>> per_label);

  const std::string &file_id() const { return file_id_; }
  std::span<const LabeledSegment> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Sorted, unique.
  std::vector<std::string> Labels() const;
  Timeline TimelineOf(const std::string &label) const;
  // Every segment regardless of label.
  Timeline AllSegments() const;
  Time DurationOf(const std::string &label) const;
  // Latest end over all entries, or zero when empty.
  Time EndTime() const;

  bool operator==(const Annotation &) const = default;

 private:
  std::string file_id_;
  std::vector<LabeledSegment> entries_;
};

// Index pair (i, j), i < j, of the first two same-label entries that
// overlap in a (start, end, label)-sorted list, if any.
std::optional<std::pair<std::size_t, std::size_t>> FindSelfOverlap(
    std::span<const LabeledSegment> sorted_entries);

Annotation Crop(const Annotation &a, const Segment &extent);

// Sorted unique boundaries of the annotations' segment endpoints inside
// extent, plus the extent's own endpoints.
class TimeGrid {
 public:
  TimeGrid(std::span<const Annotation *const> annotations,
           const Segment &extent);

  std::span<const Time> boundaries() const { return boundaries_; }

 private:
  std::vector<Time> boundaries_;
};

struct Region {
  Segment span;
  std::vector<std::string> ref_labels;  // sorted
  std::vector<std::string> hyp_labels;  // sorted
};

// Partition of extent at the TimeGrid of (ref, hyp). Label sets are
// constant inside each region. Ordered by time.
std::vector<Region> CotemporalRegions(const Annotation &ref,
                                      const Annotation &hyp,
                                      const Segment &extent);

}  // namespace turnkit

#endif  // TURNKIT_TIMELINE_H_
