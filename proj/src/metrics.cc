#include "turnkit/metrics.h"

#include <algorithm>
#include <cstdint>
#include <utility>

#include "turnkit/error.h"

namespace turnkit {

std::optional<double> IerReport::ier() const {
  if (total.ticks() <= 0) return std::nullopt;
  return static_cast<double>(errors().ticks()) /
         static_cast<double>(total.ticks());
}

IerReport &IerReport::operator+=(const IerReport &o) {
  false_alarm += o.false_alarm;
  missed_detection += o.missed_detection;
  confusion += o.confusion;
  total += o.total;
  return *this;
}

namespace {

std::int64_t CountShared(const std::vector<std::string> &a,
                         const std::vector<std::string> &b) {
  std::int64_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

void Accumulate(const Annotation &ref, const Annotation &hyp,
                const Segment &zone, IerReport &report) {
  for (const Region &r : CotemporalRegions(ref, hyp, zone)) {
    const Time d = r.span.duration();
    const auto nr = static_cast<std::int64_t>(r.ref_labels.size());
    const auto nh = static_cast<std::int64_t>(r.hyp_labels.size());
    const std::int64_t shared = CountShared(r.ref_labels, r.hyp_labels);
    report.total += d * nr;
    report.missed_detection += d * std::max<std::int64_t>(0, nr - nh);
    report.false_alarm += d * std::max<std::int64_t>(0, nh - nr);
    report.confusion += d * (std::min(nr, nh) - shared);
  }
}

}  // namespace

IerReport IdentificationErrorRate(const Annotation &ref, const Annotation &hyp,
                                  const Segment &extent, Time collar,
                                  std::span<const std::string> vocabulary) {
  if (collar < Time()) throw InputError("collar must be non-negative");
  if (!vocabulary.empty()) {
    for (const auto &e : hyp.entries()) {
      if (std::find(vocabulary.begin(), vocabulary.end(), e.label) ==
          vocabulary.end()) {
        throw InputError("file '" + hyp.file_id() + "': hypothesis label '" +
                         e.label + "' is not in the label vocabulary");
      }
    }
  }

  IerReport report;
  if (collar == Time()) {
    Accumulate(ref, hyp, extent, report);
    return report;
  }

  const Time half = Time::FromTicks(collar.ticks() / 2);
  std::vector<Segment> no_score;
  if (half > Time()) {
    for (const auto &e : ref.entries()) {
      for (Time b : {e.segment.start(), e.segment.end()}) {
        no_score.emplace_back(std::max(Time(), b - half), b + half);
      }
    }
  }
  for (const Segment &zone : Gaps(Timeline(std::move(no_score)), extent)) {
    Accumulate(ref, hyp, zone, report);
  }
  return report;
}

IerReport DetectionErrorRate(const Annotation &ref, const Annotation &hyp,
                             const Segment &extent) {
  auto collapse = [](const Annotation &a) {
    std::vector<LabeledSegment> entries;
    for (const Segment &s : Support(a.AllSegments())) {
      entries.push_back({s, "speech"});
    }
    return Annotation(a.file_id(), std::move(entries));
  };
  return IdentificationErrorRate(collapse(ref), collapse(hyp), extent);
}

AggregateReport Aggregate(std::vector<FileReport> reports) {
  if (reports.empty()) throw InputError("cannot aggregate zero reports");
  AggregateReport out;
  for (const auto &r : reports) {
    out.groups[r.group] += r.report;
    out.global += r.report;
  }
  out.files = std::move(reports);
  return out;
}

}  // namespace turnkit
