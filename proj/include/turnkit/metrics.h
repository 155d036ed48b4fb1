// Identification error rate: duration-weighted false alarm, missed
// detection and confusion over shared speaker/role labels.
#ifndef TURNKIT_METRICS_H_
#define TURNKIT_METRICS_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "turnkit/time.h"
#include "turnkit/timeline.h"

namespace turnkit {

// Components are exact tick counts, so reports add without rounding drift.
struct IerReport {
  Time false_alarm;
  Time missed_detection;
  Time confusion;
  Time total;

  // (fa + miss + conf) / total; nullopt when the reference is empty.
  std::optional<double> ier() const;
  Time errors() const { return false_alarm + missed_detection + confusion; }

  IerReport &operator+=(const IerReport &o);
  bool operator==(const IerReport &) const = default;
};

// Scores hyp against ref over extent. Labels are compared directly; there
// is no speaker mapping step. A collar > 0 removes +-collar/2 around every
// reference boundary from scoring. When vocabulary is non-empty, every hyp
// label must belong to it (InputError otherwise).
IerReport IdentificationErrorRate(const Annotation &ref, const Annotation &hyp,
                                  const Segment &extent, Time collar = Time(),
                                  std::span<const std::string> vocabulary = {});

// Speech/non-speech error: both sides collapsed to the support of all
// their labels before scoring, so confusion is always zero.
IerReport DetectionErrorRate(const Annotation &ref, const Annotation &hyp,
                             const Segment &extent);

struct FileReport {
  std::string file_id;
  std::string group;
  IerReport report;
};

struct AggregateReport {
  std::vector<FileReport> files;            // input order
  std::map<std::string, IerReport> groups;  // by group key
  IerReport global;
};

// Component-wise sums per group and overall. Throws InputError when
// reports is empty.
AggregateReport Aggregate(std::vector<FileReport> reports);

}  // namespace turnkit

#endif  // TURNKIT_METRICS_H_
