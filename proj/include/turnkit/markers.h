// Clinical speech markers from any annotation, reference or predicted:
// ratio of silence and the spread of utterance durations.
#ifndef TURNKIT_MARKERS_H_
#define TURNKIT_MARKERS_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "turnkit/timeline.h"

namespace turnkit {

enum class MarkerSource { kReference, kPredicted };
std::string_view MarkerSourceName(MarkerSource s);  // "reference", "predicted"

// 1 - |support of speech in extent| / |extent|. Overlapped speech counts
// once. With a role, only that label's speech counts.
double SilenceRatio(const Annotation &a, const Segment &extent,
                    std::optional<std::string_view> role = std::nullopt);

struct UtteranceStats {
  std::size_t count = 0;
  std::optional<double> sd;  // seconds; defined only when count >= 2
};

// Population standard deviation of the durations of the role's entries,
// each cropped to extent. Every entry is one utterance; abutting entries
// are not merged.
UtteranceStats UtteranceDurationSD(const Annotation &a, std::string_view role,
                                   const Segment &extent);

struct MarkerReport {
  std::string file_id;
  std::string group;
  MarkerSource source = MarkerSource::kReference;
  double silence_ratio = 0.0;
  std::optional<double> utterance_sd;
  std::size_t utterance_count = 0;
};

MarkerReport ComputeMarkers(const Annotation &a, std::string group,
                            MarkerSource source, std::string_view role,
                            const Segment &extent);

struct MarkerPair {
  std::string file_id;
  std::string group;
  MarkerReport reference;
  MarkerReport predicted;
};

struct GroupMarkerError {
  double silence_ratio_mean_error = 0.0;  // predicted - reference
  std::size_t silence_ratio_files = 0;
  // Over files where both SDs are defined; nullopt when there are none.
  std::optional<double> utterance_sd_mean_error;
  std::size_t utterance_sd_files = 0;
};

struct MarkerAgreement {
  std::vector<MarkerPair> pairs;  // reference order
  std::map<std::string, GroupMarkerError> groups;
};

// Pairs reports by file id. Throws InputError when the file sets differ.
MarkerAgreement ComputeMarkerAgreement(std::span<const MarkerReport> reference,
                                       std::span<const MarkerReport> predicted);

}  // namespace turnkit

#endif  // TURNKIT_MARKERS_H_
