#include "turnkit/markers.h"

#include <cmath>

#include "turnkit/error.h"

namespace turnkit {

std::string_view MarkerSourceName(MarkerSource s) {
  return s == MarkerSource::kReference ? "reference" : "predicted";
}

double SilenceRatio(const Annotation &a, const Segment &extent,
                    std::optional<std::string_view> role) {
  const Annotation cropped = Crop(a, extent);
  const Timeline speech =
      role ? cropped.TimelineOf(std::string(*role)) : cropped.AllSegments();
  const Time spoken = Support(speech).TotalDuration();
  return 1.0 - static_cast<double>(spoken.ticks()) /
                   static_cast<double>(extent.duration().ticks());
}

UtteranceStats UtteranceDurationSD(const Annotation &a, std::string_view role,
                                   const Segment &extent) {
  UtteranceStats out;
  std::vector<double> durations;
  for (const auto &e : a.entries()) {
    if (e.label != role) continue;
    if (auto s = e.segment.Intersect(extent)) {
      durations.push_back(s->duration().seconds());
    }
  }
  out.count = durations.size();
  if (out.count < 2) return out;
  double mean = 0.0;
  for (double d : durations) mean += d;
  mean /= static_cast<double>(out.count);
  double ss = 0.0;
  for (double d : durations) ss += (d - mean) * (d - mean);
  out.sd = std::sqrt(ss / static_cast<double>(out.count));
  return out;
}

MarkerReport ComputeMarkers(const Annotation &a, std::string group,
                            MarkerSource source, std::string_view role,
                            const Segment &extent) {
  MarkerReport r;
  r.file_id = a.file_id();
  r.group = std::move(group);
  r.source = source;
  r.silence_ratio = SilenceRatio(a, extent);
  const UtteranceStats u = UtteranceDurationSD(a, role, extent);
  r.utterance_sd = u.sd;
  r.utterance_count = u.count;
  return r;
}

MarkerAgreement ComputeMarkerAgreement(std::span<const MarkerReport> reference,
                                       std::span<const MarkerReport> predicted) {
  if (reference.size() != predicted.size()) {
    throw InputError("reference and predicted marker sets differ in size");
  }
  std::map<std::string, const MarkerReport *> pred;
  for (const auto &p : predicted) {
    if (!pred.emplace(p.file_id, &p).second) {
      throw InputError("predicted markers list '" + p.file_id + "' twice");
    }
  }
  MarkerAgreement out;
  std::map<std::string, double> sd_sum;
  for (const auto &r : reference) {
    auto it = pred.find(r.file_id);
    if (it == pred.end()) {
      throw InputError("no predicted markers for '" + r.file_id + "'");
    }
    const MarkerReport &p = *it->second;
    out.pairs.push_back({r.file_id, r.group, r, p});
    GroupMarkerError &g = out.groups[r.group];
    g.silence_ratio_mean_error += p.silence_ratio - r.silence_ratio;
    ++g.silence_ratio_files;
    if (r.utterance_sd && p.utterance_sd) {
      sd_sum[r.group] += *p.utterance_sd - *r.utterance_sd;
      ++g.utterance_sd_files;
    }
  }
  for (auto &[name, g] : out.groups) {
    g.silence_ratio_mean_error /= static_cast<double>(g.silence_ratio_files);
    if (g.utterance_sd_files > 0) {
      g.utterance_sd_mean_error =
          sd_sum[name] / static_cast<double>(g.utterance_sd_files);
    }
  }
  return out;
}

}  // namespace turnkit
