// Report CSVs. Durations are in seconds with 4 decimals; undefined values
// are written as NA.
#ifndef TURNKIT_REPORTS_H_
#define TURNKIT_REPORTS_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "turnkit/enrollment.h"
#include "turnkit/markers.h"
#include "turnkit/metrics.h"
#include "turnkit/roles.h"
#include "turnkit/synth.h"

namespace turnkit {

inline constexpr std::string_view kGroupRowId = "__group__";
inline constexpr std::string_view kGlobalRowId = "__global__";

// fileId,group,falseAlarm,missedDetection,confusion,total,ier. File rows
// in input order, then one "__group__" row per group (C, preHD, HD first),
// then "__global__,ALL".
std::string EmitIerReport(const AggregateReport &report);
// File rows of an IER report; group and global rows are skipped.
std::vector<FileReport> ParseIerReport(std::string_view text);

// IER as a fixed 4-decimal ratio, or "NA".
std::string FormatIer(const IerReport &r);
// "files=N FA=.. MD=.. Conf=.. total=.. IER=.." for the console.
std::string SummaryLine(const AggregateReport &report);

// fileId,group,source,silenceRatio,utteranceDurationSD,utteranceCount
std::string EmitMarkers(std::span<const MarkerReport> reports);
// Paired reference/predicted values per file, then one row per group with
// the mean signed errors.
std::string EmitMarkerAgreement(const MarkerAgreement &agreement);

// tDev,falseAlarm,missedDetection,confusion,total,ier
std::string EmitSweep(std::span<const SweepRow> rows);

// fraction,MD,FA,Conf,IER with the error terms in percent of total.
std::string EmitAblation(std::span<const AblationRow> rows);

// One row per statistic, one column per meta set. Durations in hours.
std::string EmitCorpusStatistics(const CorpusStatistics &stats);

// fileId,group,role,enroll[,topline][,chance],winner with IER values.
std::string EmitComparison(const Comparison &comparison);

}  // namespace turnkit

#endif  // TURNKIT_REPORTS_H_
