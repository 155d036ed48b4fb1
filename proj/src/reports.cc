#include "turnkit/reports.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>

#include "turnkit/error.h"

namespace turnkit {

namespace {

std::string Fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string Fixed(const std::optional<double> &v, int decimals) {
  return v ? Fixed(*v, decimals) : "NA";
}

std::string Components(const IerReport &r) {
  return FormatSeconds(r.false_alarm, 4) + "," + FormatSeconds(r.missed_detection, 4) +
         "," + FormatSeconds(r.confusion, 4) + "," + FormatSeconds(r.total, 4) + "," +
         FormatIer(r);
}

// Groups in clinical order (C, preHD, HD), then any others alphabetically.
std::vector<std::string> GroupOrder(const std::map<std::string, IerReport> &groups) {
  std::vector<std::string> out;
  for (Group g : kAllGroups) {
    if (groups.count(std::string(GroupName(g)))) out.emplace_back(GroupName(g));
  }
  for (const auto &kv : groups) {
    if (!ParseGroup(kv.first)) out.push_back(kv.first);
  }
  return out;
}

}  // namespace

std::string FormatIer(const IerReport &r) { return Fixed(r.ier(), 4); }

std::string EmitIerReport(const AggregateReport &report) {
  std::string out = "fileId,group,falseAlarm,missedDetection,confusion,total,ier\n";
  for (const auto &f : report.files) {
    out += f.file_id + "," + f.group + "," + Components(f.report) + "\n";
  }
  for (const auto &g : GroupOrder(report.groups)) {
    out += std::string(kGroupRowId) + "," + g + "," + Components(report.groups.at(g)) + "\n";
  }
  out += std::string(kGlobalRowId) + ",ALL," + Components(report.global) + "\n";
  return out;
}

std::vector<FileReport> ParseIerReport(std::string_view text) {
  std::vector<FileReport> out;
  std::size_t number = 0;
  bool header = false;
  while (!text.empty()) {
    ++number;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.starts_with("#")) continue;
    std::vector<std::string_view> f;
    for (std::size_t p; (p = line.find(',')) != std::string_view::npos;) {
      f.push_back(line.substr(0, p));
      line.remove_prefix(p + 1);
    }
    f.push_back(line);
    if (!header) {
      if (f.size() != 7 || f[0] != "fileId" || f[6] != "ier") {
        throw ParseError(number, 0, "not an IER report header");
      }
      header = true;
      continue;
    }
    if (f.size() != 7) throw ParseError(number, 0, "expected 7 fields");
    if (f[0] == kGroupRowId || f[0] == kGlobalRowId) continue;
    if (f[0].empty()) throw ParseError(number, 1, "empty fileId");
    Time v[4];
    for (std::size_t k = 0; k < 4; ++k) {
      double x = 0.0;
      auto [p, ec] = std::from_chars(f[k + 2].data(), f[k + 2].data() + f[k + 2].size(), x);
      if (ec != std::errc() || p != f[k + 2].data() + f[k + 2].size() || !std::isfinite(x) ||
          x < 0.0) {
        throw ParseError(number, k + 3, "'" + std::string(f[k + 2]) + "' is not a duration");
      }
      v[k] = Time::FromSeconds(x);
    }
    out.push_back({std::string(f[0]), std::string(f[1]), IerReport{v[0], v[1], v[2], v[3]}});
  }
  if (!header) throw ParseError(1, 0, "empty IER report");
  return out;
}

std::string SummaryLine(const AggregateReport &report) {
  const IerReport &g = report.global;
  return "files=" + std::to_string(report.files.size()) +
         " FA=" + FormatSeconds(g.false_alarm, 4) +
         " MD=" + FormatSeconds(g.missed_detection, 4) +
         " Conf=" + FormatSeconds(g.confusion, 4) + " total=" + FormatSeconds(g.total, 4) +
         " IER=" + FormatIer(g);
}

std::string EmitMarkers(std::span<const MarkerReport> reports) {
  std::string out = "fileId,group,source,silenceRatio,utteranceDurationSD,utteranceCount\n";
  for (const auto &r : reports) {
    out += r.file_id + "," + r.group + "," + std::string(MarkerSourceName(r.source)) + "," +
           Fixed(r.silence_ratio, 6) + "," + Fixed(r.utterance_sd, 6) + "," +
           std::to_string(r.utterance_count) + "\n";
  }
  return out;
}

std::string EmitMarkerAgreement(const MarkerAgreement &agreement) {
  std::string out =
      "fileId,group,refSilenceRatio,predSilenceRatio,refUtteranceDurationSD,"
      "predUtteranceDurationSD\n";
  for (const auto &p : agreement.pairs) {
    out += p.file_id + "," + p.group + "," + Fixed(p.reference.silence_ratio, 6) + "," +
           Fixed(p.predicted.silence_ratio, 6) + "," + Fixed(p.reference.utterance_sd, 6) +
           "," + Fixed(p.predicted.utterance_sd, 6) + "\n";
  }
  out += "\ngroup,silenceRatioMeanError,silenceRatioFiles,utteranceSDMeanError,"
         "utteranceSDFiles\n";
  for (const auto &[g, e] : agreement.groups) {
    out += g + "," + Fixed(e.silence_ratio_mean_error, 6) + "," +
           std::to_string(e.silence_ratio_files) + "," + Fixed(e.utterance_sd_mean_error, 6) +
           "," + std::to_string(e.utterance_sd_files) + "\n";
  }
  return out;
}

std::string EmitSweep(std::span<const SweepRow> rows) {
  std::string out = "tDev,falseAlarm,missedDetection,confusion,total,ier\n";
  for (const auto &r : rows) {
    out += FormatSeconds(r.t_dev, 4) + "," + Components(r.report) + "\n";
  }
  return out;
}

std::string EmitAblation(std::span<const AblationRow> rows) {
  std::string out = "fraction,MD,FA,Conf,IER\n";
  for (const auto &r : rows) {
    const IerReport &x = r.report;
    auto pct = [&](Time t) -> std::string {
      if (x.total <= Time()) return "NA";
      return Fixed(100.0 * static_cast<double>(t.ticks()) / static_cast<double>(x.total.ticks()), 2);
    };
    char frac[32];
    std::snprintf(frac, sizeof frac, "%g", r.fraction);
    out += std::string(frac) + "," + pct(x.missed_detection) + "," + pct(x.false_alarm) + "," +
           pct(x.confusion) + "," + pct(x.errors()) + "\n";
  }
  return out;
}

std::string EmitCorpusStatistics(const CorpusStatistics &stats) {
  std::string out = "statistic";
  for (const auto &c : stats.columns) out += "," + c.name;
  out += '\n';
  auto hours = [](Time t) { return Fixed(t.seconds() / 3600.0, 4); };
  auto row = [&](std::string_view name, auto value) {
    out += name;
    for (const auto &c : stats.columns) out += "," + value(c);
    out += '\n';
  };
  row("#Interviews", [](const CorpusStatsColumn &c) { return std::to_string(c.interviews); });
  row("#Segments IT", [](const CorpusStatsColumn &c) { return std::to_string(c.segments_it); });
  row("#Segments NP", [](const CorpusStatsColumn &c) { return std::to_string(c.segments_np); });
  row("Dur Role IT (h)", [&](const CorpusStatsColumn &c) { return hours(c.duration_it); });
  row("Dur Role NP (h)", [&](const CorpusStatsColumn &c) { return hours(c.duration_np); });
  row("Dur Overlap (h)", [&](const CorpusStatsColumn &c) { return hours(c.duration_overlap); });
  row("#(C/preHD/HD)", [](const CorpusStatsColumn &c) {
    return std::to_string(c.groups[0]) + "/" + std::to_string(c.groups[1]) + "/" +
           std::to_string(c.groups[2]);
  });
  return out;
}

std::string EmitComparison(const Comparison &comparison) {
  const bool topline = comparison.overall.topline.has_value();
  const bool chance = comparison.overall.chance.has_value();
  std::string out = "fileId,group,role,enroll";
  if (topline) out += ",topline";
  if (chance) out += ",chance";
  out += ",winner\n";
  auto ier = [](const std::optional<IerReport> &r) { return r ? FormatIer(*r) : "NA"; };
  auto emit = [&](const ComparisonRow &r) {
    out += r.file_id + "," + r.group + "," + ier(r.role) + "," + ier(r.enroll);
    if (topline) out += "," + ier(r.topline);
    if (chance) out += "," + ier(r.chance);
    out += "," + r.winner + "\n";
  };
  for (const auto &r : comparison.rows) emit(r);
  emit(comparison.overall);
  return out;
}

}  // namespace turnkit
