#include "turnkit/io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "turnkit/error.h"

namespace turnkit {

namespace {

// One physical line of input, without its terminator.
struct Line {
  std::size_t number;
  std::string_view text;
};

std::vector<Line> SplitLines(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back({number, line});
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return out;
}

bool IsBlank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return c == ' ' || c == '\t'; });
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitWhitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> SplitOn(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const std::size_t p = s.find(sep);
    out.push_back(s.substr(0, p));
    if (p == std::string_view::npos) break;
    s.remove_prefix(p + 1);
  }
  return out;
}

std::optional<double> ToDouble(std::string_view s) {
  s = Trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> ToUint(std::string_view s) {
  s = Trim(s);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

double NumberAt(std::string_view field, std::size_t line, std::size_t col,
                std::string_view what) {
  auto v = ToDouble(field);
  if (!v) {
    throw ParseError(line, col, std::string(what) + ": '" + std::string(field) +
                                    "' is not a number");
  }
  if (!std::isfinite(*v)) {
    throw ParseError(line, col, std::string(what) + " must be finite");
  }
  return *v;
}

Time SecondsAt(std::string_view field, std::size_t line, std::size_t col,
               std::string_view what) {
  const double v = NumberAt(field, line, col, what);
  if (std::fabs(v) > 1e11) throw ParseError(line, col, std::string(what) + " out of range");
  return Time::FromSeconds(v);
}

std::string ShortestDouble(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

Time RoundTo(Time t, int decimals) {
  std::int64_t unit = 1;
  for (int i = decimals; i < 4; ++i) unit *= 10;
  return Time::FromTicks((t.ticks() + unit / 2) / unit * unit);
}

void CheckDecimals(int decimals) {
  if (decimals < 0 || decimals > 4) throw InputError("decimals must be in [0, 4]");
}

void CheckToken(std::string_view s, std::string_view what, std::string_view banned) {
  if (s.empty()) throw InputError(std::string(what) + " must not be empty");
  if (s.find_first_of(banned) != std::string_view::npos) {
    throw InputError(std::string(what) + " '" + std::string(s) +
                     "' contains a reserved character");
  }
}

}  // namespace

// ---------------------------------------------------------------- RTTM

std::map<std::string, Annotation> ParseRttm(std::string_view text) {
  struct Pending {
    LabeledSegment entry;
    std::size_t line;
  };
  std::map<std::string, std::vector<Pending>> per_file;
  for (const Line &l : SplitLines(text)) {
    if (IsBlank(l.text)) continue;
    const std::string_view t = Trim(l.text);
    if (t.starts_with(";;") || t.starts_with("#")) continue;
    const auto f = SplitWhitespace(t);
    if (f[0] != "SPEAKER") {
      throw ParseError(l.number, 1, "unknown record type '" + std::string(f[0]) + "'");
    }
    if (f.size() < 8) {
      throw ParseError(l.number, 0,
                       "expected at least 8 fields, got " + std::to_string(f.size()));
    }
    if (f.size() > 10) {
      throw ParseError(l.number, 11, "too many fields");
    }
    const double onset = NumberAt(f[3], l.number, 4, "onset");
    const double dur = NumberAt(f[4], l.number, 5, "duration");
    if (onset < 0.0) throw ParseError(l.number, 4, "onset must be non-negative");
    if (dur <= 0.0) throw ParseError(l.number, 5, "duration must be positive");
    const Time start = SecondsAt(f[3], l.number, 4, "onset");
    const Time end = start + SecondsAt(f[4], l.number, 5, "duration");
    if (end <= start) {
      throw ParseError(l.number, 5, "duration is shorter than the 0.1 ms resolution");
    }
    per_file[std::string(f[1])].push_back(
        {{Segment(start, end), std::string(f[7])}, l.number});
  }

  std::map<std::string, Annotation> out;
  for (auto &[id, pending] : per_file) {
    std::stable_sort(pending.begin(), pending.end(),
                     [](const Pending &a, const Pending &b) { return a.entry < b.entry; });
    std::vector<LabeledSegment> entries;
    entries.reserve(pending.size());
    for (const auto &p : pending) entries.push_back(p.entry);
    if (auto clash = FindSelfOverlap(entries)) {
      const std::size_t a = pending[clash->first].line;
      const std::size_t b = pending[clash->second].line;
      throw ParseError(std::max(a, b), 0,
                       "speaker '" + entries[clash->first].label + "' in '" + id +
                           "' overlaps itself (line " + std::to_string(std::min(a, b)) +
                           ")");
    }
    out.emplace(id, Annotation(id, std::move(entries)));
  }
  return out;
}

std::string EmitRttm(std::span<const Annotation> annotations, int decimals) {
  CheckDecimals(decimals);
  std::vector<const Annotation *> sorted;
  for (const auto &a : annotations) sorted.push_back(&a);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Annotation *a, const Annotation *b) {
                     return a->file_id() < b->file_id();
                   });
  std::string out;
  for (const Annotation *a : sorted) {
    if (a->empty()) continue;
    CheckToken(a->file_id(), "file id", " \t\n");
    for (const auto &e : a->entries()) {
      CheckToken(e.label, "label", " \t\n");
      const Time s = RoundTo(e.segment.start(), decimals);
      const Time t = RoundTo(e.segment.end(), decimals);
      if (t <= s) {
        throw InputError("entry of '" + e.label + "' in '" + a->file_id() +
                         "' is too short for " + std::to_string(decimals) +
                         " decimals");
      }
      out += "SPEAKER " + a->file_id() + " 1 " + FormatSeconds(s, decimals) + " " +
             FormatSeconds(t - s, decimals) + " <NA> <NA> " + e.label + " <NA> <NA>\n";
    }
  }
  return out;
}

// -------------------------------------------------------- score streams

ScoreStream ParseScoreStream(std::string_view text) {
  std::optional<std::string> file_id;
  std::optional<Time> step;
  Time start;
  std::vector<std::string> channels;
  bool have_header = false;
  std::size_t header_line = 0;
  std::vector<double> scores;
  std::size_t frames = 0;

  for (const Line &l : SplitLines(text)) {
    if (IsBlank(l.text)) continue;
    if (l.text.starts_with("#")) {
      if (have_header) continue;
      for (std::string_view kv : SplitWhitespace(l.text.substr(1))) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string_view::npos) continue;
        const std::string_view key = kv.substr(0, eq);
        const std::string_view value = kv.substr(eq + 1);
        if (key == "fileId") {
          if (value.empty()) throw ParseError(l.number, 0, "empty fileId");
          file_id = std::string(value);
        } else if (key == "frameStep") {
          step = SecondsAt(value, l.number, 0, "frameStep");
          if (*step <= Time()) throw ParseError(l.number, 0, "frameStep must be positive");
        } else if (key == "start") {
          start = SecondsAt(value, l.number, 0, "start");
          if (start < Time()) throw ParseError(l.number, 0, "start must be non-negative");
        }
      }
      continue;
    }
    const auto f = SplitOn(l.text, ',');
    if (!have_header) {
      if (!file_id) throw ParseError(l.number, 0, "missing #fileId= metadata");
      if (!step) throw ParseError(l.number, 0, "missing #frameStep= metadata");
      if (Trim(f[0]) != "time") throw ParseError(l.number, 1, "first column must be 'time'");
      if (f.size() < 2) throw ParseError(l.number, 0, "no score channels");
      std::set<std::string> seen;
      for (std::size_t c = 1; c < f.size(); ++c) {
        std::string name(Trim(f[c]));
        if (name.empty()) throw ParseError(l.number, c + 1, "empty channel name");
        if (!seen.insert(name).second) {
          throw ParseError(l.number, c + 1, "duplicate channel '" + name + "'");
        }
        channels.push_back(std::move(name));
      }
      have_header = true;
      header_line = l.number;
      continue;
    }
    if (f.size() != channels.size() + 1) {
      throw ParseError(l.number, 0,
                       "row " + std::to_string(frames + 1) + " has " +
                           std::to_string(f.size()) + " fields, expected " +
                           std::to_string(channels.size() + 1));
    }
    const Time t = SecondsAt(f[0], l.number, 1, "time");
    const Time expected = start + *step * static_cast<std::int64_t>(frames);
    if (t != expected) {
      throw ParseError(l.number, 1,
                       "row " + std::to_string(frames + 1) + ": time " +
                           FormatSeconds(t, 4) + " should be " +
                           FormatSeconds(expected, 4));
    }
    for (std::size_t c = 0; c < channels.size(); ++c) {
      auto v = ToDouble(f[c + 1]);
      if (!v) {
        throw ParseError(l.number, c + 2,
                         "row " + std::to_string(frames + 1) + ": '" +
                             std::string(f[c + 1]) + "' is not a number");
      }
      if (!(*v >= 0.0 && *v <= 1.0)) {
        throw ParseError(l.number, c + 2,
                         "row " + std::to_string(frames + 1) + ": score " +
                             std::string(Trim(f[c + 1])) + " outside [0, 1]");
      }
      scores.push_back(*v);
    }
    ++frames;
  }
  if (!have_header) {
    throw ParseError(header_line == 0 ? 1 : header_line, 0, "missing 'time,...' header row");
  }
  return ScoreStream(*file_id, *step, start, std::move(channels), std::move(scores));
}

std::string EmitScoreStream(const ScoreStream &stream) {
  CheckToken(stream.file_id(), "file id", " \t\n,");
  std::string out = "#fileId=" + stream.file_id() +
                    " frameStep=" + FormatSeconds(stream.frame_step(), 4) +
                    " start=" + FormatSeconds(stream.start_time(), 4) + "\ntime";
  for (const auto &c : stream.channels()) {
    CheckToken(c, "channel", ",\n");
    out += "," + c;
  }
  out += '\n';
  for (std::size_t i = 0; i < stream.num_frames(); ++i) {
    out += FormatSeconds(stream.FrameStart(i), 4);
    for (std::size_t c = 0; c < stream.num_channels(); ++c) {
      out += ',';
      out += ShortestDouble(stream.score(i, c));
    }
    out += '\n';
  }
  return out;
}

// ------------------------------------------------------------- manifest

namespace {

constexpr std::string_view kManifestColumns[] = {"fileId", "duration", "reference",
                                                 "scores", "group",    "roles"};

}  // namespace

CorpusManifest ParseManifest(std::string_view text) {
  std::map<std::string_view, std::size_t> column;
  bool have_header = false;
  std::vector<Interview> interviews;
  std::set<std::string> ids;
  std::size_t last_line = 0;
  for (const Line &l : SplitLines(text)) {
    last_line = l.number;
    if (IsBlank(l.text) || l.text.starts_with("#")) continue;
    const auto f = SplitOn(l.text, ',');
    if (!have_header) {
      for (std::size_t c = 0; c < f.size(); ++c) {
        const std::string_view name = Trim(f[c]);
        if (!column.emplace(name, c).second) {
          throw ParseError(l.number, c + 1, "duplicate column '" + std::string(name) + "'");
        }
      }
      for (std::string_view required : kManifestColumns) {
        if (required == "scores") continue;
        if (!column.count(required)) {
          throw ParseError(l.number, 0, "missing column '" + std::string(required) + "'");
        }
      }
      have_header = true;
      continue;
    }
    if (f.size() != column.size()) {
      throw ParseError(l.number, 0,
                       "expected " + std::to_string(column.size()) + " fields, got " +
                           std::to_string(f.size()));
    }
    auto field = [&](std::string_view name) { return Trim(f[column.at(name)]); };
    auto col = [&](std::string_view name) { return column.at(name) + 1; };

    Interview iv;
    iv.file_id = std::string(field("fileId"));
    if (iv.file_id.empty()) throw ParseError(l.number, col("fileId"), "empty fileId");
    if (!ids.insert(iv.file_id).second) {
      throw ParseError(l.number, col("fileId"), "duplicate fileId '" + iv.file_id + "'");
    }
    iv.duration = SecondsAt(field("duration"), l.number, col("duration"), "duration");
    if (iv.duration <= Time()) {
      throw ParseError(l.number, col("duration"), "duration must be positive");
    }
    iv.reference_path = std::string(field("reference"));
    if (column.count("scores") && !field("scores").empty()) {
      for (std::string_view item : SplitOn(field("scores"), ';')) {
        const std::size_t eq = item.find('=');
        const std::string kind(Trim(item.substr(0, eq)));
        if (eq == std::string_view::npos || kind.empty() ||
            Trim(item.substr(eq + 1)).empty()) {
          throw ParseError(l.number, col("scores"),
                           "scores entry '" + std::string(item) + "' is not kind=path");
        }
        if (!iv.score_paths.emplace(kind, std::string(Trim(item.substr(eq + 1)))).second) {
          throw ParseError(l.number, col("scores"), "duplicate score kind '" + kind + "'");
        }
      }
    }
    auto group = ParseGroup(field("group"));
    if (!group) {
      throw ParseError(l.number, col("group"),
                       "group '" + std::string(field("group")) +
                           "' is not one of C, preHD, HD");
    }
    iv.group = *group;
    std::set<Role> seen_roles;
    for (std::string_view item : SplitOn(field("roles"), ';')) {
      const std::size_t colon = item.rfind(':');
      const std::string label(Trim(item.substr(0, colon)));
      std::optional<Role> role;
      if (colon != std::string_view::npos) role = ParseRole(Trim(item.substr(colon + 1)));
      if (label.empty() || !role) {
        throw ParseError(l.number, col("roles"),
                         "roles entry '" + std::string(item) + "' is not label:Role");
      }
      if (!seen_roles.insert(*role).second || !iv.roles.emplace(label, *role).second) {
        throw ParseError(l.number, col("roles"),
                         "roles must map two labels to the two roles");
      }
    }
    if (iv.roles.size() != 2) {
      throw ParseError(l.number, col("roles"), "roles must map two labels to the two roles");
    }
    interviews.push_back(std::move(iv));
  }
  if (!have_header) throw ParseError(std::max<std::size_t>(last_line, 1), 0, "missing header row");
  return CorpusManifest(std::move(interviews));
}

std::string EmitManifest(const CorpusManifest &manifest) {
  std::string out = "fileId,duration,reference,scores,group,roles\n";
  for (const auto &iv : manifest.interviews()) {
    CheckToken(iv.file_id, "file id", ",\n");
    out += iv.file_id + "," + FormatSeconds(iv.duration, 4) + ",";
    if (iv.reference_path.find_first_of(",\n") != std::string::npos) {
      throw InputError("reference path '" + iv.reference_path + "' contains a comma");
    }
    out += iv.reference_path + ",";
    bool first = true;
    for (const auto &[kind, path] : iv.score_paths) {
      CheckToken(kind, "score kind", ",;=\n");
      CheckToken(path, "score path", ",;\n");
      if (!first) out += ';';
      out += kind + "=" + path;
      first = false;
    }
    out += "," + std::string(GroupName(iv.group)) + ",";
    first = true;
    for (const auto &label : iv.SpeakersInRoleOrder()) {
      CheckToken(label, "speaker label", ",;:\n");
      if (!first) out += ';';
      out += label + ":" + std::string(RoleName(iv.roles.at(label)));
      first = false;
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------- split

SplitAssignment ParseSplit(std::string_view text) {
  SplitAssignment s;
  bool have_tdev = false, have_boundary = false, have_seed = false;
  std::set<std::string> ids;
  for (const Line &l : SplitLines(text)) {
    std::string_view t = Trim(l.text);
    if (t.empty()) continue;
    if (t.starts_with("#")) t = Trim(t.substr(1));
    const std::size_t eq = t.find('=');
    if (eq != std::string_view::npos) {
      const std::string_view key = Trim(t.substr(0, eq));
      const std::string_view value = Trim(t.substr(eq + 1));
      if (key == "tDev") {
        s.t_dev = SecondsAt(value, l.number, 0, "tDev");
        have_tdev = true;
      } else if (key == "tTestBoundary") {
        s.t_test_boundary = SecondsAt(value, l.number, 0, "tTestBoundary");
        have_boundary = true;
      } else if (key == "seed") {
        auto v = ToUint(value);
        if (!v) throw ParseError(l.number, 0, "seed must be a non-negative integer");
        s.seed = *v;
        have_seed = true;
      } else {
        throw ParseError(l.number, 0, "unknown key '" + std::string(key) + "'");
      }
      continue;
    }
    if (t.empty() || t == "fileId,set") continue;
    const auto f = SplitOn(t, ',');
    if (f.size() != 2) throw ParseError(l.number, 0, "expected 'fileId,set'");
    const std::string id(Trim(f[0]));
    if (id.empty()) throw ParseError(l.number, 1, "empty fileId");
    auto subset = ParseSubset(Trim(f[1]));
    if (!subset) {
      throw ParseError(l.number, 2,
                       "set '" + std::string(Trim(f[1])) + "' is not train, dev or test");
    }
    if (!ids.insert(id).second) throw ParseError(l.number, 1, "duplicate fileId '" + id + "'");
    switch (*subset) {
      case Subset::kTrain:
        s.meta_train.insert(id);
        break;
      case Subset::kDev:
        s.meta_dev.insert(id);
        break;
      case Subset::kTest:
        s.meta_test.insert(id);
        break;
    }
  }
  if (!have_tdev) throw ParseError(1, 0, "missing tDev=");
  if (!have_boundary) throw ParseError(1, 0, "missing tTestBoundary=");
  if (!have_seed) throw ParseError(1, 0, "missing seed=");
  try {
    s.Validate();
  } catch (const InputError &e) {
    throw ParseError(1, 0, e.what());
  }
  return s;
}

std::string EmitSplit(const SplitAssignment &split) {
  std::string out = "tDev=" + FormatSeconds(split.t_dev, 4) +
                    "\ntTestBoundary=" + FormatSeconds(split.t_test_boundary, 4) +
                    "\nseed=" + std::to_string(split.seed) + "\nfileId,set\n";
  std::map<std::string, Subset> rows;
  for (Subset s : {Subset::kTrain, Subset::kDev, Subset::kTest}) {
    for (const auto &id : split.Members(s)) rows.emplace(id, s);
  }
  for (const auto &[id, s] : rows) out += id + "," + std::string(SubsetName(s)) + "\n";
  return out;
}

// ------------------------------------------------------------------ UEM

std::map<std::string, Segment> ParseUem(std::string_view text) {
  std::map<std::string, Segment> out;
  for (const Line &l : SplitLines(text)) {
    const std::string_view t = Trim(l.text);
    if (t.empty() || t.starts_with(";;") || t.starts_with("#")) continue;
    const auto f = SplitWhitespace(t);
    if (f.size() != 4) throw ParseError(l.number, 0, "expected '<file> <chan> <start> <end>'");
    const Time s = SecondsAt(f[2], l.number, 3, "start");
    const Time e = SecondsAt(f[3], l.number, 4, "end");
    if (s < Time()) throw ParseError(l.number, 3, "start must be non-negative");
    if (e <= s) throw ParseError(l.number, 4, "end must be after start");
    if (!out.emplace(std::string(f[0]), Segment(s, e)).second) {
      throw ParseError(l.number, 1, "second extent for '" + std::string(f[0]) + "'");
    }
  }
  return out;
}

// ------------------------------------------------------ embedding cache

std::unique_ptr<CachedEmbeddingProvider> ParseEmbeddingCache(std::string_view text) {
  std::unique_ptr<CachedEmbeddingProvider> cache;
  for (const Line &l : SplitLines(text)) {
    if (IsBlank(l.text) || l.text.starts_with("#")) continue;
    if (Trim(l.text).starts_with("fileId")) continue;
    const auto f = SplitOn(l.text, ',');
    if (f.size() < 4) throw ParseError(l.number, 0, "expected fileId,start,end,v1,...");
    const std::size_t dim = f.size() - 3;
    if (!cache) cache = std::make_unique<CachedEmbeddingProvider>(dim);
    if (dim != cache->dim()) {
      throw ParseError(l.number, 0,
                       "dimension " + std::to_string(dim) + " differs from " +
                           std::to_string(cache->dim()));
    }
    const std::string id(Trim(f[0]));
    if (id.empty()) throw ParseError(l.number, 1, "empty fileId");
    const Time s = SecondsAt(f[1], l.number, 2, "start");
    const Time e = SecondsAt(f[2], l.number, 3, "end");
    if (s < Time() || e <= s) throw ParseError(l.number, 3, "invalid segment");
    std::vector<double> v(dim);
    for (std::size_t k = 0; k < dim; ++k) v[k] = NumberAt(f[k + 3], l.number, k + 4, "value");
    try {
      cache->Add(id, Segment(s, e), EmbeddingVector(std::move(v)));
    } catch (const InputError &err) {
      throw ParseError(l.number, 0, err.what());
    }
  }
  if (!cache) throw ParseError(1, 0, "no embeddings");
  return cache;
}

std::string EmitEmbeddingCache(std::span<const CachedEmbedding> rows) {
  std::string out;
  if (!rows.empty()) {
    out = "fileId,start,end";
    for (std::size_t k = 0; k < rows[0].vector.dim(); ++k) out += ",v" + std::to_string(k + 1);
    out += '\n';
  }
  for (const auto &r : rows) {
    CheckToken(r.file_id, "file id", ",\n");
    out += r.file_id + "," + FormatSeconds(r.segment.start(), 4) + "," +
           FormatSeconds(r.segment.end(), 4);
    for (double x : r.vector.values()) out += "," + ShortestDouble(x);
    out += '\n';
  }
  return out;
}

// --------------------------------------------------------- synth config

SynthConfig ParseSynthConfig(std::string_view text) {
  SynthConfig cfg;
  for (const Line &l : SplitLines(text)) {
    const std::string_view t = Trim(l.text);
    if (t.empty() || t.starts_with("#")) continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string_view::npos) throw ParseError(l.number, 0, "expected key=value");
    const std::string key(Trim(t.substr(0, eq)));
    const std::string_view value = Trim(t.substr(eq + 1));
    auto seconds = [&] { return SecondsAt(value, l.number, 0, key); };
    auto real = [&] { return NumberAt(value, l.number, 0, key); };
    auto count = [&] {
      auto v = ToUint(value);
      if (!v) throw ParseError(l.number, 0, key + " must be a non-negative integer");
      return *v;
    };
    if (key == "seed") cfg.seed = count();
    else if (key == "fileCount") cfg.file_count = count();
    else if (key == "fileDuration") cfg.file_duration = seconds();
    else if (key == "npUtterance") cfg.np_utterance = seconds();
    else if (key == "itUtterance") cfg.it_utterance = seconds();
    else if (key == "npUtterancesPerTurn") cfg.np_utterances_per_turn = real();
    else if (key == "itUtterancesPerTurn") cfg.it_utterances_per_turn = real();
    else if (key == "minUtterance") cfg.min_utterance = seconds();
    else if (key == "pauseDuration") cfg.pause_duration = seconds();
    else if (key == "minPause") cfg.min_pause = seconds();
    else if (key == "overlapProbability") cfg.overlap_probability = real();
    else if (key == "overlapDuration") cfg.overlap_duration = seconds();
    else if (key == "scoreNoiseSigma") cfg.score_noise_sigma = real();
    else if (key == "changeHalfWidth") cfg.change_half_width = seconds();
    else if (key == "frameStep") cfg.frame_step = seconds();
    else if (key == "snapToFrames") {
      if (value == "true" || value == "1") cfg.snap_to_frames = true;
      else if (value == "false" || value == "0") cfg.snap_to_frames = false;
      else throw ParseError(l.number, 0, "snapToFrames must be true or false");
    } else if (key == "embeddingDim") cfg.embedding_dim = count();
    else if (key == "centroidSeparation") cfg.centroid_separation = real();
    else if (key == "embeddingNoiseSigma") cfg.embedding_noise_sigma = real();
    else throw ParseError(l.number, 0, "unknown key '" + key + "'");
  }
  try {
    cfg.Validate();
  } catch (const InputError &e) {
    throw ParseError(1, 0, e.what());
  }
  return cfg;
}

std::string EmitSynthConfig(const SynthConfig &cfg) {
  std::ostringstream out;
  auto s = [](Time t) { return FormatSeconds(t, 4); };
  out << "seed=" << cfg.seed << "\nfileCount=" << cfg.file_count
      << "\nfileDuration=" << s(cfg.file_duration)
      << "\nnpUtterance=" << s(cfg.np_utterance)
      << "\nitUtterance=" << s(cfg.it_utterance)
      << "\nnpUtterancesPerTurn=" << ShortestDouble(cfg.np_utterances_per_turn)
      << "\nitUtterancesPerTurn=" << ShortestDouble(cfg.it_utterances_per_turn)
      << "\nminUtterance=" << s(cfg.min_utterance)
      << "\npauseDuration=" << s(cfg.pause_duration)
      << "\nminPause=" << s(cfg.min_pause)
      << "\noverlapProbability=" << ShortestDouble(cfg.overlap_probability)
      << "\noverlapDuration=" << s(cfg.overlap_duration)
      << "\nscoreNoiseSigma=" << ShortestDouble(cfg.score_noise_sigma)
      << "\nchangeHalfWidth=" << s(cfg.change_half_width)
      << "\nframeStep=" << s(cfg.frame_step)
      << "\nsnapToFrames=" << (cfg.snap_to_frames ? "true" : "false")
      << "\nembeddingDim=" << cfg.embedding_dim
      << "\ncentroidSeparation=" << ShortestDouble(cfg.centroid_separation)
      << "\nembeddingNoiseSigma=" << ShortestDouble(cfg.embedding_noise_sigma) << "\n";
  return out.str();
}

// ---------------------------------------------------------------- files

std::string ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path &path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw InputError("error writing '" + path.string() + "'");
}

namespace {

struct LoadedFile {
  std::optional<Annotation> reference;
  FileScores scores;
  std::optional<std::string> failure;
};

std::string Located(const std::filesystem::path &p, const std::exception &e) {
  return p.string() + ": " + e.what();
}

}  // namespace

LoadedCorpus LoadCorpus(const std::filesystem::path &manifest_path, Execution exec) {
  LoadedCorpus out;
  CorpusManifest manifest;
  try {
    manifest = ParseManifest(ReadFile(manifest_path));
  } catch (const ParseError &e) {
    throw ParseError(e.line(), e.column(), manifest_path.string() + ": " + e.what());
  }
  const std::filesystem::path base = manifest_path.parent_path();
  auto resolve = [&](const std::string &p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
  };
  const auto interviews = manifest.interviews();
  const auto loaded = MapIndex<LoadedFile>(interviews.size(), exec, [&](std::size_t i) {
    const Interview &iv = interviews[i];
    LoadedFile f;
    if (!iv.reference_path.empty()) {
      const auto path = resolve(iv.reference_path);
      try {
        auto all = ParseRttm(ReadFile(path));
        auto it = all.find(iv.file_id);
        f.reference = it == all.end() ? Annotation(iv.file_id) : std::move(it->second);
      } catch (const std::exception &e) {
        f.failure = Located(path, e);
        return f;
      }
    }
    for (const auto &[kind, p] : iv.score_paths) {
      const auto path = resolve(p);
      try {
        ScoreStream s = ParseScoreStream(ReadFile(path));
        if (s.file_id() != iv.file_id) {
          throw InputError("stream is for '" + s.file_id() + "', not '" + iv.file_id + "'");
        }
        f.scores.streams.push_back(std::move(s));
      } catch (const std::exception &e) {
        f.failure = Located(path, e);
        f.reference.reset();
        f.scores.streams.clear();
        return f;
      }
    }
    return f;
  });
  for (std::size_t i = 0; i < interviews.size(); ++i) {
    const std::string &id = interviews[i].file_id;
    if (loaded[i].failure) out.failures.push_back({id, *loaded[i].failure});
    if (loaded[i].reference) out.corpus.references.emplace(id, *loaded[i].reference);
    if (!loaded[i].scores.streams.empty()) out.corpus.scores.emplace(id, loaded[i].scores);
  }
  out.corpus.manifest = std::move(manifest);
  return out;
}

void WriteCorpus(const Corpus &corpus, const std::filesystem::path &dir) {
  WriteFile(dir / "manifest.csv", EmitManifest(corpus.manifest));
  for (const auto &iv : corpus.manifest.interviews()) {
    if (auto it = corpus.references.find(iv.file_id);
        it != corpus.references.end() && !iv.reference_path.empty()) {
      const Annotation one[] = {it->second};
      WriteFile(dir / iv.reference_path, EmitRttm(one, 4));
    }
    auto scores = corpus.scores.find(iv.file_id);
    if (scores == corpus.scores.end()) continue;
    if (scores->second.streams.size() != iv.score_paths.size()) {
      throw InputError("'" + iv.file_id + "' has " +
                       std::to_string(scores->second.streams.size()) +
                       " streams but the manifest names " +
                       std::to_string(iv.score_paths.size()));
    }
    std::size_t k = 0;
    for (const auto &[kind, path] : iv.score_paths) {
      WriteFile(dir / path, EmitScoreStream(scores->second.streams[k++]));
    }
  }
}

}  // namespace turnkit
