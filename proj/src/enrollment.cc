#include "turnkit/enrollment.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <utility>

#include "turnkit/error.h"
#include "turnkit/rng.h"

namespace turnkit {

EmbeddingVector::EmbeddingVector(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) throw InputError("embedding has dimension zero");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InputError("embedding value is not finite");
  }
}

double EmbeddingVector::Norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

void CachedEmbeddingProvider::Add(std::string file_id, const Segment &segment,
                                  EmbeddingVector v) {
  if (v.dim() != dim_) {
    throw InputError("cached embedding has dimension " +
                     std::to_string(v.dim()) + ", expected " +
                     std::to_string(dim_));
  }
  Key key{std::move(file_id), segment.start().ticks(), segment.end().ticks()};
  if (!cache_.emplace(key, std::move(v)).second) {
    throw InputError("duplicate cached embedding for '" + std::get<0>(key) +
                     "' [" + FormatSeconds(segment.start(), 4) + ", " +
                     FormatSeconds(segment.end(), 4) + "]");
  }
}

EmbeddingVector CachedEmbeddingProvider::Embed(std::string_view file_id,
                                               const Segment &segment) const {
  auto it = cache_.find(
      Key{std::string(file_id), segment.start().ticks(), segment.end().ticks()});
  if (it == cache_.end()) {
    throw InputError("no cached embedding for '" + std::string(file_id) +
                     "' [" + FormatSeconds(segment.start(), 4) + ", " +
                     FormatSeconds(segment.end(), 4) + "]");
  }
  return it->second;
}

SpeakerTemplate BuildTemplate(const EmbeddingProvider &provider,
                              std::span<const SegmentRef> dev_segments,
                              std::string speaker, Time min_duration) {
  SpeakerTemplate t;
  t.speaker = std::move(speaker);
  // Running mean: exact when every input equals the current mean.
  std::vector<double> mean;
  for (const auto &ref : dev_segments) {
    if (ref.segment.duration() < min_duration) {
      ++t.skipped_count;
      continue;
    }
    const EmbeddingVector v = provider.Embed(ref.file_id, ref.segment);
    if (mean.empty()) {
      mean.assign(v.dim(), 0.0);
    } else if (v.dim() != mean.size()) {
      throw InputError("embedding dimension changed within one template");
    }
    ++t.support_count;
    t.support_duration += ref.segment.duration();
    const double k = static_cast<double>(t.support_count);
    auto x = v.values();
    for (std::size_t d = 0; d < mean.size(); ++d) {
      mean[d] += (x[d] - mean[d]) / k;
    }
  }
  if (t.support_count == 0) {
    throw EnrollmentImpossible("speaker '" + t.speaker +
                               "' has no enrollment segment of at least " +
                               FormatSeconds(min_duration, 4) + " s");
  }
  t.vector = EmbeddingVector(std::move(mean));
  return t;
}

double CosineDistance(const EmbeddingVector &u, const EmbeddingVector &m) {
  if (u.dim() != m.dim()) {
    throw InputError("cosine distance between dimensions " +
                     std::to_string(u.dim()) + " and " + std::to_string(m.dim()));
  }
  double dot = 0.0, uu = 0.0, mm = 0.0;
  auto a = u.values();
  auto b = m.values();
  for (std::size_t d = 0; d < a.size(); ++d) {
    dot += a[d] * b[d];
    uu += a[d] * a[d];
    mm += b[d] * b[d];
  }
  if (uu == 0.0 || mm == 0.0) {
    throw InputError("cosine distance of a zero-norm vector");
  }
  const double cosine = std::clamp(dot / std::sqrt(uu * mm), -1.0, 1.0);
  return 0.5 * (1.0 - cosine);
}

std::vector<std::size_t> ArgminPerRow(const DistanceMatrix &d) {
  std::vector<std::size_t> out(d.rows, 0);
  for (std::size_t r = 0; r < d.rows; ++r) {
    for (std::size_t c = 1; c < d.cols; ++c) {
      if (d.at(r, c) < d.at(r, out[r])) out[r] = c;
    }
  }
  return out;
}

std::vector<std::size_t> ChanceBaseline(const DistanceMatrix &d,
                                        std::uint64_t seed) {
  if (d.rows == 0 || d.cols == 0) throw InputError("empty distance matrix");
  for (double v : d.values) {
    if (!std::isfinite(v)) throw InputError("non-finite distance");
  }
  DistanceMatrix shuffled = d;
  Rng rng(seed);
  rng.Shuffle(shuffled.values);
  return ArgminPerRow(shuffled);
}

CandidateScores ScoreCandidates(const EmbeddingProvider &provider,
                                std::string_view file_id,
                                std::span<const Segment> candidates,
                                std::span<const SpeakerTemplate> templates,
                                Time min_duration) {
  if (templates.empty()) throw InputError("identification needs a template");
  CandidateScores out;
  out.distances.cols = templates.size();
  out.row_of.assign(candidates.size(), 0);
  out.status.assign(candidates.size(), CandidateStatus::kScored);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (candidates[k].duration() < min_duration) {
      out.status[k] = CandidateStatus::kTooShort;
      ++out.diagnostics.too_short;
      continue;
    }
    const EmbeddingVector v = provider.Embed(file_id, candidates[k]);
    if (v.Norm() == 0.0) {
      out.status[k] = CandidateStatus::kZeroNorm;
      ++out.diagnostics.zero_norm;
      continue;
    }
    out.row_of[k] = out.distances.rows++;
    for (const auto &t : templates) {
      out.distances.values.push_back(CosineDistance(v, t.vector));
    }
  }
  return out;
}

Identification AssignLabels(std::string file_id,
                            std::span<const Segment> candidates,
                            std::span<const SpeakerTemplate> templates,
                            const CandidateScores &scores,
                            std::span<const std::size_t> choice_per_row) {
  if (templates.empty()) throw InputError("identification needs a template");
  if (choice_per_row.size() != scores.distances.rows) {
    throw InputError("one template choice per scored candidate is required");
  }
  const std::size_t n = candidates.size();
  Identification out;
  out.diagnostics = scores.diagnostics;
  out.template_of.assign(n, 0);

  std::vector<std::size_t> scored;
  for (std::size_t k = 0; k < n; ++k) {
    if (scores.status[k] == CandidateStatus::kScored) {
      out.template_of[k] = choice_per_row[scores.row_of[k]];
      scored.push_back(k);
    }
  }
  std::sort(scored.begin(), scored.end(), [&](std::size_t a, std::size_t b) {
    return candidates[a] < candidates[b];
  });
  for (std::size_t k = 0; k < n; ++k) {
    if (scores.status[k] != CandidateStatus::kTooShort || scored.empty()) {
      continue;
    }
    const Segment &c = candidates[k];
    std::optional<std::size_t> nearest;
    Time best_gap;
    for (std::size_t j : scored) {
      const Segment &o = candidates[j];
      const Time gap = std::max({Time(), o.start() - c.end(), c.start() - o.end()});
      if (!nearest || gap < best_gap) {
        nearest = j;
        best_gap = gap;
      }
    }
    out.template_of[k] = out.template_of[*nearest];
  }

  std::vector<std::pair<std::string, Timeline>> per_label;
  std::vector<std::vector<Segment>> grouped(templates.size());
  for (std::size_t k = 0; k < n; ++k) {
    grouped[out.template_of[k]].push_back(candidates[k]);
  }
  for (std::size_t t = 0; t < templates.size(); ++t) {
    per_label.emplace_back(templates[t].speaker, Timeline(std::move(grouped[t])));
  }
  out.annotation = Annotation::FromTimelines(std::move(file_id), per_label);
  return out;
}

Identification Identify(const EmbeddingProvider &provider, std::string file_id,
                        std::span<const Segment> candidates,
                        std::span<const SpeakerTemplate> templates,
                        Time min_duration) {
  const CandidateScores scores =
      ScoreCandidates(provider, file_id, candidates, templates, min_duration);
  const auto choice = ArgminPerRow(scores.distances);
  return AssignLabels(std::move(file_id), candidates, templates, scores, choice);
}

namespace {

struct FileOutcome {
  std::optional<FileReport> report;
  std::optional<SkippedFile> skipped;
  Annotation hypothesis;
};

FileOutcome RunOneFile(const Corpus &corpus, const SplitAssignment &split,
                       const EmbeddingProvider &provider,
                       const EnrollmentConfig &cfg, const Interview &iv) {
  const std::string &id = iv.file_id;
  auto skip = [&](std::string reason) {
    FileOutcome o;
    o.skipped = SkippedFile{id, std::move(reason)};
    return o;
  };

  auto ref_it = corpus.references.find(id);
  if (ref_it == corpus.references.end()) return skip("no reference annotation");
  const Annotation &ref = ref_it->second;

  try {
    const std::vector<std::string> speakers = iv.SpeakersInRoleOrder();
    const InterviewSplit parts =
        SplitInterview(ref, cfg.t_dev, split.t_test_boundary, iv.duration, speakers);
    if (!parts.enrollment_impossible.empty()) {
      return skip("enrollment impossible for speaker '" +
                  parts.enrollment_impossible.front() + "': no segment starts before tDev");
    }

    std::vector<SpeakerTemplate> templates;
    for (const auto &speaker : speakers) {
      std::vector<SegmentRef> refs;
      for (const Segment &s : parts.dev.TimelineOf(speaker)) refs.push_back({id, s});
      templates.push_back(BuildTemplate(provider, refs, speaker, cfg.min_embeddable));
    }

    Timeline candidates;
    if (cfg.segmentation == SegmentationSource::kGroundTruth) {
      candidates = ref.AllSegments();
    } else {
      auto sc = corpus.scores.find(id);
      if (sc == corpus.scores.end()) return skip("no score streams");
      const ScoreStream *vad = sc->second.WithChannel(cfg.vad_channel);
      const ScoreStream *change = sc->second.WithChannel(cfg.change_channel);
      if (!vad) return skip("no '" + cfg.vad_channel + "' channel");
      if (!change) return skip("no '" + cfg.change_channel + "' channel");
      const Timeline speech = Binarize(*vad, cfg.vad_channel, cfg.vad);
      const auto points = DetectChangePoints(*change, cfg.change_channel, cfg.change);
      candidates = CandidateSegments(speech, points);
    }

    const std::vector<Segment> cands(candidates.begin(), candidates.end());
    Identification ident;
    if (cfg.identifier == Identifier::kChance) {
      const CandidateScores scores =
          ScoreCandidates(provider, id, cands, templates, cfg.min_embeddable);
      std::vector<std::size_t> choice;
      if (scores.distances.rows > 0) {
        choice = ChanceBaseline(scores.distances,
                                MixSeeds(cfg.chance_seed, HashString(id)));
      }
      ident = AssignLabels(id, cands, templates, scores, choice);
    } else {
      ident = Identify(provider, id, cands, templates, cfg.min_embeddable);
    }

    const Annotation ref_roles = Crop(iv.ToRoles(ref), parts.test_extent);
    FileOutcome o;
    o.hypothesis = Crop(iv.ToRoles(ident.annotation), parts.test_extent);
    const auto vocab = RoleVocabulary();
    o.report = FileReport{id, std::string(GroupName(iv.group)),
                          IdentificationErrorRate(ref_roles, o.hypothesis,
                                                  parts.test_extent, cfg.collar,
                                                  vocab)};
    return o;
  } catch (const InputError &e) {
    return skip(e.what());
  }
}

}  // namespace

PipelineResult RunEnrollmentPipeline(const Corpus &corpus,
                                     const SplitAssignment &split,
                                     const EmbeddingProvider &provider,
                                     const EnrollmentConfig &cfg,
                                     Execution exec) {
  const auto files = InterviewsIn(corpus.manifest, split, cfg.evaluate_on);
  const auto outcomes = MapIndex<FileOutcome>(files.size(), exec, [&](std::size_t i) {
    return RunOneFile(corpus, split, provider, cfg, *files[i]);
  });
  PipelineResult result;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto &o = outcomes[i];
    if (o.report) {
      result.reports.push_back(*o.report);
      result.hypotheses.emplace(files[i]->file_id, o.hypothesis);
    } else {
      result.skipped.push_back(*o.skipped);
    }
  }
  return result;
}

std::vector<SweepRow> SweepTDev(const Corpus &corpus,
                                const SplitAssignment &split,
                                const EmbeddingProvider &provider,
                                const EnrollmentConfig &cfg,
                                std::span<const Time> grid, Execution exec) {
  if (grid.empty()) throw InputError("tDev grid is empty");
  for (Time t : grid) {
    if (t <= Time() || t > split.t_test_boundary) {
      throw InputError("tDev " + FormatSeconds(t, 4) +
                       " s is outside (0, tTestBoundary]");
    }
  }
  std::vector<SweepRow> rows;
  for (Time t : grid) {
    EnrollmentConfig c = cfg;
    c.t_dev = t;
    const PipelineResult r = RunEnrollmentPipeline(corpus, split, provider, c, exec);
    SweepRow row;
    row.t_dev = t;
    for (const auto &f : r.reports) row.report += f.report;
    row.files = r.reports.size();
    row.skipped = r.skipped.size();
    rows.push_back(row);
  }
  return rows;
}

namespace {

double ParseNumber(std::string_view s, std::string_view what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw InputError("invalid " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::vector<Time> ParseTimeGrid(std::string_view text) {
  std::vector<std::string_view> parts;
  const char sep = text.find(':') != std::string_view::npos ? ':' : ',';
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = text.find(sep, pos);
    parts.push_back(text.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  std::vector<Time> out;
  if (sep == ',') {
    for (auto p : parts) out.push_back(Time::FromSeconds(ParseNumber(p, "grid value")));
    return out;
  }
  if (parts.size() != 3) throw InputError("grid must be lo:hi:step");
  const Time lo = Time::FromSeconds(ParseNumber(parts[0], "grid start"));
  const Time hi = Time::FromSeconds(ParseNumber(parts[1], "grid end"));
  const Time step = Time::FromSeconds(ParseNumber(parts[2], "grid step"));
  if (step <= Time()) throw InputError("grid step must be positive");
  if (hi < lo) throw InputError("grid end is before grid start");
  for (Time t = lo; t <= hi; t += step) out.push_back(t);
  return out;
}

}  // namespace turnkit
