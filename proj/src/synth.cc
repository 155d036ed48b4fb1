#include "turnkit/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "turnkit/error.h"
#include "turnkit/rng.h"

namespace turnkit {

void SynthConfig::Validate() const {
  auto positive = [](Time t, const char *name) {
    if (t <= Time()) throw InputError(std::string(name) + " must be positive");
  };
  positive(file_duration, "fileDuration");
  positive(np_utterance, "npUtterance");
  positive(it_utterance, "itUtterance");
  positive(min_utterance, "minUtterance");
  positive(frame_step, "frameStep");
  if (pause_duration < Time() || min_pause < Time() || overlap_duration < Time() ||
      change_half_width < Time()) {
    throw InputError("synth durations must be non-negative");
  }
  if (min_utterance > np_utterance || min_utterance > it_utterance) {
    throw InputError("minUtterance must not exceed the mean utterance durations");
  }
  if (np_utterances_per_turn < 1.0 || it_utterances_per_turn < 1.0) {
    throw InputError("utterances per turn must be at least 1");
  }
  if (!(overlap_probability >= 0.0 && overlap_probability <= 1.0)) {
    throw InputError("overlapProbability must be in [0, 1]");
  }
  if (!(score_noise_sigma >= 0.0) || !(embedding_noise_sigma >= 0.0) ||
      !(centroid_separation >= 0.0)) {
    throw InputError("noise sigmas and centroid separation must be >= 0");
  }
  if (embedding_dim < 2) throw InputError("embeddingDim must be at least 2");
  if (file_count == 0) throw InputError("fileCount must be positive");
}

namespace {

std::uint64_t FileSeed(std::uint64_t seed, std::string_view file_id) {
  return MixSeeds(seed, HashString(file_id));
}

std::vector<double> GaussianUnit(Rng &rng, std::size_t dim) {
  std::vector<double> v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (auto &x : v) {
      x = rng.Normal();
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (auto &x : v) x /= norm;
  return v;
}

Time Snap(Time t, Time step, bool enabled) {
  if (!enabled) return t;
  const std::int64_t s = step.ticks();
  return Time::FromTicks((t.ticks() + s / 2) / s * s);
}

struct Dialogue {
  std::vector<LabeledSegment> entries;
};

Dialogue GenerateDialogue(const SynthConfig &cfg, Rng &rng,
                          const std::array<std::string, 2> &speakers) {
  const std::array<Time, 2> mean_utt{cfg.np_utterance, cfg.it_utterance};
  const std::array<double, 2> per_turn{cfg.np_utterances_per_turn,
                                       cfg.it_utterances_per_turn};
  const double end = cfg.file_duration.seconds();
  const double min_utt = cfg.min_utterance.seconds();
  const double min_pause = cfg.min_pause.seconds();
  auto pause = [&] { return min_pause + rng.Exponential(cfg.pause_duration.seconds()); };

  Dialogue d;
  std::array<double, 2> last_end{-1e9, -1e9};
  double t = pause();
  double prev_end = 0.0;
  double prev_utt = 0.0;
  bool first = true;
  for (std::size_t turn = 0;; ++turn) {
    const std::size_t who = turn % 2;
    if (!first) {
      if (rng.Uniform() < cfg.overlap_probability) {
        const double ov = std::min(rng.Exponential(cfg.overlap_duration.seconds()),
                                   0.5 * prev_utt);
        t = prev_end - ov;
      } else {
        t = prev_end + pause();
      }
    }
    first = false;
    t = std::max(t, last_end[who] + min_pause);
    // Geometric number of utterances with the configured mean.
    std::size_t count = 1;
    while (rng.Uniform() > 1.0 / per_turn[who]) ++count;
    bool done = false;
    for (std::size_t u = 0; u < count; ++u) {
      if (u > 0) t = last_end[who] + pause();
      double dur = min_utt + rng.Exponential(mean_utt[who].seconds() - min_utt);
      if (t + dur > end) dur = end - t;
      if (dur < min_utt) {
        done = true;
        break;
      }
      const Time s = Snap(Time::FromSeconds(t), cfg.frame_step, cfg.snap_to_frames);
      const Time e = std::min(
          cfg.file_duration,
          Snap(Time::FromSeconds(t + dur), cfg.frame_step, cfg.snap_to_frames));
      if (e > s) d.entries.push_back({Segment(s, e), speakers[who]});
      last_end[who] = e.seconds();
      prev_end = e.seconds();
      prev_utt = dur;
    }
    if (done) break;
  }
  return d;
}

ScoreStream MakeStreams(const SynthConfig &cfg, Rng &rng, const std::string &id,
                        const Annotation &ref,
                        const std::array<std::string, 2> &speakers) {
  const std::int64_t step = cfg.frame_step.ticks();
  const auto n = static_cast<std::size_t>(cfg.file_duration.ticks() / step);
  const std::vector<std::string> channels = {
      std::string(RoleName(Role::kNeuropsychologist)),
      std::string(RoleName(Role::kInterviewee)), std::string(kSpeechChannel),
      std::string(kChangeChannel)};
  std::vector<double> truth(n * 4, 0.0);

  for (const auto &e : ref.entries()) {
    const std::size_t c = e.label == speakers[0] ? 0 : 1;
    // Frames whose center lies in [start, end).
    const std::int64_t lo = (2 * e.segment.start().ticks() - step + 2 * step - 1) / (2 * step);
    const std::int64_t hi = (2 * e.segment.end().ticks() - step + 2 * step - 1) / (2 * step);
    for (std::int64_t i = std::max<std::int64_t>(0, lo);
         i < hi && i < static_cast<std::int64_t>(n); ++i) {
      truth[i * 4 + c] = 1.0;
      truth[i * 4 + 2] = 1.0;
    }
    const std::int64_t w = cfg.change_half_width.ticks() / step;
    for (Time b : {e.segment.start(), e.segment.end()}) {
      const std::int64_t center = (b.ticks() + step / 2) / step;
      for (std::int64_t k = -w; k <= w; ++k) {
        const std::int64_t i = center + k;
        if (i < 0 || i >= static_cast<std::int64_t>(n)) continue;
        const double v = 1.0 - static_cast<double>(std::abs(k)) / static_cast<double>(w + 1);
        truth[i * 4 + 3] = std::max(truth[i * 4 + 3], v);
      }
    }
  }
  if (cfg.score_noise_sigma > 0.0) {
    for (auto &x : truth) {
      x = std::clamp(x + cfg.score_noise_sigma * rng.Normal(), 0.0, 1.0);
    }
  }
  return ScoreStream(id, cfg.frame_step, Time(), channels, std::move(truth));
}

}  // namespace

SynthEmbeddingProvider::SynthEmbeddingProvider(
    const SynthEmbeddingParams &params, const CorpusManifest &manifest,
    const std::map<std::string, Annotation> &references)
    : params_(params) {
  if (params_.dim < 2) throw InputError("embedding dimension must be at least 2");
  for (const auto &iv : manifest.interviews()) {
    FileModel m;
    const std::uint64_t file_seed = FileSeed(params_.seed, iv.file_id);
    m.noise_seed = MixSeeds(file_seed, HashString("noise"));
    Rng rng(MixSeeds(file_seed, HashString("centroids")));
    const std::vector<double> base = GaussianUnit(rng, params_.dim);
    std::vector<double> dir = GaussianUnit(rng, params_.dim);
    double proj = 0.0;
    for (std::size_t k = 0; k < params_.dim; ++k) proj += dir[k] * base[k];
    double norm = 0.0;
    for (std::size_t k = 0; k < params_.dim; ++k) {
      dir[k] -= proj * base[k];
      norm += dir[k] * dir[k];
    }
    norm = std::sqrt(norm);
    for (auto &x : dir) x /= norm;
    m.background = GaussianUnit(rng, params_.dim);

    m.speakers = iv.SpeakersInRoleOrder();
    const double half = params_.centroid_separation / 2.0;
    for (std::size_t s = 0; s < 2; ++s) {
      std::vector<double> c(params_.dim);
      const double sign = s == 0 ? 1.0 : -1.0;
      for (std::size_t k = 0; k < params_.dim; ++k) c[k] = base[k] + sign * half * dir[k];
      m.centroids[m.speakers[s]] = std::move(c);
    }
    if (auto it = references.find(iv.file_id); it != references.end()) {
      const auto entries = it->second.entries();
      m.entries.assign(entries.begin(), entries.end());
      for (const auto &e : m.entries) m.longest = std::max(m.longest, e.segment.duration());
    }
    files_.emplace(iv.file_id, std::move(m));
  }
}

const std::vector<double> &SynthEmbeddingProvider::Centroid(
    const std::string &file_id, const std::string &speaker) const {
  auto it = files_.find(file_id);
  if (it == files_.end()) throw InputError("unknown file '" + file_id + "'");
  auto c = it->second.centroids.find(speaker);
  if (c == it->second.centroids.end()) {
    throw InputError("unknown speaker '" + speaker + "' in '" + file_id + "'");
  }
  return c->second;
}

EmbeddingVector SynthEmbeddingProvider::Embed(std::string_view file_id,
                                              const Segment &segment) const {
  auto it = files_.find(file_id);
  if (it == files_.end()) {
    throw InputError("synthetic embeddings know no file '" + std::string(file_id) + "'");
  }
  const FileModel &m = it->second;

  std::map<std::string, Time> speech;
  const Time from = segment.start() - m.longest;
  auto first = std::lower_bound(
      m.entries.begin(), m.entries.end(), from,
      [](const LabeledSegment &e, Time t) { return e.segment.start() < t; });
  for (auto e = first; e != m.entries.end() && e->segment.start() < segment.end(); ++e) {
    if (auto i = e->segment.Intersect(segment)) speech[e->label] += i->duration();
  }
  const std::vector<double> *center = &m.background;
  Time most;
  for (const auto &s : m.speakers) {
    auto f = speech.find(s);
    if (f != speech.end() && f->second > most) {
      most = f->second;
      center = &m.centroids.at(s);
    }
  }

  std::vector<double> v = *center;
  if (params_.noise_sigma > 0.0) {
    Rng rng(MixSeeds(MixSeeds(m.noise_seed, static_cast<std::uint64_t>(segment.start().ticks())),
                     static_cast<std::uint64_t>(segment.end().ticks())));
    for (auto &x : v) x += params_.noise_sigma * rng.Normal();
  }
  return EmbeddingVector(std::move(v));
}

SynthCorpus GenerateCorpus(const SynthConfig &config) {
  config.Validate();
  SynthCorpus out;
  out.config = config;
  std::vector<Interview> interviews;
  for (std::size_t f = 0; f < config.file_count; ++f) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "synth%03zu", f);
    const std::string id = buf;
    const std::uint64_t file_seed = FileSeed(config.seed, id);
    Rng rng(MixSeeds(file_seed, HashString("dialogue")));

    // Which speaker label plays the neuropsychologist is random per file.
    std::array<std::string, 2> speakers{"spkA", "spkB"};
    if (rng.Uniform() < 0.5) std::swap(speakers[0], speakers[1]);

    Dialogue d = GenerateDialogue(config, rng, speakers);
    Annotation ref(id, std::move(d.entries));
    Rng noise(MixSeeds(file_seed, HashString("scores")));
    ScoreStream stream = MakeStreams(config, noise, id, ref, speakers);

    Interview iv;
    iv.file_id = id;
    iv.duration = config.file_duration;
    iv.reference_path = "ref/" + id + ".rttm";
    iv.score_paths["scores"] = "scores/" + id + ".csv";
    iv.group = kAllGroups[f % 3];
    iv.roles[speakers[0]] = Role::kNeuropsychologist;
    iv.roles[speakers[1]] = Role::kInterviewee;
    interviews.push_back(std::move(iv));

    out.corpus.references.emplace(id, std::move(ref));
    out.corpus.scores[id].streams.push_back(std::move(stream));
  }
  out.corpus.manifest = CorpusManifest(std::move(interviews));
  out.embeddings = std::make_shared<SynthEmbeddingProvider>(
      config.EmbeddingParams(), out.corpus.manifest, out.corpus.references);
  return out;
}

double QuantizationFloor(std::span<const Annotation *const> references,
                         std::span<const Segment> extents, Time frame_step) {
  if (references.size() != extents.size()) {
    throw InputError("one extent per reference is required");
  }
  std::int64_t turns = 0;
  Time total;
  for (std::size_t i = 0; i < references.size(); ++i) {
    const Annotation cropped = Crop(*references[i], extents[i]);
    turns += static_cast<std::int64_t>(cropped.size());
    total += cropped.AllSegments().TotalDuration();
  }
  if (total <= Time()) return 0.0;
  return 2.0 * static_cast<double>((frame_step * turns).ticks()) /
         static_cast<double>(total.ticks());
}

CorpusStatistics ComputeCorpusStatistics(
    const CorpusManifest &manifest,
    const std::map<std::string, Annotation> &references,
    const SplitAssignment *split) {
  CorpusStatistics stats;
  if (split) {
    for (Subset s : {Subset::kTrain, Subset::kDev, Subset::kTest}) {
      CorpusStatsColumn c;
      c.name = SubsetName(s);
      stats.columns.push_back(c);
    }
  } else {
    CorpusStatsColumn c;
    c.name = "all";
    stats.columns.push_back(c);
  }
  for (const auto &iv : manifest.interviews()) {
    std::size_t col = 0;
    if (split) {
      auto s = split->SubsetOf(iv.file_id);
      if (!s) continue;
      col = static_cast<std::size_t>(*s);
    }
    CorpusStatsColumn &c = stats.columns[col];
    ++c.interviews;
    ++c.groups[static_cast<std::size_t>(iv.group)];
    auto it = references.find(iv.file_id);
    if (it == references.end()) continue;
    const Annotation &ref = it->second;
    const std::string &np = iv.SpeakerFor(Role::kNeuropsychologist);
    const std::string &it_label = iv.SpeakerFor(Role::kInterviewee);
    c.segments_np += ref.TimelineOf(np).size();
    c.segments_it += ref.TimelineOf(it_label).size();
    c.duration_np += ref.DurationOf(np);
    c.duration_it += ref.DurationOf(it_label);
    if (ref.empty()) continue;
    const Annotation none(ref.file_id());
    for (const Region &r :
         CotemporalRegions(ref, none, Segment(Time(), ref.EndTime()))) {
      if (r.ref_labels.size() >= 2) c.duration_overlap += r.span.duration();
    }
  }
  return stats;
}

}  // namespace turnkit
