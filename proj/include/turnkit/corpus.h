// In-memory corpus bundle shared by both pipelines: manifest, reference
// annotations and score streams keyed by file id.
#ifndef TURNKIT_CORPUS_H_
#define TURNKIT_CORPUS_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "turnkit/decoding.h"
#include "turnkit/metrics.h"
#include "turnkit/splits.h"
#include "turnkit/timeline.h"

namespace turnkit {

// Channel names used by the bundled formats.
inline constexpr std::string_view kSpeechChannel = "speech";
inline constexpr std::string_view kChangeChannel = "change";

// Every stream available for one file; channels are looked up across all
// of them.
struct FileScores {
  std::vector<ScoreStream> streams;

  // First stream carrying the channel, or nullptr.
  const ScoreStream *WithChannel(std::string_view channel) const;
};

struct Corpus {
  CorpusManifest manifest;
  std::map<std::string, Annotation> references;  // speaker-labeled
  std::map<std::string, FileScores> scores;
};

struct SkippedFile {
  std::string file_id;
  std::string reason;
};

struct PipelineResult {
  std::vector<FileReport> reports;               // manifest order
  std::vector<SkippedFile> skipped;              // manifest order
  std::map<std::string, Annotation> hypotheses;  // role-labeled, cropped

  // Throws InputError if every file was skipped.
  AggregateReport Summary() const { return Aggregate(reports); }
};

// Interviews of the subset, in manifest order.
std::vector<const Interview *> InterviewsIn(const CorpusManifest &manifest,
                                            const SplitAssignment &split,
                                            Subset subset);

}  // namespace turnkit

#endif  // TURNKIT_CORPUS_H_
