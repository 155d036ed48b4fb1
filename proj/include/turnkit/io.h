// On-disk formats: RTTM references, score stream CSV, corpus manifest,
// split files, UEM extents, embedding caches and synth configs. Parsers
// throw ParseError with a 1-based line and field position; emitters throw
// InputError for values the format cannot represent.
#ifndef TURNKIT_IO_H_
#define TURNKIT_IO_H_

#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "turnkit/corpus.h"
#include "turnkit/decoding.h"
#include "turnkit/enrollment.h"
#include "turnkit/splits.h"
#include "turnkit/synth.h"
#include "turnkit/timeline.h"

namespace turnkit {

// SPEAKER <file> <chan> <onset> <dur> <NA> <NA> <label> <NA> <NA>
// Blank lines and lines starting with ";;" or "#" are ignored.
std::map<std::string, Annotation> ParseRttm(std::string_view text);
// Records sorted by (file id, onset). Start and end are each rounded to
// the given number of decimals (at most 4), so abutting and disjoint
// entries stay that way; an entry that would round to zero length is an
// InputError.
std::string EmitRttm(std::span<const Annotation> annotations,
                     int decimals = 3);

// "#fileId=<id> frameStep=<s> start=<s>", then "time,<ch1>,<ch2>,...",
// then one row per frame. start defaults to 0.
ScoreStream ParseScoreStream(std::string_view text);
std::string EmitScoreStream(const ScoreStream &stream);

// Header "fileId,duration,reference,scores,group,roles" (any column
// order). scores is "kind=path;kind=path" and may be empty; roles is
// "label:Role;label:Role". Paths are returned as written.
CorpusManifest ParseManifest(std::string_view text);
std::string EmitManifest(const CorpusManifest &manifest);

// "tDev=<s>", "tTestBoundary=<s>", "seed=<n>", then "fileId,set" rows.
SplitAssignment ParseSplit(std::string_view text);
std::string EmitSplit(const SplitAssignment &split);

// "<file> <chan> <start> <end>"; one extent per file.
std::map<std::string, Segment> ParseUem(std::string_view text);

// "fileId,start,end,v1,...,vd" rows; an optional header row starting with
// "fileId" is skipped. Every row must have the same dimension.
std::unique_ptr<CachedEmbeddingProvider> ParseEmbeddingCache(
    std::string_view text);

struct CachedEmbedding {
  std::string file_id;
  Segment segment;
  EmbeddingVector vector;
};
std::string EmitEmbeddingCache(std::span<const CachedEmbedding> rows);

// key=value lines; "#" comments. Unknown keys are errors.
SynthConfig ParseSynthConfig(std::string_view text);
std::string EmitSynthConfig(const SynthConfig &cfg);

// Throws InputError when the file cannot be read or written. WriteFile
// creates missing parent directories.
std::string ReadFile(const std::filesystem::path &path);
void WriteFile(const std::filesystem::path &path, std::string_view text);

struct LoadedCorpus {
  Corpus corpus;
  // Interviews whose reference or score files could not be loaded. They
  // stay in the manifest and are skipped by the pipelines.
  std::vector<SkippedFile> failures;
};

// Reads the manifest and every file it references, resolving relative
// paths against the manifest's directory. A per-file problem is recorded
// in failures; a bad manifest throws.
LoadedCorpus LoadCorpus(const std::filesystem::path &manifest_path,
                        Execution exec = Execution::kParallel);

// Writes manifest.csv plus each interview's reference and score files at
// the paths named in the manifest (relative to dir).
void WriteCorpus(const Corpus &corpus, const std::filesystem::path &dir);

}  // namespace turnkit

#endif  // TURNKIT_IO_H_
