#include "turnkit/corpus.h"

namespace turnkit {

const ScoreStream *FileScores::WithChannel(std::string_view channel) const {
  for (const auto &s : streams) {
    if (s.ChannelIndex(channel)) return &s;
  }
  return nullptr;
}

std::vector<const Interview *> InterviewsIn(const CorpusManifest &manifest,
                                            const SplitAssignment &split,
                                            Subset subset) {
  const auto &members = split.Members(subset);
  std::vector<const Interview *> out;
  for (const auto &iv : manifest.interviews()) {
    if (members.contains(iv.file_id)) out.push_back(&iv);
  }
  return out;
}

}  // namespace turnkit
