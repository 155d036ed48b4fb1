#include "turnkit/splits.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "turnkit/error.h"
#include "turnkit/rng.h"

namespace turnkit {

std::string_view GroupName(Group g) {
  switch (g) {
    case Group::kControl:
      return "C";
    case Group::kPreHD:
      return "preHD";
    case Group::kHD:
      return "HD";
  }
  return "?";
}

std::optional<Group> ParseGroup(std::string_view s) {
  for (Group g : kAllGroups) {
    if (s == GroupName(g)) return g;
  }
  return std::nullopt;
}

std::string_view RoleName(Role r) {
  return r == Role::kNeuropsychologist ? "Neuropsychologist" : "Interviewee";
}

std::optional<Role> ParseRole(std::string_view s) {
  if (s == "Neuropsychologist" || s == "NP") return Role::kNeuropsychologist;
  if (s == "Interviewee" || s == "IT") return Role::kInterviewee;
  return std::nullopt;
}

std::vector<std::string> RoleVocabulary() {
  std::vector<std::string> v;
  for (Role r : kAllRoles) v.emplace_back(RoleName(r));
  return v;
}

const std::string &Interview::SpeakerFor(Role r) const {
  for (const auto &[label, role] : roles) {
    if (role == r) return label;
  }
  throw InputError("interview '" + file_id + "' has no " +
                   std::string(RoleName(r)));
}

std::vector<std::string> Interview::SpeakersInRoleOrder() const {
  std::vector<std::string> out;
  for (Role r : kAllRoles) out.push_back(SpeakerFor(r));
  return out;
}

Annotation Interview::ToRoles(const Annotation &ref) const {
  std::vector<LabeledSegment> entries;
  entries.reserve(ref.size());
  for (const auto &e : ref.entries()) {
    auto it = roles.find(e.label);
    if (it == roles.end()) {
      throw InputError("interview '" + file_id + "': speaker '" + e.label +
                       "' has no role in the manifest");
    }
    entries.push_back({e.segment, std::string(RoleName(it->second))});
  }
  return Annotation(ref.file_id(), std::move(entries));
}

CorpusManifest::CorpusManifest(std::vector<Interview> interviews)
    : interviews_(std::move(interviews)) {
  std::set<std::string> seen;
  for (const auto &iv : interviews_) {
    if (iv.file_id.empty()) throw InputError("interview with empty file id");
    if (!seen.insert(iv.file_id).second) {
      throw InputError("duplicate file id '" + iv.file_id + "'");
    }
    if (iv.roles.size() != 2) {
      throw InputError("interview '" + iv.file_id +
                       "' must map exactly two speaker labels to roles");
    }
    for (Role r : kAllRoles) iv.SpeakerFor(r);
  }
}

const Interview *CorpusManifest::Find(std::string_view file_id) const {
  for (const auto &iv : interviews_) {
    if (iv.file_id == file_id) return &iv;
  }
  return nullptr;
}

const Interview &CorpusManifest::At(std::string_view file_id) const {
  if (const Interview *iv = Find(file_id)) return *iv;
  throw InputError("file id '" + std::string(file_id) +
                   "' is not in the manifest");
}

std::string_view SubsetName(Subset s) {
  switch (s) {
    case Subset::kTrain:
      return "train";
    case Subset::kDev:
      return "dev";
    case Subset::kTest:
      return "test";
  }
  return "?";
}

std::optional<Subset> ParseSubset(std::string_view s) {
  for (Subset x : {Subset::kTrain, Subset::kDev, Subset::kTest}) {
    if (s == SubsetName(x)) return x;
  }
  return std::nullopt;
}

const std::set<std::string> &SplitAssignment::Members(Subset s) const {
  switch (s) {
    case Subset::kTrain:
      return meta_train;
    case Subset::kDev:
      return meta_dev;
    case Subset::kTest:
      break;
  }
  return meta_test;
}

std::optional<Subset> SplitAssignment::SubsetOf(
    const std::string &file_id) const {
  if (meta_train.contains(file_id)) return Subset::kTrain;
  if (meta_dev.contains(file_id)) return Subset::kDev;
  if (meta_test.contains(file_id)) return Subset::kTest;
  return std::nullopt;
}

void SplitAssignment::Validate() const {
  for (const auto &id : meta_train) {
    if (meta_dev.contains(id) || meta_test.contains(id)) {
      throw InputError("file '" + id + "' is in more than one meta set");
    }
  }
  for (const auto &id : meta_dev) {
    if (meta_test.contains(id)) {
      throw InputError("file '" + id + "' is in more than one meta set");
    }
  }
  if (t_dev <= Time() || t_dev > t_test_boundary) {
    throw InputError("tDev must satisfy 0 < tDev <= tTestBoundary");
  }
}

SplitSizes MetaSplitSizes(std::size_t n) {
  const std::size_t dev = n / 5;
  const std::size_t test = (n - dev) / 4;
  return {n - dev - test, dev, test};
}

namespace {

// Splits `count` across buckets proportionally to `weights` by largest
// remainder; ties go to the earlier bucket.
std::vector<std::size_t> Apportion(std::span<const std::size_t> weights,
                                   std::size_t count) {
  const std::size_t total =
      std::accumulate(weights.begin(), weights.end(), std::size_t{0});
  std::vector<std::size_t> out(weights.size(), 0);
  if (total == 0) return out;
  std::vector<std::size_t> order(weights.size());
  std::vector<std::size_t> remainder(weights.size());
  std::size_t assigned = 0;
  for (std::size_t g = 0; g < weights.size(); ++g) {
    out[g] = weights[g] * count / total;
    remainder[g] = weights[g] * count % total;
    assigned += out[g];
    order[g] = g;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t k = 0; assigned < count; ++k, ++assigned) {
    ++out[order[k]];
  }
  return out;
}

}  // namespace

SplitAssignment MakeMetaSplit(const CorpusManifest &manifest,
                              std::uint64_t seed, bool stratify, Time t_dev,
                              Time t_test_boundary) {
  const std::size_t n = manifest.size();
  if (n < 5) {
    throw InputError("a meta split needs at least 5 interviews, got " +
                     std::to_string(n));
  }
  const SplitSizes sizes = MetaSplitSizes(n);

  SplitAssignment out;
  out.t_dev = t_dev;
  out.t_test_boundary = t_test_boundary;
  out.seed = seed;

  auto assign = [&](std::vector<std::string> ids, std::size_t dev,
                    std::size_t test, std::uint64_t stream) {
    std::sort(ids.begin(), ids.end());
    Rng rng(MixSeeds(seed, stream));
    rng.Shuffle(ids);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i < dev) {
        out.meta_dev.insert(ids[i]);
      } else if (i < dev + test) {
        out.meta_test.insert(ids[i]);
      } else {
        out.meta_train.insert(ids[i]);
      }
    }
  };

  if (!stratify) {
    std::vector<std::string> ids;
    for (const auto &iv : manifest.interviews()) ids.push_back(iv.file_id);
    assign(std::move(ids), sizes.dev, sizes.test, 0);
  } else {
    std::array<std::vector<std::string>, 3> by_group;
    for (const auto &iv : manifest.interviews()) {
      by_group[static_cast<std::size_t>(iv.group)].push_back(iv.file_id);
    }
    std::array<std::size_t, 3> counts{};
    for (std::size_t g = 0; g < 3; ++g) counts[g] = by_group[g].size();
    const auto dev = Apportion(counts, sizes.dev);
    std::array<std::size_t, 3> left{};
    for (std::size_t g = 0; g < 3; ++g) left[g] = counts[g] - dev[g];
    const auto test = Apportion(left, sizes.test);
    for (std::size_t g = 0; g < 3; ++g) {
      assign(std::move(by_group[g]), dev[g], test[g], g + 1);
    }
  }
  out.Validate();
  return out;
}

InterviewSplit SplitInterview(const Annotation &annotation, Time t_dev,
                              Time t_test_boundary, Time file_end,
                              std::span<const std::string> speakers) {
  if (t_dev > t_test_boundary) {
    throw InputError("tDev must not exceed the test boundary");
  }
  if (t_test_boundary >= file_end) {
    throw InputError("file '" + annotation.file_id() + "' ends at " +
                     FormatSeconds(file_end, 4) +
                     " s, before the test boundary " +
                     FormatSeconds(t_test_boundary, 4) + " s");
  }
  std::vector<LabeledSegment> dev;
  for (const auto &e : annotation.entries()) {
    if (e.segment.start() < t_dev) dev.push_back(e);
  }
  InterviewSplit out{Annotation(annotation.file_id(), std::move(dev)),
                     Segment(t_test_boundary, file_end),
                     {}};
  const std::vector<std::string> present = out.dev.Labels();
  const std::vector<std::string> wanted =
      speakers.empty() ? annotation.Labels()
                       : std::vector<std::string>(speakers.begin(), speakers.end());
  for (const auto &s : wanted) {
    if (!std::binary_search(present.begin(), present.end(), s)) {
      out.enrollment_impossible.push_back(s);
    }
  }
  return out;
}

SplitAssignment SubsampleTrain(const SplitAssignment &assignment,
                               double fraction, std::uint64_t seed) {
  int percent = 0;
  for (int p : {10, 20, 50, 100}) {
    if (std::abs(fraction * 100.0 - p) < 1e-9) percent = p;
  }
  if (percent == 0) {
    throw InputError("train fraction must be one of 0.1, 0.2, 0.5, 1.0");
  }
  SplitAssignment out = assignment;
  if (percent == 100) return out;
  std::vector<std::string> ids(assignment.meta_train.begin(),
                               assignment.meta_train.end());
  const std::size_t keep = (ids.size() * percent + 99) / 100;
  Rng rng(MixSeeds(seed, HashString("subsample-train")));
  rng.Shuffle(ids);
  out.meta_train = std::set<std::string>(ids.begin(), ids.begin() + keep);
  return out;
}

}  // namespace turnkit
