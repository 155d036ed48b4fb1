// Interview inventory and the split protocol: meta-train/dev/test over
// interviews, dev/test windows inside each interview, and the meta-train
// subsampler used for training-size ablations.
#ifndef TURNKIT_SPLITS_H_
#define TURNKIT_SPLITS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "turnkit/time.h"
#include "turnkit/timeline.h"

namespace turnkit {

enum class Group { kControl, kPreHD, kHD };
inline constexpr Group kAllGroups[] = {Group::kControl, Group::kPreHD,
                                       Group::kHD};
std::string_view GroupName(Group g);  // "C", "preHD", "HD"
std::optional<Group> ParseGroup(std::string_view s);

enum class Role { kNeuropsychologist, kInterviewee };
// Manifest role order; the neuropsychologist comes first.
inline constexpr Role kAllRoles[] = {Role::kNeuropsychologist,
                                     Role::kInterviewee};
std::string_view RoleName(Role r);  // "Neuropsychologist", "Interviewee"
// Accepts the full names and the short forms "NP" / "IT".
std::optional<Role> ParseRole(std::string_view s);
// Role names in manifest role order.
std::vector<std::string> RoleVocabulary();

struct Interview {
  std::string file_id;
  Time duration;
  std::string reference_path;
  std::map<std::string, std::string> score_paths;  // kind -> path
  Group group = Group::kControl;
  std::map<std::string, Role> roles;               // speaker label -> role

  // Speaker label holding role r. Throws InputError if absent.
  const std::string &SpeakerFor(Role r) const;
  // Speaker labels in role order (neuropsychologist first).
  std::vector<std::string> SpeakersInRoleOrder() const;
  // ref with every speaker label replaced by its role name. Labels with no
  // role are an InputError.
  Annotation ToRoles(const Annotation &ref) const;
};

class CorpusManifest {
 public:
  CorpusManifest() = default;
  // Throws InputError on duplicate file ids or a role map that is not
  // exactly one neuropsychologist and one interviewee.
  explicit CorpusManifest(std::vector<Interview> interviews);

  std::span<const Interview> interviews() const { return interviews_; }
  std::size_t size() const { return interviews_.size(); }
  const Interview *Find(std::string_view file_id) const;
  const Interview &At(std::string_view file_id) const;

 private:
  std::vector<Interview> interviews_;
};

enum class Subset { kTrain, kDev, kTest };
std::string_view SubsetName(Subset s);  // "train", "dev", "test"
std::optional<Subset> ParseSubset(std::string_view s);

inline const Time kDefaultTDev = Time::FromTicks(120 * kTicksPerSecond);
inline const Time kDefaultTestBoundary = Time::FromTicks(180 * kTicksPerSecond);

struct SplitAssignment {
  std::set<std::string> meta_train;
  std::set<std::string> meta_dev;
  std::set<std::string> meta_test;
  Time t_dev = kDefaultTDev;
  Time t_test_boundary = kDefaultTestBoundary;
  std::uint64_t seed = 0;

  const std::set<std::string> &Members(Subset s) const;
  std::optional<Subset> SubsetOf(const std::string &file_id) const;
  // Throws InputError unless the sets are disjoint and
  // 0 < t_dev <= t_test_boundary.
  void Validate() const;

  bool operator==(const SplitAssignment &) const = default;
};

// Interview counts for n interviews: dev = floor(n/5), test =
// floor((n - dev)/4), train gets the rest. 94 -> 57/18/19, 5 -> 3/1/1.
struct SplitSizes {
  std::size_t train, dev, test;
};
SplitSizes MetaSplitSizes(std::size_t n);

// Deterministic 60/20/20 partition of the manifest. With stratify, the
// global dev and test counts are apportioned across clinical groups by
// largest remainder (dev first, then test from what is left), so each
// group is split as close to 60/20/20 as integers allow. Throws InputError
// for fewer than 5 interviews.
SplitAssignment MakeMetaSplit(const CorpusManifest &manifest,
                              std::uint64_t seed, bool stratify = true,
                              Time t_dev = kDefaultTDev,
                              Time t_test_boundary = kDefaultTestBoundary);

struct InterviewSplit {
  Annotation dev;            // entries starting strictly before t_dev
  Segment test_extent;       // [t_test_boundary, file_end)
  // Speakers with no dev entry; enrollment is impossible for them.
  std::vector<std::string> enrollment_impossible;
};

// Dev entries are kept whole even when they straddle t_dev. speakers lists
// the labels that must be enrollable; empty means every label of the
// annotation. Throws InputError unless t_dev <= t_test_boundary < file_end.
InterviewSplit SplitInterview(const Annotation &annotation, Time t_dev,
                              Time t_test_boundary, Time file_end,
                              std::span<const std::string> speakers = {});

// Keeps ceil(fraction * |meta_train|) train interviews chosen by seed.
// fraction must be one of 0.1, 0.2, 0.5, 1.0 (InputError otherwise).
SplitAssignment SubsampleTrain(const SplitAssignment &assignment,
                               double fraction, std::uint64_t seed);

}  // namespace turnkit

#endif  // TURNKIT_SPLITS_H_
