#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "convominer/corpus.hpp"

namespace convominer {

/// Closed interval [lo, hi]; construction rejects lo > hi.
class Interval {
 public:
  Interval(double lo, double hi);
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  bool contains(double v) const noexcept { return v >= lo_ && v <= hi_; }
  bool operator==(const Interval&) const = default;

 private:
  double lo_;
  double hi_;
};

/// Every unset field accepts everything. Student criteria and task criteria
/// are evaluated independently; a conversation passes when both its student
/// and its task pass.
struct FilterCriteria {
  std::optional<std::set<std::string>> task_ids;
  std::optional<std::set<std::string>> student_aliases;
  std::optional<Interval> difficulty_range;
  /// Student average score.
  std::optional<Interval> score_range;
  /// Task average score.
  std::optional<Interval> task_score_range;
  std::optional<std::set<std::string>> task_types;
  std::optional<std::set<BloomLevel>> cognitive_levels;
  std::optional<std::set<Experience>> dv_experience;
  std::optional<std::set<Experience>> cs_background;
  std::optional<std::set<Experience>> gpt_familiarity;

  bool operator==(const FilterCriteria&) const = default;
};

bool student_passes(const Student& s, const FilterCriteria& criteria);
bool task_passes(const Task& t, const FilterCriteria& criteria);

/// Once any criterion is set, only students and tasks that take part in a
/// selected conversation are kept.
struct Selection {
  std::set<std::string> students;
  std::set<std::string> tasks;
  /// Indices into Corpus::conversations(), ascending.
  std::vector<std::size_t> conversations;

  bool empty() const noexcept { return conversations.empty(); }
  bool operator==(const Selection&) const = default;
};

Selection apply_filter(const Corpus& corpus, const FilterCriteria& criteria);

/// Pointers into the corpus for the selected conversations, in corpus order.
std::vector<const Conversation*> selected_conversations(const Corpus& corpus, const Selection& selection);

inline constexpr std::size_t kScoreBins = 10;

/// Ten equal-width bins over [0,1]; 1.0 lands in the last bin.
std::size_t score_bin(double score);

struct BackgroundDistributions {
  std::array<std::size_t, 5> task_difficulty{};  // difficulty 1..5
  std::map<std::string, std::size_t> task_types;
  std::array<std::size_t, kScoreBins> task_score_density{};
  std::array<std::size_t, 3> dv_experience{};
  std::array<std::size_t, 3> cs_background{};
  std::array<std::size_t, 3> gpt_familiarity{};
  std::array<std::size_t, kScoreBins> student_score_density{};
  std::size_t selected_tasks = 0;
  std::size_t selected_students = 0;
};

/// Histograms over the selected tasks and students. Every task type of the
/// corpus appears as a key, with zero when unselected.
BackgroundDistributions background_distributions(const Corpus& corpus, const FilterCriteria& criteria);

}  // namespace convominer
