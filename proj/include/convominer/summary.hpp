#pragma once

#include <array>
#include <string>
#include <vector>

#include "convominer/corpus.hpp"
#include "convominer/filter.hpp"
#include "convominer/patterns.hpp"

namespace convominer {

enum class GroupingMode { student_grouping, task_grouping };

std::string_view to_string(GroupingMode m);

/// Six Bloom levels, then chatgpt_effective, then chatgpt_other.
inline constexpr std::size_t kPromptCategories = 8;
using CategoryCounts = std::array<std::size_t, kPromptCategories>;
using CategoryDistribution = std::array<double, kPromptCategories>;

std::string_view prompt_category_name(std::size_t slot);
std::size_t prompt_category_slot(const CodeDefinition& code);

struct Group {
  std::string key;
  std::vector<std::string> members;  // ascending

  bool operator==(const Group&) const = default;
};

/// Student grouping keys: dv_experience, cs_background, gpt_familiarity,
/// score_band. Task grouping accepts task_type (or an empty key). Throws
/// std::invalid_argument on anything else.
std::vector<Group> group_members(const Corpus& corpus, const Selection& selection, GroupingMode mode,
                                 const std::string& group_by);

struct MemberRow {
  std::string member;
  CategoryCounts category_counts{};
  CategoryDistribution category_distribution{};
  double mean_ig = 0.0;
  double mean_rl = 0.0;
  double mean_score = 0.0;
  std::size_t conversations = 0;
  std::size_t turns = 0;
};

struct GroupSummary {
  std::string group_key;
  GroupingMode mode = GroupingMode::student_grouping;
  std::vector<std::string> members;
  CategoryCounts category_counts{};
  CategoryDistribution category_distribution{};
  double mean_ig = 0.0;
  double mean_rl = 0.0;
  double mean_score = 0.0;
  std::size_t conversations = 0;
  std::size_t turns = 0;
  std::vector<MemberRow> rows;  // same order as members
};

/// Normalized counts; all zero when nothing was counted.
CategoryDistribution normalize(const CategoryCounts& counts);

/// Aggregates the group's selected conversations. A turn with k codes
/// contributes k category counts; IG and response length are averaged over
/// turns and score over conversations.
GroupSummary summarize_group(const Corpus& corpus, const Group& group, const Selection& selection,
                             GroupingMode mode);

enum class MemberSortKey { mean_score, mean_ig, mean_rl };

/// Stable; equal keys fall back to ascending member id in either direction.
std::vector<MemberRow> sort_members(const GroupSummary& summary, MemberSortKey key, SortDirection direction);

}  // namespace convominer
