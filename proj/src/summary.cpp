#include "convominer/summary.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace convominer {

std::string_view to_string(GroupingMode m) {
  return m == GroupingMode::student_grouping ? "student_grouping" : "task_grouping";
}

std::string_view prompt_category_name(std::size_t slot) {
  if (slot < kBloomLevels.size()) return to_string(kBloomLevels[slot]);
  return slot == 6 ? "chatgpt_effective" : "chatgpt_other";
}

std::size_t prompt_category_slot(const CodeDefinition& code) {
  switch (code.category) {
    case CodeCategory::learning: return static_cast<std::size_t>(code.bloom_level.value_or(BloomLevel::remember));
    case CodeCategory::chatgpt_effective: return 6;
    case CodeCategory::chatgpt_other: return 7;
  }
  return 7;
}

namespace {

// Ordered bucket keys so group order follows the attribute's natural order.
struct Bucket {
  int rank;
  std::string key;
  auto operator<=>(const Bucket&) const = default;
};

Bucket score_band(double s) {
  if (s < 0.5) return {0, "[0,0.5)"};
  if (s < 0.8) return {1, "[0.5,0.8)"};
  return {2, "[0.8,1]"};
}

}  // namespace

std::vector<Group> group_members(const Corpus& corpus, const Selection& selection, GroupingMode mode,
                                 const std::string& group_by) {
  std::map<Bucket, std::vector<std::string>> buckets;
  if (mode == GroupingMode::task_grouping) {
    if (!group_by.empty() && group_by != "task_type") {
      throw std::invalid_argument("unknown group_by \"" + group_by + "\" for task grouping");
    }
    for (const auto& id : selection.tasks) buckets[{0, corpus.find_task(id)->task_type}].push_back(id);
  } else {
    auto attribute = [&](const Student& s) -> Bucket {
      auto level = [](Experience e) { return Bucket{static_cast<int>(e), std::string(to_string(e))}; };
      if (group_by == "dv_experience") return level(s.dv_experience);
      if (group_by == "cs_background") return level(s.cs_background);
      if (group_by == "gpt_familiarity") return level(s.gpt_familiarity);
      return score_band(s.avg_score);
    };
    static const std::set<std::string> kKeys = {"dv_experience", "cs_background", "gpt_familiarity", "score_band"};
    if (!kKeys.count(group_by)) {
      throw std::invalid_argument("unknown group_by \"" + group_by + "\" for student grouping");
    }
    for (const auto& alias : selection.students) buckets[attribute(*corpus.find_student(alias))].push_back(alias);
  }
  std::vector<Group> out;
  for (auto& [bucket, members] : buckets) {
    std::sort(members.begin(), members.end());
    out.push_back({bucket.key, std::move(members)});
  }
  return out;
}

CategoryDistribution normalize(const CategoryCounts& counts) {
  CategoryDistribution d{};
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return d;
  for (std::size_t i = 0; i < counts.size(); ++i) d[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return d;
}

namespace {

struct Accumulator {
  CategoryCounts counts{};
  double ig_sum = 0.0;
  double rl_sum = 0.0;
  double score_sum = 0.0;
  std::size_t conversations = 0;
  std::size_t turns = 0;

  void add(const Corpus& corpus, const Conversation& c) {
    ++conversations;
    score_sum += c.score;
    for (const Turn& t : c.turns) {
      ++turns;
      ig_sum += t.information_gain;
      rl_sum += static_cast<double>(t.response_length);
      for (const auto& code : t.codes) ++counts[prompt_category_slot(*corpus.schema().find(code))];
    }
  }
  void add(const Accumulator& o) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
    ig_sum += o.ig_sum;
    rl_sum += o.rl_sum;
    score_sum += o.score_sum;
    conversations += o.conversations;
    turns += o.turns;
  }
  double mean_ig() const { return turns ? ig_sum / static_cast<double>(turns) : 0.0; }
  double mean_rl() const { return turns ? rl_sum / static_cast<double>(turns) : 0.0; }
  double mean_score() const { return conversations ? score_sum / static_cast<double>(conversations) : 0.0; }
};

}  // namespace

GroupSummary summarize_group(const Corpus& corpus, const Group& group, const Selection& selection,
                             GroupingMode mode) {
  std::map<std::string, Accumulator> per_member;
  for (const auto& m : group.members) per_member[m];
  // Sorted by ref so the sums do not depend on file order.
  std::vector<const Conversation*> convs = selected_conversations(corpus, selection);
  std::sort(convs.begin(), convs.end(),
            [](const Conversation* a, const Conversation* b) { return a->ref() < b->ref(); });
  for (const Conversation* c : convs) {
    const std::string& owner = mode == GroupingMode::student_grouping ? c->student : c->task;
    auto it = per_member.find(owner);
    if (it != per_member.end()) it->second.add(corpus, *c);
  }

  GroupSummary s;
  s.group_key = group.key;
  s.mode = mode;
  s.members = group.members;
  Accumulator all;
  for (const auto& m : group.members) {
    const Accumulator& a = per_member.at(m);
    all.add(a);
    MemberRow row;
    row.member = m;
    row.category_counts = a.counts;
    row.category_distribution = normalize(a.counts);
    row.mean_ig = a.mean_ig();
    row.mean_rl = a.mean_rl();
    row.mean_score = a.mean_score();
    row.conversations = a.conversations;
    row.turns = a.turns;
    s.rows.push_back(std::move(row));
  }
  s.category_counts = all.counts;
  s.category_distribution = normalize(all.counts);
  s.mean_ig = all.mean_ig();
  s.mean_rl = all.mean_rl();
  s.mean_score = all.mean_score();
  s.conversations = all.conversations;
  s.turns = all.turns;
  return s;
}

std::vector<MemberRow> sort_members(const GroupSummary& summary, MemberSortKey key, SortDirection direction) {
  std::vector<MemberRow> rows = summary.rows;
  auto value = [key](const MemberRow& r) {
    switch (key) {
      case MemberSortKey::mean_score: return r.mean_score;
      case MemberSortKey::mean_ig: return r.mean_ig;
      case MemberSortKey::mean_rl: return r.mean_rl;
    }
    return 0.0;
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const MemberRow& a, const MemberRow& b) {
    const double va = value(a), vb = value(b);
    if (va != vb) return direction == SortDirection::ascending ? va < vb : va > vb;
    return a.member < b.member;
  });
  return rows;
}

}  // namespace convominer
