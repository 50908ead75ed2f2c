#include "convominer/filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace convominer {

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(lo <= hi)) {
    throw std::invalid_argument("interval [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                "] is not well-ordered");
  }
}

namespace {

template <typename T>
bool admits(const std::optional<std::set<T>>& allowed, const T& value) {
  return !allowed || allowed->count(value) > 0;
}

}  // namespace

bool student_passes(const Student& s, const FilterCriteria& c) {
  return admits(c.student_aliases, s.alias) && (!c.score_range || c.score_range->contains(s.avg_score)) &&
         admits(c.dv_experience, s.dv_experience) && admits(c.cs_background, s.cs_background) &&
         admits(c.gpt_familiarity, s.gpt_familiarity);
}

bool task_passes(const Task& t, const FilterCriteria& c) {
  return admits(c.task_ids, t.id) &&
         (!c.difficulty_range || c.difficulty_range->contains(static_cast<double>(t.difficulty))) &&
         (!c.task_score_range || c.task_score_range->contains(t.avg_score)) &&
         admits(c.task_types, t.task_type) && admits(c.cognitive_levels, t.cognitive_level);
}

Selection apply_filter(const Corpus& corpus, const FilterCriteria& criteria) {
  std::set<std::string> students, tasks;
  for (const auto& s : corpus.students())
    if (student_passes(s, criteria)) students.insert(s.alias);
  for (const auto& t : corpus.tasks())
    if (task_passes(t, criteria)) tasks.insert(t.id);
  Selection sel;
  const auto& convs = corpus.conversations();
  for (std::size_t i = 0; i < convs.size(); ++i) {
    if (!students.count(convs[i].student) || !tasks.count(convs[i].task)) continue;
    sel.conversations.push_back(i);
    sel.students.insert(convs[i].student);
    sel.tasks.insert(convs[i].task);
  }
  // With no criteria at all, entities without conversations stay selected.
  if (criteria == FilterCriteria{}) {
    sel.students = std::move(students);
    sel.tasks = std::move(tasks);
  }
  return sel;
}

std::vector<const Conversation*> selected_conversations(const Corpus& corpus, const Selection& selection) {
  std::vector<const Conversation*> out;
  out.reserve(selection.conversations.size());
  for (auto i : selection.conversations) out.push_back(&corpus.conversations().at(i));
  return out;
}

std::size_t score_bin(double score) {
  const double clamped = std::clamp(score, 0.0, 1.0);
  return std::min<std::size_t>(kScoreBins - 1, static_cast<std::size_t>(std::floor(clamped * kScoreBins)));
}

BackgroundDistributions background_distributions(const Corpus& corpus, const FilterCriteria& criteria) {
  const Selection sel = apply_filter(corpus, criteria);
  BackgroundDistributions d;
  for (const auto& t : corpus.tasks()) {
    d.task_types.try_emplace(t.task_type, 0);
    if (!sel.tasks.count(t.id)) continue;
    ++d.selected_tasks;
    ++d.task_difficulty[static_cast<std::size_t>(t.difficulty - 1)];
    ++d.task_types[t.task_type];
    ++d.task_score_density[score_bin(t.avg_score)];
  }
  for (const auto& s : corpus.students()) {
    if (!sel.students.count(s.alias)) continue;
    ++d.selected_students;
    ++d.dv_experience[static_cast<std::size_t>(s.dv_experience)];
    ++d.cs_background[static_cast<std::size_t>(s.cs_background)];
    ++d.gpt_familiarity[static_cast<std::size_t>(s.gpt_familiarity)];
    ++d.student_score_density[score_bin(s.avg_score)];
  }
  return d;
}

}  // namespace convominer
