#include "convominer/fixture.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "convominer/correlation.hpp"

namespace convominer {

CodeSchema reference_schema() {
  using C = CodeCategory;
  using B = BloomLevel;
  auto learning = [](const char* id, const char* label, B level) {
    return CodeDefinition{id, label, id, C::learning, level};
  };
  auto chatgpt = [](const char* id, const char* label, C cat, const char* abbr = nullptr) {
    return CodeDefinition{id, label, abbr ? abbr : id, cat, std::nullopt};
  };
  return CodeSchema({
      learning("DI", "Definition Inquiry", B::remember),
      learning("QI", "Question Inquiry", B::remember),
      learning("FR", "Fact Retrieval", B::remember),
      learning("CE", "Concept Explanation", B::understand),
      learning("ER", "Example Request", B::understand),
      learning("CI", "Comparison Inquiry", B::understand),
      learning("AI", "Application Inquiry", B::apply),
      learning("PR", "Procedure Request", B::apply),
      learning("CG", "Code Generation", B::apply),
      learning("DA", "Data Analysis", B::analyze),
      learning("CA", "Cause Analysis", B::analyze),
      learning("AV", "Answer Verification", B::evaluate),
      learning("DC", "Design Critique", B::evaluate),
      learning("DG", "Design Generation", B::create),
      learning("IP", "Idea Proposal", B::create),
      chatgpt("FQ", "Follow up Questions", C::chatgpt_effective),
      chatgpt("OR", "Output Restrictions", C::chatgpt_effective),
      chatgpt("RP", "Role Play", C::chatgpt_effective),
      chatgpt("CP", "Context Provision", C::chatgpt_effective),
      chatgpt("TM", "Template", C::chatgpt_effective),
      chatgpt("SS", "Step by Step", C::chatgpt_effective),
      chatgpt("RF", "Reflection", C::chatgpt_effective),
      chatgpt("EMPTY", "Empty", C::chatgpt_other, "EMP"),
      chatgpt("GR", "Greeting", C::chatgpt_other),
      chatgpt("TP", "Task Paste", C::chatgpt_other),
      chatgpt("RE", "Rephrase", C::chatgpt_other),
      chatgpt("CO", "Correction", C::chatgpt_other),
  });
}

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform_below(engine_, n)); }
  double real() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return real() < p; }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

struct TaskType {
  const char* name;
  BloomLevel level;
  std::size_t count;
  int base_difficulty;
};

const std::vector<TaskType>& task_types() {
  static const std::vector<TaskType> kTypes = {
      {"terminology", BloomLevel::remember, 5, 1},
      {"chart_reading", BloomLevel::understand, 4, 2},
      {"visualization_literacy", BloomLevel::understand, 4, 2},
      {"encoding_application", BloomLevel::apply, 4, 3},
      {"data_analysis", BloomLevel::analyze, 4, 4},
      {"design_critique", BloomLevel::evaluate, 3, 4},
      {"design_creation", BloomLevel::create, 3, 5},
  };
  return kTypes;
}

const std::vector<std::string>& topic_words() {
  static const std::vector<std::string> kWords = {
      "pipeline", "encoding", "channel", "mark", "hue", "saturation", "luminance", "position", "length",
      "area", "angle", "scatterplot", "histogram", "barchart", "treemap", "heatmap", "network", "node",
      "link", "axis", "scale", "legend", "glyph", "overview", "zoom", "filter", "brushing", "linking",
      "aggregation", "clustering", "outlier", "trend", "correlation", "distribution", "quantitative",
      "ordinal", "categorical", "sequential", "diverging", "palette", "perception", "gestalt",
      "proximity", "similarity", "enclosure", "dashboard", "storytelling", "annotation", "layout",
      "hierarchy", "tabular", "spatial", "temporal", "uncertainty", "interaction", "tooltip", "density",
      "contour", "projection", "dimensionality"};
  return kWords;
}

const std::vector<std::string>& general_words() {
  static const std::vector<std::string> kWords = {
      "the", "a", "of", "and", "to", "is", "in", "that", "it", "for", "data", "can", "this", "be",
      "used", "with", "as", "are", "on", "values", "users", "visual", "show", "when", "by", "which",
      "help", "more", "each", "different", "example", "important", "between", "information", "also",
      "such", "represent", "compare", "patterns", "variables", "design", "choose", "effective", "clear",
      "common", "helps", "viewers", "analysis", "approach", "consider"};
  return kWords;
}

// Learning codes by Bloom level, in reference_schema order.
const std::vector<std::vector<std::string>>& learning_by_level() {
  static const std::vector<std::vector<std::string>> kLevels = {
      {"DI", "QI", "FR"}, {"CE", "ER", "CI"}, {"AI", "PR", "CG"}, {"DA", "CA"}, {"AV", "DC"}, {"DG", "IP"}};
  return kLevels;
}

const std::vector<std::string>& chatgpt_codes() {
  static const std::vector<std::string> kCodes = {"FQ", "OR", "RP", "CP", "TM", "SS", "RF", "GR", "TP", "RE", "CO"};
  return kCodes;
}

std::string pick_learning_code(Rng& rng, BloomLevel task_level) {
  const int center = static_cast<int>(task_level);
  // Prompts cluster around the task's level with a pull toward "remember".
  std::vector<double> weight(6);
  for (int l = 0; l < 6; ++l) weight[static_cast<std::size_t>(l)] = 1.0 / (1.0 + 1.5 * std::abs(l - center)) + (l == 0 ? 0.6 : 0.0);
  double total = 0.0;
  for (double w : weight) total += w;
  double r = rng.real() * total;
  std::size_t level = 0;
  for (; level < 5; ++level) {
    if (r < weight[level]) break;
    r -= weight[level];
  }
  return rng.pick(learning_by_level()[level]);
}

std::vector<std::string> pick_codes(Rng& rng, BloomLevel task_level, std::size_t turn_index) {
  if (rng.chance(0.02)) return {std::string(kEmptyCodeId)};
  std::vector<std::string> codes;
  const bool follow_up = turn_index > 0 && rng.chance(0.35);
  if (follow_up) codes.push_back("FQ");
  if (!follow_up || rng.chance(0.5)) codes.push_back(pick_learning_code(rng, task_level));
  if (rng.chance(0.22)) codes.push_back(rng.pick(chatgpt_codes()));
  if (codes.size() < 3 && rng.chance(0.05)) codes.push_back(pick_learning_code(rng, task_level));
  std::vector<std::string> unique;
  for (auto& c : codes)
    if (std::find(unique.begin(), unique.end(), c) == unique.end()) unique.push_back(std::move(c));
  return unique;
}

std::string words(Rng& rng, const std::vector<std::string>& topic, std::size_t n, double topical) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.empty()) out += (rng.chance(0.08) ? ". " : " ");
    out += rng.chance(topical) ? rng.pick(topic) : rng.pick(general_words());
  }
  if (!out.empty()) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    out += '.';
  }
  return out;
}

double round_to(double v, double step) { return std::round(v / step) * step; }

}  // namespace

Corpus generate_fixture(std::uint64_t seed, FixtureShape shape, LoadOptions options) {
  if (shape.students == 0 || shape.tasks == 0) throw std::invalid_argument("fixture: need students and tasks");
  if (shape.conversations > shape.students * shape.tasks)
    throw std::invalid_argument("fixture: more conversations than student-task pairs");
  if (shape.turns < shape.conversations) throw std::invalid_argument("fixture: fewer turns than conversations");
  Rng rng(seed);
  const CodeSchema schema = reference_schema();

  std::vector<Student> students;
  for (std::size_t i = 0; i < shape.students; ++i) {
    Student s;
    char alias[32];
    std::snprintf(alias, sizeof alias, "S%02zu", i + 1);
    s.alias = alias;
    s.dv_experience = kExperienceLevels[rng.below(3)];
    s.cs_background = kExperienceLevels[rng.below(3)];
    s.gpt_familiarity = kExperienceLevels[rng.below(3)];
    students.push_back(std::move(s));
  }

  // Task types cycle when the requested task count differs from 27.
  std::vector<const TaskType*> type_slots;
  for (const auto& t : task_types())
    for (std::size_t k = 0; k < t.count; ++k) type_slots.push_back(&t);
  std::vector<Task> tasks;
  std::vector<std::vector<std::string>> task_topics;
  for (std::size_t i = 0; i < shape.tasks; ++i) {
    const TaskType& type = *type_slots[i % type_slots.size()];
    Task t;
    t.id = "T" + std::to_string(i + 1);
    t.task_type = type.name;
    t.cognitive_level = type.level;
    t.difficulty = std::clamp(type.base_difficulty + static_cast<int>(rng.below(3)) - 1, 1, 5);
    std::vector<std::string> topic = topic_words();
    rng.shuffle(topic);
    topic.resize(12);
    t.description = "Task " + t.id + " (" + type.name + "): " + words(rng, topic, 18, 0.5);
    tasks.push_back(std::move(t));
    task_topics.push_back(std::move(topic));
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t s = 0; s < shape.students; ++s)
    for (std::size_t t = 0; t < shape.tasks; ++t) pairs.emplace_back(s, t);
  rng.shuffle(pairs);
  pairs.resize(shape.conversations);
  std::sort(pairs.begin(), pairs.end());

  // Turn counts: skewed toward short conversations, then nudged to the exact total.
  std::vector<std::size_t> lengths(shape.conversations);
  std::size_t total = 0;
  for (auto& n : lengths) {
    n = 1 + rng.below(3) + (rng.chance(0.4) ? rng.below(4) : 0);
    total += n;
  }
  constexpr std::size_t kMaxTurns = 12;
  while (total != shape.turns) {
    std::size_t& n = lengths[rng.below(lengths.size())];
    if (total > shape.turns && n > 1) {
      --n;
      --total;
    } else if (total < shape.turns && n < kMaxTurns) {
      ++n;
      ++total;
    }
  }

  std::vector<Conversation> conversations;
  for (std::size_t ci = 0; ci < pairs.size(); ++ci) {
    const auto [si, ti] = pairs[ci];
    const Task& task = tasks[ti];
    const auto& topic = task_topics[ti];
    Conversation c;
    c.student = students[si].alias;
    c.task = task.id;
    double correct_sum = 0.0;
    for (std::size_t k = 0; k < lengths[ci]; ++k) {
      Turn t;
      t.index = k;
      t.codes = pick_codes(rng, task.cognitive_level, k);
      const CodeDefinition* first = schema.find(t.codes.front());
      t.prompt_text = t.codes.front() == kEmptyCodeId ? "" : first->label + ": " + words(rng, topic, 4 + rng.below(10), 0.6) + "?";
      t.response_text = words(rng, topic, 15 + rng.below(80), 0.35 + 0.3 * rng.real());
      if (rng.chance(0.97)) t.ingested_relevance = round_to(0.55 + 0.45 * rng.real(), 0.001);
      const double r = rng.real();
      t.correctness = r < 0.6 ? 1.0 : (r < 0.85 ? 0.5 : 0.0);
      correct_sum += t.correctness;
      c.turns.push_back(std::move(t));
    }
    const double mean_correct = correct_sum / static_cast<double>(c.turns.size());
    c.score = std::clamp(round_to(0.3 + 0.6 * mean_correct + 0.3 * (rng.real() - 0.5), 0.05), 0.0, 1.0);
    conversations.push_back(std::move(c));
  }

  return Corpus(schema, std::move(students), std::move(tasks), std::move(conversations), options);
}

}  // namespace convominer
