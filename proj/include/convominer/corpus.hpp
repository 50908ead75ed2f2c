#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace convominer {

enum class CodeCategory { learning, chatgpt_effective, chatgpt_other };

/// Revised Bloom taxonomy, ordered from lowest to highest cognitive level.
enum class BloomLevel { remember, understand, apply, analyze, evaluate, create };

/// Ordinal background attribute level shared by all three survey fields.
enum class Experience { none, some, experienced };

inline constexpr std::array<BloomLevel, 6> kBloomLevels = {
    BloomLevel::remember, BloomLevel::understand, BloomLevel::apply,
    BloomLevel::analyze,  BloomLevel::evaluate,   BloomLevel::create};
inline constexpr std::array<Experience, 3> kExperienceLevels = {
    Experience::none, Experience::some, Experience::experienced};

std::string_view to_string(CodeCategory c);
std::string_view to_string(BloomLevel b);
std::string_view to_string(Experience e);
std::optional<CodeCategory> parse_category(std::string_view s);
std::optional<BloomLevel> parse_bloom(std::string_view s);
std::optional<Experience> parse_experience(std::string_view s);

/// Reserved code for prompts that could not be coded.
inline constexpr std::string_view kEmptyCodeId = "EMPTY";

/// Thrown when the corpus document cannot be read: malformed JSON, missing
/// fields, or fields of the wrong type. The message carries a line/column or
/// a JSON path locus.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a well-formed corpus violates a model invariant. Every finding
/// names the offending entity.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> findings);
  const std::vector<std::string>& findings() const noexcept { return findings_; }

 private:
  std::vector<std::string> findings_;
};

struct CodeDefinition {
  std::string id;
  std::string label;
  std::string abbreviation;
  CodeCategory category = CodeCategory::learning;
  std::optional<BloomLevel> bloom_level;  // present iff category == learning

  bool operator==(const CodeDefinition&) const = default;
};

class CodeSchema {
 public:
  CodeSchema() = default;
  /// Throws ValidationError on duplicate ids/abbreviations, an empty list, or
  /// a bloom level that disagrees with the category.
  explicit CodeSchema(std::vector<CodeDefinition> codes);

  const std::vector<CodeDefinition>& codes() const noexcept { return codes_; }
  const CodeDefinition* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }
  std::size_t size() const noexcept { return codes_.size(); }
  std::size_t count(CodeCategory c) const;

  bool operator==(const CodeSchema& o) const { return codes_ == o.codes_; }

 private:
  std::vector<CodeDefinition> codes_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

struct Student {
  std::string alias;
  Experience dv_experience = Experience::none;
  Experience cs_background = Experience::none;
  Experience gpt_familiarity = Experience::none;
  double avg_score = 0.0;  // derived

  bool operator==(const Student&) const = default;
};

struct Task {
  std::string id;
  std::string task_type;
  BloomLevel cognitive_level = BloomLevel::remember;
  int difficulty = 1;
  std::string description;
  double avg_score = 0.0;  // derived

  bool operator==(const Task&) const = default;
};

struct Turn {
  std::size_t index = 0;
  std::string prompt_text;
  std::string response_text;
  /// Codes in the order they were listed; the first one is the primary code.
  std::vector<std::string> codes;
  /// Ingested relevance; absent when the source omitted it.
  std::optional<double> ingested_relevance;
  double correctness = 0.0;

  // Derived at load.
  double relevance = 0.0;
  bool relevance_is_fallback = false;
  std::size_t response_length = 0;
  double information_gain = 0.0;

  /// Sorted, duplicate-free copy of `codes`; the merge key of the tree.
  std::vector<std::string> code_set() const;

  bool operator==(const Turn&) const = default;
};

/// Identifies a conversation by its (student, task) pair.
struct ConversationRef {
  std::string student;
  std::string task;

  auto operator<=>(const ConversationRef&) const = default;
  std::string key() const { return student + "/" + task; }
};

struct Conversation {
  std::string student;
  std::string task;
  double score = 0.0;
  std::vector<Turn> turns;

  ConversationRef ref() const { return {student, task}; }
  bool operator==(const Conversation&) const = default;
};

/// Cumulative-distribution convention for information gain.
enum class IgMode { inclusive, exclusive_smoothed };

struct LoadOptions {
  IgMode ig_mode = IgMode::inclusive;
  double smoothing_alpha = 1.0;
};

/// Source-string → level tables, one per background attribute, declared in the
/// corpus file header.
using BackgroundMap = std::map<std::string, std::map<std::string, Experience>>;

/// Immutable after construction. Derived fields are populated by the loader.
class Corpus {
 public:
  Corpus() = default;
  /// Validates cross references and computes every derived field. Throws
  /// ValidationError with all findings.
  Corpus(CodeSchema schema, std::vector<Student> students, std::vector<Task> tasks,
         std::vector<Conversation> conversations, LoadOptions options = {},
         BackgroundMap background_map = {});

  const CodeSchema& schema() const noexcept { return schema_; }
  const std::vector<Student>& students() const noexcept { return students_; }
  const std::vector<Task>& tasks() const noexcept { return tasks_; }
  const std::vector<Conversation>& conversations() const noexcept { return conversations_; }
  const LoadOptions& options() const noexcept { return options_; }
  const BackgroundMap& background_map() const noexcept { return background_map_; }

  const Student* find_student(std::string_view alias) const;
  const Task* find_task(std::string_view id) const;
  const Conversation* find_conversation(std::string_view student, std::string_view task) const;

  std::size_t turn_count() const;

  bool operator==(const Corpus& o) const {
    return schema_ == o.schema_ && students_ == o.students_ && tasks_ == o.tasks_ &&
           conversations_ == o.conversations_;
  }

 private:
  void validate() const;
  void derive();

  CodeSchema schema_;
  std::vector<Student> students_;
  std::vector<Task> tasks_;
  std::vector<Conversation> conversations_;
  LoadOptions options_;
  BackgroundMap background_map_;
  std::unordered_map<std::string, std::size_t> student_index_;
  std::unordered_map<std::string, std::size_t> task_index_;
  std::map<ConversationRef, std::size_t> conversation_index_;
};

/// Parses and validates a corpus JSON document.
Corpus load_corpus(std::string_view source, LoadOptions options = {});
Corpus load_corpus_file(const std::string& path, LoadOptions options = {});

/// Serializes back to the corpus file format. Derived fields are omitted, and
/// fallback relevance values are not written so a reload re-derives them.
std::string dump_corpus(const Corpus& corpus, int indent = -1);

}  // namespace convominer
