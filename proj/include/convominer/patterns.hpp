#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "convominer/corpus.hpp"

namespace convominer {

enum class PatternKind { sequence, set };

std::string_view to_string(PatternKind k);

using CodeList = std::vector<std::string>;

struct MiningParams {
  int max_seq_len = 4;
  int max_set_size = 3;
  int min_support = 2;

  /// Throws std::invalid_argument unless every field is >= 1.
  void check() const;
  bool operator==(const MiningParams&) const = default;
};

struct Pattern {
  PatternKind kind = PatternKind::sequence;
  /// Ordered for sequences; sorted ascending for sets.
  CodeList codes;
  std::vector<ConversationRef> supporters;  // ascending
  double avg_score = 0.0;

  std::size_t length() const noexcept { return codes.size(); }
  std::size_t support() const noexcept { return supporters.size(); }
  bool operator==(const Pattern&) const = default;
};

struct PatternCatalog {
  std::vector<Pattern> patterns;
  MiningParams params;

  const Pattern* find(PatternKind kind, const CodeList& codes) const;
};

/// Every distinct order-preserving code sequence of length <= max_seq_len drawn
/// one code per turn from strictly increasing turn positions.
std::set<CodeList> extract_sequences(const Conversation& conversation, int max_seq_len);

/// Every non-empty subset of the conversation's code union with size <= max_set_size.
std::set<CodeList> extract_sets(const Conversation& conversation, int max_set_size);

/// Accumulates per-pattern supporters. Counters over disjoint conversation
/// partitions can be merged before finishing.
class PatternCounter {
 public:
  explicit PatternCounter(MiningParams params);

  void add(const Conversation& conversation);
  void merge(const PatternCounter& other);
  /// Applies min_support and emits the catalog in (kind, length, codes) order.
  PatternCatalog finish() const;

 private:
  struct Tally {
    std::vector<ConversationRef> supporters;
    std::vector<double> scores;
  };
  MiningParams params_;
  std::map<std::pair<PatternKind, CodeList>, Tally> tallies_;
};

/// Throws std::invalid_argument on an empty selection or invalid params.
PatternCatalog mine_patterns(std::span<const Conversation* const> conversations, const MiningParams& params = {});

enum class PatternSortKey { length, support, avg_score };
enum class SortDirection { ascending, descending };

/// Stable; ties keep catalog order.
std::vector<Pattern> sort_patterns(const PatternCatalog& catalog, PatternSortKey key, SortDirection direction);

/// Same containment semantics as the extractors: gapped subsequence for
/// sequences, subset of the code union for sets.
bool match_pattern(PatternKind kind, const CodeList& codes, std::span<const std::vector<std::string>> turn_codes);
bool match_pattern(const Pattern& pattern, const Conversation& conversation);

}  // namespace convominer
