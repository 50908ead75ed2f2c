#include "convominer/patterns.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace convominer {

std::string_view to_string(PatternKind k) { return k == PatternKind::sequence ? "sequence" : "set"; }

void MiningParams::check() const {
  if (max_seq_len < 1 || max_set_size < 1 || min_support < 1) {
    throw std::invalid_argument("mining params: max_seq_len, max_set_size and min_support must be >= 1");
  }
}

const Pattern* PatternCatalog::find(PatternKind kind, const CodeList& codes) const {
  for (const auto& p : patterns)
    if (p.kind == kind && p.codes == codes) return &p;
  return nullptr;
}

namespace {

std::vector<std::vector<std::string>> turn_code_sets(const Conversation& c) {
  std::vector<std::vector<std::string>> out;
  out.reserve(c.turns.size());
  for (const auto& t : c.turns) out.push_back(t.code_set());
  return out;
}

CodeList code_union(std::span<const std::vector<std::string>> turns) {
  CodeList u;
  for (const auto& t : turns) u.insert(u.end(), t.begin(), t.end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

bool turn_has(const std::vector<std::string>& sorted_codes, const std::string& code) {
  return std::binary_search(sorted_codes.begin(), sorted_codes.end(), code);
}

// Emits each distinct subsequence once by always embedding the next code at
// its leftmost admissible turn.
void extend_sequences(const std::vector<std::vector<std::size_t>>& next, const CodeList& alphabet,
                      std::size_t pos, int remaining, CodeList& prefix, std::set<CodeList>& out) {
  for (std::size_t c = 0; c < alphabet.size(); ++c) {
    const std::size_t j = next[pos][c];
    if (j == std::numeric_limits<std::size_t>::max()) continue;
    prefix.push_back(alphabet[c]);
    out.insert(prefix);
    if (remaining > 1) extend_sequences(next, alphabet, j + 1, remaining - 1, prefix, out);
    prefix.pop_back();
  }
}

void extend_sets(const CodeList& alphabet, std::size_t from, int remaining, CodeList& prefix,
                 std::set<CodeList>& out) {
  for (std::size_t i = from; i < alphabet.size(); ++i) {
    prefix.push_back(alphabet[i]);
    out.insert(prefix);
    if (remaining > 1) extend_sets(alphabet, i + 1, remaining - 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::set<CodeList> extract_sequences(const Conversation& conversation, int max_seq_len) {
  std::set<CodeList> out;
  if (max_seq_len < 1 || conversation.turns.empty()) return out;
  const auto turns = turn_code_sets(conversation);
  const CodeList alphabet = code_union(turns);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  // next[i][c]: first turn >= i carrying alphabet[c].
  std::vector<std::vector<std::size_t>> next(turns.size() + 1, std::vector<std::size_t>(alphabet.size(), kNone));
  for (std::size_t i = turns.size(); i-- > 0;) {
    next[i] = next[i + 1];
    for (std::size_t c = 0; c < alphabet.size(); ++c)
      if (turn_has(turns[i], alphabet[c])) next[i][c] = i;
  }
  CodeList prefix;
  extend_sequences(next, alphabet, 0, max_seq_len, prefix, out);
  return out;
}

std::set<CodeList> extract_sets(const Conversation& conversation, int max_set_size) {
  std::set<CodeList> out;
  if (max_set_size < 1) return out;
  const auto turns = turn_code_sets(conversation);
  const CodeList alphabet = code_union(turns);
  CodeList prefix;
  extend_sets(alphabet, 0, max_set_size, prefix, out);
  return out;
}

PatternCounter::PatternCounter(MiningParams params) : params_(params) { params_.check(); }

void PatternCounter::add(const Conversation& conversation) {
  const ConversationRef ref = conversation.ref();
  auto record = [&](PatternKind kind, const std::set<CodeList>& found) {
    for (const auto& codes : found) {
      Tally& t = tallies_[{kind, codes}];
      t.supporters.push_back(ref);
      t.scores.push_back(conversation.score);
    }
  };
  record(PatternKind::sequence, extract_sequences(conversation, params_.max_seq_len));
  record(PatternKind::set, extract_sets(conversation, params_.max_set_size));
}

void PatternCounter::merge(const PatternCounter& other) {
  if (!(other.params_ == params_)) throw std::invalid_argument("PatternCounter::merge: params differ");
  for (const auto& [key, tally] : other.tallies_) {
    Tally& mine = tallies_[key];
    mine.supporters.insert(mine.supporters.end(), tally.supporters.begin(), tally.supporters.end());
    mine.scores.insert(mine.scores.end(), tally.scores.begin(), tally.scores.end());
  }
}

PatternCatalog PatternCounter::finish() const {
  PatternCatalog catalog;
  catalog.params = params_;
  for (const auto& [key, tally] : tallies_) {
    if (tally.supporters.size() < static_cast<std::size_t>(params_.min_support)) continue;
    std::vector<std::size_t> order(tally.supporters.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return tally.supporters[a] < tally.supporters[b]; });
    Pattern p;
    p.kind = key.first;
    p.codes = key.second;
    double sum = 0.0;
    for (auto i : order) {
      p.supporters.push_back(tally.supporters[i]);
      sum += tally.scores[i];
    }
    p.avg_score = sum / static_cast<double>(order.size());
    catalog.patterns.push_back(std::move(p));
  }
  std::stable_sort(catalog.patterns.begin(), catalog.patterns.end(), [](const Pattern& a, const Pattern& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.length() != b.length()) return a.length() < b.length();
    return a.codes < b.codes;
  });
  return catalog;
}

PatternCatalog mine_patterns(std::span<const Conversation* const> conversations, const MiningParams& params) {
  if (conversations.empty()) throw std::invalid_argument("mine_patterns: empty selection");
  PatternCounter counter(params);
  for (const Conversation* c : conversations) counter.add(*c);
  return counter.finish();
}

std::vector<Pattern> sort_patterns(const PatternCatalog& catalog, PatternSortKey key, SortDirection direction) {
  std::vector<Pattern> out = catalog.patterns;
  auto value = [key](const Pattern& p) -> double {
    switch (key) {
      case PatternSortKey::length: return static_cast<double>(p.length());
      case PatternSortKey::support: return static_cast<double>(p.support());
      case PatternSortKey::avg_score: return p.avg_score;
    }
    return 0.0;
  };
  std::stable_sort(out.begin(), out.end(), [&](const Pattern& a, const Pattern& b) {
    return direction == SortDirection::ascending ? value(a) < value(b) : value(a) > value(b);
  });
  return out;
}

bool match_pattern(PatternKind kind, const CodeList& codes, std::span<const std::vector<std::string>> turn_codes) {
  if (codes.empty()) return false;
  if (kind == PatternKind::set) {
    const CodeList u = code_union(turn_codes);
    return std::all_of(codes.begin(), codes.end(),
                       [&](const std::string& c) { return std::binary_search(u.begin(), u.end(), c); });
  }
  std::size_t pos = 0;
  for (const auto& code : codes) {
    while (pos < turn_codes.size() &&
           std::find(turn_codes[pos].begin(), turn_codes[pos].end(), code) == turn_codes[pos].end())
      ++pos;
    if (pos == turn_codes.size()) return false;
    ++pos;
  }
  return true;
}

bool match_pattern(const Pattern& pattern, const Conversation& conversation) {
  const auto turns = turn_code_sets(conversation);
  return match_pattern(pattern.kind, pattern.codes, turns);
}

}  // namespace convominer
