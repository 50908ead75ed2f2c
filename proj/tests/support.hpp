// Shared builders, generators and brute-force oracles for the test binaries.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "convominer/corpus.hpp"
#include "convominer/patterns.hpp"

namespace testsupport {

namespace cm = convominer;

inline cm::CodeDefinition learning(const std::string& id, cm::BloomLevel level) {
  return {id, "Code " + id, id.substr(0, 3) + "x", cm::CodeCategory::learning, level};
}

inline cm::CodeDefinition chatgpt(const std::string& id, cm::CodeCategory cat) {
  return {id, "Code " + id, id.substr(0, 3) + "x", cat, std::nullopt};
}

/// A..F learning codes (one per Bloom level), DI remember, G/H/FQ effective,
/// EMPTY other.
inline cm::CodeSchema test_schema() {
  using B = cm::BloomLevel;
  return cm::CodeSchema({
      learning("A", B::remember),
      learning("B", B::understand),
      learning("C", B::apply),
      learning("D", B::analyze),
      learning("E", B::evaluate),
      learning("F", B::create),
      learning("DI", B::remember),
      chatgpt("G", cm::CodeCategory::chatgpt_effective),
      chatgpt("H", cm::CodeCategory::chatgpt_effective),
      chatgpt("FQ", cm::CodeCategory::chatgpt_effective),
      chatgpt("EMPTY", cm::CodeCategory::chatgpt_other),
  });
}

struct TurnSpec {
  std::vector<std::string> codes;
  std::string prompt = "why";
  std::string response = "because it is";
  std::optional<double> relevance = 1.0;
  double correctness = 1.0;
};

class CorpusBuilder {
 public:
  CorpusBuilder() : schema_(test_schema()) {}
  explicit CorpusBuilder(cm::CodeSchema schema) : schema_(std::move(schema)) {}

  CorpusBuilder& student(const std::string& alias, cm::Experience dv = cm::Experience::none,
                         cm::Experience cs = cm::Experience::none, cm::Experience gpt = cm::Experience::none) {
    cm::Student s;
    s.alias = alias;
    s.dv_experience = dv;
    s.cs_background = cs;
    s.gpt_familiarity = gpt;
    students_.push_back(s);
    return *this;
  }

  CorpusBuilder& task(const std::string& id, const std::string& type = "general", int difficulty = 3,
                      cm::BloomLevel level = cm::BloomLevel::remember) {
    cm::Task t;
    t.id = id;
    t.task_type = type;
    t.difficulty = difficulty;
    t.cognitive_level = level;
    t.description = "Task " + id;
    tasks_.push_back(t);
    return *this;
  }

  CorpusBuilder& conversation(const std::string& student, const std::string& task, double score,
                              const std::vector<TurnSpec>& turns) {
    cm::Conversation c;
    c.student = student;
    c.task = task;
    c.score = score;
    for (std::size_t i = 0; i < turns.size(); ++i) {
      cm::Turn t;
      t.index = i;
      t.codes = turns[i].codes;
      t.prompt_text = turns[i].prompt;
      t.response_text = turns[i].response;
      t.ingested_relevance = turns[i].relevance;
      t.correctness = turns[i].correctness;
      c.turns.push_back(std::move(t));
    }
    convs_.push_back(std::move(c));
    return *this;
  }

  /// Shorthand: one TurnSpec per code list.
  CorpusBuilder& coded(const std::string& student, const std::string& task, double score,
                       const std::vector<std::vector<std::string>>& codes) {
    std::vector<TurnSpec> turns;
    for (const auto& c : codes) turns.push_back(TurnSpec{c});
    return conversation(student, task, score, turns);
  }

  cm::Corpus build(cm::LoadOptions options = {}) const {
    return cm::Corpus(schema_, students_, tasks_, convs_, options);
  }

 private:
  cm::CodeSchema schema_;
  std::vector<cm::Student> students_;
  std::vector<cm::Task> tasks_;
  std::vector<cm::Conversation> convs_;
};

/// Small deterministic generator helpers over mt19937_64.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  bool coin(double p = 0.5) { return unit() < p; }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }
  std::mt19937_64& engine() { return rng_; }

  std::string word(const std::vector<std::string>& vocab) { return pick(vocab); }
  std::string text(const std::vector<std::string>& vocab, std::size_t min_words, std::size_t max_words) {
    std::string s;
    const std::size_t n = between(min_words, max_words);
    for (std::size_t i = 0; i < n; ++i) {
      if (i) s += coin(0.2) ? ", " : " ";
      s += word(vocab);
    }
    return s;
  }

 private:
  std::mt19937_64 rng_;
};

inline const std::vector<std::string>& small_vocab() {
  static const std::vector<std::string> v = {"bar", "line", "axis", "color", "scale", "map",
                                             "data", "plot", "hue", "area", "trend", "value"};
  return v;
}

struct RandomCorpusShape {
  std::size_t max_conversations = 8;
  std::size_t max_turns = 6;
  std::size_t max_codes_per_turn = 3;
  std::vector<std::string> code_pool = {"A", "B", "C", "D", "G"};
};

/// Random corpus over test_schema(): up to 4 students x 3 tasks, turn codes
/// drawn from the pool, scores on a 0.05 grid.
inline cm::Corpus random_corpus(Gen& g, const RandomCorpusShape& shape = {}) {
  CorpusBuilder b;
  const std::vector<std::string> students = {"s1", "s2", "s3", "s4"};
  const std::vector<std::string> tasks = {"t1", "t2", "t3"};
  const std::vector<std::string> types = {"alpha", "beta"};
  for (const auto& s : students) {
    b.student(s, cm::kExperienceLevels[g.below(3)], cm::kExperienceLevels[g.below(3)],
              cm::kExperienceLevels[g.below(3)]);
  }
  for (const auto& t : tasks) b.task(t, g.pick(types), static_cast<int>(g.between(1, 5)));
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& s : students)
    for (const auto& t : tasks) pairs.emplace_back(s, t);
  std::shuffle(pairs.begin(), pairs.end(), g.engine());
  const std::size_t n = g.between(1, std::min(shape.max_conversations, pairs.size()));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<TurnSpec> turns;
    const std::size_t nt = g.between(1, shape.max_turns);
    for (std::size_t k = 0; k < nt; ++k) {
      TurnSpec ts;
      const std::size_t nc = g.between(1, std::min(shape.max_codes_per_turn, shape.code_pool.size()));
      while (ts.codes.size() < nc) {
        const std::string& code = g.pick(shape.code_pool);
        if (std::find(ts.codes.begin(), ts.codes.end(), code) == ts.codes.end()) ts.codes.push_back(code);
      }
      ts.prompt = g.text(small_vocab(), 1, 6);
      ts.response = g.text(small_vocab(), 0, 12);
      ts.relevance = g.coin(0.9) ? std::optional<double>(std::round(g.unit() * 100) / 100) : std::nullopt;
      ts.correctness = std::vector<double>{0.0, 0.5, 1.0}[g.below(3)];
      turns.push_back(std::move(ts));
    }
    b.conversation(pairs[i].first, pairs[i].second, static_cast<double>(g.below(21)) * 0.05, turns);
  }
  return b.build();
}

// ---------------------------------------------------------------------------
// Brute-force pattern oracle: enumerates every index tuple explicitly.

inline void all_sequences(const std::vector<std::vector<std::string>>& turns, std::size_t start,
                          std::size_t max_len, std::vector<std::string>& cur, std::set<cm::CodeList>& out) {
  if (!cur.empty()) out.insert(cur);
  if (cur.size() == max_len) return;
  for (std::size_t i = start; i < turns.size(); ++i) {
    for (const auto& code : turns[i]) {
      cur.push_back(code);
      all_sequences(turns, i + 1, max_len, cur, out);
      cur.pop_back();
    }
  }
}

inline std::set<cm::CodeList> oracle_sequences(const cm::Conversation& c, std::size_t max_len) {
  std::vector<std::vector<std::string>> turns;
  for (const auto& t : c.turns) turns.push_back(t.codes);
  std::set<cm::CodeList> out;
  std::vector<std::string> cur;
  all_sequences(turns, 0, max_len, cur, out);
  return out;
}

inline std::set<cm::CodeList> oracle_sets(const cm::Conversation& c, std::size_t max_size) {
  std::set<std::string> uni;
  for (const auto& t : c.turns) uni.insert(t.codes.begin(), t.codes.end());
  const std::vector<std::string> u(uni.begin(), uni.end());
  std::set<cm::CodeList> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << u.size()); ++mask) {
    cm::CodeList s;
    for (std::size_t i = 0; i < u.size(); ++i)
      if (mask >> i & 1) s.push_back(u[i]);
    if (s.size() <= max_size) out.insert(s);
  }
  return out;
}

struct OraclePattern {
  std::vector<cm::ConversationRef> supporters;
  double score_sum = 0.0;
};

using OracleCatalog = std::map<std::pair<cm::PatternKind, cm::CodeList>, OraclePattern>;

inline OracleCatalog oracle_mine(const std::vector<const cm::Conversation*>& convs, const cm::MiningParams& p) {
  OracleCatalog all;
  for (const cm::Conversation* c : convs) {
    for (const auto& s : oracle_sequences(*c, static_cast<std::size_t>(p.max_seq_len))) {
      auto& e = all[{cm::PatternKind::sequence, s}];
      e.supporters.push_back(c->ref());
      e.score_sum += c->score;
    }
    for (const auto& s : oracle_sets(*c, static_cast<std::size_t>(p.max_set_size))) {
      auto& e = all[{cm::PatternKind::set, s}];
      e.supporters.push_back(c->ref());
      e.score_sum += c->score;
    }
  }
  OracleCatalog kept;
  for (auto& [k, v] : all) {
    if (v.supporters.size() < static_cast<std::size_t>(p.min_support)) continue;
    std::sort(v.supporters.begin(), v.supporters.end());
    kept.emplace(k, v);
  }
  return kept;
}

inline std::vector<const cm::Conversation*> all_conversations(const cm::Corpus& corpus) {
  std::vector<const cm::Conversation*> out;
  for (const auto& c : corpus.conversations()) out.push_back(&c);
  return out;
}

}  // namespace testsupport
