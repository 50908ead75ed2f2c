#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "convominer/corpus.hpp"

namespace convominer {

using Tokenizer = std::function<std::vector<std::string>(std::string_view)>;

/// Lowercased maximal alphanumeric runs. Bytes outside ASCII are kept as token
/// characters so UTF-8 words are not split apart.
std::vector<std::string> tokenize(std::string_view text);

/// Word counts of one or more responses.
class TokenDistribution {
 public:
  TokenDistribution() = default;
  explicit TokenDistribution(std::span<const std::string> tokens) { add(tokens); }

  void add(std::span<const std::string> tokens);
  void add(const TokenDistribution& other);

  std::size_t count(const std::string& token) const;
  std::size_t total() const noexcept { return total_; }
  bool empty() const noexcept { return total_ == 0; }
  double probability(const std::string& token) const;
  const std::map<std::string, std::size_t>& counts() const noexcept { return counts_; }

 private:
  std::map<std::string, std::size_t> counts_;
  std::size_t total_ = 0;
};

/// KL(P || Q) in nats, summed over tokens with P(i) > 0. Every token of P must
/// have Q(i) > 0.
double kl_divergence(const TokenDistribution& p, const TokenDistribution& q);

struct IgTurn {
  std::string_view response;
  double relevance = 0.0;
  double correctness = 0.0;
};

struct IgOptions {
  IgMode mode = IgMode::inclusive;
  double alpha = 1.0;  // exclusive mode only; must be > 0
  Tokenizer tokenizer;  // empty -> tokenize()
};

/// Information gain of every turn of one conversation:
///   IG_t = KL(P_t || Q_t) * R_t * C_t
/// where P_t is the word distribution of response t and Q_t the cumulative
/// distribution of the responses so far. Inclusive mode counts response t in
/// Q_t. Exclusive mode uses responses 1..t-1 with add-alpha smoothing over the
/// vocabulary of responses 1..t. Throws std::invalid_argument when alpha <= 0
/// in exclusive mode.
std::vector<double> information_gain(std::span<const IgTurn> turns, const IgOptions& options = {});

/// Cosine similarity of the term-frequency vectors of prompt and response.
/// 0 when either side has no tokens.
double relevance_fallback(std::string_view prompt, std::string_view response);

struct TurnMetrics {
  std::size_t response_length = 0;
  double relevance = 0.0;
  double correctness = 0.0;
  double information_gain = 0.0;
  bool relevance_is_fallback = false;
};

/// Computes all per-turn metrics of a conversation. Turns without an ingested
/// relevance get the fallback score and a flag.
std::vector<TurnMetrics> compute_turn_metrics(const std::vector<Turn>& turns,
                                              const IgOptions& options = {});

}  // namespace convominer
