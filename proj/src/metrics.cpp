#include "convominer/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace convominer {

namespace {

bool is_token_char(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

char ascii_lower(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (unsigned char c : text) {
    if (is_token_char(c)) {
      current.push_back(ascii_lower(c));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

void TokenDistribution::add(std::span<const std::string> tokens) {
  for (const auto& t : tokens) ++counts_[t];
  total_ += tokens.size();
}

void TokenDistribution::add(const TokenDistribution& other) {
  for (const auto& [t, n] : other.counts_) counts_[t] += n;
  total_ += other.total_;
}

std::size_t TokenDistribution::count(const std::string& token) const {
  auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

double TokenDistribution::probability(const std::string& token) const {
  if (total_ == 0) return 0.0;
  return static_cast<double>(count(token)) / static_cast<double>(total_);
}

double kl_divergence(const TokenDistribution& p, const TokenDistribution& q) {
  if (p.empty()) return 0.0;
  double sum = 0.0;
  const double p_total = static_cast<double>(p.total());
  const double q_total = static_cast<double>(q.total());
  for (const auto& [token, n] : p.counts()) {
    const std::size_t qn = q.count(token);
    if (qn == 0) throw std::domain_error("kl_divergence: Q(" + token + ") = 0");
    const double pi = static_cast<double>(n) / p_total;
    const double qi = static_cast<double>(qn) / q_total;
    sum += pi * std::log(pi / qi);
  }
  // Gibbs' inequality; rounding can leave a tiny negative residue.
  return std::max(0.0, sum);
}

namespace {

double smoothed_kl(const TokenDistribution& p, const TokenDistribution& history, double alpha) {
  // Vocabulary = tokens(1..t-1) ∪ tokens(t).
  std::size_t vocabulary = history.counts().size();
  for (const auto& [token, n] : p.counts()) {
    if (history.count(token) == 0) ++vocabulary;
  }
  const double denom =
      static_cast<double>(history.total()) + alpha * static_cast<double>(vocabulary);
  const double p_total = static_cast<double>(p.total());
  double sum = 0.0;
  for (const auto& [token, n] : p.counts()) {
    const double pi = static_cast<double>(n) / p_total;
    const double qi = (static_cast<double>(history.count(token)) + alpha) / denom;
    sum += pi * std::log(pi / qi);
  }
  return std::max(0.0, sum);
}

}  // namespace

std::vector<double> information_gain(std::span<const IgTurn> turns, const IgOptions& options) {
  if (options.mode == IgMode::exclusive_smoothed && !(options.alpha > 0.0)) {
    throw std::invalid_argument("information_gain: smoothing alpha must be > 0");
  }
  std::vector<double> out;
  out.reserve(turns.size());
  TokenDistribution cumulative;
  for (const auto& turn : turns) {
    const auto tokens = options.tokenizer ? options.tokenizer(turn.response) : tokenize(turn.response);
    const TokenDistribution current(tokens);
    double kl = 0.0;
    if (!current.empty()) {
      if (options.mode == IgMode::inclusive) {
        cumulative.add(current);
        kl = kl_divergence(current, cumulative);
      } else {
        kl = smoothed_kl(current, cumulative, options.alpha);
        cumulative.add(current);
      }
    }
    // Multiply C first so C = 0 yields an exact zero.
    const double ig = turn.correctness == 0.0 ? 0.0 : kl * turn.relevance * turn.correctness;
    out.push_back(ig);
  }
  return out;
}

double relevance_fallback(std::string_view prompt, std::string_view response) {
  const auto a = tokenize(prompt);
  const auto b = tokenize(response);
  if (a.empty() || b.empty()) return 0.0;
  const TokenDistribution pa(a), pb(b);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [t, n] : pa.counts()) {
    na += static_cast<double>(n) * static_cast<double>(n);
    dot += static_cast<double>(n) * static_cast<double>(pb.count(t));
  }
  for (const auto& [t, n] : pb.counts()) nb += static_cast<double>(n) * static_cast<double>(n);
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

std::vector<TurnMetrics> compute_turn_metrics(const std::vector<Turn>& turns,
                                              const IgOptions& options) {
  std::vector<TurnMetrics> out(turns.size());
  std::vector<IgTurn> ig_input;
  ig_input.reserve(turns.size());
  for (std::size_t i = 0; i < turns.size(); ++i) {
    const Turn& t = turns[i];
    TurnMetrics& m = out[i];
    m.response_length = options.tokenizer ? options.tokenizer(t.response_text).size()
                                          : tokenize(t.response_text).size();
    m.correctness = t.correctness;
    if (t.ingested_relevance) {
      m.relevance = *t.ingested_relevance;
    } else {
      m.relevance = relevance_fallback(t.prompt_text, t.response_text);
      m.relevance_is_fallback = true;
    }
    if (m.response_length == 0) m.relevance = 0.0;
    ig_input.push_back({t.response_text, m.relevance, m.correctness});
  }
  const auto ig = information_gain(ig_input, options);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].information_gain = ig[i];
  return out;
}

}  // namespace convominer
