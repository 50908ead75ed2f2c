// Acceptance suite: one line per criterion, nonzero exit when any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "convominer/correlation.hpp"
#include "convominer/filter.hpp"
#include "convominer/fixture.hpp"
#include "convominer/irr.hpp"
#include "convominer/metrics.hpp"
#include "convominer/patterns.hpp"
#include "convominer/report.hpp"
#include "convominer/service.hpp"
#include "convominer/tree.hpp"
#include "support.hpp"

using namespace convominer;
namespace fs = std::filesystem;
using testsupport::Gen;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

struct Criterion {
  int number;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> run;
};

const Corpus& fixture() {
  static const Corpus f = generate_fixture();
  return f;
}

std::string text_with_distinct_counts(Gen& g) {
  // At least two words with different counts, so the distribution is not uniform.
  const auto& vocab = testsupport::small_vocab();
  std::string s;
  const std::size_t kinds = g.between(2, 6);
  std::vector<std::size_t> counts(kinds);
  for (auto& c : counts) c = g.between(1, 5);
  counts[0] = counts[1] + g.between(1, 3);
  for (std::size_t k = 0; k < kinds; ++k)
    for (std::size_t i = 0; i < counts[k]; ++i) s += vocab[k] + " ";
  return s;
}

std::vector<CodeList> path_of(const Conversation& c) {
  std::vector<CodeList> out;
  for (const auto& t : c.turns) out.push_back(t.code_set());
  return out;
}

// ---------------------------------------------------------------------------

Outcome ig_exactness() {
  Outcome o;
  std::vector<IgTurn> worked = {{"a a b", 1.0, 1.0}, {"c c", 1.0, 0.5}};
  const auto ig = information_gain(worked);
  o.expect(std::abs(ig[1] - 0.5 * std::log(2.5)) < 1e-9, "worked example IG2 != 0.5 ln 2.5");

  Gen g(101);
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<std::string> texts;
    std::vector<IgTurn> turns;
    const std::size_t n = g.between(1, 8);
    for (std::size_t i = 0; i < n; ++i) texts.push_back(g.text(testsupport::small_vocab(), 0, 15));
    for (std::size_t i = 0; i < n; ++i)
      turns.push_back({texts[i], g.unit(), std::array<double, 3>{0.0, 0.5, 1.0}[g.below(3)]});
    for (IgMode mode : {IgMode::inclusive, IgMode::exclusive_smoothed}) {
      const auto v = information_gain(turns, {mode, 1.0, {}});
      TokenDistribution cum;
      for (std::size_t t = 0; t < n; ++t) {
        if (turns[t].correctness == 0.0) o.expect(v[t] == 0.0, "IG != 0 with C = 0");
        o.expect(v[t] >= 0.0 && std::isfinite(v[t]), "IG negative or not finite");
        const auto toks = tokenize(texts[t]);
        cum.add(toks);
        if (mode == IgMode::inclusive && !toks.empty())
          o.expect(kl_divergence(TokenDistribution(toks), cum) >= 0.0, "KL < 0");
      }
    }
  }
  return o;
}

Outcome ig_modes() {
  Outcome o;
  Gen g(102);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<IgTurn> first = {{"", 1.0, 1.0}};
    const std::string a = g.text(testsupport::small_vocab(), 1, 12);
    first[0].response = a;
    first[0].relevance = g.unit();
    o.expect(information_gain(first)[0] == 0.0, "inclusive IG1 != 0");

    const std::string t = text_with_distinct_counts(g);
    std::vector<IgTurn> twice = {{t, 1.0, 1.0}, {t, 1.0, 1.0}};
    const auto v = information_gain(twice, {IgMode::exclusive_smoothed, 1.0, {}});
    o.expect(v[1] < v[0], "exclusive IG2 >= IG1 for \"" + t + "\"");
  }
  return o;
}

Outcome miner_oracle() {
  Outcome o;
  Gen g(103);
  for (int rep = 0; rep < 500; ++rep) {
    const Corpus c = testsupport::random_corpus(g, {8, 6, 3, {"A", "B", "C", "D", "G"}});
    const MiningParams p{static_cast<int>(g.between(1, 4)), static_cast<int>(g.between(1, 3)),
                         static_cast<int>(g.between(1, 3))};
    const auto convs = testsupport::all_conversations(c);
    const PatternCatalog cat = mine_patterns(convs, p);
    const auto oracle = testsupport::oracle_mine(convs, p);
    o.expect(cat.patterns.size() == oracle.size(), "catalog size differs from oracle");
    for (const Pattern& pat : cat.patterns) {
      auto it = oracle.find({pat.kind, pat.codes});
      if (it == oracle.end()) {
        o.expect(false, "pattern missing from oracle");
        continue;
      }
      o.expect(pat.supporters == it->second.supporters, "supporters differ");
      const double avg = it->second.score_sum / static_cast<double>(it->second.supporters.size());
      o.expect(std::abs(pat.avg_score - avg) < 1e-12, "avg score differs");
    }
  }
  return o;
}

Outcome anti_monotone() {
  Outcome o;
  const PatternCatalog cat = mine_patterns(testsupport::all_conversations(fixture()), {});
  std::size_t checked = 0;
  for (const Pattern& p : cat.patterns) {
    for (std::size_t drop = 0; p.length() > 1 && drop < p.length(); ++drop) {
      CodeList sub = p.codes;
      sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(drop));
      const Pattern* s = cat.find(p.kind, sub);
      o.expect(s != nullptr && s->support() >= p.support(), "sub-pattern support below pattern support");
      ++checked;
    }
  }
  o.expect(checked > 1000, "too few sub-pattern pairs checked");
  o.detail += o.ok ? std::to_string(cat.patterns.size()) + " patterns, " + std::to_string(checked) + " pairs" : "";
  return o;
}

Outcome tree_invariants() {
  Outcome o;
  Gen g(104);
  const auto all = testsupport::all_conversations(fixture());
  for (int rep = 0; rep < 500; ++rep) {
    std::vector<const Conversation*> sel;
    const double keep = 0.01 + 0.2 * g.unit();
    for (const Conversation* c : all)
      if (g.coin(keep)) sel.push_back(c);
    if (sel.empty()) sel.push_back(all[g.below(all.size())]);

    const InteractionTree t = build_tree(sel);
    o.expect(t.leaf_count() == sel.size() && t.total_conversations() == sel.size(), "leaf conservation");
    std::vector<std::size_t> leaves_below(t.nodes().size(), 0);
    for (std::size_t i = t.nodes().size(); i-- > 0;) {
      const TreeNode& n = t.nodes()[i];
      leaves_below[i] += n.leaves.size();
      if (n.parent >= 0) leaves_below[static_cast<std::size_t>(n.parent)] += leaves_below[i];
    }
    std::map<std::string, const Conversation*> by_key;
    for (const Conversation* c : sel) by_key[c->ref().key()] = c;
    for (const TreeNode& n : t.nodes()) {
      o.expect(n.conv_count == leaves_below[static_cast<std::size_t>(n.id)], "conv_count != subtree leaves");
      for (const LeafTag& l : n.leaves)
        o.expect(path_of(*by_key.at(l.key())) == t.path_codes(n.id), "path reconstruction");
    }
    auto shuffled = sel;
    std::shuffle(shuffled.begin(), shuffled.end(), g.engine());
    o.expect(serialize_tree(build_tree(shuffled)).dump() == serialize_tree(t).dump(), "order dependence");
    const InteractionTree p = prune_tree(t, g.between(1, 5));
    o.expect(p.leaf_count() + p.elided_count() == sel.size(), "pruned leaf conservation");
  }
  return o;
}

Outcome highlight_soundness() {
  Outcome o;
  Gen g(105);
  const auto all = testsupport::all_conversations(fixture());
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<const Conversation*> sel;
    const double keep = 0.02 + 0.3 * g.unit();
    for (const Conversation* c : all)
      if (g.coin(keep)) sel.push_back(c);
    if (sel.empty()) sel.push_back(all[g.below(all.size())]);
    const PatternCatalog cat = mine_patterns(sel, {4, 3, 1});
    const Pattern& p = cat.patterns[g.below(cat.patterns.size())];
    const Highlight h = highlight_paths(build_tree(sel), p.kind, p.codes);
    std::vector<std::string> expect;
    for (const Conversation* c : sel)
      if (match_pattern(p, *c)) expect.push_back(c->ref().key());
    std::sort(expect.begin(), expect.end());
    o.expect(h.leaves == expect, "highlighted leaves differ from matching conversations");
    std::vector<std::string> supporters;
    for (const auto& r : p.supporters) supporters.push_back(r.key());
    o.expect(h.leaves == supporters, "highlighted leaves differ from supporters");
  }
  return o;
}

Outcome statistics() {
  Outcome o;
  auto near = [](double a, double b) { return std::abs(a - b) < 1e-9; };
  o.expect(near(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}), 1.0), "pearson example");
  o.expect(near(kendall_tau_b(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}), -1.0), "kendall example");
  o.expect(near(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}), 0.8), "spearman example");
  o.expect(near(cohen_kappa({{20, 5}, {10, 15}}), 0.4), "kappa example");

  Gen g(106);
  std::vector<double> xs;
  for (int i = 0; i < 50; ++i) xs.push_back(g.unit());
  const auto self = correlation_suite(xs, xs);
  o.expect(near(self.pearson, 1) && near(self.spearman, 1) && near(self.kendall, 1), "self correlation != 1");

  // Labels: tertiles of the fixture's per-turn IG, then 10% of labels
  // replaced by a different level.
  std::vector<double> ig;
  for (const auto& c : fixture().conversations())
    for (const auto& t : c.turns) ig.push_back(t.information_gain);
  std::vector<double> sorted = ig;
  std::sort(sorted.begin(), sorted.end());
  const double q1 = sorted[sorted.size() / 3], q2 = sorted[2 * sorted.size() / 3];
  std::vector<double> labels;
  for (double v : ig) labels.push_back(v <= q1 ? 0.0 : (v <= q2 ? 0.5 : 1.0));
  const auto clean = correlation_suite(ig, labels);
  std::mt19937_64 noise(20240601);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (uniform_below(noise, 10) != 0) continue;
    const double others[3][2] = {{0.5, 1.0}, {0.0, 1.0}, {0.0, 0.5}};
    labels[i] = others[static_cast<int>(labels[i] * 2)][uniform_below(noise, 2)];
  }
  const auto r = correlation_suite(ig, labels);
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "synthetic n=%zu: pearson %.4f, spearman %.4f, kendall %.4f (p %.4g/%.4g/%.4g); "
                "without noise %.4f/%.4f/%.4f",
                ig.size(), r.pearson, r.spearman, r.kendall, r.pearson_p, r.spearman_p, r.kendall_p, clean.pearson,
                clean.spearman, clean.kendall);
  const bool ok = r.pearson > 0.9 && r.spearman > 0.9 && r.kendall > 0.9;
  if (o.ok) o.detail = buf;
  o.expect(ok, std::string("coefficient <= 0.9 on ") + buf);
  return o;
}

Outcome full_scale() {
  Outcome o;
  const Corpus& f = fixture();
  o.expect(f.students().size() == 48 && f.tasks().size() == 27 && f.conversations().size() == 744 &&
               f.turn_count() == 2507,
           "fixture shape");
  const fs::path dir = fs::temp_directory_path() / ("convominer_acc_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path corpus = dir / "fixture.json";
  std::ofstream(corpus) << dump_corpus(f);
  const Corpus reloaded = load_corpus_file(corpus.string());
  const auto doc = build_report(reloaded);
  o.expect(doc["task_trees"].size() == 27, "report lacks per-task trees");
  o.expect(doc["patterns"]["sequence"]["top"].size() == 20 && doc["patterns"]["set"]["top"].size() == 20,
           "report lacks top-20 patterns per kind");
#ifdef CONVO_MINER_CLI
  const fs::path out = dir / "report.json";
  const std::string cmd = std::string("\"") + CONVO_MINER_CLI + "\" report \"" + corpus.string() +
                          "\" --format json --out \"" + out.string() + "\"";
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = std::system(cmd.c_str());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.expect(rc == 0, "report CLI failed");
  o.expect(secs < 10.0, "report CLI took too long");
  std::ifstream in(out);
  const auto parsed = nlohmann::json::parse(in, nullptr, false);
  o.expect(!parsed.is_discarded() && parsed["overview"]["totals"]["turns"] == 2507, "report JSON does not parse");
  if (o.ok) o.detail = "CLI report " + std::to_string(secs).substr(0, 5) + " s";
#endif
  fs::remove_all(dir);
  return o;
}

std::pair<int, std::string> run_capture(const std::string& cmd) {
  std::string out;
  FILE* p = ::popen((cmd + " 2>&1").c_str(), "r");
  if (!p) return {-1, ""};
  char buf[512];
  while (std::fgets(buf, sizeof buf, p)) out += buf;
  const int status = ::pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Outcome service_contract() {
  Outcome o;
  const std::vector<ApiRequest> requests = {
      {"GET", "/api/overview", ""},
      {"POST", "/api/summary", R"({"mode":"student_grouping","group_by":"dv_experience"})"},
      {"POST", "/api/summary", R"({"mode":"task_grouping","criteria":{"difficulty_range":[3,5]}})"},
      {"POST", "/api/patterns", R"({"criteria":{"task_types":["chart_reading"]},"sort":{"key":"support","direction":"desc"}})"},
      {"POST", "/api/patterns", R"({"params":{"max_seq_len":3,"max_set_size":2,"min_support":5}})"},
      {"POST", "/api/tree", R"({"criteria":{"task_ids":["T3"]},"highlight_pattern":{"kind":"set","codes":["FQ"]}})"},
      {"POST", "/api/tree", R"({"criteria":{"score_range":[0.5,1]},"prune":3,"gain_scale":2})"},
      {"GET", "/api/conversation/" + fixture().conversations()[5].student + "/" + fixture().conversations()[5].task, ""},
      {"GET", "/api/conversation/nobody/T1", ""},
  };
  auto snapshot = std::make_shared<const Corpus>(fixture());
  std::vector<ApiResponse> serial;
  for (const auto& r : requests) {
    serial.push_back(handle_request(snapshot.get(), r));
    o.expect(handle_request(snapshot.get(), r).body == serial.back().body, "non-deterministic body for " + r.path);
  }
  o.expect(serial.back().status == 404, "unknown conversation not 404");
  o.expect(handle_request(nullptr, requests[0]).status == 503, "no corpus not 503");

  AnalyticsService svc(snapshot);
  HttpServer server(svc, {"127.0.0.1", 0, "*"});
  const int port = server.bind_any_port();
  o.expect(port > 0, "bind failed");
  std::thread th([&] { server.listen_after_bind(); });
  for (int i = 0; i < 200 && !server.running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));

  constexpr int kInFlight = 32;
  std::vector<std::future<std::pair<int, std::string>>> futures;
  for (int i = 0; i < kInFlight; ++i) {
    const ApiRequest& req = requests[static_cast<std::size_t>(i) % requests.size()];
    futures.push_back(std::async(std::launch::async, [&req, port] {
      httplib::Client cli("127.0.0.1", port);
      cli.set_read_timeout(15, 0);
      auto res = req.method == "GET" ? cli.Get(req.path) : cli.Post(req.path, req.body, "application/json");
      return res ? std::make_pair(res->status, res->body) : std::make_pair(-1, httplib::to_string(res.error()));
    }));
  }
  for (int i = 0; i < kInFlight; ++i) {
    const auto [status, body] = futures[static_cast<std::size_t>(i)].get();
    const ApiResponse& want = serial[static_cast<std::size_t>(i) % requests.size()];
    o.expect(status == want.status && body == want.body,
             "concurrent response " + std::to_string(i) + " differs from serial (status " + std::to_string(status) +
                 " vs " + std::to_string(want.status) + (status < 0 ? ", " + body : "") + ")");
  }
  server.stop();
  th.join();

#ifdef CONVO_MINER_CLI
  const fs::path dir = fs::temp_directory_path() / ("convominer_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path good = dir / "good.json", bad = dir / "bad.json";
  std::ofstream(good) << dump_corpus(fixture());
  auto doc = nlohmann::json::parse(dump_corpus(fixture()));
  doc["conversations"][0]["turns"][0]["codes"] = {"XX"};
  std::ofstream(bad) << doc.dump();
  const std::string cli = std::string("\"") + CONVO_MINER_CLI + "\"";
  const auto ok_run = run_capture(cli + " validate \"" + good.string() + "\"");
  o.expect(ok_run.first == 0, "validate on fixture did not exit 0");
  const auto bad_run = run_capture(cli + " validate \"" + bad.string() + "\"");
  o.expect(bad_run.first == 1, "validate on dangling code did not exit 1");
  o.expect(bad_run.second.find("\"XX\"") != std::string::npos, "validate message does not name the code");
  fs::remove_all(dir);
#else
  o.expect(false, "CLI not built");
#endif
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "IG exactness", 1.0, ig_exactness},
      {2, "IG mode properties", 1.0, ig_modes},
      {3, "pattern miner equals brute-force oracle", 30.0, miner_oracle},
      {4, "anti-monotonicity on the fixture", 5.0, anti_monotone},
      {5, "tree invariants", 10.0, tree_invariants},
      {6, "highlight soundness", 5.0, highlight_soundness},
      {7, "statistics", 10.0, statistics},
      {8, "full-scale end-to-end", 10.0, full_scale},
      {9, "service contract", 20.0, service_contract},
  };
  fixture();  // shared setup, not charged to any criterion
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = o.ok && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s criterion %d: %s (%.3f s, limit %.0f s)%s%s\n", pass ? "PASS" : "FAIL", c.number,
                c.name.c_str(), secs, c.limit_seconds, o.detail.empty() ? "" : " - ",
                in_time ? o.detail.c_str() : (o.detail + " [over time limit]").c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
