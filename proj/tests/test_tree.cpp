#include <doctest.h>

#include <map>

#include "convominer/tree.hpp"
#include "support.hpp"

using namespace convominer;

namespace {

Conversation raw(const std::string& student, const std::vector<std::vector<std::string>>& codes, double score = 1.0,
                 std::vector<double> igs = {}, std::vector<std::size_t> lengths = {}) {
  Conversation c;
  c.student = student;
  c.task = "t";
  c.score = score;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    Turn t;
    t.index = i;
    t.codes = codes[i];
    t.information_gain = i < igs.size() ? igs[i] : 0.0;
    t.response_length = i < lengths.size() ? lengths[i] : 0;
    c.turns.push_back(t);
  }
  return c;
}

std::vector<const Conversation*> ptrs(const std::vector<Conversation>& v) {
  std::vector<const Conversation*> out;
  for (const auto& c : v) out.push_back(&c);
  return out;
}

std::size_t subtree_leaves(const InteractionTree& t, int id) {
  const TreeNode& n = t.node(id);
  std::size_t k = n.leaves.size();
  for (int c : n.children) k += subtree_leaves(t, c);
  return k;
}

std::vector<CodeList> path_of(const Conversation& c) {
  std::vector<CodeList> out;
  for (const auto& t : c.turns) out.push_back(t.code_set());
  return out;
}

// Every non-empty path prefix with the number of conversations sharing it.
std::map<std::vector<CodeList>, std::size_t> prefix_oracle(const std::vector<const Conversation*>& convs) {
  std::map<std::vector<CodeList>, std::size_t> out;
  for (const Conversation* c : convs) {
    std::vector<CodeList> prefix;
    for (const auto& s : path_of(*c)) {
      prefix.push_back(s);
      ++out[prefix];
    }
  }
  return out;
}

void check_tree_invariants(const InteractionTree& tree, const std::vector<const Conversation*>& convs) {
  CHECK(tree.total_conversations() == convs.size());
  CHECK(tree.leaf_count() == convs.size());
  CHECK(tree.root().conv_count == convs.size());
  CHECK(tree.root().code_set.empty());
  const auto oracle = prefix_oracle(convs);
  CHECK(tree.nodes().size() == oracle.size() + 1);
  std::map<std::string, const Conversation*> by_key;
  for (const Conversation* c : convs) by_key[c->ref().key()] = c;
  for (const TreeNode& n : tree.nodes()) {
    CHECK(n.id == static_cast<int>(&n - tree.nodes().data()));
    CHECK(n.conv_count == subtree_leaves(tree, n.id));
    std::size_t sum = n.leaves.size();
    std::set<CodeList> sibling_sets;
    for (int c : n.children) {
      sum += tree.node(c).conv_count;
      CHECK(tree.node(c).parent == n.id);
      CHECK(tree.node(c).depth == n.depth + 1);
      CHECK(sibling_sets.insert(tree.node(c).code_set).second);
    }
    CHECK(n.conv_count == sum);
    if (n.id == 0) continue;
    const auto path = tree.path_codes(n.id);
    REQUIRE(oracle.count(path) == 1);
    CHECK(oracle.at(path) == n.conv_count);
    for (const LeafTag& leaf : n.leaves) {
      const Conversation* c = by_key.at(leaf.key());
      CHECK(path_of(*c) == path);
      CHECK(leaf.score == c->score);
    }
  }
}

}  // namespace

TEST_CASE("two paths sharing a first round") {
  const std::vector<Conversation> convs = {raw("s1", {{"A"}, {"B"}}), raw("s2", {{"A"}, {"C"}})};
  const InteractionTree t = build_tree(ptrs(convs));
  REQUIRE(t.root().children.size() == 1);
  const TreeNode& a = t.node(t.root().children[0]);
  CHECK(a.code_set == CodeList{"A"});
  CHECK(a.conv_count == 2);
  REQUIRE(a.children.size() == 2);
  CHECK(t.node(a.children[0]).code_set == CodeList{"B"});
  CHECK(t.node(a.children[1]).code_set == CodeList{"C"});
  CHECK(t.node(a.children[0]).conv_count == 1);
  CHECK(t.node(a.children[1]).conv_count == 1);
}

TEST_CASE("single conversation makes a single path") {
  const std::vector<Conversation> convs = {raw("s1", {{"A"}, {"B", "A"}, {"C"}}, 0.7)};
  const InteractionTree t = build_tree(ptrs(convs));
  CHECK(t.nodes().size() == 4);
  const TreeNode& last = t.nodes().back();
  REQUIRE(last.leaves.size() == 1);
  CHECK(last.leaves[0].score == 0.7);
  CHECK(last.leaves[0].key() == "s1/t");
  CHECK(t.path_codes(last.id) == std::vector<CodeList>{{"A"}, {"A", "B"}, {"C"}});
}

TEST_CASE("edge means over merged members") {
  const std::vector<Conversation> convs = {raw("s1", {{"A"}}, 1, {0.4}, {10}), raw("s2", {{"A"}}, 1, {0.6}, {30})};
  const InteractionTree t = build_tree(ptrs(convs));
  const TreeNode& a = t.node(1);
  CHECK(a.edge.mean_ig == doctest::Approx(0.5));
  CHECK(a.edge.mean_rl == doctest::Approx(20.0));
  CHECK(a.edge.member_count == 2);
}

TEST_CASE("children ordered by count then code set") {
  const std::vector<Conversation> convs = {raw("s1", {{"C"}}), raw("s2", {{"B"}}), raw("s3", {{"B"}}),
                                           raw("s4", {{"A"}})};
  const InteractionTree t = build_tree(ptrs(convs));
  std::vector<CodeList> order;
  for (int c : t.root().children) order.push_back(t.node(c).code_set);
  CHECK(order == std::vector<CodeList>{{"B"}, {"A"}, {"C"}});
}

TEST_CASE("build errors") {
  CHECK_THROWS_AS(build_tree(std::vector<const Conversation*>{}), std::invalid_argument);
  const std::vector<Conversation> empty = {raw("s", {})};
  CHECK_THROWS_AS(build_tree(ptrs(empty)), std::invalid_argument);
}

TEST_CASE("pruning") {
  std::vector<Conversation> convs;
  int k = 0;
  for (auto [code, n] : std::vector<std::pair<std::string, int>>{{"A", 5}, {"B", 3}, {"C", 1}, {"D", 1}})
    for (int i = 0; i < n; ++i) convs.push_back(raw("s" + std::to_string(k++), {{code}}));
  const InteractionTree t = build_tree(ptrs(convs));
  CHECK(prune_tree(t, 1) == t);
  const InteractionTree p = prune_tree(t, 2);
  CHECK(p.root().children.size() == 2);
  CHECK(p.root().elided == 2);
  CHECK(p.elided_count() == 2);
  CHECK(p.leaf_count() + p.elided_count() == convs.size());
  CHECK(p.root().conv_count == convs.size());
  CHECK_THROWS_AS(prune_tree(t, 0), std::invalid_argument);

  const std::vector<Conversation> two = {raw("x", {{"A"}, {"B"}}), raw("y", {{"A"}, {"C"}}),
                                         raw("z", {{"A"}, {"C"}})};
  const InteractionTree q = prune_tree(build_tree(ptrs(two)), 2);
  const TreeNode& a = q.node(1);
  CHECK(a.elided == 1);
  CHECK(a.children.size() == 1);
  for (const TreeNode& n : q.nodes()) CHECK(n.id == static_cast<int>(&n - q.nodes().data()));
}

TEST_CASE("highlight examples") {
  const std::vector<Conversation> convs = {raw("s1", {{"DI"}, {"FQ"}}), raw("s2", {{"DI"}, {"FQ"}, {"A"}}),
                                           raw("s3", {{"B"}})};
  const InteractionTree t = build_tree(ptrs(convs));
  CHECK(highlight_paths(t, PatternKind::set, {"ZZ"}).empty());
  CHECK(highlight_paths(t, PatternKind::set, {"ZZ"}).nodes.empty());

  const Highlight b = highlight_paths(t, PatternKind::set, {"B"});
  CHECK(b.leaves == std::vector<std::string>{"s3/t"});
  CHECK(b.nodes.size() == 2);
  CHECK(b.edges.size() == 1);

  const Highlight fq = highlight_paths(t, PatternKind::sequence, {"DI", "FQ"});
  CHECK(fq.leaves == std::vector<std::string>{"s1/t", "s2/t"});
  // root, DI, FQ, A: shared prefix nodes appear once.
  CHECK(fq.nodes.size() == 4);
  CHECK(fq.edges.size() == 3);
  CHECK(std::is_sorted(fq.nodes.begin(), fq.nodes.end()));
}

TEST_CASE("serialization") {
  const std::vector<Conversation> convs = {raw("s1", {{"A", "B"}, {"C"}}, 0.5, {0.0, 0.8}, {10, 40}),
                                           raw("s2", {{"A", "B"}}, 1.0, {0.0}, {20})};
  const InteractionTree t = build_tree(ptrs(convs));
  const auto doc = serialize_tree(t, {2.0, 3.0});
  CHECK(doc["total_conversations"] == 2);
  CHECK(doc["nodes"].size() == 3);
  CHECK(doc["nodes"][1]["pie"] == nlohmann::json({{"A", 0.5}, {"B", 0.5}}));
  CHECK(doc["nodes"][1]["count"] == 2);
  const auto& edges = doc["edges"];
  REQUIRE(edges.size() == 2);
  CHECK(edges[0]["x_extent"].get<double>() == doctest::Approx(2.0));  // mean_ig 0
  CHECK(edges[1]["x_extent"].get<double>() == doctest::Approx(2.0 + 3.0 * 0.8));
  CHECK(edges[1]["width_weight"].get<double>() == 1.0);
  CHECK(edges[1]["opacity_weight"].get<double>() == 1.0);
  CHECK(edges[0]["width_weight"].get<double>() == doctest::Approx(15.0 / 40.0));
  CHECK_THROWS_AS(serialize_tree(t, {1.0, 0.0}), std::invalid_argument);
  // Lossless: the weights and counts survive a text round trip.
  CHECK(nlohmann::json::parse(doc.dump()) == doc);
  const auto pruned = serialize_tree(prune_tree(t, 2));
  CHECK(pruned["elided"] == nlohmann::json::array({{{"parent", 1}, {"count", 1}}}));
}

TEST_CASE("property: tree invariants on random corpora") {
  testsupport::Gen g(71);
  for (int rep = 0; rep < 200; ++rep) {
    const Corpus c = testsupport::random_corpus(g, {10, 5, 2, {"A", "B", "C"}});
    auto convs = testsupport::all_conversations(c);
    const InteractionTree t = build_tree(convs);
    check_tree_invariants(t, convs);
    std::shuffle(convs.begin(), convs.end(), g.engine());
    CHECK(build_tree(convs) == t);
    CHECK(serialize_tree(build_tree(convs)).dump() == serialize_tree(t).dump());
    const std::size_t min_conv = g.between(1, 4);
    const InteractionTree p = prune_tree(t, min_conv);
    CHECK(p.leaf_count() + p.elided_count() == convs.size());
    for (const TreeNode& n : p.nodes()) {
      if (n.id != 0) CHECK(n.conv_count >= min_conv);
      std::size_t sum = n.leaves.size() + n.elided;
      for (int ch : n.children) sum += p.node(ch).conv_count;
      CHECK(sum == n.conv_count);
    }
  }
}

TEST_CASE("property: highlighted leaves are the matching conversations") {
  testsupport::Gen g(72);
  const std::vector<std::string> pool = {"A", "B", "C", "D"};
  for (int rep = 0; rep < 200; ++rep) {
    const Corpus c = testsupport::random_corpus(g, {8, 5, 2, pool});
    const auto convs = testsupport::all_conversations(c);
    const InteractionTree t = build_tree(convs);
    const PatternKind kind = g.coin() ? PatternKind::sequence : PatternKind::set;
    CodeList codes;
    for (std::size_t i = 0, n = g.between(1, 3); i < n; ++i) codes.push_back(g.pick(pool));
    if (kind == PatternKind::set) {
      std::sort(codes.begin(), codes.end());
      codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    }
    const Highlight h = highlight_paths(t, kind, codes);
    std::vector<std::string> expect;
    for (const Conversation* conv : convs)
      if (match_pattern(kind, codes, path_of(*conv))) expect.push_back(conv->ref().key());
    std::sort(expect.begin(), expect.end());
    CHECK(h.leaves == expect);
    // Nodes are exactly the union of highlighted root-to-leaf paths.
    std::set<int> path_nodes;
    for (const TreeNode& n : t.nodes()) {
      bool hit = false;
      for (const auto& l : n.leaves) hit |= std::binary_search(expect.begin(), expect.end(), l.key());
      for (int cur = hit ? n.id : -1; cur >= 0; cur = t.node(cur).parent) path_nodes.insert(cur);
    }
    CHECK(std::vector<int>(path_nodes.begin(), path_nodes.end()) == h.nodes);
  }
}
