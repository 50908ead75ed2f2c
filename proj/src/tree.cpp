#include "convominer/tree.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace convominer {

std::size_t InteractionTree::leaf_count() const {
  return std::accumulate(nodes_.begin(), nodes_.end(), std::size_t{0},
                         [](std::size_t n, const TreeNode& t) { return n + t.leaves.size(); });
}

std::size_t InteractionTree::elided_count() const {
  return std::accumulate(nodes_.begin(), nodes_.end(), std::size_t{0},
                         [](std::size_t n, const TreeNode& t) { return n + t.elided; });
}

std::vector<CodeList> InteractionTree::path_codes(int id) const {
  std::vector<CodeList> path;
  for (int cur = id; cur > 0; cur = node(cur).parent) path.push_back(node(cur).code_set);
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

struct Draft {
  CodeList code_set;
  std::vector<double> igs;
  std::vector<double> rls;
  std::vector<LeafTag> leaves;
  std::map<CodeList, std::unique_ptr<Draft>> children;
  std::size_t conv_count = 0;
};

// Summation over sorted values keeps the means bit-identical for any input order.
double sorted_mean(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void emit(const Draft& d, int parent, int depth, std::vector<TreeNode>& out) {
  const int id = static_cast<int>(out.size());
  TreeNode n;
  n.id = id;
  n.parent = parent;
  n.depth = depth;
  n.code_set = d.code_set;
  n.conv_count = d.conv_count;
  if (depth > 0) n.edge = {sorted_mean(d.igs), sorted_mean(d.rls), d.igs.size()};
  n.leaves = d.leaves;
  std::sort(n.leaves.begin(), n.leaves.end(),
            [](const LeafTag& a, const LeafTag& b) { return a.key() < b.key(); });
  out.push_back(std::move(n));

  std::vector<const Draft*> kids;
  for (const auto& [key, child] : d.children) kids.push_back(child.get());
  std::stable_sort(kids.begin(), kids.end(), [](const Draft* a, const Draft* b) {
    if (a->conv_count != b->conv_count) return a->conv_count > b->conv_count;
    return a->code_set < b->code_set;
  });
  for (const Draft* k : kids) {
    out[static_cast<std::size_t>(id)].children.push_back(static_cast<int>(out.size()));
    emit(*k, id, depth + 1, out);
  }
}

}  // namespace

InteractionTree build_tree(std::span<const Conversation* const> conversations) {
  if (conversations.empty()) throw std::invalid_argument("build_tree: empty selection");
  Draft root;
  for (const Conversation* c : conversations) {
    if (c->turns.empty()) {
      throw std::invalid_argument("build_tree: conversation " + c->ref().key() + " has no turns");
    }
    Draft* cur = &root;
    ++root.conv_count;
    for (const Turn& t : c->turns) {
      CodeList key = t.code_set();
      auto& slot = cur->children[key];
      if (!slot) {
        slot = std::make_unique<Draft>();
        slot->code_set = std::move(key);
      }
      cur = slot.get();
      ++cur->conv_count;
      cur->igs.push_back(t.information_gain);
      cur->rls.push_back(static_cast<double>(t.response_length));
    }
    cur->leaves.push_back({c->student, c->task, c->score});
  }
  std::vector<TreeNode> nodes;
  emit(root, -1, 0, nodes);
  return InteractionTree(std::move(nodes), conversations.size());
}

namespace {

void copy_pruned(const InteractionTree& src, int id, int parent, std::size_t min_conv,
                 std::vector<TreeNode>& out) {
  TreeNode n = src.node(id);
  const int new_id = static_cast<int>(out.size());
  n.id = new_id;
  n.parent = parent;
  n.children.clear();
  out.push_back(n);
  for (int child : src.node(id).children) {
    const TreeNode& c = src.node(child);
    if (c.conv_count < min_conv) {
      out[static_cast<std::size_t>(new_id)].elided += c.conv_count;
      continue;
    }
    out[static_cast<std::size_t>(new_id)].children.push_back(static_cast<int>(out.size()));
    copy_pruned(src, child, new_id, min_conv, out);
  }
}

}  // namespace

InteractionTree prune_tree(const InteractionTree& tree, std::size_t min_conv) {
  if (min_conv < 1) throw std::invalid_argument("prune_tree: min_conv must be >= 1");
  if (tree.nodes().empty()) return tree;
  std::vector<TreeNode> nodes;
  copy_pruned(tree, 0, -1, min_conv, nodes);
  return InteractionTree(std::move(nodes), tree.total_conversations());
}

Highlight highlight_paths(const InteractionTree& tree, PatternKind kind, const CodeList& codes) {
  Highlight h;
  std::vector<bool> on_path(tree.nodes().size(), false);
  for (const TreeNode& n : tree.nodes()) {
    if (n.leaves.empty()) continue;
    const auto path = tree.path_codes(n.id);
    if (!match_pattern(kind, codes, path)) continue;
    for (const auto& leaf : n.leaves) h.leaves.push_back(leaf.key());
    for (int cur = n.id; cur >= 0 && !on_path[static_cast<std::size_t>(cur)]; cur = tree.node(cur).parent)
      on_path[static_cast<std::size_t>(cur)] = true;
  }
  for (std::size_t i = 0; i < on_path.size(); ++i) {
    if (!on_path[i]) continue;
    h.nodes.push_back(static_cast<int>(i));
    if (i > 0) h.edges.push_back(static_cast<int>(i));
  }
  std::sort(h.leaves.begin(), h.leaves.end());
  return h;
}

nlohmann::json serialize_tree(const InteractionTree& tree, const LayoutOptions& layout) {
  if (!(layout.gain_scale > 0.0)) throw std::invalid_argument("serialize_tree: gain_scale must be > 0");
  using nlohmann::json;
  double max_rl = 0.0;
  for (const TreeNode& n : tree.nodes())
    if (n.parent >= 0) max_rl = std::max(max_rl, n.edge.mean_rl);

  json nodes = json::array(), edges = json::array(), elided = json::array();
  for (const TreeNode& n : tree.nodes()) {
    json pie = json::object();
    for (const auto& code : n.code_set) pie[code] = 1.0 / static_cast<double>(n.code_set.size());
    json leaves = json::array();
    for (const auto& l : n.leaves) leaves.push_back({{"student", l.student_alias}, {"task", l.task_id}, {"score", l.score}});
    nodes.push_back({{"id", n.id},
                     {"depth", n.depth},
                     {"codes", n.code_set},
                     {"count", n.conv_count},
                     {"pie", std::move(pie)},
                     {"leaves", std::move(leaves)}});
    if (n.parent >= 0) {
      const double weight = max_rl > 0.0 ? n.edge.mean_rl / max_rl : 0.0;
      edges.push_back({{"from", n.parent},
                       {"to", n.id},
                       {"mean_ig", n.edge.mean_ig},
                       {"mean_rl", n.edge.mean_rl},
                       {"x_extent", layout.base_length + layout.gain_scale * n.edge.mean_ig},
                       {"width_weight", weight},
                       {"opacity_weight", weight},
                       {"member_count", n.edge.member_count}});
    }
    if (n.elided > 0) elided.push_back({{"parent", n.id}, {"count", n.elided}});
  }
  return {{"nodes", std::move(nodes)},
          {"edges", std::move(edges)},
          {"elided", std::move(elided)},
          {"total_conversations", tree.total_conversations()}};
}

nlohmann::json to_json(const Highlight& h) {
  return {{"nodes", h.nodes}, {"edges", h.edges}, {"leaves", h.leaves}};
}

}  // namespace convominer
