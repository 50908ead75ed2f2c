#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "convominer/corpus.hpp"
#include "convominer/patterns.hpp"

namespace convominer {

/// Aggregated responses along the link into a node.
struct TreeEdge {
  double mean_ig = 0.0;
  double mean_rl = 0.0;
  std::size_t member_count = 0;

  bool operator==(const TreeEdge&) const = default;
};

struct LeafTag {
  std::string student_alias;
  std::string task_id;
  double score = 0.0;

  std::string key() const { return student_alias + "/" + task_id; }
  bool operator==(const LeafTag&) const = default;
};

struct TreeNode {
  int id = 0;
  int parent = -1;  // -1 for the root
  int depth = 0;    // turn round; the root is depth 0
  CodeList code_set;
  /// Conversations passing through this node. Equals Σ children conv_count +
  /// |leaves| + elided.
  std::size_t conv_count = 0;
  TreeEdge edge;  // incoming edge; unused on the root
  std::vector<int> children;
  std::vector<LeafTag> leaves;  // conversations ending at this node, by key
  std::size_t elided = 0;       // conversations in pruned child subtrees

  bool operator==(const TreeNode&) const = default;
};

/// Prefix tree of turn code sets. Nodes are stored in preorder with the root at
/// index 0, so node ids are vector positions.
class InteractionTree {
 public:
  InteractionTree() = default;
  InteractionTree(std::vector<TreeNode> nodes, std::size_t total_conversations)
      : nodes_(std::move(nodes)), total_conversations_(total_conversations) {}

  const TreeNode& root() const { return nodes_.front(); }
  const TreeNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t total_conversations() const noexcept { return total_conversations_; }

  std::size_t leaf_count() const;
  std::size_t elided_count() const;
  /// Code sets from the root's child down to `id`.
  std::vector<CodeList> path_codes(int id) const;

  bool operator==(const InteractionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t total_conversations_ = 0;
};

/// Merges turns whose code sets are equal under the same parent. Children are
/// ordered by descending conv_count, then code set; the result does not depend
/// on input order. Throws std::invalid_argument on an empty selection or a
/// conversation without turns.
InteractionTree build_tree(std::span<const Conversation* const> conversations);

/// Drops every subtree whose conv_count < min_conv and books its conversations
/// on the parent's elided counter. min_conv = 1 is the identity.
InteractionTree prune_tree(const InteractionTree& tree, std::size_t min_conv);

struct Highlight {
  std::vector<int> nodes;           // ascending
  std::vector<int> edges;           // identified by their target node id
  std::vector<std::string> leaves;  // leaf keys "student/task", ascending

  bool empty() const noexcept { return leaves.empty(); }
  bool operator==(const Highlight&) const = default;
};

/// Union of the root-to-leaf paths of leaves whose conversation matches the
/// pattern. Matching replays the path code sets, which equal the turn code
/// sets of the tagged conversation.
Highlight highlight_paths(const InteractionTree& tree, PatternKind kind, const CodeList& codes);

struct LayoutOptions {
  double base_length = 1.0;
  double gain_scale = 1.0;
};

/// {nodes, edges, elided, total_conversations}. Edge x_extent = base_length +
/// gain_scale * mean_ig; width and opacity weights are mean_rl divided by the
/// tree's largest mean_rl. Throws std::invalid_argument unless gain_scale > 0.
nlohmann::json serialize_tree(const InteractionTree& tree, const LayoutOptions& layout = {});

nlohmann::json to_json(const Highlight& h);

}  // namespace convominer
