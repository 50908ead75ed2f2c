#include "convominer/report.hpp"

#include <cstdio>
#include <sstream>

#include "convominer/filter.hpp"
#include "convominer/json_codec.hpp"
#include "convominer/summary.hpp"

namespace convominer {

using nlohmann::json;

nlohmann::json build_report(const Corpus& corpus, const ReportOptions& options) {
  const FilterCriteria everything;
  const Selection all = apply_filter(corpus, everything);
  const auto convs = selected_conversations(corpus, all);

  json report;
  report["overview"] = to_json(background_distributions(corpus, everything));
  report["overview"]["totals"] = {{"students", corpus.students().size()},
                                  {"tasks", corpus.tasks().size()},
                                  {"conversations", corpus.conversations().size()},
                                  {"turns", corpus.turn_count()}};

  double ig = 0.0, rl = 0.0;
  std::size_t fallback = 0, turns = 0;
  for (const Conversation* c : convs) {
    for (const Turn& t : c->turns) {
      ig += t.information_gain;
      rl += static_cast<double>(t.response_length);
      fallback += t.relevance_is_fallback ? 1 : 0;
      ++turns;
    }
  }
  report["metrics"] = {{"mean_information_gain", turns ? ig / static_cast<double>(turns) : 0.0},
                       {"mean_response_length", turns ? rl / static_cast<double>(turns) : 0.0},
                       {"fallback_relevance_turns", fallback},
                       {"ig_mode", corpus.options().ig_mode == IgMode::inclusive ? "inclusive" : "exclusive_smoothed"}};

  json patterns = json::object();
  if (!convs.empty()) {
    const PatternCatalog catalog = mine_patterns(convs, options.params);
    const auto ranked = sort_patterns(catalog, PatternSortKey::support, SortDirection::descending);
    for (PatternKind kind : {PatternKind::sequence, PatternKind::set}) {
      json rows = json::array();
      std::size_t total = 0;
      for (const Pattern& p : ranked) {
        if (p.kind != kind) continue;
        ++total;
        if (rows.size() < options.top_patterns) rows.push_back(to_json(p));
      }
      patterns[std::string(to_string(kind))] = {{"total", total}, {"top", std::move(rows)}};
    }
  }
  report["patterns"] = std::move(patterns);
  report["mining_params"] = to_json(options.params);

  json summaries = json::array();
  for (const Group& g : group_members(corpus, all, GroupingMode::task_grouping, "task_type")) {
    summaries.push_back(to_json(summarize_group(corpus, g, all, GroupingMode::task_grouping)));
  }
  report["task_type_summaries"] = std::move(summaries);

  json trees = json::object();
  for (const Task& task : corpus.tasks()) {
    FilterCriteria one;
    one.task_ids = std::set<std::string>{task.id};
    const auto task_convs = selected_conversations(corpus, apply_filter(corpus, one));
    if (task_convs.empty()) continue;
    trees[task.id] = serialize_tree(prune_tree(build_tree(task_convs), options.tree_prune), options.layout);
  }
  report["task_trees"] = std::move(trees);

  round_numbers(report);
  return report;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string codes_text(const json& row) {
  const bool seq = row["kind"] == "sequence";
  std::string s = seq ? "" : "{";
  bool first = true;
  for (const auto& c : row["codes"]) {
    if (!first) s += seq ? " → " : ", ";
    s += c.get<std::string>();
    first = false;
  }
  return seq ? s : s + "}";
}

}  // namespace

std::string render_markdown(const json& report) {
  std::ostringstream md;
  const json& totals = report["overview"]["totals"];
  md << "# Conversation pattern report\n\n";
  md << "| students | tasks | conversations | turns |\n|---|---|---|---|\n";
  md << "| " << totals["students"] << " | " << totals["tasks"] << " | " << totals["conversations"] << " | "
     << totals["turns"] << " |\n\n";

  const json& m = report["metrics"];
  md << "Mean information gain: " << fmt(m["mean_information_gain"].get<double>())
     << " (" << m["ig_mode"].get<std::string>() << ")  \n";
  md << "Mean response length: " << fmt(m["mean_response_length"].get<double>()) << " tokens  \n";
  md << "Turns with fallback relevance: " << m["fallback_relevance_turns"] << "\n\n";

  for (const auto& [kind, block] : report["patterns"].items()) {
    md << "## Top " << kind << " patterns (" << block["total"] << " mined)\n\n";
    md << "| L | Pattern | C | Avg. |\n|---|---|---|---|\n";
    for (const auto& row : block["top"]) {
      md << "| " << row["L"] << " | " << codes_text(row) << " | " << row["C"] << " | "
         << fmt(row["avg"].get<double>()) << " |\n";
    }
    md << "\n";
  }

  md << "## Task types\n\n| type | tasks | conversations | mean IG | mean RL | mean score |\n|---|---|---|---|---|---|\n";
  for (const auto& g : report["task_type_summaries"]) {
    md << "| " << g["key"].get<std::string>() << " | " << g["members"].size() << " | " << g["conversations"] << " | "
       << fmt(g["mean_ig"].get<double>()) << " | " << fmt(g["mean_rl"].get<double>()) << " | "
       << fmt(g["mean_score"].get<double>()) << " |\n";
  }

  md << "\n## Interaction trees\n\n| task | nodes | conversations |\n|---|---|---|\n";
  for (const auto& [task, tree] : report["task_trees"].items()) {
    md << "| " << task << " | " << tree["nodes"].size() << " | " << tree["total_conversations"] << " |\n";
  }
  return md.str();
}

}  // namespace convominer
