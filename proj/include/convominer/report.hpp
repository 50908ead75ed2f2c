#pragma once

#include <string>

#include <json.hpp>

#include "convominer/corpus.hpp"
#include "convominer/patterns.hpp"
#include "convominer/tree.hpp"

namespace convominer {

struct ReportOptions {
  MiningParams params;
  std::size_t top_patterns = 20;
  LayoutOptions layout;
  std::size_t tree_prune = 1;
};

/// Overview histograms, corpus-level metric totals, the top patterns of each
/// kind by support, per-task-type summaries and one interaction tree per task.
nlohmann::json build_report(const Corpus& corpus, const ReportOptions& options = {});

std::string render_markdown(const nlohmann::json& report);

}  // namespace convominer
