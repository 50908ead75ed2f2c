#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "convominer/corpus.hpp"
#include "convominer/filter.hpp"
#include "convominer/patterns.hpp"
#include "convominer/summary.hpp"

namespace convominer {

/// Malformed request documents (unknown keys, wrong types, bad enum values).
class RequestError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

FilterCriteria criteria_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FilterCriteria& c);

/// FNV-1a 64 over the canonical criteria document, as 16 hex digits.
std::string criteria_hash(const FilterCriteria& c);

MiningParams mining_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MiningParams& p);

PatternKind pattern_kind_from_string(const std::string& s);
PatternSortKey pattern_sort_key_from_string(const std::string& s);
MemberSortKey member_sort_key_from_string(const std::string& s);
SortDirection sort_direction_from_string(const std::string& s);
GroupingMode grouping_mode_from_string(const std::string& s);

/// {kind, codes, L, C, avg, supporters:[{student, task}]}
nlohmann::json to_json(const Pattern& p);
nlohmann::json to_json(const std::vector<Pattern>& rows);

nlohmann::json to_json(const CodeSchema& schema);
nlohmann::json to_json(const BackgroundDistributions& d);
nlohmann::json distribution_json(const CategoryDistribution& d);
nlohmann::json to_json(const MemberRow& r);
nlohmann::json to_json(const GroupSummary& g);

/// Full conversation payload: task description and turns with metrics.
nlohmann::json conversation_json(const Corpus& corpus, const Conversation& c);

/// Rounds every floating-point value to 6 significant digits in place.
void round_numbers(nlohmann::json& j);

}  // namespace convominer
