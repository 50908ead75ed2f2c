#include "convominer/json_codec.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

namespace convominer {

using nlohmann::json;

namespace {

template <typename T, typename Parse>
std::set<T> enum_set(const json& v, const std::string& field, Parse parse) {
  if (!v.is_array()) throw RequestError("criteria." + field + ": expected an array");
  std::set<T> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw RequestError("criteria." + field + ": expected strings");
    auto parsed = parse(e.template get<std::string>());
    if (!parsed) throw RequestError("criteria." + field + ": unknown value \"" + e.template get<std::string>() + "\"");
    out.insert(*parsed);
  }
  return out;
}

std::set<std::string> string_set(const json& v, const std::string& field) {
  return enum_set<std::string>(v, field, [](const std::string& s) { return std::optional<std::string>(s); });
}

Interval interval(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw RequestError("criteria." + field + ": expected [lo, hi]");
  }
  try {
    return Interval(v[0].get<double>(), v[1].get<double>());
  } catch (const std::invalid_argument& e) {
    throw RequestError("criteria." + field + ": " + e.what());
  }
}

template <typename T>
json names(const std::set<T>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(to_string(v));
  return out;
}

json range(const Interval& i) { return json::array({i.lo(), i.hi()}); }

}  // namespace

FilterCriteria criteria_from_json(const json& j) {
  FilterCriteria c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw RequestError("criteria: expected an object");
  for (const auto& [key, v] : j.items()) {
    if (v.is_null()) continue;
    if (key == "task_ids") c.task_ids = string_set(v, key);
    else if (key == "student_aliases") c.student_aliases = string_set(v, key);
    else if (key == "task_types") c.task_types = string_set(v, key);
    else if (key == "difficulty_range") c.difficulty_range = interval(v, key);
    else if (key == "score_range") c.score_range = interval(v, key);
    else if (key == "task_score_range") c.task_score_range = interval(v, key);
    else if (key == "cognitive_levels") c.cognitive_levels = enum_set<BloomLevel>(v, key, parse_bloom);
    else if (key == "dv_experience") c.dv_experience = enum_set<Experience>(v, key, parse_experience);
    else if (key == "cs_background") c.cs_background = enum_set<Experience>(v, key, parse_experience);
    else if (key == "gpt_familiarity") c.gpt_familiarity = enum_set<Experience>(v, key, parse_experience);
    else throw RequestError("criteria: unknown key \"" + key + "\"");
  }
  return c;
}

json to_json(const FilterCriteria& c) {
  json j = json::object();
  if (c.task_ids) j["task_ids"] = *c.task_ids;
  if (c.student_aliases) j["student_aliases"] = *c.student_aliases;
  if (c.task_types) j["task_types"] = *c.task_types;
  if (c.difficulty_range) j["difficulty_range"] = range(*c.difficulty_range);
  if (c.score_range) j["score_range"] = range(*c.score_range);
  if (c.task_score_range) j["task_score_range"] = range(*c.task_score_range);
  if (c.cognitive_levels) j["cognitive_levels"] = names(*c.cognitive_levels);
  if (c.dv_experience) j["dv_experience"] = names(*c.dv_experience);
  if (c.cs_background) j["cs_background"] = names(*c.cs_background);
  if (c.gpt_familiarity) j["gpt_familiarity"] = names(*c.gpt_familiarity);
  return j;
}

std::string criteria_hash(const FilterCriteria& c) {
  const std::string canonical = to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

MiningParams mining_params_from_json(const json& j) {
  MiningParams p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw RequestError("params: expected an object");
  for (const auto& [key, v] : j.items()) {
    if (!v.is_number_integer()) throw RequestError("params." + key + ": expected an integer");
    if (key == "max_seq_len") p.max_seq_len = v.get<int>();
    else if (key == "max_set_size") p.max_set_size = v.get<int>();
    else if (key == "min_support") p.min_support = v.get<int>();
    else throw RequestError("params: unknown key \"" + key + "\"");
  }
  try {
    p.check();
  } catch (const std::invalid_argument& e) {
    throw RequestError(e.what());
  }
  return p;
}

json to_json(const MiningParams& p) {
  return {{"max_seq_len", p.max_seq_len}, {"max_set_size", p.max_set_size}, {"min_support", p.min_support}};
}

PatternKind pattern_kind_from_string(const std::string& s) {
  if (s == "sequence") return PatternKind::sequence;
  if (s == "set") return PatternKind::set;
  throw RequestError("unknown pattern kind \"" + s + "\"");
}

PatternSortKey pattern_sort_key_from_string(const std::string& s) {
  if (s == "length" || s == "L") return PatternSortKey::length;
  if (s == "support" || s == "C") return PatternSortKey::support;
  if (s == "avg_score" || s == "avg") return PatternSortKey::avg_score;
  throw RequestError("unknown pattern sort key \"" + s + "\"");
}

MemberSortKey member_sort_key_from_string(const std::string& s) {
  if (s == "mean_score") return MemberSortKey::mean_score;
  if (s == "mean_ig") return MemberSortKey::mean_ig;
  if (s == "mean_rl") return MemberSortKey::mean_rl;
  throw RequestError("unknown member sort key \"" + s + "\"");
}

SortDirection sort_direction_from_string(const std::string& s) {
  if (s == "asc" || s == "ascending") return SortDirection::ascending;
  if (s == "desc" || s == "descending") return SortDirection::descending;
  throw RequestError("unknown sort direction \"" + s + "\"");
}

GroupingMode grouping_mode_from_string(const std::string& s) {
  if (s == "student_grouping" || s == "student") return GroupingMode::student_grouping;
  if (s == "task_grouping" || s == "task") return GroupingMode::task_grouping;
  throw RequestError("unknown grouping mode \"" + s + "\"");
}

json to_json(const Pattern& p) {
  json supporters = json::array();
  for (const auto& r : p.supporters) supporters.push_back({{"student", r.student}, {"task", r.task}});
  return {{"kind", to_string(p.kind)},
          {"codes", p.codes},
          {"L", p.length()},
          {"C", p.support()},
          {"avg", p.avg_score},
          {"supporters", std::move(supporters)}};
}

json to_json(const std::vector<Pattern>& rows) {
  json out = json::array();
  for (const auto& p : rows) out.push_back(to_json(p));
  return out;
}

json to_json(const CodeSchema& schema) {
  json out = json::array();
  for (const auto& c : schema.codes()) {
    json e = {{"id", c.id}, {"label", c.label}, {"abbr", c.abbreviation}, {"category", to_string(c.category)}};
    if (c.bloom_level) e["bloom"] = to_string(*c.bloom_level);
    out.push_back(std::move(e));
  }
  return out;
}

json to_json(const BackgroundDistributions& d) {
  json difficulty = json::object();
  for (std::size_t i = 0; i < d.task_difficulty.size(); ++i) difficulty[std::to_string(i + 1)] = d.task_difficulty[i];
  auto levels = [](const std::array<std::size_t, 3>& a) {
    json o = json::object();
    for (auto e : kExperienceLevels) o[std::string(to_string(e))] = a[static_cast<std::size_t>(e)];
    return o;
  };
  return {{"tasks",
           {{"count", d.selected_tasks},
            {"difficulty", std::move(difficulty)},
            {"types", d.task_types},
            {"score_density", d.task_score_density}}},
          {"students",
           {{"count", d.selected_students},
            {"dv_experience", levels(d.dv_experience)},
            {"cs_background", levels(d.cs_background)},
            {"gpt_familiarity", levels(d.gpt_familiarity)},
            {"score_density", d.student_score_density}}}};
}

json distribution_json(const CategoryDistribution& d) {
  json o = json::object();
  for (std::size_t i = 0; i < d.size(); ++i) o[std::string(prompt_category_name(i))] = d[i];
  return o;
}

json to_json(const MemberRow& r) {
  return {{"member", r.member},
          {"distribution", distribution_json(r.category_distribution)},
          {"mean_ig", r.mean_ig},
          {"mean_rl", r.mean_rl},
          {"mean_score", r.mean_score},
          {"conversations", r.conversations},
          {"turns", r.turns}};
}

json to_json(const GroupSummary& g) {
  json rows = json::array();
  for (const auto& r : g.rows) rows.push_back(to_json(r));
  return {{"key", g.group_key},
          {"mode", to_string(g.mode)},
          {"members", g.members},
          {"distribution", distribution_json(g.category_distribution)},
          {"mean_ig", g.mean_ig},
          {"mean_rl", g.mean_rl},
          {"mean_score", g.mean_score},
          {"conversations", g.conversations},
          {"turns", g.turns},
          {"rows", std::move(rows)}};
}

json conversation_json(const Corpus& corpus, const Conversation& c) {
  const Task* task = corpus.find_task(c.task);
  json turns = json::array();
  for (const Turn& t : c.turns) {
    turns.push_back({{"index", t.index},
                     {"prompt", t.prompt_text},
                     {"response", t.response_text},
                     {"codes", t.codes},
                     {"relevance", t.relevance},
                     {"relevance_fallback", t.relevance_is_fallback},
                     {"correctness", t.correctness},
                     {"response_length", t.response_length},
                     {"information_gain", t.information_gain}});
  }
  return {{"student", c.student},
          {"task", {{"id", task->id},
                    {"type", task->task_type},
                    {"cognitive_level", to_string(task->cognitive_level)},
                    {"difficulty", task->difficulty},
                    {"description", task->description}}},
          {"score", c.score},
          {"turns", std::move(turns)}};
}

void round_numbers(json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) return;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    double r = std::strtod(buf, nullptr);
    if (r == 0.0) r = 0.0;  // drop negative zero
    j = r;
  } else if (j.is_structured()) {
    for (auto& child : j) round_numbers(child);
  }
}

}  // namespace convominer
