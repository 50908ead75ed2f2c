#include "convominer/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "convominer/metrics.hpp"

namespace convominer {

using nlohmann::json;

std::string_view to_string(CodeCategory c) {
  switch (c) {
    case CodeCategory::learning: return "learning";
    case CodeCategory::chatgpt_effective: return "chatgpt_effective";
    case CodeCategory::chatgpt_other: return "chatgpt_other";
  }
  return "?";
}

std::string_view to_string(BloomLevel b) {
  switch (b) {
    case BloomLevel::remember: return "remember";
    case BloomLevel::understand: return "understand";
    case BloomLevel::apply: return "apply";
    case BloomLevel::analyze: return "analyze";
    case BloomLevel::evaluate: return "evaluate";
    case BloomLevel::create: return "create";
  }
  return "?";
}

std::string_view to_string(Experience e) {
  switch (e) {
    case Experience::none: return "none";
    case Experience::some: return "some";
    case Experience::experienced: return "experienced";
  }
  return "?";
}

std::optional<CodeCategory> parse_category(std::string_view s) {
  for (auto c : {CodeCategory::learning, CodeCategory::chatgpt_effective, CodeCategory::chatgpt_other})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::optional<BloomLevel> parse_bloom(std::string_view s) {
  for (auto b : kBloomLevels)
    if (to_string(b) == s) return b;
  return std::nullopt;
}

std::optional<Experience> parse_experience(std::string_view s) {
  for (auto e : kExperienceLevels)
    if (to_string(e) == s) return e;
  return std::nullopt;
}

namespace {

std::string join_findings(const std::vector<std::string>& findings) {
  std::string msg = "corpus validation failed";
  for (const auto& f : findings) msg += "\n  " + f;
  return msg;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> findings)
    : std::runtime_error(join_findings(findings)), findings_(std::move(findings)) {}

// ---------------------------------------------------------------------------
// CodeSchema

CodeSchema::CodeSchema(std::vector<CodeDefinition> codes) : codes_(std::move(codes)) {
  std::vector<std::string> findings;
  if (codes_.empty()) findings.emplace_back("schema: code list is empty");
  std::set<std::string> abbreviations;
  for (std::size_t i = 0; i < codes_.size(); ++i) {
    const auto& c = codes_[i];
    if (c.id.empty()) findings.push_back("schema[" + std::to_string(i) + "]: empty code id");
    if (!by_id_.emplace(c.id, i).second) findings.push_back("schema: duplicate code id \"" + c.id + "\"");
    if (!abbreviations.insert(c.abbreviation).second)
      findings.push_back("schema: duplicate abbreviation \"" + c.abbreviation + "\" (code \"" + c.id + "\")");
    if (c.abbreviation.size() < 2 || c.abbreviation.size() > 4)
      findings.push_back("schema: code \"" + c.id + "\" abbreviation must be 2-4 characters");
    const bool learning = c.category == CodeCategory::learning;
    if (learning && !c.bloom_level)
      findings.push_back("schema: learning code \"" + c.id + "\" has no bloom level");
    if (!learning && c.bloom_level)
      findings.push_back("schema: non-learning code \"" + c.id + "\" must not carry a bloom level");
  }
  if (!findings.empty()) throw ValidationError(std::move(findings));
}

const CodeDefinition* CodeSchema::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &codes_[it->second];
}

std::size_t CodeSchema::count(CodeCategory c) const {
  return static_cast<std::size_t>(
      std::count_if(codes_.begin(), codes_.end(), [&](const auto& d) { return d.category == c; }));
}

std::vector<std::string> Turn::code_set() const {
  std::vector<std::string> s = codes;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

// ---------------------------------------------------------------------------
// Corpus

Corpus::Corpus(CodeSchema schema, std::vector<Student> students, std::vector<Task> tasks,
               std::vector<Conversation> conversations, LoadOptions options,
               BackgroundMap background_map)
    : schema_(std::move(schema)),
      students_(std::move(students)),
      tasks_(std::move(tasks)),
      conversations_(std::move(conversations)),
      options_(options),
      background_map_(std::move(background_map)) {
  validate();
  derive();
}

void Corpus::validate() const {
  std::vector<std::string> findings;
  if (schema_.size() == 0) findings.emplace_back("schema: code list is empty");

  std::set<std::string> aliases, task_ids;
  for (const auto& s : students_) {
    if (!aliases.insert(s.alias).second) findings.push_back("student \"" + s.alias + "\": duplicate alias");
  }
  for (const auto& t : tasks_) {
    if (!task_ids.insert(t.id).second) findings.push_back("task \"" + t.id + "\": duplicate id");
    if (t.difficulty < 1 || t.difficulty > 5)
      findings.push_back("task \"" + t.id + "\": difficulty " + std::to_string(t.difficulty) +
                         " outside [1,5]");
  }

  std::set<ConversationRef> pairs;
  for (const auto& c : conversations_) {
    const std::string who = "conversation " + c.ref().key();
    if (!aliases.count(c.student)) findings.push_back(who + ": unknown student \"" + c.student + "\"");
    if (!task_ids.count(c.task)) findings.push_back(who + ": unknown task \"" + c.task + "\"");
    if (!pairs.insert(c.ref()).second) findings.push_back(who + ": duplicate (student, task) pair");
    if (!(c.score >= 0.0 && c.score <= 1.0))
      findings.push_back(who + ": score " + std::to_string(c.score) + " outside [0,1]");
    if (c.turns.empty()) findings.push_back(who + ": no turns");
    for (std::size_t i = 0; i < c.turns.size(); ++i) {
      const Turn& t = c.turns[i];
      const std::string where = who + " turn " + std::to_string(i);
      if (t.index != i) findings.push_back(where + ": turn index " + std::to_string(t.index) + " out of sequence");
      if (t.codes.empty())
        findings.push_back(where + ": no codes (use \"" + std::string(kEmptyCodeId) + "\" for uncodable prompts)");
      for (const auto& code : t.codes) {
        if (!schema_.contains(code)) findings.push_back(where + ": unknown code \"" + code + "\"");
      }
      if (t.correctness != 0.0 && t.correctness != 0.5 && t.correctness != 1.0)
        findings.push_back(where + ": correctness " + std::to_string(t.correctness) + " not in {0, 0.5, 1}");
      if (t.ingested_relevance && !(*t.ingested_relevance >= 0.0 && *t.ingested_relevance <= 1.0))
        findings.push_back(where + ": relevance " + std::to_string(*t.ingested_relevance) + " outside [0,1]");
    }
  }
  if (!findings.empty()) throw ValidationError(std::move(findings));
}

void Corpus::derive() {
  for (std::size_t i = 0; i < students_.size(); ++i) student_index_.emplace(students_[i].alias, i);
  for (std::size_t i = 0; i < tasks_.size(); ++i) task_index_.emplace(tasks_[i].id, i);

  IgOptions ig;
  ig.mode = options_.ig_mode;
  ig.alpha = options_.smoothing_alpha;

  std::vector<std::vector<double>> student_scores(students_.size()), task_scores(tasks_.size());
  for (std::size_t ci = 0; ci < conversations_.size(); ++ci) {
    Conversation& c = conversations_[ci];
    conversation_index_.emplace(c.ref(), ci);
    const auto metrics = compute_turn_metrics(c.turns, ig);
    for (std::size_t i = 0; i < c.turns.size(); ++i) {
      Turn& t = c.turns[i];
      t.response_length = metrics[i].response_length;
      t.relevance = metrics[i].relevance;
      t.relevance_is_fallback = metrics[i].relevance_is_fallback;
      t.information_gain = metrics[i].information_gain;
    }
    student_scores[student_index_.at(c.student)].push_back(c.score);
    task_scores[task_index_.at(c.task)].push_back(c.score);
  }
  // Sorted summation keeps averages independent of file order.
  auto mean = [](std::vector<double>& v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  for (std::size_t i = 0; i < students_.size(); ++i) students_[i].avg_score = mean(student_scores[i]);
  for (std::size_t i = 0; i < tasks_.size(); ++i) tasks_[i].avg_score = mean(task_scores[i]);
}

const Student* Corpus::find_student(std::string_view alias) const {
  auto it = student_index_.find(std::string(alias));
  return it == student_index_.end() ? nullptr : &students_[it->second];
}

const Task* Corpus::find_task(std::string_view id) const {
  auto it = task_index_.find(std::string(id));
  return it == task_index_.end() ? nullptr : &tasks_[it->second];
}

const Conversation* Corpus::find_conversation(std::string_view student, std::string_view task) const {
  auto it = conversation_index_.find(ConversationRef{std::string(student), std::string(task)});
  return it == conversation_index_.end() ? nullptr : &conversations_[it->second];
}

std::size_t Corpus::turn_count() const {
  return std::accumulate(conversations_.begin(), conversations_.end(), std::size_t{0},
                         [](std::size_t n, const Conversation& c) { return n + c.turns.size(); });
}

// ---------------------------------------------------------------------------
// JSON ingestion

namespace {

class Reader {
 public:
  const json& object(const json& parent, const std::string& key, const std::string& path) {
    const json& v = member(parent, key, path);
    if (!v.is_object()) fail(path + "." + key, "expected an object");
    return v;
  }
  const json& array(const json& parent, const std::string& key, const std::string& path) {
    const json& v = member(parent, key, path);
    if (!v.is_array()) fail(path + "." + key, "expected an array");
    return v;
  }
  std::string string(const json& parent, const std::string& key, const std::string& path) {
    const json& v = member(parent, key, path);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
  }
  double number(const json& parent, const std::string& key, const std::string& path) {
    const json& v = member(parent, key, path);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
  }
  int integer(const json& parent, const std::string& key, const std::string& path) {
    const json& v = member(parent, key, path);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<int>();
  }
  std::optional<double> optional_number(const json& parent, const std::string& key,
                                        const std::string& path) {
    auto it = parent.find(key);
    if (it == parent.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) fail(path + "." + key, "expected a number");
    return it->get<double>();
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ParseError("corpus parse error at " + path + ": " + what);
  }

 private:
  const json& member(const json& parent, const std::string& key, const std::string& path) {
    if (!parent.is_object()) fail(path, "expected an object");
    auto it = parent.find(key);
    if (it == parent.end()) fail(path + "." + key, "missing field");
    return *it;
  }
};

std::string indexed(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

std::pair<std::size_t, std::size_t> line_column(std::string_view source, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < source.size(); ++i) {
    if (source[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

Corpus load_corpus(std::string_view source, LoadOptions options) {
  json doc;
  try {
    doc = json::parse(source.begin(), source.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(source, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("corpus parse error at line " + std::to_string(line) + ", column " +
                     std::to_string(col) + ": " + e.what());
  }
  if (!doc.is_object()) Reader::fail("$", "top level must be an object");

  Reader r;
  std::vector<std::string> findings;

  BackgroundMap background_map;
  if (auto h = doc.find("header"); h != doc.end() && h->is_object()) {
    if (auto bm = h->find("background_map"); bm != h->end()) {
      if (!bm->is_object()) Reader::fail("$.header.background_map", "expected an object");
      for (const auto& [attr, table] : bm->items()) {
        const std::string path = "$.header.background_map." + attr;
        if (!table.is_object()) Reader::fail(path, "expected an object");
        for (const auto& [src, level] : table.items()) {
          if (!level.is_string()) Reader::fail(path + "." + src, "expected a string");
          auto e = parse_experience(level.get<std::string>());
          if (!e) Reader::fail(path + "." + src, "unknown level \"" + level.get<std::string>() + "\"");
          background_map[attr][src] = *e;
        }
      }
    }
  }

  std::vector<CodeDefinition> codes;
  const json& schema = r.array(doc, "schema", "$");
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const std::string p = indexed("$.schema", i);
    CodeDefinition d;
    d.id = r.string(schema[i], "id", p);
    d.label = r.string(schema[i], "label", p);
    d.abbreviation = r.string(schema[i], "abbr", p);
    const std::string cat = r.string(schema[i], "category", p);
    auto c = parse_category(cat);
    if (!c) Reader::fail(p + ".category", "unknown category \"" + cat + "\"");
    d.category = *c;
    if (auto b = schema[i].find("bloom"); b != schema[i].end() && !b->is_null()) {
      if (!b->is_string()) Reader::fail(p + ".bloom", "expected a string");
      auto level = parse_bloom(b->get<std::string>());
      if (!level) Reader::fail(p + ".bloom", "unknown bloom level \"" + b->get<std::string>() + "\"");
      d.bloom_level = *level;
    }
    codes.push_back(std::move(d));
  }

  std::vector<Student> students;
  const json& js = r.array(doc, "students", "$");
  for (std::size_t i = 0; i < js.size(); ++i) {
    const std::string p = indexed("$.students", i);
    Student s;
    s.alias = r.string(js[i], "alias", p);
    auto level = [&](const char* attr) {
      const std::string raw = r.string(js[i], attr, p);
      if (auto t = background_map.find(attr); t != background_map.end()) {
        if (auto m = t->second.find(raw); m != t->second.end()) return m->second;
      }
      if (auto e = parse_experience(raw)) return *e;
      findings.push_back("student \"" + s.alias + "\": unmapped " + attr + " value \"" + raw + "\"");
      return Experience::none;
    };
    s.dv_experience = level("dv_experience");
    s.cs_background = level("cs_background");
    s.gpt_familiarity = level("gpt_familiarity");
    students.push_back(std::move(s));
  }

  std::vector<Task> tasks;
  const json& jt = r.array(doc, "tasks", "$");
  for (std::size_t i = 0; i < jt.size(); ++i) {
    const std::string p = indexed("$.tasks", i);
    Task t;
    t.id = r.string(jt[i], "id", p);
    t.task_type = r.string(jt[i], "type", p);
    const std::string level = r.string(jt[i], "cognitive_level", p);
    auto b = parse_bloom(level);
    if (!b) Reader::fail(p + ".cognitive_level", "unknown bloom level \"" + level + "\"");
    t.cognitive_level = *b;
    t.difficulty = r.integer(jt[i], "difficulty", p);
    t.description = r.string(jt[i], "description", p);
    tasks.push_back(std::move(t));
  }

  std::vector<Conversation> conversations;
  const json& jc = r.array(doc, "conversations", "$");
  for (std::size_t i = 0; i < jc.size(); ++i) {
    const std::string p = indexed("$.conversations", i);
    Conversation c;
    c.student = r.string(jc[i], "student", p);
    c.task = r.string(jc[i], "task", p);
    c.score = r.number(jc[i], "score", p);
    const json& turns = r.array(jc[i], "turns", p);
    for (std::size_t k = 0; k < turns.size(); ++k) {
      const std::string tp = indexed(p + ".turns", k);
      Turn t;
      t.index = k;
      t.prompt_text = r.string(turns[k], "prompt", tp);
      t.response_text = r.string(turns[k], "response", tp);
      const json& jcodes = r.array(turns[k], "codes", tp);
      for (std::size_t m = 0; m < jcodes.size(); ++m) {
        if (!jcodes[m].is_string()) Reader::fail(indexed(tp + ".codes", m), "expected a string");
        auto code = jcodes[m].get<std::string>();
        if (std::find(t.codes.begin(), t.codes.end(), code) == t.codes.end()) t.codes.push_back(std::move(code));
      }
      t.ingested_relevance = r.optional_number(turns[k], "relevance", tp);
      t.correctness = r.number(turns[k], "correctness", tp);
      c.turns.push_back(std::move(t));
    }
    conversations.push_back(std::move(c));
  }

  if (!findings.empty()) throw ValidationError(std::move(findings));
  return Corpus(CodeSchema(std::move(codes)), std::move(students), std::move(tasks),
                std::move(conversations), options, std::move(background_map));
}

Corpus load_corpus_file(const std::string& path, LoadOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open corpus file \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_corpus(buf.str(), options);
}

std::string dump_corpus(const Corpus& corpus, int indent) {
  json doc;
  json& schema = doc["schema"] = json::array();
  for (const auto& c : corpus.schema().codes()) {
    json e = {{"id", c.id}, {"label", c.label}, {"abbr", c.abbreviation},
              {"category", to_string(c.category)}};
    if (c.bloom_level) e["bloom"] = to_string(*c.bloom_level);
    schema.push_back(std::move(e));
  }
  json& students = doc["students"] = json::array();
  for (const auto& s : corpus.students()) {
    students.push_back({{"alias", s.alias},
                        {"dv_experience", to_string(s.dv_experience)},
                        {"cs_background", to_string(s.cs_background)},
                        {"gpt_familiarity", to_string(s.gpt_familiarity)}});
  }
  json& tasks = doc["tasks"] = json::array();
  for (const auto& t : corpus.tasks()) {
    tasks.push_back({{"id", t.id},
                     {"type", t.task_type},
                     {"cognitive_level", to_string(t.cognitive_level)},
                     {"difficulty", t.difficulty},
                     {"description", t.description}});
  }
  json& convs = doc["conversations"] = json::array();
  for (const auto& c : corpus.conversations()) {
    json turns = json::array();
    for (const auto& t : c.turns) {
      json jt = {{"prompt", t.prompt_text},
                 {"response", t.response_text},
                 {"codes", t.codes},
                 {"correctness", t.correctness}};
      if (t.ingested_relevance) jt["relevance"] = *t.ingested_relevance;
      turns.push_back(std::move(jt));
    }
    convs.push_back({{"student", c.student}, {"task", c.task}, {"score", c.score}, {"turns", std::move(turns)}});
  }
  return doc.dump(indent);
}

}  // namespace convominer
