#include "convominer/service.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>

#include <httplib.h>
#include <json.hpp>

#include "convominer/filter.hpp"
#include "convominer/json_codec.hpp"
#include "convominer/patterns.hpp"
#include "convominer/summary.hpp"
#include "convominer/tree.hpp"

namespace convominer {

using nlohmann::json;

namespace {

constexpr std::string_view kApiPrefix = "/api/";

ApiResponse reply(int status, json body) {
  round_numbers(body);
  return {status, body.dump(), "application/json"};
}

ApiResponse error(int status, const std::string& code, const std::string& message) {
  return reply(status, {{"error", {{"code", code}, {"message", message}}}});
}

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  json j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw RequestError("request body is not valid JSON");
  if (!j.is_object()) throw RequestError("request body must be a JSON object");
  return j;
}

const json& field(const json& body, const char* key) {
  static const json kNull;
  auto it = body.find(key);
  return it == body.end() ? kNull : *it;
}

std::string string_field(const json& body, const char* key, const std::string& fallback) {
  const json& v = field(body, key);
  if (v.is_null()) return fallback;
  if (!v.is_string()) throw RequestError(std::string(key) + ": expected a string");
  return v.get<std::string>();
}

double number_field(const json& body, const char* key, double fallback) {
  const json& v = field(body, key);
  if (v.is_null()) return fallback;
  if (!v.is_number()) throw RequestError(std::string(key) + ": expected a number");
  return v.get<double>();
}

ApiResponse overview(const Corpus& corpus) {
  const FilterCriteria everything;
  json body = to_json(background_distributions(corpus, everything));
  body["schema"] = to_json(corpus.schema());
  body["totals"] = {{"students", corpus.students().size()},
                    {"tasks", corpus.tasks().size()},
                    {"conversations", corpus.conversations().size()},
                    {"turns", corpus.turn_count()}};
  body["criteria_hash"] = criteria_hash(everything);
  return reply(200, std::move(body));
}

ApiResponse summary(const Corpus& corpus, const json& req) {
  const FilterCriteria criteria = criteria_from_json(field(req, "criteria"));
  const GroupingMode mode = grouping_mode_from_string(string_field(req, "mode", "student_grouping"));
  const std::string group_by =
      string_field(req, "group_by", mode == GroupingMode::task_grouping ? "task_type" : "dv_experience");
  const Selection sel = apply_filter(corpus, criteria);

  std::optional<std::pair<MemberSortKey, SortDirection>> sort;
  if (const json& s = field(req, "sort"); !s.is_null()) {
    if (!s.is_object()) throw RequestError("sort: expected an object");
    sort.emplace(member_sort_key_from_string(string_field(s, "key", "mean_score")),
                 sort_direction_from_string(string_field(s, "direction", "asc")));
  }

  json groups = json::array();
  try {
    for (const Group& g : group_members(corpus, sel, mode, group_by)) {
      GroupSummary gs = summarize_group(corpus, g, sel, mode);
      if (sort) gs.rows = sort_members(gs, sort->first, sort->second);
      groups.push_back(to_json(gs));
    }
  } catch (const std::invalid_argument& e) {
    throw RequestError(e.what());
  }
  return reply(200, {{"groups", std::move(groups)}, {"criteria_hash", criteria_hash(criteria)}});
}

ApiResponse patterns(const Corpus& corpus, const json& req) {
  const FilterCriteria criteria = criteria_from_json(field(req, "criteria"));
  const MiningParams params = mining_params_from_json(field(req, "params"));
  PatternSortKey key = PatternSortKey::support;
  SortDirection direction = SortDirection::descending;
  bool sorted = false;
  if (const json& s = field(req, "sort"); !s.is_null()) {
    if (!s.is_object()) throw RequestError("sort: expected an object");
    key = pattern_sort_key_from_string(string_field(s, "key", "support"));
    direction = sort_direction_from_string(string_field(s, "direction", "desc"));
    sorted = true;
  }
  std::optional<std::string> kind_filter;
  if (const json& k = field(req, "kind"); !k.is_null()) {
    kind_filter = string_field(req, "kind", "");
    pattern_kind_from_string(*kind_filter);
  }
  const double limit = number_field(req, "limit", -1.0);

  const Selection sel = apply_filter(corpus, criteria);
  json rows = json::array();
  std::size_t total = 0;
  if (!sel.empty()) {
    const auto convs = selected_conversations(corpus, sel);
    const PatternCatalog catalog = mine_patterns(convs, params);
    std::vector<Pattern> ordered = sorted ? sort_patterns(catalog, key, direction) : catalog.patterns;
    for (const Pattern& p : ordered) {
      if (kind_filter && to_string(p.kind) != *kind_filter) continue;
      ++total;
      if (limit < 0 || static_cast<double>(rows.size()) < limit) rows.push_back(to_json(p));
    }
  }
  return reply(200, {{"patterns", std::move(rows)},
                     {"total", total},
                     {"params", to_json(params)},
                     {"criteria_hash", criteria_hash(criteria)}});
}

ApiResponse tree(const Corpus& corpus, const json& req) {
  const FilterCriteria criteria = criteria_from_json(field(req, "criteria"));
  const double prune = number_field(req, "prune", 1.0);
  if (prune < 1.0 || prune != std::floor(prune)) throw RequestError("prune: expected an integer >= 1");
  LayoutOptions layout;
  layout.gain_scale = number_field(req, "gain_scale", 1.0);
  layout.base_length = number_field(req, "base_length", 1.0);
  if (!(layout.gain_scale > 0.0)) throw RequestError("gain_scale: must be > 0");

  std::optional<std::pair<PatternKind, CodeList>> pattern;
  if (const json& hp = field(req, "highlight_pattern"); !hp.is_null()) {
    if (!hp.is_object()) throw RequestError("highlight_pattern: expected an object");
    const PatternKind kind = pattern_kind_from_string(string_field(hp, "kind", "sequence"));
    const json& codes = field(hp, "codes");
    if (!codes.is_array() || codes.empty()) throw RequestError("highlight_pattern.codes: expected a non-empty array");
    CodeList list;
    for (const auto& c : codes) {
      if (!c.is_string()) throw RequestError("highlight_pattern.codes: expected strings");
      if (!corpus.schema().contains(c.get<std::string>()))
        throw RequestError("highlight_pattern.codes: unknown code \"" + c.get<std::string>() + "\"");
      list.push_back(c.get<std::string>());
    }
    if (kind == PatternKind::set) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    pattern.emplace(kind, std::move(list));
  }

  const Selection sel = apply_filter(corpus, criteria);
  json body;
  if (sel.empty()) {
    body = {{"nodes", json::array()}, {"edges", json::array()}, {"elided", json::array()}, {"total_conversations", 0}};
    if (pattern) body["highlight"] = to_json(Highlight{});
  } else {
    const auto convs = selected_conversations(corpus, sel);
    const InteractionTree full = build_tree(convs);
    const InteractionTree shown = prune_tree(full, static_cast<std::size_t>(prune));
    body = serialize_tree(shown, layout);
    if (pattern) body["highlight"] = to_json(highlight_paths(shown, pattern->first, pattern->second));
  }
  body["criteria_hash"] = criteria_hash(criteria);
  return reply(200, std::move(body));
}

ApiResponse conversation(const Corpus& corpus, std::string_view rest) {
  const auto slash = rest.find('/');
  if (slash == std::string_view::npos || rest.find('/', slash + 1) != std::string_view::npos) {
    return error(404, "unknown_conversation", "expected /api/conversation/{student}/{task}");
  }
  const std::string student(rest.substr(0, slash)), task(rest.substr(slash + 1));
  const Conversation* c = corpus.find_conversation(student, task);
  if (!c) return error(404, "unknown_conversation", "no conversation for student \"" + student + "\" and task \"" + task + "\"");
  return reply(200, conversation_json(corpus, *c));
}

}  // namespace

ApiResponse handle_request(const Corpus* snapshot, const ApiRequest& request) {
  const std::string_view path = request.path;
  if (path.substr(0, kApiPrefix.size()) != kApiPrefix) return error(404, "not_found", "unknown endpoint");
  const std::string_view endpoint = path.substr(kApiPrefix.size());
  const bool get = request.method == "GET", post = request.method == "POST";

  enum class Route { overview, summary, patterns, tree, conversation, none } route = Route::none;
  constexpr std::string_view kConversation = "conversation/";
  if (endpoint == "overview") route = Route::overview;
  else if (endpoint == "summary") route = Route::summary;
  else if (endpoint == "patterns") route = Route::patterns;
  else if (endpoint == "tree") route = Route::tree;
  else if (endpoint.substr(0, kConversation.size()) == kConversation) route = Route::conversation;
  if (route == Route::none) return error(404, "not_found", "unknown endpoint");

  const bool wants_get = route == Route::overview || route == Route::conversation;
  if ((wants_get && !get) || (!wants_get && !post)) {
    return error(405, "method_not_allowed", "method " + request.method + " not allowed here");
  }
  if (!snapshot) return error(503, "no_corpus", "no corpus loaded");

  try {
    switch (route) {
      case Route::overview: return overview(*snapshot);
      case Route::conversation: return conversation(*snapshot, endpoint.substr(kConversation.size()));
      case Route::summary: return summary(*snapshot, parse_body(request.body));
      case Route::patterns: return patterns(*snapshot, parse_body(request.body));
      case Route::tree: return tree(*snapshot, parse_body(request.body));
      case Route::none: break;
    }
  } catch (const RequestError& e) {
    return error(400, "bad_request", e.what());
  } catch (const std::exception& e) {
    return error(500, "internal", e.what());
  }
  return error(404, "not_found", "unknown endpoint");
}

std::shared_ptr<const Corpus> AnalyticsService::snapshot() const {
  std::lock_guard lock(mu_);
  return snapshot_;
}

void AnalyticsService::swap_snapshot(std::shared_ptr<const Corpus> next) {
  std::lock_guard lock(mu_);
  snapshot_ = std::move(next);
}

void AnalyticsService::reload(const std::string& path, LoadOptions options) {
  auto next = std::make_shared<const Corpus>(load_corpus_file(path, options));
  swap_snapshot(std::move(next));
}

ApiResponse AnalyticsService::handle(const ApiRequest& request) const {
  const auto snap = snapshot();
  return handle_request(snap.get(), request);
}

int resolve_port(int fallback) {
  if (const char* env = std::getenv("CONVO_MINER_PORT")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v < 65536) return static_cast<int>(v);
  }
  return fallback;
}

// ---------------------------------------------------------------------------
// HTTP adapter

struct HttpServer::Impl {
  AnalyticsService& service;
  ServerOptions options;
  httplib::Server server;

  Impl(AnalyticsService& s, ServerOptions o) : service(s), options(std::move(o)) {
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
      const ApiResponse r = service.handle({req.method, req.path, req.body});
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    };
    server.Get(R"(/api/.*)", forward);
    server.Post(R"(/api/.*)", forward);
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", options.cors_origin);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
  }
};

HttpServer::HttpServer(AnalyticsService& service, ServerOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::listen() { return impl_->server.listen(impl_->options.host, impl_->options.port); }

int HttpServer::bind_any_port() { return impl_->server.bind_to_any_port(impl_->options.host); }

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace convominer
