#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "convominer/correlation.hpp"
#include "convominer/corpus.hpp"
#include "convominer/filter.hpp"
#include "convominer/fixture.hpp"
#include "convominer/irr.hpp"
#include "convominer/json_codec.hpp"
#include "convominer/metrics.hpp"
#include "convominer/patterns.hpp"
#include "convominer/report.hpp"
#include "convominer/service.hpp"
#include "convominer/tree.hpp"

namespace py = pybind11;
using namespace convominer;

namespace {

LoadOptions load_options(bool exclusive_ig, double alpha) {
  return {exclusive_ig ? IgMode::exclusive_smoothed : IgMode::inclusive, alpha};
}

Conversation conversation_from_codes(const std::vector<std::vector<std::string>>& turn_codes) {
  Conversation c;
  for (std::size_t i = 0; i < turn_codes.size(); ++i) {
    Turn t;
    t.index = i;
    t.codes = turn_codes[i];
    c.turns.push_back(std::move(t));
  }
  return c;
}

std::vector<const Conversation*> select(const Corpus& corpus, const std::string& criteria_json) {
  const FilterCriteria criteria = criteria_from_json(nlohmann::json::parse(criteria_json));
  return selected_conversations(corpus, apply_filter(corpus, criteria));
}

CorrelationReport suite(const std::vector<double>& xs, const std::vector<double>& ys, std::size_t permutations,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return correlation_suite(xs, ys, rng, permutations);
}

}  // namespace

PYBIND11_MODULE(_convominer, m) {
  m.doc() = "Conversation pattern mining core";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", PyExc_ValueError);
  py::register_exception<RequestError>(m, "RequestError", PyExc_ValueError);
  py::register_exception<IrrInputError>(m, "IrrInputError", PyExc_ValueError);

  m.def("tokenize", [](const std::string& s) { return tokenize(s); }, py::arg("text"));

  m.def(
      "information_gain",
      [](const std::vector<std::tuple<std::string, double, double>>& turns, bool exclusive, double alpha) {
        std::vector<IgTurn> in;
        for (const auto& [response, relevance, correctness] : turns) in.push_back({response, relevance, correctness});
        return information_gain(in, {exclusive ? IgMode::exclusive_smoothed : IgMode::inclusive, alpha, {}});
      },
      py::arg("turns"), py::arg("exclusive") = false, py::arg("alpha") = 1.0,
      "IG per turn from (response, relevance, correctness) tuples.");

  m.def(
      "relevance_fallback", [](const std::string& p, const std::string& r) { return relevance_fallback(p, r); },
      py::arg("prompt"), py::arg("response"));

  m.def(
      "pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); },
      py::arg("xs"), py::arg("ys"));
  m.def(
      "spearman", [](const std::vector<double>& x, const std::vector<double>& y) { return spearman(x, y); },
      py::arg("xs"), py::arg("ys"));
  m.def(
      "kendall_tau_b", [](const std::vector<double>& x, const std::vector<double>& y) { return kendall_tau_b(x, y); },
      py::arg("xs"), py::arg("ys"));

  py::class_<CorrelationReport>(m, "CorrelationReport")
      .def_readonly("pearson", &CorrelationReport::pearson)
      .def_readonly("spearman", &CorrelationReport::spearman)
      .def_readonly("kendall", &CorrelationReport::kendall)
      .def_readonly("pearson_p", &CorrelationReport::pearson_p)
      .def_readonly("spearman_p", &CorrelationReport::spearman_p)
      .def_readonly("kendall_p", &CorrelationReport::kendall_p);
  m.def("correlation_suite", &suite, py::arg("xs"), py::arg("ys"), py::arg("permutations") = kDefaultPermutations,
        py::arg("seed") = kDefaultPermutationSeed);

  m.def("cohen_kappa", &cohen_kappa, py::arg("confusion"));
  m.def("compute_irr", &compute_irr, py::arg("labels_a"), py::arg("labels_b"));
  m.def(
      "read_irr_csv",
      [](const std::string& text) {
        std::istringstream in(text);
        const IrrInput r = read_irr_csv(in);
        return py::make_tuple(r.coder_a, r.coder_b, r.labels_a, r.labels_b);
      },
      py::arg("text"));

  m.def(
      "extract_sequences",
      [](const std::vector<std::vector<std::string>>& codes, int max_len) {
        const auto found = extract_sequences(conversation_from_codes(codes), max_len);
        return std::vector<CodeList>(found.begin(), found.end());
      },
      py::arg("turn_codes"), py::arg("max_seq_len") = 4);
  m.def(
      "extract_sets",
      [](const std::vector<std::vector<std::string>>& codes, int max_size) {
        const auto found = extract_sets(conversation_from_codes(codes), max_size);
        return std::vector<CodeList>(found.begin(), found.end());
      },
      py::arg("turn_codes"), py::arg("max_set_size") = 3);
  m.def(
      "match_pattern",
      [](const std::string& kind, const CodeList& codes, const std::vector<std::vector<std::string>>& turn_codes) {
        return match_pattern(pattern_kind_from_string(kind), codes,
                             std::span<const std::vector<std::string>>(turn_codes.data(), turn_codes.size()));
      },
      py::arg("kind"), py::arg("codes"), py::arg("turn_codes"));

  py::class_<Corpus>(m, "Corpus")
      .def_static(
          "from_json",
          [](const std::string& text, bool exclusive_ig, double alpha) {
            return load_corpus(text, load_options(exclusive_ig, alpha));
          },
          py::arg("text"), py::arg("exclusive_ig") = false, py::arg("alpha") = 1.0)
      .def_static(
          "from_file",
          [](const std::string& path, bool exclusive_ig, double alpha) {
            return load_corpus_file(path, load_options(exclusive_ig, alpha));
          },
          py::arg("path"), py::arg("exclusive_ig") = false, py::arg("alpha") = 1.0)
      .def_static(
          "fixture", [](std::uint64_t seed) { return generate_fixture(seed); },
          py::arg("seed") = kDefaultFixtureSeed)
      .def_property_readonly("student_count", [](const Corpus& c) { return c.students().size(); })
      .def_property_readonly("task_count", [](const Corpus& c) { return c.tasks().size(); })
      .def_property_readonly("conversation_count", [](const Corpus& c) { return c.conversations().size(); })
      .def_property_readonly("turn_count", &Corpus::turn_count)
      .def("dump", [](const Corpus& c, int indent) { return dump_corpus(c, indent); }, py::arg("indent") = -1)
      .def(
          "mine_patterns",
          [](const Corpus& c, const std::string& criteria, int max_seq_len, int max_set_size, int min_support) {
            const auto convs = select(c, criteria);
            if (convs.empty()) return std::string("[]");
            const PatternCatalog cat = mine_patterns(convs, {max_seq_len, max_set_size, min_support});
            auto j = to_json(cat.patterns);
            round_numbers(j);
            return j.dump();
          },
          py::arg("criteria") = "{}", py::arg("max_seq_len") = 4, py::arg("max_set_size") = 3,
          py::arg("min_support") = 2, "Mined pattern rows as a JSON string.")
      .def(
          "tree",
          [](const Corpus& c, const std::string& criteria, std::size_t prune) {
            auto j = serialize_tree(prune_tree(build_tree(select(c, criteria)), prune));
            round_numbers(j);
            return j.dump();
          },
          py::arg("criteria") = "{}", py::arg("prune") = 1, "Serialized interaction tree as a JSON string.")
      .def(
          "report",
          [](const Corpus& c, bool markdown) {
            const auto j = build_report(c);
            return markdown ? render_markdown(j) : j.dump();
          },
          py::arg("markdown") = false)
      .def(
          "request",
          [](const Corpus& c, const std::string& method, const std::string& path, const std::string& body) {
            const ApiResponse r = handle_request(&c, {method, path, body});
            return py::make_tuple(r.status, r.body);
          },
          py::arg("method"), py::arg("path"), py::arg("body") = "",
          "Runs one analytics API request against this corpus; returns (status, body).");
}
