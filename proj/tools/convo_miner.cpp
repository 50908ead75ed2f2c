// convo_miner: batch ingestion, validation, reporting and the HTTP service.

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "convominer/corpus.hpp"
#include "convominer/fixture.hpp"
#include "convominer/irr.hpp"
#include "convominer/report.hpp"
#include "convominer/service.hpp"

namespace cm = convominer;

namespace {

std::atomic<bool> g_reload{false};
std::atomic<bool> g_stop{false};

void on_signal(int sig) {
  if (sig == SIGHUP) g_reload = true;
  else g_stop = true;
}

cm::LoadOptions load_options(bool exclusive, double alpha) {
  cm::LoadOptions o;
  o.ig_mode = exclusive ? cm::IgMode::exclusive_smoothed : cm::IgMode::inclusive;
  o.smoothing_alpha = alpha;
  return o;
}

int report_failure(const std::exception& e) {
  if (const auto* v = dynamic_cast<const cm::ValidationError*>(&e)) {
    for (const auto& f : v->findings()) std::cerr << f << "\n";
    std::cerr << v->findings().size() << " finding(s)\n";
  } else {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 1;
}

bool write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine interaction patterns from coded student-LLM conversations"};
  app.require_subcommand(1);

  bool exclusive = false;
  double alpha = 1.0;
  app.add_flag("--exclusive-ig", exclusive, "Score IG against prior responses only, with add-alpha smoothing");
  app.add_option("--alpha", alpha, "Smoothing constant for --exclusive-ig")->check(CLI::PositiveNumber);

  std::string file;

  auto* ingest = app.add_subcommand("ingest", "Load a corpus and print its canonical form with a shape summary");
  std::string ingest_out;
  ingest->add_option("file", file, "Corpus JSON")->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", ingest_out, "Write the canonical corpus here");

  auto* validate = app.add_subcommand("validate", "Check a corpus; findings go to stderr");
  validate->add_option("file", file, "Corpus JSON")->required();

  auto* report = app.add_subcommand("report", "Write overview, top patterns, summaries and per-task trees");
  std::string format = "json", out_path;
  cm::ReportOptions ropts;
  report->add_option("file", file, "Corpus JSON")->required()->check(CLI::ExistingFile);
  report->add_option("--format", format, "json or md")->check(CLI::IsMember({"json", "md"}));
  report->add_option("--out", out_path, "Output path (stdout when omitted)");
  report->add_option("--max-seq-len", ropts.params.max_seq_len);
  report->add_option("--max-set-size", ropts.params.max_set_size);
  report->add_option("--min-support", ropts.params.min_support);
  report->add_option("--top", ropts.top_patterns, "Patterns listed per kind");
  report->add_option("--prune", ropts.tree_prune, "Drop tree nodes reached by fewer conversations");

  auto* serve = app.add_subcommand("serve", "Serve the JSON API; SIGHUP reloads the file");
  int port = 8080;
  std::string host = "127.0.0.1", cors = "*";
  serve->add_option("file", file, "Corpus JSON")->required()->check(CLI::ExistingFile);
  serve->add_option("--port", port, "Listen port (CONVO_MINER_PORT overrides)");
  serve->add_option("--host", host);
  serve->add_option("--cors-origin", cors);

  auto* gen = app.add_subcommand("generate-fixture", "Write the synthetic reference corpus");
  std::uint64_t seed = cm::kDefaultFixtureSeed;
  std::string gen_out;
  gen->add_option("--seed", seed);
  gen->add_option("--out", gen_out, "Output path (stdout when omitted)");

  auto* irr = app.add_subcommand("irr", "Cohen's kappa for a double-coded CSV (item_id,coder,code_id)");
  irr->add_option("file", file, "CSV file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  const cm::LoadOptions lo = load_options(exclusive, alpha);

  try {
    if (*ingest) {
      const cm::Corpus corpus = cm::load_corpus_file(file, lo);
      std::cerr << corpus.students().size() << " students, " << corpus.tasks().size() << " tasks, "
                << corpus.conversations().size() << " conversations, " << corpus.turn_count() << " turns\n";
      if (!ingest_out.empty() && !write_output(ingest_out, cm::dump_corpus(corpus, 2) + "\n")) {
        std::cerr << "error: cannot write " << ingest_out << "\n";
        return 1;
      }
      return 0;
    }
    if (*validate) {
      const cm::Corpus corpus = cm::load_corpus_file(file, lo);
      std::cerr << "ok: " << corpus.conversations().size() << " conversations, " << corpus.turn_count()
                << " turns\n";
      return 0;
    }
    if (*report) {
      const cm::Corpus corpus = cm::load_corpus_file(file, lo);
      const auto doc = cm::build_report(corpus, ropts);
      const std::string text = format == "md" ? cm::render_markdown(doc) : doc.dump(2) + "\n";
      if (!write_output(out_path, text)) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return 1;
      }
      return 0;
    }
    if (*gen) {
      const cm::Corpus corpus = cm::generate_fixture(seed, {}, lo);
      if (!write_output(gen_out, cm::dump_corpus(corpus, 1) + "\n")) {
        std::cerr << "error: cannot write " << gen_out << "\n";
        return 1;
      }
      return 0;
    }
    if (*irr) {
      std::ifstream in(file);
      const cm::IrrInput input = cm::read_irr_csv(in);
      std::cout << "coders: " << input.coder_a << ", " << input.coder_b << "\n";
      std::cout << "items: " << input.labels_a.size() << "\n";
      std::cout << "kappa: " << cm::compute_irr(input.labels_a, input.labels_b) << "\n";
      return 0;
    }
    if (*serve) {
      cm::AnalyticsService service(std::make_shared<const cm::Corpus>(cm::load_corpus_file(file, lo)));
      cm::ServerOptions so;
      so.host = host;
      so.port = cm::resolve_port(port);
      so.cors_origin = cors;
      cm::HttpServer server(service, so);

      std::signal(SIGHUP, on_signal);
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::thread watcher([&] {
        while (!g_stop) {
          if (g_reload.exchange(false)) {
            try {
              service.reload(file, lo);
              std::cerr << "reloaded " << file << "\n";
            } catch (const std::exception& e) {
              std::cerr << "reload failed, keeping previous snapshot: " << e.what() << "\n";
            }
          }
          std::this_thread::sleep_for(std::chrono::milliseconds(100));
        }
        server.stop();
      });
      std::cerr << "listening on http://" << so.host << ":" << so.port << "\n";
      const bool ok = server.listen();
      g_stop = true;
      watcher.join();
      if (!ok) {
        std::cerr << "error: cannot bind " << so.host << ":" << so.port << "\n";
        return 1;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    return report_failure(e);
  }
  return 0;
}
