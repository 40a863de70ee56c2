// Exercises the installed command surface through the real binary: exit
// codes, config-file defaults, and the ingest -> sample flow.

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "stylometer/corpus.hpp"

namespace {

int run_cli(const std::string& args) {
  const std::string command =
      std::string("\"") + CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string out_path(const char* name) { return std::string(FIXTURES_OUT_DIR) + "/" + name; }

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run_cli("") == 1);
  CHECK(run_cli("no-such-subcommand") == 1);
  CHECK(run_cli("ingest") == 1);  // --csv is required
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("data errors exit 2") {
  CHECK(run_cli("compare --results /nonexistent/results.jsonl") == 2);
  CHECK(run_cli("analyze --corpus /nonexistent/corpus.jsonl --out " + out_path("r.jsonl")) == 2);
  CHECK(run_cli("ingest --csv /nonexistent.csv --out " + out_path("c.jsonl")) == 2);
}

TEST_CASE("endpoint errors exit 3") {
  // a corpus that loads fine, scored against a dead endpoint
  stylometer::TextSample s;
  s.id = "a";
  s.origin = "human";
  s.task = "source";
  s.text = "Two sentences live here. Both are fine.";
  const std::string corpus = out_path("cli_corpus.jsonl");
  stylometer::save_samples({s}, corpus);
  CHECK(run_cli("analyze --corpus " + corpus + " --out " + out_path("cli_results.jsonl") +
                " --scorer-url http://127.0.0.1:1") == 3);
}

TEST_CASE("pipeline subcommands succeed and honor the config file") {
  const std::string csv = std::string(FIXTURES_DIR) + "/abstracts.csv";
  const std::string corpus = out_path("cli_ingested.jsonl");
  CHECK(run_cli("ingest --csv " + csv + " --out " + corpus) == 0);
  CHECK(stylometer::load_samples(corpus).size() == 4);

  // config file supplies --n; the command line supplies none
  const std::string config = out_path("cli_config.json");
  {
    std::ofstream out(config);
    out << R"({"n": 2, "seed": 11})";
  }
  const std::string sampled = out_path("cli_sampled.jsonl");
  CHECK(run_cli("--config " + config + " sample --in " + corpus + " --out " + sampled) == 0);
  CHECK(stylometer::load_samples(sampled).size() == 2);

  // explicit flags win over the config file
  CHECK(run_cli("--config " + config + " sample --in " + corpus + " --n 3 --out " + sampled) == 0);
  CHECK(stylometer::load_samples(sampled).size() == 3);

  const std::string results = out_path("cli_results_ok.jsonl");
  CHECK(run_cli("analyze --corpus " + corpus + " --out " + results) == 0);
  // all-human corpus: compare has nothing to pair up
  CHECK(run_cli("compare --results " + results) == 2);
}
