#include <doctest.h>

#include <atomic>
#include <cmath>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "stylometer/corpus.hpp"
#include "stylometer/errors.hpp"
#include "stylometer/http_clients.hpp"

using namespace stylometer;

namespace {

// Test server bound to an ephemeral localhost port.
class LocalServer {
 public:
  LocalServer() = default;

  void start() {
    port_ = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~LocalServer() {
    server.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  httplib::Server server;

 private:
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("http scorer speaks the /score wire protocol") {
  LocalServer server;
  server.server.Post("/score", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    REQUIRE(body.contains("text"));
    // fixed per-token logprob over whitespace-split tokens
    nlohmann::json tokens = nlohmann::json::array();
    nlohmann::json logprobs = nlohmann::json::array();
    std::istringstream in(body["text"].get<std::string>());
    std::string tok;
    while (in >> tok) {
      tokens.push_back(tok);
      logprobs.push_back(-2.0);
    }
    res.set_content(nlohmann::json{{"tokens", tokens}, {"logprobs", logprobs}}.dump(),
                    "application/json");
  });
  server.start();

  const HttpScorer scorer(server.url());
  const ScoredText scored = scorer.score_text("three token text");
  REQUIRE(scored.tokens.size() == 3);
  REQUIRE(scored.logprobs.size() == 3);
  CHECK(scored.logprobs[0] == -2.0);
  CHECK(scorer.id() == "http:" + server.url());
}

TEST_CASE("http scorer rejects malformed responses") {
  LocalServer server;
  server.server.Post("/score", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"tokens": ["a", "b"], "logprobs": [-1.0]})", "application/json");
  });
  server.start();
  const HttpScorer scorer(server.url());
  CHECK_THROWS_WITH_AS(scorer.score_text("a b"), doctest::Contains("ScorerUnavailable"), Error);
}

TEST_CASE("http scorer reports unreachable endpoints") {
  // nothing listens on port 1
  const HttpScorer scorer("http://127.0.0.1:1", 1);
  CHECK_THROWS_WITH_AS(scorer.score_text("text"), doctest::Contains("ScorerUnavailable"), Error);
}

TEST_CASE("http embedder speaks the /embed wire protocol") {
  LocalServer server;
  server.server.Post("/embed", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    REQUIRE(body.at("texts").size() == 1);
    res.set_content(R"({"vectors": [[0.6, 0.8]]})", "application/json");
  });
  server.start();

  const HttpEmbedder embedder(server.url());
  const auto vec = embedder.embed("a sentence");
  REQUIRE(vec.size() == 2);
  CHECK(vec[0] == 0.6);
  CHECK(embedder.dimension() == 2);
}

TEST_CASE("http grammar checker flags sentences with matches") {
  LocalServer server;
  std::atomic<int> calls{0};
  server.server.Post("/v2/check", [&calls](const httplib::Request& req, httplib::Response& res) {
    ++calls;
    REQUIRE(req.has_param("text"));
    REQUIRE(req.get_param_value("language") == "en-US");
    const bool flagged = req.get_param_value("text").find("teh") != std::string::npos;
    res.set_content(flagged ? R"({"matches": [{"message": "typo"}]})" : R"({"matches": []})",
                    "application/json");
  });
  server.start();

  const HttpGrammarChecker checker(server.url());
  CHECK(checker.check("This has teh typo."));
  CHECK_FALSE(checker.check("This is fine."));
  CHECK(calls == 2);

  const HttpGrammarChecker dead("http://127.0.0.1:1", "en-US", 1);
  CHECK_THROWS_WITH_AS(dead.check("text"), doctest::Contains("CheckerUnavailable"), Error);
}

TEST_CASE("generate talks to an OpenAI-compatible endpoint") {
  LocalServer server;
  std::string last_body;
  server.server.Post("/v1/chat/completions",
                     [&last_body](const httplib::Request& req, httplib::Response& res) {
                       last_body = req.body;
                       const auto body = nlohmann::json::parse(req.body);
                       const std::string prompt = body.at("messages").at(0).at("content");
                       res.set_content(
                           nlohmann::json{
                               {"choices",
                                {{{"message", {{"role", "assistant"}, {"content", prompt}}}}}}}
                               .dump(),
                           "application/json");
                     });
  server.start();

  GenerationConfig config;
  config.extra = nlohmann::ordered_json{{"steps", 128}};
  GenerateOptions options;
  options.backoff_ms = 1;
  options.model_name = "llama";
  const GenerationResult result = generate(server.url(), "Rephrase: X", config, options);
  CHECK(result.text == "Rephrase: X");  // echo endpoint
  CHECK(result.attempts_used == 1);
  // the request body carries the decoding config verbatim
  CHECK(last_body.find("\"temperature\":0.0") != std::string::npos);
  CHECK(last_body.find("\"top_p\":1.0") != std::string::npos);
  CHECK(last_body.find("\"steps\":128") != std::string::npos);
  CHECK(last_body.find("\"model\":\"llama\"") != std::string::npos);
}

TEST_CASE("generate retries on 5xx with backoff") {
  LocalServer server;
  std::atomic<int> calls{0};
  server.server.Post("/v1/chat/completions",
                     [&calls](const httplib::Request&, httplib::Response& res) {
                       const int n = ++calls;
                       if (n < 3) {
                         res.status = 500;
                         res.set_content("overloaded", "text/plain");
                         return;
                       }
                       res.set_content(
                           R"({"choices": [{"message": {"content": "finally worked"}}]})",
                           "application/json");
                     });
  server.start();

  GenerateOptions options;
  options.backoff_ms = 1;
  const GenerationResult result = generate(server.url(), "p", GenerationConfig{}, options);
  CHECK(result.text == "finally worked");
  CHECK(result.attempts_used == 3);
  CHECK(calls == 3);
}

TEST_CASE("generate fails after exhausting retries") {
  LocalServer server;
  std::atomic<int> calls{0};
  server.server.Post("/v1/chat/completions",
                     [&calls](const httplib::Request&, httplib::Response& res) {
                       ++calls;
                       res.status = 503;
                     });
  server.start();

  GenerateOptions options;
  options.backoff_ms = 1;
  CHECK_THROWS_WITH_AS(generate(server.url(), "p", GenerationConfig{}, options),
                       doctest::Contains("EndpointUnavailable"), Error);
  CHECK(calls == 3);
}

TEST_CASE("generate maps error bodies to the right conditions") {
  LocalServer server;
  server.server.Post("/v1/chat/completions", [](const httplib::Request& req,
                                                httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    const std::string prompt = body.at("messages").at(0).at("content");
    if (prompt == "empty") {
      res.set_content(R"({"choices": [{"message": {"content": ""}}]})", "application/json");
    } else if (prompt == "bad-request") {
      res.status = 400;
      res.set_content("no such model", "text/plain");
    } else {
      res.set_content("not json", "application/json");
    }
  });
  server.start();

  GenerateOptions options;
  options.backoff_ms = 1;
  CHECK_THROWS_WITH_AS(generate(server.url(), "empty", GenerationConfig{}, options),
                       doctest::Contains("EmptyCompletion"), Error);
  CHECK_THROWS_WITH_AS(generate(server.url(), "bad-request", GenerationConfig{}, options),
                       doctest::Contains("EndpointError"), Error);
  CHECK_THROWS_WITH_AS(generate(server.url(), "unparseable", GenerationConfig{}, options),
                       doctest::Contains("EndpointError"), Error);
}

TEST_CASE("base url normalization") {
  CHECK(normalize_base_url("localhost:8000") == "http://localhost:8000");
  CHECK(normalize_base_url("http://host:1/") == "http://host:1");
  CHECK(normalize_base_url("https://host") == "https://host");
}

TEST_CASE("generate_corpus keeps the corpus bookkeeping exact") {
  LocalServer llama;
  llama.server.Post("/v1/chat/completions", [](const httplib::Request& req,
                                               httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    const std::string prompt = body.at("messages").at(0).at("content");
    res.set_content(
        nlohmann::json{{"choices",
                        {{{"message", {{"content", "the work rewrites: " + prompt}}}}}}}
            .dump(),
        "application/json");
  });
  llama.start();
  LocalServer llada;
  std::string llada_last_body;
  llada.server.Post("/v1/chat/completions", [&llada_last_body](const httplib::Request& req,
                                                               httplib::Response& res) {
    llada_last_body = req.body;
    res.set_content(R"({"choices": [{"message": {"content": "a diffusion style answer"}}]})",
                    "application/json");
  });
  llada.start();

  std::vector<TextSample> sources;
  for (int i = 0; i < 3; ++i) {
    TextSample s;
    s.id = "src" + std::to_string(i);
    s.origin = "human";
    s.task = "source";
    s.text = "Original abstract number " + std::to_string(i) + ". It has two sentences.";
    s.title = "Paper " + std::to_string(i);
    sources.push_back(s);
  }

  GenerateCorpusOptions options;
  options.backoff_ms = 1;
  options.extra_by_model["llada"] = nlohmann::ordered_json{{"steps", 128}, {"block_length", 32}};
  const std::map<std::string, std::string> models = {{"llama", llama.url()},
                                                     {"llada", llada.url()}};
  const auto corpus = generate_corpus(sources, models, options);

  // |generated| = |sources| * |tasks| * |models|
  CHECK(corpus.size() == sources.size() + sources.size() * 2 * 2);
  std::size_t rephrase_count = 0;
  for (const TextSample& s : corpus) {
    if (s.task == "rephrase") {
      ++rephrase_count;
      REQUIRE(s.reference.has_value());
    }
    if (s.origin == "llada") {
      // config echo rides in meta, extra fields included
      CHECK(s.meta.at("generation").at("extra").at("steps") == 128);
      CHECK(s.meta.at("generation").at("temperature") == 0.0);
      CHECK(s.meta.at("source_id").get<std::string>().rfind("src", 0) == 0);
    }
  }
  CHECK(rephrase_count == 6);
  // diffusion-specific fields were passed through to the endpoint verbatim
  CHECK(llada_last_body.find("\"block_length\":32") != std::string::npos);

  // deterministic: the same sources and endpoints give identical samples,
  // regardless of the worker count
  const auto again = generate_corpus(sources, models, options);
  REQUIRE(again.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) CHECK(again[i] == corpus[i]);

  GenerateCorpusOptions parallel = options;
  parallel.jobs = 4;
  const auto concurrent = generate_corpus(sources, models, parallel);
  REQUIRE(concurrent.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) CHECK(concurrent[i] == corpus[i]);
}
