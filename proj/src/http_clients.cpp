#include "stylometer/http_clients.hpp"

#include <httplib.h>
#include <json.hpp>

#include "stylometer/errors.hpp"

namespace stylometer {
namespace {

using nlohmann::json;

json post_json(const std::string& base_url, const std::string& path, const std::string& body,
               const char* content_type, int timeout_seconds, const char* error_code) {
  httplib::Client client(base_url);
  client.set_connection_timeout(timeout_seconds, 0);
  client.set_read_timeout(timeout_seconds, 0);
  auto res = client.Post(path, body, content_type);
  if (!res) {
    throw Error(error_code, "cannot reach " + base_url + path + " (" +
                                httplib::to_string(res.error()) + ")",
                ErrorKind::Endpoint);
  }
  if (res->status != 200) {
    throw Error(error_code,
                base_url + path + " returned status " + std::to_string(res->status) + ": " +
                    res->body.substr(0, 200),
                ErrorKind::Endpoint);
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw Error(error_code, "unparseable response from " + base_url + path + ": " + e.what(),
                ErrorKind::Endpoint);
  }
}

}  // namespace

std::string normalize_base_url(std::string_view url) {
  std::string s(url);
  if (s.rfind("http://", 0) != 0 && s.rfind("https://", 0) != 0) s = "http://" + s;
  while (!s.empty() && s.back() == '/') s.pop_back();
  return s;
}

HttpScorer::HttpScorer(std::string base_url, int timeout_seconds)
    : base_url_(normalize_base_url(base_url)), timeout_seconds_(timeout_seconds) {}

ScoredText HttpScorer::score_text(std::string_view text) const {
  const json request = {{"text", std::string(text)}};
  const json response = post_json(base_url_, "/score", request.dump(), "application/json",
                                  timeout_seconds_, "ScorerUnavailable");
  if (!response.contains("tokens") || !response.contains("logprobs") ||
      !response["tokens"].is_array() || !response["logprobs"].is_array()) {
    throw Error("ScorerUnavailable", "scorer response lacks tokens/logprobs arrays",
                ErrorKind::Endpoint);
  }
  ScoredText scored;
  scored.tokens = response["tokens"].get<std::vector<std::string>>();
  scored.logprobs = response["logprobs"].get<std::vector<double>>();
  if (scored.tokens.size() != scored.logprobs.size()) {
    throw Error("ScorerUnavailable", "scorer returned mismatched token/logprob lengths",
                ErrorKind::Endpoint);
  }
  for (const double lp : scored.logprobs) {
    if (!(lp <= 0.0)) {
      throw Error("ScorerUnavailable", "scorer returned a positive log-probability",
                  ErrorKind::Endpoint);
    }
  }
  return scored;
}

std::string HttpScorer::id() const { return "http:" + base_url_; }

HttpEmbedder::HttpEmbedder(std::string base_url, int timeout_seconds)
    : base_url_(normalize_base_url(base_url)), timeout_seconds_(timeout_seconds) {}

std::vector<double> HttpEmbedder::embed(std::string_view sentence) const {
  const json request = {{"texts", json::array({std::string(sentence)})}};
  const json response = post_json(base_url_, "/embed", request.dump(), "application/json",
                                  timeout_seconds_, "EmbedderUnavailable");
  if (!response.contains("vectors") || !response["vectors"].is_array() ||
      response["vectors"].size() != 1 || !response["vectors"][0].is_array()) {
    throw Error("EmbedderUnavailable", "embed response lacks a vectors[1] array",
                ErrorKind::Endpoint);
  }
  auto vec = response["vectors"][0].get<std::vector<double>>();
  if (vec.empty()) {
    throw Error("EmbedderUnavailable", "embedder returned an empty vector", ErrorKind::Endpoint);
  }
  if (dimension_ == 0) dimension_ = vec.size();
  if (vec.size() != dimension_) {
    throw Error("EmbedderUnavailable", "embedder changed output dimension", ErrorKind::Endpoint);
  }
  return vec;
}

std::size_t HttpEmbedder::dimension() const { return dimension_; }

HttpGrammarChecker::HttpGrammarChecker(std::string base_url, std::string language,
                                       int timeout_seconds)
    : base_url_(normalize_base_url(base_url)),
      language_(std::move(language)),
      timeout_seconds_(timeout_seconds) {}

bool HttpGrammarChecker::check(std::string_view sentence) const {
  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_seconds_, 0);
  client.set_read_timeout(timeout_seconds_, 0);
  const httplib::Params params = {{"text", std::string(sentence)}, {"language", language_}};
  auto res = client.Post("/v2/check", params);
  if (!res) {
    throw Error("CheckerUnavailable", "cannot reach " + base_url_ + "/v2/check (" +
                                          httplib::to_string(res.error()) + ")",
                ErrorKind::Endpoint);
  }
  if (res->status != 200) {
    throw Error("CheckerUnavailable",
                base_url_ + "/v2/check returned status " + std::to_string(res->status),
                ErrorKind::Endpoint);
  }
  try {
    const json response = json::parse(res->body);
    return response.contains("matches") && response["matches"].is_array() &&
           !response["matches"].empty();
  } catch (const json::exception& e) {
    throw Error("CheckerUnavailable", std::string("unparseable checker response: ") + e.what(),
                ErrorKind::Endpoint);
  }
}

}  // namespace stylometer
