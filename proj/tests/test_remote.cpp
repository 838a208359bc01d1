#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ontomatch/errors.hpp"
#include "ontomatch/remote_embedding.hpp"
#include "ontomatch/remote_llm.hpp"
#include "ontomatch/pipeline.hpp"
#include "test_support.hpp"

using namespace ontomatch;
using nlohmann::json;

namespace {

// Local HTTP stub standing in for embedding/chat endpoints.
class LocalServer {
 public:
  LocalServer() = default;
  ~LocalServer() { stop(); }

  void start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }

  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

  httplib::Server server_;

 private:
  int port_ = 0;
  std::thread thread_;
};

ProviderSpec remote_spec(const std::string& endpoint, const std::string& model) {
  ProviderSpec spec;
  spec.type = "remote";
  spec.model = model;
  spec.endpoint = endpoint;
  spec.max_retries = 3;
  spec.timeout_ms = 5000;
  return spec;
}

}  // namespace

TEST_CASE("remote embedding provider round-trips a batch") {
  LocalServer server;
  server.server_.Post("/v1/embeddings", [](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body);
    REQUIRE(body.at("model") == "embed-small");
    json data = json::array();
    std::size_t i = 0;
    for (const auto& text : body.at("input")) {
      const double len = static_cast<double>(text.get<std::string>().size());
      data.push_back({{"index", i++}, {"embedding", {len, 1.0, 0.5}}});
    }
    res.set_content(json{{"data", data}}.dump(), "application/json");
  });
  server.start();

  RemoteEmbeddingProvider provider(remote_spec(server.url("/v1/embeddings"), "embed-small"));
  CHECK(provider.name() == "remote:embed-small");

  const auto vectors = embed_texts(provider, {"heart", "he"});
  REQUIRE(vectors.size() == 2);
  CHECK(std::get<DenseVector>(vectors[0]) == DenseVector{5.0, 1.0, 0.5});
  CHECK(std::get<DenseVector>(vectors[1]) == DenseVector{2.0, 1.0, 0.5});
  CHECK(provider.dimensionality() == std::size_t{3});
}

TEST_CASE("remote embedding provider retries transient failures") {
  std::atomic<int> attempts{0};
  LocalServer server;
  server.server_.Post("/v1/embeddings", [&attempts](const httplib::Request&, httplib::Response& res) {
    if (attempts.fetch_add(1) < 2) {
      res.status = 500;
      return;
    }
    res.set_content(json{{"data", {{{"index", 0}, {"embedding", {1.0, 0.0}}}}}}.dump(),
                    "application/json");
  });
  server.start();

  ProviderSpec spec = remote_spec(server.url("/v1/embeddings"), "flaky");
  RemoteEmbeddingProvider provider(spec);
  const auto vectors = provider.embed({"x"});
  REQUIRE(vectors.size() == 1);
  CHECK(attempts.load() == 3);
}

TEST_CASE("remote embedding provider gives up after bounded retries") {
  LocalServer server;
  server.server_.Post("/v1/embeddings", [](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
  });
  server.start();

  RemoteEmbeddingProvider provider(remote_spec(server.url("/v1/embeddings"), "down"));
  CHECK_THROWS_AS(provider.embed({"x"}), ProviderError);
}

TEST_CASE("remote embedding provider rejects malformed payloads") {
  LocalServer server;
  server.server_.Post("/v1/embeddings", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"data":[{"index":0,"embedding":[1.0]},{"index":1,"embedding":[1.0,2.0]}]})",
                    "application/json");
  });
  server.start();

  RemoteEmbeddingProvider provider(remote_spec(server.url("/v1/embeddings"), "mixed"));
  CHECK_THROWS_AS(provider.embed({"a", "b"}), ProviderError);
}

TEST_CASE("remote llm provider reads first-token logprobs") {
  LocalServer server;
  server.server_.Post("/v1/chat/completions", [](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body);
    REQUIRE(body.at("temperature").get<double>() == 0.0);
    REQUIRE(body.at("max_tokens").get<int>() <= 8);
    REQUIRE(body.at("logprobs").get<bool>());
    const json response = {
        {"choices",
         {{{"message", {{"role", "assistant"}, {"content", "yes"}}},
           {"logprobs",
            {{"content",
              {{{"token", "yes"},
                {"logprob", -0.2231435513},  // ~0.8
                {"top_logprobs",
                 {{{"token", "yes"}, {"logprob", -0.2231435513}},
                  {{"token", "no"}, {"logprob", -1.6094379124}}}}}}}}}}}}};  // ~0.2
    res.set_content(response.dump(), "application/json");
  });
  server.start();

  RemoteLlmProvider provider(remote_spec(server.url("/v1/chat/completions"), "chat-model"));
  const CompletionResult result = provider.complete("prompt");
  REQUIRE(result.mode == CompletionMode::probability);
  CHECK(result.token_probabilities.at("yes") == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(result.token_probabilities.at("no") == doctest::Approx(0.2).epsilon(1e-6));

  auto [cls, s_llm] = derive_confidence(result.token_probabilities);
  CHECK(cls == MatchClass::yes);
  CHECK(s_llm == doctest::Approx(0.8).epsilon(1e-6));
}

TEST_CASE("remote llm provider falls back to text mode without logprobs") {
  LocalServer server;
  server.server_.Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    const json response = {
        {"choices", {{{"message", {{"role", "assistant"}, {"content", "No, different."}}}}}}};
    res.set_content(response.dump(), "application/json");
  });
  server.start();

  ProviderSpec spec = remote_spec(server.url("/v1/chat/completions"), "plain");
  spec.logprobs = false;
  RemoteLlmProvider provider(spec);
  const CompletionResult result = provider.complete("prompt");
  CHECK(result.mode == CompletionMode::text);
  CHECK(result.text == "No, different.");
}

TEST_CASE("non-retryable HTTP errors surface immediately") {
  std::atomic<int> attempts{0};
  LocalServer server;
  server.server_.Post("/v1/chat/completions", [&attempts](const httplib::Request&, httplib::Response& res) {
    attempts.fetch_add(1);
    res.status = 400;
    res.set_content("bad request", "text/plain");
  });
  server.start();

  RemoteLlmProvider provider(remote_spec(server.url("/v1/chat/completions"), "strict"));
  CHECK_THROWS_AS(provider.complete("prompt"), ProviderError);
  CHECK(attempts.load() == 1);
}

TEST_CASE("pipeline runs end to end against remote stubs") {
  LocalServer server;
  // diagonal embedding table over the fixture labels
  server.server_.Post("/v1/embeddings", [](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body);
    json data = json::array();
    std::size_t i = 0;
    for (const auto& item : body.at("input")) {
      const std::string text = item.get<std::string>();
      DenseVector v{0.0, 0.0, 0.0};
      if (text == "heart") v = {1.0, 0.0, 0.0};
      if (text == "lung") v = {0.0, 1.0, 0.0};
      if (text == "kidney") v = {0.0, 0.0, 1.0};
      data.push_back({{"index", i++}, {"embedding", v}});
    }
    res.set_content(json{{"data", data}}.dump(), "application/json");
  });
  // chat stub: yes iff the two concept lines of the final block match
  server.server_.Post("/v1/chat/completions", [](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body);
    const std::string prompt = body.at("messages")[0].at("content").get<std::string>();
    auto line_after = [&prompt](const std::string& marker) {
      const auto at = prompt.rfind(marker);
      const auto begin = at + marker.size();
      return prompt.substr(begin, prompt.find('\n', begin) - begin);
    };
    const bool match = line_after("### First concept:\n") == line_after("### Second concept:\n");
    const double p_yes = match ? 0.9 : 0.05;
    const json response = {
        {"choices",
         {{{"message", {{"role", "assistant"}, {"content", match ? "yes" : "no"}}},
           {"logprobs",
            {{"content",
              {{{"token", match ? "yes" : "no"},
                {"logprob", std::log(match ? p_yes : 1.0 - p_yes)},
                {"top_logprobs",
                 {{{"token", "yes"}, {"logprob", std::log(p_yes)}},
                  {{"token", "no"}, {"logprob", std::log(1.0 - p_yes)}}}}}}}}}}}}};
    res.set_content(response.dump(), "application/json");
  });
  server.start();

  testsupport::TempDir dir("remote-pipeline");
  dir.write("source.json", R"({"name":"l","concepts":[
    {"id":"s1","label":"heart"},{"id":"s2","label":"lung"},{"id":"s3","label":"kidney"}]})");
  dir.write("target.json", R"({"name":"r","concepts":[
    {"id":"t1","label":"heart"},{"id":"t2","label":"lung"},{"id":"t3","label":"kidney"}]})");
  dir.write("reference.json", R"({"pairs":[
    {"source":"s1","target":"t1"},{"source":"s2","target":"t2"},{"source":"s3","target":"t3"}]})");

  RunConfig config;
  config.source_path = (dir.path() / "source.json").string();
  config.target_path = (dir.path() / "target.json").string();
  config.reference_path = (dir.path() / "reference.json").string();
  config.retriever.type = "remote";
  config.retriever.model = "stub-embed";
  config.retriever.endpoint = server.url("/v1/embeddings");
  config.llm.type = "remote";
  config.llm.model = "stub-chat";
  // endpoint deliberately left empty: resolved from the environment
  ::setenv("ONTOMATCH_LLM_ENDPOINT", server.url("/v1/chat/completions").c_str(), 1);
  config.cache_dir = (dir.path() / "cache").string();
  config.k = 2;

  const PipelineResult result = run_pipeline(config);
  ::unsetenv("ONTOMATCH_LLM_ENDPOINT");
  CHECK(result.report.metrics.f1 == doctest::Approx(1.0));
  CHECK(result.report.recall_at_k == doctest::Approx(1.0));
  CHECK(result.report.llm_calls == 6);  // 3 sources x k=2
  REQUIRE(result.alignment.mappings.size() == 3);
  for (const auto& m : result.alignment.mappings) {
    REQUIRE(m.s_llm.has_value());
    CHECK(*m.s_llm == doctest::Approx(0.9).epsilon(1e-6));
  }
}

TEST_CASE("credentials are read from the configured environment variable") {
  std::string seen_auth;
  LocalServer server;
  server.server_.Post("/v1/embeddings", [&seen_auth](const httplib::Request& req, httplib::Response& res) {
    if (req.has_header("Authorization")) seen_auth = req.get_header_value("Authorization");
    res.set_content(json{{"data", {{{"index", 0}, {"embedding", {1.0}}}}}}.dump(),
                    "application/json");
  });
  server.start();

  ::setenv("ONTOMATCH_TEST_KEY", "secret-token", 1);
  ProviderSpec spec = remote_spec(server.url("/v1/embeddings"), "auth");
  spec.api_key_env = "ONTOMATCH_TEST_KEY";
  RemoteEmbeddingProvider provider(spec);
  provider.embed({"x"});
  CHECK(seen_auth == "Bearer secret-token");
  ::unsetenv("ONTOMATCH_TEST_KEY");
}
