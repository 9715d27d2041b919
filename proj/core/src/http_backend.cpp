#include "subjpipe/http_backend.hpp"

#include <httplib.h>

#include <cstdlib>
#include <json.hpp>

namespace subjpipe {
namespace {

class HttpBackend final : public TranslationBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {}

  std::string name() const override { return "http"; }

  std::string translate(std::string_view text, Language source) override {
    // One client per call; httplib clients are not shared across threads.
    httplib::Client client(config_.endpoint);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    httplib::Headers headers{{"Authorization", "Bearer " + config_.api_key}};
    auto response = client.Post(config_.path, headers, encode_translation_request(text, source),
                                "application/json");
    if (!response) {
      throw Error("translation request failed: " + httplib::to_string(response.error()));
    }
    if (response->status != 200) {
      throw Error("translation request returned HTTP " + std::to_string(response->status));
    }
    return decode_translation_response(response->body);
  }

 private:
  HttpBackendConfig config_;
};

}  // namespace

std::string encode_translation_request(std::string_view text, Language source) {
  nlohmann::json body{
      {"text", text},
      {"source", source == Language::multi ? std::string("auto") : std::string(to_string(source))},
      {"target", "en"},
  };
  return body.dump();
}

std::string decode_translation_response(std::string_view body) {
  const auto json = nlohmann::json::parse(body, nullptr, false);
  if (json.is_discarded() || !json.is_object() || !json.contains("translation") ||
      !json["translation"].is_string()) {
    throw Error("malformed translation response");
  }
  return json["translation"].get<std::string>();
}

std::unique_ptr<TranslationBackend> http_backend(HttpBackendConfig config) {
  if (config.endpoint.empty()) throw Error("HTTP translation backend needs an endpoint");
  return std::make_unique<HttpBackend>(std::move(config));
}

std::optional<HttpBackendConfig> http_config_from_env(std::string endpoint) {
  const char* key = std::getenv(std::string(kMtKeyEnvVar).c_str());
  if (key == nullptr || *key == '\0') return std::nullopt;
  HttpBackendConfig config;
  config.endpoint = std::move(endpoint);
  config.api_key = key;
  return config;
}

}  // namespace subjpipe
