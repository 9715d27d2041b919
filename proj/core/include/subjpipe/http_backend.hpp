#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "subjpipe/translate.hpp"

namespace subjpipe {

inline constexpr std::string_view kMtKeyEnvVar = "SUBJPIPE_MT_KEY";

// Vendor-neutral HTTP translation adapter.
//
//   POST <endpoint><path>
//   Authorization: Bearer <api_key>
//   Content-Type: application/json
//   {"text": "...", "source": "<lang tag or auto>", "target": "en"}
//
// A 200 response must carry {"translation": "..."}; anything else throws.
struct HttpBackendConfig {
  std::string endpoint;  // scheme://host[:port]
  std::string path = "/translate";
  std::string api_key;
  std::chrono::seconds timeout{30};
};

std::string encode_translation_request(std::string_view text, Language source);
std::string decode_translation_response(std::string_view body);

std::unique_ptr<TranslationBackend> http_backend(HttpBackendConfig config);

// Config with the key taken from SUBJPIPE_MT_KEY, or nullopt when the variable
// is unset or empty.
std::optional<HttpBackendConfig> http_config_from_env(std::string endpoint);

}  // namespace subjpipe
