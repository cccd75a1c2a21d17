#pragma once

#include <chrono>
#include <string>

#include "tandem/backend.hpp"

namespace tandem {

/// Connection settings for one remote provider endpoint.
struct RemoteConfig {
    std::string name;           // label used in logs and price tables
    std::string endpoint;       // e.g. "https://api.example.com" or "http://127.0.0.1:8080"
    std::string model;          // provider model identifier sent on the wire
    std::string provider = "openai-chat";  // adapter table key
    std::string api_key_env;    // environment variable holding the credential
    int max_retries = 2;        // transport retries beyond the first attempt
    std::chrono::milliseconds backoff{250};  // doubled after each retry
    std::chrono::seconds timeout{60};
};

/// Remote LLM provider speaking a minimal chat-completion JSON shape:
/// POST {path} {"model", "messages":[{"role":"user","content"}], "max_tokens",
/// "temperature"}. The adapter table maps provider names to request path and
/// response fields; token usage comes from the provider's usage report.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(RemoteConfig config);

    CompletionResponse complete(const CompletionRequest& request) override;
    const std::string& name() const override { return config_.name; }

private:
    RemoteConfig config_;
    std::string api_key_;
};

/// True iff `provider` has an adapter (currently "openai-chat").
bool provider_supported(const std::string& provider);

}  // namespace tandem
