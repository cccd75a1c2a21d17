#include "tandem/http_backend.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace tandem {
namespace {

using nlohmann::json;

struct ProviderAdapter {
    std::string path;
    json (*build_request)(const RemoteConfig&, const CompletionRequest&);
    // Returns text + usage, throws json exceptions on shape mismatch.
    CompletionResponse (*parse_response)(const json&);
};

json openai_build(const RemoteConfig& config, const CompletionRequest& request) {
    return json{
        {"model", config.model},
        {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
        {"max_tokens", request.max_output},
        {"temperature", request.temperature},
    };
}

CompletionResponse openai_parse(const json& body) {
    CompletionResponse response;
    response.text = body.at("choices").at(0).at("message").at("content").get<std::string>();
    const auto& usage = body.at("usage");
    response.usage.input_tokens = usage.at("prompt_tokens").get<std::int64_t>();
    response.usage.output_tokens = usage.at("completion_tokens").get<std::int64_t>();
    return response;
}

const ProviderAdapter* find_adapter(const std::string& provider) {
    static const std::map<std::string, ProviderAdapter> table = {
        {"openai-chat", ProviderAdapter{"/v1/chat/completions", openai_build, openai_parse}},
    };
    auto it = table.find(provider);
    return it == table.end() ? nullptr : &it->second;
}

}  // namespace

bool provider_supported(const std::string& provider) {
    return find_adapter(provider) != nullptr;
}

HttpBackend::HttpBackend(RemoteConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) {
        throw ValidationError("remote backend '" + config_.name + "' has no endpoint");
    }
    if (!provider_supported(config_.provider)) {
        throw ValidationError("remote backend '" + config_.name + "': unknown provider '" +
                              config_.provider + "'");
    }
    if (!config_.api_key_env.empty()) {
        const char* value = std::getenv(config_.api_key_env.c_str());
        if (value == nullptr || *value == '\0') {
            throw ValidationError("remote backend '" + config_.name + "': environment variable " +
                                  config_.api_key_env + " is not set");
        }
        api_key_ = value;
    }
}

CompletionResponse HttpBackend::complete(const CompletionRequest& request) {
    if (request.prompt.empty()) {
        throw ValidationError("empty prompt");
    }
    const ProviderAdapter* adapter = find_adapter(config_.provider);
    const std::string payload = adapter->build_request(config_, request).dump();

    httplib::Headers headers;
    if (!api_key_.empty()) {
        headers.emplace("Authorization", "Bearer " + api_key_);
    }

    std::string last_error;
    auto backoff = config_.backoff;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        httplib::Client client(config_.endpoint);
        client.set_read_timeout(config_.timeout);
        client.set_connection_timeout(config_.timeout);
        auto result = client.Post(adapter->path, headers, payload, "application/json");
        if (!result) {
            last_error = "transport error: " + httplib::to_string(result.error());
            continue;
        }
        if (result->status < 200 || result->status >= 300) {
            last_error = "HTTP " + std::to_string(result->status);
            // 4xx other than 429 will not improve on retry
            if (result->status >= 400 && result->status < 500 && result->status != 429) break;
            continue;
        }
        try {
            CompletionResponse response = adapter->parse_response(json::parse(result->body));
            if (response.usage.input_tokens < 1) response.usage.input_tokens = 1;
            if (response.usage.output_tokens < 0) response.usage.output_tokens = 0;
            return response;
        } catch (const json::exception& e) {
            last_error = std::string("malformed provider response: ") + e.what();
            break;  // a well-formed-but-wrong body will not fix itself
        }
    }
    throw BackendError(config_.name, "unavailable after " + std::to_string(config_.max_retries) +
                                         " retries (" + last_error + ")");
}

}  // namespace tandem
