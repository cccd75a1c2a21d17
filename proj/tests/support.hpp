#pragma once

// Shared helpers for the test binaries: scripted engine builders and a
// prompt-recording backend.

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "tandem/engine.hpp"

namespace testsupport {

using namespace tandem;

/// Scripted backend that also records every prompt it was given, so tests can
/// assert on rendered prompt content.
class EchoBackend : public Backend {
public:
    EchoBackend(std::string name, std::string reply, Usage usage = {100, 20})
        : name_(std::move(name)), reply_(std::move(reply)), usage_(usage) {}

    CompletionResponse complete(const CompletionRequest& request) override {
        if (request.prompt.empty()) throw ValidationError("empty prompt");
        {
            std::lock_guard lock(mutex_);
            prompts_.push_back(request.prompt);
            phases_.push_back(request.phase);
        }
        return CompletionResponse{reply_, usage_};
    }

    const std::string& name() const override { return name_; }

    std::vector<std::string> prompts() const {
        std::lock_guard lock(mutex_);
        return prompts_;
    }
    std::vector<Phase> phases() const {
        std::lock_guard lock(mutex_);
        return phases_;
    }

private:
    std::string name_;
    std::string reply_;
    Usage usage_;
    mutable std::mutex mutex_;
    mutable std::vector<std::string> prompts_;
    std::vector<Phase> phases_;
};

inline std::vector<ScriptEntry> entries(const std::vector<std::string>& texts,
                                        Usage usage = {100, 20}) {
    std::vector<ScriptEntry> out;
    out.reserve(texts.size());
    for (const auto& text : texts) out.push_back(ScriptEntry{text, usage});
    return out;
}

/// K scripted ensemble members plus a scripted reflective backend.
/// Generation phases cycle a single per-backend reply; evaluation draws from
/// `eval_scripts[backend]` (cycled when `cycle_eval`).
inline Engine make_scripted_engine(int k,
                                   const std::vector<std::vector<std::string>>& eval_scripts,
                                   const std::string& reflective_reply = "reflected",
                                   Usage usage = {100, 20}, GenOptions options = {},
                                   bool cycle_eval = true) {
    std::vector<std::unique_ptr<Backend>> ensemble;
    for (int i = 0; i < k; ++i) {
        std::map<Phase, std::vector<ScriptEntry>> scripts;
        if (i < static_cast<int>(eval_scripts.size()) && !eval_scripts[i].empty()) {
            scripts[Phase::Evaluate] = entries(eval_scripts[i], usage);
        }
        std::vector<ScriptEntry> fallback =
            entries({"thought from backend " + std::to_string(i)}, usage);
        ensemble.push_back(std::make_unique<ScriptedBackend>(
            "member" + std::to_string(i), std::move(scripts), std::move(fallback),
            cycle_eval));
    }
    auto reflective = std::make_unique<ScriptedBackend>(
        "reflective", entries({reflective_reply}, usage), /*cycle=*/true);
    return Engine(std::move(ensemble), std::move(reflective),
                  prompts::TemplateSet::builtin(), options);
}

/// Engine whose ensemble members all answer from one shared reply and whose
/// evaluation score is a single repeated value.
inline Engine make_uniform_engine(int k, const std::string& score,
                                  Usage usage = {100, 20}) {
    std::vector<std::vector<std::string>> eval_scripts(static_cast<std::size_t>(k),
                                                       std::vector<std::string>{score});
    return make_scripted_engine(k, eval_scripts, "reflected", usage);
}

}  // namespace testsupport
