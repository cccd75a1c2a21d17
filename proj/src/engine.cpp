#include "tandem/engine.hpp"

namespace tandem {

Engine::Engine(std::vector<std::unique_ptr<Backend>> ensemble,
               std::unique_ptr<Backend> reflective,
               prompts::TemplateSet templates,
               GenOptions options)
    : ensemble_(std::move(ensemble)),
      reflective_(std::move(reflective)),
      templates_(std::move(templates)),
      options_(std::move(options)) {
    if (ensemble_.empty()) {
        throw ValidationError("engine requires at least one ensemble backend");
    }
    for (const auto& backend : ensemble_) {
        if (!backend) throw ValidationError("null ensemble backend");
    }
}

const std::string& Engine::backend_name(int index) const {
    if (index == kReflectiveIndex) {
        if (!reflective_) throw ValidationError("no reflective backend registered");
        return reflective_->name();
    }
    if (index < 0 || index >= ensemble_size()) {
        throw ValidationError("backend index out of range: " + std::to_string(index));
    }
    return ensemble_[static_cast<std::size_t>(index)]->name();
}

double Engine::proposal_temperature(int index) const {
    const auto& overrides = options_.per_backend_temperature;
    if (index >= 0 && static_cast<std::size_t>(index) < overrides.size() &&
        overrides[static_cast<std::size_t>(index)] >= 0.0) {
        return overrides[static_cast<std::size_t>(index)];
    }
    return options_.proposal_temperature;
}

CompletionResponse Engine::complete(int index, const CompletionRequest& request) {
    Backend* backend = nullptr;
    if (index == kReflectiveIndex) {
        backend = reflective_.get();
        if (backend == nullptr) {
            throw ValidationError("no reflective backend registered");
        }
    } else {
        if (index < 0 || index >= ensemble_size()) {
            throw ValidationError("backend index out of range: " + std::to_string(index));
        }
        backend = ensemble_[static_cast<std::size_t>(index)].get();
    }
    if (request.prompt.empty()) {
        throw ValidationError("empty prompt");
    }
    CompletionResponse response = backend->complete(request);
    log_.append(CallRecord{index, backend->name(), request.phase, request.step, response.usage});
    return response;
}

}  // namespace tandem
