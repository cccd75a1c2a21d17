#include "tandem/system2.hpp"

namespace tandem::system2 {

Thought intervene(Engine& engine, const StepInput& input, const Thought& best) {
    const auto& tmpl = engine.templates().get("default", prompts::Role::Intervene);
    std::string prompt =
        prompts::render(tmpl, {{"task", input.task_text}, {"thought", best.text}});
    CompletionRequest request{std::move(prompt), engine.options().max_output,
                              engine.options().intervene_temperature, input.step,
                              Phase::Intervene};
    try {
        CompletionResponse response = engine.complete(kReflectiveIndex, request);
        return Thought{engine.next_thought_id(), kReflectiveIndex, input.step,
                       ThoughtRole::Intervened, std::move(response.text), {best.id}};
    } catch (const BackendError& e) {
        throw BackendError(e.backend(),
                           "step " + std::to_string(input.step) + " failed: " + e.what());
    }
}

}  // namespace tandem::system2
