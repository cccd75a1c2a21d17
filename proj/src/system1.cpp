#include "tandem/system1.hpp"

namespace tandem::system1 {
namespace {

std::string with_prior(const StepInput& input) {
    std::string prompt = input.task_text;
    if (input.prior) {
        prompt += "\n\nThought from the previous step:\n";
        prompt += input.prior->text;
    }
    return prompt;
}

}  // namespace

std::vector<Thought> propose_initial(Engine& engine, const StepInput& input) {
    const int k = engine.ensemble_size();
    const std::string prompt = with_prior(input);

    std::vector<Thought> thoughts;
    thoughts.reserve(static_cast<std::size_t>(k));
    for (int author = 0; author < k; ++author) {
        CompletionRequest request{prompt, engine.options().max_output,
                                  engine.proposal_temperature(author), input.step,
                                  Phase::Initial};
        try {
            CompletionResponse response = engine.complete(author, request);
            thoughts.push_back(Thought{engine.next_thought_id(), author, input.step,
                                       ThoughtRole::Initial, std::move(response.text), {}});
        } catch (const BackendError& e) {
            throw BackendError(e.backend(),
                               "step " + std::to_string(input.step) + " failed: " + e.what());
        }
    }
    return thoughts;
}

std::vector<Thought> exchange_feedback(Engine& engine, const StepInput& input,
                                       const std::vector<Thought>& initial) {
    const int k = engine.ensemble_size();
    if (static_cast<int>(initial.size()) != k) {
        throw ValidationError("exchange_feedback: expected " + std::to_string(k) +
                              " initial thoughts, got " + std::to_string(initial.size()));
    }
    if (k == 1) return {};  // interaction is vacuous

    const auto& tmpl = engine.templates().get("default", prompts::Role::Interact);
    std::vector<Thought> feedback;
    feedback.reserve(static_cast<std::size_t>(k) * (k - 1));
    for (int critic = 0; critic < k; ++critic) {
        for (int target = 0; target < k; ++target) {
            if (target == critic) continue;
            std::string prompt = prompts::render(
                tmpl, {{"task", input.task_text}, {"thought", initial[target].text}});
            CompletionRequest request{std::move(prompt), engine.options().max_output,
                                      engine.options().refine_temperature, input.step,
                                      Phase::Interact};
            CompletionResponse response = engine.complete(critic, request);
            feedback.push_back(Thought{engine.next_thought_id(), critic, input.step,
                                       ThoughtRole::Feedback, std::move(response.text),
                                       {initial[target].id}});
        }
    }
    return feedback;
}

ThoughtSet update_thoughts(Engine& engine, const StepInput& input,
                           const std::vector<Thought>& initial,
                           const std::vector<Thought>& feedback) {
    const int k = engine.ensemble_size();
    if (static_cast<int>(initial.size()) != k) {
        throw ValidationError("update_thoughts: initial set size mismatch");
    }
    if (static_cast<int>(feedback.size()) != k * (k - 1)) {
        throw ValidationError("update_thoughts: feedback matrix shape mismatch");
    }

    ThoughtSet result{input.step, {}};
    result.members.reserve(static_cast<std::size_t>(k));

    if (k == 1) {
        Thought sole = initial[0];
        sole.role = ThoughtRole::Updated;
        result.members.push_back(std::move(sole));
        return result;
    }

    const auto& tmpl = engine.templates().get("default", prompts::Role::Update);
    for (int author = 0; author < k; ++author) {
        std::string aggregated;
        std::vector<int> refs{initial[author].id};
        for (const Thought& item : feedback) {
            if (!item.source_refs.empty() && item.source_refs[0] == initial[author].id) {
                aggregated += "Feedback from peer " + std::to_string(item.author) + ":\n";
                aggregated += item.text;
                aggregated += "\n\n";
                refs.push_back(item.id);
            }
        }
        if (!aggregated.empty()) aggregated.erase(aggregated.size() - 2);  // final blank line

        std::string prompt = prompts::render(tmpl, {{"task", input.task_text},
                                                    {"own", initial[author].text},
                                                    {"feedback", aggregated}});
        CompletionRequest request{std::move(prompt), engine.options().max_output,
                                  engine.options().refine_temperature, input.step,
                                  Phase::Update};
        CompletionResponse response = engine.complete(author, request);
        result.members.push_back(Thought{engine.next_thought_id(), author, input.step,
                                         ThoughtRole::Updated, std::move(response.text),
                                         std::move(refs)});
    }
    return result;
}

ThoughtSet run(Engine& engine, const StepInput& input) {
    std::vector<Thought> initial = propose_initial(engine, input);
    std::vector<Thought> feedback = exchange_feedback(engine, input, initial);
    return update_thoughts(engine, input, initial, feedback);
}

}  // namespace tandem::system1
