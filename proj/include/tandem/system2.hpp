#pragma once

#include "tandem/engine.hpp"
#include "tandem/thought.hpp"

namespace tandem::system2 {

/// Reflective rewrite of the step's best intuitive thought by the scaled-up
/// backend: exactly one call tagged "intervene", prompt carrying the task
/// context and only that thought. The result overrides the intuition in all
/// downstream prompts.
Thought intervene(Engine& engine, const StepInput& input, const Thought& best);

}  // namespace tandem::system2
