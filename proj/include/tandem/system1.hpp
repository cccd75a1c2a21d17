#pragma once

#include <vector>

#include "tandem/engine.hpp"
#include "tandem/thought.hpp"

namespace tandem::system1 {

/// Each ensemble member proposes one initial thought for the step, carrying
/// the previous step's final thought in its prompt when present. Results are
/// ordered by backend index. K calls tagged "initial".
std::vector<Thought> propose_initial(Engine& engine, const StepInput& input);

/// Cross-exchange: for every ordered pair (critic j, target k), j != k,
/// backend j writes one feedback thought on initial thought k. K(K-1) calls
/// tagged "interact", none when K == 1. Flat result ordered (j asc, k asc).
std::vector<Thought> exchange_feedback(Engine& engine, const StepInput& input,
                                       const std::vector<Thought>& initial);

/// Each backend revises its own thought from the K-1 feedback thoughts
/// addressed to it, aggregated with labeled separators. K calls tagged
/// "update". With K == 1 the initial thought passes through relabeled, with
/// no call.
ThoughtSet update_thoughts(Engine& engine, const StepInput& input,
                           const std::vector<Thought>& initial,
                           const std::vector<Thought>& feedback);

/// propose -> exchange -> update. Generation call count per invocation is
/// K^2 + K for K >= 2 (and 1 for K == 1).
ThoughtSet run(Engine& engine, const StepInput& input);

}  // namespace tandem::system1
