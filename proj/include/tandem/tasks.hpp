#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tandem/backend.hpp"
#include "tandem/prompts.hpp"
#include "tandem/rational.hpp"

namespace tandem::tasks {

enum class TaskKind {
    Game24,
    Gsm8k,
    Trivia,
    OpenQa,
    LogicGrid,
    Generic,
};

/// Static description of a task family: reasoning step count, demonstration
/// count, and step templates (resolved through the template registry by id).
struct TaskSpec {
    std::string id;
    TaskKind kind = TaskKind::Generic;
    int steps = 1;           // N
    int demonstrations = 0;  // M
};

/// Task ids: game24, gsm8k, trivia, openqa, logic_grid; anything else maps to
/// the generic exact-match task.
TaskSpec make_task(const std::string& id);

/// One problem instance from a JSON-lines file: {id, payload, gold}.
struct TaskInstance {
    std::string id;
    nlohmann::json payload;
    nlohmann::json gold;
};

std::vector<TaskInstance> load_instances(const std::string& path);

/// Placeholder bindings for the step template of `step`, from the instance
/// payload.
std::map<std::string, std::string> step_bindings(const TaskSpec& task,
                                                 const TaskInstance& instance, int step);

/// Grade for one answer. `score` is empty for tasks whose grading needs an
/// external judge (open-ended tasks without gold).
struct EvalOutcome {
    std::optional<double> score;      // in [0, 1]
    std::optional<int> diversity;     // distinct correct solutions, where defined
};

EvalOutcome score_answer(const TaskSpec& task, const TaskInstance& instance,
                         const std::string& answer);

// ---------------------------------------------------------------------------
// Game of 24
// ---------------------------------------------------------------------------

/// True iff `expression` uses exactly the four given numbers once each, with
/// + - * / (ASCII or the usual unicode signs) and parentheses, and evaluates
/// to 24 exactly (rational arithmetic). Model output is untrusted input:
/// anything unparseable is false, with the reason in `diagnostic`.
bool verify_game24(std::string_view expression, const std::array<int, 4>& numbers,
                   std::string* diagnostic = nullptr);

/// Number of distinct correct expressions after whitespace normalization.
int game24_diversity(const std::vector<std::string>& expressions,
                     const std::array<int, 4>& numbers);

// ---------------------------------------------------------------------------
// Numeric answers (GSM8K-style)
// ---------------------------------------------------------------------------

/// The final number in the text, with comma grouping, decimals, and a leading
/// currency symbol supported. Empty when no number is present.
std::optional<Rational> extract_numeric_answer(std::string_view text);

// ---------------------------------------------------------------------------
// Trivia mention scoring
// ---------------------------------------------------------------------------

/// Fraction of questions whose accepted answers include at least one
/// case-insensitive substring of `text`. `answers[q]` lists the accepted
/// strings for question q; `question_count` is the denominator.
double trivia_mention_score(std::string_view text,
                            const std::vector<std::vector<std::string>>& answers,
                            int question_count);

// ---------------------------------------------------------------------------
// Pluggable judge
// ---------------------------------------------------------------------------

enum class Preference { A, B, Tie };

struct JudgeVerdict {
    Preference preference = Preference::Tie;
    std::string rationale;
};

/// Pairwise quality judgment parsed from the judge backend's output.
/// Throws ParseError when no verdict can be extracted; a judgment is never
/// silently scored.
JudgeVerdict judge_quality(Backend& judge, std::string_view question,
                           std::string_view answer_a, std::string_view answer_b);

/// Diversity score in 1..10 for two answers from the same model.
int judge_diversity(Backend& judge, std::string_view question, std::string_view answer_a,
                    std::string_view answer_b);

}  // namespace tandem::tasks
