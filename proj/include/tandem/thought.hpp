#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tandem {

enum class ThoughtRole {
    Initial,
    Feedback,
    Updated,
    Intervened,
};

inline constexpr const char* to_string(ThoughtRole role) {
    switch (role) {
        case ThoughtRole::Initial: return "initial";
        case ThoughtRole::Feedback: return "feedback";
        case ThoughtRole::Updated: return "updated";
        case ThoughtRole::Intervened: return "intervened";
    }
    return "unknown";
}

/// One model-authored reasoning artifact at one step.
/// Feedback thoughts reference exactly one target; updated thoughts reference
/// the author's initial thought plus the K-1 feedback thoughts addressed to it.
struct Thought {
    int id = 0;            // unique within a run
    int author = 0;        // backend index; kReflectiveIndex for interventions
    int step = 1;
    ThoughtRole role = ThoughtRole::Initial;
    std::string text;
    std::vector<int> source_refs;
};

/// The K refined intuitions emitted for one step, ordered by author index.
struct ThoughtSet {
    int step = 1;
    std::vector<Thought> members;

    std::size_t size() const { return members.size(); }
};

}  // namespace tandem
