#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tandem {

/// Token counts for one completion (or an accumulated set of them).
/// Accumulation is componentwise, so sums are associative and commutative.
struct Usage {
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;

    Usage& operator+=(const Usage& other) {
        input_tokens += other.input_tokens;
        output_tokens += other.output_tokens;
        return *this;
    }

    friend Usage operator+(Usage a, const Usage& b) { return a += b; }
    friend bool operator==(const Usage&, const Usage&) = default;

    std::int64_t total() const { return input_tokens + output_tokens; }
};

/// Pipeline phase a completion call belongs to. Every call is tagged with
/// exactly one of these; phase counts are the basis of cost accounting.
enum class Phase {
    Initial,
    Interact,
    Update,
    Evaluate,
    Intervene,
};

inline constexpr const char* to_string(Phase phase) {
    switch (phase) {
        case Phase::Initial: return "initial";
        case Phase::Interact: return "interact";
        case Phase::Update: return "update";
        case Phase::Evaluate: return "evaluate";
        case Phase::Intervene: return "intervene";
    }
    return "unknown";
}

inline std::optional<Phase> phase_from_string(std::string_view name) {
    if (name == "initial") return Phase::Initial;
    if (name == "interact") return Phase::Interact;
    if (name == "update") return Phase::Update;
    if (name == "evaluate") return Phase::Evaluate;
    if (name == "intervene") return Phase::Intervene;
    return std::nullopt;
}

}  // namespace tandem
