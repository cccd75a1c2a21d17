#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tandem/errors.hpp"
#include "tandem/usage.hpp"

namespace tandem {

/// Identity of one backend within a run configuration. Indices 0..K-1 are the
/// intuition ensemble; kReflectiveIndex is the distinguished reflective model.
struct BackendId {
    int index = 0;
    std::string name;
};

inline constexpr int kReflectiveIndex = -1;

struct CompletionRequest {
    std::string prompt;
    int max_output = 512;
    double temperature = 0.0;
    int step = 0;
    Phase phase = Phase::Initial;
};

struct CompletionResponse {
    std::string text;
    Usage usage;  // input_tokens >= 1, output_tokens >= 0
};

/// Pricing and sizing metadata for one backend.
struct PriceEntry {
    double input_per_million = 0.0;
    double output_per_million = 0.0;
};

struct BackendProfile {
    BackendId id;
    PriceEntry price;
    std::optional<double> param_count;  // required only for FLOPs accounting
    std::string kind;                   // "remote" | "scripted"
};

/// Uniform completion interface. Implementations must tolerate concurrent
/// complete() calls.
class Backend {
public:
    virtual ~Backend() = default;

    virtual CompletionResponse complete(const CompletionRequest& request) = 0;
    virtual const std::string& name() const = 0;
};

// ---------------------------------------------------------------------------
// Scripted backend
// ---------------------------------------------------------------------------

struct ScriptEntry {
    std::string text;
    Usage usage{1, 1};
};

/// Deterministic mock: returns scripted entries in order, independent of the
/// prompt. An entry list may be keyed by phase so, e.g., evaluation calls draw
/// from a separate score script. Script consumption is serialized internally.
class ScriptedBackend : public Backend {
public:
    ScriptedBackend(std::string name, std::vector<ScriptEntry> script, bool cycle = false);

    /// Phase-keyed variant. Phases without a script fall back to the default
    /// script (if any); a missing script is an exhaustion error.
    ScriptedBackend(std::string name,
                    std::map<Phase, std::vector<ScriptEntry>> scripts,
                    std::vector<ScriptEntry> fallback = {},
                    bool cycle = false);

    CompletionResponse complete(const CompletionRequest& request) override;
    const std::string& name() const override { return name_; }

private:
    struct Cursor {
        std::vector<ScriptEntry> entries;
        std::size_t next = 0;
    };

    CompletionResponse take(Cursor& cursor);

    std::string name_;
    std::map<Phase, Cursor> by_phase_;
    Cursor fallback_;
    bool cycle_ = false;
    std::mutex mutex_;
};

std::unique_ptr<Backend> make_scripted_backend(std::string name,
                                               std::vector<ScriptEntry> script,
                                               bool cycle = false);

// ---------------------------------------------------------------------------
// Call log
// ---------------------------------------------------------------------------

struct CallRecord {
    int backend_index = 0;
    std::string backend_name;
    Phase phase = Phase::Initial;
    int step = 0;
    Usage usage;
};

/// Append-only per-run record of every completion call, tagged with the
/// request's phase. Safe under concurrent appends.
class CallLog {
public:
    void append(CallRecord record);

    std::vector<CallRecord> snapshot() const;
    std::size_t size() const;

    std::size_t count(Phase phase) const;
    std::size_t count(Phase phase, int step) const;

    Usage total() const;
    Usage total(Phase phase, int step) const;
    std::map<std::string, Usage> totals_by_backend() const;

private:
    mutable std::mutex mutex_;
    std::vector<CallRecord> records_;
};

}  // namespace tandem
