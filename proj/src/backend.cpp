#include "tandem/backend.hpp"

#include <algorithm>

namespace tandem {

// ---------------------------------------------------------------------------
// ScriptedBackend
// ---------------------------------------------------------------------------

ScriptedBackend::ScriptedBackend(std::string name, std::vector<ScriptEntry> script, bool cycle)
    : name_(std::move(name)), cycle_(cycle) {
    if (script.empty()) {
        throw ValidationError("scripted backend '" + name_ + "' has an empty script");
    }
    fallback_.entries = std::move(script);
}

ScriptedBackend::ScriptedBackend(std::string name,
                                 std::map<Phase, std::vector<ScriptEntry>> scripts,
                                 std::vector<ScriptEntry> fallback,
                                 bool cycle)
    : name_(std::move(name)), cycle_(cycle) {
    if (scripts.empty() && fallback.empty()) {
        throw ValidationError("scripted backend '" + name_ + "' has an empty script");
    }
    for (auto& [phase, entries] : scripts) {
        by_phase_[phase] = Cursor{std::move(entries), 0};
    }
    fallback_.entries = std::move(fallback);
}

CompletionResponse ScriptedBackend::complete(const CompletionRequest& request) {
    if (request.prompt.empty()) {
        throw ValidationError("empty prompt");
    }
    std::lock_guard lock(mutex_);
    auto it = by_phase_.find(request.phase);
    if (it != by_phase_.end() && !it->second.entries.empty()) {
        return take(it->second);
    }
    return take(fallback_);
}

CompletionResponse ScriptedBackend::take(Cursor& cursor) {
    if (cursor.next >= cursor.entries.size()) {
        if (cycle_ && !cursor.entries.empty()) {
            cursor.next = 0;
        } else {
            throw BackendError(name_, "script exhausted after " +
                                          std::to_string(cursor.entries.size()) + " entries");
        }
    }
    const ScriptEntry& entry = cursor.entries[cursor.next++];
    Usage usage = entry.usage;
    if (usage.input_tokens < 1) usage.input_tokens = 1;
    if (usage.output_tokens < 0) usage.output_tokens = 0;
    return CompletionResponse{entry.text, usage};
}

std::unique_ptr<Backend> make_scripted_backend(std::string name,
                                               std::vector<ScriptEntry> script,
                                               bool cycle) {
    return std::make_unique<ScriptedBackend>(std::move(name), std::move(script), cycle);
}

// ---------------------------------------------------------------------------
// CallLog
// ---------------------------------------------------------------------------

void CallLog::append(CallRecord record) {
    std::lock_guard lock(mutex_);
    records_.push_back(std::move(record));
}

std::vector<CallRecord> CallLog::snapshot() const {
    std::lock_guard lock(mutex_);
    return records_;
}

std::size_t CallLog::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

std::size_t CallLog::count(Phase phase) const {
    std::lock_guard lock(mutex_);
    return static_cast<std::size_t>(std::count_if(
        records_.begin(), records_.end(),
        [&](const CallRecord& r) { return r.phase == phase; }));
}

std::size_t CallLog::count(Phase phase, int step) const {
    std::lock_guard lock(mutex_);
    return static_cast<std::size_t>(std::count_if(
        records_.begin(), records_.end(),
        [&](const CallRecord& r) { return r.phase == phase && r.step == step; }));
}

Usage CallLog::total() const {
    std::lock_guard lock(mutex_);
    Usage sum;
    for (const auto& r : records_) sum += r.usage;
    return sum;
}

Usage CallLog::total(Phase phase, int step) const {
    std::lock_guard lock(mutex_);
    Usage sum;
    for (const auto& r : records_) {
        if (r.phase == phase && r.step == step) sum += r.usage;
    }
    return sum;
}

std::map<std::string, Usage> CallLog::totals_by_backend() const {
    std::lock_guard lock(mutex_);
    std::map<std::string, Usage> totals;
    for (const auto& r : records_) totals[r.backend_name] += r.usage;
    return totals;
}

}  // namespace tandem
