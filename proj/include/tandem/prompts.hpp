#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tandem/errors.hpp"

namespace tandem::prompts {

/// Prompt role within a reasoning step. Step templates are additionally keyed
/// by their step number.
enum class Role {
    Step,       // task description for step t
    Interact,   // peer feedback on another backend's thought
    Update,     // revise own thought from aggregated feedback
    Evaluate,   // confidence scoring of one thought
    Intervene,  // reflective rewrite of the best thought
};

const char* to_string(Role role);
std::optional<Role> role_from_string(const std::string& name);

struct PromptTemplate {
    std::string id;                          // "<task>.<role>[<step>]"
    std::string body;                        // text with {name} placeholders
    std::vector<std::string> demonstrations; // prepended in order at render time
};

/// Unbound placeholder names surface as this error.
class RenderError : public ValidationError {
public:
    RenderError(const std::string& what, std::vector<std::string> missing)
        : ValidationError(what), missing_(std::move(missing)) {}

    const std::vector<std::string>& missing() const { return missing_; }

private:
    std::vector<std::string> missing_;
};

/// Substitutes {name} placeholders from `bindings` and prepends the template's
/// demonstrations. "{{" and "}}" escape literal braces. Pure: same template and
/// bindings always yield identical text.
std::string render(const PromptTemplate& tmpl,
                   const std::map<std::string, std::string>& bindings);

/// Placeholder names referenced by a template body, in order of appearance.
std::vector<std::string> placeholders(const std::string& body);

/// Registry of templates for (task, role, step). Lookup falls back to the
/// task-independent defaults, so tasks only override what differs. Read-only
/// after load.
class TemplateSet {
public:
    /// Built-in defaults for the shipped tasks.
    static TemplateSet builtin();

    /// Loads "<task>.<role>.txt" files from a directory over the built-ins.
    /// Role names: "step<N>", "interact", "update", "evaluate", "intervene".
    /// "<task>.step<N>.demo<J>.txt" files attach demonstrations (J ascending).
    static TemplateSet load_dir(const std::string& path);

    const PromptTemplate& get(const std::string& task, Role role, int step = 0) const;
    bool has(const std::string& task, Role role, int step = 0) const;

    void put(const std::string& task, Role role, int step, PromptTemplate tmpl);

private:
    static std::string key(const std::string& task, Role role, int step);
    std::map<std::string, PromptTemplate> templates_;
};

}  // namespace tandem::prompts
