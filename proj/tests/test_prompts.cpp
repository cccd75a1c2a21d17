#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tandem/prompts.hpp"

using namespace tandem;
using namespace tandem::prompts;

TEST_CASE("render substitutes bound placeholders") {
    PromptTemplate tmpl{"t", "Solve: {q}", {}};
    CHECK(render(tmpl, {{"q", "2+2"}}) == "Solve: 2+2");
}

TEST_CASE("render fails on unbound placeholders, naming them") {
    PromptTemplate tmpl{"t", "Solve: {q} with {hint}", {}};
    try {
        render(tmpl, {});
        FAIL("expected RenderError");
    } catch (const RenderError& e) {
        REQUIRE(e.missing().size() == 2);
        CHECK(e.missing()[0] == "q");
        CHECK(e.missing()[1] == "hint");
        CHECK(std::string(e.what()).find("q") != std::string::npos);
    }
}

TEST_CASE("doubled braces escape literals") {
    PromptTemplate tmpl{"t", "a {{literal}} and {x}", {}};
    CHECK(render(tmpl, {{"x", "X"}}) == "a {literal} and X");
}

TEST_CASE("rendering is pure") {
    PromptTemplate tmpl{"t", "{a}-{b}-{a}", {}};
    std::map<std::string, std::string> bindings{{"a", "1"}, {"b", "2"}};
    CHECK(render(tmpl, bindings) == "1-2-1");
    CHECK(render(tmpl, bindings) == render(tmpl, bindings));
}

TEST_CASE("placeholders are extracted in order, once each") {
    auto names = placeholders("{x} {y} {x} {{not}} {z}");
    REQUIRE(names.size() == 3);
    CHECK(names[0] == "x");
    CHECK(names[1] == "y");
    CHECK(names[2] == "z");
}

TEST_CASE("demonstrations are prepended in declared order") {
    PromptTemplate tmpl{"t", "body {q}", {"demo one", "demo two"}};
    std::string text = render(tmpl, {{"q", "Q"}});
    CHECK(text == "demo one\n\ndemo two\n\nbody Q");
}

TEST_CASE("builtin one-shot template puts its demonstration before the task text") {
    TemplateSet set = TemplateSet::builtin();
    const auto& tmpl = set.get("game24", Role::Step, 1);
    REQUIRE(tmpl.demonstrations.size() == 1);
    std::string text = render(tmpl, {{"numbers", "4 9 10 13"}});
    auto demo_pos = text.find("4 4 6 8");
    auto task_pos = text.find("4 9 10 13");
    REQUIRE(demo_pos != std::string::npos);
    REQUIRE(task_pos != std::string::npos);
    CHECK(demo_pos < task_pos);
}

TEST_CASE("builtin evaluate prompt pins the 0 to 5 score range") {
    TemplateSet set = TemplateSet::builtin();
    std::string text =
        render(set.get("anytask", Role::Evaluate), {{"task", "T"}, {"thought", "X"}});
    CHECK(text.find("0 to 5") != std::string::npos);
}

TEST_CASE("lookup falls back from task to defaults") {
    TemplateSet set = TemplateSet::builtin();
    CHECK(set.get("unheard_of", Role::Interact).id == set.get("default", Role::Interact).id);
    CHECK(set.get("unheard_of", Role::Step, 1).body == "{question}");
    // step 3 of an unknown task falls back to the generic single-step template
    CHECK(set.get("unheard_of", Role::Step, 3).body == "{question}");
}

TEST_CASE("template files override builtins and demo files attach in index order") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "tandem_tpl_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream out(dir / name);
        out << text;
    };
    write("game24.step1.txt", "custom {numbers}\n");
    write("game24.step1.demo2.txt", "second demo\n");
    write("game24.step1.demo1.txt", "first demo\n");
    write("mytask.evaluate.txt", "rate 0 to 5: {thought} for {task}\n");

    TemplateSet set = TemplateSet::load_dir(dir.string());
    const auto& tmpl = set.get("game24", Role::Step, 1);
    CHECK(tmpl.body == "custom {numbers}");
    REQUIRE(tmpl.demonstrations.size() == 2);
    CHECK(tmpl.demonstrations[0] == "first demo");
    CHECK(tmpl.demonstrations[1] == "second demo");
    CHECK(set.get("mytask", Role::Evaluate).body.find("rate 0 to 5") == 0);
    // untouched defaults still resolve
    CHECK(set.has("default", Role::Update));

    fs::remove_all(dir);
}

TEST_CASE("loading a missing directory fails") {
    CHECK_THROWS_AS(TemplateSet::load_dir("/nonexistent/tandem/templates"), ValidationError);
}
