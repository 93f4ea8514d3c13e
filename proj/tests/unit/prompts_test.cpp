#include <filesystem>

#include <gtest/gtest.h>

#include "cpsync/canonical.hpp"
#include "cpsync/errors.hpp"
#include "cpsync/prompts.hpp"
#include "environment.hpp"

using namespace cpsync;

TEST(FillTemplate, SubstitutesSlotsAndBraces) {
    EXPECT_EQ(fill_template("a {x} b {{c}} {y z}", {{"x", "1"}, {"y z", "2"}}), "a 1 b {c} 2");
}

TEST(FillTemplate, MissingSlotThrows) {
    EXPECT_THROW(fill_template("{missing}", {}), TemplateError);
}

TEST(FillTemplate, SlotValuesAreNotReexpanded) {
    EXPECT_EQ(fill_template("{x}", {{"x", "{y}"}}), "{y}");
}

TEST(PromptLibrary, BuiltinMatchesShippedFiles) {
    const auto lib = PromptLibrary::builtin();
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(cptest::source_dir() / "prompts")) {
        const std::string name = entry.path().stem().string();
        EXPECT_EQ(lib.raw(name), read_text_file(entry.path().string())) << name;
        ++count;
    }
    EXPECT_EQ(count, 10);
}

TEST(PromptLibrary, EveryTemplateRendersWithItsSlots) {
    const auto lib = PromptLibrary::builtin();
    const std::map<std::string, std::string> all = {
        {slot::kProblemDescription, "d"}, {slot::kInputSpec, "i"},         {slot::kOutputSpec, "o"},
        {slot::kOutputVariables, "v"},    {slot::kDvarInfo, "{}"},         {slot::kCheckerCode, "c"},
        {slot::kCandidateCode, "m"},      {slot::kCheckerOutcomes, "s"},   {slot::kErrorMessage, "e"},
        {slot::kCurrentModel, "cm"},      {slot::kSemanticFeedback, "f"}};
    for (const auto& name : {"modeling_system", "validation_system", "formatting_system", "selection_system",
                             "refine_description", "plan_synthesis", "repair_runtime_error", "repair_solver_status",
                             "repair_output_format", "semantic_feedback"}) {
        EXPECT_NO_THROW(lib.render(name, all)) << name;
    }
}

TEST(PromptLibrary, DirectoryOverridesSingleTemplates) {
    const auto dir = cptest::scratch_dir("prompts");
    write_text_file((dir / "repair_solver_status.txt").string(), "custom {Code of the current model}");
    const auto lib = PromptLibrary::with_overrides(dir.string());
    EXPECT_EQ(lib.render("repair_solver_status", {{slot::kCurrentModel, "M"}}), "custom M");
    EXPECT_EQ(lib.raw("modeling_system"), PromptLibrary::builtin().raw("modeling_system"));
}

TEST(PromptLibrary, UnknownTemplateThrows) {
    EXPECT_THROW(PromptLibrary::builtin().raw("nope"), TemplateError);
}
