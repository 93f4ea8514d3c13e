#pragma once

#include <map>
#include <string>
#include <string_view>

namespace cpsync {

namespace slot {
inline constexpr const char* kProblemDescription = "Problem description";
inline constexpr const char* kInputSpec = "Specification of the input parameters";
inline constexpr const char* kOutputSpec = "Specification of the required output formats";
inline constexpr const char* kOutputVariables = "A list of decision variables used in the generated model";
inline constexpr const char* kDvarInfo = "dvar_info";
inline constexpr const char* kCheckerCode = "Code of all semantic checkers";
inline constexpr const char* kCandidateCode = "Code of all candidate models";
inline constexpr const char* kCheckerOutcomes = "Checker outcomes for each candidate";
inline constexpr const char* kErrorMessage = "error message";
inline constexpr const char* kCurrentModel = "Code of the current model";
inline constexpr const char* kSemanticFeedback = "Feedback from all semantic checkers for the current model";
}  // namespace slot

/// Substitutes `{slot name}` placeholders; `{{` and `}}` yield literal braces.
/// Throws TemplateError for a placeholder with no value.
std::string fill_template(std::string_view text, const std::map<std::string, std::string>& slots);

/// Named prompt templates. The built-in set is compiled from prompts/*.txt;
/// a directory of same-named files overrides individual templates.
class PromptLibrary {
  public:
    static PromptLibrary builtin();
    static PromptLibrary with_overrides(const std::string& directory);

    [[nodiscard]] const std::string& raw(const std::string& name) const;
    [[nodiscard]] std::string render(const std::string& name, const std::map<std::string, std::string>& slots) const;

  private:
    std::map<std::string, std::string> templates_;
};

}  // namespace cpsync
