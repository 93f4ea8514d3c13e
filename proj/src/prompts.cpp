#include "cpsync/prompts.hpp"

#include <filesystem>

#include "cpsync/canonical.hpp"
#include "cpsync/errors.hpp"

namespace cpsync {
namespace detail {
const std::map<std::string, std::string>& builtin_prompts();
}

std::string fill_template(std::string_view text, const std::map<std::string, std::string>& slots) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '{' && i + 1 < text.size() && text[i + 1] == '{') {
            out.push_back('{');
            ++i;
        } else if (c == '}' && i + 1 < text.size() && text[i + 1] == '}') {
            out.push_back('}');
            ++i;
        } else if (c == '{') {
            const std::size_t close = text.find('}', i);
            if (close == std::string_view::npos) throw TemplateError("unterminated placeholder");
            const std::string name(text.substr(i + 1, close - i - 1));
            const auto it = slots.find(name);
            if (it == slots.end()) throw TemplateError("no value for placeholder {" + name + "}");
            out += it->second;
            i = close;
        } else {
            out.push_back(c);
        }
    }
    return out;
}

PromptLibrary PromptLibrary::builtin() {
    PromptLibrary lib;
    lib.templates_ = detail::builtin_prompts();
    return lib;
}

PromptLibrary PromptLibrary::with_overrides(const std::string& directory) {
    PromptLibrary lib = builtin();
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        if (entry.path().extension() == ".txt") {
            lib.templates_[entry.path().stem().string()] = read_text_file(entry.path().string());
        }
    }
    return lib;
}

const std::string& PromptLibrary::raw(const std::string& name) const {
    const auto it = templates_.find(name);
    if (it == templates_.end()) throw TemplateError("unknown prompt template '" + name + "'");
    return it->second;
}

std::string PromptLibrary::render(const std::string& name, const std::map<std::string, std::string>& slots) const {
    return fill_template(raw(name), slots);
}

}  // namespace cpsync
