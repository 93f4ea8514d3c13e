#include "cpsync/response_parsing.hpp"

#include <algorithm>
#include <regex>

namespace cpsync::parsing {

std::optional<std::string> first_code_block(std::string_view text) {
    std::size_t open = text.find("```");
    while (open != std::string_view::npos) {
        const std::size_t line_end = text.find('\n', open);
        if (line_end == std::string_view::npos) return std::nullopt;
        std::size_t close = text.find("```", line_end + 1);
        if (close == std::string_view::npos) return std::nullopt;
        std::string body(text.substr(line_end + 1, close - line_end - 1));
        while (!body.empty() && (body.back() == '\n' || body.back() == '\r' || body.back() == ' ')) body.pop_back();
        if (!body.empty()) return body + "\n";
        open = text.find("```", close + 3);
    }
    return std::nullopt;
}

namespace {

std::optional<Json> try_parse_object(std::string_view text) {
    try {
        Json j = Json::parse(text);
        if (j.is_object()) return j;
    } catch (const Json::parse_error&) {
    }
    return std::nullopt;
}

std::size_t balanced_end(std::string_view text, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}' && --depth == 0) return i;
    }
    return std::string_view::npos;
}

}  // namespace

std::optional<Json> first_json_object(std::string_view text) {
    if (auto whole = try_parse_object(text)) return whole;
    if (auto block = first_code_block(text)) {
        if (auto parsed = try_parse_object(*block)) return parsed;
    }
    for (std::size_t open = text.find('{'); open != std::string_view::npos; open = text.find('{', open + 1)) {
        const std::size_t close = balanced_end(text, open);
        if (close == std::string_view::npos) continue;
        if (auto parsed = try_parse_object(text.substr(open, close - open + 1))) return parsed;
    }
    return std::nullopt;
}

std::vector<std::pair<int, std::string>> tagged_tasks(std::string_view text) {
    static const std::regex task_re(R"(<task(\d+)>([\s\S]*?)</task\1>)");
    std::vector<std::pair<int, std::string>> tasks;
    const std::string owned(text);
    for (auto it = std::sregex_iterator(owned.begin(), owned.end(), task_re); it != std::sregex_iterator(); ++it) {
        std::string body = (*it)[2].str();
        const auto first = body.find_first_not_of(" \t\r\n");
        const auto last = body.find_last_not_of(" \t\r\n");
        body = first == std::string::npos ? "" : body.substr(first, last - first + 1);
        tasks.emplace_back(std::stoi((*it)[1].str()), std::move(body));
    }
    std::stable_sort(tasks.begin(), tasks.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return tasks;
}

bool defines_function(std::string_view source, std::string_view name, int arity) {
    const std::regex def_re("(^|\\n)def\\s+" + std::string(name) + "\\s*\\(([^)]*)\\)\\s*(->[^:]*)?:");
    const std::string owned(source);
    std::smatch m;
    if (!std::regex_search(owned, m, def_re)) return false;
    const std::string params = m[2].str();
    int count = 0;
    bool any = false;
    int depth = 0;
    for (char c : params) {
        if (c == '[' || c == '(' || c == '{') ++depth;
        else if (c == ']' || c == ')' || c == '}') --depth;
        else if (c == ',' && depth == 0) {
            if (any) ++count;
            any = false;
            continue;
        }
        if (c == '*' || c == '/') return false;
        if (c != ' ' && c != '\t' && c != '\n') any = true;
    }
    if (any) ++count;
    return count == arity;
}

}  // namespace cpsync::parsing
