#include "cpsync/output_spec.hpp"

#include <cctype>

#include "cpsync/errors.hpp"

namespace cpsync {
namespace {

class DimensionParser {
  public:
    DimensionParser(const std::string& text, const Json& params) : text_(text), params_(params) {}

    long long parse() {
        const long long v = expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + text_.substr(pos_) + "'");
        return v;
    }

  private:
    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("bad shape expression \"" + text_ + "\": " + why);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    long long expr() {
        long long v = term();
        for (;;) {
            if (eat('+')) {
                v += term();
            } else if (eat('-')) {
                v -= term();
            } else {
                return v;
            }
        }
    }

    long long term() {
        long long v = factor();
        for (;;) {
            if (eat('*')) {
                v *= factor();
            } else if (eat('/')) {
                const long long d = factor();
                if (d == 0) fail("division by zero");
                v /= d;
            } else if (eat('%')) {
                const long long d = factor();
                if (d == 0) fail("division by zero");
                v %= d;
            } else {
                return v;
            }
        }
    }

    long long factor() {
        skip_space();
        if (eat('-')) return -factor();
        if (eat('(')) {
            const long long v = expr();
            if (!eat(')')) fail("missing ')'");
            return v;
        }
        if (pos_ >= text_.size()) fail("unexpected end");
        if (std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            long long v = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                v = v * 10 + (text_[pos_++] - '0');
            }
            return v;
        }
        const std::string name = identifier();
        if (name == "len") {
            if (!eat('(')) fail("len needs a parameter");
            skip_space();
            const std::string param = identifier();
            if (!eat(')')) fail("missing ')'");
            if (!params_.contains(param) || !params_[param].is_array()) fail(param + " is not an array parameter");
            return static_cast<long long>(params_[param].size());
        }
        if (!params_.contains(name) || !params_[name].is_number_integer()) fail(name + " is not an integer parameter");
        return params_[name].get<long long>();
    }

    std::string identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        if (start == pos_) fail("expected a name at '" + text_.substr(start) + "'");
        return text_.substr(start, pos_ - start);
    }

    const std::string& text_;
    const Json& params_;
    std::size_t pos_ = 0;
};

bool kind_matches(const Json& v, ElementKind kind) {
    switch (kind) {
        case ElementKind::Int: return v.is_number_integer();
        case ElementKind::Float: return v.is_number();
        case ElementKind::String: return v.is_string();
        case ElementKind::Bool: return v.is_boolean();
    }
    return false;
}

std::string path_text(const std::string& key, const std::vector<std::size_t>& path) {
    std::string out = key;
    for (auto i : path) out += "[" + std::to_string(i) + "]";
    return out;
}

/// First problem found below `value`, if any.
std::optional<std::string> check_field(const std::string& key, const Json& value, const OutputField& field,
                                       const std::vector<std::optional<long long>>& dims, std::size_t depth,
                                       std::vector<std::size_t>& path) {
    if (depth == dims.size()) {
        if (kind_matches(value, field.element_kind)) return std::nullopt;
        return path_text(key, path) + ": expected " + to_string(field.element_kind) + ", got " + value.dump();
    }
    if (!value.is_array()) {
        return path_text(key, path) + ": expected a list at depth " + std::to_string(depth + 1) + ", got " +
               std::string(value.type_name());
    }
    if (dims[depth] && static_cast<long long>(value.size()) != *dims[depth]) {
        return path_text(key, path) + ": expected length " + std::to_string(*dims[depth]) + ", got " +
               std::to_string(value.size());
    }
    for (std::size_t i = 0; i < value.size(); ++i) {
        path.push_back(i);
        auto problem = check_field(key, value[i], field, dims, depth + 1, path);
        path.pop_back();
        if (problem) return problem;
    }
    return std::nullopt;
}

}  // namespace

std::optional<long long> eval_dimension(const std::string& expression, const Json& params) {
    const auto first = expression.find_first_not_of(" \t");
    if (first != std::string::npos && expression[first] == '?' &&
        expression.find_first_not_of(" \t", first + 1) == std::string::npos) {
        return std::nullopt;
    }
    return DimensionParser(expression, params).parse();
}

std::vector<std::string> validate_output(const Json& solution, const OutputSpec& spec, const Json& params) {
    if (!solution.is_object()) return {"output is not a key-value map (got " + std::string(solution.type_name()) + ")"};
    std::vector<std::string> problems;
    for (const auto& [key, field] : spec) {
        if (!solution.contains(key)) problems.push_back("missing key: " + key);
    }
    for (const auto& [key, value] : solution.items()) {
        if (!spec.count(key)) problems.push_back("unexpected key: " + key);
    }
    for (const auto& [key, field] : spec) {
        if (!solution.contains(key)) continue;
        std::vector<std::optional<long long>> dims;
        for (const auto& d : field.shape) dims.push_back(eval_dimension(d, params));
        std::vector<std::size_t> path;
        if (auto problem = check_field(key, solution[key], field, dims, 0, path)) problems.push_back(*problem);
    }
    return problems;
}

}  // namespace cpsync
