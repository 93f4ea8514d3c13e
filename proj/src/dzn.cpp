#include "cpsync/dzn.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <vector>

#include "cpsync/errors.hpp"

namespace cpsync::dzn {
namespace {

enum class Tok { Ident, Int, Float, String, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space_and_comments();
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, "", line_});
                return out;
            }
            out.push_back(next());
        }
    }

  private:
    [[noreturn]] void fail(const std::string& what) const {
        throw DznParseError("line " + std::to_string(line_) + ": " + what);
    }

    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else if (c == '/' && peek(1) == '*') {
                pos_ += 2;
                while (pos_ < src_.size() && !(src_[pos_] == '*' && peek(1) == '/')) {
                    if (src_[pos_] == '\n') ++line_;
                    ++pos_;
                }
                if (pos_ >= src_.size()) fail("unterminated comment");
                pos_ += 2;
            } else {
                return;
            }
        }
    }

    Token next() {
        const char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos_;
            return {Tok::Ident, std::string(src_.substr(start, pos_ - start)), line_};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return number();
        if (c == '"') return string_literal();
        if (c == '[' && peek(1) == '|') {
            pos_ += 2;
            return {Tok::Punct, "[|", line_};
        }
        if (c == '|' && peek(1) == ']') {
            pos_ += 2;
            return {Tok::Punct, "|]", line_};
        }
        if (c == '.' && peek(1) == '.') {
            pos_ += 2;
            return {Tok::Punct, "..", line_};
        }
        if (std::string_view("=;,[]{}|()-+").find(c) != std::string_view::npos) {
            ++pos_;
            return {Tok::Punct, std::string(1, c), line_};
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    Token number() {
        const std::size_t start = pos_;
        bool is_float = false;
        if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
            pos_ += 2;
            while (std::isxdigit(static_cast<unsigned char>(peek()))) ++pos_;
            const auto text = std::string(src_.substr(start, pos_ - start));
            return {Tok::Int, std::to_string(std::stoll(text, nullptr, 16)), line_};
        }
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            is_float = true;
            ++pos_;
            while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        }
        if (peek() == 'e' || peek() == 'E') {
            std::size_t look = 1;
            if (peek(1) == '+' || peek(1) == '-') look = 2;
            if (std::isdigit(static_cast<unsigned char>(peek(look)))) {
                is_float = true;
                pos_ += look;
                while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            }
        }
        return {is_float ? Tok::Float : Tok::Int, std::string(src_.substr(start, pos_ - start)), line_};
    }

    Token string_literal() {
        ++pos_;
        std::string value;
        while (true) {
            if (pos_ >= src_.size()) fail("unterminated string");
            const char c = src_[pos_++];
            if (c == '"') break;
            if (c == '\n') fail("newline in string");
            if (c == '\\') {
                const char e = pos_ < src_.size() ? src_[pos_++] : '\0';
                switch (e) {
                    case 'n': value.push_back('\n'); break;
                    case 't': value.push_back('\t'); break;
                    case '"': value.push_back('"'); break;
                    case '\\': value.push_back('\\'); break;
                    default: fail("unsupported escape in string");
                }
            } else {
                value.push_back(c);
            }
        }
        return {Tok::String, value, line_};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

class Parser {
  public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Json parse_items() {
        Json out = Json::object();
        while (cur().kind != Tok::End) {
            if (cur().kind != Tok::Ident) fail("expected parameter name");
            const std::string name = cur().text;
            advance();
            expect("=");
            Json value = expression();
            if (out.contains(name)) fail("duplicate assignment to '" + name + "'");
            out[name] = std::move(value);
            expect(";");
        }
        return out;
    }

  private:
    [[noreturn]] void fail(const std::string& what) const {
        throw DznParseError("line " + std::to_string(cur().line) + ": " + what);
    }
    const Token& cur() const { return toks_[idx_]; }
    void advance() {
        if (idx_ + 1 < toks_.size()) ++idx_;
    }
    bool is_punct(std::string_view p) const { return cur().kind == Tok::Punct && cur().text == p; }
    void expect(std::string_view p) {
        if (!is_punct(p)) fail("expected '" + std::string(p) + "'");
        advance();
    }

    Json expression() {
        Json lhs = scalar_or_compound();
        if (is_punct("..")) {
            advance();
            Json rhs = scalar_or_compound();
            if (!lhs.is_number_integer() || !rhs.is_number_integer()) fail("range bounds must be integers");
            Json set = Json::array();
            for (std::int64_t v = lhs.get<std::int64_t>(); v <= rhs.get<std::int64_t>(); ++v) set.push_back(v);
            return set;
        }
        return lhs;
    }

    Json scalar_or_compound() {
        if (is_punct("-") || is_punct("+")) {
            const bool negate = is_punct("-");
            advance();
            Json v = scalar_or_compound();
            if (!v.is_number()) fail("sign applied to non-number");
            if (!negate) return v;
            if (v.is_number_float()) return -v.get<double>();
            return -v.get<std::int64_t>();
        }
        const Token t = cur();
        switch (t.kind) {
            case Tok::Int: advance(); return std::stoll(t.text);
            case Tok::Float: advance(); return std::stod(t.text);
            case Tok::String: advance(); return t.text;
            case Tok::Ident:
                if (t.text == "true" || t.text == "false") {
                    advance();
                    return t.text == "true";
                }
                if (t.text.rfind("array", 0) == 0 && t.text.size() > 6 && t.text.back() == 'd') {
                    return array_nd(t.text);
                }
                fail("unsupported identifier '" + t.text + "'");
            case Tok::Punct:
                if (t.text == "[") return array_1d();
                if (t.text == "[|") return array_2d();
                if (t.text == "{") return set_literal();
                if (t.text == "(") {
                    advance();
                    Json v = expression();
                    expect(")");
                    return v;
                }
                fail("unexpected '" + t.text + "'");
            case Tok::End: fail("unexpected end of input");
        }
        fail("unreachable");
    }

    Json array_1d() {
        expect("[");
        Json out = Json::array();
        while (!is_punct("]")) {
            out.push_back(expression());
            if (is_punct(",")) {
                advance();
            } else if (!is_punct("]")) {
                fail("expected ',' or ']' in array");
            }
        }
        advance();
        return out;
    }

    Json array_2d() {
        expect("[|");
        Json rows = Json::array();
        Json row = Json::array();
        while (!is_punct("|]")) {
            if (is_punct("|")) {
                rows.push_back(std::move(row));
                row = Json::array();
                advance();
                continue;
            }
            row.push_back(expression());
            if (is_punct(",")) advance();
            else if (!is_punct("|") && !is_punct("|]")) fail("expected ',', '|' or '|]' in 2d array");
        }
        advance();
        if (!row.empty() || rows.empty()) rows.push_back(std::move(row));
        if (rows.size() == 1 && rows[0].empty()) return Json::array();
        for (const auto& r : rows) {
            if (r.size() != rows[0].size()) fail("ragged rows in 2d array");
        }
        return rows;
    }

    Json set_literal() {
        expect("{");
        std::vector<Json> items;
        while (!is_punct("}")) {
            items.push_back(expression());
            if (is_punct(",")) advance();
            else if (!is_punct("}")) fail("expected ',' or '}' in set");
        }
        advance();
        std::sort(items.begin(), items.end());
        items.erase(std::unique(items.begin(), items.end()), items.end());
        return Json(items);
    }

    Json array_nd(const std::string& fn) {
        const std::string digits = fn.substr(5, fn.size() - 6);
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
            fail("unsupported function '" + fn + "'");
        }
        const std::size_t dims = std::stoul(digits);
        advance();
        expect("(");
        std::vector<std::size_t> extents;
        for (std::size_t d = 0; d < dims; ++d) {
            Json index_set = expression();
            if (!index_set.is_array()) fail("index set must be a range or set");
            extents.push_back(index_set.size());
            expect(",");
        }
        Json flat = expression();
        expect(")");
        if (!flat.is_array()) fail(fn + " needs an array argument");
        std::size_t total = 1;
        for (auto e : extents) total *= e;
        if (flat.size() != total) fail(fn + " element count does not match index sets");
        if (dims <= 1) return flat;
        std::size_t cursor = 0;
        std::function<Json(std::size_t)> build = [&](std::size_t d) -> Json {
            Json level = Json::array();
            for (std::size_t i = 0; i < extents[d]; ++i) {
                level.push_back(d + 1 == dims ? flat[cursor++] : build(d + 1));
            }
            return level;
        };
        return build(0);
    }

    std::vector<Token> toks_;
    std::size_t idx_ = 0;
};

std::string render_float(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
        std::ostringstream out;
        out << static_cast<long long>(v) << ".0";
        return out.str();
    }
    return Json(v).dump();
}

std::size_t depth_of(const Json& v) {
    std::size_t depth = 0;
    const Json* cur = &v;
    while (cur->is_array()) {
        ++depth;
        if (cur->empty()) break;
        cur = &(*cur)[0];
    }
    return depth;
}

void flatten(const Json& v, std::vector<const Json*>& out) {
    if (v.is_array()) {
        for (const auto& e : v) flatten(e, out);
    } else {
        out.push_back(&v);
    }
}

}  // namespace

Json parse(std::string_view text) {
    Lexer lexer(text);
    Parser parser(lexer.run());
    return parser.parse_items();
}

std::string render_literal(const Json& value) {
    switch (value.type()) {
        case Json::value_t::boolean: return value.get<bool>() ? "true" : "false";
        case Json::value_t::number_integer:
        case Json::value_t::number_unsigned: return value.dump();
        case Json::value_t::number_float: return render_float(value.get<double>());
        case Json::value_t::string: return value.dump();
        case Json::value_t::array: {
            const std::size_t depth = depth_of(value);
            if (depth <= 1 || value.empty()) {
                std::string out = "[";
                for (std::size_t i = 0; i < value.size(); ++i) {
                    if (i) out += ", ";
                    out += render_literal(value[i]);
                }
                return out + "]";
            }
            std::vector<std::size_t> extents;
            const Json* cur = &value;
            for (std::size_t d = 0; d < depth; ++d) {
                extents.push_back(cur->size());
                cur = cur->empty() ? cur : &(*cur)[0];
            }
            std::vector<const Json*> leaves;
            flatten(value, leaves);
            std::size_t total = 1;
            for (auto e : extents) total *= e;
            if (leaves.size() != total) throw DznParseError("cannot render ragged nested array as MiniZinc literal");
            std::string out = "array" + std::to_string(depth) + "d(";
            for (auto e : extents) out += "1.." + std::to_string(e) + ", ";
            out += "[";
            for (std::size_t i = 0; i < leaves.size(); ++i) {
                if (i) out += ", ";
                out += render_literal(*leaves[i]);
            }
            return out + "])";
        }
        default: throw DznParseError("value has no MiniZinc literal form: " + value.dump());
    }
}

std::string render_data(const Json& params) {
    std::string out;
    for (const auto& [name, value] : params.items()) {
        out += name + " = " + render_literal(value) + ";\n";
    }
    return out;
}

bool values_equal(const Json& a, const Json& b) {
    if (a.is_number() && b.is_number()) {
        if (a.is_number_float() || b.is_number_float()) return a.get<double>() == b.get<double>();
        return a.get<std::int64_t>() == b.get<std::int64_t>();
    }
    if (a.type() != b.type()) return false;
    if (a.is_array()) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!values_equal(a[i], b[i])) return false;
        }
        return true;
    }
    if (a.is_object()) {
        if (a.size() != b.size()) return false;
        for (const auto& [k, v] : a.items()) {
            if (!b.contains(k) || !values_equal(v, b.at(k))) return false;
        }
        return true;
    }
    return a == b;
}

}  // namespace cpsync::dzn
