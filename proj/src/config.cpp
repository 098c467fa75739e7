#include "frontlab/config.hpp"

#include "frontlab/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

namespace frontlab {

namespace {

class Parser {
public:
    Parser(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

    nlohmann::json parse()
    {
        nlohmann::json root = nlohmann::json::object();
        nlohmann::json* table = &root;
        while (!at_end()) {
            skip_blank();
            if (at_end()) break;
            const char ch = peek();
            if (ch == '\n') {
                advance();
                continue;
            }
            if (ch == '#') {
                skip_comment();
                continue;
            }
            if (ch == '[') {
                advance();
                skip_blank();
                std::vector<std::string> keys = parse_key();
                skip_blank();
                expect(']');
                table = &open_table(root, keys, true);
                end_of_line();
                continue;
            }
            std::vector<std::string> keys = parse_key();
            skip_blank();
            expect('=');
            skip_blank();
            const std::size_t value_line = line_;
            nlohmann::json value = parse_value();
            nlohmann::json* target = table;
            for (std::size_t i = 0; i + 1 < keys.size(); ++i) target = &open_table(*target, {keys[i]}, false);
            if (target->contains(keys.back())) error_at(value_line, "duplicate key '" + keys.back() + "'");
            (*target)[keys.back()] = std::move(value);
            end_of_line();
        }
        return root;
    }

private:
    [[noreturn]] void error_at(std::size_t line, const std::string& msg) const
    {
        std::ostringstream out;
        out << source_ << ':' << line << ": " << msg;
        fail(ErrorKind::Config, out.str());
    }
    [[noreturn]] void error(const std::string& msg) const { error_at(line_, msg); }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }
    char advance()
    {
        const char ch = text_[pos_++];
        if (ch == '\n') ++line_;
        return ch;
    }
    void skip_blank()
    {
        while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
    }
    void skip_comment()
    {
        while (!at_end() && peek() != '\n') advance();
    }
    /// Blank, comments and newlines (inside arrays).
    void skip_space()
    {
        for (;;) {
            skip_blank();
            if (peek() == '#') {
                skip_comment();
            } else if (peek() == '\n') {
                advance();
            } else {
                return;
            }
        }
    }
    void expect(char ch)
    {
        if (peek() != ch) error(std::string("expected '") + ch + "'");
        advance();
    }
    void end_of_line()
    {
        skip_blank();
        if (peek() == '#') skip_comment();
        if (at_end()) return;
        if (peek() != '\n') error("unexpected text after value");
        advance();
    }

    static bool bare_char(char ch)
    {
        return std::isalnum(static_cast<unsigned char>(ch)) != 0 || ch == '_' || ch == '-';
    }

    std::vector<std::string> parse_key()
    {
        std::vector<std::string> keys;
        for (;;) {
            skip_blank();
            std::string key;
            if (peek() == '"') {
                key = parse_string();
            } else {
                while (!at_end() && bare_char(peek())) key.push_back(advance());
            }
            if (key.empty()) error("expected a key");
            keys.push_back(std::move(key));
            skip_blank();
            if (peek() != '.') break;
            advance();
        }
        return keys;
    }

    nlohmann::json& open_table(nlohmann::json& base, const std::vector<std::string>& keys, bool header)
    {
        nlohmann::json* node = &base;
        for (const auto& k : keys) {
            if (!node->contains(k)) {
                (*node)[k] = nlohmann::json::object();
            } else if (!(*node)[k].is_object()) {
                error("key '" + k + "' is not a table");
            }
            node = &(*node)[k];
        }
        if (header) {
            std::string joined;
            for (const auto& k : keys) joined += (joined.empty() ? "" : ".") + k;
            if (!seen_headers_.insert(joined).second) error("table [" + joined + "] defined twice");
        }
        return *node;
    }

    std::string parse_string()
    {
        expect('"');
        std::string out;
        for (;;) {
            if (at_end() || peek() == '\n') error("unterminated string");
            const char ch = advance();
            if (ch == '"') break;
            if (ch == '\\') {
                if (at_end()) error("unterminated escape");
                const char e = advance();
                switch (e) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                default: error(std::string("unsupported escape \\") + e);
                }
                continue;
            }
            out.push_back(ch);
        }
        return out;
    }

    // 'literal' strings take their contents verbatim
    std::string parse_literal()
    {
        expect('\'');
        std::string out;
        for (;;) {
            if (at_end() || peek() == '\n') error("unterminated string");
            const char ch = advance();
            if (ch == '\'') break;
            out.push_back(ch);
        }
        return out;
    }

    nlohmann::json parse_value()
    {
        const char ch = peek();
        if (ch == '"') return parse_string();
        if (ch == '\'') return parse_literal();
        if (ch == '[') {
            advance();
            nlohmann::json arr = nlohmann::json::array();
            skip_space();
            while (peek() != ']') {
                if (at_end()) error("unterminated array");
                if (peek() == '[') error("nested arrays are not supported");
                arr.push_back(parse_value());
                skip_space();
                if (peek() == ',') {
                    advance();
                    skip_space();
                } else if (peek() != ']') {
                    error("expected ',' or ']' in array");
                }
            }
            advance();
            return arr;
        }
        if (ch == '{') error("inline tables are not supported; use a [table] header");
        std::string token;
        while (!at_end() && peek() != ',' && peek() != ']' && peek() != '\n' && peek() != '#' && peek() != ' '
               && peek() != '\t' && peek() != '\r') {
            token.push_back(advance());
        }
        if (token.empty()) error("expected a value");
        if (token == "true") return true;
        if (token == "false") return false;
        if (token == "inf" || token == "+inf") return std::numeric_limits<double>::infinity();
        if (token == "-inf") return -std::numeric_limits<double>::infinity();
        std::string digits;
        for (char c : token) {
            if (c != '_') digits.push_back(c);
        }
        const bool integral = digits.find_first_of(".eE") == std::string::npos;
        if (integral) {
            long long iv = 0;
            const char* first = digits.data() + (digits[0] == '+' ? 1 : 0);
            auto [p, ec] = std::from_chars(first, digits.data() + digits.size(), iv);
            if (ec == std::errc() && p == digits.data() + digits.size()) return iv;
        }
        char* end = nullptr;
        const double v = std::strtod(digits.c_str(), &end);
        if (end != digits.c_str() + digits.size()) error("invalid value '" + token + "'");
        return v;
    }

    std::string_view text_;
    std::string source_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::set<std::string> seen_headers_;
};

std::vector<std::string> split_path(std::string_view dotted)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t dot = dotted.find('.', start);
        parts.emplace_back(dotted.substr(start, dot == std::string_view::npos ? dotted.npos : dot - start));
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return parts;
}

} // namespace

nlohmann::json parse_config(std::string_view text, const std::string& source)
{
    return Parser(text, source).parse();
}

nlohmann::json load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

const nlohmann::json* find_path(const nlohmann::json& root, std::string_view dotted)
{
    const nlohmann::json* node = &root;
    for (const auto& key : split_path(dotted)) {
        if (!node->is_object()) return nullptr;
        auto it = node->find(key);
        if (it == node->end()) return nullptr;
        node = &*it;
    }
    return node;
}

const nlohmann::json& require_path(const nlohmann::json& root, std::string_view dotted)
{
    const nlohmann::json* node = find_path(root, dotted);
    if (node == nullptr) fail(ErrorKind::Config, "missing required key '" + std::string(dotted) + "'");
    return *node;
}

void set_path(nlohmann::json& root, std::string_view dotted, nlohmann::json value)
{
    nlohmann::json* node = &root;
    const auto parts = split_path(dotted);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->contains(parts[i]) || !(*node)[parts[i]].is_object()) (*node)[parts[i]] = nlohmann::json::object();
        node = &(*node)[parts[i]];
    }
    (*node)[parts.back()] = std::move(value);
}

double get_number(const nlohmann::json& root, std::string_view dotted)
{
    const nlohmann::json& v = require_path(root, dotted);
    if (!v.is_number()) fail(ErrorKind::Config, "key '" + std::string(dotted) + "' must be a number");
    return v.get<double>();
}

double get_number(const nlohmann::json& root, std::string_view dotted, double fallback)
{
    return find_path(root, dotted) == nullptr ? fallback : get_number(root, dotted);
}

std::string get_string(const nlohmann::json& root, std::string_view dotted)
{
    const nlohmann::json& v = require_path(root, dotted);
    if (!v.is_string()) fail(ErrorKind::Config, "key '" + std::string(dotted) + "' must be a string");
    return v.get<std::string>();
}

std::string get_string(const nlohmann::json& root, std::string_view dotted, const std::string& fallback)
{
    return find_path(root, dotted) == nullptr ? fallback : get_string(root, dotted);
}

bool get_bool(const nlohmann::json& root, std::string_view dotted, bool fallback)
{
    const nlohmann::json* v = find_path(root, dotted);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) fail(ErrorKind::Config, "key '" + std::string(dotted) + "' must be true or false");
    return v->get<bool>();
}

} // namespace frontlab
