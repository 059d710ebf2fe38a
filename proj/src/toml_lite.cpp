#include "ignite/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ignite/errors.hpp"

namespace ignite {

namespace {

using nlohmann::json;

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    json run() {
        json root = json::object();
        json* table = &root;
        while (true) {
            skip_ws_comments_newlines();
            if (eof()) break;
            if (peek() == '[') {
                ++pos_;
                if (!eof() && peek() == '[') fail("arrays of tables are not supported");
                skip_inline_ws();
                const auto path = parse_key_path();
                skip_inline_ws();
                expect(']');
                table = &descend(root, path, true);
            } else {
                const auto path = parse_key_path();
                skip_inline_ws();
                expect('=');
                skip_inline_ws();
                json value = parse_value();
                json& parent = descend(*table, {path.begin(), path.end() - 1}, false);
                if (parent.contains(path.back())) fail("duplicate key '" + path.back() + "'");
                parent[path.back()] = std::move(value);
            }
            end_of_line();
        }
        return root;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("line " + std::to_string(line_), "config syntax: " + what);
    }

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }

    void expect(char c) {
        if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_inline_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
    }

    void skip_comment() {
        if (!eof() && peek() == '#') {
            while (!eof() && peek() != '\n') ++pos_;
        }
    }

    void skip_ws_comments_newlines() {
        while (!eof()) {
            skip_inline_ws();
            skip_comment();
            if (!eof() && (peek() == '\n' || peek() == '\r')) {
                if (peek() == '\n') ++line_;
                ++pos_;
            } else {
                break;
            }
        }
    }

    void end_of_line() {
        skip_inline_ws();
        skip_comment();
        if (!eof() && peek() == '\r') ++pos_;
        if (!eof() && peek() != '\n') fail("unexpected trailing characters");
    }

    static bool bare_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    }

    std::string parse_key() {
        if (!eof() && peek() == '"') return parse_string();
        const std::size_t start = pos_;
        while (!eof() && bare_char(peek())) ++pos_;
        if (pos_ == start) fail("expected a key");
        return std::string(s_.substr(start, pos_ - start));
    }

    std::vector<std::string> parse_key_path() {
        std::vector<std::string> path{parse_key()};
        while (true) {
            skip_inline_ws();
            if (eof() || peek() != '.') break;
            ++pos_;
            skip_inline_ws();
            path.push_back(parse_key());
        }
        return path;
    }

    json& descend(json& root, const std::vector<std::string>& path, bool header) {
        json* node = &root;
        for (std::size_t i = 0; i < path.size(); ++i) {
            json& child = (*node)[path[i]];
            if (child.is_null()) {
                child = json::object();
            } else if (!child.is_object()) {
                fail("key '" + path[i] + "' is not a table");
            } else if (header && i + 1 == path.size() && !child.empty()) {
                fail("table [" + path[i] + "] defined twice");
            }
            node = &child;
        }
        return *node;
    }

    std::string parse_string() {
        expect('"');
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') fail("unterminated string");
            const char c = s_[pos_++];
            if (c == '"') break;
            if (c != '\\') {
                out.push_back(c);
                continue;
            }
            if (eof()) fail("unterminated escape");
            const char e = s_[pos_++];
            switch (e) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                default: fail(std::string("unsupported escape \\") + e);
            }
        }
        return out;
    }

    json parse_array() {
        expect('[');
        json arr = json::array();
        while (true) {
            skip_ws_comments_newlines();
            if (eof()) fail("unterminated array");
            if (peek() == ']') {
                ++pos_;
                return arr;
            }
            arr.push_back(parse_value());
            skip_ws_comments_newlines();
            if (!eof() && peek() == ',') {
                ++pos_;
            } else if (eof() || peek() != ']') {
                fail("expected ',' or ']' in array");
            }
        }
    }

    json parse_inline_table() {
        expect('{');
        json obj = json::object();
        skip_inline_ws();
        if (!eof() && peek() == '}') {
            ++pos_;
            return obj;
        }
        while (true) {
            skip_inline_ws();
            const auto path = parse_key_path();
            skip_inline_ws();
            expect('=');
            skip_inline_ws();
            json& parent = descend(obj, {path.begin(), path.end() - 1}, false);
            parent[path.back()] = parse_value();
            skip_inline_ws();
            if (!eof() && peek() == ',') {
                ++pos_;
                continue;
            }
            expect('}');
            return obj;
        }
    }

    json parse_scalar() {
        const std::size_t start = pos_;
        while (!eof() && (bare_char(peek()) || peek() == '.' || peek() == '+')) ++pos_;
        std::string tok(s_.substr(start, pos_ - start));
        if (tok.empty()) fail("expected a value");
        if (tok == "true") return true;
        if (tok == "false") return false;
        if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
        if (tok == "-inf") return -std::numeric_limits<double>::infinity();
        if (tok == "nan" || tok == "+nan" || tok == "-nan") return std::numeric_limits<double>::quiet_NaN();
        std::string clean;
        for (char c : tok) {
            if (c != '_') clean.push_back(c);
        }
        if (!clean.empty() && clean[0] == '+') clean.erase(0, 1);
        const bool is_float = clean.find_first_of(".eE") != std::string::npos;
        const char* b = clean.data();
        const char* e = clean.data() + clean.size();
        if (!is_float) {
            if (!clean.empty() && clean[0] == '-') {
                std::int64_t v = 0;
                auto [p, ec] = std::from_chars(b, e, v);
                if (ec == std::errc{} && p == e) return v;
            } else {
                std::uint64_t v = 0;
                auto [p, ec] = std::from_chars(b, e, v);
                if (ec == std::errc{} && p == e) return v;
            }
        }
        double v = 0.0;
        auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc{} || p != e) fail("invalid value '" + tok + "'");
        return v;
    }

    json parse_value() {
        if (eof()) fail("expected a value");
        switch (peek()) {
            case '"': return parse_string();
            case '[': return parse_array();
            case '{': return parse_inline_table();
            default: return parse_scalar();
        }
    }
};

}  // namespace

nlohmann::json parse_toml(std::string_view text) { return Parser(text).run(); }

nlohmann::json load_config_document(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (path.extension() == ".json") {
        try {
            return nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("", "config syntax: " + std::string(e.what()));
        }
    }
    return parse_toml(text);
}

}  // namespace ignite
