#include "mvflow/toml.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mvflow/errors.hpp"

namespace mvflow::toml {

Value Value::num(double v, bool integer) {
    Value out;
    out.kind = Kind::Number;
    out.number = v;
    out.is_integer = integer;
    return out;
}
Value Value::string(std::string v) {
    Value out;
    out.kind = Kind::String;
    out.str = std::move(v);
    return out;
}
Value Value::boolean_v(bool v) {
    Value out;
    out.kind = Kind::Boolean;
    out.boolean = v;
    return out;
}
Value Value::array_v(std::vector<Value> v) {
    Value out;
    out.kind = Kind::Array;
    out.array = std::move(v);
    return out;
}
Value Value::table_v(std::map<std::string, Value> v) {
    Value out;
    out.kind = Kind::Table;
    out.table = std::move(v);
    return out;
}

namespace {

struct Cursor {
    const std::string& s;
    size_t pos = 0;
    int line = 1;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("toml: line " + std::to_string(line) + ": " + msg);
    }
    bool done() const { return pos >= s.size(); }
    char peek() const { return pos < s.size() ? s[pos] : '\0'; }
    char take() {
        char c = s[pos++];
        if (c == '\n') ++line;
        return c;
    }
    void skip_inline_ws() {
        while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
    }
    void skip_ws_and_comments() {
        while (!done()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                take();
            } else if (c == '#') {
                while (!done() && peek() != '\n') ++pos;
            } else {
                break;
            }
        }
    }
};

bool is_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

std::string parse_key(Cursor& cur) {
    cur.skip_inline_ws();
    std::string key;
    while (!cur.done() && is_key_char(cur.peek())) key.push_back(cur.take());
    if (key.empty()) cur.fail("expected a key");
    return key;
}

Value parse_value(Cursor& cur);

Value parse_inline_table(Cursor& cur) {
    // on entry the '{' is consumed
    std::map<std::string, Value> out;
    cur.skip_inline_ws();
    if (cur.peek() == '}') {
        cur.take();
        return Value::table_v(std::move(out));
    }
    while (true) {
        std::string key = parse_key(cur);
        cur.skip_inline_ws();
        if (cur.peek() != '=') cur.fail("expected '=' in inline table");
        cur.take();
        cur.skip_inline_ws();
        if (!out.emplace(key, parse_value(cur)).second)
            cur.fail("duplicate key '" + key + "' in inline table");
        cur.skip_inline_ws();
        char c = cur.peek();
        if (c == ',') {
            cur.take();
            cur.skip_inline_ws();
            continue;
        }
        if (c == '}') {
            cur.take();
            return Value::table_v(std::move(out));
        }
        cur.fail("expected ',' or '}' in inline table");
    }
}

Value parse_array(Cursor& cur) {
    std::vector<Value> out;
    cur.skip_ws_and_comments();
    if (cur.peek() == ']') {
        cur.take();
        return Value::array_v(std::move(out));
    }
    while (true) {
        cur.skip_ws_and_comments();
        out.push_back(parse_value(cur));
        cur.skip_ws_and_comments();
        char c = cur.peek();
        if (c == ',') {
            cur.take();
            cur.skip_ws_and_comments();
            if (cur.peek() == ']') {
                cur.take();
                return Value::array_v(std::move(out));
            }
            continue;
        }
        if (c == ']') {
            cur.take();
            return Value::array_v(std::move(out));
        }
        cur.fail("expected ',' or ']' in array");
    }
}

Value parse_value(Cursor& cur) {
    char c = cur.peek();
    if (c == '"') {
        cur.take();
        std::string out;
        while (!cur.done() && cur.peek() != '"') {
            char ch = cur.take();
            if (ch == '\\' && !cur.done()) {
                char esc = cur.take();
                switch (esc) {
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    default: cur.fail("unsupported escape");
                }
            } else {
                out.push_back(ch);
            }
        }
        if (cur.done()) cur.fail("unterminated string");
        cur.take();
        return Value::string(std::move(out));
    }
    if (c == '[') {
        cur.take();
        return parse_array(cur);
    }
    if (c == '{') {
        cur.take();
        return parse_inline_table(cur);
    }
    // bare token: bool or number
    std::string tok;
    while (!cur.done()) {
        char ch = cur.peek();
        if (ch == ',' || ch == ']' || ch == '}' || ch == '\n' || ch == '#' || ch == ' ' ||
            ch == '\t' || ch == '\r')
            break;
        tok.push_back(cur.take());
    }
    if (tok == "true") return Value::boolean_v(true);
    if (tok == "false") return Value::boolean_v(false);
    if (tok.empty()) cur.fail("expected a value");
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) cur.fail("malformed value '" + tok + "'");
    bool integer = tok.find_first_of(".eE") == std::string::npos;
    return Value::num(v, integer);
}

} // namespace

Table parse(const std::string& text) {
    Table root;
    Cursor cur{text};
    std::string section;
    while (true) {
        cur.skip_ws_and_comments();
        if (cur.done()) break;
        if (cur.peek() == '[') {
            cur.take();
            section = parse_key(cur);
            cur.skip_inline_ws();
            if (cur.peek() != ']') cur.fail("expected ']' after table name");
            cur.take();
            if (root.count(section) && root[section].kind != Value::Kind::Table)
                cur.fail("table name collides with a key: " + section);
            if (!root.count(section)) root[section] = Value::table_v({});
            continue;
        }
        std::string key = parse_key(cur);
        cur.skip_inline_ws();
        if (cur.peek() != '=') cur.fail("expected '=' after key '" + key + "'");
        cur.take();
        cur.skip_inline_ws();
        Value v = parse_value(cur);
        Table& target = section.empty() ? root : root[section].table;
        if (!target.emplace(key, std::move(v)).second)
            cur.fail("duplicate key '" + key + "'");
    }
    return root;
}

Table parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

namespace {

std::string fmt_number(const Value& v) {
    if (v.is_integer && std::abs(v.number) < 9.0e15 && v.number == std::floor(v.number)) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v.number));
        return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v.number);
    std::string s = buf;
    if (s.find_first_of(".eEnN") == std::string::npos) s += ".0";
    return s;
}

std::string serialize_value(const Value& v) {
    switch (v.kind) {
        case Value::Kind::Number: return fmt_number(v);
        case Value::Kind::Boolean: return v.boolean ? "true" : "false";
        case Value::Kind::String: {
            std::string out = "\"";
            for (char c : v.str) {
                if (c == '"' || c == '\\') out.push_back('\\');
                out.push_back(c);
            }
            out.push_back('"');
            return out;
        }
        case Value::Kind::Array: {
            std::string out = "[";
            for (size_t i = 0; i < v.array.size(); ++i) {
                if (i) out += ", ";
                out += serialize_value(v.array[i]);
            }
            out += "]";
            return out;
        }
        case Value::Kind::Table: {
            std::string out = "{ ";
            bool first = true;
            for (const auto& [k, val] : v.table) {
                if (!first) out += ", ";
                first = false;
                out += k + " = " + serialize_value(val);
            }
            out += " }";
            return out;
        }
    }
    return {};
}

} // namespace

std::string serialize(const Table& root) {
    std::string out;
    // scalars first, then [table] sections, keys sorted
    for (const auto& [k, v] : root)
        if (v.kind != Value::Kind::Table) out += k + " = " + serialize_value(v) + "\n";
    for (const auto& [k, v] : root) {
        if (v.kind != Value::Kind::Table) continue;
        out += "\n[" + k + "]\n";
        for (const auto& [kk, vv] : v.table) out += kk + " = " + serialize_value(vv) + "\n";
    }
    return out;
}

} // namespace mvflow::toml
