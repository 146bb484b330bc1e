#ifndef MVFLOW_TOML_HPP
#define MVFLOW_TOML_HPP

#include <map>
#include <string>
#include <vector>

namespace mvflow::toml {

// Minimal TOML subset used by the run configs: one level of [table]
// headers, bare keys, values that are numbers, booleans, quoted strings,
// flat arrays, or inline tables. No TOML dependency is vendored, so the
// subset is parsed here and serialized canonically (sorted keys) for
// deterministic round trips.
struct Value {
    enum class Kind { Number, String, Boolean, Array, Table };
    Kind kind = Kind::Number;
    double number = 0.0;
    bool is_integer = false;
    std::string str;
    bool boolean = false;
    std::vector<Value> array;
    std::map<std::string, Value> table;

    static Value num(double v, bool integer = false);
    static Value string(std::string v);
    static Value boolean_v(bool v);
    static Value array_v(std::vector<Value> v);
    static Value table_v(std::map<std::string, Value> v);
};

using Table = std::map<std::string, Value>;

// Throws ConfigError with line information on malformed input.
Table parse(const std::string& text);
Table parse_file(const std::string& path);

std::string serialize(const Table& root);

} // namespace mvflow::toml

#endif
