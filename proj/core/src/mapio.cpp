#include "lenschain/mapio.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "lenschain/errors.hpp"
#include "lenschain/expr.hpp"

namespace lenschain {

namespace {

std::vector<double> parse_list(const KeyValue& kv, std::size_t expected) {
    const std::vector<Entry> entries = split_entries(kv.value, kv.value_column);
    if (entries.size() != expected) {
        throw ParseError("'" + kv.key + "' needs " + std::to_string(expected) + " entries, got " +
                             std::to_string(entries.size()),
                         kv.line, kv.value_column);
    }
    std::vector<double> out;
    out.reserve(expected);
    for (const Entry& e : entries) {
        if (e.text.empty()) throw ParseError("empty entry", kv.line, e.column);
        out.push_back(evaluate_constant(e.text, kv.line, e.column));
    }
    return out;
}

}  // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

MapConfig parse_map_config(std::string_view text) {
    std::map<std::string, KeyValue> kv;
    for (KeyValue& item : read_key_values(text)) {
        if (item.key != "N" && item.key != "A_L" && item.key != "A_R" && item.key != "b" && item.key != "mu") {
            throw ParseError("unknown key '" + item.key + "'", item.line, 1);
        }
        if (kv.count(item.key)) throw ParseError("duplicate key '" + item.key + "'", item.line, 1);
        kv.emplace(item.key, std::move(item));
    }
    for (const char* required : {"N", "A_L", "A_R", "b"}) {
        if (!kv.count(required)) throw ConfigError(std::string("map config is missing '") + required + "'");
    }
    const KeyValue& nkv = kv.at("N");
    const double nval = evaluate_constant(nkv.value, nkv.line, nkv.value_column);
    if (nval < 1 || nval > static_cast<double>(kMaxDim) || nval != static_cast<double>(static_cast<int>(nval))) {
        throw ParseError("N must be an integer in [1, " + std::to_string(kMaxDim) + "]", nkv.line, nkv.value_column);
    }
    const auto n = static_cast<std::size_t>(nval);
    Matrix al(n, parse_list(kv.at("A_L"), n * n));
    Matrix ar(n, parse_list(kv.at("A_R"), n * n));
    Vector b = parse_list(kv.at("b"), n);
    std::optional<double> mu;
    if (kv.count("mu")) {
        const KeyValue& m = kv.at("mu");
        mu = evaluate_constant(m.value, m.line, m.value_column);
    }
    return MapConfig{PwaMap(std::move(al), std::move(ar), std::move(b)), mu};
}

MapConfig load_map_config(const std::filesystem::path& path) { return parse_map_config(read_text_file(path)); }

std::string format_map_config(const PwaMap& map, std::optional<double> mu) {
    const std::size_t n = map.dim();
    std::ostringstream os;
    auto list = [&](const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << format_double(v[i]);
        os << '\n';
    };
    os << "N = " << n << '\n';
    os << "A_L = ";
    list(map.left().data());
    os << "A_R = ";
    list(map.right().data());
    os << "b = ";
    list(map.b());
    if (mu) os << "mu = " << format_double(*mu) << '\n';
    return os.str();
}

}  // namespace lenschain
