#include "lenschain/family.hpp"

#include <filesystem>
#include <map>

#include "lenschain/errors.hpp"
#include "lenschain/mapio.hpp"

namespace lenschain {

namespace {

constexpr std::string_view kFig1 =
    "N = 2\n"
    "A_L = 6/5*cos(2*pi*p1), 1, -9/25, 0\n"
    "A_R = 2/p2*cos(2*pi*p1), 1, -1/p2^2, 0\n"
    "b = 1, 0\n"
    "mu = 1\n"
    "box = 0, 0.5, 0.25, 1.25\n";

std::vector<Expression> parse_entries(const KeyValue& kv, std::size_t expected) {
    const std::vector<Entry> entries = split_entries(kv.value, kv.value_column);
    if (entries.size() != expected) {
        throw ParseError("'" + kv.key + "' needs " + std::to_string(expected) + " entries, got " +
                             std::to_string(entries.size()),
                         kv.line, kv.value_column);
    }
    std::vector<Expression> out;
    out.reserve(expected);
    for (const Entry& e : entries) {
        if (e.text.empty()) throw ParseError("empty entry", kv.line, e.column);
        out.push_back(Expression::parse(e.text, kv.line, e.column));
    }
    return out;
}

std::array<double, 4> parse_box(const KeyValue& kv) {
    const std::vector<Entry> entries = split_entries(kv.value, kv.value_column);
    if (entries.size() != 4) throw ParseError("'box' needs 4 entries", kv.line, kv.value_column);
    std::array<double, 4> box{};
    for (std::size_t i = 0; i < 4; ++i) box[i] = evaluate_constant(entries[i].text, kv.line, entries[i].column);
    return box;
}

void corner_check(const FamilySpec& spec) {
    const auto& bx = spec.box;
    if (!(bx[0] < bx[1]) || !(bx[2] < bx[3])) throw ConfigError("box must satisfy p1_min < p1_max, p2_min < p2_max");
    const double corners[4][2] = {{bx[0], bx[2]}, {bx[1], bx[2]}, {bx[0], bx[3]}, {bx[1], bx[3]}};
    for (const auto& c : corners) {
        for (const auto* list : {&spec.a_left, &spec.a_right, &spec.b}) {
            for (const Expression& e : *list) {
                try {
                    e.evaluate_checked(c[0], c[1]);
                } catch (const EvalError& err) {
                    throw EvalError("'" + e.source() + "' at box corner (" + format_double(c[0]) + ", " +
                                    format_double(c[1]) + "): " + err.what());
                }
            }
        }
    }
}

}  // namespace

PwaMap FamilySpec::instantiate(double p1, double p2) const {
    std::vector<double> al(n * n), ar(n * n);
    Vector bv(n);
    for (std::size_t i = 0; i < n * n; ++i) {
        al[i] = a_left[i].evaluate_checked(p1, p2);
        ar[i] = a_right[i].evaluate_checked(p1, p2);
    }
    for (std::size_t i = 0; i < n; ++i) bv[i] = b[i].evaluate_checked(p1, p2);
    return PwaMap(Matrix(n, std::move(al)), Matrix(n, std::move(ar)), std::move(bv));
}

MapFamily FamilySpec::family() const {
    MapFamily f;
    f.builder = [spec = *this](double p1, double p2) { return spec.instantiate(p1, p2); };
    f.mu = mu;
    f.box = box;
    return f;
}

FamilySpec parse_family(std::string_view text) {
    std::map<std::string, KeyValue> kv;
    for (KeyValue& item : read_key_values(text)) {
        if (item.key != "N" && item.key != "A_L" && item.key != "A_R" && item.key != "b" && item.key != "mu" &&
            item.key != "box") {
            throw ParseError("unknown key '" + item.key + "'", item.line, 1);
        }
        if (kv.count(item.key)) throw ParseError("duplicate key '" + item.key + "'", item.line, 1);
        kv.emplace(item.key, std::move(item));
    }
    for (const char* required : {"N", "A_L", "A_R", "b"}) {
        if (!kv.count(required)) throw ConfigError(std::string("family is missing '") + required + "'");
    }
    FamilySpec spec;
    const KeyValue& nkv = kv.at("N");
    const double nval = evaluate_constant(nkv.value, nkv.line, nkv.value_column);
    if (nval < 1 || nval > static_cast<double>(kMaxDim) || nval != static_cast<double>(static_cast<int>(nval))) {
        throw ParseError("N must be an integer in [1, " + std::to_string(kMaxDim) + "]", nkv.line, nkv.value_column);
    }
    spec.n = static_cast<std::size_t>(nval);
    spec.a_left = parse_entries(kv.at("A_L"), spec.n * spec.n);
    spec.a_right = parse_entries(kv.at("A_R"), spec.n * spec.n);
    spec.b = parse_entries(kv.at("b"), spec.n);
    if (kv.count("mu")) {
        const KeyValue& m = kv.at("mu");
        spec.mu = evaluate_constant(m.value, m.line, m.value_column);
    }
    if (kv.count("box")) spec.box = parse_box(kv.at("box"));

    for (std::size_t r = 0; r < spec.n; ++r) {
        for (std::size_t c = 1; c < spec.n; ++c) {
            const std::size_t k = r * spec.n + c;
            if (!spec.a_left[k].same_program(spec.a_right[k])) {
                throw ContinuityViolated("A_L and A_R differ in column " + std::to_string(c + 1) + ", row " +
                                         std::to_string(r + 1) + ": '" + spec.a_left[k].source() + "' vs '" +
                                         spec.a_right[k].source() + "'");
            }
        }
    }
    corner_check(spec);
    return spec;
}

FamilySpec builtin_family(std::string_view name) {
    if (name == "fig1") {
        FamilySpec spec = parse_family(kFig1);
        spec.built_in = "fig1";
        return spec;
    }
    throw ConfigError("unknown built-in family '" + std::string(name) + "'");
}

FamilySpec load_family(const std::string& name_or_path) {
    if (name_or_path == "fig1") return builtin_family(name_or_path);
    return parse_family(read_text_file(name_or_path));
}

void set_box(FamilySpec& spec, const std::array<double, 4>& box) {
    spec.box = box;
    corner_check(spec);
}

}  // namespace lenschain
