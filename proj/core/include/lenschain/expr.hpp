#pragma once

// Tiny arithmetic grammar for matrix entries of map families:
//   decimal literals, p1, p2, pi, + - * /, unary -, parentheses,
//   cos(.), sin(.) and integer powers x^k.
// Expressions compile to a flat stack program so evaluation never allocates.

#include <string>
#include <string_view>
#include <vector>

namespace lenschain {

class Expression {
public:
    Expression() = default;

    /// `line` and `column` locate the text inside a larger file for ParseError.
    static Expression parse(std::string_view text, int line = 1, int column = 1);

    double evaluate(double p1 = 0.0, double p2 = 0.0) const noexcept;

    /// Like evaluate() but throws EvalError on division by zero or a
    /// non-finite result.
    double evaluate_checked(double p1 = 0.0, double p2 = 0.0) const;

    bool depends_on_parameters() const noexcept;
    const std::string& source() const noexcept { return source_; }

    /// Structural equality of the compiled programs ("1" == "1.0").
    bool same_program(const Expression& other) const noexcept;

    enum class Op : unsigned char { Const, P1, P2, Add, Sub, Mul, Div, Neg, Pow, Cos, Sin };
    struct Instr {
        Op op;
        double value = 0.0;  // Const
        int exponent = 0;    // Pow

        friend bool operator==(const Instr&, const Instr&) = default;
    };

    static constexpr int kMaxStack = 64;

private:
    friend class ExpressionParser;
    template <bool Checked>
    double run(double p1, double p2) const;

    std::vector<Instr> code_;
    std::string source_;
};

/// Evaluates a parameter-free expression (e.g. "28/87", "-23/14", "1.5").
double evaluate_constant(std::string_view text, int line = 1, int column = 1);

/// One `key = value` line of a config file.
struct KeyValue {
    std::string key;
    std::string value;
    int line = 0;
    int value_column = 0;
};

/// Splits `key = value` lines; blank lines and `#` comments are skipped.
/// Throws ParseError on lines without '='.
std::vector<KeyValue> read_key_values(std::string_view text);

struct Entry {
    std::string text;
    int column = 0;
};

/// Splits a row-major list on ',' or ';' keeping column positions.
std::vector<Entry> split_entries(std::string_view value, int value_column);

}  // namespace lenschain
