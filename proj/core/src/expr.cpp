#include "lenschain/expr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "lenschain/errors.hpp"

namespace lenschain {

class ExpressionParser {
public:
    ExpressionParser(std::string_view text, int line, int column) : text_(text), line_(line), col0_(column) {}

    Expression run() {
        Expression e;
        e.source_ = std::string(text_);
        code_ = &e.code_;
        skip_ws();
        if (at_end()) fail("empty expression");
        expr();
        skip_ws();
        if (!at_end()) fail(std::string("unexpected '") + text_[pos_] + "'");
        if (max_depth_ > Expression::kMaxStack) fail("expression nests too deeply");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, line_, col0_ + static_cast<int>(pos_));
    }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    void emit(Expression::Op op, double v = 0.0, int k = 0) {
        code_->push_back({op, v, k});
        using Op = Expression::Op;
        switch (op) {
            case Op::Const:
            case Op::P1:
            case Op::P2:
                ++depth_;
                break;
            case Op::Add:
            case Op::Sub:
            case Op::Mul:
            case Op::Div:
                --depth_;
                break;
            default:
                break;
        }
        if (depth_ > max_depth_) max_depth_ = depth_;
    }

    void expr() {
        term();
        for (;;) {
            if (accept('+')) {
                term();
                emit(Expression::Op::Add);
            } else if (accept('-')) {
                term();
                emit(Expression::Op::Sub);
            } else {
                return;
            }
        }
    }

    void term() {
        unary();
        for (;;) {
            if (accept('*')) {
                unary();
                emit(Expression::Op::Mul);
            } else if (accept('/')) {
                unary();
                emit(Expression::Op::Div);
            } else {
                return;
            }
        }
    }

    void unary() {
        if (accept('-')) {
            unary();
            emit(Expression::Op::Neg);
        } else if (accept('+')) {
            unary();
        } else {
            power();
        }
    }

    void power() {
        primary();
        if (accept('^')) {
            skip_ws();
            bool neg = false;
            if (peek() == '-' || peek() == '+') {
                neg = peek() == '-';
                ++pos_;
                skip_ws();
            }
            if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("exponent must be an integer literal");
            long k = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                k = k * 10 + (text_[pos_++] - '0');
                if (k > 1000) fail("exponent too large");
            }
            if (peek() == '.') fail("exponent must be an integer literal");
            emit(Expression::Op::Pow, 0.0, static_cast<int>(neg ? -k : k));
        }
    }

    void primary() {
        skip_ws();
        const char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos_;
            const std::string_view id = text_.substr(start, pos_ - start);
            if (id == "p1") {
                emit(Expression::Op::P1);
            } else if (id == "p2") {
                emit(Expression::Op::P2);
            } else if (id == "pi") {
                emit(Expression::Op::Const, std::numbers::pi);
            } else if (id == "cos" || id == "sin") {
                expect('(');
                expr();
                expect(')');
                emit(id == "cos" ? Expression::Op::Cos : Expression::Op::Sin);
            } else {
                pos_ = start;
                fail("unknown identifier '" + std::string(id) + "'");
            }
            return;
        }
        if (accept('(')) {
            expr();
            expect(')');
            return;
        }
        if (at_end()) fail("unexpected end of expression");
        fail(std::string("unexpected '") + c + "'");
    }

    void number() {
        const std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (peek() == '.') {
            ++pos_;
            while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        }
        if (peek() == 'e' || peek() == 'E') {
            std::size_t save = pos_;
            ++pos_;
            if (peek() == '+' || peek() == '-') ++pos_;
            if (!std::isdigit(static_cast<unsigned char>(peek()))) {
                pos_ = save;
            } else {
                while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            }
        }
        const std::string lit(text_.substr(start, pos_ - start));
        if (lit == ".") {
            pos_ = start;
            fail("malformed number");
        }
        emit(Expression::Op::Const, std::strtod(lit.c_str(), nullptr));
    }

    std::string_view text_;
    int line_;
    int col0_;
    std::size_t pos_ = 0;
    int depth_ = 0;
    int max_depth_ = 0;
    std::vector<Expression::Instr>* code_ = nullptr;
};

Expression Expression::parse(std::string_view text, int line, int column) {
    return ExpressionParser(text, line, column).run();
}

template <bool Checked>
double Expression::run(double p1, double p2) const {
    std::array<double, kMaxStack> st{};
    int top = -1;
    for (const Instr& in : code_) {
        switch (in.op) {
            case Op::Const:
                st[++top] = in.value;
                break;
            case Op::P1:
                st[++top] = p1;
                break;
            case Op::P2:
                st[++top] = p2;
                break;
            case Op::Add:
                st[top - 1] += st[top];
                --top;
                break;
            case Op::Sub:
                st[top - 1] -= st[top];
                --top;
                break;
            case Op::Mul:
                st[top - 1] *= st[top];
                --top;
                break;
            case Op::Div:
                if constexpr (Checked) {
                    if (st[top] == 0.0) throw EvalError("division by zero in '" + source_ + "'");
                }
                st[top - 1] /= st[top];
                --top;
                break;
            case Op::Neg:
                st[top] = -st[top];
                break;
            case Op::Pow: {
                if constexpr (Checked) {
                    if (in.exponent < 0 && st[top] == 0.0) {
                        throw EvalError("division by zero (negative power of 0) in '" + source_ + "'");
                    }
                }
                const double base = st[top];
                const int k = in.exponent < 0 ? -in.exponent : in.exponent;
                double r = 1.0;
                for (int i = 0; i < k; ++i) r *= base;
                st[top] = in.exponent < 0 ? 1.0 / r : r;
                break;
            }
            case Op::Cos:
                st[top] = std::cos(st[top]);
                break;
            case Op::Sin:
                st[top] = std::sin(st[top]);
                break;
        }
    }
    const double v = st[0];
    if constexpr (Checked) {
        if (!std::isfinite(v)) throw EvalError("non-finite value in '" + source_ + "'");
    }
    return v;
}

double Expression::evaluate(double p1, double p2) const noexcept { return run<false>(p1, p2); }

double Expression::evaluate_checked(double p1, double p2) const { return run<true>(p1, p2); }

bool Expression::depends_on_parameters() const noexcept {
    for (const Instr& in : code_)
        if (in.op == Op::P1 || in.op == Op::P2) return true;
    return false;
}

bool Expression::same_program(const Expression& other) const noexcept { return code_ == other.code_; }

double evaluate_constant(std::string_view text, int line, int column) {
    const Expression e = Expression::parse(text, line, column);
    if (e.depends_on_parameters()) throw ParseError("constant expected, found a parameter", line, column);
    return e.evaluate_checked();
}

std::vector<KeyValue> read_key_values(std::string_view text) {
    std::vector<KeyValue> out;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        ++line_no;
        pos = eol + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string_view::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected 'key = value'", line_no, static_cast<int>(first) + 1);
        }
        std::string_view key = line.substr(first, eq - first);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.remove_suffix(1);
        if (key.empty()) throw ParseError("missing key before '='", line_no, static_cast<int>(eq) + 1);
        std::size_t vstart = line.find_first_not_of(" \t", eq + 1);
        std::string_view value = vstart == std::string_view::npos ? std::string_view{} : line.substr(vstart);
        while (!value.empty() && (value.back() == ' ' || value.back() == '\t')) value.remove_suffix(1);
        out.push_back({std::string(key), std::string(value), line_no,
                       static_cast<int>(vstart == std::string_view::npos ? eq + 1 : vstart) + 1});
        if (eol == text.size()) break;
    }
    return out;
}

std::vector<Entry> split_entries(std::string_view value, int value_column) {
    std::vector<Entry> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= value.size(); ++i) {
        if (i == value.size() || value[i] == ',' || value[i] == ';') {
            std::string_view piece = value.substr(start, i - start);
            std::size_t lead = piece.find_first_not_of(" \t");
            std::size_t trail = piece.find_last_not_of(" \t");
            std::string text = lead == std::string_view::npos ? std::string{} : std::string(piece.substr(lead, trail - lead + 1));
            out.push_back({std::move(text), value_column + static_cast<int>(start + (lead == std::string_view::npos ? 0 : lead))});
            start = i + 1;
        }
    }
    return out;
}

}  // namespace lenschain
