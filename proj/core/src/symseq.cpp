#include "lenschain/symseq.hpp"

#include <algorithm>
#include <stdexcept>

#include "lenschain/errors.hpp"

namespace lenschain {

SymbolSequence::SymbolSequence(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}

SymbolSequence SymbolSequence::parse(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("empty symbol sequence");
    std::vector<Symbol> out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == 'L')
            out.push_back(Symbol::L);
        else if (c == 'R')
            out.push_back(Symbol::R);
        else
            throw std::invalid_argument(std::string("symbol sequence may only contain L and R, got '") + c + "'");
    }
    return SymbolSequence(std::move(out));
}

std::size_t SymbolSequence::wrap(long long i) const noexcept {
    const auto n = static_cast<long long>(symbols_.size());
    long long r = i % n;
    if (r < 0) r += n;
    return static_cast<std::size_t>(r);
}

int SymbolSequence::count(Symbol s) const noexcept {
    return static_cast<int>(std::count(symbols_.begin(), symbols_.end(), s));
}

std::string SymbolSequence::str() const {
    std::string out;
    out.reserve(symbols_.size());
    for (Symbol s : symbols_) out.push_back(static_cast<char>(s));
    return out;
}

SymbolSequence cyclic(const SymbolSequence& s, long long i) {
    std::vector<Symbol> out(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) out[j] = s[i + static_cast<long long>(j)];
    return SymbolSequence(std::move(out));
}

SymbolSequence flip(const SymbolSequence& s, long long i) {
    std::vector<Symbol> out = s.symbols();
    auto& x = out[s.wrap(i)];
    x = opposite(x);
    return SymbolSequence(std::move(out));
}

MultPerm mult_perm(const SymbolSequence& s, long long i) {
    const auto n = static_cast<long long>(s.size());
    std::vector<Symbol> out(s.size());
    for (long long j = 0; j < n; ++j) {
        // reduce before multiplying so large i cannot overflow
        long long ij = (s.wrap(i) * j) % n;
        out[static_cast<std::size_t>(j)] = s[ij];
    }
    return {SymbolSequence(std::move(out)), gcd(i, n) == 1};
}

SymbolSequence concat(const SymbolSequence& a, const SymbolSequence& b) {
    std::vector<Symbol> out = a.symbols();
    out.insert(out.end(), b.symbols().begin(), b.symbols().end());
    return SymbolSequence(std::move(out));
}

SymbolSequence power(const SymbolSequence& s, int k) {
    if (k < 1) throw std::invalid_argument("power requires k >= 1");
    std::vector<Symbol> out;
    out.reserve(s.size() * static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r) out.insert(out.end(), s.symbols().begin(), s.symbols().end());
    return SymbolSequence(std::move(out));
}

bool is_primitive(const SymbolSequence& s) {
    const auto n = static_cast<long long>(s.size());
    // a nontrivial rotation fixes S iff a rotation by a proper divisor does
    for (long long p = 1; p < n; ++p) {
        if (n % p != 0) continue;
        bool fixed = true;
        for (long long j = 0; j < n && fixed; ++j) fixed = s[j] == s[j + p];
        if (fixed) return false;
    }
    return true;
}

bool is_cyclic_permutation(const SymbolSequence& a, const SymbolSequence& b) {
    if (a.size() != b.size()) return false;
    const std::string doubled = a.str() + a.str();
    return doubled.find(b.str()) != std::string::npos;
}

SymbolSequence min_rotation(const SymbolSequence& s) {
    SymbolSequence best = s;
    std::string best_str = s.str();
    for (std::size_t i = 1; i < s.size(); ++i) {
        SymbolSequence r = cyclic(s, static_cast<long long>(i));
        std::string rs = r.str();
        if (rs < best_str) {
            best_str = std::move(rs);
            best = std::move(r);
        }
    }
    return best;
}

long long gcd(long long a, long long b) noexcept {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b != 0) {
        long long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

long long mod_inverse(long long m, long long n) {
    if (n < 1) throw std::invalid_argument("mod_inverse requires n >= 1");
    if (gcd(m, n) != 1) {
        throw NotCoprime("gcd(" + std::to_string(m) + ", " + std::to_string(n) + ") != 1");
    }
    if (n == 1) return 0;
    // extended Euclid on (m mod n, n)
    long long a = ((m % n) + n) % n, b = n;
    long long x0 = 1, x1 = 0;
    while (b != 0) {
        long long q = a / b;
        long long t = a - q * b;
        a = b;
        b = t;
        t = x0 - q * x1;
        x0 = x1;
        x1 = t;
    }
    return ((x0 % n) + n) % n;
}

RotationalParams make_rotational_params(int l, int m, int n) {
    if (n < 2) throw BadL("rotational sequences need n >= 2");
    if (l < 1 || l > n - 1) {
        throw BadL("l = " + std::to_string(l) + " outside [1, " + std::to_string(n - 1) + "]");
    }
    if (m < 1 || m >= n) {
        throw NotCoprime("m = " + std::to_string(m) + " outside [1, " + std::to_string(n - 1) + "]");
    }
    const auto d = static_cast<int>(mod_inverse(m, n));
    return {l, m, n, d};
}

SymbolSequence rotational(const RotationalParams& p) {
    std::vector<Symbol> out(static_cast<std::size_t>(p.n), Symbol::R);
    for (long long i = 0; i < p.l; ++i) {
        out[static_cast<std::size_t>((i * p.d) % p.n)] = Symbol::L;
    }
    return SymbolSequence(std::move(out));
}

SymbolSequence rotational(int l, int m, int n) { return rotational(make_rotational_params(l, m, n)); }

std::optional<RotationalParams> rotational_params(const SymbolSequence& s) {
    const int n = static_cast<int>(s.size());
    if (n < 2) return std::nullopt;
    const int l = s.count(Symbol::L);
    if (l < 1 || l > n - 1) return std::nullopt;
    // m and n - m give cyclically equivalent words, so scanning m <= n/2 is enough
    for (int m = 1; 2 * m <= n; ++m) {
        if (gcd(m, n) != 1) continue;
        RotationalParams p = make_rotational_params(l, m, n);
        if (is_cyclic_permutation(rotational(p), s)) return p;
    }
    return std::nullopt;
}

int mobius(long long n) {
    if (n < 1) throw std::invalid_argument("mobius requires n >= 1");
    int sign = 1;
    for (long long p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        n /= p;
        if (n % p == 0) return 0;
        sign = -sign;
    }
    if (n > 1) sign = -sign;
    return sign;
}

long long totient(long long n) {
    if (n < 1) throw std::invalid_argument("totient requires n >= 1");
    long long result = n;
    for (long long p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        while (n % p == 0) n /= p;
        result -= result / p;
    }
    if (n > 1) result -= result / n;
    return result;
}

std::uint64_t count_primitive(int n) {
    if (n < 1) throw std::invalid_argument("count_primitive requires n >= 1");
    if (n > 62) throw std::out_of_range("count_primitive overflows beyond n = 62");
    std::int64_t sum = 0;
    for (int a = 1; a <= n; ++a) {
        if (n % a != 0) continue;
        sum += static_cast<std::int64_t>(mobius(n / a)) * (std::int64_t{1} << a);
    }
    return static_cast<std::uint64_t>(sum / n);
}

std::uint64_t count_rotational(int n) {
    if (n < 1) throw std::invalid_argument("count_rotational requires n >= 1");
    if (n == 1) return 0;
    if (n == 2) return 1;
    // phi(n) is even for n >= 3
    return 2 + static_cast<std::uint64_t>(n - 3) * static_cast<std::uint64_t>(totient(n)) / 2;
}

}  // namespace lenschain
