#pragma once

// Symbol sequences over {L, R}: permutation operators, rotational sequences
// S[l,m,n], primitivity and the necklace counting formulas.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lenschain {

enum class Symbol : char { L = 'L', R = 'R' };

constexpr Symbol opposite(Symbol s) noexcept { return s == Symbol::L ? Symbol::R : Symbol::L; }

/// Finite word over {L, R}. Indexing is always modulo the length, so
/// negative indices wrap.
class SymbolSequence {
public:
    SymbolSequence() = default;
    explicit SymbolSequence(std::vector<Symbol> symbols);

    /// Parses a plain ASCII word such as "LLRRLRR". Throws std::invalid_argument
    /// for any other character or an empty string.
    static SymbolSequence parse(std::string_view text);

    std::size_t size() const noexcept { return symbols_.size(); }
    bool empty() const noexcept { return symbols_.empty(); }

    Symbol operator[](long long i) const noexcept { return symbols_[wrap(i)]; }
    Symbol at(long long i) const noexcept { return (*this)[i]; }
    std::size_t wrap(long long i) const noexcept;

    int count(Symbol s) const noexcept;
    const std::vector<Symbol>& symbols() const noexcept { return symbols_; }
    std::string str() const;

    friend bool operator==(const SymbolSequence&, const SymbolSequence&) = default;

private:
    std::vector<Symbol> symbols_;
};

/// (sigma_i S)_j = S_{i+j}.
SymbolSequence cyclic(const SymbolSequence& s, long long i);

/// Flips the i-th element.
SymbolSequence flip(const SymbolSequence& s, long long i);

struct MultPerm {
    SymbolSequence sequence;
    /// false when gcd(i, n) != 1; the operator is then not a bijection.
    bool invertible = true;
};

/// (pi_i S)_j = S_{ij}.
MultPerm mult_perm(const SymbolSequence& s, long long i);

SymbolSequence concat(const SymbolSequence& a, const SymbolSequence& b);
SymbolSequence power(const SymbolSequence& s, int k);

bool is_primitive(const SymbolSequence& s);

/// True when b is some cyclic permutation of a.
bool is_cyclic_permutation(const SymbolSequence& a, const SymbolSequence& b);

/// Lexicographically smallest rotation ('L' < 'R'); a necklace representative.
SymbolSequence min_rotation(const SymbolSequence& s);

long long gcd(long long a, long long b) noexcept;

/// d in [1, n-1] with d*m = 1 (mod n). Throws NotCoprime.
long long mod_inverse(long long m, long long n);

struct RotationalParams {
    int l = 0;
    int m = 0;
    int n = 0;
    int d = 0;  // inverse of m modulo n

    friend bool operator==(const RotationalParams&, const RotationalParams&) = default;
};

/// Checked (l, m, n) -> params with d filled in. Throws BadL / NotCoprime.
RotationalParams make_rotational_params(int l, int m, int n);

/// S[l,m,n]: S_{id} = L for i = 0..l-1, R otherwise.
SymbolSequence rotational(int l, int m, int n);
SymbolSequence rotational(const RotationalParams& p);

/// Inverse of rotational() up to cyclic permutation. The canonical
/// representative has m < n/2. Length-1 words are never rotational.
std::optional<RotationalParams> rotational_params(const SymbolSequence& s);

int mobius(long long n);
long long totient(long long n);

/// Number of primitive words of length n up to cyclic permutation (binary
/// Lyndon words).
std::uint64_t count_primitive(int n);

/// Number of rotational sequences of length n up to cyclic permutation.
std::uint64_t count_rotational(int n);

}  // namespace lenschain
