#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

using lenschain::Matrix;
using lenschain::PwaMap;
using lenschain::Symbol;
using lenschain::SymbolSequence;

std::vector<std::string> primitive_classes(int n) {
    std::vector<std::string> out;
    for (std::uint64_t w = 0; w < (std::uint64_t{1} << n); ++w) {
        std::string s(static_cast<std::size_t>(n), 'L');
        for (int i = 0; i < n; ++i) {
            if (w >> (n - 1 - i) & 1) s[i] = 'R';
        }
        bool minimal = true, primitive = true;
        for (int r = 1; r < n; ++r) {
            const std::string rot = s.substr(r) + s.substr(0, r);
            if (rot == s) primitive = false;
            if (rot < s) minimal = false;
        }
        if (minimal && primitive) out.push_back(s);
    }
    return out;
}

namespace {

std::vector<double> stacked_matrix(const PwaMap& map, const SymbolSequence& s, std::vector<double>& rhs, double mu) {
    const std::size_t n = s.size(), d = map.dim(), m = n * d;
    std::vector<double> k(m * m, 0.0);
    rhs.assign(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Matrix& a = map.branch(s[static_cast<long long>(i)]);
        const std::size_t row0 = i * d;
        const std::size_t next = ((i + 1) % n) * d;
        for (std::size_t r = 0; r < d; ++r) {
            k[(row0 + r) * m + next + r] += 1.0;
            for (std::size_t c = 0; c < d; ++c) k[(row0 + r) * m + i * d + c] -= a(r, c);
            rhs[row0 + r] = mu * map.b()[r];
        }
    }
    return k;
}

}  // namespace

std::vector<std::vector<double>> stacked_cycle(const PwaMap& map, double mu, const SymbolSequence& s) {
    std::vector<double> rhs;
    std::vector<double> k = stacked_matrix(map, s, rhs, mu);
    const std::size_t m = rhs.size();
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r) {
            if (std::abs(k[r * m + col]) > std::abs(k[piv * m + col])) piv = r;
        }
        if (k[piv * m + col] == 0.0) throw std::runtime_error("stacked system is singular");
        if (piv != col) {
            for (std::size_t c = 0; c < m; ++c) std::swap(k[piv * m + c], k[col * m + c]);
            std::swap(rhs[piv], rhs[col]);
        }
        for (std::size_t r = col + 1; r < m; ++r) {
            const double f = k[r * m + col] / k[col * m + col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < m; ++c) k[r * m + c] -= f * k[col * m + c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> x(m);
    for (std::size_t r = m; r-- > 0;) {
        double acc = rhs[r];
        for (std::size_t c = r + 1; c < m; ++c) acc -= k[r * m + c] * x[c];
        x[r] = acc / k[r * m + r];
    }
    std::vector<std::vector<double>> pts;
    for (std::size_t i = 0; i < s.size(); ++i) {
        pts.emplace_back(x.begin() + static_cast<long>(i * map.dim()), x.begin() + static_cast<long>((i + 1) * map.dim()));
    }
    return pts;
}

double stacked_lsq_residual(const PwaMap& map, double mu, const SymbolSequence& s, double drop) {
    std::vector<double> rhs;
    const std::vector<double> k = stacked_matrix(map, s, rhs, mu);
    const std::size_t m = rhs.size();
    std::vector<std::vector<double>> q;
    auto project_out = [&](std::vector<double>& v) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& u : q) {
                double dp = 0.0;
                for (std::size_t i = 0; i < m; ++i) dp += u[i] * v[i];
                for (std::size_t i = 0; i < m; ++i) v[i] -= dp * u[i];
            }
        }
    };
    auto norm = [&](const std::vector<double>& v) {
        double acc = 0.0;
        for (double x : v) acc += x * x;
        return std::sqrt(acc);
    };
    for (std::size_t c = 0; c < m; ++c) {
        std::vector<double> v(m);
        for (std::size_t r = 0; r < m; ++r) v[r] = k[r * m + c];
        const double n0 = norm(v);
        if (n0 == 0.0) continue;
        project_out(v);
        const double n1 = norm(v);
        if (n1 <= drop * n0) continue;
        for (double& x : v) x /= n1;
        q.push_back(std::move(v));
    }
    std::vector<double> r = rhs;
    project_out(r);
    return norm(r);
}

PwaMap random_map(std::mt19937_64& rng, std::size_t n, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    Matrix al(n), ar(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            al(i, j) = g(rng);
            ar(i, j) = j == 0 ? g(rng) : al(i, j);
        }
    }
    lenschain::Vector b(n);
    for (double& x : b) x = g(rng) / scale;
    if (std::abs(b[0]) < 0.2) b[0] = 1.0;
    return PwaMap(al, ar, b);
}

SymbolSequence random_sequence(std::mt19937_64& rng, int n) {
    std::string s;
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < n; ++i) s += coin(rng) ? 'R' : 'L';
    return SymbolSequence::parse(s);
}

PwaMap pentagon_map() {
    const Matrix al{{0, 1, 0}, {1, 0, 1}, {28.0 / 87.0, 0, 0}};
    const Matrix ar{{-23.0 / 14.0, 1, 0}, {0, 0, 1}, {3.0 / 2.0, 0, 0}};
    return PwaMap(al, ar, {1, 0, 0});
}

double cofactor_det(const std::vector<double>& a, std::size_t n) {
    if (n == 1) return a[0];
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> minor;
        for (std::size_t r = 1; r < n; ++r)
            for (std::size_t k = 0; k < n; ++k)
                if (k != c) minor.push_back(a[r * n + k]);
        acc += ((c % 2) ? -1.0 : 1.0) * a[c] * cofactor_det(minor, n - 1);
    }
    return acc;
}

}  // namespace oracle

namespace oracle {

lenschain::PwaMap rotation_map(int m, int n, double r1, double r2) {
    const double a = 2.0 * M_PI * m / n;
    const double c = std::cos(a), s = std::sin(a);
    return lenschain::PwaMap(lenschain::Matrix{{c, -s}, {s, c}}, lenschain::Matrix{{r1, -s}, {r2, c}}, {1.0, 0.0});
}

}  // namespace oracle
