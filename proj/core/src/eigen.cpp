#include <algorithm>
#include <cmath>
#include <limits>

#include "lenschain/errors.hpp"
#include "lenschain/smallmat.hpp"

namespace lenschain {

namespace {

double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

void sort_spectrum(std::vector<Complex>& ev) {
    std::stable_sort(ev.begin(), ev.end(), [](const Complex& a, const Complex& b) {
        const bool ra = a.imag() == 0.0, rb = b.imag() == 0.0;
        if (ra != rb) return ra;
        if (ra) return a.real() < b.real();
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() > b.imag();
    });
}

}  // namespace

std::vector<double> characteristic_polynomial(const Matrix& m) {
    const std::size_t n = m.dim();
    std::vector<double> c(n + 1, 0.0);
    c[n] = 1.0;
    Matrix mk(n);  // M_0 = 0
    for (std::size_t k = 1; k <= n; ++k) {
        mk = m * mk;
        for (std::size_t i = 0; i < n; ++i) mk(i, i) += c[n - k + 1];
        const Matrix amk = m * mk;
        double tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) tr += amk(i, i);
        c[n - k] = -tr / static_cast<double>(k);
    }
    return c;
}

Matrix hessenberg_reduce(Matrix a) {
    const std::size_t n = a.dim();
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double alpha = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) alpha += a(i, k) * a(i, k);
        alpha = std::sqrt(alpha);
        if (alpha == 0.0) continue;
        if (a(k + 1, k) > 0) alpha = -alpha;
        Vector v(n, 0.0);
        v[k + 1] = a(k + 1, k) - alpha;
        for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
        const double vv = dot(v, v);
        if (vv == 0.0) continue;
        // A <- H A H with H = I - 2 v v^T / (v^T v)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
            s = 2.0 * s / vv;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
            s = 2.0 * s / vv;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
        }
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
    return a;
}

// Francis double-shift QR on an upper-Hessenberg matrix, after the classic
// EISPACK hqr routine.
std::vector<Complex> hessenberg_qr_eigenvalues(Matrix a) {
    const int n = static_cast<int>(a.dim());
    constexpr double eps = 2.220446049250313e-16;
    std::vector<Complex> w(static_cast<std::size_t>(n));
    auto A = [&](int i, int j) -> double& { return a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)); };

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(A(i, j));

    int nn = n - 1;
    double t = 0.0;
    double p = 0, q = 0, r = 0, s = 0, x = 0, y = 0, z = 0, ww = 0;
    while (nn >= 0) {
        int its = 0;
        for (;;) {
            int l = nn;
            for (; l > 0; --l) {
                s = std::abs(A(l - 1, l - 1)) + std::abs(A(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(A(l, l - 1)) <= eps * s) {
                    A(l, l - 1) = 0.0;
                    break;
                }
            }
            x = A(nn, nn);
            if (l == nn) {
                w[static_cast<std::size_t>(nn)] = Complex{x + t, 0.0};
                nn -= 1;
                break;
            }
            y = A(nn - 1, nn - 1);
            ww = A(nn, nn - 1) * A(nn - 1, nn);
            if (l == nn - 1) {
                p = 0.5 * (y - x);
                q = p * p + ww;
                z = std::sqrt(std::abs(q));
                x += t;
                if (q >= 0.0) {
                    z = p + sign_of(z, p);
                    double lo = x + z, hi = x + z;
                    if (z != 0.0) hi = x - ww / z;
                    w[static_cast<std::size_t>(nn - 1)] = Complex{lo, 0.0};
                    w[static_cast<std::size_t>(nn)] = Complex{hi, 0.0};
                } else {
                    w[static_cast<std::size_t>(nn - 1)] = Complex{x + p, z};
                    w[static_cast<std::size_t>(nn)] = Complex{x + p, -z};
                }
                nn -= 2;
                break;
            }
            if (its == 60) throw Error("eigenvalue iteration did not converge");
            if (its % 10 == 0 && its > 0) {
                t += x;
                for (int i = 0; i <= nn; ++i) A(i, i) -= x;
                s = std::abs(A(nn, nn - 1)) + std::abs(A(nn - 1, nn - 2));
                y = x = 0.75 * s;
                ww = -0.4375 * s * s;
            }
            ++its;
            int m = nn - 2;
            for (; m >= l; --m) {
                z = A(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - ww) / A(m + 1, m) + A(m, m + 1);
                q = A(m + 1, m + 1) - z - r - s;
                r = A(m + 2, m + 1);
                s = std::abs(p) + std::abs(q) + std::abs(r);
                p /= s;
                q /= s;
                r /= s;
                if (m == l) break;
                const double u = std::abs(A(m, m - 1)) * (std::abs(q) + std::abs(r));
                const double v = std::abs(p) * (std::abs(A(m - 1, m - 1)) + std::abs(z) + std::abs(A(m + 1, m + 1)));
                if (u <= eps * v) break;
            }
            for (int i = m; i < nn - 1; ++i) {
                A(i + 2, i) = 0.0;
                if (i != m) A(i + 2, i - 1) = 0.0;
            }
            for (int k = m; k < nn; ++k) {
                if (k != m) {
                    p = A(k, k - 1);
                    q = A(k + 1, k - 1);
                    r = 0.0;
                    if (k + 1 != nn) r = A(k + 2, k - 1);
                    if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                if ((s = sign_of(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
                    if (k == m) {
                        if (l != m) A(k, k - 1) = -A(k, k - 1);
                    } else {
                        A(k, k - 1) = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for (int j = k; j <= nn; ++j) {
                        p = A(k, j) + q * A(k + 1, j);
                        if (k + 1 != nn) {
                            p += r * A(k + 2, j);
                            A(k + 2, j) -= p * z;
                        }
                        A(k + 1, j) -= p * y;
                        A(k, j) -= p * x;
                    }
                    const int mmin = nn < k + 3 ? nn : k + 3;
                    for (int i = l; i <= mmin; ++i) {
                        p = x * A(i, k) + y * A(i, k + 1);
                        if (k + 1 != nn) {
                            p += z * A(i, k + 2);
                            A(i, k + 2) -= p * r;
                        }
                        A(i, k + 1) -= p * q;
                        A(i, k) -= p;
                    }
                }
            }
        }
    }
    return w;
}

Spectrum eigenvalues(const Matrix& m) {
    const std::size_t n = m.dim();
    std::vector<Complex> ev;
    if (n == 1) {
        ev = {Complex{m(0, 0), 0.0}};
    } else if (n <= 4) {
        // companion route: characteristic polynomial, then its companion matrix
        const std::vector<double> c = characteristic_polynomial(m);
        Matrix comp(n);
        for (std::size_t j = 0; j < n; ++j) comp(0, j) = -c[n - 1 - j];
        for (std::size_t i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
        ev = hessenberg_qr_eigenvalues(comp);
    } else {
        ev = hessenberg_qr_eigenvalues(hessenberg_reduce(m));
    }
    sort_spectrum(ev);
    return Spectrum{std::move(ev)};
}

double Spectrum::spectral_radius() const noexcept {
    double r = 0.0;
    for (const Complex& c : eigenvalues) r = std::max(r, std::abs(c));
    return r;
}

int Spectrum::count_real_greater_than_one(double imag_tol) const noexcept {
    int count = 0;
    for (const Complex& c : eigenvalues) {
        if (std::abs(c.imag()) <= imag_tol * (1.0 + std::abs(c)) && c.real() > 1.0) ++count;
    }
    return count;
}

Complex Spectrum::product() const noexcept {
    Complex p{1.0, 0.0};
    for (const Complex& c : eigenvalues) p *= c;
    return p;
}

double Spectrum::distance_to(Complex target) const noexcept {
    double best = std::numeric_limits<double>::infinity();
    for (const Complex& c : eigenvalues) best = std::min(best, std::abs(c - target));
    return best;
}

Vector symmetric_eigenvalues(Matrix a) {
    const std::size_t n = a.dim();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off <= 1e-30 * std::max(1.0, a.max_abs() * a.max_abs())) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    Vector ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

}  // namespace lenschain
