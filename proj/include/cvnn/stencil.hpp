#pragma once

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "cvnn/core.hpp"

namespace cvnn {

/// Finite-difference weights for the `order`-th derivative at 0 on the integer nodes -r..r.
/// r = floor((order+1)/2) - 1 + accuracy/2 gives a central rule of the requested even accuracy.
inline std::vector<double> central_weights(int order, int accuracy) {
    if (order < 0) throw std::invalid_argument("central_weights: negative order");
    if (accuracy < 2 || accuracy % 2) throw std::invalid_argument("central_weights: accuracy must be even and >= 2");
    if (order == 0) return {1.0};
    const int r = (order + 1) / 2 - 1 + accuracy / 2;
    const int n = 2 * r + 1;
    std::vector<long double> x(n);
    for (int i = 0; i < n; ++i) x[i] = i - r;
    // Fornberg's recursion, evaluated at z = 0.
    std::vector<std::vector<long double>> c(n, std::vector<long double>(order + 1, 0.0L));
    long double c1 = 1.0L, c4 = x[0];
    c[0][0] = 1.0L;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, order);
        long double c2 = 1.0L, c5 = c4;
        c4 = x[i];
        for (int j = 0; j < i; ++j) {
            long double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = static_cast<double>(c[i][order]);
    return w;
}

/// A linear functional f -> sum_j weights[j] * f(z0 + offsets[j]).
struct Stencil {
    CVec offsets;
    CVec weights;

    std::size_t size() const { return offsets.size(); }

    double reach() const {
        double r = 0.0;
        for (cplx o : offsets) r = std::max(r, std::abs(o));
        return r;
    }

    double weight_l1() const {
        double s = 0.0;
        for (cplx w : weights) s += std::abs(w);
        return s;
    }

    template <class F>
    cplx apply(F&& f, cplx z0) const {
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < offsets.size(); ++j) {
            cplx v;
            try {
                v = f(z0 + offsets[j]);
            } catch (const ActivationSingularity& e) {
                throw StencilSingularity(e.what());
            }
            if (!is_finite(v)) throw StencilSingularity("non-finite sample");
            acc += weights[j] * v;
        }
        return acc;
    }
};

namespace detail {

inline double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline cplx ipow(cplx base, int e) {
    cplx r{1.0, 0.0};
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

inline double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

}  // namespace detail

/// Weights of d^m dbar^l on the unit integer lattice, keyed by lattice offset (p, q).
/// Expands the Wirtinger operators binomially into real partials and tensors 1-D central rules.
inline std::map<std::pair<int, int>, cplx> lattice_wirtinger_weights(int m, int ell, int accuracy) {
    if (m < 0 || ell < 0) throw std::invalid_argument("wirtinger order must be non-negative");
    std::map<std::pair<int, int>, cplx> out;
    const double scale = std::ldexp(1.0, -(m + ell));
    std::map<int, std::vector<double>> cache;
    auto weights = [&](int k) -> const std::vector<double>& {
        auto it = cache.find(k);
        if (it == cache.end()) it = cache.emplace(k, central_weights(k, accuracy)).first;
        return it->second;
    };
    for (int a = 0; a <= m; ++a) {
        for (int b = 0; b <= ell; ++b) {
            cplx coef = scale * detail::binom(m, a) * detail::binom(ell, b) *
                        detail::ipow(-I, m - a) * detail::ipow(I, ell - b);
            int jx = a + b, jy = m + ell - a - b;
            const auto& wx = weights(jx);
            const auto& wy = weights(jy);
            int rx = static_cast<int>(wx.size()) / 2, ry = static_cast<int>(wy.size()) / 2;
            for (int p = -rx; p <= rx; ++p) {
                if (wx[p + rx] == 0.0) continue;
                for (int q = -ry; q <= ry; ++q) {
                    if (wy[q + ry] == 0.0) continue;
                    out[{p, q}] += coef * wx[p + rx] * wy[q + ry];
                }
            }
        }
    }
    for (auto it = out.begin(); it != out.end();) {
        if (it->second == cplx{}) it = out.erase(it);
        else ++it;
    }
    return out;
}

/// Cartesian finite-difference stencil for d^m dbar^l with lattice step `step`.
inline Stencil cartesian_stencil(int m, int ell, double step, int accuracy = 4) {
    if (!(step > 0.0)) throw std::invalid_argument("cartesian_stencil: step must be positive");
    Stencil s;
    const double hs = std::pow(step, -(m + ell));
    for (const auto& [pq, w] : lattice_wirtinger_weights(m, ell, accuracy)) {
        s.offsets.push_back(step * cplx{double(pq.first), double(pq.second)});
        s.weights.push_back(w * hs);
    }
    return s;
}

/// Default step for a derivative of total order `order` at z0: balances truncation and round-off.
inline double default_step(cplx z0, int order, int accuracy = 4, double length_scale = 1.0) {
    const double eps = std::numeric_limits<double>::epsilon();
    return 0.5 * length_scale * (1.0 + std::abs(z0)) *
           std::pow(eps, 1.0 / (std::max(order, 1) + accuracy));
}

/// Parameters of the circle-average stencil.
struct PolarParams {
    double radius = 0.5;   ///< outermost sampling radius
    int angles = 0;        ///< samples per circle; 0 selects a default from the order
    int radial = 0;        ///< number of circles; 0 selects a default from the order
    double phase = 0.0;    ///< angular offset of the first sample
};

inline int default_polar_angles(int m, int ell) {
    int k = 2 * std::max(m, ell) + 32;
    return (k + 3) / 4 * 4;
}

inline int default_polar_radial(int m, int ell) { return std::min(m, ell) + 5; }

/// Stencil for d^m dbar^l at 0 that samples concentric circles.
///
/// Averaging f over a circle of radius r against exp(-i(m-l)phi) isolates the Taylor terms
/// z^a zbar^b with a-b = m-l. Dividing by r^|m-l| leaves a polynomial in x = r^2 whose
/// coefficient of x^min(m,l) is the wanted Taylor coefficient; it is read off by polynomial
/// interpolation on Chebyshev-spaced values of x.
inline Stencil polar_stencil(int m, int ell, const PolarParams& params) {
    if (m < 0 || ell < 0) throw std::invalid_argument("polar_stencil: negative order");
    if (!(params.radius > 0.0)) throw std::invalid_argument("polar_stencil: radius must be positive");
    const int K = params.angles > 0 ? params.angles : default_polar_angles(m, ell);
    const int R = params.radial > 0 ? params.radial : default_polar_radial(m, ell);
    const int q = m - ell;
    const int aq = std::abs(q);
    const int s0 = std::min(m, ell);
    if (R <= s0) throw std::invalid_argument("polar_stencil: need more circles than min(m, l)");
    if (K <= 2 * std::max(m, ell)) throw std::invalid_argument("polar_stencil: too few angles for the order");

    Stencil s;
    if (m == 0 && ell == 0 && R == 1) {
        s.offsets = {0.0};
        s.weights = {1.0};
        return s;
    }
    // Chebyshev nodes of (0, 1], scaled so the largest is 1.
    std::vector<long double> x(R);
    long double xmax = 0.0L;
    for (int r = 0; r < R; ++r) {
        x[r] = (1.0L - std::cos((2.0L * r + 1.0L) * std::numbers::pi_v<long double> / (2.0L * R))) / 2.0L;
        xmax = std::max(xmax, x[r]);
    }
    for (auto& v : x) v /= xmax;
    // lambda[r] = coefficient of x^s0 in the Lagrange basis polynomial of node r.
    std::vector<long double> lambda(R);
    for (int r = 0; r < R; ++r) {
        std::vector<long double> poly{1.0L};
        long double denom = 1.0L;
        for (int j = 0; j < R; ++j) {
            if (j == r) continue;
            std::vector<long double> next(poly.size() + 1, 0.0L);
            for (std::size_t k = 0; k < poly.size(); ++k) {
                next[k + 1] += poly[k];
                next[k] -= x[j] * poly[k];
            }
            poly.swap(next);
            denom *= x[r] - x[j];
        }
        lambda[r] = poly[s0] / denom;
    }
    const double fact = detail::factorial(m) * detail::factorial(ell);
    const double rad2s0 = std::pow(params.radius, 2 * s0);
    for (int r = 0; r < R; ++r) {
        double rho = params.radius * std::sqrt(static_cast<double>(x[r]));
        double radial_w = fact * static_cast<double>(lambda[r]) / (K * std::pow(rho, aq) * rad2s0);
        for (int k = 0; k < K; ++k) {
            double phi = params.phase + 2.0 * pi * k / K;
            s.offsets.push_back(std::polar(rho, phi));
            s.weights.push_back(radial_w * std::polar(1.0, -q * phi));
        }
    }
    return s;
}

}  // namespace cvnn
