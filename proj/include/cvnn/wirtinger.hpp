#pragma once

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "cvnn/activation.hpp"
#include "cvnn/stencil.hpp"

namespace cvnn {

/// Table of d^m dbar^l f(z0) for 0 <= m <= max_dz, 0 <= l <= max_dzbar.
struct WirtingerJet {
    cplx base_point;
    int max_dz = 0;
    int max_dzbar = 0;
    double step = 0.0;
    std::vector<cplx> values;  ///< row-major in (m, l)

    cplx operator()(int m, int ell) const {
        if (m < 0 || ell < 0 || m > max_dz || ell > max_dzbar)
            throw std::out_of_range("WirtingerJet: order out of range");
        return values[static_cast<std::size_t>(m) * (max_dzbar + 1) + ell];
    }
};

/// Evaluates Wirtinger derivatives at one point on a fixed lattice, caching samples.
template <class F>
class LatticeDifferentiator {
public:
    LatticeDifferentiator(const F& f, cplx z0, double step, int accuracy)
        : f_(f), z0_(z0), step_(step), accuracy_(accuracy) {
        if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
    }

    cplx derivative(int m, int ell) {
        cplx acc{0.0, 0.0};
        for (const auto& [pq, w] : lattice_wirtinger_weights(m, ell, accuracy_)) acc += w * sample(pq);
        return acc * std::pow(step_, -(m + ell));
    }

    std::size_t samples() const { return cache_.size(); }

private:
    cplx sample(const std::pair<int, int>& pq) {
        auto it = cache_.find(pq);
        if (it != cache_.end()) return it->second;
        cplx z = z0_ + step_ * cplx{double(pq.first), double(pq.second)};
        cplx v;
        try {
            v = f_(z);
        } catch (const ActivationSingularity& e) {
            throw StencilSingularity(e.what());
        }
        if (!is_finite(v)) throw StencilSingularity("non-finite sample");
        cache_.emplace(pq, v);
        return v;
    }

    const F& f_;
    cplx z0_;
    double step_;
    int accuracy_;
    std::map<std::pair<int, int>, cplx> cache_;
};

template <class F>
WirtingerJet wirtinger_jet(const F& f, cplx z0, int max_dz, int max_dzbar, double step = 0.0,
                           int accuracy = 4) {
    if (max_dz < 0 || max_dzbar < 0) throw std::invalid_argument("wirtinger_jet: negative order");
    if (step <= 0.0) step = default_step(z0, max_dz + max_dzbar, accuracy);
    LatticeDifferentiator<F> diff(f, z0, step, accuracy);
    WirtingerJet jet{z0, max_dz, max_dzbar, step, {}};
    jet.values.reserve(static_cast<std::size_t>(max_dz + 1) * (max_dzbar + 1));
    for (int m = 0; m <= max_dz; ++m)
        for (int l = 0; l <= max_dzbar; ++l) jet.values.push_back(diff.derivative(m, l));
    return jet;
}

/// Single Wirtinger derivative d^m dbar^l f(z0) by a Cartesian stencil.
template <class F>
cplx wirtinger_derivative(const F& f, cplx z0, int m, int ell, double step = 0.0, int accuracy = 4) {
    if (step <= 0.0) step = default_step(z0, m + ell, accuracy);
    return cartesian_stencil(m, ell, step, accuracy).apply(f, z0);
}

/// Delta^m f(z0) = 4^m d^m dbar^m f(z0).
template <class F>
cplx laplacian_power(const F& f, int m, cplx z0, double step = 0.0, int accuracy = 4) {
    if (m < 0) throw std::invalid_argument("laplacian_power: negative order");
    return std::pow(4.0, m) * wirtinger_derivative(f, z0, m, m, step, accuracy);
}

/// Standard bump exp(1/(r2 - 1)) on the unit disc, with r2 = |u|^2.
inline double bump(double r2) { return r2 < 1.0 ? std::exp(1.0 / (r2 - 1.0)) : 0.0; }

/// Mollifier eta_eps(w) = C exp(1/(|w/eps|^2 - 1)) / eps^2 discretised by a tensor midpoint rule.
struct MollifierSpec {
    double epsilon = 0.05;
    int quadrature_points_per_axis = 64;
    double normalization = 0.0;  ///< C, chosen so the discrete kernel sums to one
    CVec nodes;
    std::vector<double> weights;

    double density(cplx w) const {
        return normalization * bump(std::norm(w) / (epsilon * epsilon)) / (epsilon * epsilon);
    }
};

inline MollifierSpec make_mollifier(double epsilon, int points_per_axis = 64) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("make_mollifier: epsilon must be positive");
    if (points_per_axis < 2) throw std::invalid_argument("make_mollifier: need at least 2 points per axis");
    MollifierSpec s;
    s.epsilon = epsilon;
    s.quadrature_points_per_axis = points_per_axis;
    const double du = 2.0 / points_per_axis;
    double total = 0.0;
    std::vector<std::pair<cplx, double>> raw;
    for (int i = 0; i < points_per_axis; ++i) {
        for (int j = 0; j < points_per_axis; ++j) {
            cplx u{-1.0 + (i + 0.5) * du, -1.0 + (j + 0.5) * du};
            double b = bump(std::norm(u));
            if (b == 0.0) continue;
            raw.emplace_back(u, b);
            total += b * du * du;
        }
    }
    s.normalization = 1.0 / total;
    for (const auto& [u, b] : raw) {
        s.nodes.push_back(epsilon * u);
        s.weights.push_back(b * du * du * s.normalization);
    }
    return s;
}

/// Callable sigma_eps = sigma * eta_eps. Nodes where sigma is singular are skipped.
class Mollified {
public:
    Mollified(ActivationSpec sigma, std::shared_ptr<const MollifierSpec> spec)
        : sigma_(std::move(sigma)), spec_(std::move(spec)) {}

    cplx operator()(cplx z) const {
        cplx acc{0.0, 0.0};
        const auto& nodes = spec_->nodes;
        const auto& w = spec_->weights;
        if (sigma_.singular_at) {
            for (std::size_t k = 0; k < nodes.size(); ++k) {
                cplx u = z - nodes[k];
                if (sigma_.singular_at(u)) continue;
                acc += w[k] * sigma_.fn(u);
            }
        } else {
            for (std::size_t k = 0; k < nodes.size(); ++k) acc += w[k] * sigma_.fn(z - nodes[k]);
        }
        return acc;
    }

    const ActivationSpec& activation() const { return sigma_; }
    const MollifierSpec& spec() const { return *spec_; }

private:
    ActivationSpec sigma_;
    std::shared_ptr<const MollifierSpec> spec_;
};

inline Mollified mollify(const ActivationSpec& sigma, const MollifierSpec& spec) {
    return Mollified(sigma, std::make_shared<const MollifierSpec>(spec));
}

}  // namespace cvnn
