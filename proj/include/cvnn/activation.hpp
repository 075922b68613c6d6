#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cvnn/core.hpp"

namespace cvnn {

namespace annotation {
inline constexpr std::string_view deep_by_composition = "deep_universal_by_composition";
inline constexpr std::string_view not_locally_bounded = "not_locally_bounded";
}  // namespace annotation

/// An activation function together with the regularity facts the classifier relies on.
struct ActivationSpec {
    std::string name;
    std::function<cplx(cplx)> fn;
    SetDescription discontinuities;
    SetDescription nonsmooth;       ///< where the function fails to be C-infinity (includes discontinuities)
    SetDescription singularities;   ///< isolated points where evaluation is undefined
    std::function<bool(cplx)> singular_at;
    bool continuous = true;
    bool locally_bounded = true;
    bool smooth = true;             ///< C-infinity on its whole domain
    std::vector<std::string> annotations;

    cplx operator()(cplx z) const {
        if (singular_at && singular_at(z)) throw ActivationSingularity(name);
        return fn(z);
    }

    bool has_annotation(std::string_view a) const {
        return std::find(annotations.begin(), annotations.end(), a) != annotations.end();
    }

    /// Distance to anything that obstructs smoothness: the non-smooth set and singular points.
    double obstruction_distance(cplx z) const {
        return std::min(nonsmooth.distance(z), singularities.distance(z));
    }

    void validate() const {
        if (name.empty()) throw std::invalid_argument("activation: empty name");
        if (!fn) throw std::invalid_argument("activation '" + name + "': missing evaluator");
        if (continuous && !discontinuities.empty())
            throw std::invalid_argument("activation '" + name + "': continuous but has discontinuities");
        if (smooth && !nonsmooth.empty())
            throw std::invalid_argument("activation '" + name + "': smooth but has a non-smooth set");
    }
};

namespace detail {

inline double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

inline bool near_tanh_pole(cplx z) {
    if (std::abs(z.real()) > 1e-12) return false;
    double k = (z.imag() - pi / 2) / pi;
    return std::abs(k - std::round(k)) * pi < 1e-12 * std::max(1.0, std::abs(z.imag()));
}

inline CVec tanh_poles(double reach) {
    CVec out;
    for (int k = -static_cast<int>(reach / pi) - 1; k <= static_cast<int>(reach / pi) + 1; ++k) {
        double y = pi / 2 + k * pi;
        if (std::abs(y) <= reach) out.push_back({0.0, y});
    }
    return out;
}

}  // namespace detail

inline std::vector<ActivationSpec> activation_catalog() {
    std::vector<ActivationSpec> c;

    {
        ActivationSpec s;
        s.name = "ratio";
        s.fn = [](cplx z) { return z / (1.0 + std::abs(z)); };
        s.nonsmooth = SetDescription::points({0.0});
        s.smooth = false;
        c.push_back(std::move(s));
    }
    {
        ActivationSpec s;
        s.name = "sigmoid_split";
        s.fn = [](cplx z) { return cplx{detail::logistic(z.real()), detail::logistic(z.imag())}; };
        c.push_back(std::move(s));
    }
    {
        ActivationSpec s;
        s.name = "zlog";
        s.fn = [](cplx z) {
            if (z.imag() == 0.0 && z.real() <= 0.0) return cplx{0.0, 0.0};
            return z * std::log(z);
        };
        s.discontinuities = SetDescription::ray(0.0, -1.0);
        s.nonsmooth = s.discontinuities;
        s.continuous = false;
        s.smooth = false;
        c.push_back(std::move(s));
    }
    {
        ActivationSpec s;
        s.name = "rho_c";
        s.fn = [](cplx z) { return cplx{std::max(0.0, z.real()), 0.0}; };
        s.nonsmooth = SetDescription::imag_axis();
        s.smooth = false;
        c.push_back(std::move(s));
    }
    {
        ActivationSpec s;
        s.name = "example_4_8";
        s.fn = [](cplx z) {
            if (z.imag() != 0.0) return cplx{z.real(), 0.0};
            return cplx{std::max(0.0, z.real()), 0.0};
        };
        s.discontinuities = SetDescription::real_axis();
        s.nonsmooth = s.discontinuities;
        s.continuous = false;
        s.smooth = false;
        s.annotations.emplace_back(annotation::deep_by_composition);
        c.push_back(std::move(s));
    }
    {
        ActivationSpec s;
        s.name = "tanh";
        s.fn = [](cplx z) { return std::tanh(z); };
        s.singular_at = detail::near_tanh_pole;
        s.singularities = SetDescription::points(detail::tanh_poles(64.0));
        c.push_back(std::move(s));
    }
    {
        ActivationSpec s;
        s.name = "sin";
        s.fn = [](cplx z) { return std::sin(z); };
        c.push_back(std::move(s));
    }
    {
        ActivationSpec s;
        s.name = "sinh";
        s.fn = [](cplx z) { return std::sinh(z); };
        c.push_back(std::move(s));
    }
    {
        ActivationSpec s;
        s.name = "conj_sin";
        s.fn = [](cplx z) { return std::conj(std::sin(z)); };
        c.push_back(std::move(s));
    }
    {
        ActivationSpec s;
        s.name = "poly_zzbar";
        s.fn = [](cplx z) { return z + std::conj(z); };
        c.push_back(std::move(s));
    }
    {
        ActivationSpec s;
        s.name = "abs2";
        s.fn = [](cplx z) { return cplx{std::norm(z), 0.0}; };
        c.push_back(std::move(s));
    }
    {
        ActivationSpec s;
        s.name = "arcsin_principal";
        s.fn = [](cplx z) { return std::asin(z); };
        s.discontinuities = SetDescription::ray(1.0, 1.0) | SetDescription::ray(-1.0, -1.0);
        s.nonsmooth = s.discontinuities;
        s.continuous = false;
        s.smooth = false;
        c.push_back(std::move(s));
    }
    {
        ActivationSpec s;
        s.name = "arctan_principal";
        s.fn = [](cplx z) { return std::atan(z); };
        s.singular_at = [](cplx z) { return z.real() == 0.0 && std::abs(z.imag()) == 1.0; };
        s.singularities = SetDescription::points({I, -I});
        s.discontinuities = SetDescription::ray(I, I) | SetDescription::ray(-I, -I);
        s.nonsmooth = s.discontinuities;
        s.continuous = false;
        s.locally_bounded = false;
        s.smooth = false;
        s.annotations.emplace_back(annotation::not_locally_bounded);
        c.push_back(std::move(s));
    }
    {
        ActivationSpec s;
        s.name = "real_part";
        s.fn = [](cplx z) { return cplx{z.real(), 0.0}; };
        c.push_back(std::move(s));
    }
    return c;
}

inline std::vector<std::string> activation_names() {
    std::vector<std::string> out;
    for (const auto& s : activation_catalog()) out.push_back(s.name);
    return out;
}

/// Looks up a catalog entry; throws std::invalid_argument listing the catalog for unknown names.
inline ActivationSpec find_activation(const std::string& name) {
    auto cat = activation_catalog();
    for (auto& s : cat)
        if (s.name == name) return s;
    std::string msg = "unknown activation '" + name + "'; known:";
    for (const auto& s : cat) msg += " " + s.name;
    throw std::invalid_argument(msg);
}

}  // namespace cvnn
