#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cvnn/core.hpp"

namespace cvnn {

inline cplx relu_c(cplx z) { return {std::max(0.0, z.real()), 0.0}; }

/// g(z) = constant + sum_j alpha_j * relu_c(w_j^T z + b_j).
struct RidgeExpansion {
    int dim = 1;
    cplx constant{0.0, 0.0};
    std::vector<CVec> w;
    CVec b;
    CVec alpha;

    std::size_t size() const { return alpha.size(); }

    cplx pre_activation(std::size_t j, const CVec& z) const {
        cplx u = b[j];
        for (int c = 0; c < dim; ++c) u += w[j][c] * z[c];
        return u;
    }

    cplx operator()(const CVec& z) const {
        cplx acc = constant;
        for (std::size_t j = 0; j < size(); ++j) acc += alpha[j] * relu_c(pre_activation(j, z));
        return acc;
    }

    double alpha_l1() const {
        double s = 0.0;
        for (cplx a : alpha) s += std::abs(a);
        return s;
    }

    /// max |w_j^T z + b_j| over the ball B_radius(center).
    double input_reach(const CVec& center, double radius) const {
        double r = 0.0;
        for (std::size_t j = 0; j < size(); ++j) {
            double wn = 0.0;
            for (cplx v : w[j]) wn += std::norm(v);
            r = std::max(r, std::abs(pre_activation(j, center)) + std::sqrt(wn) * radius);
        }
        return r;
    }
};

struct Target {
    std::string name;
    std::function<cplx(const CVec&)> f;
    std::optional<RidgeExpansion> ridge_form;  ///< exact decomposition into relu_c ridges, if one is known

    cplx operator()(const CVec& z) const { return f(z); }
    cplx operator()(cplx z) const { return f(CVec{z}); }
};

inline std::vector<std::string> target_names() { return {"cone", "rez", "relu_c", "abs2_target", "constant:<re>,<im>"}; }

/// Target registry. All targets depend on the first coordinate only.
inline Target find_target(const std::string& name, int dim = 1) {
    if (dim < 1) throw std::invalid_argument("target dimension must be >= 1");
    Target t;
    t.name = name;
    CVec e1(dim, 0.0);
    e1[0] = 1.0;
    if (name == "cone") {
        t.f = [](const CVec& z) { return cplx{std::max(0.0, 1.0 - std::abs(z[0])), 0.0}; };
    } else if (name == "rez") {
        t.f = [](const CVec& z) { return cplx{z[0].real(), 0.0}; };
        RidgeExpansion r;
        r.dim = dim;
        CVec m1 = e1;
        m1[0] = -1.0;
        r.w = {e1, m1};
        r.b = {0.0, 0.0};
        r.alpha = {1.0, -1.0};
        t.ridge_form = r;
    } else if (name == "relu_c") {
        t.f = [](const CVec& z) { return relu_c(z[0]); };
        RidgeExpansion r;
        r.dim = dim;
        r.w = {e1};
        r.b = {0.0};
        r.alpha = {1.0};
        t.ridge_form = r;
    } else if (name == "abs2_target") {
        t.f = [](const CVec& z) { return cplx{std::norm(z[0]), 0.0}; };
    } else if (name.rfind("constant:", 0) == 0) {
        std::string rest = name.substr(9);
        auto comma = rest.find(',');
        double re = 0.0, im = 0.0;
        try {
            re = std::stod(rest.substr(0, comma));
            if (comma != std::string::npos) im = std::stod(rest.substr(comma + 1));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad constant target '" + name + "'; expected constant:<re>,<im>");
        }
        cplx c{re, im};
        t.f = [c](const CVec&) { return c; };
        RidgeExpansion r;
        r.dim = dim;
        r.constant = c;
        t.ridge_form = r;
    } else {
        std::string msg = "unknown target '" + name + "'; known:";
        for (const auto& n : target_names()) msg += " " + n;
        throw std::invalid_argument(msg);
    }
    return t;
}

}  // namespace cvnn
