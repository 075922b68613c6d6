#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cvnn/activation.hpp"
#include "cvnn/lstsq.hpp"
#include "cvnn/network.hpp"
#include "cvnn/wirtinger.hpp"

namespace cvnn {

/// Discretised convolution sigma * eta_eps as a shallow network:
/// [-A, A]^2 is cut into m_cells^2 squares, each contributing (kernel mass of the cell) * sigma(z - centre).
inline ShallowNetwork translate_sum(double epsilon, double A, int m_cells, int mollifier_points = 64,
                                    int sub_points = 0) {
    if (!(epsilon > 0.0) || !(A > 0.0)) throw std::invalid_argument("translate_sum: epsilon and A must be positive");
    if (m_cells < 1) throw std::invalid_argument("translate_sum: need at least one cell");
    if (sub_points <= 0) sub_points = std::max(4, (256 + m_cells - 1) / m_cells);
    const MollifierSpec spec = make_mollifier(epsilon, mollifier_points);
    const double h = 2.0 * A / m_cells;
    const double dh = h / sub_points;
    ShallowNetwork net(1);
    for (int k = 0; k < m_cells; ++k) {
        for (int l = 0; l < m_cells; ++l) {
            cplx lo{-A + k * h, -A + l * h};
            double mass = 0.0;
            for (int i = 0; i < sub_points; ++i)
                for (int j = 0; j < sub_points; ++j)
                    mass += spec.density(lo + cplx{(i + 0.5) * dh, (j + 0.5) * dh}) * dh * dh;
            if (mass == 0.0) continue;
            net.add_term(mass, 1.0, -(lo + cplx{0.5 * h, 0.5 * h}));
        }
    }
    return net;
}

struct MonomialRequest {
    int m = 0;
    int ell = 0;
    cplx theta{0.0, 0.0};
    double fd_step = 0.5;        ///< polar: outer sampling radius of the dilation; cartesian: lattice step
    int stencil_radius = 0;      ///< polar: number of circles (0 = default); cartesian: accuracy order
    int angles = 0;              ///< polar: samples per circle (0 = default)
    std::string scheme = "polar";
    double domain_radius = 1.0;  ///< the network approximates z^m zbar^l on |z| <= domain_radius
    enum class Smoothing { automatic, always, never } smoothing = Smoothing::automatic;
    double mollifier_epsilon = 0.05;
    int mollifier_cells = 8;
    int mollifier_points = 64;
};

inline Stencil request_stencil(const MonomialRequest& req) {
    if (req.scheme == "polar") {
        PolarParams p;
        p.radius = req.fd_step;
        p.radial = req.stencil_radius;
        p.angles = req.angles;
        return polar_stencil(req.m, req.ell, p);
    }
    if (req.scheme == "cartesian")
        return cartesian_stencil(req.m, req.ell, req.fd_step, req.stencil_radius > 0 ? req.stencil_radius : 4);
    throw std::invalid_argument("unknown stencil scheme '" + req.scheme + "'");
}

/// Whether the request must realise sigma through the mollified translate sum.
inline bool needs_smoothing(const ActivationSpec& sigma, const MonomialRequest& req, double reach) {
    switch (req.smoothing) {
        case MonomialRequest::Smoothing::always: return true;
        case MonomialRequest::Smoothing::never: return false;
        default: break;
    }
    if (sigma.smooth && sigma.singularities.empty()) return false;
    return sigma.obstruction_distance(req.theta) <= 1.05 * reach;
}

/// Shallow network approximating z^m zbar^l on |z| <= domain_radius, built from sigma by a
/// divided-difference stencil in the dilation parameter and normalised by the same stencil at z = 1.
inline ShallowNetwork extract_monomial(const ActivationSpec& sigma, const MonomialRequest& req) {
    if (req.m < 0 || req.ell < 0) throw std::invalid_argument("extract_monomial: negative order");
    if (!(req.domain_radius > 0.0)) throw std::invalid_argument("extract_monomial: domain radius must be positive");
    const Stencil st = (req.m == 0 && req.ell == 0) ? Stencil{{0.0}, {1.0}} : request_stencil(req);
    const bool smooth = needs_smoothing(sigma, req, st.reach());
    ShallowNetwork smoother(1);
    if (smooth)
        smoother = translate_sum(req.mollifier_epsilon, req.mollifier_epsilon, req.mollifier_cells, req.mollifier_points);
    else
        smoother.add_term(1.0, 1.0, 0.0);

    cplx D{0.0, 0.0};
    double value_scale = 1.0;
    try {
        for (std::size_t j = 0; j < st.size(); ++j) {
            cplx v = smoother(sigma, req.theta + st.offsets[j]);
            if (!is_finite(v)) throw StencilSingularity("non-finite sample");
            D += st.weights[j] * v;
            value_scale = std::max(value_scale, std::abs(v));
        }
    } catch (const ActivationSingularity& e) {
        throw StencilSingularity(e.what());
    }
    const int order = req.m + req.ell;
    // Below this the derivative estimate is indistinguishable from round-off in the stencil sum.
    const double floor = 10.0 * std::numeric_limits<double>::epsilon() * st.weight_l1() * value_scale;
    if (!(std::abs(D) > floor))
        throw InactiveExpansionPoint("derivative (" + std::to_string(req.m) + "," + std::to_string(req.ell) +
                                     ") vanishes numerically at the expansion point");

    const double s = req.domain_radius;
    const cplx scale = std::pow(s, order) / D;
    ShallowNetwork out(1);
    for (std::size_t j = 0; j < st.size(); ++j) {
        const cplx w = st.offsets[j] / s;
        for (std::size_t k = 0; k < smoother.size(); ++k)
            out.add_term(scale * st.weights[j] * smoother.coeff(k), w * smoother.weight(k),
                         req.theta + smoother.bias(k));
    }
    out.compact();
    return out;
}

struct ActivePoint {
    cplx theta;
    double magnitude = 0.0;   ///< |d^m dbar^l sigma_smooth(theta)|
    double normalized = 0.0;  ///< magnitude relative to the stencil's round-off scale
    bool smoothed = false;
};

struct ActiveSearchOptions {
    double mollifier_epsilon = 0.05;
    int mollifier_points = 64;
    double threshold = 10.0 * std::numeric_limits<double>::epsilon();
};

/// Argmax over `candidates` of |d^m dbar^l sigma_smooth|, where sigma_smooth is sigma near points far
/// from its non-smooth set and sigma_eps otherwise.
inline ActivePoint find_active_point(const ActivationSpec& sigma, int m, int ell, const CVec& candidates,
                                     const ActiveSearchOptions& opt = {}) {
    if (candidates.empty()) throw NoActivePoint("empty search grid");
    std::optional<Mollified> moll;
    ActivePoint best;
    bool any = false;
    const double eps = opt.mollifier_epsilon;
    for (cplx theta : candidates) {
        const double dist = sigma.obstruction_distance(theta);
        const bool direct = (sigma.smooth && sigma.singularities.empty()) || dist > 4.0 * eps;
        const double L = direct ? std::min(dist, 2.0) : eps;
        // two probe radii: a genuine derivative agrees across them, rounding noise does not
        auto probe = [&](double radius) -> std::pair<cplx, double> {
            PolarParams p;
            p.radius = radius;
            p.radial = std::min(m, ell) + 2;
            Stencil st = (m == 0 && ell == 0) ? Stencil{{0.0}, {1.0}} : polar_stencil(m, ell, p);
            if (direct) return {st.apply(sigma, theta), st.weight_l1() * std::max(1.0, std::abs(sigma(theta)))};
            if (!moll) moll.emplace(sigma, std::make_shared<const MollifierSpec>(make_mollifier(eps, opt.mollifier_points)));
            return {st.apply(*moll, theta), st.weight_l1() * std::max(1.0, std::abs((*moll)(theta)))};
        };
        std::pair<cplx, double> a, b;
        try {
            a = probe(0.6 * L);
            b = probe(0.45 * L);
        } catch (const Error&) {
            continue;
        }
        const double mag = std::max(std::abs(a.first), std::abs(b.first));
        const double nrm = std::min(std::abs(a.first) / a.second, std::abs(b.first) / b.second);
        if (!(std::abs(a.first - b.first) <= 0.5 * mag) || !(nrm > opt.threshold)) continue;
        if (!any || mag > best.magnitude) {
            best = {theta, mag, nrm, !direct};
            any = true;
        }
    }
    if (!any || !(best.normalized > opt.threshold))
        throw NoActivePoint("derivative (" + std::to_string(m) + "," + std::to_string(ell) + ") vanishes on the search grid");
    return best;
}

/// f ~ sum c_{m,l} z^m zbar^l with 0 <= m, l <= degree.
struct PolyFit {
    int degree = 0;
    double radius = 1.0;
    std::map<Exponent, cplx> coeffs;      ///< raw coefficients of z^m zbar^l
    std::map<Exponent, cplx> normalized;  ///< coefficients of (z/radius)^m (zbar/radius)^l
    double residual_sup = 0.0;            ///< max |f - fit| on the fit points
    double condition = 0.0;

    cplx operator()(cplx z) const {
        cplx u = z / radius, acc{0.0, 0.0};
        for (const auto& [e, c] : normalized) acc += c * std::pow(u, e.first) * std::pow(std::conj(u), e.second);
        return acc;
    }
};

inline PolyFit fit_poly_coeffs(const std::function<cplx(cplx)>& target, const CVec& fit_points, int degree,
                               double radius) {
    if (degree < 0) throw std::invalid_argument("fit_poly_coeffs: negative degree");
    if (!(radius > 0.0)) throw std::invalid_argument("fit_poly_coeffs: radius must be positive");
    const auto ex = box_exponents(degree);
    if (fit_points.size() < ex.size()) throw std::invalid_argument("fit_poly_coeffs: fewer points than basis functions");
    const auto n = static_cast<Eigen::Index>(fit_points.size());
    Eigen::MatrixXcd A(n, static_cast<Eigen::Index>(ex.size()));
    Eigen::VectorXcd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        cplx u = fit_points[i] / radius;
        for (std::size_t k = 0; k < ex.size(); ++k)
            A(i, static_cast<Eigen::Index>(k)) = std::pow(u, ex[k].first) * std::pow(std::conj(u), ex[k].second);
        y[i] = target(fit_points[i]);
    }
    auto ls = scaled_least_squares(A, y);
    PolyFit fit;
    fit.degree = degree;
    fit.radius = radius;
    fit.condition = ls.condition;
    for (std::size_t k = 0; k < ex.size(); ++k) {
        cplx c = ls.coeffs[static_cast<Eigen::Index>(k)];
        fit.normalized[ex[k]] = c;
        fit.coeffs[ex[k]] = c / std::pow(radius, ex[k].first + ex[k].second);
    }
    fit.residual_sup = (A * ls.coeffs - y).cwiseAbs().maxCoeff();
    return fit;
}

struct TuneOptions {
    std::vector<double> fractions{0.15, 0.25, 0.35, 0.45, 0.55, 0.65};
    std::vector<int> extra_circles{2, 3, 4, 5, 6, 7};
    std::vector<double> smoothed_fractions{0.5, 1.0, 2.0};
    std::vector<int> smoothed_extra_circles{2, 4};
    std::vector<int> angle_candidates;  ///< empty: one default count derived from the orders
    double max_length = 2.0;            ///< cap on the length scale used for entire activations
    double error_budget = 0.0;          ///< > 0: pick the smallest network whose error is within budget
};

/// Characteristic length available around theta for direct (unsmoothed) sampling.
inline double clearance_length(const ActivationSpec& sigma, cplx theta, double max_length) {
    return std::min(sigma.obstruction_distance(theta), max_length);
}

struct TunedExtraction {
    MonomialRequest request;
    ShallowNetwork network{1};
    double validation_error = std::numeric_limits<double>::infinity();
};

/// Tries candidate stencils at one expansion point and keeps the network that best reproduces
/// sum coeffs[(m,l)] z^m zbar^l on `validation`.
inline TunedExtraction tune_extraction(const ActivationSpec& sigma, const std::map<Exponent, cplx>& coeffs, cplx theta,
                                       double domain_radius, const CVec& validation, MonomialRequest base,
                                       const TuneOptions& opt = {}) {
    int max_order = 0, s0_max = 0;
    for (const auto& [e, c] : coeffs) {
        max_order = std::max({max_order, e.first, e.second});
        s0_max = std::max(s0_max, std::min(e.first, e.second));
    }
    base.theta = theta;
    base.domain_radius = domain_radius;
    base.scheme = "polar";

    const double L = clearance_length(sigma, theta, opt.max_length);
    const double eps = base.mollifier_epsilon;
    const bool direct_possible = (sigma.smooth && sigma.singularities.empty()) || L > 4.0 * eps;

    std::vector<int> angles = opt.angle_candidates;
    if (angles.empty()) angles.push_back(default_polar_angles(max_order, max_order));
    struct Candidate { double radius; int circles; int angles; };
    std::vector<Candidate> candidates;
    for (int k : angles) {
        if (k <= 2 * max_order) continue;
        if (direct_possible) {
            for (double f : opt.fractions)
                for (int e : opt.extra_circles) candidates.push_back({f * L, s0_max + e, k});
        } else {
            for (double f : opt.smoothed_fractions)
                for (int e : opt.smoothed_extra_circles) candidates.push_back({f * eps, s0_max + e, k});
        }
    }

    std::vector<cplx> reference(validation.size());
    for (std::size_t i = 0; i < validation.size(); ++i) {
        cplx acc{0.0, 0.0};
        for (const auto& [e, c] : coeffs)
            acc += c * std::pow(validation[i], e.first) * std::pow(std::conj(validation[i]), e.second);
        reference[i] = acc;
    }

    TunedExtraction best;
    bool best_in_budget = false;
    std::string last_error;
    for (const auto& cand : candidates) {
        MonomialRequest req = base;
        req.fd_step = cand.radius;
        req.stencil_radius = cand.circles;
        req.angles = cand.angles;
        req.smoothing = direct_possible ? MonomialRequest::Smoothing::never : MonomialRequest::Smoothing::always;
        ShallowNetwork net(1);
        try {
            for (const auto& [e, c] : coeffs) {
                if (e.first == 0 && e.second == 0) {
                    net.add_constant(c);
                    continue;
                }
                req.m = e.first;
                req.ell = e.second;
                net.append(extract_monomial(sigma, req), c);
            }
        } catch (const Error& e) {
            last_error = e.what();
            continue;
        }
        net.compact();
        const bool budgeted = opt.error_budget > 0.0;
        if (budgeted && best_in_budget && net.size() > best.network.size()) continue;
        const double stop = budgeted ? std::numeric_limits<double>::infinity() : best.validation_error;
        double err = 0.0;
        for (std::size_t i = 0; i < validation.size() && err < stop; ++i) {
            cplx v = net(sigma, validation[i]);
            err = std::max(err, is_finite(v) ? std::abs(v - reference[i]) : std::numeric_limits<double>::infinity());
        }
        bool take;
        if (budgeted) {
            const bool in_budget = err <= opt.error_budget;
            if (in_budget && !best_in_budget) take = true;
            else if (in_budget) take = net.size() < best.network.size() ||
                                      (net.size() == best.network.size() && err < best.validation_error);
            else take = !best_in_budget && err < best.validation_error;
            if (take) best_in_budget = in_budget;
        } else {
            take = err < best.validation_error;
        }
        if (take) {
            best.validation_error = err;
            best.request = req;
            best.network = std::move(net);
        }
    }
    if (!std::isfinite(best.validation_error)) {
        if (last_error.find("inactive expansion point") != std::string::npos) throw InactiveExpansionPoint(last_error);
        throw StencilSingularity("no stencil candidate could be evaluated" + (last_error.empty() ? "" : ": " + last_error));
    }
    return best;
}

}  // namespace cvnn
