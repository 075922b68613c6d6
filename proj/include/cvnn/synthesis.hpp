#pragma once

#include <chrono>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvnn/certificate.hpp"
#include "cvnn/classifier.hpp"
#include "cvnn/extraction.hpp"
#include "cvnn/targets.hpp"

namespace cvnn {

class SynthesisRefused : public Error {
public:
    explicit SynthesisRefused(const std::string& why) : Error("synthesis refused: " + why) {}
};

struct ConstructorConfig {
    int degree = 6;
    int fit_points_per_axis = 40;
    int test_points_per_axis = 65;
    int validation_points_per_axis = 16;
    int multi_test_points_per_axis = 9;   ///< per real axis, for d >= 2
    int multi_fit_points = 4000;          ///< random fit sample size, for d >= 2
    double coefficient_cutoff = 1e-8;     ///< on normalised coefficients
    cplx expansion_center{0.0, 0.0};
    double search_radius = 2.0;
    int search_points_per_axis = 9;
    double clearance = 1.5;
    double mollifier_epsilon = 0.05;
    int mollifier_cells = 8;
    int mollifier_points = 64;
    bool shared_nodes = false;
    bool check_verdict = true;
    std::uint64_t seed = 0;
    int ridges = 256;
    double ridge_bias_scale = 0.0;        ///< 0: each ridge hyperplane passes through a random sample point
    double ridge_regularization = 1e-6;
    int relu_max_degree = 16;
    int lift_degree = 6;
    double eps = 0.1;
    double min_gamma_eps = 0.02;

    nlohmann::json echo() const {
        return {{"degree", degree},
                {"fit_points_per_axis", fit_points_per_axis},
                {"test_points_per_axis", test_points_per_axis},
                {"validation_points_per_axis", validation_points_per_axis},
                {"multi_test_points_per_axis", multi_test_points_per_axis},
                {"multi_fit_points", multi_fit_points},
                {"coefficient_cutoff", coefficient_cutoff},
                {"expansion_center", {expansion_center.real(), expansion_center.imag()}},
                {"search_radius", search_radius},
                {"search_points_per_axis", search_points_per_axis},
                {"clearance", clearance},
                {"mollifier_epsilon", mollifier_epsilon},
                {"mollifier_cells", mollifier_cells},
                {"mollifier_points", mollifier_points},
                {"shared_nodes", shared_nodes},
                {"check_verdict", check_verdict},
                {"seed", seed},
                {"ridges", ridges},
                {"ridge_bias_scale", ridge_bias_scale},
                {"ridge_regularization", ridge_regularization},
                {"relu_max_degree", relu_max_degree},
                {"lift_degree", lift_degree},
                {"eps", eps},
                {"min_gamma_eps", min_gamma_eps}};
    }

    MonomialRequest base_request() const {
        MonomialRequest r;
        r.mollifier_epsilon = mollifier_epsilon;
        r.mollifier_cells = mollifier_cells;
        r.mollifier_points = mollifier_points;
        return r;
    }

    ActiveSearchOptions search_options() const {
        ActiveSearchOptions o;
        o.mollifier_epsilon = mollifier_epsilon;
        o.mollifier_points = mollifier_points;
        return o;
    }
};

/// Candidate expansion points: first those well away from the non-smooth set, then points hugging it.
inline std::vector<CVec> expansion_tiers(const ActivationSpec& sigma, const ConstructorConfig& cfg) {
    Grid g = make_grid(cfg.expansion_center, cfg.search_radius, cfg.search_points_per_axis);
    CVec far, near;
    for (const auto& p : g.points) {
        cplx z = p[0];
        if (sigma.singular_at && sigma.singular_at(z)) continue;
        if (sigma.obstruction_distance(z) >= cfg.clearance) far.push_back(z);
    }
    if (!sigma.nonsmooth.empty())
        near = sigma.nonsmooth.probes(cfg.expansion_center, cfg.search_radius, 0.25 * cfg.mollifier_epsilon, 4);
    for (auto it = near.begin(); it != near.end();)
        it = sigma.singularities.distance(*it) < cfg.clearance ? near.erase(it) : it + 1;
    std::vector<CVec> tiers;
    if (!far.empty()) tiers.push_back(far);
    if (!near.empty()) tiers.push_back(near);
    return tiers;
}

inline ActivePoint find_expansion_point(const ActivationSpec& sigma, int m, int ell, const ConstructorConfig& cfg) {
    std::string why = "empty search grid";
    for (const auto& tier : expansion_tiers(sigma, cfg)) {
        try {
            return find_active_point(sigma, m, ell, tier, cfg.search_options());
        } catch (const NoActivePoint& e) {
            why = e.what();
        }
    }
    throw NoActivePoint(why);
}

struct MonomialReport {
    Exponent exponent;
    cplx coefficient;
    cplx theta;
    double fd_step = 0.0;
    int circles = 0;
    double validation_error = 0.0;
    std::size_t terms = 0;
};

struct ShallowResult {
    ShallowNetwork network{1};
    Certificate certificate;
    PolyFit fit;
    std::vector<MonomialReport> monomials;
};

inline void require_verdict(const ActivationSpec& sigma, bool deep) {
    ClassificationReport rep = classify(sigma);
    Verdict v = deep ? rep.deep_universal : rep.shallow_universal;
    if (v != Verdict::yes)
        throw SynthesisRefused(std::string(deep ? "deep" : "shallow") + " universality verdict for '" + sigma.name +
                               "' is " + to_string(v));
}

/// Realises a polynomial sum c_{m,l} z^m zbar^l on |z| <= s as a shallow sigma-network.
/// With shared_nodes all monomials use one expansion point and one stencil, so neurons are shared.
inline ShallowNetwork realize_polynomial(const ActivationSpec& sigma, const std::map<Exponent, cplx>& coeffs, double s,
                                         const CVec& validation, const ConstructorConfig& cfg,
                                         std::vector<MonomialReport>* reports, std::vector<std::string>* failures,
                                         const TuneOptions& tune = {}) {
    ShallowNetwork net(1);
    std::map<Exponent, cplx> active;
    for (const auto& [e, c] : coeffs) {
        if (e.first == 0 && e.second == 0) net.add_constant(c);
        else active[e] = c;
    }
    if (active.empty()) return net;

    if (cfg.shared_nodes) {
        Exponent hardest = active.rbegin()->first;
        for (const auto& [e, c] : active)
            if (e.first + e.second > hardest.first + hardest.second) hardest = e;
        ActivePoint ap = find_expansion_point(sigma, hardest.first, hardest.second, cfg);
        auto tuned = tune_extraction(sigma, active, ap.theta, s, validation, cfg.base_request(), tune);
        net.append(tuned.network);
        if (reports)
            for (const auto& [e, c] : active)
                reports->push_back({e, c, ap.theta, tuned.request.fd_step, tuned.request.stencil_radius,
                                    tuned.validation_error, tuned.network.size()});
    } else {
        for (const auto& [e, c] : active) {
            try {
                ActivePoint ap = find_expansion_point(sigma, e.first, e.second, cfg);
                auto tuned = tune_extraction(sigma, {{e, 1.0}}, ap.theta, s, validation, cfg.base_request(), tune);
                net.append(tuned.network, c);
                if (reports)
                    reports->push_back({e, c, ap.theta, tuned.request.fd_step, tuned.request.stencil_radius,
                                        tuned.validation_error, tuned.network.size()});
            } catch (const Error& err) {
                if (!failures) throw;
                failures->push_back("monomial (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                                    "): " + err.what());
            }
        }
    }
    net.compact();
    return net;
}

/// Shallow approximation of a scalar target on a disc via polynomial fit and monomial extraction.
inline ShallowResult synthesize_shallow(const ActivationSpec& sigma, const Target& target, cplx center, double radius,
                                        const ConstructorConfig& cfg = {}) {
    auto t0 = std::chrono::steady_clock::now();
    if (cfg.check_verdict) require_verdict(sigma, false);
    ShallowResult res;
    const double s = std::abs(center) + radius;
    Grid fit_grid = make_grid(center, radius, cfg.fit_points_per_axis);
    Grid test_grid = make_grid(center, radius, cfg.test_points_per_axis);
    require_disjoint(fit_grid.points, test_grid.points);

    res.fit = fit_poly_coeffs([&](cplx z) { return target(z); }, fit_grid.scalars(), cfg.degree, s);
    std::map<Exponent, cplx> coeffs;
    for (const auto& [e, c] : res.fit.normalized)
        if (std::abs(c) > cfg.coefficient_cutoff) coeffs[e] = res.fit.coeffs.at(e);

    CVec validation = make_grid(center, radius, cfg.validation_points_per_axis).scalars();
    Certificate& cert = res.certificate;
    res.network = realize_polynomial(sigma, coeffs, s, validation, cfg, &res.monomials, &cert.failures);

    cert.target_name = target.name;
    cert.activation_name = sigma.name;
    cert.domain = {{center}, radius};
    cert.depth = 1;
    cert.neurons = static_cast<long>(res.network.size());
    cert.seed = cfg.seed;
    cert.config_echo = cfg.echo();
    cert.config_echo["mode"] = "shallow";
    cert.config_echo["fit_residual_sup"] = res.fit.residual_sup;
    measure_errors(cert, test_grid.points, [&](const CVec& z) { return res.network(sigma, z[0]); },
                   [&](const CVec& z) { return target(z); });
    cert.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace cvnn
