#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvnn/activation.hpp"
#include "cvnn/lstsq.hpp"
#include "cvnn/version.hpp"
#include "cvnn/wirtinger.hpp"

namespace cvnn {

enum class Verdict { yes, no, indeterminate };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::yes: return "yes";
        case Verdict::no: return "no";
        default: return "indeterminate";
    }
}

struct ClassifierConfig {
    double tol = 1e-4;
    double grid_radius = 2.0;
    int points_per_axis = 33;
    double mollifier_epsilon = 0.05;
    int mollifier_points = 64;
    int max_polyharmonic_order = 4;
    int max_polynomial_degree = 4;
    int accuracy = 4;
    double singular_margin = 0.5;       ///< grid points this close to a singular point are dropped
    double probe_offset = 0.37;         ///< probe distance from the non-smooth set, in units of epsilon
    int probes_per_piece = 16;
    bool stop_when_decided = true;      ///< stop scanning once a residual is known to exceed tol

    nlohmann::json echo() const {
        return {{"tol", tol},
                {"grid_radius", grid_radius},
                {"points_per_axis", points_per_axis},
                {"mollifier_epsilon", mollifier_epsilon},
                {"mollifier_points", mollifier_points},
                {"max_polyharmonic_order", max_polyharmonic_order},
                {"max_polynomial_degree", max_polynomial_degree},
                {"accuracy", accuracy},
                {"singular_margin", singular_margin},
                {"probe_offset", probe_offset},
                {"probes_per_piece", probes_per_piece},
                {"stop_when_decided", stop_when_decided}};
    }
};

/// Smooth stand-in used for differentiation: sigma itself when it is smooth, else sigma_eps.
class SmoothView {
public:
    SmoothView(const ActivationSpec& sigma, const ClassifierConfig& cfg) : sigma_(sigma), accuracy_(cfg.accuracy) {
        if (!sigma.smooth) {
            moll_ = std::make_unique<Mollified>(
                sigma, std::make_shared<const MollifierSpec>(make_mollifier(cfg.mollifier_epsilon, cfg.mollifier_points)));
            eps_ = cfg.mollifier_epsilon;
        }
    }

    bool mollified() const { return static_cast<bool>(moll_); }

    cplx value(cplx z) const { return moll_ ? (*moll_)(z) : sigma_(z); }

    double step(cplx z, int order) const {
        if (!moll_) return default_step(z, order, accuracy_);
        const double e = std::numeric_limits<double>::epsilon();
        return eps_ * std::max(0.05, 0.5 * std::pow(e, 1.0 / (order + accuracy_)));
    }

    cplx derivative(cplx z, int m, int ell) const {
        auto f = [this](cplx u) { return value(u); };
        return wirtinger_derivative(f, z, m, ell, step(z, m + ell), accuracy_);
    }

private:
    const ActivationSpec& sigma_;
    int accuracy_;
    double eps_ = 0.0;
    std::unique_ptr<Mollified> moll_;
};

/// Evaluation points for the classifier: probes hugging the non-smooth set first, then a regular grid.
inline CVec classifier_points(const ActivationSpec& sigma, const ClassifierConfig& cfg) {
    CVec pts;
    if (!sigma.nonsmooth.empty()) {
        for (cplx p : sigma.nonsmooth.probes(0.0, cfg.grid_radius, cfg.probe_offset * cfg.mollifier_epsilon,
                                             cfg.probes_per_piece))
            pts.push_back(p);
    }
    Grid g = make_grid(cplx{0.0}, cfg.grid_radius, cfg.points_per_axis, sigma.discontinuities);
    for (const auto& p : g.points) pts.push_back(p[0]);
    CVec out;
    for (cplx z : pts)
        if (sigma.singularities.distance(z) >= cfg.singular_margin) out.push_back(z);
    if (out.empty()) throw GridExhausted();
    return out;
}

struct ScanResult {
    double value = 0.0;
    std::size_t skipped = 0;
    std::size_t total = 0;
};

namespace detail {

inline double value_scale(const ActivationSpec& sigma, const CVec& pts) {
    double s = 1.0;
    for (cplx z : pts) {
        try {
            cplx v = sigma(z);
            if (is_finite(v)) s = std::max(s, std::abs(v));
        } catch (const ActivationSingularity&) {
        }
    }
    return s;
}

template <class F>
ScanResult scan_max(const CVec& pts, F&& f, double stop_at) {
    ScanResult r;
    r.total = pts.size();
    for (cplx z : pts) {
        try {
            r.value = std::max(r.value, f(z));
        } catch (const StencilSingularity&) {
            ++r.skipped;
        }
        if (r.value >= stop_at) break;
    }
    return r;
}

}  // namespace detail

struct PolyharmonicResult {
    std::optional<int> order;
    std::vector<double> residuals;  ///< normalised r_m for m = 1, 2, ... as far as computed
    std::size_t skipped = 0;
};

/// Smallest m <= max_order with max |Delta^m sigma_s| / max(1, max|sigma|) below tol.
inline PolyharmonicResult detect_polyharmonic(const ActivationSpec& sigma, const ClassifierConfig& cfg,
                                              const CVec& pts) {
    SmoothView view(sigma, cfg);
    const double scale = detail::value_scale(sigma, pts);
    PolyharmonicResult res;
    for (int m = 1; m <= cfg.max_polyharmonic_order; ++m) {
        auto r = detail::scan_max(
            pts,
            [&](cplx z) { return std::abs(std::pow(4.0, m) * view.derivative(z, m, m)) / scale; },
            cfg.stop_when_decided ? cfg.tol : std::numeric_limits<double>::infinity());
        res.residuals.push_back(r.value);
        res.skipped = std::max(res.skipped, r.skipped);
        if (r.value < cfg.tol) {
            res.order = m;
            break;
        }
    }
    return res;
}

inline PolyharmonicResult detect_polyharmonic(const ActivationSpec& sigma, const ClassifierConfig& cfg = {}) {
    return detect_polyharmonic(sigma, cfg, classifier_points(sigma, cfg));
}

enum class HolomorphyClass { holomorphic, antiholomorphic, both, neither };

inline std::string to_string(HolomorphyClass h) {
    switch (h) {
        case HolomorphyClass::holomorphic: return "holomorphic";
        case HolomorphyClass::antiholomorphic: return "antiholomorphic";
        case HolomorphyClass::both: return "both";
        default: return "neither";
    }
}

struct HolomorphyResult {
    HolomorphyClass cls = HolomorphyClass::neither;
    double dbar_residual = 0.0;  ///< max |dbar sigma_s| / S
    double d_residual = 0.0;     ///< max |d sigma_s| / S
    std::size_t skipped = 0;
    bool holomorphic() const { return cls == HolomorphyClass::holomorphic || cls == HolomorphyClass::both; }
    bool antiholomorphic() const { return cls == HolomorphyClass::antiholomorphic || cls == HolomorphyClass::both; }
};

/// Compares max |dbar sigma_s| and max |d sigma_s| with tol * max(max|d|, max|dbar|, 1).
inline HolomorphyResult detect_holomorphy(const ActivationSpec& sigma, const ClassifierConfig& cfg, const CVec& pts) {
    SmoothView view(sigma, cfg);
    double dmax = 0.0, dbmax = 0.0;
    HolomorphyResult res;
    for (cplx z : pts) {
        try {
            dmax = std::max(dmax, std::abs(view.derivative(z, 1, 0)));
            dbmax = std::max(dbmax, std::abs(view.derivative(z, 0, 1)));
        } catch (const StencilSingularity&) {
            ++res.skipped;
        }
    }
    const double S = std::max({dmax, dbmax, 1.0});
    res.dbar_residual = dbmax / S;
    res.d_residual = dmax / S;
    const bool h = res.dbar_residual < cfg.tol;
    const bool a = res.d_residual < cfg.tol;
    res.cls = h && a ? HolomorphyClass::both
                     : h ? HolomorphyClass::holomorphic : a ? HolomorphyClass::antiholomorphic : HolomorphyClass::neither;
    return res;
}

inline HolomorphyResult detect_holomorphy(const ActivationSpec& sigma, const ClassifierConfig& cfg = {}) {
    return detect_holomorphy(sigma, cfg, classifier_points(sigma, cfg));
}

/// Relative sup residual of the least-squares fit of sigma by sum_{a+b<=degree} c z^a zbar^b.
inline double polynomial_fit_residual(const ActivationSpec& sigma, int degree, const CVec& pts, double radius) {
    CVec zs;
    CVec vals;
    for (cplx z : pts) {
        try {
            cplx v = sigma(z);
            if (!is_finite(v)) continue;
            zs.push_back(z);
            vals.push_back(v);
        } catch (const ActivationSingularity&) {
        }
    }
    auto ex = total_degree_exponents(degree);
    Eigen::MatrixXcd A(static_cast<Eigen::Index>(zs.size()), static_cast<Eigen::Index>(ex.size()));
    Eigen::VectorXcd y(static_cast<Eigen::Index>(zs.size()));
    double scale = 1.0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        cplx u = zs[i] / radius;
        for (std::size_t k = 0; k < ex.size(); ++k)
            A(i, k) = std::pow(u, ex[k].first) * std::pow(std::conj(u), ex[k].second);
        y[i] = vals[i];
        scale = std::max(scale, std::abs(vals[i]));
    }
    auto ls = scaled_least_squares(A, y);
    return (A * ls.coeffs - y).cwiseAbs().maxCoeff() / scale;
}

/// max over points and a + b = degree + 1 of |d^a dbar^b sigma_s| / max(1, max|sigma|).
inline ScanResult polynomial_derivative_residual(const ActivationSpec& sigma, int degree, const ClassifierConfig& cfg,
                                                 const CVec& pts) {
    SmoothView view(sigma, cfg);
    const double scale = detail::value_scale(sigma, pts);
    const int k = degree + 1;
    return detail::scan_max(
        pts,
        [&](cplx z) {
            double r = 0.0;
            for (int a = 0; a <= k; ++a) r = std::max(r, std::abs(view.derivative(z, a, k - a)));
            return r / scale;
        },
        cfg.stop_when_decided ? cfg.tol : std::numeric_limits<double>::infinity());
}

struct PolynomialResult {
    std::optional<int> degree;
    std::vector<double> fit_residuals;
    std::map<int, double> derivative_residuals;
};

/// Smallest total degree D <= max_degree for which both the fit test and the derivative test pass.
inline PolynomialResult detect_polynomial(const ActivationSpec& sigma, const ClassifierConfig& cfg, const CVec& pts) {
    PolynomialResult res;
    for (int D = 0; D <= cfg.max_polynomial_degree; ++D) {
        double fit = polynomial_fit_residual(sigma, D, pts, cfg.grid_radius);
        res.fit_residuals.push_back(fit);
        if (fit >= cfg.tol) continue;
        auto der = polynomial_derivative_residual(sigma, D, cfg, pts);
        res.derivative_residuals[D] = der.value;
        if (der.value < cfg.tol) {
            res.degree = D;
            break;
        }
    }
    return res;
}

inline PolynomialResult detect_polynomial(const ActivationSpec& sigma, const ClassifierConfig& cfg = {}) {
    return detect_polynomial(sigma, cfg, classifier_points(sigma, cfg));
}

struct ClassificationReport {
    std::string activation_name;
    std::optional<int> polyharmonic_order;
    bool holomorphic = false;
    bool antiholomorphic = false;
    std::optional<int> polynomial_degree;
    bool ae_equal_but_discontinuous = false;
    Verdict shallow_universal = Verdict::indeterminate;
    Verdict deep_universal = Verdict::indeterminate;
    std::map<std::string, double> evidence;
    std::vector<std::string> notes;
    nlohmann::json config_echo;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["activation_name"] = activation_name;
        j["polyharmonic_order"] = polyharmonic_order ? nlohmann::json(*polyharmonic_order) : nlohmann::json(nullptr);
        j["holomorphic"] = holomorphic;
        j["antiholomorphic"] = antiholomorphic;
        j["polynomial_degree"] = polynomial_degree ? nlohmann::json(*polynomial_degree) : nlohmann::json(nullptr);
        j["ae_equal_but_discontinuous"] = ae_equal_but_discontinuous;
        j["shallow_universal"] = to_string(shallow_universal);
        j["deep_universal"] = to_string(deep_universal);
        j["evidence"] = evidence;
        j["notes"] = notes;
        j["config_echo"] = config_echo;
        j["version"] = version_string;
        return j;
    }
};

inline ClassificationReport classify(const ActivationSpec& sigma, const ClassifierConfig& cfg = {}) {
    sigma.validate();
    ClassificationReport rep;
    rep.activation_name = sigma.name;
    rep.config_echo = cfg.echo();
    rep.config_echo["activation"] = sigma.name;

    const CVec pts = classifier_points(sigma, cfg);
    rep.evidence["grid_points"] = static_cast<double>(pts.size());

    auto ph = detect_polyharmonic(sigma, cfg, pts);
    for (std::size_t m = 0; m < ph.residuals.size(); ++m)
        rep.evidence["polyharmonic_m" + std::to_string(m + 1)] = ph.residuals[m];
    rep.polyharmonic_order = ph.order;

    auto ho = detect_holomorphy(sigma, cfg, pts);
    rep.evidence["holomorphy_dbar"] = ho.dbar_residual;
    rep.evidence["holomorphy_d"] = ho.d_residual;
    rep.holomorphic = ho.holomorphic();
    rep.antiholomorphic = ho.antiholomorphic();

    auto po = detect_polynomial(sigma, cfg, pts);
    for (std::size_t D = 0; D < po.fit_residuals.size(); ++D)
        rep.evidence["polynomial_fit_D" + std::to_string(D)] = po.fit_residuals[D];
    for (const auto& [D, r] : po.derivative_residuals) rep.evidence["polynomial_derivative_D" + std::to_string(D)] = r;
    rep.polynomial_degree = po.degree;

    const std::size_t skipped = std::max(ph.skipped, ho.skipped);
    rep.evidence["skipped_points"] = static_cast<double>(skipped);
    const bool degraded = skipped * 10 > pts.size();
    if (degraded) rep.notes.emplace_back("more than 10% of grid points hit a singularity");

    if (!sigma.locally_bounded) {
        rep.notes.emplace_back("activation is not locally bounded; theorems do not apply");
        return rep;
    }

    rep.shallow_universal = degraded ? Verdict::indeterminate : ph.order ? Verdict::no : Verdict::yes;

    const bool forbidden = rep.polynomial_degree.has_value() || rep.holomorphic || rep.antiholomorphic;
    if (!forbidden) {
        rep.deep_universal = degraded ? Verdict::indeterminate : Verdict::yes;
    } else if (sigma.continuous) {
        rep.deep_universal = Verdict::no;
    } else {
        rep.ae_equal_but_discontinuous = true;
        if (sigma.has_annotation(annotation::deep_by_composition)) {
            rep.deep_universal = Verdict::yes;
            rep.notes.emplace_back("deep verdict taken from the activation's annotation");
        } else {
            rep.deep_universal = Verdict::indeterminate;
        }
    }
    if (rep.shallow_universal == Verdict::yes && rep.deep_universal == Verdict::no) {
        rep.shallow_universal = Verdict::indeterminate;
        rep.notes.emplace_back("shallow test passed but a deep obstruction was found; evidence inconsistent");
    }
    return rep;
}

}  // namespace cvnn
