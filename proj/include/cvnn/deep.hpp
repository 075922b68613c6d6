#pragma once

#include <chrono>
#include <random>
#include <string>
#include <vector>

#include "cvnn/network.hpp"
#include "cvnn/synthesis.hpp"

namespace cvnn {

/// Power-basis coefficients of sum c_j T_j(t).
inline std::vector<double> chebyshev_to_power(const std::vector<double>& c) {
    const std::size_t n = c.size();
    std::vector<double> a(n, 0.0), tprev(n, 0.0), tcur(n, 0.0);
    if (n == 0) return a;
    tprev[0] = 1.0;
    a[0] += c[0];
    if (n > 1) {
        tcur[1] = 1.0;
        a[1] += c[1];
    }
    for (std::size_t j = 2; j < n; ++j) {
        std::vector<double> tnext(n, 0.0);
        for (std::size_t k = 0; k + 1 < n; ++k) tnext[k + 1] += 2.0 * tcur[k];
        for (std::size_t k = 0; k < n; ++k) tnext[k] -= tprev[k];
        for (std::size_t k = 0; k < n; ++k) a[k] += c[j] * tnext[k];
        tprev.swap(tcur);
        tcur.swap(tnext);
    }
    return a;
}

/// Near-minimax polynomial approximation of max(0, x) on [-r, r] (Lawson's iteratively reweighted
/// least squares), returned as power-basis coefficients in t = x / r together with its sup error.
inline std::pair<std::vector<double>, double> relu_minimax_power(int degree, double r, int iterations = 300) {
    const int M = 2001, n = degree + 1;
    Eigen::MatrixXd T(M, n);
    Eigen::VectorXd y(M);
    for (int i = 0; i < M; ++i) {
        double t = -std::cos(pi * i / (M - 1));
        y[i] = std::max(0.0, r * t);
        T(i, 0) = 1.0;
        if (n > 1) T(i, 1) = t;
        for (int j = 2; j < n; ++j) T(i, j) = 2.0 * t * T(i, j - 1) - T(i, j - 2);
    }
    Eigen::VectorXd w = Eigen::VectorXd::Constant(M, 1.0 / M), best;
    double best_err = std::numeric_limits<double>::infinity();
    for (int it = 0; it < iterations; ++it) {
        Eigen::VectorXd sw = w.array().sqrt();
        Eigen::VectorXd c = (sw.asDiagonal() * T).colPivHouseholderQr().solve(sw.cwiseProduct(y));
        Eigen::VectorXd e = (T * c - y).cwiseAbs();
        double err = e.maxCoeff();
        if (err < best_err) {
            best_err = err;
            best = c;
        }
        w = w.cwiseProduct(e);
        double total = w.sum();
        if (!(total > 0.0)) break;
        w /= total;
    }
    return {chebyshev_to_power(std::vector<double>(best.data(), best.data() + best.size())), best_err};
}

inline cplx eval_power(const std::vector<double>& a, cplx t) {
    cplx acc{0.0, 0.0};
    for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * t + *it;
    return acc;
}

struct ReluCResult {
    NetworkWeights network;  ///< depth 2, approximates relu_c on B_r
    ShallowNetwork psi{1};   ///< approximates Re z on B_r
    ShallowNetwork phi{1};   ///< approximates the polynomial p on a tube around [-r, r]
    int poly_degree = 0;
    double delta = 0.0;
    double poly_error = 0.0;
    double psi_error = 0.0;
    double phi_error = 0.0;
    double measured_error = 0.0;
    std::size_t test_points = 0;
    bool exact_composition = false;  ///< sigma o sigma already equals relu_c
    bool budget_met = true;          ///< false when the degree cap stopped the polynomial short of eps/3
};

/// True when sigma(sigma(z)) reproduces relu_c to rounding on seeded points of B_r, real axis included.
inline bool composes_to_relu_c(const ActivationSpec& sigma, double r, std::uint64_t seed = 0) {
    CVec pts;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-r, r);
    for (int i = 0; i < 200; ++i) pts.push_back(uniform_disc(rng, r));
    for (int i = 0; i < 50; ++i) pts.push_back(u(rng));
    for (cplx z : pts) {
        try {
            cplx v = sigma(sigma(z));
            if (!(std::abs(v - relu_c(z)) <= 1e-15 * std::max(1.0, std::abs(z)))) return false;
        } catch (const Error&) {
            return false;
        }
    }
    return true;
}

inline NetworkWeights pass_through_network() {
    ShallowNetwork p(1);
    p.add_term(1.0, 1.0, 0.0);
    return p.to_network();
}

namespace detail {

inline CVec tube_points(double r, double delta) {
    CVec out;
    const int nx = 81;
    for (int i = 0; i < nx; ++i) {
        double x = -r - delta + 2.0 * (r + delta) * i / (nx - 1);
        for (double fy : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
            cplx u{x, fy * delta};
            double dx = std::max(0.0, std::abs(x) - r);
            if (std::hypot(dx, fy * delta) <= delta * (1.0 + 1e-12)) out.push_back(u);
        }
    }
    return out;
}

/// Realises a polynomial with shared nodes; when the holomorphic monomials are inactive
/// the conjugate monomials are tried instead (they agree on the real axis).
inline TunedExtraction realize_shared(const ActivationSpec& sigma, const std::map<Exponent, cplx>& coeffs, double s,
                                      const CVec& validation, const ConstructorConfig& cfg, const TuneOptions& tune,
                                      bool allow_conjugate) {
    Exponent hardest{0, 0};
    for (const auto& [e, c] : coeffs)
        if (e.first + e.second > hardest.first + hardest.second) hardest = e;
    try {
        ActivePoint ap = find_expansion_point(sigma, hardest.first, hardest.second, cfg);
        return tune_extraction(sigma, coeffs, ap.theta, s, validation, cfg.base_request(), tune);
    } catch (const Error&) {
        if (!allow_conjugate) throw;
    }
    std::map<Exponent, cplx> conj;
    for (const auto& [e, c] : coeffs) conj[{e.second, e.first}] = c;
    ActivePoint ap = find_expansion_point(sigma, hardest.second, hardest.first, cfg);
    return tune_extraction(sigma, conj, ap.theta, s, validation, cfg.base_request(), tune);
}

}  // namespace detail

namespace detail {

inline ReluCResult relu_c_at_degree(const ActivationSpec& sigma, double r, double third, int N, const Grid& test,
                                    const ConstructorConfig& cfg) {
    ReluCResult res;
    auto [a, perr] = relu_minimax_power(N, r);
    res.poly_degree = N;
    res.poly_error = perr;

    // delta: how far Psi may stray from the real axis while p moves by at most what is left of eps/3
    const double p_budget = std::max(third - res.poly_error, 0.1 * third);
    double delta = 0.25 * r;
    for (int it = 0; it < 60; ++it) {
        double worst = 0.0;
        for (int i = 0; i <= 400 && worst <= p_budget; ++i) {
            double x = -r + 2.0 * r * i / 400.0;
            cplx px = eval_power(a, x / r);
            for (int k = 0; k < 16; ++k) {
                cplx u = x + std::polar(delta, 2.0 * pi * k / 16);
                worst = std::max(worst, std::abs(eval_power(a, u / r) - px));
            }
        }
        if (worst <= p_budget) break;
        delta *= 0.7;
    }
    res.delta = delta;

    ConstructorConfig shared = cfg;
    shared.shared_nodes = true;

    TuneOptions psi_tune;
    psi_tune.angle_candidates = {4, 6, 8, 12, 16, 24, 32};
    psi_tune.extra_circles = {1, 2, 3, 4};
    psi_tune.error_budget = 0.5 * delta;
    CVec disc = make_grid(cplx{0.0}, r, cfg.validation_points_per_axis).scalars();
    const std::map<Exponent, cplx> re_coeffs{{{1, 0}, 0.5}, {{0, 1}, 0.5}};
    try {
        auto psi = realize_shared(sigma, re_coeffs, r, disc, shared, psi_tune, false);
        res.psi = psi.network;
        res.psi_error = psi.validation_error;
    } catch (const Error&) {
        res.psi_error = std::numeric_limits<double>::infinity();
    }
    if (!(res.psi_error <= psi_tune.error_budget)) {
        // z and zbar active at different points: realise them separately
        ConstructorConfig separate = cfg;
        separate.shared_nodes = false;
        res.psi = realize_polynomial(sigma, re_coeffs, r, disc, separate, nullptr, nullptr, psi_tune);
        res.psi_error = 0.0;
        for (cplx z : disc) res.psi_error = std::max(res.psi_error, std::abs(res.psi(sigma, z) - z.real()));
    }

    std::map<Exponent, cplx> pc;
    for (int n = 1; n <= N; ++n)
        if (a[n] != 0.0) pc[{n, 0}] = a[n] / std::pow(r, n);
    TuneOptions phi_tune;
    phi_tune.angle_candidates = {2 * N + 2, 2 * N + 6, 2 * N + 12, 2 * N + 20, 2 * N + 32};
    phi_tune.extra_circles = {1, 2, 3, 4, 5};
    phi_tune.error_budget = 0.5 * third;
    CVec tube = tube_points(r, delta);
    auto phi = realize_shared(sigma, pc, r + delta, tube, shared, phi_tune, true);
    res.phi = phi.network;
    res.phi.add_constant(a[0]);
    res.phi_error = phi.validation_error;

    res.network = compose(res.phi.to_network(), res.psi.to_network());
    res.test_points = test.size();
    for (const auto& z : test.points)
        res.measured_error = std::max(res.measured_error, std::abs(res.network(sigma, z) - relu_c(z[0])));
    return res;
}

}  // namespace detail

/// Depth-2 sigma-network Gamma = Phi o Psi with |Gamma - relu_c| <= eps on B_r, where Psi ~ Re z
/// and Phi ~ a polynomial approximation p of max(0, x); the error budget is split in thirds.
inline ReluCResult build_relu_c(const ActivationSpec& sigma, double r, double eps, const ConstructorConfig& cfg = {}) {
    if (!(r > 0.0) || !(eps > 0.0)) throw std::invalid_argument("build_relu_c: r and eps must be positive");
    ReluCResult res;
    const double third = eps / 3.0;
    if (composes_to_relu_c(sigma, r)) {
        const NetworkWeights pass = pass_through_network();
        res.network = compose(pass, pass);
        res.exact_composition = true;
        Grid test = make_grid(cplx{0.0}, r, cfg.test_points_per_axis);
        res.test_points = test.size();
        for (const auto& z : test.points)
            res.measured_error = std::max(res.measured_error, std::abs(res.network(sigma, z) - relu_c(z[0])));
        return res;
    }

    // p with |p - relu| <= eps/3 on [-r, r]; past the degree cap, or when high-order extraction
    // breaks down, lower degrees are tried and the best measured composite is kept
    int target_degree = 2;
    while (target_degree < std::max(2, cfg.relu_max_degree) &&
           relu_minimax_power(target_degree, r).second > 0.9 * third)
        target_degree += 2;
    Grid test = make_grid(cplx{0.0}, r, cfg.test_points_per_axis);
    std::optional<ReluCResult> best;
    std::string failure;
    for (int N = target_degree; N >= std::max(2, target_degree - 6); N -= 2) {
        try {
            ReluCResult cand = detail::relu_c_at_degree(sigma, r, third, N, test, cfg);
            if (!best || cand.measured_error < best->measured_error) best = std::move(cand);
        } catch (const Error& e) {
            if (failure.empty()) failure = e.what();
            continue;
        }
        if (best->measured_error <= eps) break;
    }
    if (!best) throw Error("build_relu_c: " + failure);
    best->budget_met = best->poly_error <= third && best->measured_error <= eps;
    return *best;
}


/// Depth-1 network approximating the identity on |z| <= radius.
inline ShallowNetwork identity_network(const ActivationSpec& sigma, double radius, double budget,
                                       const ConstructorConfig& cfg) {
    ConstructorConfig shared = cfg;
    shared.shared_nodes = true;
    TuneOptions tune;
    tune.angle_candidates = {4, 6, 8, 12, 16, 24, 32};
    tune.extra_circles = {1, 2, 3, 4, 5};
    tune.error_budget = budget;
    CVec disc = make_grid(cplx{0.0}, radius, cfg.validation_points_per_axis).scalars();
    return detail::realize_shared(sigma, {{{1, 0}, 1.0}}, radius, disc, shared, tune, true).network;
}

/// Random ridge features relu_c(w_j^T z + b_j) with least-squares (lightly regularised) output weights.
inline RidgeExpansion fit_ridge_expansion(const Target& target, const Domain& dom, int width, std::uint64_t seed,
                                          const std::vector<CVec>& fit_points, double bias_scale = 1.5,
                                          double regularization = 1e-10) {
    if (width < 1) throw std::invalid_argument("fit_ridge_expansion: width must be >= 1");
    const int d = static_cast<int>(dom.dim());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    RidgeExpansion re;
    re.dim = d;
    for (int j = 0; j < width; ++j) {
        std::vector<double> beta(2 * d);
        double nrm = 0.0;
        for (auto& v : beta) { v = nd(rng); nrm += v * v; }
        nrm = std::sqrt(nrm);
        CVec w(d);
        for (int c = 0; c < d; ++c) w[c] = cplx{beta[2 * c] / nrm, -beta[2 * c + 1] / nrm};
        cplx wc{0.0, 0.0};
        for (int c = 0; c < d; ++c) wc += w[c] * dom.center[c];
        re.w.push_back(w);
        if (bias_scale > 0.0) {
            re.b.push_back(-wc.real() + bias_scale * dom.radius * ud(rng));
        } else {
            // hyperplane through a random sample point
            std::uniform_int_distribution<std::size_t> pick(0, fit_points.size() - 1);
            const CVec& x = fit_points[pick(rng)];
            cplx wx{0.0, 0.0};
            for (int c = 0; c < d; ++c) wx += w[c] * x[c];
            re.b.push_back(-wx.real());
        }
    }
    const auto n = static_cast<Eigen::Index>(fit_points.size());
    Eigen::MatrixXd A(n, width + 1);
    Eigen::VectorXcd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, 0) = 1.0;
        for (int j = 0; j < width; ++j) A(i, j + 1) = std::max(0.0, re.pre_activation(j, fit_points[i]).real());
        y[i] = target(fit_points[i]);
    }
    Eigen::MatrixXd G = A.transpose() * A;
    const double lambda = regularization * G.trace() / static_cast<double>(G.rows());
    G.diagonal().array() += lambda;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    Eigen::VectorXd xr = ldlt.solve(A.transpose() * y.real());
    Eigen::VectorXd xi = ldlt.solve(A.transpose() * y.imag());
    re.constant = {xr[0], xi[0]};
    for (int j = 0; j < width; ++j) re.alpha.push_back({xr[j + 1], xi[j + 1]});
    return re;
}

struct DeepResult {
    NetworkWeights network;
    Certificate certificate;
    RidgeExpansion ridges;
    double ridge_error = 0.0;  ///< sup error of the real ridge stage on the test grid
    double gamma_error = 0.0;  ///< sup error of the relu_c surrogate on its domain
};

namespace detail {

inline std::vector<CVec> fit_sample(const Domain& dom, const ConstructorConfig& cfg) {
    if (dom.dim() == 1) return make_grid(dom.center, dom.radius, cfg.fit_points_per_axis).points;
    return random_grid(dom.center, dom.radius, static_cast<std::size_t>(cfg.multi_fit_points), cfg.seed + 1).points;
}

inline std::vector<CVec> test_sample(const Domain& dom, const ConstructorConfig& cfg) {
    if (dom.dim() == 1) return make_grid(dom.center, dom.radius, cfg.test_points_per_axis).points;
    return make_grid(dom.center, dom.radius, cfg.multi_test_points_per_axis).points;
}

inline RidgeExpansion ridge_stage(const Target& target, const Domain& dom, const ConstructorConfig& cfg,
                                  const std::vector<CVec>& fit) {
    if (target.ridge_form) {
        RidgeExpansion r = *target.ridge_form;
        if (r.dim != static_cast<int>(dom.dim())) throw ShapeMismatch("ridge form dimension");
        return r;
    }
    return fit_ridge_expansion(target, dom, cfg.ridges, cfg.seed, fit, cfg.ridge_bias_scale, cfg.ridge_regularization);
}

}  // namespace detail

/// Depth-L sigma-network for a target on a ball in C^d: a real ridge expansion in relu_c whose
/// ridges are replaced by lifted copies of a depth-L relu_c surrogate built from sigma.
inline DeepResult synthesize_deep(const ActivationSpec& sigma, const Target& target, const Domain& dom, int L,
                                  const ConstructorConfig& cfg = {}) {
    auto t0 = std::chrono::steady_clock::now();
    if (L < 2) throw std::invalid_argument("synthesize_deep: depth must be >= 2");
    if (dom.dim() < 1) throw std::invalid_argument("synthesize_deep: dimension must be >= 1");
    if (cfg.check_verdict) require_verdict(sigma, true);
    DeepResult res;
    const auto fit = detail::fit_sample(dom, cfg);
    const auto test = detail::test_sample(dom, cfg);
    require_disjoint(fit, test);
    res.ridges = detail::ridge_stage(target, dom, cfg, fit);
    for (const auto& z : test) res.ridge_error = std::max(res.ridge_error, std::abs(res.ridges(z) - target(z)));
    const double reach = std::max(res.ridges.input_reach(dom.center, dom.radius), 1e-3);

    NetworkWeights gamma;
    std::vector<std::string> notes;
    if (sigma.has_annotation(annotation::deep_by_composition) || composes_to_relu_c(sigma, reach)) {
        const NetworkWeights pass = pass_through_network();
        gamma = compose(pass, pass);
        for (int k = 2; k < L; ++k) gamma = compose(pass, gamma);
        notes.emplace_back("relu_c realised exactly as sigma o sigma");
    } else {
        // whatever the ridge stage leaves of eps is shared by the sum_j |alpha_j| copies of Gamma
        const double scale = std::max(1.0, res.ridges.alpha_l1());
        const double geps = std::max(cfg.min_gamma_eps, std::max(cfg.eps - res.ridge_error, 0.25 * cfg.eps) / scale);
        auto rc = build_relu_c(sigma, reach, geps, cfg);
        res.gamma_error = rc.measured_error;
        gamma = rc.network;
        if (!rc.budget_met)
            notes.push_back("relu_c surrogate stopped at degree " + std::to_string(rc.poly_degree) +
                            " short of its budget " + std::to_string(geps));
        if (L > 2) {
            const NetworkWeights id = identity_network(sigma, reach + 2.0 * geps, 1e-3 * geps, cfg).to_network();
            for (int k = 2; k < L; ++k) gamma = compose(id, gamma);
        }
    }

    std::vector<NetworkWeights> lifted;
    lifted.reserve(res.ridges.size());
    for (std::size_t j = 0; j < res.ridges.size(); ++j) lifted.push_back(lift_affine(gamma, res.ridges.w[j], res.ridges.b[j]));
    if (lifted.empty()) {
        CVec zero(dom.dim(), 0.0);
        lifted.push_back(lift_affine(gamma, zero, 0.0));
        res.ridges.alpha.clear();
    }
    std::vector<const NetworkWeights*> ptrs;
    for (const auto& n : lifted) ptrs.push_back(&n);
    CVec coeffs = res.ridges.alpha;
    if (coeffs.empty()) coeffs.push_back(0.0);
    res.network = add_constant(linear_combine_many(ptrs, coeffs), res.ridges.constant);

    Certificate& cert = res.certificate;
    cert.target_name = target.name;
    cert.activation_name = sigma.name;
    cert.domain = dom;
    cert.depth = res.network.depth();
    cert.neurons = res.network.total_neurons();
    cert.seed = cfg.seed;
    cert.failures = notes;
    cert.config_echo = cfg.echo();
    cert.config_echo["mode"] = "deep";
    cert.config_echo["layers"] = L;
    cert.config_echo["ridge_count"] = res.ridges.size();
    cert.config_echo["gamma_error"] = res.gamma_error;
    cert.config_echo["ridge_error"] = res.ridge_error;
    measure_errors(cert, test, [&](const CVec& z) { return res.network(sigma, z); },
                   [&](const CVec& z) { return target(z); });
    cert.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

struct LiftResult {
    ShallowNetwork network{1};
    Certificate certificate;
    RidgeExpansion ridges;
    ShallowNetwork phi{1};
    double ridge_error = 0.0;
    double phi_error = 0.0;
};

/// Shallow network on a ball in C^d: each relu_c ridge of a real ridge expansion is replaced by a
/// one-variable shallow approximant phi of relu_c built from sigma.
inline LiftResult lift_dimension(const ActivationSpec& sigma, const Target& target, const Domain& dom,
                                 const ConstructorConfig& cfg = {}) {
    auto t0 = std::chrono::steady_clock::now();
    if (cfg.check_verdict) require_verdict(sigma, false);
    const int d = static_cast<int>(dom.dim());
    LiftResult res;
    res.network = ShallowNetwork(d);
    const auto fit = detail::fit_sample(dom, cfg);
    const auto test = detail::test_sample(dom, cfg);
    require_disjoint(fit, test);
    res.ridges = detail::ridge_stage(target, dom, cfg, fit);
    const double C = std::max(res.ridges.input_reach(dom.center, dom.radius), 1e-3);

    ConstructorConfig inner = cfg;
    inner.shared_nodes = true;
    inner.degree = cfg.lift_degree;
    Grid phi_fit = make_grid(cplx{0.0}, C, cfg.fit_points_per_axis);
    PolyFit pf = fit_poly_coeffs([](cplx u) { return relu_c(u); }, phi_fit.scalars(), inner.degree, C);
    std::map<Exponent, cplx> coeffs;
    for (const auto& [e, c] : pf.normalized)
        if (std::abs(c) > cfg.coefficient_cutoff) coeffs[e] = pf.coeffs.at(e);
    CVec validation = make_grid(cplx{0.0}, C, cfg.validation_points_per_axis).scalars();
    res.phi = realize_polynomial(sigma, coeffs, C, validation, inner, nullptr, nullptr);
    for (cplx u : make_grid(cplx{0.0}, C, 33).scalars())
        res.phi_error = std::max(res.phi_error, std::abs(res.phi(sigma, u) - relu_c(u)));

    cplx constant = res.ridges.constant;
    for (std::size_t j = 0; j < res.ridges.size(); ++j) {
        const cplx alpha = res.ridges.alpha[j];
        constant += alpha * res.phi.constant();
        for (std::size_t k = 0; k < res.phi.size(); ++k) {
            CVec w(d);
            for (int c = 0; c < d; ++c) w[c] = res.phi.weight(k) * res.ridges.w[j][c];
            res.network.add_term(alpha * res.phi.coeff(k), w, res.phi.weight(k) * res.ridges.b[j] + res.phi.bias(k));
        }
    }
    res.network.set_constant(constant);

    Certificate& cert = res.certificate;
    cert.target_name = target.name;
    cert.activation_name = sigma.name;
    cert.domain = dom;
    cert.depth = 1;
    cert.neurons = static_cast<long>(res.network.size());
    cert.seed = cfg.seed;
    cert.config_echo = cfg.echo();
    cert.config_echo["mode"] = "lift";
    cert.config_echo["ridge_count"] = res.ridges.size();
    cert.config_echo["phi_error"] = res.phi_error;
    double ridge_err = 0.0;
    for (const auto& z : test) ridge_err = std::max(ridge_err, std::abs(res.ridges(z) - target(z)));
    res.ridge_error = ridge_err;
    cert.config_echo["ridge_error"] = ridge_err;
    measure_errors(cert, test, [&](const CVec& z) { return res.network(sigma, z); },
                   [&](const CVec& z) { return target(z); });
    cert.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace cvnn
