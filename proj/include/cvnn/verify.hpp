#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/SVD>
#include <json.hpp>

#include "cvnn/certificate.hpp"
#include "cvnn/classifier.hpp"
#include "cvnn/network.hpp"
#include "cvnn/targets.hpp"
#include "cvnn/wirtinger.hpp"

namespace cvnn {

struct InvariantKind {
    enum class Type { dbar_vanishes, d_vanishes, laplacian_power_vanishes } type = Type::dbar_vanishes;
    int m = 1;  ///< power of the Laplacian

    std::string to_string() const {
        switch (type) {
            case Type::dbar_vanishes: return "dbar_vanishes";
            case Type::d_vanishes: return "d_vanishes";
            default: return "laplacian_power_vanishes(" + std::to_string(m) + ")";
        }
    }

    /// Accepts dbar_vanishes, d_vanishes, laplacian_power_vanishes(m) and the short forms dbar, d, laplacian:m.
    static InvariantKind parse(const std::string& s) {
        InvariantKind k;
        if (s == "dbar_vanishes" || s == "dbar") return k;
        if (s == "d_vanishes" || s == "d") {
            k.type = Type::d_vanishes;
            return k;
        }
        std::string arg;
        if (s.rfind("laplacian_power_vanishes(", 0) == 0 && s.back() == ')') arg = s.substr(25, s.size() - 26);
        else if (s.rfind("laplacian:", 0) == 0) arg = s.substr(10);
        else throw std::invalid_argument("unknown invariant kind '" + s +
                                         "'; expected dbar_vanishes, d_vanishes or laplacian_power_vanishes(m)");
        k.type = Type::laplacian_power_vanishes;
        try {
            std::size_t used = 0;
            k.m = std::stoi(arg, &used);
            if (used != arg.size() || k.m < 0) throw std::invalid_argument(arg);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad Laplacian power in '" + s + "'");
        }
        return k;
    }

    static InvariantKind laplacian(int m) { return {Type::laplacian_power_vanishes, m}; }
};

struct InvariantOptions {
    int trials = 20;
    int width = 3;              ///< hidden width of each random network
    double weight_radius = 2.0;  ///< weights and biases uniform in this disc
    std::uint64_t seed = 0;
    double step = 0.0;           ///< 0: automatic
    int accuracy = 4;
};

struct InvariantReport {
    InvariantKind kind;
    double max_residual = 0.0;
    Grid grid;
    int depth = 1;
    int networks_tested = 0;
    std::size_t skipped = 0;  ///< stencil evaluations that met a singular or non-smooth point
    std::uint64_t seed = 0;

    nlohmann::json to_json() const {
        nlohmann::json c = nlohmann::json::array();
        for (cplx z : grid.center) c.push_back({z.real(), z.imag()});
        return {{"invariant_kind", kind.to_string()},
                {"max_residual", max_residual},
                {"grid", {{"center", c}, {"radius", grid.radius}, {"points_per_axis", grid.points_per_axis},
                          {"size", grid.size()}}},
                {"depth", depth},
                {"networks_tested", networks_tested},
                {"skipped", skipped},
                {"seed", seed},
                {"version", version_string}};
    }
};

namespace detail {

inline Layer dense_layer(const Eigen::MatrixXcd& A, const VecC& b) {
    std::vector<Eigen::Triplet<cplx>> t;
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            if (A(i, j) != cplx{0.0, 0.0}) t.emplace_back(i, j, A(i, j));
    SparseMat S(A.rows(), A.cols());
    S.setFromTriplets(t.begin(), t.end());
    return {S, b};
}

/// Bound on hidden pre-activations that keeps sigma away from its singular set.
inline double preactivation_cap(const ActivationSpec& sigma) {
    if (sigma.singularities.empty()) return 2.0;
    return std::min(2.0, 0.75 * sigma.singularities.distance(0.0));
}

/// Random scalar-input network; each hidden layer is rescaled so that its pre-activations stay within
/// `cap` on the sample points `pts`.
template <class Rng>
NetworkWeights random_network(const ActivationSpec& sigma, int depth, int width, double radius, const CVec& pts,
                              double cap, Rng& rng) {
    std::vector<Layer> layers;
    std::vector<VecC> acts(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) acts[i] = VecC::Constant(1, pts[i]);
    int in = 1;
    for (int l = 0; l <= depth; ++l) {
        const int out = l == depth ? 1 : width;
        Eigen::MatrixXcd A(out, in);
        VecC b(out);
        for (int i = 0; i < out; ++i) {
            for (int j = 0; j < in; ++j) A(i, j) = uniform_disc(rng, radius);
            b[i] = uniform_disc(rng, radius);
        }
        if (l < depth) {
            double peak = 0.0;
            for (const auto& a : acts) peak = std::max(peak, (A * a + b).cwiseAbs().maxCoeff());
            if (peak > cap) {
                A *= cap / peak;
                b *= cap / peak;
            }
            for (auto& a : acts) {
                VecC u = A * a + b;
                for (Eigen::Index k = 0; k < u.size(); ++k) u[k] = sigma(u[k]);
                a = u;
            }
        }
        layers.push_back(dense_layer(A, b));
        in = out;
    }
    return NetworkWeights(std::move(layers));
}

}  // namespace detail

/// Draws random networks of the given depth and reports the largest differential residual on `grid`,
/// relative to max(1, max |Phi|) for each network.
inline InvariantReport check_network_invariant(const ActivationSpec& sigma, int depth, const InvariantKind& kind,
                                               const Grid& grid, const InvariantOptions& opt = {}) {
    if (depth < 1) throw std::invalid_argument("check_network_invariant: depth must be >= 1");
    if (grid.dim() != 1) throw ShapeMismatch("check_network_invariant: scalar-input grid expected");
    InvariantReport rep;
    rep.kind = kind;
    rep.grid = grid;
    rep.depth = depth;
    rep.seed = opt.seed;
    const CVec pts = grid.scalars();

    int m = 0, ell = 0;
    double scale = 1.0;
    switch (kind.type) {
        case InvariantKind::Type::dbar_vanishes: ell = 1; break;
        case InvariantKind::Type::d_vanishes: m = 1; break;
        default:
            m = ell = kind.m;
            scale = std::pow(4.0, kind.m);
    }
    // Laplacian powers are tested on polynomial classes, where a wide step costs no truncation error.
    auto step_at = [&](cplx z) {
        if (opt.step > 0.0) return opt.step;
        if (m + ell <= 2) return default_step(z, m + ell, opt.accuracy);
        return 0.1 * std::max(m, ell);
    };

    std::mt19937_64 rng(opt.seed);
    const double cap = detail::preactivation_cap(sigma);
    for (int t = 0; t < opt.trials; ++t) {
        NetworkWeights net = detail::random_network(sigma, depth, opt.width, opt.weight_radius, pts, cap, rng);
        auto f = [&](cplx z) { return net(sigma, z); };
        double peak = 1.0;
        for (cplx z : pts) {
            try {
                peak = std::max(peak, std::abs(f(z)));
            } catch (const ActivationSingularity&) {
            }
        }
        const auto& first = net.layers().front();
        for (cplx z : pts) {
            const double h = step_at(z);
            Stencil st = cartesian_stencil(m, ell, h, opt.accuracy);
            if (depth == 1 && !sigma.nonsmooth.empty()) {
                // the stencil must not straddle a kink or jump of any neuron
                bool clear = true;
                for (Eigen::Index k = 0; k < first.A.rows() && clear; ++k) {
                    cplx w = first.A.coeff(k, 0);
                    clear = sigma.nonsmooth.distance(w * z + first.b[k]) > 1.01 * std::abs(w) * st.reach();
                }
                if (!clear) {
                    ++rep.skipped;
                    continue;
                }
            }
            try {
                rep.max_residual = std::max(rep.max_residual, scale * std::abs(st.apply(f, z)) / peak);
            } catch (const StencilSingularity&) {
                ++rep.skipped;
            }
        }
        ++rep.networks_tested;
    }
    return rep;
}

struct FloorRow {
    int width = 0;
    double sup_error = 0.0;
    double l1_error = 0.0;
    int rank = 0;
    ShallowNetwork network{1};
};

struct FloorTable {
    std::vector<FloorRow> rows;
    std::string activation_name;
    std::string target_name;
    std::string fit_method;
    std::uint64_t seed = 0;
    Domain domain;
    std::size_t fit_points = 0;
    std::size_t test_points = 0;

    nlohmann::json to_json() const {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& row : rows)
            r.push_back({{"width", row.width}, {"sup_error", row.sup_error}, {"l1_error", row.l1_error}, {"rank", row.rank}});
        nlohmann::json c = nlohmann::json::array();
        for (cplx z : domain.center) c.push_back({z.real(), z.imag()});
        return {{"activation_name", activation_name},
                {"target_name", target_name},
                {"fit_method", fit_method},
                {"seed", seed},
                {"domain", {{"center", c}, {"radius", domain.radius}}},
                {"fit_points", fit_points},
                {"test_points", test_points},
                {"rows", r},
                {"version", version_string}};
    }

    std::string to_csv() const {
        std::ostringstream os;
        os.precision(17);
        os << "width,sup_error,l1_error\n";
        for (const auto& row : rows) os << row.width << ',' << row.sup_error << ',' << row.l1_error << '\n';
        return os.str();
    }

    const FloorRow& best() const {
        if (rows.empty()) throw std::logic_error("empty floor table");
        const FloorRow* b = &rows.front();
        for (const auto& r : rows)
            if (r.sup_error < b->sup_error) b = &r;
        return *b;
    }
};

struct FloorOptions {
    int fit_points_per_axis = 40;
    int test_points_per_axis = 65;
    double weight_radius = 2.0;
    int max_retries = 100;  ///< redraws per neuron before giving up
    double singular_margin = 0.25;  ///< features keep the image of the domain this far from singularities
    double rcond = 1e-12;
};

/// Random-feature least squares: for each width the inner weights are drawn (the same stream for every
/// width, so wider feature sets extend narrower ones) and only the outer coefficients are fitted.
inline FloorTable error_floor_experiment(const ActivationSpec& sigma, const Target& target, const std::vector<int>& widths,
                                         cplx center, double radius, std::uint64_t seed,
                                         const FloorOptions& opt = {}) {
    if (widths.empty()) throw std::invalid_argument("error_floor_experiment: widths must be nonempty");
    for (std::size_t i = 0; i < widths.size(); ++i)
        if (widths[i] < 1 || (i > 0 && widths[i] <= widths[i - 1]))
            throw std::invalid_argument("error_floor_experiment: widths must be positive and strictly increasing");
    FloorTable table;
    table.activation_name = sigma.name;
    table.target_name = target.name;
    table.fit_method = "random features (weights uniform in the radius-" + std::to_string(opt.weight_radius).substr(0, 3) +
                       " disc), least squares by SVD";
    table.seed = seed;
    table.domain = {{center}, radius};
    const CVec fit = make_grid(center, radius, opt.fit_points_per_axis).scalars();
    const CVec test = make_grid(center, radius, opt.test_points_per_axis).scalars();
    {
        std::vector<CVec> a, b;
        for (cplx z : fit) a.push_back({z});
        for (cplx z : test) b.push_back({z});
        require_disjoint(a, b);
    }
    table.fit_points = fit.size();
    table.test_points = test.size();

    // one stream of admissible features, long enough for the widest row
    std::mt19937_64 rng(seed);
    CVec w, b;
    auto admissible = [&](cplx wj, cplx bj) {
        if (!sigma.singularities.empty() &&
            sigma.singularities.distance(wj * center + bj) - std::abs(wj) * radius < opt.singular_margin)
            return false;
        for (const CVec* set : {&fit, &test})
            for (cplx z : *set) {
                try {
                    if (!is_finite(sigma(wj * z + bj))) return false;
                } catch (const ActivationSingularity&) {
                    return false;
                }
            }
        return true;
    };
    while (static_cast<int>(w.size()) < widths.back()) {
        int tries = 0;
        cplx wj, bj;
        do {
            if (++tries > opt.max_retries) throw Error("error_floor_experiment: no admissible weights after retries");
            wj = uniform_disc(rng, opt.weight_radius);
            bj = uniform_disc(rng, opt.weight_radius);
        } while (!admissible(wj, bj));
        w.push_back(wj);
        b.push_back(bj);
    }

    Eigen::VectorXcd y(fit.size());
    for (std::size_t i = 0; i < fit.size(); ++i) y[i] = target(fit[i]);
    for (int width : widths) {
        Eigen::MatrixXcd A(fit.size(), width + 1);
        for (std::size_t i = 0; i < fit.size(); ++i) {
            A(i, 0) = 1.0;
            for (int j = 0; j < width; ++j) A(i, j + 1) = sigma(w[j] * fit[i] + b[j]);
        }
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(opt.rcond);
        Eigen::VectorXcd c = svd.solve(y);
        FloorRow row;
        row.width = width;
        row.rank = static_cast<int>(svd.rank());
        row.network.set_constant(c[0]);
        for (int j = 0; j < width; ++j) row.network.add_term(c[j + 1], w[j], b[j]);
        double sum = 0.0;
        for (cplx z : test) {
            double e = std::abs(row.network(sigma, z) - target(z));
            row.sup_error = std::max(row.sup_error, e);
            sum += e;
        }
        row.l1_error = sum / static_cast<double>(test.size()) * table.domain.volume();
        table.rows.push_back(std::move(row));
    }
    return table;
}

/// max |dbar Phi| over the test grid for the best row of a floor table, relative to the size of the
/// holomorphic part: max over the grid of sum_j |a_j| |w_j| |sigma'(w_j z + b_j)|.
inline double holomorphy_of_best_fit(const ActivationSpec& sigma, const FloorTable& table,
                                     const FloorOptions& opt = {}) {
    if (!detect_holomorphy(sigma).holomorphic())
        throw std::invalid_argument("holomorphy_of_best_fit: '" + sigma.name + "' is not holomorphic");
    const FloorRow& best = table.best();
    const ShallowNetwork& net = best.network;
    const CVec test = make_grid(table.domain.center.front(), table.domain.radius, opt.test_points_per_axis).scalars();
    double dbar = 0.0, scale = 0.0;
    for (cplx z : test) {
        dbar = std::max(dbar, std::abs(wirtinger_derivative([&](cplx u) { return net(sigma, u); }, z, 0, 1)));
        double s = 0.0;
        for (std::size_t j = 0; j < net.size(); ++j) {
            cplx u = net.weight(j) * z + net.bias(j);
            s += std::abs(net.coeff(j)) * std::abs(net.weight(j)) * std::abs(wirtinger_derivative(sigma, u, 1, 0));
        }
        scale = std::max(scale, s);
    }
    return dbar / std::max(scale, std::numeric_limits<double>::min());
}

inline double holomorphy_of_best_fit(const ActivationSpec& sigma, const Target& target, const std::vector<int>& widths,
                                     cplx center, double radius, std::uint64_t seed, const FloorOptions& opt = {}) {
    if (!detect_holomorphy(sigma).holomorphic())
        throw std::invalid_argument("holomorphy_of_best_fit: '" + sigma.name + "' is not holomorphic");
    return holomorphy_of_best_fit(sigma, error_floor_experiment(sigma, target, widths, center, radius, seed, opt), opt);
}

}  // namespace cvnn
