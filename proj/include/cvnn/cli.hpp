#pragma once

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cvnn/classifier.hpp"
#include "cvnn/config.hpp"
#include "cvnn/deep.hpp"
#include "cvnn/network_io.hpp"
#include "cvnn/synthesis.hpp"
#include "cvnn/verify.hpp"

namespace cvnn {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int verdict_failure = 1;
inline constexpr int usage = 2;
}  // namespace exit_code

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace cli_detail {

inline void emit(const RunConfig& rc, const std::string& text, std::ostream& out) {
    if (rc.out.empty() || rc.out == "-") {
        out << text;
        return;
    }
    std::ofstream f(rc.out, std::ios::binary);
    if (!f) throw UsageError("cannot open output file '" + rc.out + "'");
    f << text;
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline void require_format(const RunConfig& rc) {
    if (rc.format != "json" && rc.format != "csv") throw UsageError("--format must be json or csv");
}

inline std::string flatten_csv(const nlohmann::json& j) {
    std::ostringstream os;
    os << "field,value\n";
    std::function<void(const std::string&, const nlohmann::json&)> walk = [&](const std::string& key,
                                                                             const nlohmann::json& v) {
        if (v.is_object()) {
            for (auto it = v.begin(); it != v.end(); ++it) walk(key.empty() ? it.key() : key + "." + it.key(), it.value());
        } else if (v.is_string()) {
            os << key << ',' << '"' << v.get<std::string>() << '"' << '\n';
        } else {
            os << key << ',' << (v.is_array() ? '"' + v.dump() + '"' : v.dump()) << '\n';
        }
    };
    walk("", j);
    return os.str();
}

inline std::string grid_csv(const std::vector<CVec>& pts, const std::function<cplx(const CVec&)>& approx,
                            const std::function<cplx(const CVec&)>& target) {
    std::ostringstream os;
    os.precision(17);
    const std::size_t d = pts.empty() ? 1 : pts.front().size();
    for (std::size_t c = 0; c < d; ++c) os << "z" << c + 1 << "_re,z" << c + 1 << "_im,";
    os << "target_re,target_im,approx_re,approx_im,abs_error\n";
    for (const auto& z : pts) {
        for (cplx v : z) os << v.real() << ',' << v.imag() << ',';
        cplx t = target(z), a = approx(z);
        os << t.real() << ',' << t.imag() << ',' << a.real() << ',' << a.imag() << ',' << std::abs(a - t) << '\n';
    }
    return os.str();
}

inline int run_classify(const RunConfig& rc, std::ostream& out) {
    const ActivationSpec& sigma = find_activation(rc.activation);
    ClassifierConfig cfg;
    if (rc.tol) cfg.tol = *rc.tol;
    ClassificationReport rep = classify(sigma, cfg);
    nlohmann::json j = rep.to_json();
    j["config_echo"]["run"] = rc.echo();
    emit(rc, rc.format == "csv" ? flatten_csv(j) : dump(j), out);
    return exit_code::ok;
}

inline int run_approximate(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    const ActivationSpec& sigma = find_activation(rc.activation);
    if (rc.dims < 1) throw UsageError("--dims must be >= 1");
    if (!(rc.radius > 0.0)) throw UsageError("--radius must be positive");
    if (!(rc.eps > 0.0)) throw UsageError("--eps must be positive");
    if (rc.degree < 0) throw UsageError("--degree must be >= 0");
    const Target target = find_target(rc.target, rc.dims);
    ConstructorConfig cfg;
    cfg.degree = rc.degree;
    cfg.seed = rc.seed;
    cfg.eps = rc.eps;
    Domain dom{CVec(rc.dims, 0.0), rc.radius};

    Certificate cert;
    std::function<cplx(const CVec&)> approx;
    std::optional<NetworkWeights> weights;
    std::vector<CVec> test;
    if (rc.deep) {
        const int L = rc.layers == 0 ? 2 : rc.layers;
        if (L < 2) throw UsageError("--layers must be >= 2 with --deep");
        auto res = std::make_shared<DeepResult>(synthesize_deep(sigma, target, dom, L, cfg));
        cert = res->certificate;
        approx = [res, &sigma](const CVec& z) { return res->network(sigma, z); };
        weights = res->network;
        test = detail::test_sample(dom, cfg);
    } else if (rc.dims == 1) {
        if (rc.layers > 1) throw UsageError("--layers > 1 requires --deep");
        auto res = std::make_shared<ShallowResult>(synthesize_shallow(sigma, target, 0.0, rc.radius, cfg));
        cert = res->certificate;
        approx = [res, &sigma](const CVec& z) { return res->network(sigma, z[0]); };
        weights = res->network.to_network();
        test = make_grid(cplx{0.0}, rc.radius, cfg.test_points_per_axis).points;
    } else {
        if (rc.layers > 1) throw UsageError("--layers > 1 requires --deep");
        auto res = std::make_shared<LiftResult>(lift_dimension(sigma, target, dom, cfg));
        cert = res->certificate;
        approx = [res, &sigma](const CVec& z) { return res->network(sigma, z); };
        weights = res->network.to_network();
        test = detail::test_sample(dom, cfg);
    }
    cert.config_echo["run"] = rc.echo();
    if (!rc.network_out.empty()) save_network(*weights, rc.network_out);
    if (rc.format == "csv") emit(rc, grid_csv(test, approx, [&](const CVec& z) { return target(z); }), out);
    else emit(rc, dump(cert.to_json(rc.timing)), out);
    if (cert.sup_error > rc.eps) {
        err << "sup_error " << cert.sup_error << " exceeds eps " << rc.eps << "\n";
        return exit_code::verdict_failure;
    }
    return exit_code::ok;
}

inline int run_invariants(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    const ActivationSpec& sigma = find_activation(rc.activation);
    const InvariantKind kind = InvariantKind::parse(rc.kind);
    const int depth = rc.layers == 0 ? 1 : rc.layers;
    if (depth < 1) throw UsageError("--layers must be >= 1");
    if (!(rc.radius > 0.0)) throw UsageError("--radius must be positive");
    if (rc.trials < 1) throw UsageError("--trials must be >= 1");
    InvariantOptions opt;
    opt.seed = rc.seed;
    opt.trials = rc.trials;
    const double tol = rc.tol ? *rc.tol : (kind.type == InvariantKind::Type::laplacian_power_vanishes ? 1e-4 : 1e-5);
    InvariantReport rep = check_network_invariant(sigma, depth, kind, make_grid(cplx{0.0}, rc.radius, 9), opt);
    nlohmann::json j = rep.to_json();
    j["activation_name"] = sigma.name;
    j["tolerance"] = tol;
    j["holds"] = rep.max_residual <= tol;
    j["config_echo"] = rc.echo();
    emit(rc, rc.format == "csv" ? flatten_csv(j) : dump(j), out);
    if (rep.max_residual > tol) {
        err << "residual " << rep.max_residual << " exceeds " << tol << "\n";
        return exit_code::verdict_failure;
    }
    return exit_code::ok;
}

inline int run_floor(const RunConfig& rc, std::ostream& out) {
    const ActivationSpec& sigma = find_activation(rc.activation);
    const Target target = find_target(rc.target, 1);
    if (!(rc.radius > 0.0)) throw UsageError("--radius must be positive");
    const std::vector<int> widths = rc.width_list();
    FloorTable table = error_floor_experiment(sigma, target, widths, 0.0, rc.radius, rc.seed);
    if (rc.format == "csv") {
        emit(rc, table.to_csv(), out);
        return exit_code::ok;
    }
    nlohmann::json j = table.to_json();
    if (detect_holomorphy(sigma).holomorphic()) j["holomorphy_of_best_fit"] = holomorphy_of_best_fit(sigma, table);
    j["config_echo"] = rc.echo();
    emit(rc, dump(j), out);
    return exit_code::ok;
}

}  // namespace cli_detail

/// Parses argv and runs one subcommand; reports go to `out` (or --out), diagnostics to `err`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    RunConfig rc;
    CLI::App app{"Complex-valued network universality toolkit", "cvnn"};
    app.set_version_flag("--version", std::string(version_string));
    app.set_config("--config", "", "flat key = value file; command-line flags take precedence");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    app.add_option("--activation", rc.activation, "activation name from the catalog");
    app.add_option("--target", rc.target, "target function name");
    app.add_option("--degree", rc.degree, "polynomial degree per variable (shallow synthesis)");
    app.add_flag("--deep", rc.deep, "deep synthesis through the relu_c construction");
    app.add_option("--layers", rc.layers, "hidden layers (deep synthesis, random networks)");
    app.add_option("--dims", rc.dims, "input dimension d");
    app.add_option("--radius", rc.radius, "radius of the domain ball");
    app.add_option("--eps", rc.eps, "target accuracy");
    app.add_option("--widths", rc.widths, "comma-separated widths for the floor experiment");
    CLI::Option* seed_opt = app.add_option("--seed", rc.seed, "seed (falls back to CVNN_SEED)");
    app.add_option("--format", rc.format, "json or csv");
    app.add_option("--kind", rc.kind, "dbar_vanishes, d_vanishes or laplacian_power_vanishes(m)");
    app.add_option("--tol", rc.tol, "tolerance (classifier or invariant residual)");
    app.add_option("--trials", rc.trials, "random networks per invariant check");
    app.add_flag("--timing", rc.timing, "include wall time in certificates");
    app.add_option("--out", rc.out, "output file (default: standard output)");
    app.add_option("--network-out", rc.network_out, "write synthesized weights as JSON");

    const std::pair<const char*, const char*> subcommands[] = {
        {"classify", "universality verdicts for an activation"},
        {"approximate", "synthesize a network for a target and certify it"},
        {"invariants", "differential invariants of random networks"},
        {"floor", "random-feature least-squares error table"}};
    for (const auto& [name, about] : subcommands) {
        CLI::App* sub = app.add_subcommand(name, about);
        sub->fallthrough();
        sub->callback([&rc, cmd = std::string(name)] { rc.command = cmd; });
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_code::ok;
    } catch (const CLI::CallForVersion&) {
        out << version_string << "\n";
        return exit_code::ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return exit_code::usage;
    }

    try {
        if (seed_opt->count() == 0) {
            if (const char* env = std::getenv("CVNN_SEED"); env && *env) {
                std::size_t used = 0;
                unsigned long long v = 0;
                try {
                    v = std::stoull(env, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != std::string(env).size()) throw UsageError(std::string("bad CVNN_SEED '") + env + "'");
                rc.seed = v;
            }
        }
        cli_detail::require_format(rc);
        if (rc.activation.empty()) throw UsageError("--activation is required");
        if (rc.command == "classify") return cli_detail::run_classify(rc, out);
        if (rc.command == "approximate") return cli_detail::run_approximate(rc, out, err);
        if (rc.command == "invariants") return cli_detail::run_invariants(rc, out, err);
        return cli_detail::run_floor(rc, out);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::usage;
    } catch (const SynthesisRefused& e) {
        err << "refused: " << e.what() << "\n";
        return exit_code::verdict_failure;
    } catch (const std::exception& e) {
        err << "failed: " << e.what() << "\n";
        return exit_code::verdict_failure;
    }
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, out, err);
}

}  // namespace cvnn
