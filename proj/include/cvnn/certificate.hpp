#pragma once

#include <cstring>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvnn/core.hpp"
#include "cvnn/version.hpp"

namespace cvnn {

struct Domain {
    CVec center{0.0};
    double radius = 1.0;
    std::size_t dim() const { return center.size(); }

    /// Lebesgue measure of the ball in R^{2d}.
    double volume() const {
        const double d = static_cast<double>(dim());
        return std::pow(pi, d) * std::pow(radius, 2.0 * d) / std::tgamma(d + 1.0);
    }
};

struct Certificate {
    std::string target_name;
    std::string activation_name;
    Domain domain;
    std::size_t test_grid_size = 0;
    double sup_error = 0.0;
    double l1_error = 0.0;
    int depth = 1;
    long neurons = 0;
    std::uint64_t seed = 0;
    double wall_time = 0.0;
    std::vector<std::string> failures;
    nlohmann::json config_echo = nlohmann::json::object();

    /// Wall time is left out unless requested so that identical runs give identical documents.
    nlohmann::json to_json(bool include_timing = false) const {
        nlohmann::json j;
        j["target_name"] = target_name;
        j["activation_name"] = activation_name;
        nlohmann::json c = nlohmann::json::array();
        for (cplx z : domain.center) c.push_back({z.real(), z.imag()});
        j["domain"] = {{"center", c}, {"radius", domain.radius}, {"d", domain.dim()}};
        j["test_grid_size"] = test_grid_size;
        j["sup_error"] = sup_error;
        j["l1_error"] = l1_error;
        j["network_size"] = {{"depth", depth}, {"neurons", neurons}};
        j["seed"] = seed;
        j["failures"] = failures;
        j["config_echo"] = config_echo;
        j["version"] = version_string;
        if (include_timing) j["wall_time"] = wall_time;
        return j;
    }
};

/// Throws when two grids share a point; fitting and testing must use disjoint samples.
inline void require_disjoint(const std::vector<CVec>& a, const std::vector<CVec>& b) {
    auto key = [](const CVec& p) {
        std::vector<std::uint64_t> k(2 * p.size());
        for (std::size_t c = 0; c < p.size(); ++c) {
            double re = p[c].real() == 0.0 ? 0.0 : p[c].real();
            double im = p[c].imag() == 0.0 ? 0.0 : p[c].imag();
            std::memcpy(&k[2 * c], &re, 8);
            std::memcpy(&k[2 * c + 1], &im, 8);
        }
        return k;
    };
    std::set<std::vector<std::uint64_t>> seen;
    for (const auto& p : a) seen.insert(key(p));
    for (const auto& p : b)
        if (seen.count(key(p))) throw std::invalid_argument("fit and test grids overlap");
}

/// Fills sup and L1 errors of `approx` against `target` on `test`.
inline void measure_errors(Certificate& cert, const std::vector<CVec>& test,
                           const std::function<cplx(const CVec&)>& approx,
                           const std::function<cplx(const CVec&)>& target) {
    double sup = 0.0, sum = 0.0;
    for (const auto& z : test) {
        double e = std::abs(approx(z) - target(z));
        if (!std::isfinite(e)) e = std::numeric_limits<double>::infinity();
        sup = std::max(sup, e);
        sum += e;
    }
    cert.test_grid_size = test.size();
    cert.sup_error = sup;
    cert.l1_error = test.empty() ? 0.0 : sum / static_cast<double>(test.size()) * cert.domain.volume();
}

}  // namespace cvnn
