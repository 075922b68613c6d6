#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "cvnn/network.hpp"

namespace cvnn {

using json = nlohmann::json;

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("complex number must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

/// Serialises weights. Layers are written densely (row-major) unless they are large and sparse,
/// in which case "entries" lists [row, col, re, im].
inline json network_to_json(const NetworkWeights& theta) {
    json j;
    j["format"] = "cvnn-network";
    j["version"] = 1;
    j["d"] = theta.input_dim();
    j["L"] = theta.depth();
    json layers = json::array();
    for (const auto& l : theta.layers()) {
        json jl;
        jl["rows"] = l.A.rows();
        jl["cols"] = l.A.cols();
        const double size = static_cast<double>(l.A.rows()) * static_cast<double>(l.A.cols());
        if (size > 4096 && l.A.nonZeros() < size / 4) {
            json entries = json::array();
            for (Eigen::Index r = 0; r < l.A.outerSize(); ++r)
                for (SparseMat::InnerIterator it(l.A, r); it; ++it)
                    entries.push_back(json::array({it.row(), it.col(), it.value().real(), it.value().imag()}));
            jl["entries"] = std::move(entries);
        } else {
            Eigen::MatrixXcd D(l.A);
            json a = json::array();
            for (Eigen::Index r = 0; r < D.rows(); ++r)
                for (Eigen::Index c = 0; c < D.cols(); ++c) a.push_back(complex_to_json(D(r, c)));
            jl["A"] = std::move(a);
        }
        json b = json::array();
        for (Eigen::Index r = 0; r < l.b.size(); ++r) b.push_back(complex_to_json(l.b[r]));
        jl["b"] = std::move(b);
        layers.push_back(std::move(jl));
    }
    j["layers"] = std::move(layers);
    return j;
}

inline NetworkWeights network_from_json(const json& j) {
    if (j.value("format", std::string{}) != "cvnn-network") throw std::invalid_argument("not a cvnn-network document");
    std::vector<Layer> layers;
    for (const auto& jl : j.at("layers")) {
        const auto rows = jl.at("rows").get<Eigen::Index>();
        const auto cols = jl.at("cols").get<Eigen::Index>();
        std::vector<Eigen::Triplet<cplx>> t;
        if (jl.contains("entries")) {
            for (const auto& e : jl["entries"])
                t.emplace_back(e.at(0).get<Eigen::Index>(), e.at(1).get<Eigen::Index>(),
                               cplx{e.at(2).get<double>(), e.at(3).get<double>()});
        } else {
            const auto& a = jl.at("A");
            if (static_cast<Eigen::Index>(a.size()) != rows * cols) throw ShapeMismatch("matrix entry count");
            for (Eigen::Index r = 0; r < rows; ++r)
                for (Eigen::Index c = 0; c < cols; ++c) {
                    cplx v = complex_from_json(a[r * cols + c]);
                    if (v != cplx{}) t.emplace_back(r, c, v);
                }
        }
        SparseMat A(rows, cols);
        A.setFromTriplets(t.begin(), t.end());
        const auto& jb = jl.at("b");
        VecC b(static_cast<Eigen::Index>(jb.size()));
        for (std::size_t r = 0; r < jb.size(); ++r) b[static_cast<Eigen::Index>(r)] = complex_from_json(jb[r]);
        layers.push_back({std::move(A), std::move(b)});
    }
    NetworkWeights theta(std::move(layers));
    if (j.contains("d") && j["d"].get<int>() != theta.input_dim()) throw ShapeMismatch("declared d differs from layers");
    if (j.contains("L") && j["L"].get<int>() != theta.depth()) throw ShapeMismatch("declared L differs from layers");
    return theta;
}

inline void save_network(const NetworkWeights& theta, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << network_to_json(theta).dump() << "\n";
}

inline NetworkWeights load_network(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    return network_from_json(json::parse(is));
}

}  // namespace cvnn
