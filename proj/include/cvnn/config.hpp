#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace cvnn {

/// Everything a CLI run depends on. Output locations are not part of the echo, so the same
/// computation written to two different files yields identical documents.
struct RunConfig {
    std::string command;
    std::string activation;
    std::string target = "cone";
    int degree = 6;
    bool deep = false;
    int layers = 0;  ///< 0: subcommand default (2 for deep synthesis, 1 for invariants)
    int dims = 1;
    double radius = 1.0;
    double eps = 0.1;
    std::string widths = "50,100,200";
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string kind = "dbar_vanishes";
    std::optional<double> tol;
    int trials = 20;
    bool timing = false;
    std::string out;
    std::string network_out;
    std::string config_path;

    std::vector<int> width_list() const {
        std::vector<int> w;
        std::string item;
        for (std::size_t i = 0; i <= widths.size(); ++i) {
            if (i == widths.size() || widths[i] == ',') {
                if (item.empty()) throw std::invalid_argument("empty entry in --widths '" + widths + "'");
                std::size_t used = 0;
                int v = 0;
                try {
                    v = std::stoi(item, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != item.size() || v < 1) throw std::invalid_argument("bad width '" + item + "'");
                w.push_back(v);
                item.clear();
            } else if (widths[i] != ' ') {
                item += widths[i];
            }
        }
        return w;
    }

    nlohmann::json echo() const {
        nlohmann::json j{{"command", command}, {"activation", activation}, {"seed", seed}, {"format", format}};
        if (command == "approximate") {
            j["target"] = target;
            j["degree"] = degree;
            j["deep"] = deep;
            j["layers"] = layers;
            j["dims"] = dims;
            j["radius"] = radius;
            j["eps"] = eps;
        } else if (command == "invariants") {
            j["kind"] = kind;
            j["layers"] = layers;
            j["radius"] = radius;
            j["trials"] = trials;
        } else if (command == "floor") {
            j["target"] = target;
            j["widths"] = width_list();
            j["radius"] = radius;
        }
        if (tol) j["tol"] = *tol;
        return j;
    }
};

}  // namespace cvnn
