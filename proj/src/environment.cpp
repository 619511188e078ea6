#include "sarp/environment.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <stdexcept>

namespace sarp {

bool EnvironmentMap::are_adjacent(int a, int b) const {
    const auto& nbrs = adjacency[static_cast<size_t>(a)];
    return std::find(nbrs.begin(), nbrs.end(), b) != nbrs.end();
}

bool EnvironmentMap::is_connected() const {
    if (locations.empty()) {
        return false;
    }
    std::vector<bool> seen(locations.size(), false);
    std::deque<int> queue{0};
    seen[0] = true;
    size_t count = 1;
    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        for (int nb : adjacency[static_cast<size_t>(cur)]) {
            if (!seen[static_cast<size_t>(nb)]) {
                seen[static_cast<size_t>(nb)] = true;
                ++count;
                queue.push_back(nb);
            }
        }
    }
    return count == locations.size();
}

void EnvironmentMap::validate() const {
    if (locations.empty()) {
        throw std::invalid_argument("environment has no locations");
    }
    if (adjacency.size() != locations.size()) {
        throw std::invalid_argument("adjacency size does not match location count");
    }
    int n = location_count();
    for (int a = 0; a < n; ++a) {
        for (int b : adjacency[static_cast<size_t>(a)]) {
            if (b < 0 || b >= n) {
                throw std::invalid_argument("adjacency index out of range");
            }
            if (b == a) {
                throw std::invalid_argument("location adjacent to itself");
            }
            if (!are_adjacent(b, a)) {
                throw std::invalid_argument("adjacency is not symmetric");
            }
        }
    }
    if (!is_connected()) {
        throw std::invalid_argument("environment map is disconnected");
    }
}

std::vector<int> EnvironmentMap::shortest_path(int from, int to) const {
    std::vector<int> parent(locations.size(), -1);
    std::vector<bool> seen(locations.size(), false);
    std::deque<int> queue{from};
    seen[static_cast<size_t>(from)] = true;
    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        if (cur == to) {
            break;
        }
        for (int nb : adjacency[static_cast<size_t>(cur)]) {
            if (!seen[static_cast<size_t>(nb)]) {
                seen[static_cast<size_t>(nb)] = true;
                parent[static_cast<size_t>(nb)] = cur;
                queue.push_back(nb);
            }
        }
    }
    if (!seen[static_cast<size_t>(to)]) {
        throw std::runtime_error("no path between locations");
    }
    std::vector<int> path;
    for (int cur = to; cur != -1; cur = parent[static_cast<size_t>(cur)]) {
        path.push_back(cur);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

EnvironmentFile parse_environment(const nlohmann::json& j) {
    EnvironmentFile env;
    env.map.name = j.value("name", "unnamed");
    for (const auto& loc : j.at("locations")) {
        env.map.locations.push_back({loc.at(0).get<double>(), loc.at(1).get<double>()});
    }
    for (const auto& nbrs : j.at("adjacency")) {
        env.map.adjacency.push_back(nbrs.get<std::vector<int>>());
    }
    env.map.validate();

    if (j.contains("objects")) {
        for (const auto& oj : j.at("objects")) {
            ObjectSpec spec;
            spec.label = oj.at("label").get<std::string>();
            const auto& loc = oj.at("location");
            if (loc.is_string()) {
                if (loc.get<std::string>() != "with_target") {
                    throw std::invalid_argument("unknown object placement: " +
                                                loc.get<std::string>());
                }
                spec.with_target = true;
            } else {
                spec.location = loc.get<int>();
                if (spec.location < 0 || spec.location >= env.map.location_count()) {
                    throw std::invalid_argument("object location out of range");
                }
            }
            env.objects.push_back(std::move(spec));
        }
    }

    const auto& placement = j.at("target_placement");
    env.target_label = placement.at("label").get<std::string>();
    env.target_distribution = placement.at("distribution").get<std::vector<double>>();
    if (static_cast<int>(env.target_distribution.size()) != env.map.location_count()) {
        throw std::invalid_argument("target distribution size does not match map");
    }
    double sum = 0.0;
    for (double p : env.target_distribution) {
        if (p < 0.0) {
            throw std::invalid_argument("negative placement probability");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("target distribution is not normalized");
    }
    env.robot_start = j.value("robot_start", 0);
    if (env.robot_start < 0 || env.robot_start >= env.map.location_count()) {
        throw std::invalid_argument("robot start out of range");
    }
    return env;
}

EnvironmentFile load_environment(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open environment file: " + path);
    }
    nlohmann::json j;
    in >> j;
    return parse_environment(j);
}

}  // namespace sarp
