#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sarp/types.hpp"

namespace sarp {

// Discrete navigation map: locations with symmetric adjacency.
struct EnvironmentMap {
    std::string name;
    std::vector<Vec2> locations;
    std::vector<std::vector<int>> adjacency;

    int location_count() const { return static_cast<int>(locations.size()); }
    double distance_between(int a, int b) const {
        return distance(locations[static_cast<size_t>(a)],
                        locations[static_cast<size_t>(b)]);
    }
    bool are_adjacent(int a, int b) const;
    bool is_connected() const;
    void validate() const;  // throws on asymmetric adjacency or disconnection

    // shortest path by hop count; includes both endpoints
    std::vector<int> shortest_path(int from, int to) const;
};

// Static object placement: either a fixed location index or co-located with
// the sampled target ("with_target" in the environment file).
struct ObjectSpec {
    std::string label;
    int location = -1;
    bool with_target = false;
};

struct EnvironmentFile {
    EnvironmentMap map;
    std::vector<ObjectSpec> objects;
    std::string target_label;
    std::vector<double> target_distribution;  // over locations, normalized
    int robot_start = 0;
};

EnvironmentFile parse_environment(const nlohmann::json& j);
EnvironmentFile load_environment(const std::string& path);

}  // namespace sarp
