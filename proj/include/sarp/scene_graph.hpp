#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "sarp/types.hpp"

namespace sarp {

using InstanceId = int;

// A detected (or query) object accumulated in the global scene graph.
// The query node and its duplicate carry no position until a detection
// of the query label is bound to them.
struct ObjectInstance {
    InstanceId id = -1;
    std::string label;
    std::optional<Vec2> position;
    int location_id = -1;  // nearest discrete environment location, -1 = unknown
};

struct RelationshipEdge {
    InstanceId subject = -1;
    std::string predicate;
    InstanceId object = -1;
};

// One object of a single-view scene graph, before instance association.
struct LocalObject {
    std::string label;
    Vec2 position;
    int location_id = -1;
};

// Relation endpoints index into LocalSceneGraph::objects.
struct LocalRelation {
    int subject_index = -1;
    std::string predicate;
    int object_index = -1;
};

struct LocalSceneGraph {
    int timestep = 0;
    int robot_location = 0;
    std::vector<LocalObject> objects;
    std::vector<LocalRelation> relations;
};

// Episode-wide scene graph. Always contains the query node Q (id 0), its
// duplicate Q' (id 1) and the edge between them; nodes and edges only grow.
class GlobalSceneGraph {
public:
    static constexpr InstanceId kQueryId = 0;
    static constexpr InstanceId kQueryDuplicateId = 1;

    explicit GlobalSceneGraph(std::string query_label);

    const std::string& query_label() const { return query_label_; }
    const std::vector<ObjectInstance>& objects() const { return objects_; }
    const std::vector<RelationshipEdge>& relations() const { return relations_; }

    // Returns the id of the nearest existing same-label instance within
    // `radius` (ties broken by lowest id), or inserts a new instance.
    // A detection of the query label binds to the Q node if Q is unbound.
    InstanceId associate_instance(const std::string& label, Vec2 position,
                                  int location_id, double radius);

    struct MergeOutcome {
        std::vector<InstanceId> object_ids;      // per local object
        std::vector<int> relation_index;         // per local relation, global index
        std::vector<bool> relation_inserted;     // per local relation
    };

    MergeOutcome merge_local(const LocalSceneGraph& local, double radius);

    bool has_relation(InstanceId subject, const std::string& predicate,
                      InstanceId object) const;

    nlohmann::json to_json() const;

private:
    std::string query_label_;
    std::vector<ObjectInstance> objects_;
    std::vector<RelationshipEdge> relations_;
    // label -> ids with a bound position, for association lookups
    std::unordered_map<std::string, std::vector<InstanceId>> by_label_;
};

GlobalSceneGraph init_graph(const std::string& query_label);

}  // namespace sarp
