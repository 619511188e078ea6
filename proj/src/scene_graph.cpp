#include "sarp/scene_graph.hpp"

#include <limits>
#include <stdexcept>
#include <utility>

namespace sarp {

GlobalSceneGraph::GlobalSceneGraph(std::string query_label)
    : query_label_(std::move(query_label)) {
    if (query_label_.empty()) {
        throw std::invalid_argument("query label must be non-empty");
    }
    objects_.push_back({kQueryId, query_label_, std::nullopt, -1});
    objects_.push_back({kQueryDuplicateId, query_label_, std::nullopt, -1});
    relations_.push_back({kQueryId, "duplicate_of", kQueryDuplicateId});
}

GlobalSceneGraph init_graph(const std::string& query_label) {
    return GlobalSceneGraph(query_label);
}

InstanceId GlobalSceneGraph::associate_instance(const std::string& label,
                                                Vec2 position, int location_id,
                                                double radius) {
    if (radius <= 0.0) {
        throw std::invalid_argument("association radius must be positive");
    }
    auto it = by_label_.find(label);
    if (it != by_label_.end()) {
        InstanceId best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (InstanceId id : it->second) {
            const auto& inst = objects_[static_cast<size_t>(id)];
            double d = distance(*inst.position, position);
            if (d <= radius && (d < best_dist || (d == best_dist && id < best))) {
                best = id;
                best_dist = d;
            }
        }
        if (best >= 0) {
            return best;
        }
    }
    // The first sighting of the query label binds to the Q node itself; a
    // second distinct sighting binds to the duplicate node Q', so that
    // evidence attached to either candidate still reaches Q via their edge.
    if (label == query_label_) {
        for (InstanceId qid : {kQueryId, kQueryDuplicateId}) {
            if (!objects_[static_cast<size_t>(qid)].position.has_value()) {
                objects_[static_cast<size_t>(qid)].position = position;
                objects_[static_cast<size_t>(qid)].location_id = location_id;
                by_label_[label].push_back(qid);
                return qid;
            }
        }
    }
    InstanceId id = static_cast<InstanceId>(objects_.size());
    objects_.push_back({id, label, position, location_id});
    by_label_[label].push_back(id);
    return id;
}

bool GlobalSceneGraph::has_relation(InstanceId subject, const std::string& predicate,
                                    InstanceId object) const {
    for (const auto& r : relations_) {
        if (r.subject == subject && r.object == object && r.predicate == predicate) {
            return true;
        }
    }
    return false;
}

GlobalSceneGraph::MergeOutcome GlobalSceneGraph::merge_local(
    const LocalSceneGraph& local, double radius) {
    MergeOutcome out;
    out.object_ids.reserve(local.objects.size());
    for (const auto& obj : local.objects) {
        out.object_ids.push_back(
            associate_instance(obj.label, obj.position, obj.location_id, radius));
    }
    for (const auto& rel : local.relations) {
        InstanceId s = out.object_ids.at(static_cast<size_t>(rel.subject_index));
        InstanceId o = out.object_ids.at(static_cast<size_t>(rel.object_index));
        if (s == o) {
            // both endpoints collapsed onto the same instance
            out.relation_index.push_back(-1);
            out.relation_inserted.push_back(false);
            continue;
        }
        bool found = false;
        for (size_t i = 0; i < relations_.size(); ++i) {
            const auto& r = relations_[i];
            if (r.subject == s && r.object == o && r.predicate == rel.predicate) {
                out.relation_index.push_back(static_cast<int>(i));
                out.relation_inserted.push_back(false);
                found = true;
                break;
            }
        }
        if (!found) {
            out.relation_index.push_back(static_cast<int>(relations_.size()));
            out.relation_inserted.push_back(true);
            relations_.push_back({s, rel.predicate, o});
        }
    }
    return out;
}

nlohmann::json GlobalSceneGraph::to_json() const {
    nlohmann::json objs = nlohmann::json::array();
    for (const auto& o : objects_) {
        nlohmann::json j{{"id", o.id}, {"label", o.label}};
        if (o.position) {
            j["position"] = {o.position->x, o.position->y};
            j["location_id"] = o.location_id;
        }
        objs.push_back(std::move(j));
    }
    nlohmann::json rels = nlohmann::json::array();
    for (const auto& r : relations_) {
        rels.push_back({{"subject", r.subject},
                        {"predicate", r.predicate},
                        {"object", r.object}});
    }
    return {{"objects", std::move(objs)}, {"relations", std::move(rels)}};
}

}  // namespace sarp
