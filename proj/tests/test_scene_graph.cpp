#include <doctest.h>

#include "sarp/scene_graph.hpp"

using namespace sarp;

TEST_CASE("init_graph creates Q, Q' and their edge") {
    for (const char* label : {"banana", "mug"}) {
        GlobalSceneGraph g = init_graph(label);
        CHECK(g.objects().size() == 2);
        CHECK(g.relations().size() == 1);
        CHECK(g.objects()[0].id == GlobalSceneGraph::kQueryId);
        CHECK(g.objects()[1].id == GlobalSceneGraph::kQueryDuplicateId);
        CHECK(g.objects()[0].label == label);
        CHECK(g.objects()[1].label == label);
        CHECK_FALSE(g.objects()[0].position.has_value());
        CHECK_FALSE(g.objects()[1].position.has_value());
        CHECK(g.relations()[0].subject == GlobalSceneGraph::kQueryId);
        CHECK(g.relations()[0].object == GlobalSceneGraph::kQueryDuplicateId);
    }
}

TEST_CASE("init_graph rejects an empty label") {
    CHECK_THROWS_AS(init_graph(""), std::invalid_argument);
}

TEST_CASE("associate_instance reuses a nearby same-label instance") {
    GlobalSceneGraph g = init_graph("banana");
    InstanceId mug = g.associate_instance("mug", {1.0, 1.0}, 0, 0.5);

    CHECK(g.associate_instance("mug", {1.2, 1.0}, 0, 0.5) == mug);
    CHECK(g.associate_instance("mug", {4.0, 1.0}, 1, 0.5) != mug);
    CHECK(g.associate_instance("book", {1.0, 1.0}, 0, 0.5) != mug);
}

TEST_CASE("associate_instance binds the first query-label sighting to Q") {
    GlobalSceneGraph g = init_graph("banana");
    InstanceId id = g.associate_instance("banana", {2.0, 0.0}, 1, 0.5);
    CHECK(id == GlobalSceneGraph::kQueryId);
    CHECK(g.objects().size() == 2);
    CHECK(g.objects()[0].position.has_value());
    CHECK(g.objects()[0].location_id == 1);

    // a second, distant query-label sighting binds to the duplicate node Q'
    InstanceId other = g.associate_instance("banana", {9.0, 0.0}, 4, 0.5);
    CHECK(other == GlobalSceneGraph::kQueryDuplicateId);
    CHECK(g.objects().size() == 2);
    CHECK(g.objects()[1].location_id == 4);

    // a third distinct sighting becomes its own instance
    InstanceId third = g.associate_instance("banana", {20.0, 0.0}, 5, 0.5);
    CHECK(third != GlobalSceneGraph::kQueryId);
    CHECK(third != GlobalSceneGraph::kQueryDuplicateId);
    CHECK(g.objects().size() == 3);
}

TEST_CASE("merge_local unions objects and re-indexed relations") {
    GlobalSceneGraph g = init_graph("banana");
    LocalSceneGraph local;
    local.objects = {{"book", {1.0, 0.0}, 0}, {"table", {1.1, 0.0}, 0}};
    local.relations = {{0, "on", 1}};

    auto outcome = g.merge_local(local, 0.5);
    CHECK(g.objects().size() == 4);
    CHECK(g.relations().size() == 2);
    CHECK(outcome.object_ids.size() == 2);
    CHECK(outcome.relation_inserted == std::vector<bool>{true});
    CHECK(g.has_relation(outcome.object_ids[0], "on", outcome.object_ids[1]));
}

TEST_CASE("merge_local is idempotent") {
    GlobalSceneGraph g = init_graph("banana");
    LocalSceneGraph local;
    local.objects = {{"book", {1.0, 0.0}, 0}, {"table", {1.1, 0.0}, 0}};
    local.relations = {{0, "on", 1}};

    g.merge_local(local, 0.5);
    size_t nodes = g.objects().size();
    size_t edges = g.relations().size();
    auto second = g.merge_local(local, 0.5);
    CHECK(g.objects().size() == nodes);
    CHECK(g.relations().size() == edges);
    CHECK(second.relation_inserted == std::vector<bool>{false});
}

TEST_CASE("distant same-label detections stay distinct") {
    GlobalSceneGraph g = init_graph("banana");
    LocalSceneGraph a;
    a.objects = {{"mug", {0.0, 0.0}, 0}};
    LocalSceneGraph b;
    b.objects = {{"mug", {3.0, 0.0}, 1}};
    g.merge_local(a, 0.5);
    g.merge_local(b, 0.5);
    CHECK(g.objects().size() == 4);  // Q, Q', two mugs
}

TEST_CASE("node and edge counts never shrink across merges") {
    GlobalSceneGraph g = init_graph("banana");
    size_t nodes = g.objects().size();
    size_t edges = g.relations().size();
    for (int step = 0; step < 5; ++step) {
        LocalSceneGraph local;
        local.objects = {{"book", {1.0 * step, 0.0}, step},
                         {"lamp", {1.0 * step, 0.1}, step}};
        local.relations = {{0, "near", 1}};
        g.merge_local(local, 0.5);
        CHECK(g.objects().size() >= nodes);
        CHECK(g.relations().size() >= edges);
        nodes = g.objects().size();
        edges = g.relations().size();
        // Q and Q' stay present and connected
        CHECK(g.objects()[0].id == GlobalSceneGraph::kQueryId);
        CHECK(g.has_relation(GlobalSceneGraph::kQueryId, "duplicate_of",
                             GlobalSceneGraph::kQueryDuplicateId));
    }
}

TEST_CASE("every relation endpoint resolves to a live instance") {
    GlobalSceneGraph g = init_graph("banana");
    LocalSceneGraph local;
    local.objects = {{"banana", {0.0, 0.0}, 0}, {"bowl", {0.1, 0.0}, 0}};
    local.relations = {{0, "near", 1}};
    g.merge_local(local, 0.5);
    int max_id = static_cast<int>(g.objects().size());
    for (const auto& r : g.relations()) {
        CHECK(r.subject >= 0);
        CHECK(r.subject < max_id);
        CHECK(r.object >= 0);
        CHECK(r.object < max_id);
        CHECK(r.subject != r.object);
    }
}

TEST_CASE("to_json snapshots objects and relations") {
    GlobalSceneGraph g = init_graph("banana");
    auto j = g.to_json();
    CHECK(j.at("objects").size() == 2);
    CHECK(j.at("relations").size() == 1);
}
