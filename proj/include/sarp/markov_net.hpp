#pragma once

#include <map>
#include <vector>

#include "sarp/corpus.hpp"
#include "sarp/scene_graph.hpp"

namespace sarp {

// Pairwise Markov network over binary presence variables. At most one edge
// per node pair; duplicate edges are combined by elementwise product and
// renormalized to max entry 1.
class PairwiseMarkovNetwork {
public:
    struct Edge {
        int a = -1;
        int b = -1;
        PotentialTable table;
    };

    explicit PairwiseMarkovNetwork(int node_count = 0);

    int node_count() const { return node_count_; }
    const std::vector<Edge>& edges() const { return edges_; }

    void add_edge(int a, int b, const PotentialTable& table);

    const std::vector<int>& neighbors(int node) const {
        return adjacency_[static_cast<size_t>(node)];
    }
    // index into edges() for the pair, -1 if absent
    int edge_index(int a, int b) const;

    nlohmann::json to_json() const;

private:
    int node_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adjacency_;
    std::map<std::pair<int, int>, int> edge_lookup_;
};

struct BpConfig {
    int max_iterations = 100;
    double tolerance = 1e-6;  // max-abs message change to declare convergence
    double damping = 0.5;     // blend factor toward the old message
};

struct Marginals {
    std::vector<double> p_present;  // per node, probability of value 1
    bool converged = false;
    int iterations = 0;
};

// Potential used for the edge between the query node and its duplicate:
// identity-leaning so the duplicate acts as a mild prior anchor.
PotentialTable query_anchor_table();

// One binary node per graph object, one edge per distinct object pair.
// `potentials` must align one-to-one with graph.relations(); the entry for
// the Q-Q' relation is replaced by query_anchor_table().
PairwiseMarkovNetwork build_network(const GlobalSceneGraph& graph,
                                    const std::vector<PotentialTable>& potentials);

// Brute-force marginals by 2^n enumeration; refuses above 20 nodes.
Marginals exact_marginals(const PairwiseMarkovNetwork& net,
                          const std::map<int, int>& evidence);

// Sum-product with a flooding schedule and damping. Evidence clamps nodes.
// Exact on trees; approximate on loopy graphs. Non-convergence is reported
// through the flag, never thrown.
Marginals loopy_bp(const PairwiseMarkovNetwork& net,
                   const std::map<int, int>& evidence, const BpConfig& config = {});

// Per environment location: the BP marginal of Q with every non-query
// instance at that location clamped present. Locations holding no instances
// get the no-evidence marginal.
std::vector<double> target_bias_vector(const PairwiseMarkovNetwork& net,
                                       const GlobalSceneGraph& graph,
                                       int location_count,
                                       const BpConfig& config = {});

}  // namespace sarp
