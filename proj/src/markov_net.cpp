#include "sarp/markov_net.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sarp {

PairwiseMarkovNetwork::PairwiseMarkovNetwork(int node_count)
    : node_count_(node_count), adjacency_(static_cast<size_t>(node_count)) {
    if (node_count < 0) {
        throw std::invalid_argument("node count must be non-negative");
    }
}

void PairwiseMarkovNetwork::add_edge(int a, int b, const PotentialTable& table) {
    if (a < 0 || b < 0 || a >= node_count_ || b >= node_count_) {
        throw std::out_of_range("edge endpoint out of range");
    }
    if (a == b) {
        throw std::invalid_argument("self-edges are not allowed");
    }
    bool any_positive = false;
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            if (table.at(x, y) < 0.0) {
                throw std::invalid_argument("potential entries must be non-negative");
            }
            any_positive = any_positive || table.at(x, y) > 0.0;
        }
    }
    if (!any_positive) {
        throw std::invalid_argument("potential table is all-zero");
    }
    // store edges with a < b; flip the table when the caller's order differs
    PotentialTable oriented = table;
    if (a > b) {
        std::swap(a, b);
        oriented.at(0, 1) = table.at(1, 0);
        oriented.at(1, 0) = table.at(0, 1);
    }
    auto key = std::make_pair(a, b);
    auto it = edge_lookup_.find(key);
    if (it == edge_lookup_.end()) {
        edge_lookup_[key] = static_cast<int>(edges_.size());
        edges_.push_back({a, b, oriented});
        adjacency_[static_cast<size_t>(a)].push_back(b);
        adjacency_[static_cast<size_t>(b)].push_back(a);
        return;
    }
    // combine duplicates: elementwise product, renormalized to max entry 1
    PotentialTable& existing = edges_[static_cast<size_t>(it->second)].table;
    double max_entry = 0.0;
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            existing.at(x, y) *= oriented.at(x, y);
            max_entry = std::max(max_entry, existing.at(x, y));
        }
    }
    if (max_entry <= 0.0) {
        throw std::invalid_argument("combined potential table is all-zero");
    }
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            existing.at(x, y) /= max_entry;
        }
    }
}

int PairwiseMarkovNetwork::edge_index(int a, int b) const {
    if (a > b) {
        std::swap(a, b);
    }
    auto it = edge_lookup_.find(std::make_pair(a, b));
    return it == edge_lookup_.end() ? -1 : it->second;
}

nlohmann::json PairwiseMarkovNetwork::to_json() const {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : edges_) {
        edges.push_back({{"a", e.a},
                         {"b", e.b},
                         {"table",
                          {{"11", e.table.at(1, 1)},
                           {"00", e.table.at(0, 0)},
                           {"01", e.table.at(0, 1)},
                           {"10", e.table.at(1, 0)}}}});
    }
    return {{"nodes", node_count_}, {"edges", std::move(edges)}};
}

PotentialTable query_anchor_table() {
    PotentialTable t;
    t.at(1, 1) = 0.45;
    t.at(0, 0) = 0.45;
    t.at(1, 0) = 0.05;
    t.at(0, 1) = 0.05;
    return t;
}

PairwiseMarkovNetwork build_network(const GlobalSceneGraph& graph,
                                    const std::vector<PotentialTable>& potentials) {
    const auto& relations = graph.relations();
    if (potentials.size() != relations.size()) {
        throw std::invalid_argument("potential count does not match relation count");
    }
    PairwiseMarkovNetwork net(static_cast<int>(graph.objects().size()));
    for (size_t i = 0; i < relations.size(); ++i) {
        const auto& r = relations[i];
        bool is_anchor = (r.subject == GlobalSceneGraph::kQueryId &&
                          r.object == GlobalSceneGraph::kQueryDuplicateId) ||
                         (r.subject == GlobalSceneGraph::kQueryDuplicateId &&
                          r.object == GlobalSceneGraph::kQueryId);
        net.add_edge(r.subject, r.object, is_anchor ? query_anchor_table() : potentials[i]);
    }
    return net;
}

namespace {

// node factors induced by evidence: clamped nodes get a 0/1 indicator
std::vector<std::array<double, 2>> node_factors(int n, const std::map<int, int>& evidence) {
    std::vector<std::array<double, 2>> psi(static_cast<size_t>(n), {1.0, 1.0});
    for (const auto& [node, value] : evidence) {
        if (node < 0 || node >= n) {
            throw std::out_of_range("evidence node out of range");
        }
        if (value != 0 && value != 1) {
            throw std::invalid_argument("evidence value must be 0 or 1");
        }
        psi[static_cast<size_t>(node)] = {value == 0 ? 1.0 : 0.0,
                                          value == 1 ? 1.0 : 0.0};
    }
    return psi;
}

}  // namespace

Marginals exact_marginals(const PairwiseMarkovNetwork& net,
                          const std::map<int, int>& evidence) {
    int n = net.node_count();
    if (n > 20) {
        throw std::invalid_argument("exact enumeration refused above 20 nodes");
    }
    auto psi = node_factors(n, evidence);

    std::vector<double> numerator(static_cast<size_t>(n), 0.0);
    double z = 0.0;
    uint32_t limit = 1u << n;
    for (uint32_t assignment = 0; assignment < limit; ++assignment) {
        double w = 1.0;
        for (int i = 0; i < n && w > 0.0; ++i) {
            w *= psi[static_cast<size_t>(i)][(assignment >> i) & 1u];
        }
        if (w == 0.0) {
            continue;
        }
        for (const auto& e : net.edges()) {
            w *= e.table.at(static_cast<int>((assignment >> e.a) & 1u),
                            static_cast<int>((assignment >> e.b) & 1u));
            if (w == 0.0) {
                break;
            }
        }
        if (w == 0.0) {
            continue;
        }
        z += w;
        for (int i = 0; i < n; ++i) {
            if ((assignment >> i) & 1u) {
                numerator[static_cast<size_t>(i)] += w;
            }
        }
    }
    if (z <= 0.0) {
        throw std::runtime_error("degenerate network: partition function is zero");
    }
    Marginals m;
    m.converged = true;
    m.p_present.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        m.p_present[static_cast<size_t>(i)] = numerator[static_cast<size_t>(i)] / z;
    }
    return m;
}

Marginals loopy_bp(const PairwiseMarkovNetwork& net,
                   const std::map<int, int>& evidence, const BpConfig& config) {
    int n = net.node_count();
    if (n <= 0) {
        throw std::invalid_argument("network is empty");
    }
    if (config.max_iterations < 1 || config.tolerance <= 0.0 ||
        config.damping < 0.0 || config.damping >= 1.0) {
        throw std::invalid_argument("invalid BP configuration");
    }
    auto psi = node_factors(n, evidence);

    const auto& edges = net.edges();
    // messages[2*e]   : edge.a -> edge.b
    // messages[2*e+1] : edge.b -> edge.a
    std::vector<std::array<double, 2>> messages(edges.size() * 2, {0.5, 0.5});

    auto incoming_product = [&](int node, int excluded_edge) {
        std::array<double, 2> prod{psi[static_cast<size_t>(node)][0],
                                   psi[static_cast<size_t>(node)][1]};
        for (int nb : net.neighbors(node)) {
            int e = net.edge_index(node, nb);
            if (e == excluded_edge) {
                continue;
            }
            // message flowing from nb into node
            int slot = edges[static_cast<size_t>(e)].a == nb ? 2 * e : 2 * e + 1;
            prod[0] *= messages[static_cast<size_t>(slot)][0];
            prod[1] *= messages[static_cast<size_t>(slot)][1];
        }
        return prod;
    };

    Marginals result;
    int iter = 0;
    for (; iter < config.max_iterations; ++iter) {
        double max_change = 0.0;
        std::vector<std::array<double, 2>> updated(messages.size());
        for (size_t e = 0; e < edges.size(); ++e) {
            const auto& edge = edges[e];
            for (int dir = 0; dir < 2; ++dir) {
                int from = dir == 0 ? edge.a : edge.b;
                auto prod = incoming_product(from, static_cast<int>(e));
                std::array<double, 2> msg{0.0, 0.0};
                for (int xt = 0; xt < 2; ++xt) {
                    for (int xf = 0; xf < 2; ++xf) {
                        double pot = dir == 0 ? edge.table.at(xf, xt)
                                              : edge.table.at(xt, xf);
                        msg[static_cast<size_t>(xt)] += prod[static_cast<size_t>(xf)] * pot;
                    }
                }
                double sum = msg[0] + msg[1];
                if (sum > 0.0) {
                    msg[0] /= sum;
                    msg[1] /= sum;
                } else {
                    msg = {0.5, 0.5};
                }
                const auto& old = messages[2 * e + static_cast<size_t>(dir)];
                std::array<double, 2> damped{
                    config.damping * old[0] + (1.0 - config.damping) * msg[0],
                    config.damping * old[1] + (1.0 - config.damping) * msg[1]};
                max_change = std::max({max_change, std::abs(damped[0] - old[0]),
                                       std::abs(damped[1] - old[1])});
                updated[2 * e + static_cast<size_t>(dir)] = damped;
            }
        }
        messages = std::move(updated);
        if (max_change < config.tolerance) {
            result.converged = true;
            ++iter;
            break;
        }
    }
    result.iterations = iter;

    result.p_present.resize(static_cast<size_t>(n));
    for (int node = 0; node < n; ++node) {
        auto belief = incoming_product(node, -1);
        double sum = belief[0] + belief[1];
        result.p_present[static_cast<size_t>(node)] =
            sum > 0.0 ? belief[1] / sum : 0.5;
    }
    return result;
}

std::vector<double> target_bias_vector(const PairwiseMarkovNetwork& net,
                                       const GlobalSceneGraph& graph,
                                       int location_count, const BpConfig& config) {
    std::vector<std::map<int, int>> evidence_by_location(
        static_cast<size_t>(location_count));
    for (const auto& obj : graph.objects()) {
        if (obj.id == GlobalSceneGraph::kQueryId ||
            obj.id == GlobalSceneGraph::kQueryDuplicateId) {
            continue;
        }
        if (obj.location_id < 0 || obj.location_id >= location_count) {
            throw std::invalid_argument("evidence object lacks a valid location_id");
        }
        evidence_by_location[static_cast<size_t>(obj.location_id)][obj.id] = 1;
    }

    double base = loopy_bp(net, {}, config)
                      .p_present[static_cast<size_t>(GlobalSceneGraph::kQueryId)];
    std::vector<double> bias(static_cast<size_t>(location_count), base);
    for (int loc = 0; loc < location_count; ++loc) {
        const auto& evidence = evidence_by_location[static_cast<size_t>(loc)];
        if (evidence.empty()) {
            continue;
        }
        bias[static_cast<size_t>(loc)] =
            loopy_bp(net, evidence, config)
                .p_present[static_cast<size_t>(GlobalSceneGraph::kQueryId)];
    }
    return bias;
}

}  // namespace sarp
