#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "sarp/corpus.hpp"
#include "sarp/markov_net.hpp"

namespace test_helpers {

inline std::string fixture(const std::string& name) {
    return std::string(FIXTURE_DIR) + "/" + name;
}

inline sarp::PotentialTable random_table(std::mt19937_64& rng, double lo = 0.05,
                                         double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    sarp::PotentialTable t;
    t.at(0, 0) = u(rng);
    t.at(0, 1) = u(rng);
    t.at(1, 0) = u(rng);
    t.at(1, 1) = u(rng);
    return t;
}

// random spanning tree: node i >= 1 attaches to a uniform parent < i
inline sarp::PairwiseMarkovNetwork random_tree(int nodes, std::mt19937_64& rng) {
    sarp::PairwiseMarkovNetwork net(nodes);
    for (int i = 1; i < nodes; ++i) {
        std::uniform_int_distribution<int> pick(0, i - 1);
        net.add_edge(pick(rng), i, random_table(rng));
    }
    return net;
}

inline std::map<int, int> random_evidence(int nodes, std::mt19937_64& rng,
                                          double clamp_prob = 0.3) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::map<int, int> evidence;
    for (int i = 0; i < nodes; ++i) {
        if (u(rng) < clamp_prob) {
            evidence[i] = u(rng) < 0.5 ? 1 : 0;
        }
    }
    return evidence;
}

// random corpus over a small label pool, for oracle comparisons
inline std::vector<sarp::CorpusImage> random_images(int count, std::mt19937_64& rng) {
    static const std::vector<std::string> pool = {"book", "table",  "mug",   "plant",
                                                  "sofa", "laptop", "chair", "lamp"};
    static const std::vector<std::string> preds = {"on", "near", "in"};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<sarp::CorpusImage> images;
    for (int i = 0; i < count; ++i) {
        sarp::CorpusImage img;
        img.image_id = "img_" + std::to_string(i);
        for (const auto& label : pool) {
            if (u(rng) < 0.4) {
                img.labels.insert(label);
            }
        }
        std::vector<std::string> present(img.labels.begin(), img.labels.end());
        for (size_t a = 0; a < present.size(); ++a) {
            for (size_t b = a + 1; b < present.size(); ++b) {
                if (u(rng) < 0.3) {
                    size_t p = static_cast<size_t>(u(rng) * 3.0) % preds.size();
                    img.relations.insert({present[a], preds[p], present[b]});
                }
            }
        }
        images.push_back(std::move(img));
    }
    return images;
}

// brute-force per-image counting, independent of the corpus indexes
inline int scan_with(const std::vector<sarp::CorpusImage>& images,
                     const std::string& label) {
    int n = 0;
    for (const auto& img : images) {
        n += img.labels.count(label) ? 1 : 0;
    }
    return n;
}

inline int scan_pair(const std::vector<sarp::CorpusImage>& images, const std::string& a,
                     const std::string& b) {
    int n = 0;
    for (const auto& img : images) {
        n += (img.labels.count(a) && img.labels.count(b)) ? 1 : 0;
    }
    return n;
}

inline int scan_either(const std::vector<sarp::CorpusImage>& images,
                       const std::string& a, const std::string& b) {
    int n = 0;
    for (const auto& img : images) {
        n += (img.labels.count(a) || img.labels.count(b)) ? 1 : 0;
    }
    return n;
}

inline int scan_triplet(const std::vector<sarp::CorpusImage>& images,
                        const sarp::Triplet& t) {
    int n = 0;
    for (const auto& img : images) {
        n += img.relations.count(t) ? 1 : 0;
    }
    return n;
}

// verbatim recomputation of the potential entries by brute-force scanning
inline sarp::PotentialTable scan_phi(const std::vector<sarp::CorpusImage>& images,
                                     const std::string& v, const std::string& pred,
                                     const std::string& v_prime) {
    int m = scan_either(images, v, v_prime);
    if (m == 0) {
        return sarp::PotentialTable::uniform();
    }
    int both = scan_pair(images, v, v_prime);
    int trip = scan_triplet(images, {v, pred, v_prime});
    sarp::PotentialTable t;
    t.at(1, 1) = static_cast<double>(trip) / m;
    t.at(0, 0) = static_cast<double>(both - trip) / m;
    t.at(0, 1) = static_cast<double>(scan_with(images, v_prime) - both) / m;
    t.at(1, 0) = static_cast<double>(scan_with(images, v) - both) / m;
    return t;
}

}  // namespace test_helpers
