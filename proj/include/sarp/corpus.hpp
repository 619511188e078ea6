#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sarp/scene_graph.hpp"

namespace sarp {

using Triplet = std::array<std::string, 3>;  // subject label, predicate, object label

struct CorpusImage {
    std::string image_id;
    std::set<std::string> labels;
    std::set<Triplet> relations;
};

// 2x2 edge potential over the binary presence variables of a relation's
// endpoints. at(a, b) is the potential of subject-present=a, object-present=b.
struct PotentialTable {
    std::array<std::array<double, 2>, 2> values{{{0.0, 0.0}, {0.0, 0.0}}};

    double& at(int subject_present, int object_present) {
        return values[static_cast<size_t>(subject_present)]
                     [static_cast<size_t>(object_present)];
    }
    double at(int subject_present, int object_present) const {
        return values[static_cast<size_t>(subject_present)]
                     [static_cast<size_t>(object_present)];
    }

    static PotentialTable uniform() {
        PotentialTable t;
        t.at(1, 1) = t.at(0, 0) = t.at(0, 1) = t.at(1, 0) = 0.25;
        return t;
    }
};

// Immutable collection of per-image object/relation sets with inverted
// indexes for presence, pair and triplet counts.
class SceneGraphCorpus {
public:
    SceneGraphCorpus() = default;
    explicit SceneGraphCorpus(std::vector<CorpusImage> images);

    size_t size() const { return images_.size(); }
    const std::vector<CorpusImage>& images() const { return images_; }

    int images_with(const std::string& label) const;
    int images_with_pair(const std::string& a, const std::string& b) const;
    int images_with_either(const std::string& a, const std::string& b) const;
    int images_with_triplet(const Triplet& t) const;

private:
    std::vector<CorpusImage> images_;
    std::map<std::string, int> label_counts_;
    std::map<std::pair<std::string, std::string>, int> pair_counts_;  // unordered, keyed min/max
    std::map<Triplet, int> triplet_counts_;
};

// Reads newline-delimited JSON records:
//   {"image_id": str, "labels": [str], "relations": [[subj, pred, obj]]}
SceneGraphCorpus load_corpus(const std::string& path);
SceneGraphCorpus parse_corpus(std::istream& in, const std::string& source_name);

struct PhiOptions {
    double smoothing = 1e-3;  // added to every entry; 0 disables
};

// Per-relation 2x2 potentials from corpus counts. For relation (v, e, v')
// with m = |images containing v or v'|:
//   at(1,1) = |images with v, v' and the triplet| / m
//   at(0,0) = |images with v and v' but not the triplet| / m
//   at(0,1) = |images with v' without v| / m
//   at(1,0) = |images with v without v'| / m
// m = 0 yields the uniform table.
std::vector<PotentialTable> calc_phi(const LocalSceneGraph& local,
                                     const SceneGraphCorpus& corpus,
                                     const PhiOptions& opts = {});

// Synthetic corpus generation: each image draws one context by weight, then
// includes each label independently with its probability, and each relation
// with its probability when both endpoints are present.
struct ContextRelationSpec {
    Triplet triplet;
    double probability = 0.0;
};

struct ContextSpec {
    double weight = 1.0;
    std::map<std::string, double> label_probs;
    std::vector<ContextRelationSpec> relations;
};

struct CorpusGeneratorConfig {
    int image_count = 0;
    std::vector<ContextSpec> contexts;
};

CorpusGeneratorConfig parse_generator_config(const nlohmann::json& j);
CorpusGeneratorConfig load_generator_config(const std::string& path);
SceneGraphCorpus generate_synthetic_corpus(const CorpusGeneratorConfig& config,
                                           uint64_t seed);

void write_corpus(const SceneGraphCorpus& corpus, const std::string& path);

}  // namespace sarp
