#include "sarp/corpus.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sarp {

namespace {

std::pair<std::string, std::string> pair_key(const std::string& a, const std::string& b) {
    return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

SceneGraphCorpus::SceneGraphCorpus(std::vector<CorpusImage> images)
    : images_(std::move(images)) {
    std::set<std::string> seen_ids;
    for (const auto& img : images_) {
        if (!seen_ids.insert(img.image_id).second) {
            throw std::invalid_argument("duplicate image_id: " + img.image_id);
        }
        for (const auto& t : img.relations) {
            if (!img.labels.count(t[0]) || !img.labels.count(t[2])) {
                throw std::invalid_argument("relation endpoint not in labels of image " +
                                            img.image_id);
            }
        }
        for (const auto& l : img.labels) {
            ++label_counts_[l];
        }
        for (auto a = img.labels.begin(); a != img.labels.end(); ++a) {
            for (auto b = std::next(a); b != img.labels.end(); ++b) {
                ++pair_counts_[pair_key(*a, *b)];
            }
        }
        for (const auto& t : img.relations) {
            ++triplet_counts_[t];
        }
    }
}

int SceneGraphCorpus::images_with(const std::string& label) const {
    auto it = label_counts_.find(label);
    return it == label_counts_.end() ? 0 : it->second;
}

int SceneGraphCorpus::images_with_pair(const std::string& a, const std::string& b) const {
    if (a == b) {
        return images_with(a);
    }
    auto it = pair_counts_.find(pair_key(a, b));
    return it == pair_counts_.end() ? 0 : it->second;
}

int SceneGraphCorpus::images_with_either(const std::string& a, const std::string& b) const {
    return images_with(a) + images_with(b) - images_with_pair(a, b);
}

int SceneGraphCorpus::images_with_triplet(const Triplet& t) const {
    auto it = triplet_counts_.find(t);
    return it == triplet_counts_.end() ? 0 : it->second;
}

SceneGraphCorpus parse_corpus(std::istream& in, const std::string& source_name) {
    std::vector<CorpusImage> images;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            CorpusImage img;
            img.image_id = j.at("image_id").get<std::string>();
            for (const auto& l : j.at("labels")) {
                img.labels.insert(l.get<std::string>());
            }
            if (j.contains("relations")) {
                for (const auto& r : j.at("relations")) {
                    if (r.size() != 3) {
                        throw std::invalid_argument("relation is not a triplet");
                    }
                    img.relations.insert({r[0].get<std::string>(),
                                          r[1].get<std::string>(),
                                          r[2].get<std::string>()});
                }
            }
            images.push_back(std::move(img));
        } catch (const std::exception& e) {
            throw std::runtime_error(source_name + ":" + std::to_string(line_no) +
                                     ": malformed corpus record: " + e.what());
        }
    }
    return SceneGraphCorpus(std::move(images));
}

SceneGraphCorpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open corpus file: " + path);
    }
    return parse_corpus(in, path);
}

void write_corpus(const SceneGraphCorpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open output file: " + path);
    }
    for (const auto& img : corpus.images()) {
        nlohmann::json rels = nlohmann::json::array();
        for (const auto& t : img.relations) {
            rels.push_back({t[0], t[1], t[2]});
        }
        nlohmann::json j{{"image_id", img.image_id},
                         {"labels", img.labels},
                         {"relations", std::move(rels)}};
        out << j.dump() << "\n";
    }
}

std::vector<PotentialTable> calc_phi(const LocalSceneGraph& local,
                                     const SceneGraphCorpus& corpus,
                                     const PhiOptions& opts) {
    std::vector<PotentialTable> tables;
    tables.reserve(local.relations.size());
    for (const auto& rel : local.relations) {
        const std::string& v = local.objects.at(static_cast<size_t>(rel.subject_index)).label;
        const std::string& vp = local.objects.at(static_cast<size_t>(rel.object_index)).label;
        Triplet triplet{v, rel.predicate, vp};

        int m = corpus.images_with_either(v, vp);
        PotentialTable t;
        if (m == 0) {
            t = PotentialTable::uniform();
        } else {
            double dm = static_cast<double>(m);
            int both = corpus.images_with_pair(v, vp);
            int with_triplet = corpus.images_with_triplet(triplet);
            t.at(1, 1) = with_triplet / dm;
            t.at(0, 0) = (both - with_triplet) / dm;
            t.at(0, 1) = (corpus.images_with(vp) - both) / dm;
            t.at(1, 0) = (corpus.images_with(v) - both) / dm;
        }
        if (opts.smoothing > 0.0) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    t.at(a, b) += opts.smoothing;
                }
            }
        }
        tables.push_back(t);
    }
    return tables;
}

CorpusGeneratorConfig parse_generator_config(const nlohmann::json& j) {
    CorpusGeneratorConfig cfg;
    cfg.image_count = j.at("images").get<int>();
    if (cfg.image_count < 0) {
        throw std::invalid_argument("image count must be non-negative");
    }
    for (const auto& cj : j.at("contexts")) {
        ContextSpec ctx;
        ctx.weight = cj.at("weight").get<double>();
        if (ctx.weight < 0.0) {
            throw std::invalid_argument("context weight must be non-negative");
        }
        for (const auto& [label, p] : cj.at("labels").items()) {
            double prob = p.get<double>();
            if (prob < 0.0 || prob > 1.0) {
                throw std::invalid_argument("label probability outside [0,1]: " + label);
            }
            ctx.label_probs[label] = prob;
        }
        if (cj.contains("relations")) {
            for (const auto& rj : cj.at("relations")) {
                ContextRelationSpec rs;
                rs.triplet = {rj.at(0).get<std::string>(), rj.at(1).get<std::string>(),
                              rj.at(2).get<std::string>()};
                rs.probability = rj.at(3).get<double>();
                if (rs.probability < 0.0 || rs.probability > 1.0) {
                    throw std::invalid_argument("relation probability outside [0,1]");
                }
                ctx.relations.push_back(std::move(rs));
            }
        }
        cfg.contexts.push_back(std::move(ctx));
    }
    if (cfg.contexts.empty()) {
        throw std::invalid_argument("generator config needs at least one context");
    }
    return cfg;
}

CorpusGeneratorConfig load_generator_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open generator config: " + path);
    }
    nlohmann::json j;
    in >> j;
    return parse_generator_config(j);
}

SceneGraphCorpus generate_synthetic_corpus(const CorpusGeneratorConfig& config,
                                           uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<double> weights;
    weights.reserve(config.contexts.size());
    for (const auto& c : config.contexts) {
        weights.push_back(c.weight);
    }
    std::discrete_distribution<int> pick_context(weights.begin(), weights.end());

    std::vector<CorpusImage> images;
    images.reserve(static_cast<size_t>(config.image_count));
    for (int i = 0; i < config.image_count; ++i) {
        const ContextSpec& ctx = config.contexts[static_cast<size_t>(pick_context(rng))];
        CorpusImage img;
        img.image_id = "synth_" + std::to_string(i);
        for (const auto& [label, p] : ctx.label_probs) {
            if (unit(rng) < p) {
                img.labels.insert(label);
            }
        }
        for (const auto& rs : ctx.relations) {
            if (img.labels.count(rs.triplet[0]) && img.labels.count(rs.triplet[2]) &&
                unit(rng) < rs.probability) {
                img.relations.insert(rs.triplet);
            }
        }
        images.push_back(std::move(img));
    }
    return SceneGraphCorpus(std::move(images));
}

}  // namespace sarp
