// Copyright 2026 The Casewall Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include "casewall/graph.hpp"

#include <set>

#include <json.hpp>

namespace casewall {

EntityCounts entity_term_counts(const Document& document, const EntityRegistry& registry) {
  const ExtractorConfig config{.capitalized_heuristic = false, .partial_names = true};
  EntityCounts counts;
  for (const auto& m : extract_mentions(document.body, registry, config)) {
    const auto* entity = registry.find(m.entity_id);
    if (entity && entity->origin == EntityOrigin::Gazetteer) ++counts[m.entity_id];
  }
  return counts;
}

std::vector<EntityVector> tfidf_vectors(const std::vector<Document>& documents, const EntityRegistry& registry) {
  std::vector<EntityCounts> per_doc;
  per_doc.reserve(documents.size());
  std::set<std::string> entity_set;
  for (const auto& d : documents) {
    per_doc.push_back(entity_term_counts(d, registry));
    for (const auto& [id, _] : per_doc.back()) entity_set.insert(id);
  }
  const std::vector<std::string> entities(entity_set.begin(), entity_set.end());

  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(documents.size()),
                                                 static_cast<Eigen::Index>(entities.size()));
  for (std::size_t d = 0; d < documents.size(); ++d) {
    for (std::size_t e = 0; e < entities.size(); ++e) {
      auto it = per_doc[d].find(entities[e]);
      if (it != per_doc[d].end()) counts(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(e)) = it->second;
    }
  }
  const Eigen::MatrixXd weights = tfidf_weights(counts);

  std::vector<EntityVector> out;
  out.reserve(documents.size());
  for (std::size_t d = 0; d < documents.size(); ++d) {
    EntityVector v{documents[d].doc_id, {}};
    for (std::size_t e = 0; e < entities.size(); ++e) {
      const auto r = static_cast<Eigen::Index>(d);
      const auto c = static_cast<Eigen::Index>(e);
      if (counts(r, c) > 0) v.weights.emplace(entities[e], weights(r, c));
    }
    out.push_back(std::move(v));
  }
  return out;
}

ConnectionGraph build_graph(const std::vector<EntityVector>& vectors, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error("graph threshold must be within [0, 1]");

  std::map<std::string, Eigen::Index> column;
  for (const auto& v : vectors) {
    for (const auto& [id, _] : v.weights) column.emplace(id, 0);
  }
  Eigen::Index next = 0;
  for (auto& [_, c] : column) c = next++;

  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(vectors.size()), next);
  for (std::size_t d = 0; d < vectors.size(); ++d) {
    for (const auto& [id, w] : vectors[d].weights) weights(static_cast<Eigen::Index>(d), column.at(id)) = w;
  }
  const Eigen::MatrixXd sim = cosine_similarity(weights);

  ConnectionGraph graph;
  graph.threshold = threshold;
  for (const auto& v : vectors) graph.nodes.push_back(v.doc_id);
  for (Eigen::Index a = 0; a < sim.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < sim.cols(); ++b) {
      if (sim(a, b) >= threshold)
        graph.edges.push_back({graph.nodes[static_cast<std::size_t>(a)], graph.nodes[static_cast<std::size_t>(b)],
                               sim(a, b)});
    }
  }
  return graph;
}

ConnectionGraph corpus_graph(const Corpus& corpus, double threshold) {
  const auto registry = EntityRegistry::from_gazetteer(corpus.manifest().gazetteer);
  return build_graph(tfidf_vectors(corpus.documents(), registry), threshold);
}

std::string graph_to_text(const ConnectionGraph& graph) {
  nlohmann::ordered_json j;
  j["threshold"] = graph.threshold;
  j["nodes"] = graph.nodes;
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : graph.edges) j["edges"].push_back({{"a", e.doc_a}, {"b", e.doc_b}, {"similarity", e.similarity}});
  return j.dump(2) + "\n";
}

}  // namespace casewall
