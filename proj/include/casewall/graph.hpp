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

// Document connection graph: TF/IDF over person mentions, cosine similarity,
// thresholded edges.

#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "casewall/corpus.hpp"
#include "casewall/entity.hpp"

namespace casewall {

using EntityCounts = std::map<std::string, int>;

struct EntityVector {
  std::string doc_id;
  std::map<std::string, double> weights;  // entity_id -> tf-idf, never negative
};

struct GraphEdge {
  std::string doc_a;
  std::string doc_b;
  double similarity = 0.0;
};

struct ConnectionGraph {
  std::vector<std::string> nodes;
  std::vector<GraphEdge> edges;  // doc_a precedes doc_b in `nodes`
  double threshold = 0.0;
};

inline constexpr double kDefaultGraphThreshold = 0.2;

/// Registry-name and partial-name mentions per entity in a document body.
/// Heuristic (capitalized-run) candidates are not counted.
EntityCounts entity_term_counts(const Document& document, const EntityRegistry& registry);

/// weight(d, e) = count(d, e) * ln(N / df(e)).
std::vector<EntityVector> tfidf_vectors(const std::vector<Document>& documents, const EntityRegistry& registry);

/// Throws Error when threshold is outside [0, 1].
ConnectionGraph build_graph(const std::vector<EntityVector>& vectors, double threshold);

/// Corpus gazetteer -> counts -> vectors -> graph.
ConnectionGraph corpus_graph(const Corpus& corpus, double threshold = kDefaultGraphThreshold);

/// Adjacency list as JSON: {"threshold", "nodes", "edges": [{"a","b","similarity"}]}.
std::string graph_to_text(const ConnectionGraph& graph);

// Dense kernels. Rows are documents, columns are entities.

/// Applies idf column-wise to a raw count matrix.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> tfidf_weights(
    const Eigen::MatrixBase<Derived>& counts) {
  using Scalar = typename Derived::Scalar;
  const auto n = static_cast<Scalar>(counts.rows());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> weights = counts;
  for (Eigen::Index e = 0; e < counts.cols(); ++e) {
    const auto df = static_cast<Scalar>((counts.col(e).array() > Scalar(0)).count());
    weights.col(e) *= df > Scalar(0) ? std::log(n / df) : Scalar(0);
  }
  return weights;
}

/// Pairwise cosine similarity of the rows of `weights`; a row that is all
/// zero has similarity 0 with everything, including itself. Clamped to
/// [0, 1] and exactly symmetric.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> cosine_similarity(
    const Eigen::MatrixBase<Derived>& weights) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix unit = weights;
  for (Eigen::Index r = 0; r < unit.rows(); ++r) {
    const Scalar norm = unit.row(r).norm();
    if (norm > Scalar(0)) unit.row(r) /= norm;
  }
  Matrix sim = Matrix::Zero(unit.rows(), unit.rows());
  sim.template triangularView<Eigen::Upper>() = unit * unit.transpose();
  sim = sim.cwiseMax(Scalar(0)).cwiseMin(Scalar(1));
  sim.template triangularView<Eigen::StrictlyLower>() = sim.transpose();
  return sim;
}

}  // namespace casewall
