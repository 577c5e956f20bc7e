#include "crunch/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "crunch/core.hpp"
#include "crunch/error.hpp"

namespace crunch {

void SentimentMatrix::validate() const {
  require(!actors.empty() && !topics.empty(),
          "sentiment matrix has no actors or no topics");
  require(values.rows() == static_cast<Eigen::Index>(actors.size()) &&
              values.cols() == static_cast<Eigen::Index>(topics.size()),
          "sentiment matrix shape does not match actor/topic lists");
  require(std::is_sorted(actors.begin(), actors.end()) &&
              std::adjacent_find(actors.begin(), actors.end()) == actors.end(),
          "actors must be unique and sorted");
  require(std::is_sorted(topics.begin(), topics.end()) &&
              std::adjacent_find(topics.begin(), topics.end()) == topics.end(),
          "topics must be unique and sorted");
  require(values.allFinite(), "sentiment matrix has non-finite entries");
}

Eigen::Index SentimentMatrix::actor_index(const std::string& actor) const {
  const auto it = std::lower_bound(actors.begin(), actors.end(), actor);
  require(it != actors.end() && *it == actor, "unknown actor '" + actor + "'");
  return static_cast<Eigen::Index>(it - actors.begin());
}

void SignedGraph::validate() const {
  for (const Edge& e : edges) {
    require(e.a != e.b, "signed graph has a self-edge at '" + e.a + "'");
    require(std::abs(e.weight) <= 1.0, "edge weight outside [-1, 1]");
    require(e.sign == sentiment_sign(e.weight),
            "edge sign inconsistent with its weight");
  }
}

SentimentMatrix build_matrix(const SentimentRecordSet& records) {
  records.validate();
  require(!records.records.empty(), "no sentiment records");

  std::set<std::string> actor_set;
  std::set<std::string> topic_set;
  for (const SentimentRecord& rec : records.records) {
    actor_set.insert(rec.actor);
    topic_set.insert(rec.topic);
  }

  SentimentMatrix m;
  m.actors.assign(actor_set.begin(), actor_set.end());
  m.topics.assign(topic_set.begin(), topic_set.end());
  m.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.actors.size()),
                                   static_cast<Eigen::Index>(m.topics.size()));
  std::map<std::string, Eigen::Index> topic_index;
  for (std::size_t j = 0; j < m.topics.size(); ++j) {
    topic_index[m.topics[j]] = static_cast<Eigen::Index>(j);
  }
  for (const SentimentRecord& rec : records.records) {
    m.values(m.actor_index(rec.actor), topic_index.at(rec.topic)) +=
        rec.polarity;
  }
  return m;
}

double cosine_weight(const SentimentMatrix& m, const std::string& actor_i,
                     const std::string& actor_j) {
  const Eigen::Index i = m.actor_index(actor_i);
  const Eigen::Index j = m.actor_index(actor_j);
  require(i != j, "cosine weight needs two distinct actors");
  return cosine_similarity(m.values.row(i).transpose(),
                           m.values.row(j).transpose());
}

int sentiment_sign(double w) {
  require(std::isfinite(w) && std::abs(w) <= 1.0,
          "sentiment weight outside [-1, 1]");
  if (w > kSignEpsilon) return 1;
  if (w < -kSignEpsilon) return -1;
  return 0;
}

SignedGraph sentiment_graph(const SentimentMatrix& m) {
  m.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(m.actors.size());
  require(n >= 2, "signed graph needs at least 2 actors");

  SignedGraph graph;
  graph.actors = m.actors;
  graph.edges.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = cosine_similarity(m.values.row(i).transpose(),
                                         m.values.row(j).transpose());
      graph.edges.push_back({m.actors[static_cast<std::size_t>(i)],
                             m.actors[static_cast<std::size_t>(j)], w,
                             sentiment_sign(w)});
    }
  }
  return graph;
}

}  // namespace crunch
