#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "crunch/data.hpp"

namespace crunch {

// Dead zone implementing the exact "w = 0" classification under floating
// point: orthogonal integer stance rows must come out neutral.
inline constexpr double kSignEpsilon = 1e-9;

struct SentimentMatrix {
  std::vector<std::string> actors;  // sorted lexicographically
  std::vector<std::string> topics;  // sorted lexicographically
  Eigen::MatrixXd values;           // actors x topics, 0 where unobserved

  void validate() const;
  Eigen::Index actor_index(const std::string& actor) const;
};

struct SignedGraph {
  struct Edge {
    std::string a;
    std::string b;
    double weight = 0.0;  // cosine stance weight in [-1, 1]
    int sign = 0;         // -1, 0, +1
  };

  std::vector<std::string> actors;
  std::vector<Edge> edges;  // every unordered pair, sorted by (a, b)

  void validate() const;
};

// Row per actor, column per topic, aggregated polarities; unobserved pairs 0.
SentimentMatrix build_matrix(const SentimentRecordSet& records);

// Cosine of the two actors' stance rows; all-zero rows give 0.
double cosine_weight(const SentimentMatrix& m, const std::string& actor_i,
                     const std::string& actor_j);

// +1 / 0 / -1 under the kSignEpsilon dead zone.
int sentiment_sign(double w);

// Signed graph over every unordered actor pair.
SignedGraph sentiment_graph(const SentimentMatrix& m);

}  // namespace crunch
