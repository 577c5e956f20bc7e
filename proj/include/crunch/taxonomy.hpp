#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "crunch/data.hpp"

namespace crunch {

struct CorrelationMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd c;  // symmetric, unit diagonal, entries in [-1, 1]

  void validate() const;
};

struct DistanceMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd d;  // symmetric, zero diagonal, entries in [0, 2]

  void validate() const;
};

struct Tree {
  struct Edge {
    std::string a;
    std::string b;
    double weight = 0.0;
  };

  std::vector<std::string> labels;
  std::vector<Edge> edges;  // exactly labels.size() - 1, connected

  void validate() const;
  double total_weight() const;
};

struct TailFit {
  double alpha = 0.0;   // estimated tail exponent, > 0
  Eigen::Index k = 0;   // order statistics used
  double xmin = 0.0;    // (k+1)-th largest sample
  double ks_stat = 0.0; // sup distance of the fitted Pareto tail
};

// ln(p[i+1] / p[i]) for a strictly positive series; output length n - 1.
Eigen::VectorXd log_returns(const Eigen::Ref<const Eigen::VectorXd>& prices);

// Pearson correlation per label pair; constant series are an error that
// names the offending label.
CorrelationMatrix correlation(const SeriesEnsemble& ensemble);

// d = sqrt(2 (1 - c)) elementwise.
DistanceMatrix ultrametric_distance(const CorrelationMatrix& c);

// Kruskal with lexicographic (weight, a, b) edge ordering, so ties produce
// a unique tree.
Tree minimum_spanning_tree(const DistanceMatrix& d);

// Max edge weight on the unique tree path between each label pair.
DistanceMatrix subdominant_ultrametric(const Tree& tree);

// Hill estimator over the k largest positive samples.
TailFit tail_exponent(const Eigen::Ref<const Eigen::VectorXd>& samples,
                      Eigen::Index k);

// Documented default order count: floor(n^0.6).
Eigen::Index default_tail_order(Eigen::Index n);

}  // namespace crunch
