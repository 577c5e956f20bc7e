#include "crunch/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "crunch/core.hpp"
#include "crunch/error.hpp"

namespace crunch {

namespace {

void validate_labels(const std::vector<std::string>& labels) {
  std::set<std::string> seen;
  for (const std::string& label : labels) {
    require(!label.empty(), "empty label");
    require(seen.insert(label).second, "duplicate label '" + label + "'");
  }
}

void validate_square(const std::vector<std::string>& labels,
                     const Eigen::MatrixXd& m, const char* what) {
  const Eigen::Index n = static_cast<Eigen::Index>(labels.size());
  require(m.rows() == n && m.cols() == n,
          std::string(what) + " matrix shape does not match labels");
  require(m.allFinite(), std::string(what) + " matrix has non-finite entries");
  require(m.isApprox(m.transpose(), 0.0),
          std::string(what) + " matrix is not symmetric");
}

// Union-find with path halving.
struct DisjointSets {
  std::vector<int> parent;

  explicit DisjointSets(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

}  // namespace

void CorrelationMatrix::validate() const {
  validate_labels(labels);
  validate_square(labels, c, "correlation");
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    require(c(i, i) == 1.0, "correlation diagonal is not 1");
  }
  require((c.array() >= -1.0).all() && (c.array() <= 1.0).all(),
          "correlation entries outside [-1, 1]");
}

void DistanceMatrix::validate() const {
  validate_labels(labels);
  validate_square(labels, d, "distance");
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    require(d(i, i) == 0.0, "distance diagonal is not 0");
  }
  require((d.array() >= 0.0).all() && (d.array() <= 2.0).all(),
          "distance entries outside [0, 2]");
}

void Tree::validate() const {
  validate_labels(labels);
  const std::size_t n = labels.size();
  require(edges.size() + 1 == n, "tree must have exactly n - 1 edges");
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < n; ++i) index[labels[i]] = static_cast<int>(i);
  DisjointSets sets(static_cast<int>(n));
  for (const Edge& e : edges) {
    require(e.a != e.b, "tree has a self-edge at '" + e.a + "'");
    auto ia = index.find(e.a);
    auto ib = index.find(e.b);
    require(ia != index.end() && ib != index.end(),
            "tree edge references unknown label");
    require(std::isfinite(e.weight) && e.weight >= 0.0,
            "tree edge weight must be a nonnegative real");
    require(sets.unite(ia->second, ib->second), "tree contains a cycle");
  }
}

double Tree::total_weight() const {
  double total = 0.0;
  for (const Edge& e : edges) total += e.weight;
  return total;
}

Eigen::VectorXd log_returns(const Eigen::Ref<const Eigen::VectorXd>& prices) {
  const Eigen::Index n = prices.size();
  require(n >= 2, "log returns need at least 2 prices");
  for (Eigen::Index i = 0; i < n; ++i) {
    require(std::isfinite(prices[i]) && prices[i] > 0.0,
            "nonpositive price at index " + std::to_string(i));
  }
  return (prices.tail(n - 1).array() / prices.head(n - 1).array()).log();
}

CorrelationMatrix correlation(const SeriesEnsemble& ensemble) {
  ensemble.validate();
  require(ensemble.labels.size() >= 2, "correlation needs at least 2 series");
  const Eigen::MatrixXd centered =
      ensemble.samples.rowwise() - ensemble.samples.colwise().mean();
  for (Eigen::Index j = 0; j < centered.cols(); ++j) {
    require(centered.col(j).norm() > 0.0,
            "series '" + ensemble.labels[static_cast<std::size_t>(j)] +
                "' is constant (zero variance)");
  }
  return CorrelationMatrix{ensemble.labels,
                           pearson_correlation(ensemble.samples)};
}

DistanceMatrix ultrametric_distance(const CorrelationMatrix& c) {
  c.validate();
  Eigen::MatrixXd d = correlation_to_distance(c.c.array()).matrix();
  d.diagonal().setZero();
  // Mirror the upper triangle: vectorized elementwise sqrt is not exactly
  // rounded on every SIMD path, so mirrored entries computed in different
  // packets can drift one ulp apart and break the symmetry contract.
  d.triangularView<Eigen::StrictlyLower>() = d.transpose();
  return DistanceMatrix{c.labels, std::move(d)};
}

Tree minimum_spanning_tree(const DistanceMatrix& d) {
  d.validate();
  const Eigen::Index n = d.d.rows();
  require(n >= 2, "spanning tree needs at least 2 labels");

  struct Candidate {
    double weight;
    Eigen::Index i;
    Eigen::Index j;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      // Canonical endpoint order is lexicographic by label.
      const bool swap =
          d.labels[static_cast<std::size_t>(j)] < d.labels[static_cast<std::size_t>(i)];
      candidates.push_back({d.d(i, j), swap ? j : i, swap ? i : j});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](const Candidate& x, const Candidate& y) {
              if (x.weight != y.weight) return x.weight < y.weight;
              const std::string& xa = d.labels[static_cast<std::size_t>(x.i)];
              const std::string& ya = d.labels[static_cast<std::size_t>(y.i)];
              if (xa != ya) return xa < ya;
              return d.labels[static_cast<std::size_t>(x.j)] <
                     d.labels[static_cast<std::size_t>(y.j)];
            });

  Tree tree;
  tree.labels = d.labels;
  DisjointSets sets(static_cast<int>(n));
  for (const Candidate& cand : candidates) {
    if (sets.unite(static_cast<int>(cand.i), static_cast<int>(cand.j))) {
      tree.edges.push_back({d.labels[static_cast<std::size_t>(cand.i)],
                            d.labels[static_cast<std::size_t>(cand.j)],
                            cand.weight});
      if (tree.edges.size() + 1 == static_cast<std::size_t>(n)) break;
    }
  }
  return tree;
}

DistanceMatrix subdominant_ultrametric(const Tree& tree) {
  tree.validate();
  const std::size_t n = tree.labels.size();
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < n; ++i)
    index[tree.labels[i]] = static_cast<int>(i);

  std::vector<std::vector<std::pair<int, double>>> adjacency(n);
  for (const Tree::Edge& e : tree.edges) {
    const int ia = index.at(e.a);
    const int ib = index.at(e.b);
    adjacency[static_cast<std::size_t>(ia)].push_back({ib, e.weight});
    adjacency[static_cast<std::size_t>(ib)].push_back({ia, e.weight});
  }

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  std::vector<int> stack;
  std::vector<char> seen(n);
  for (std::size_t root = 0; root < n; ++root) {
    std::fill(seen.begin(), seen.end(), 0);
    seen[root] = 1;
    stack.assign(1, static_cast<int>(root));
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const auto& [v, w] : adjacency[static_cast<std::size_t>(u)]) {
        if (seen[static_cast<std::size_t>(v)]) continue;
        seen[static_cast<std::size_t>(v)] = 1;
        d(static_cast<Eigen::Index>(root), v) =
            std::max(d(static_cast<Eigen::Index>(root), u), w);
        stack.push_back(v);
      }
    }
  }
  d = ((d + d.transpose()) / 2.0).eval();  // paths are symmetric already
  return DistanceMatrix{tree.labels, std::move(d)};
}

Eigen::Index default_tail_order(Eigen::Index n) {
  return static_cast<Eigen::Index>(
      std::floor(std::pow(static_cast<double>(n), 0.6)));
}

TailFit tail_exponent(const Eigen::Ref<const Eigen::VectorXd>& samples,
                      Eigen::Index k) {
  require(samples.size() >= 50, "tail fit needs at least 50 samples");
  std::vector<double> positive;
  positive.reserve(static_cast<std::size_t>(samples.size()));
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    require(std::isfinite(samples[i]), "tail fit saw a non-finite sample");
    if (samples[i] > 0.0) positive.push_back(samples[i]);
  }
  const Eigen::Index p = static_cast<Eigen::Index>(positive.size());
  require(k >= 1 && k < p,
          "order count k must satisfy 1 <= k < " + std::to_string(p) +
              " (positive samples)");
  std::sort(positive.begin(), positive.end(), std::greater<double>());

  const double xmin = positive[static_cast<std::size_t>(k)];
  double log_sum = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    log_sum += std::log(positive[static_cast<std::size_t>(i)] / xmin);
  }
  require(log_sum > 0.0, "degenerate tail: top samples are all equal");
  const double alpha = static_cast<double>(k) / log_sum;

  // Two-sided Kolmogorov-Smirnov distance between the empirical tail and
  // the fitted Pareto CDF F(x) = 1 - (xmin / x)^alpha, over the k samples
  // above xmin (ascending order).
  double ks = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double x = positive[static_cast<std::size_t>(k - 1 - i)];
    const double fitted = 1.0 - std::pow(xmin / x, alpha);
    const double lo = static_cast<double>(i) / static_cast<double>(k);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(k);
    ks = std::max(ks, std::max(std::abs(fitted - lo), std::abs(fitted - hi)));
  }
  return TailFit{alpha, k, xmin, ks};
}

}  // namespace crunch
