#include "crunch/community.hpp"

#include <algorithm>
#include <numeric>

#include "crunch/error.hpp"
#include "crunch/parallel.hpp"

namespace crunch {

namespace {

constexpr double kGainTolerance = 1e-12;

int polarity_sign(std::int64_t net) { return net > 0 ? 1 : (net < 0 ? -1 : 0); }

// Index-based weighted graph used by the local-move/aggregation loop.
// Self-loop weights follow the adjacency-matrix convention: loop[u] holds
// A_uu, i.e. twice the collapsed internal weight, so degrees stay additive
// under aggregation.
struct LevelGraph {
  std::vector<std::vector<std::pair<int, double>>> adjacency;
  std::vector<double> loop;
  double two_m = 0.0;

  int size() const { return static_cast<int>(adjacency.size()); }

  double degree(int u) const {
    double k = loop[static_cast<std::size_t>(u)];
    for (const auto& [v, w] : adjacency[static_cast<std::size_t>(u)]) k += w;
    return k;
  }
};

// One sweep phase: repeated deterministic passes in node-index order until a
// full pass moves nothing. Returns the community of each node (not yet
// renumbered).
std::vector<int> local_moves(const LevelGraph& g) {
  const int n = g.size();
  std::vector<int> community(static_cast<std::size_t>(n));
  std::iota(community.begin(), community.end(), 0);

  std::vector<double> degree(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) degree[static_cast<std::size_t>(u)] = g.degree(u);
  std::vector<double> total(degree);  // sum of degrees per community

  if (g.two_m <= 0.0) return community;

  std::vector<double> weight_to(static_cast<std::size_t>(n), 0.0);
  std::vector<int> touched;
  bool moved = true;
  while (moved) {
    moved = false;
    for (int u = 0; u < n; ++u) {
      const int home = community[static_cast<std::size_t>(u)];
      touched.clear();
      for (const auto& [v, w] : g.adjacency[static_cast<std::size_t>(u)]) {
        const int c = community[static_cast<std::size_t>(v)];
        if (weight_to[static_cast<std::size_t>(c)] == 0.0) touched.push_back(c);
        weight_to[static_cast<std::size_t>(c)] += w;
      }
      std::sort(touched.begin(), touched.end());

      const double k_u = degree[static_cast<std::size_t>(u)];
      total[static_cast<std::size_t>(home)] -= k_u;
      // Gain of inserting u (detached) into C:
      // k_{u,C} / m - tot_C * k_u / (2 m^2). Only communities u has links to
      // can beat returning home, which also keeps disconnected components
      // apart. Ties keep the home community; ties between candidates take
      // the smallest id.
      const auto insertion_gain = [&](int c) {
        return 2.0 * weight_to[static_cast<std::size_t>(c)] / g.two_m -
               total[static_cast<std::size_t>(c)] * k_u * 2.0 /
                   (g.two_m * g.two_m);
      };
      int best = home;
      double best_gain = insertion_gain(home);
      for (int c : touched) {
        if (c == home) continue;
        const double gain = insertion_gain(c);
        if (gain > best_gain + kGainTolerance) {
          best_gain = gain;
          best = c;
        } else if (gain >= best_gain - kGainTolerance && best != home &&
                   c < best) {
          best = c;
        }
      }
      total[static_cast<std::size_t>(best)] += k_u;
      if (best != home) {
        community[static_cast<std::size_t>(u)] = best;
        moved = true;
      }
      for (int c : touched) weight_to[static_cast<std::size_t>(c)] = 0.0;
      weight_to[static_cast<std::size_t>(home)] = 0.0;
    }
  }
  return community;
}

// Renumber arbitrary community labels to contiguous ids by first appearance
// in node-index order.
int renumber(std::vector<int>& community) {
  std::vector<int> remap(community.size(), -1);
  int next = 0;
  for (int& c : community) {
    if (remap[static_cast<std::size_t>(c)] < 0) remap[static_cast<std::size_t>(c)] = next++;
    c = remap[static_cast<std::size_t>(c)];
  }
  return next;
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<int>& community,
                     int community_count) {
  LevelGraph agg;
  agg.adjacency.resize(static_cast<std::size_t>(community_count));
  agg.loop.assign(static_cast<std::size_t>(community_count), 0.0);
  agg.two_m = g.two_m;

  std::vector<std::map<int, double>> between(
      static_cast<std::size_t>(community_count));
  for (int u = 0; u < g.size(); ++u) {
    const int cu = community[static_cast<std::size_t>(u)];
    agg.loop[static_cast<std::size_t>(cu)] += g.loop[static_cast<std::size_t>(u)];
    for (const auto& [v, w] : g.adjacency[static_cast<std::size_t>(u)]) {
      const int cv = community[static_cast<std::size_t>(v)];
      if (cu == cv) {
        agg.loop[static_cast<std::size_t>(cu)] += w;  // both directed halves land here
      } else {
        between[static_cast<std::size_t>(cu)][cv] += w;
      }
    }
  }
  for (int c = 0; c < community_count; ++c) {
    for (const auto& [d, w] : between[static_cast<std::size_t>(c)]) {
      agg.adjacency[static_cast<std::size_t>(c)].push_back({d, w});
    }
  }
  return agg;
}

}  // namespace

void EngagementGraph::validate() const {
  require(std::is_sorted(accounts.begin(), accounts.end()) &&
              std::adjacent_find(accounts.begin(), accounts.end()) ==
                  accounts.end(),
          "accounts must be unique and sorted");
  const Edge* prev = nullptr;
  for (const Edge& e : edges) {
    require(e.a < e.b, "engagement edge endpoints not in canonical order");
    require(e.weight >= 1, "engagement edge weight must be >= 1");
    require(std::binary_search(accounts.begin(), accounts.end(), e.a) &&
                std::binary_search(accounts.begin(), accounts.end(), e.b),
            "edge references unknown account");
    if (prev) {
      require(std::tie(prev->a, prev->b) < std::tie(e.a, e.b),
              "edges must be sorted by (a, b) without duplicates");
    }
    prev = &e;
  }
}

std::int64_t EngagementGraph::total_weight() const {
  std::int64_t total = 0;
  for (const Edge& e : edges) total += e.weight;
  return total;
}

EngagementGraph build_engagement_graph(const EngagementEventSet& events) {
  events.validate();
  std::map<std::pair<std::string, std::string>, EngagementGraph::Edge> merged;
  std::set<std::string> account_set;
  for (const EngagementEvent& ev : events.events) {
    const auto key = std::minmax(ev.source, ev.target);
    EngagementGraph::Edge& edge = merged[key];
    edge.a = key.first;
    edge.b = key.second;
    edge.weight += 1;
    edge.topics.insert(ev.topics.begin(), ev.topics.end());
    edge.net_polarity += ev.polarity;
    account_set.insert(ev.source);
    account_set.insert(ev.target);
  }
  EngagementGraph graph;
  graph.accounts.assign(account_set.begin(), account_set.end());
  graph.edges.reserve(merged.size());
  for (auto& [key, edge] : merged) graph.edges.push_back(std::move(edge));
  return graph;
}

EngagementGraph filter_by_topic_sentiment(const EngagementGraph& graph,
                                          const std::string& topic,
                                          int polarity) {
  graph.validate();
  require(polarity >= -1 && polarity <= 1, "polarity must be -1, 0 or +1");
  EngagementGraph out;
  std::set<std::string> kept;
  for (const EngagementGraph::Edge& e : graph.edges) {
    if (e.topics.count(topic) == 0) continue;
    if (polarity_sign(e.net_polarity) != polarity) continue;
    out.edges.push_back(e);
    kept.insert(e.a);
    kept.insert(e.b);
  }
  out.accounts.assign(kept.begin(), kept.end());
  return out;
}

double weighted_modularity(const EngagementGraph& graph,
                           const std::map<std::string, int>& assignment) {
  require(!graph.accounts.empty(), "modularity of an empty graph");
  const double two_m = 2.0 * static_cast<double>(graph.total_weight());
  if (two_m == 0.0) return 0.0;

  int communities = 0;
  for (const std::string& account : graph.accounts) {
    const auto it = assignment.find(account);
    require(it != assignment.end(),
            "assignment is missing account '" + account + "'");
    communities = std::max(communities, it->second + 1);
  }
  std::vector<double> internal(static_cast<std::size_t>(communities), 0.0);
  std::vector<double> total(static_cast<std::size_t>(communities), 0.0);
  for (const EngagementGraph::Edge& e : graph.edges) {
    const int ca = assignment.at(e.a);
    const int cb = assignment.at(e.b);
    const double w = static_cast<double>(e.weight);
    if (ca == cb) internal[static_cast<std::size_t>(ca)] += w;
    total[static_cast<std::size_t>(ca)] += w;
    total[static_cast<std::size_t>(cb)] += w;
  }
  double q = 0.0;
  for (int c = 0; c < communities; ++c) {
    q += 2.0 * internal[static_cast<std::size_t>(c)] / two_m -
         (total[static_cast<std::size_t>(c)] / two_m) *
             (total[static_cast<std::size_t>(c)] / two_m);
  }
  return q;
}

CommunityPartition detect_communities(const EngagementGraph& graph) {
  graph.validate();
  require(!graph.accounts.empty(), "community detection on an empty graph");

  const int n = static_cast<int>(graph.accounts.size());
  LevelGraph level;
  level.adjacency.resize(static_cast<std::size_t>(n));
  level.loop.assign(static_cast<std::size_t>(n), 0.0);
  std::map<std::string, int> index;
  for (int i = 0; i < n; ++i) index[graph.accounts[static_cast<std::size_t>(i)]] = i;
  for (const EngagementGraph::Edge& e : graph.edges) {
    const int a = index.at(e.a);
    const int b = index.at(e.b);
    const double w = static_cast<double>(e.weight);
    level.adjacency[static_cast<std::size_t>(a)].push_back({b, w});
    level.adjacency[static_cast<std::size_t>(b)].push_back({a, w});
    level.two_m += 2.0 * w;
  }

  // node -> community through all levels so far
  std::vector<int> assignment(static_cast<std::size_t>(n));
  std::iota(assignment.begin(), assignment.end(), 0);

  while (true) {
    std::vector<int> community = local_moves(level);
    const int count = renumber(community);
    if (count == level.size()) break;  // fixed point: nothing merged
    for (int i = 0; i < n; ++i) {
      assignment[static_cast<std::size_t>(i)] =
          community[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)])];
    }
    level = aggregate(level, community, count);
  }

  const int count = renumber(assignment);
  CommunityPartition part;
  part.community_sizes.assign(static_cast<std::size_t>(count), 0);
  for (int i = 0; i < n; ++i) {
    part.assignment[graph.accounts[static_cast<std::size_t>(i)]] =
        assignment[static_cast<std::size_t>(i)];
    part.community_sizes[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)])]++;
  }
  part.modularity = weighted_modularity(graph, part.assignment);
  return part;
}

void CommunityPartition::validate() const {
  int total = 0;
  for (int size : community_sizes) {
    require(size >= 1, "empty community in partition");
    total += size;
  }
  require(total == static_cast<int>(assignment.size()),
          "community sizes do not sum to the account count");
  for (const auto& [account, c] : assignment) {
    require(c >= 0 && c < static_cast<int>(community_sizes.size()),
            "community id out of range for account '" + account + "'");
  }
}

TopicReport topic_report(const EngagementEventSet& events,
                         const std::vector<std::string>& topics,
                         int polarity) {
  const EngagementGraph graph = build_engagement_graph(events);
  std::vector<std::string> unique_topics(topics);
  std::sort(unique_topics.begin(), unique_topics.end());
  unique_topics.erase(
      std::unique(unique_topics.begin(), unique_topics.end()),
      unique_topics.end());

  std::vector<TopicStats> stats(unique_topics.size());
  parallel_for(static_cast<std::ptrdiff_t>(unique_topics.size()),
               [&](std::ptrdiff_t t) {
                 const EngagementGraph filtered = filter_by_topic_sentiment(
                     graph, unique_topics[static_cast<std::size_t>(t)], polarity);
                 TopicStats& s = stats[static_cast<std::size_t>(t)];
                 s.accounts_involved =
                     static_cast<int>(filtered.accounts.size());
                 if (filtered.accounts.empty()) return;
                 const CommunityPartition part = detect_communities(filtered);
                 for (int size : part.community_sizes) {
                   if (size >= 2) s.community_count++;
                 }
               });

  TopicReport report;
  for (std::size_t t = 0; t < unique_topics.size(); ++t) {
    report[unique_topics[t]] = stats[t];
  }
  return report;
}

std::vector<RankedTopic> rank_figures(const TopicReport& report) {
  require(!report.empty(), "ranking needs a non-empty report");
  std::vector<RankedTopic> ranked;
  ranked.reserve(report.size());
  for (const auto& [topic, stats] : report) {
    ranked.push_back({topic, stats.community_count, stats.accounts_involved});
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const RankedTopic& x, const RankedTopic& y) {
              if (x.community_count != y.community_count)
                return x.community_count > y.community_count;
              if (x.accounts_involved != y.accounts_involved)
                return x.accounts_involved > y.accounts_involved;
              return x.topic < y.topic;
            });
  return ranked;
}

}  // namespace crunch
