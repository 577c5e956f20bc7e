#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "crunch/data.hpp"

namespace crunch {

struct EngagementGraph {
  struct Edge {
    std::string a;  // canonically a < b
    std::string b;
    std::int64_t weight = 0;  // aggregated interaction count, >= 1
    std::set<std::string> topics;
    std::int64_t net_polarity = 0;
  };

  std::vector<std::string> accounts;  // sorted, unique
  std::vector<Edge> edges;            // sorted by (a, b)

  void validate() const;
  std::int64_t total_weight() const;
};

struct CommunityPartition {
  std::map<std::string, int> assignment;  // account -> community id
  double modularity = 0.0;
  std::vector<int> community_sizes;  // indexed by contiguous community id

  void validate() const;
};

struct TopicStats {
  int community_count = 0;     // communities of size >= 2 only
  int accounts_involved = 0;   // accounts in the filtered graph
};

using TopicReport = std::map<std::string, TopicStats>;

struct RankedTopic {
  std::string topic;
  int community_count = 0;
  int accounts_involved = 0;
};

// One undirected edge per account pair with at least one interaction.
EngagementGraph build_engagement_graph(const EngagementEventSet& events);

// Subgraph of edges carrying `topic` whose net polarity sign matches
// `polarity`; accounts left isolated are dropped.
EngagementGraph filter_by_topic_sentiment(const EngagementGraph& graph,
                                          const std::string& topic,
                                          int polarity);

// Greedy weighted-modularity maximization (local moves + aggregation to a
// fixed point) with deterministic processing order.
CommunityPartition detect_communities(const EngagementGraph& graph);

// Standard weighted modularity of an assignment, resolution 1.0.
double weighted_modularity(const EngagementGraph& graph,
                           const std::map<std::string, int>& assignment);

// Per topic: filter, detect, count multi-member communities and the
// accounts involved with the topic at that polarity.
TopicReport topic_report(const EngagementEventSet& events,
                         const std::vector<std::string>& topics, int polarity);

// Topics by community count desc, accounts desc, name asc.
std::vector<RankedTopic> rank_figures(const TopicReport& report);

}  // namespace crunch
