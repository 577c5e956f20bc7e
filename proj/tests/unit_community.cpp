#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "crunch/community.hpp"
#include "crunch/error.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace crunch;
using testing::best_modularity_exhaustive;
using testing::oracle_modularity;

namespace {

template <class Fn>
std::string error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  FAIL("expected an error");
  return {};
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

EngagementEvent reply(const std::string& source, const std::string& target,
                      std::vector<std::string> topics = {}, int polarity = 0) {
  EngagementEvent ev;
  ev.source = source;
  ev.target = target;
  ev.kind = EngagementKind::reply;
  ev.topics = std::move(topics);
  ev.polarity = polarity;
  return ev;
}

// Builds a weighted undirected graph over accounts "n00".."nXX" from index
// edges; names are zero-padded so lexicographic account order matches index
// order.
EngagementGraph index_graph(
    int n, const std::vector<std::tuple<int, int, int>>& edges) {
  const auto name = [](int i) {
    return "n" + std::string(i < 10 ? "0" : "") + std::to_string(i);
  };
  EngagementEventSet events;
  for (const auto& [a, b, w] : edges) {
    for (int k = 0; k < w; ++k) events.events.push_back(reply(name(a), name(b)));
  }
  EngagementGraph graph = build_engagement_graph(events);
  // Isolated indices still count as accounts for detection fixtures.
  for (int i = 0; i < n; ++i) {
    if (!std::binary_search(graph.accounts.begin(), graph.accounts.end(),
                            name(i))) {
      graph.accounts.push_back(name(i));
    }
  }
  std::sort(graph.accounts.begin(), graph.accounts.end());
  return graph;
}

}  // namespace

TEST_CASE("build_engagement_graph on no events is the empty graph") {
  const EngagementGraph graph = build_engagement_graph(EngagementEventSet{});
  CHECK(graph.accounts.empty());
  CHECK(graph.edges.empty());
  CHECK(graph.total_weight() == 0);
}

TEST_CASE("build_engagement_graph merges directions, topics and polarity") {
  EngagementEventSet events;
  events.events.push_back(reply("bob", "amy", {"tax"}, 1));
  events.events.push_back(reply("amy", "bob", {"vat"}, 1));
  events.events.push_back(reply("bob", "amy", {"tax"}, -1));
  events.events.push_back(reply("amy", "cat", {}, 0));
  const EngagementGraph graph = build_engagement_graph(events);
  CHECK_NOTHROW(graph.validate());
  REQUIRE(graph.accounts == std::vector<std::string>{"amy", "bob", "cat"});
  REQUIRE(graph.edges.size() == 2);

  const EngagementGraph::Edge& ab = graph.edges[0];
  CHECK(ab.a == "amy");
  CHECK(ab.b == "bob");
  CHECK(ab.weight == 3);
  CHECK(ab.topics == std::set<std::string>{"tax", "vat"});
  CHECK(ab.net_polarity == 1);

  const EngagementGraph::Edge& ac = graph.edges[1];
  CHECK(ac.a == "amy");
  CHECK(ac.b == "cat");
  CHECK(ac.weight == 1);
  CHECK(ac.topics.empty());
  CHECK(graph.total_weight() == 4);
}

TEST_CASE("engagement events reject self-loops and wild polarity") {
  EngagementEventSet events;
  events.events.push_back(reply("amy", "amy"));
  const std::string msg =
      error_of([&] { build_engagement_graph(events); });
  INFO(msg);
  CHECK(contains(msg, "self-loop"));
  CHECK(contains(msg, "amy"));

  EngagementEventSet wild;
  wild.events.push_back(reply("a", "b"));
  wild.events.back().polarity = 2;
  CHECK_THROWS_AS(build_engagement_graph(wild), Error);
}

TEST_CASE("filter_by_topic_sentiment keeps matching edges, drops isolates") {
  EngagementEventSet events;
  events.events.push_back(reply("a", "b", {"tax"}, 1));
  events.events.push_back(reply("c", "d", {"tax"}, 1));
  events.events.push_back(reply("a", "c", {"tax"}, -1));
  events.events.push_back(reply("b", "d", {"vat"}, 1));
  events.events.push_back(reply("d", "e", {"tax"}, 1));
  events.events.push_back(reply("d", "e", {"tax"}, -1));  // nets to 0
  events.events.push_back(reply("e", "f", {}, 1));
  const EngagementGraph graph = build_engagement_graph(events);

  const EngagementGraph positive = filter_by_topic_sentiment(graph, "tax", 1);
  CHECK_NOTHROW(positive.validate());
  CHECK(positive.accounts == std::vector<std::string>{"a", "b", "c", "d"});
  REQUIRE(positive.edges.size() == 2);
  CHECK(positive.edges[0].a == "a");
  CHECK(positive.edges[0].b == "b");
  CHECK(positive.edges[1].a == "c");
  CHECK(positive.edges[1].b == "d");

  const EngagementGraph negative = filter_by_topic_sentiment(graph, "tax", -1);
  REQUIRE(negative.edges.size() == 1);
  CHECK(negative.edges[0].a == "a");
  CHECK(negative.edges[0].b == "c");

  const EngagementGraph neutral = filter_by_topic_sentiment(graph, "tax", 0);
  REQUIRE(neutral.edges.size() == 1);
  CHECK(neutral.edges[0].a == "d");
  CHECK(neutral.edges[0].b == "e");

  CHECK(filter_by_topic_sentiment(graph, "energy", 1).accounts.empty());
  CHECK_THROWS_AS(filter_by_topic_sentiment(graph, "tax", 2), Error);
}

TEST_CASE("detect_communities merges a single edge into one community") {
  const EngagementGraph graph = index_graph(2, {{0, 1, 1}});
  const CommunityPartition part = detect_communities(graph);
  CHECK_NOTHROW(part.validate());
  CHECK(part.community_sizes == std::vector<int>{2});
  CHECK(part.assignment.at("n00") == part.assignment.at("n01"));
  CHECK(part.modularity == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("detect_communities splits two triangles over a weak bridge") {
  const EngagementGraph graph = index_graph(6, {{0, 1, 1},
                                                {0, 2, 1},
                                                {1, 2, 1},
                                                {3, 4, 1},
                                                {3, 5, 1},
                                                {4, 5, 1},
                                                {2, 3, 1}});
  const CommunityPartition part = detect_communities(graph);
  CHECK(part.community_sizes.size() == 2);
  CHECK(part.community_sizes == std::vector<int>{3, 3});
  CHECK(part.assignment.at("n00") == part.assignment.at("n01"));
  CHECK(part.assignment.at("n00") == part.assignment.at("n02"));
  CHECK(part.assignment.at("n03") == part.assignment.at("n04"));
  CHECK(part.assignment.at("n03") == part.assignment.at("n05"));
  CHECK(part.assignment.at("n00") != part.assignment.at("n03"));
}

TEST_CASE("detect_communities reaches the exhaustive optimum") {
  const auto check_optimal =
      [](int n, const std::vector<std::tuple<int, int, int>>& edges) {
        const EngagementGraph graph = index_graph(n, edges);
        const CommunityPartition part = detect_communities(graph);
        CHECK_NOTHROW(part.validate());
        const double best = best_modularity_exhaustive(n, edges);
        CHECK(part.modularity == doctest::Approx(best).epsilon(1e-9));
        // The reported score must equal the public scorer on the reported
        // assignment, not just the best score.
        CHECK(part.modularity ==
              doctest::Approx(weighted_modularity(graph, part.assignment))
                  .epsilon(1e-12));
      };

  SUBCASE("two triangles with a bridge") {
    check_optimal(6, {{0, 1, 1},
                      {0, 2, 1},
                      {1, 2, 1},
                      {3, 4, 1},
                      {3, 5, 1},
                      {4, 5, 1},
                      {2, 3, 1}});
  }
  SUBCASE("path of five nodes") {
    check_optimal(5, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 4, 1}});
  }
  SUBCASE("star of five leaves") {
    check_optimal(6, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {0, 4, 1}, {0, 5, 1}});
  }
  SUBCASE("weighted barbell") {
    check_optimal(6, {{0, 1, 3},
                      {0, 2, 3},
                      {1, 2, 3},
                      {3, 4, 3},
                      {3, 5, 3},
                      {4, 5, 3},
                      {2, 3, 2}});
  }
  SUBCASE("two planted five-cliques") {
    std::vector<std::tuple<int, int, int>> edges;
    for (int a = 0; a < 5; ++a)
      for (int b = a + 1; b < 5; ++b) {
        edges.push_back({a, b, 1});
        edges.push_back({a + 5, b + 5, 1});
      }
    edges.push_back({4, 5, 1});
    check_optimal(10, edges);

    const EngagementGraph graph = index_graph(10, edges);
    const CommunityPartition part = detect_communities(graph);
    CHECK(part.community_sizes == std::vector<int>{5, 5});
    CHECK(part.modularity == doctest::Approx(19.0 / 42.0).epsilon(1e-12));
  }
}

TEST_CASE("detect_communities keeps disconnected components apart") {
  const EngagementGraph graph =
      index_graph(4, {{0, 1, 5}, {2, 3, 5}});
  const CommunityPartition part = detect_communities(graph);
  CHECK(part.community_sizes == std::vector<int>{2, 2});
  CHECK(part.assignment.at("n00") != part.assignment.at("n02"));
}

TEST_CASE("detect_communities is invariant under account renaming") {
  EngagementEventSet plain, renamed;
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"a", "b"}, {"b", "c"}, {"a", "c"}, {"d", "e"}, {"e", "f"},
      {"d", "f"}, {"c", "d"}};
  // Reverse-alphabet renaming flips the processing order of every account.
  const auto flip = [](const std::string& s) {
    std::string out = s;
    for (char& ch : out) ch = static_cast<char>('a' + ('f' - ch));
    return out;
  };
  for (const auto& [s, t] : pairs) {
    plain.events.push_back(reply(s, t));
    renamed.events.push_back(reply(flip(s), flip(t)));
  }
  const CommunityPartition p1 =
      detect_communities(build_engagement_graph(plain));
  const CommunityPartition p2 =
      detect_communities(build_engagement_graph(renamed));
  CHECK(p1.modularity == doctest::Approx(p2.modularity).epsilon(1e-15));
  std::vector<int> s1 = p1.community_sizes;
  std::vector<int> s2 = p2.community_sizes;
  std::sort(s1.begin(), s1.end());
  std::sort(s2.begin(), s2.end());
  CHECK(s1 == s2);
  // The mirror of each community is a community of the renamed graph.
  for (const auto& [account, c] : p1.assignment) {
    for (const auto& [other, d] : p1.assignment) {
      CHECK((c == d) ==
            (p2.assignment.at(flip(account)) == p2.assignment.at(flip(other))));
    }
  }
}

TEST_CASE("weighted_modularity anchor values") {
  const EngagementGraph graph =
      index_graph(3, {{0, 1, 2}, {1, 2, 1}});
  // Everyone together: Q is exactly zero.
  CHECK(weighted_modularity(graph, {{"n00", 0}, {"n01", 0}, {"n02", 0}}) ==
        0.0);
  // All singletons: Q = -sum (k_i / 2m)^2 = -(4 + 9 + 1) / 36.
  CHECK(weighted_modularity(graph, {{"n00", 0}, {"n01", 1}, {"n02", 2}}) ==
        doctest::Approx(-14.0 / 36.0).epsilon(1e-15));
  // Heavy pair together: Q = 2/3 - (3/6)^2 - ... oracle cross-check instead.
  const std::map<std::string, int> split = {{"n00", 0}, {"n01", 0}, {"n02", 1}};
  CHECK(weighted_modularity(graph, split) ==
        doctest::Approx(oracle_modularity(3, {{0, 1, 2}, {1, 2, 1}},
                                          {0, 0, 1}))
            .epsilon(1e-15));

  const std::string msg = error_of(
      [&] { weighted_modularity(graph, {{"n00", 0}, {"n01", 0}}); });
  INFO(msg);
  CHECK(contains(msg, "n02"));
  CHECK_THROWS_AS(weighted_modularity(EngagementGraph{}, {}), Error);
}

TEST_CASE("detect_communities rejects an empty graph") {
  CHECK_THROWS_AS(detect_communities(EngagementGraph{}), Error);
}

TEST_CASE("topic_report counts multi-member communities per topic") {
  EngagementEventSet events;
  // "tax" positive: two separate pairs -> 2 communities, 4 accounts.
  events.events.push_back(reply("a", "b", {"tax"}, 1));
  events.events.push_back(reply("c", "d", {"tax"}, 1));
  // "vat" only negative, on a pair with no other traffic (net polarity is
  // aggregated per pair) -> empty at polarity +1.
  events.events.push_back(reply("e", "f", {"vat"}, -1));
  // "rent" positive: one triangle -> 1 community, 3 accounts.
  events.events.push_back(reply("a", "b", {"rent"}, 1));
  events.events.push_back(reply("b", "c", {"rent"}, 1));
  events.events.push_back(reply("a", "c", {"rent"}, 1));

  const TopicReport report =
      topic_report(events, {"tax", "vat", "rent", "tax"}, 1);
  REQUIRE(report.size() == 3);  // duplicate "tax" collapses

  CHECK(report.at("tax").community_count == 2);
  CHECK(report.at("tax").accounts_involved == 4);
  CHECK(report.at("vat").community_count == 0);
  CHECK(report.at("vat").accounts_involved == 0);
  CHECK(report.at("rent").community_count == 1);
  CHECK(report.at("rent").accounts_involved == 3);

  // Same events at polarity -1 see only the vat edge.
  const TopicReport flipped = topic_report(events, {"tax", "vat"}, -1);
  CHECK(flipped.at("tax").community_count == 0);
  CHECK(flipped.at("vat").community_count == 1);
  CHECK(flipped.at("vat").accounts_involved == 2);
}

TEST_CASE("rank_figures orders by communities, then reach, then name") {
  TopicReport report;
  report["delta"] = {2, 10};
  report["alpha"] = {2, 10};   // full tie with delta: name breaks it
  report["bravo"] = {2, 12};   // same communities, more accounts
  report["echo"] = {5, 3};     // most communities wins outright
  report["carol"] = {0, 0};
  const std::vector<RankedTopic> ranked = rank_figures(report);
  REQUIRE(ranked.size() == 5);
  CHECK(ranked[0].topic == "echo");
  CHECK(ranked[1].topic == "bravo");
  CHECK(ranked[2].topic == "alpha");
  CHECK(ranked[3].topic == "delta");
  CHECK(ranked[4].topic == "carol");

  CHECK_THROWS_AS(rank_figures(TopicReport{}), Error);
}
