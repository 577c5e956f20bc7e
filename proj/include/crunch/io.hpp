#pragma once

#include <string>

#include "crunch/community.hpp"
#include "crunch/data.hpp"
#include "crunch/sentiment.hpp"
#include "crunch/taxonomy.hpp"

namespace crunch {

// All operations are pure functions between bytes and domain values; every
// parse error throws before any value escapes, and every emitter is
// byte-deterministic for equal inputs.

// GeoJSON subset: FeatureCollection of Polygon/MultiPolygon features with
// required properties `id` (string) and `statistic` (number >= 0). Ring
// orientation is normalized on parse: outer rings counterclockwise, holes
// clockwise.
RegionSet parse_regions(const std::string& text);
std::string emit_regions(const RegionSet& regions);

// CSV with a header row of labels and a numeric body, `.` decimal separator.
SeriesEnsemble parse_series(const std::string& text);

// JSON lines, one object per line: {"actor","topic","polarity"}. Duplicate
// (actor, topic) polarities aggregate by summation.
SentimentRecordSet parse_sentiment_records(const std::string& text);

// JSON lines: {"source","target","kind","topics","polarity","timestamp"}.
EngagementEventSet parse_engagement_events(const std::string& text);

// SVG 1.1 renderings. Signed-graph edges follow the sign-color convention:
// blue positive, red negative, black neutral.
std::string emit_svg(const RegionSet& regions);
std::string emit_svg(const Tree& tree);
std::string emit_svg(const SignedGraph& graph);

enum class TreeFormat { newick, dot };

// Newick roots the tree at the midpoint of its longest edge; DOT emits an
// undirected graph with edge weights as labels.
std::string emit_tree(const Tree& tree, TreeFormat format);

// DOT rendering of a partitioned engagement graph, nodes colored by
// community.
std::string emit_partition_dot(const EngagementGraph& graph,
                               const CommunityPartition& partition);

// Whole-file helpers shared by the pipelines and the command line.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace crunch
