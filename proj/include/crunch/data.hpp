#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "crunch/geometry.hpp"

namespace crunch {

// ---------------------------------------------------------------------------
// Map regions

struct Region {
  std::string id;
  // Orientation is normalized at parse time: outer rings counterclockwise,
  // holes clockwise, so the signed ring areas sum to the region's net area.
  std::vector<Ring> rings;
  double statistic = 0.0;

  double area() const {
    double a = 0.0;
    for (const Ring& ring : rings) a += ring_signed_area(ring);
    return std::abs(a);
  }
  bool contains(const Point& p) const { return point_in_rings(p, rings); }
};

struct RegionSet {
  std::vector<Region> regions;

  Bounds bounds() const;
  void validate() const;
};

// ---------------------------------------------------------------------------
// Labeled equal-length sample vectors (one column per label)

struct SeriesEnsemble {
  std::vector<std::string> labels;
  Eigen::MatrixXd samples;  // rows = observations, cols = labels

  void validate() const;
};

// ---------------------------------------------------------------------------
// Actor/topic polarity records (aggregated: one record per pair)

struct SentimentRecord {
  std::string actor;
  std::string topic;
  double polarity = 0.0;
};

struct SentimentRecordSet {
  std::vector<SentimentRecord> records;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Conversation events between accounts

enum class EngagementKind { reply, quote, retweet };

const char* to_string(EngagementKind kind);

struct EngagementEvent {
  std::string source;
  std::string target;
  EngagementKind kind = EngagementKind::reply;
  std::vector<std::string> topics;
  int polarity = 0;  // -1, 0, +1
  std::int64_t timestamp = 0;
};

struct EngagementEventSet {
  std::vector<EngagementEvent> events;

  void validate() const;
};

}  // namespace crunch
