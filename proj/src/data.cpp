#include "crunch/data.hpp"

#include <cmath>
#include <set>

#include "crunch/error.hpp"

namespace crunch {

Bounds RegionSet::bounds() const {
  require(!regions.empty(), "region set is empty");
  Bounds b = Bounds::around(regions.front().rings.front().front());
  for (const Region& r : regions) {
    for (const Ring& ring : r.rings) {
      for (const Point& p : ring) b.expand(p);
    }
  }
  return b;
}

void RegionSet::validate() const {
  require(!regions.empty(), "region set is empty");
  std::set<std::string> seen;
  bool any_positive = false;
  for (const Region& r : regions) {
    require(!r.id.empty(), "region with empty id");
    require(seen.insert(r.id).second, "duplicate region id '" + r.id + "'");
    require(std::isfinite(r.statistic) && r.statistic >= 0.0,
            "region '" + r.id + "' has a negative or non-finite statistic");
    any_positive = any_positive || r.statistic > 0.0;
    require(!r.rings.empty(), "region '" + r.id + "' has no rings");
    for (const Ring& ring : r.rings) {
      require(ring.size() >= 4, "region '" + r.id +
                                    "' has a ring with fewer than 4 vertices");
      require(ring.front().x() == ring.back().x() &&
                  ring.front().y() == ring.back().y(),
              "region '" + r.id + "' has an open ring");
      for (const Point& p : ring) {
        require(std::isfinite(p.x()) && std::isfinite(p.y()),
                "region '" + r.id + "' has a non-finite vertex");
      }
      require(ring_signed_area(ring) != 0.0,
              "region '" + r.id + "' has a zero-area ring");
    }
  }
  require(any_positive, "all region statistics are zero");
}

void SeriesEnsemble::validate() const {
  require(!labels.empty(), "series ensemble has no labels");
  require(static_cast<Eigen::Index>(labels.size()) == samples.cols(),
          "label count does not match sample columns");
  require(samples.rows() >= 3, "series need at least 3 observations");
  std::set<std::string> seen;
  for (const std::string& label : labels) {
    require(!label.empty(), "series with empty label");
    require(seen.insert(label).second, "duplicate series label '" + label + "'");
  }
  require(samples.allFinite(), "series contain non-finite values");
}

void SentimentRecordSet::validate() const {
  std::set<std::pair<std::string, std::string>> seen;
  for (const SentimentRecord& rec : records) {
    require(!rec.actor.empty(), "sentiment record with empty actor");
    require(!rec.topic.empty(), "sentiment record with empty topic");
    require(std::isfinite(rec.polarity),
            "non-finite polarity for actor '" + rec.actor + "'");
    require(seen.insert({rec.actor, rec.topic}).second,
            "duplicate (actor, topic) pair ('" + rec.actor + "', '" +
                rec.topic + "') after aggregation");
  }
}

const char* to_string(EngagementKind kind) {
  switch (kind) {
    case EngagementKind::reply:
      return "reply";
    case EngagementKind::quote:
      return "quote";
    case EngagementKind::retweet:
      return "retweet";
  }
  return "?";
}

void EngagementEventSet::validate() const {
  for (const EngagementEvent& ev : events) {
    require(!ev.source.empty() && !ev.target.empty(),
            "engagement event with empty account name");
    require(ev.source != ev.target,
            "self-loop event for account '" + ev.source + "'");
    require(ev.polarity >= -1 && ev.polarity <= 1,
            "event polarity outside {-1, 0, +1}");
  }
}

}  // namespace crunch
