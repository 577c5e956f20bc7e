#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "crunch/error.hpp"
#include "crunch/io.hpp"

namespace crunch {
namespace {

using nlohmann::json;

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail("malformed " + what + ": " + e.what());
  }
}

std::string feature_name(const json& feature, std::size_t index) {
  if (feature.is_object() && feature.contains("properties") &&
      feature["properties"].is_object() &&
      feature["properties"].contains("id") &&
      feature["properties"]["id"].is_string()) {
    return "'" + feature["properties"]["id"].get<std::string>() + "'";
  }
  return "#" + std::to_string(index);
}

Ring parse_ring(const json& coords, const std::string& where) {
  require(coords.is_array() && coords.size() >= 4,
          where + ": ring needs at least 4 positions");
  Ring ring;
  ring.reserve(coords.size());
  for (const json& pos : coords) {
    require(pos.is_array() && pos.size() >= 2 && pos[0].is_number() &&
                pos[1].is_number(),
            where + ": position must be a [x, y] number pair");
    ring.emplace_back(pos[0].get<double>(), pos[1].get<double>());
  }
  require(ring.front().x() == ring.back().x() &&
              ring.front().y() == ring.back().y(),
          where + ": ring is not closed");
  return ring;
}

// Outer rings counterclockwise, holes clockwise; reversal keeps closure.
void orient_polygon(std::vector<Ring>& rings, std::size_t first) {
  for (std::size_t k = first; k < rings.size(); ++k) {
    const bool outer = (k == first);
    const double area = ring_signed_area(rings[k]);
    if ((outer && area < 0.0) || (!outer && area > 0.0)) {
      std::reverse(rings[k].begin(), rings[k].end());
    }
  }
}

// Lines of `text` without terminators; a trailing newline adds no line.
std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    std::string line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = nl + 1;
  }
  return lines;
}

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

const json& json_field(const json& obj, const char* name, std::size_t line) {
  require(obj.contains(name), "line " + std::to_string(line) +
                                  ": missing field '" + name + "'");
  return obj[name];
}

std::string string_field(const json& obj, const char* name, std::size_t line) {
  const json& v = json_field(obj, name, line);
  require(v.is_string() && !v.get<std::string>().empty(),
          "line " + std::to_string(line) + ": field '" + name +
              "' must be a nonempty string");
  return v.get<std::string>();
}

double number_field(const json& obj, const char* name, std::size_t line) {
  const json& v = json_field(obj, name, line);
  require(v.is_number(), "line " + std::to_string(line) + ": field '" + name +
                             "' must be a number");
  const double x = v.get<double>();
  require(std::isfinite(x), "line " + std::to_string(line) + ": field '" +
                                name + "' must be finite");
  return x;
}

}  // namespace

RegionSet parse_regions(const std::string& text) {
  const json doc = parse_json(text, "geo document");
  require(doc.is_object() && doc.value("type", "") == "FeatureCollection",
          "geo document must be a FeatureCollection");
  require(doc.contains("features") && doc["features"].is_array(),
          "geo document must carry a 'features' array");

  RegionSet set;
  std::map<std::string, std::size_t> seen;
  std::size_t index = 0;
  for (const json& feature : doc["features"]) {
    const std::string name = feature_name(feature, index);
    require(feature.is_object() && feature.value("type", "") == "Feature",
            "feature " + name + " must have type 'Feature'");
    require(feature.contains("properties") && feature["properties"].is_object(),
            "feature " + name + " is missing 'properties'");
    const json& props = feature["properties"];
    require(props.contains("id") && props["id"].is_string(),
            "feature " + name + " is missing a string 'id'");

    Region region;
    region.id = props["id"].get<std::string>();
    require(!region.id.empty(), "feature " + name + " has an empty 'id'");
    require(seen.emplace(region.id, index).second,
            "duplicate region id '" + region.id + "'");
    require(props.contains("statistic"),
            "feature '" + region.id + "' is missing 'statistic'");
    require(props["statistic"].is_number(),
            "feature '" + region.id + "' has a non-numeric 'statistic'");
    region.statistic = props["statistic"].get<double>();

    require(feature.contains("geometry") && feature["geometry"].is_object(),
            "feature '" + region.id + "' is missing 'geometry'");
    const json& geom = feature["geometry"];
    const std::string gtype = geom.value("type", "");
    require(geom.contains("coordinates") && geom["coordinates"].is_array(),
            "feature '" + region.id + "' is missing 'coordinates'");
    const json& coords = geom["coordinates"];
    const std::string where = "feature '" + region.id + "'";
    if (gtype == "Polygon") {
      const std::size_t first = region.rings.size();
      for (const json& ring : coords) region.rings.push_back(parse_ring(ring, where));
      orient_polygon(region.rings, first);
    } else if (gtype == "MultiPolygon") {
      for (const json& poly : coords) {
        require(poly.is_array(), where + ": polygon must be an array of rings");
        const std::size_t first = region.rings.size();
        for (const json& ring : poly) region.rings.push_back(parse_ring(ring, where));
        orient_polygon(region.rings, first);
      }
    } else {
      fail(where + " has unsupported geometry type '" + gtype + "'");
    }
    set.regions.push_back(std::move(region));
    ++index;
  }
  set.validate();
  return set;
}

std::string emit_regions(const RegionSet& regions) {
  regions.validate();
  json features = json::array();
  for (const Region& region : regions.regions) {
    // One MultiPolygon per region: parse-side orientation marks the role of
    // each ring, so a flat ring list round-trips through nested polygons.
    json polys = json::array();
    for (const Ring& ring : region.rings) {
      json jring = json::array();
      for (const Point& p : ring) jring.push_back(json::array({p.x(), p.y()}));
      if (ring_signed_area(ring) > 0.0) {
        polys.push_back(json::array({std::move(jring)}));
      } else {
        require(!polys.empty(),
                "region '" + region.id + "' starts with a hole ring");
        polys.back().push_back(std::move(jring));
      }
    }
    features.push_back(
        {{"type", "Feature"},
         {"properties", {{"id", region.id}, {"statistic", region.statistic}}},
         {"geometry",
          {{"type", "MultiPolygon"}, {"coordinates", std::move(polys)}}}});
  }
  const json doc = {{"type", "FeatureCollection"},
                    {"features", std::move(features)}};
  return doc.dump(2) + "\n";
}

SeriesEnsemble parse_series(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  require(!lines.empty(), "series table is empty");
  const std::vector<std::string> labels = split_cells(lines[0]);
  require(!labels.empty() && !labels[0].empty(),
          "series table needs a header row of labels");

  std::vector<std::string> body;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (!trim(lines[i]).empty()) body.push_back(lines[i]);
  }

  SeriesEnsemble ensemble;
  ensemble.labels = labels;
  ensemble.samples.resize(static_cast<Eigen::Index>(body.size()),
                          static_cast<Eigen::Index>(labels.size()));
  for (std::size_t r = 0; r < body.size(); ++r) {
    const std::vector<std::string> cells = split_cells(body[r]);
    require(cells.size() == labels.size(),
            "row " + std::to_string(r + 1) + " has " +
                std::to_string(cells.size()) + " cells, expected " +
                std::to_string(labels.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string& cell = cells[c];
      double value = 0.0;
      const char* begin = cell.data();
      const char* end = begin + cell.size();
      const auto [ptr, ec] = std::from_chars(begin, end, value);
      require(ec == std::errc() && ptr == end && !cell.empty(),
              "row " + std::to_string(r + 1) + ", column '" + labels[c] +
                  "': cell '" + cell + "' is not numeric");
      ensemble.samples(static_cast<Eigen::Index>(r),
                       static_cast<Eigen::Index>(c)) = value;
    }
  }
  ensemble.validate();
  return ensemble;
}

SentimentRecordSet parse_sentiment_records(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  SentimentRecordSet set;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::size_t line = i + 1;
    const json obj =
        parse_json(lines[i], "record on line " + std::to_string(line));
    require(obj.is_object(),
            "line " + std::to_string(line) + ": record must be an object");
    SentimentRecord rec;
    rec.actor = string_field(obj, "actor", line);
    rec.topic = string_field(obj, "topic", line);
    rec.polarity = number_field(obj, "polarity", line);
    const auto key = std::make_pair(rec.actor, rec.topic);
    const auto [it, fresh] = index.emplace(key, set.records.size());
    if (fresh) {
      set.records.push_back(std::move(rec));
    } else {
      set.records[it->second].polarity += rec.polarity;
    }
  }
  set.validate();
  return set;
}

EngagementEventSet parse_engagement_events(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  EngagementEventSet set;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::size_t line = i + 1;
    const json obj =
        parse_json(lines[i], "event on line " + std::to_string(line));
    require(obj.is_object(),
            "line " + std::to_string(line) + ": event must be an object");
    EngagementEvent event;
    event.source = string_field(obj, "source", line);
    event.target = string_field(obj, "target", line);
    require(event.source != event.target,
            "line " + std::to_string(line) + ": event source equals target ('" +
                event.source + "')");

    const std::string kind = string_field(obj, "kind", line);
    if (kind == "reply") {
      event.kind = EngagementKind::reply;
    } else if (kind == "quote") {
      event.kind = EngagementKind::quote;
    } else if (kind == "retweet") {
      event.kind = EngagementKind::retweet;
    } else {
      fail("line " + std::to_string(line) + ": unknown kind '" + kind +
           "' (expected reply|quote|retweet)");
    }

    const json& topics = json_field(obj, "topics", line);
    require(topics.is_array(), "line " + std::to_string(line) +
                                   ": field 'topics' must be an array");
    for (const json& t : topics) {
      require(t.is_string() && !t.get<std::string>().empty(),
              "line " + std::to_string(line) +
                  ": topics must be nonempty strings");
      event.topics.push_back(t.get<std::string>());
    }

    const double polarity = number_field(obj, "polarity", line);
    require(polarity == -1.0 || polarity == 0.0 || polarity == 1.0,
            "line " + std::to_string(line) +
                ": field 'polarity' must be -1, 0, or +1");
    event.polarity = static_cast<int>(polarity);

    const json& ts = json_field(obj, "timestamp", line);
    require(ts.is_number_integer(), "line " + std::to_string(line) +
                                        ": field 'timestamp' must be an "
                                        "integer");
    event.timestamp = ts.get<std::int64_t>();
    set.events.push_back(std::move(event));
  }
  set.validate();
  return set;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  require(!in.bad(), "cannot read file '" + path + "'");
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), "cannot open file '" + path + "' for writing");
  out << content;
  out.flush();
  require(out.good(), "cannot write file '" + path + "'");
}

}  // namespace crunch
