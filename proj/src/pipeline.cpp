#include "crunch/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "crunch/cartogram.hpp"
#include "crunch/community.hpp"
#include "crunch/error.hpp"
#include "crunch/io.hpp"
#include "crunch/sentiment.hpp"
#include "crunch/taxonomy.hpp"

namespace crunch {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

// Attaches "<pipeline>/<stage>:" to any module error so a failing run names
// where it died, preserving the error kind for the exit-code mapping.
template <class Fn>
auto stage(PipelineKind kind, const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(to_string(kind)) + "/" + name + ": " +
                              e.what());
  }
}

std::string sanitize(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (const char c : name) {
    out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  }
  return out;
}

json matrix_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

struct Artifacts {
  std::map<std::string, std::string> files;  // name -> bytes
  json diagnostics;
};

Artifacts run_cartogram(const PipelineConfig& config, const std::string& text) {
  const PipelineKind kind = config.pipeline;
  const RegionSet regions =
      stage(kind, "parse", [&] { return parse_regions(text); });

  GridSpec spec;
  spec.nx = config.grid;
  spec.ny = config.grid;
  spec.bbox = regions.bounds();
  spec.pad_factor = config.pad_factor;
  const DensityGrid density =
      stage(kind, "rasterize", [&] { return rasterize_density(regions, spec); });

  DiffusionStats stats;
  const DisplacementField field = stage(kind, "solve", [&] {
    return solve_displacement(density, config.tolerance, &stats);
  });
  const RegionSet mapped =
      stage(kind, "transform", [&] { return transform_regions(regions, field); });
  const AreaErrorReport errors =
      stage(kind, "report", [&] { return area_error(regions, mapped); });

  Artifacts out;
  stage(kind, "emit", [&] {
    out.files["cartogram.geojson"] = emit_regions(mapped);
    out.files["cartogram.svg"] = emit_svg(mapped);
    json per = json::object();
    for (const auto& [id, err] : errors.per_region) per[id] = err;
    const json area_report = {{"max_err", errors.max_err},
                              {"mean_err", errors.mean_err},
                              {"per_region", std::move(per)}};
    out.files["area_report.json"] = area_report.dump(2) + "\n";
    return 0;
  });

  const Bounds dom = spec.padded();
  out.diagnostics = {
      {"residual", stats.residual},
      {"checkpoints", stats.checkpoints},
      {"substeps", stats.substeps},
      {"max_err", errors.max_err},
      {"mean_err", errors.mean_err},
      {"area_conservation",
       total_transformed_area(field) / (dom.width() * dom.height())},
      {"fold_overs", fold_over_count(field)},
  };
  return out;
}

Artifacts run_taxonomy(const PipelineConfig& config, const std::string& text) {
  const PipelineKind kind = config.pipeline;
  const SeriesEnsemble raw =
      stage(kind, "parse", [&] { return parse_series(text); });

  SeriesEnsemble working = raw;
  if (config.prices) {
    working = stage(kind, "log-returns", [&] {
      SeriesEnsemble returns;
      returns.labels = raw.labels;
      returns.samples.resize(raw.samples.rows() - 1, raw.samples.cols());
      for (Eigen::Index j = 0; j < raw.samples.cols(); ++j) {
        returns.samples.col(j) = log_returns(raw.samples.col(j));
      }
      returns.validate();
      return returns;
    });
  }

  const CorrelationMatrix corr =
      stage(kind, "correlate", [&] { return correlation(working); });
  const DistanceMatrix dist =
      stage(kind, "distance", [&] { return ultrametric_distance(corr); });
  const Tree tree =
      stage(kind, "tree", [&] { return minimum_spanning_tree(dist); });

  Artifacts out;
  json tail;
  stage(kind, "emit", [&] {
    out.files["tree.nwk"] = emit_tree(tree, TreeFormat::newick) + "\n";
    out.files["tree.dot"] = emit_tree(tree, TreeFormat::dot);
    const json corr_doc = {{"labels", corr.labels},
                           {"correlation", matrix_rows(corr.c)},
                           {"distance", matrix_rows(dist.d)}};
    out.files["correlation.json"] = corr_doc.dump(2) + "\n";
    return 0;
  });

  if (config.prices) {
    // Heavy-tail check runs on the pooled magnitudes of all returns.
    const Eigen::VectorXd pooled =
        Eigen::Map<const Eigen::VectorXd>(working.samples.data(),
                                          working.samples.size())
            .cwiseAbs();
    const Eigen::Index positives =
        (pooled.array() > 0.0).count();
    const Eigen::Index k = config.tail_order > 0
                               ? config.tail_order
                               : default_tail_order(pooled.size());
    if (pooled.size() >= 50 && k >= 1 && k < positives) {
      const TailFit fit =
          stage(kind, "tail", [&] { return tail_exponent(pooled, k); });
      tail = {{"alpha", fit.alpha},
              {"k", fit.k},
              {"xmin", fit.xmin},
              {"ks_stat", fit.ks_stat}};
      out.files["tail.json"] = tail.dump(2) + "\n";
    } else {
      tail = {{"skipped",
               "tail fit needs >= 50 pooled returns and a valid order count"}};
    }
  } else {
    tail = {{"skipped", "feature-vector mode carries no return tails"}};
  }

  out.diagnostics = {
      {"series", static_cast<std::int64_t>(raw.labels.size())},
      {"observations", raw.samples.rows()},
      {"mode", config.prices ? "prices" : "features"},
      {"tree_total_weight", tree.total_weight()},
      {"tail", std::move(tail)},
  };
  return out;
}

Artifacts run_sentiment(const PipelineConfig& config, const std::string& text) {
  const PipelineKind kind = config.pipeline;
  const SentimentRecordSet records =
      stage(kind, "parse", [&] { return parse_sentiment_records(text); });
  const SentimentMatrix matrix =
      stage(kind, "matrix", [&] { return build_matrix(records); });
  const SignedGraph graph =
      stage(kind, "graph", [&] { return sentiment_graph(matrix); });

  Artifacts out;
  std::int64_t positive = 0, negative = 0, neutral = 0;
  for (const SignedGraph::Edge& e : graph.edges) {
    if (e.sign > 0) ++positive;
    else if (e.sign < 0) ++negative;
    else ++neutral;
  }
  stage(kind, "emit", [&] {
    json edges = json::array();
    for (const SignedGraph::Edge& e : graph.edges) {
      edges.push_back(
          {{"a", e.a}, {"b", e.b}, {"weight", e.weight}, {"sign", e.sign}});
    }
    const json graph_doc = {{"actors", graph.actors},
                            {"edges", std::move(edges)}};
    out.files["graph.json"] = graph_doc.dump(2) + "\n";
    out.files["graph.svg"] = emit_svg(graph);
    return 0;
  });

  out.diagnostics = {
      {"actors", static_cast<std::int64_t>(graph.actors.size())},
      {"topics", static_cast<std::int64_t>(matrix.topics.size())},
      {"edges", static_cast<std::int64_t>(graph.edges.size())},
      {"positive", positive},
      {"negative", negative},
      {"neutral", neutral},
  };
  return out;
}

Artifacts run_community(const PipelineConfig& config, const std::string& text) {
  const PipelineKind kind = config.pipeline;
  const EngagementEventSet events =
      stage(kind, "parse", [&] { return parse_engagement_events(text); });

  std::vector<std::string> topics = config.topics;
  if (topics.empty()) {
    std::set<std::string> seen;
    for (const EngagementEvent& ev : events.events) {
      seen.insert(ev.topics.begin(), ev.topics.end());
    }
    topics.assign(seen.begin(), seen.end());
  }

  const TopicReport report = stage(kind, "report", [&] {
    return topic_report(events, topics, config.polarity);
  });

  Artifacts out;
  const EngagementGraph full = stage(
      kind, "graph", [&] { return build_engagement_graph(events); });

  stage(kind, "emit", [&] {
    json report_doc = json::object();
    for (const auto& [topic, stats] : report) {
      report_doc[topic] = {{"community_count", stats.community_count},
                           {"accounts_involved", stats.accounts_involved}};
    }
    out.files["report.json"] = report_doc.dump(2) + "\n";

    json ranking_doc = json::array();
    if (!report.empty()) {
      for (const RankedTopic& entry : rank_figures(report)) {
        ranking_doc.push_back({{"topic", entry.topic},
                               {"community_count", entry.community_count},
                               {"accounts_involved", entry.accounts_involved}});
      }
    }
    out.files["ranking.json"] = ranking_doc.dump(2) + "\n";

    int index = 0;
    for (const auto& [topic, stats] : report) {
      const EngagementGraph filtered =
          filter_by_topic_sentiment(full, topic, config.polarity);
      if (!filtered.accounts.empty()) {
        const CommunityPartition partition = detect_communities(filtered);
        char prefix[24];
        std::snprintf(prefix, sizeof(prefix), "partition_%03d_", index);
        out.files[prefix + sanitize(topic) + ".dot"] =
            emit_partition_dot(filtered, partition);
      }
      ++index;
    }
    return 0;
  });

  out.diagnostics = {
      {"events", static_cast<std::int64_t>(events.events.size())},
      {"accounts", static_cast<std::int64_t>(full.accounts.size())},
      {"edges", static_cast<std::int64_t>(full.edges.size())},
      {"topics", static_cast<std::int64_t>(report.size())},
      {"polarity", config.polarity},
  };
  return out;
}

json parameters_json(const PipelineConfig& config) {
  switch (config.pipeline) {
    case PipelineKind::cartogram:
      return {{"grid", config.grid},
              {"tolerance", config.tolerance},
              {"pad_factor", config.pad_factor}};
    case PipelineKind::taxonomy:
      return {{"prices", config.prices}, {"tail_order", config.tail_order}};
    case PipelineKind::sentiment:
      return json::object();
    case PipelineKind::community:
      return {{"topics", config.topics}, {"polarity", config.polarity}};
  }
  return json::object();
}

}  // namespace

const char* to_string(PipelineKind kind) {
  switch (kind) {
    case PipelineKind::cartogram:
      return "cartogram";
    case PipelineKind::taxonomy:
      return "taxonomy";
    case PipelineKind::sentiment:
      return "sentiment";
    case PipelineKind::community:
      return "community";
  }
  return "?";
}

void PipelineConfig::validate() const {
  require(!input.empty(), "config requires an input path");
  require(!output_dir.empty(), "config requires an output directory");
  require(grid >= 64 && (grid & (grid - 1)) == 0,
          "grid must be a power of two >= 64");
  require(std::isfinite(tolerance) && tolerance > 0.0 && tolerance < 1.0,
          "tolerance must lie in (0, 1)");
  require(std::isfinite(pad_factor) && pad_factor >= 1.0,
          "pad_factor must be >= 1");
  require(tail_order >= 0, "tail_order must be >= 0");
  require(polarity >= -1 && polarity <= 1, "polarity must be -1, 0, or +1");
  for (const std::string& topic : topics) {
    require(!topic.empty(), "topics must be nonempty strings");
  }
}

PipelineConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("malformed config: ") + e.what());
  }
  require(doc.is_object(), "config must be a JSON object");
  static const std::set<std::string> known = {
      "pipeline", "input",      "output", "grid",     "tolerance",
      "pad_factor", "prices",   "tail_order", "topics", "polarity"};
  for (const auto& item : doc.items()) {
    require(known.count(item.key()) == 1,
            "unknown config key '" + item.key() + "'");
  }

  PipelineConfig config;
  require(doc.contains("pipeline") && doc["pipeline"].is_string(),
          "config needs a 'pipeline' string");
  const std::string name = doc["pipeline"].get<std::string>();
  if (name == "cartogram") {
    config.pipeline = PipelineKind::cartogram;
  } else if (name == "taxonomy") {
    config.pipeline = PipelineKind::taxonomy;
  } else if (name == "sentiment") {
    config.pipeline = PipelineKind::sentiment;
  } else if (name == "community") {
    config.pipeline = PipelineKind::community;
  } else {
    fail("unknown pipeline '" + name + "'");
  }
  require(doc.contains("input") && doc["input"].is_string(),
          "config needs an 'input' path");
  config.input = doc["input"].get<std::string>();
  require(doc.contains("output") && doc["output"].is_string(),
          "config needs an 'output' directory");
  config.output_dir = doc["output"].get<std::string>();

  if (doc.contains("grid")) {
    require(doc["grid"].is_number_integer(), "'grid' must be an integer");
    config.grid = doc["grid"].get<Eigen::Index>();
  }
  if (doc.contains("tolerance")) {
    require(doc["tolerance"].is_number(), "'tolerance' must be a number");
    config.tolerance = doc["tolerance"].get<double>();
  }
  if (doc.contains("pad_factor")) {
    require(doc["pad_factor"].is_number(), "'pad_factor' must be a number");
    config.pad_factor = doc["pad_factor"].get<double>();
  }
  if (doc.contains("prices")) {
    require(doc["prices"].is_boolean(), "'prices' must be a boolean");
    config.prices = doc["prices"].get<bool>();
  }
  if (doc.contains("tail_order")) {
    require(doc["tail_order"].is_number_integer(),
            "'tail_order' must be an integer");
    config.tail_order = doc["tail_order"].get<Eigen::Index>();
  }
  if (doc.contains("topics")) {
    require(doc["topics"].is_array(), "'topics' must be an array of strings");
    for (const json& t : doc["topics"]) {
      require(t.is_string(), "'topics' must be an array of strings");
      config.topics.push_back(t.get<std::string>());
    }
  }
  if (doc.contains("polarity")) {
    require(doc["polarity"].is_number_integer(),
            "'polarity' must be an integer");
    config.polarity = doc["polarity"].get<int>();
  }
  config.validate();
  return config;
}

std::string run(const PipelineConfig& config) {
  config.validate();
  const std::string text = stage(config.pipeline, "read-input",
                                 [&] { return read_file(config.input); });

  Artifacts artifacts;
  switch (config.pipeline) {
    case PipelineKind::cartogram:
      artifacts = run_cartogram(config, text);
      break;
    case PipelineKind::taxonomy:
      artifacts = run_taxonomy(config, text);
      break;
    case PipelineKind::sentiment:
      artifacts = run_sentiment(config, text);
      break;
    case PipelineKind::community:
      artifacts = run_community(config, text);
      break;
  }

  json outputs = json::array();
  for (const auto& [name, bytes] : artifacts.files) outputs.push_back(name);
  outputs.push_back("run_report.json");
  const json report = {
      {"schema_version", kReportSchemaVersion},
      {"pipeline", to_string(config.pipeline)},
      {"input", config.input},
      {"input_digest", "fnv1a64:" + hex64(fnv1a64(text))},
      {"parameters", parameters_json(config)},
      {"outputs", std::move(outputs)},
      {"diagnostics", artifacts.diagnostics},
      {"generated_at", utc_timestamp()},
  };
  const std::string report_bytes = report.dump(2) + "\n";

  // Staging-rename commit: a failed run leaves the output directory
  // untouched and never exposes partial artifacts.
  const fs::path out_dir(config.output_dir);
  const fs::path staging(config.output_dir + ".staging");
  std::error_code ec;
  fs::remove_all(staging, ec);
  const fs::path parent = out_dir.parent_path();
  if (!parent.empty()) fs::create_directories(parent, ec);
  ec.clear();
  fs::create_directories(staging, ec);
  require(!ec && fs::is_directory(staging),
          "cannot create staging directory '" + staging.string() + "'");
  try {
    for (const auto& [name, bytes] : artifacts.files) {
      write_file((staging / name).string(), bytes);
    }
    write_file((staging / "run_report.json").string(), report_bytes);
    if (fs::exists(out_dir)) {
      require(fs::is_directory(out_dir),
              "output path '" + config.output_dir + "' is not a directory");
      require(fs::is_empty(out_dir) ||
                  fs::exists(out_dir / "run_report.json"),
              "output directory '" + config.output_dir +
                  "' exists and does not look like pipeline output; refusing "
                  "to replace it");
      fs::remove_all(out_dir);
    }
    fs::rename(staging, out_dir, ec);
    require(!ec, "cannot commit output directory '" + config.output_dir +
                     "': " + ec.message());
  } catch (...) {
    std::error_code cleanup;
    fs::remove_all(staging, cleanup);
    throw;
  }
  return report_bytes;
}

}  // namespace crunch
