#include <exception>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "crunch/cartogram.hpp"
#include "crunch/data.hpp"
#include "crunch/error.hpp"
#include "crunch/io.hpp"
#include "crunch/parallel.hpp"
#include "crunch/pipeline.hpp"

#ifndef CRUNCH_VERSION
#define CRUNCH_VERSION "0.0.0"
#endif

namespace {

std::string fmt_num(double v) {
  std::ostringstream out;
  out.precision(15);
  out << v;
  return out.str();
}

// Mirrors the command-line flags of one pipeline subcommand onto a
// PipelineConfig, with a config file as the base layer when given.
struct PipelineCli {
  CLI::App* cmd = nullptr;
  crunch::PipelineKind kind = crunch::PipelineKind::cartogram;

  std::string config_path;
  std::string in_path;
  std::string out_path;
  std::int64_t grid = 0;
  double tolerance = 0.0;
  double pad_factor = 0.0;
  bool prices = false;
  std::int64_t tail_order = 0;
  std::vector<std::string> topics;
  int polarity = 0;

  CLI::Option* opt_in = nullptr;
  CLI::Option* opt_out = nullptr;
  CLI::Option* opt_grid = nullptr;
  CLI::Option* opt_tol = nullptr;
  CLI::Option* opt_pad = nullptr;
  CLI::Option* opt_prices = nullptr;
  CLI::Option* opt_tail = nullptr;
  CLI::Option* opt_topics = nullptr;
  CLI::Option* opt_polarity = nullptr;

  crunch::PipelineConfig merge() const {
    crunch::PipelineConfig config;
    if (!config_path.empty()) {
      config = crunch::parse_config(crunch::read_file(config_path));
      crunch::require(config.pipeline == kind,
                      std::string("config names pipeline '") +
                          crunch::to_string(config.pipeline) +
                          "' but the subcommand is '" +
                          crunch::to_string(kind) + "'");
    }
    config.pipeline = kind;
    if (opt_in->count()) config.input = in_path;
    if (opt_out->count()) config.output_dir = out_path;
    if (opt_grid != nullptr && opt_grid->count()) config.grid = grid;
    if (opt_tol != nullptr && opt_tol->count()) config.tolerance = tolerance;
    if (opt_pad != nullptr && opt_pad->count()) config.pad_factor = pad_factor;
    if (opt_prices != nullptr && opt_prices->count()) config.prices = prices;
    if (opt_tail != nullptr && opt_tail->count()) config.tail_order = tail_order;
    if (opt_topics != nullptr && opt_topics->count()) config.topics = topics;
    if (opt_polarity != nullptr && opt_polarity->count()) {
      config.polarity = polarity;
    }
    config.validate();
    return config;
  }
};

void add_common(PipelineCli& cli) {
  cli.opt_in = cli.cmd->add_option("--in", cli.in_path,
                                   "Input data file for this pipeline");
  cli.opt_out = cli.cmd->add_option("--out", cli.out_path,
                                    "Output directory (replaced on success)");
  cli.cmd->add_option("--config", cli.config_path,
                      "Config file with the same keys; flags override it");
}

void inspect_regions(const std::string& text, std::ostream& out) {
  const crunch::RegionSet set = crunch::parse_regions(text);
  double total = 0.0;
  std::size_t vertices = 0;
  for (const crunch::Region& r : set.regions) {
    total += r.statistic;
    for (const crunch::Ring& ring : r.rings) vertices += ring.size();
  }
  const crunch::Bounds b = set.bounds();
  out << "kind: regions\n"
      << "regions: " << set.regions.size() << "\n"
      << "vertices: " << vertices << "\n"
      << "total statistic: " << fmt_num(total) << "\n"
      << "bounds: [" << fmt_num(b.xmin) << ", " << fmt_num(b.ymin) << "] .. ["
      << fmt_num(b.xmax) << ", " << fmt_num(b.ymax) << "]\n";
}

void inspect_series(const std::string& text, std::ostream& out) {
  const crunch::SeriesEnsemble ensemble = crunch::parse_series(text);
  out << "kind: series\n"
      << "series: " << ensemble.labels.size() << "\n"
      << "observations: " << ensemble.samples.rows() << "\n"
      << "value range: [" << fmt_num(ensemble.samples.minCoeff()) << ", "
      << fmt_num(ensemble.samples.maxCoeff()) << "]\n"
      << "labels:";
  for (const std::string& label : ensemble.labels) out << " " << label;
  out << "\n";
}

void inspect_sentiment(const std::string& text, std::ostream& out) {
  const crunch::SentimentRecordSet set = crunch::parse_sentiment_records(text);
  std::set<std::string> actors, topics;
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    const crunch::SentimentRecord& rec = set.records[i];
    actors.insert(rec.actor);
    topics.insert(rec.topic);
    lo = i == 0 ? rec.polarity : std::min(lo, rec.polarity);
    hi = i == 0 ? rec.polarity : std::max(hi, rec.polarity);
  }
  out << "kind: sentiment\n"
      << "records: " << set.records.size() << "\n"
      << "actors: " << actors.size() << "\n"
      << "topics: " << topics.size() << "\n";
  if (!set.records.empty()) {
    out << "polarity range: [" << fmt_num(lo) << ", " << fmt_num(hi) << "]\n";
  }
}

void inspect_events(const std::string& text, std::ostream& out) {
  const crunch::EngagementEventSet set = crunch::parse_engagement_events(text);
  std::set<std::string> accounts, topics;
  std::map<std::string, std::size_t> kinds;
  std::int64_t ts_lo = 0, ts_hi = 0;
  for (std::size_t i = 0; i < set.events.size(); ++i) {
    const crunch::EngagementEvent& ev = set.events[i];
    accounts.insert(ev.source);
    accounts.insert(ev.target);
    topics.insert(ev.topics.begin(), ev.topics.end());
    ++kinds[crunch::to_string(ev.kind)];
    ts_lo = i == 0 ? ev.timestamp : std::min(ts_lo, ev.timestamp);
    ts_hi = i == 0 ? ev.timestamp : std::max(ts_hi, ev.timestamp);
  }
  out << "kind: events\n"
      << "events: " << set.events.size() << "\n"
      << "accounts: " << accounts.size() << "\n"
      << "topics: " << topics.size() << "\n";
  for (const auto& [kind, count] : kinds) {
    out << kind << ": " << count << "\n";
  }
  if (!set.events.empty()) {
    out << "timestamp range: [" << ts_lo << ", " << ts_hi << "]\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"data crunch toolkit: cartograms, correlation taxonomies, "
               "signed sentiment graphs, engagement communities"};
  app.fallthrough();
  app.set_version_flag("--version", std::string("crunch ") + CRUNCH_VERSION +
                                        " (report schema " +
                                        std::to_string(
                                            crunch::kReportSchemaVersion) +
                                        ")");
  unsigned threads = 0;
  app.add_option("--threads", threads,
                 "Cap worker threads (0 = machine parallelism); results do "
                 "not depend on it");

  PipelineCli cartogram;
  cartogram.kind = crunch::PipelineKind::cartogram;
  cartogram.cmd = app.add_subcommand(
      "cartogram", "Density-equalizing map from a geo document");
  add_common(cartogram);
  cartogram.opt_grid = cartogram.cmd->add_option(
      "--grid", cartogram.grid, "Cells per axis (power of two >= 64)");
  cartogram.opt_tol = cartogram.cmd->add_option(
      "--tol", cartogram.tolerance, "Density residual target in (0, 1)");
  cartogram.opt_pad = cartogram.cmd->add_option(
      "--pad", cartogram.pad_factor, "Domain padding factor >= 1");

  PipelineCli taxonomy;
  taxonomy.kind = crunch::PipelineKind::taxonomy;
  taxonomy.cmd = app.add_subcommand(
      "taxonomy", "Correlation taxonomy tree from a series table");
  add_common(taxonomy);
  taxonomy.opt_prices = taxonomy.cmd->add_flag(
      "--prices", taxonomy.prices,
      "Treat columns as prices: correlate log-returns and fit the tail");
  taxonomy.opt_tail = taxonomy.cmd->add_option(
      "--tail-order", taxonomy.tail_order,
      "Hill order count k (0 = floor(n^0.6))");

  PipelineCli sentiment;
  sentiment.kind = crunch::PipelineKind::sentiment;
  sentiment.cmd = app.add_subcommand(
      "sentiment", "Signed actor graph from polarity records");
  add_common(sentiment);

  PipelineCli community;
  community.kind = crunch::PipelineKind::community;
  community.cmd = app.add_subcommand(
      "community", "Per-topic community counts from engagement events");
  add_common(community);
  community.opt_topics = community.cmd->add_option(
      "--topic", community.topics,
      "Topic to analyze (repeatable; default: every observed topic)");
  community.opt_polarity = community.cmd->add_option(
      "--polarity", community.polarity,
      "Net-polarity sign filter: -1, 0, or +1 (default +1)");

  CLI::App* inspect = app.add_subcommand(
      "inspect", "Parse an input and print a summary without computing");
  std::string inspect_kind, inspect_in;
  inspect->add_option("--kind", inspect_kind, "regions|series|sentiment|events")
      ->required()
      ->check(CLI::IsMember({"regions", "series", "sentiment", "events"}));
  inspect->add_option("--in", inspect_in, "Input data file")->required();

  app.require_subcommand(0, 1);

  if (argc <= 1) {
    std::cout << app.help();
    return 1;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  crunch::set_thread_cap(threads);
  try {
    for (PipelineCli* cli : {&cartogram, &taxonomy, &sentiment, &community}) {
      if (cli->cmd->parsed()) {
        std::cout << crunch::run(cli->merge());
        return 0;
      }
    }
    if (inspect->parsed()) {
      const std::string text = crunch::read_file(inspect_in);
      if (inspect_kind == "regions") {
        inspect_regions(text, std::cout);
      } else if (inspect_kind == "series") {
        inspect_series(text, std::cout);
      } else if (inspect_kind == "sentiment") {
        inspect_sentiment(text, std::cout);
      } else {
        inspect_events(text, std::cout);
      }
      return 0;
    }
    std::cout << app.help();
    return 1;
  } catch (const crunch::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == crunch::ErrorKind::convergence ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
