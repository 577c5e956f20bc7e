#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace crunch {

// Version of the run_report.json schema, reported by --version as well.
inline constexpr int kReportSchemaVersion = 1;

enum class PipelineKind { cartogram, taxonomy, sentiment, community };

const char* to_string(PipelineKind kind);

// One declarative document drives a whole run; the command line mirrors
// these fields one-to-one and a config file carries the same schema.
struct PipelineConfig {
  PipelineKind pipeline = PipelineKind::cartogram;
  std::string input;       // data file consumed by the pipeline
  std::string output_dir;  // replaced atomically on success

  // cartogram
  Eigen::Index grid = 256;  // cells per axis, power of two >= 64
  double tolerance = 1e-3;  // residual target of the diffusion solve
  double pad_factor = 1.5;

  // taxonomy
  bool prices = false;         // apply log-returns before correlating
  Eigen::Index tail_order = 0;  // Hill order count k; 0 = floor(n^0.6)

  // community
  std::vector<std::string> topics;  // empty = every observed topic
  int polarity = 1;

  void validate() const;
};

// Config document (JSON object, same keys as the command-line flags).
PipelineConfig parse_config(const std::string& text);

// Executes the named pipeline end-to-end and commits all artifacts plus
// run_report.json to the output directory via a staging-rename, so failed
// runs leave nothing behind. Returns the report bytes.
std::string run(const PipelineConfig& config);

}  // namespace crunch
