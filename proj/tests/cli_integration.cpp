// End-to-end checks of the crunch binary: flag handling, exit codes,
// artifacts on disk, and determinism across thread caps. Takes the binary
// path as argv[1] (wired up by CTest).

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "crunch/data.hpp"
#include "crunch/io.hpp"
#include "helpers.hpp"

using namespace crunch;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int failures = 0;
std::string cli;
testing::TempDir dir("crunch-cli");

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string shell_quote(const std::string& s) { return "'" + s + "'"; }

RunResult run_cli(const std::string& args) {
  const std::string out_path = dir.file("stdout.txt");
  const std::string err_path = dir.file("stderr.txt");
  const std::string command = shell_quote(cli) + " " + args + " >" +
                              shell_quote(out_path) + " 2>" + shell_quote(err_path);
  const int status = std::system(command.c_str());
  RunResult result;
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = read_file(out_path);
  result.err = read_file(err_path);
  return result;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

void check(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s %s%s%s\n", ok ? "ok" : "FAIL", name.c_str(),
              detail.empty() ? "" : " — ", detail.c_str());
  if (!ok) ++failures;
}

json stripped(json doc) {
  doc.erase("generated_at");
  return doc;
}

void version_and_help() {
  const RunResult version = run_cli("--version");
  check(version.code == 0 && contains(version.out, "crunch 0.1.0") &&
            contains(version.out, "report schema 1"),
        "version flag", version.out.substr(0, version.out.size() - 1));

  const RunResult bare = run_cli("");
  check(bare.code == 1 && contains(bare.out, "cartogram") &&
            contains(bare.out, "taxonomy") && contains(bare.out, "inspect"),
        "no arguments prints help and fails",
        "exit " + std::to_string(bare.code));

  const RunResult bogus = run_cli("--bogus");
  check(bogus.code == 1 && contains(bogus.err, "--bogus"),
        "unknown flag is an error on stderr",
        "exit " + std::to_string(bogus.code));

  const RunResult bad_kind = run_cli("inspect --kind excel --in whatever");
  check(bad_kind.code == 1, "inspect rejects unknown kinds",
        "exit " + std::to_string(bad_kind.code));
}

void cartogram_run() {
  write_file(dir.file("squares.geojson"),
             emit_regions(testing::two_squares(16)));
  const std::string out_dir = dir.file("carto-out");
  const RunResult run = run_cli("cartogram --in " +
                                shell_quote(dir.file("squares.geojson")) + " --out " +
                                shell_quote(out_dir) + " --grid 64 --tol 1e-2");
  bool ok = run.code == 0;
  std::string detail = "exit " + std::to_string(run.code);
  if (ok) {
    const json report = json::parse(run.out);
    ok = report.at("pipeline") == "cartogram" &&
         report.at("parameters").at("grid") == 64 &&
         report.at("diagnostics").at("residual").get<double>() < 1e-2;
    for (const char* name : {"cartogram.geojson", "cartogram.svg",
                             "area_report.json", "run_report.json"}) {
      ok = ok && fs::exists(fs::path(out_dir) / name);
    }
    ok = ok && run.out == read_file(out_dir + "/run_report.json");
    detail = "residual " +
             std::to_string(
                 json::parse(run.out).at("diagnostics").at("residual")
                     .get<double>());
  } else {
    detail += "; stderr: " + run.err;
  }
  check(ok, "cartogram writes artifacts and reports to stdout", detail);
}

void convergence_exit_code() {
  // Slabs separated by ~1e9 units force an enormous padded domain; the
  // residual cannot reach 1e-12 within the checkpoint budget.
  RegionSet set;
  Region west;
  west.id = "west";
  west.statistic = 1.0;
  west.rings.push_back({Point{0.0, 0.0}, Point{2e8, 0.0}, Point{2e8, 1.0},
                        Point{0.0, 1.0}, Point{0.0, 0.0}});
  Region east;
  east.id = "east";
  east.statistic = 3.0;
  east.rings.push_back({Point{1.8e9, 0.0}, Point{2e9, 0.0}, Point{2e9, 1.0},
                        Point{1.8e9, 1.0}, Point{1.8e9, 0.0}});
  set.regions = {west, east};
  write_file(dir.file("slabs.geojson"), emit_regions(set));

  const RunResult run = run_cli("cartogram --in " +
                                shell_quote(dir.file("slabs.geojson")) + " --out " +
                                shell_quote(dir.file("slabs-out")) +
                                " --grid 64 --tol 1e-12");
  check(run.code == 2 && contains(run.err, "error:") &&
            contains(run.err, "residual") &&
            !fs::exists(dir.file("slabs-out")),
        "non-convergence exits 2 and commits nothing",
        "exit " + std::to_string(run.code));
}

void thread_cap_determinism() {
  write_file(dir.file("series.csv"),
             "x,y,z\n1,2,5\n2,3.5,4\n3,5.2,3.1\n4,6.8,2.4\n5,8.1,1.2\n");
  const std::string base = "taxonomy --in " + shell_quote(dir.file("series.csv"));
  const RunResult a =
      run_cli(base + " --out " + shell_quote(dir.file("tax-a")) + " --threads 3");
  const RunResult b =
      run_cli(base + " --out " + shell_quote(dir.file("tax-b")) + " --threads 1");
  bool ok = a.code == 0 && b.code == 0;
  if (ok) {
    for (const char* name : {"tree.nwk", "tree.dot", "correlation.json"}) {
      ok = ok && read_file(dir.file("tax-a") + "/" + name) ==
                     read_file(dir.file("tax-b") + "/" + name);
    }
    ok = ok && stripped(json::parse(a.out)) == stripped(json::parse(b.out));
  }
  check(ok, "artifacts are byte-identical across --threads 3 and 1",
        "exits " + std::to_string(a.code) + "/" + std::to_string(b.code));
}

void inspect_summaries() {
  const RunResult series =
      run_cli("inspect --kind series --in " + shell_quote(dir.file("series.csv")));
  check(series.code == 0 && contains(series.out, "kind: series") &&
            contains(series.out, "series: 3") &&
            contains(series.out, "observations: 5") &&
            contains(series.out, "labels: x y z"),
        "inspect summarizes a series table",
        "exit " + std::to_string(series.code));

  const RunResult regions = run_cli("inspect --kind regions --in " +
                                    shell_quote(dir.file("squares.geojson")));
  check(regions.code == 0 && contains(regions.out, "kind: regions") &&
            contains(regions.out, "regions: 2") &&
            contains(regions.out, "total statistic: 4"),
        "inspect summarizes a region document",
        "exit " + std::to_string(regions.code));
}

void config_layering() {
  const json config = {{"pipeline", "taxonomy"},
                       {"input", dir.file("series.csv")},
                       {"output", dir.file("cfg-out")}};
  write_file(dir.file("tax.json"), config.dump(2) + "\n");

  const RunResult from_config =
      run_cli("taxonomy --config " + shell_quote(dir.file("tax.json")));
  check(from_config.code == 0 &&
            fs::exists(dir.file("cfg-out") + "/run_report.json"),
        "config file alone drives a run",
        "exit " + std::to_string(from_config.code));

  const RunResult overridden =
      run_cli("taxonomy --config " + shell_quote(dir.file("tax.json")) +
              " --out " + shell_quote(dir.file("cfg-override")));
  check(overridden.code == 0 &&
            fs::exists(dir.file("cfg-override") + "/run_report.json") &&
            json::parse(overridden.out).at("input") == dir.file("series.csv"),
        "flags override config values",
        "exit " + std::to_string(overridden.code));

  const RunResult mismatch =
      run_cli("sentiment --config " + shell_quote(dir.file("tax.json")));
  check(mismatch.code == 1 && contains(mismatch.err, "config names pipeline"),
        "config/subcommand mismatch is an error",
        "exit " + std::to_string(mismatch.code));
}

void missing_input() {
  const RunResult run = run_cli("taxonomy --in " + shell_quote(dir.file("absent.csv")) +
                                " --out " + shell_quote(dir.file("never-out")));
  check(run.code == 1 && contains(run.err, "error:") &&
            contains(run.err, "absent.csv") && !fs::exists(dir.file("never-out")),
        "missing input exits 1 and names the file",
        "exit " + std::to_string(run.code));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: cli_integration <path-to-crunch-binary>\n");
    return 2;
  }
  cli = argv[1];
  version_and_help();
  cartogram_run();
  convergence_exit_code();
  thread_cap_determinism();
  inspect_summaries();
  config_layering();
  missing_input();
  if (failures > 0) {
    std::printf("%d CLI checks failed\n", failures);
    return 1;
  }
  std::printf("all CLI checks passed\n");
  return 0;
}
