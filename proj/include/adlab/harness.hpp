#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "adlab/detect.hpp"
#include "adlab/extractor.hpp"
#include "adlab/service.hpp"
#include "adlab/sim.hpp"

namespace adlab::harness {

/// A generated fixture set: publisher sites plus the campaign registry and
/// the service key that signs their links.
struct Corpus {
  uint64_t seed = 0;
  std::string key;
  std::string ads_base_url = "http://ads.adlab.test";
  std::vector<service::PublisherSite> sites;
  std::vector<adnet::Campaign> campaigns;
};

Corpus gen_corpus(int n_sites, int campaigns_per_site, uint64_t seed);
std::string corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(const std::string& text);  // throws ConfigError
Corpus load_corpus_dir(const std::filesystem::path& dir);

/// Builds a service with every corpus site and campaign registered.
service::AdService make_corpus_service(const Corpus& corpus);

struct RunManifest {
  std::string scenario_sha256;
  uint64_t seed = 0;
  std::string version;
  std::vector<std::pair<std::string, std::string>> outputs;  // name -> path
  uint64_t wall_clock_ms = 0;
};

std::string manifest_to_json(const RunManifest& m);

struct RunOutput {
  RunManifest manifest;
  detect::DetectionReport report;
  std::filesystem::path out_dir;
};

/// Output root: ADLAB_OUT env var when set, "./adlab-out" otherwise.
std::filesystem::path default_out_root();

std::string render_report_text(const detect::DetectionReport& report,
                               double reference_invalid_fraction);
std::string report_to_json(const detect::DetectionReport& report,
                           double reference_invalid_fraction);

// -- commands --

/// Writes corpus.json under out_dir. Deterministic in (n_sites, seed).
Corpus cmd_gen_corpus(int n_sites, int campaigns_per_site, uint64_t seed,
                      const std::filesystem::path& out_dir);

/// Runs the scenario, all filters and the evaluation; persists events.log,
/// truth.tsv, verdicts.tsv, filter_verdicts.tsv, report.txt/json and
/// manifest.json under out_dir.
RunOutput cmd_run(const std::filesystem::path& scenario_file,
                  std::optional<uint64_t> seed_override,
                  const std::filesystem::path& out_dir);

struct ExtractOptions {
  std::string target_url;
  std::string rewrite_domain;       // empty: no rewrite (step h skipped)
  std::filesystem::path corpus_dir; // in-process mode
  std::string service_url;          // HTTP mode (overrides corpus_dir)
  std::string key;                  // verification key for HTTP mode
  std::string execution_origin = "http://localhost/vigilante/exploits/exploit2.php";
  uint64_t now_ms = 1'410'420'397'140ull;
  std::filesystem::path out_file;
};

/// Exit codes: 0 success, 1 usage/config, 2 io, 10+step for pipeline
/// failures at steps a..j (10=a .. 19=j).
int cmd_extract(const ExtractOptions& opts, extractor::ExtractionResult* out);

/// Renders the report for an existing run directory.
std::string cmd_report(const std::filesystem::path& run_dir,
                       double reference_invalid_fraction);

// small io helpers
std::string read_file(const std::filesystem::path& p);   // throws IoError
void write_file(const std::filesystem::path& p, std::string_view data);

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitStepBase = 10;  // + step index (a=0 .. j=9)

}  // namespace adlab::harness
