// adlab: pay-per-click sandbox driver.
//   gen-corpus   generate publisher sites + campaign registries
//   run          execute a traffic scenario and the detection pass
//   extract      run the ad-link extraction pipeline against one page
//   report       render the detection report of a finished run

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "adlab/error.hpp"
#include "adlab/harness.hpp"

namespace fs = std::filesystem;
using namespace adlab;

int main(int argc, char** argv) {
  CLI::App app{"pay-per-click sandbox: mock ad network, link extraction, "
               "traffic simulation and invalid-click detection"};
  app.require_subcommand(1);

  // gen-corpus
  auto* gen = app.add_subcommand("gen-corpus", "generate a site corpus");
  int n_sites = 10;
  int campaigns_per_site = 3;
  uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--sites", n_sites, "number of publisher sites")
      ->capture_default_str();
  gen->add_option("--campaigns-per-site", campaigns_per_site,
                  "campaigns registered per site channel")
      ->capture_default_str();
  gen->add_option("--seed", gen_seed, "corpus seed")->capture_default_str();
  gen->add_option("--out", gen_out, "output directory")->required();

  // run
  auto* run = app.add_subcommand("run", "run a scenario plus detection");
  std::string scenario_file;
  std::string run_out;
  std::optional<uint64_t> run_seed;
  uint64_t run_seed_value = 0;
  run->add_option("--scenario", scenario_file, "scenario json file")->required();
  auto* seed_opt = run->add_option("--seed", run_seed_value,
                                   "override the scenario seed");
  run->add_option("--out", run_out,
                  "output directory (default: <out-root>/<scenario-stem>)");

  // extract
  auto* extract = app.add_subcommand("extract", "extract ad links from a page");
  harness::ExtractOptions ex_opts;
  std::string corpus_dir;
  extract->add_option("--target", ex_opts.target_url, "page URL to extract from")
      ->required();
  extract->add_option("--rewrite-domain", ex_opts.rewrite_domain,
                      "origin to write into the ad-frame URL "
                      "(omit to fetch the raw contaminated URL)");
  extract->add_option("--corpus", corpus_dir,
                      "corpus directory (in-process mode)");
  extract->add_option("--service", ex_opts.service_url,
                      "base URL of a live service (HTTP mode)");
  extract->add_option("--key-file", ex_opts.key,
                      "verification key file (HTTP mode)")
      ->check(CLI::ExistingFile);
  extract->add_option("--origin", ex_opts.execution_origin,
                      "execution origin leaked into the raw ad-frame URL")
      ->capture_default_str();
  extract->add_option("--now", ex_opts.now_ms, "simulated clock, epoch ms")
      ->capture_default_str();
  std::string ex_out;
  extract->add_option("--out", ex_out, "result file");

  // report
  auto* report = app.add_subcommand("report", "render a run's detection report");
  std::string run_dir;
  double reference = 0.10;
  report->add_option("--run", run_dir, "run output directory")->required();
  report->add_option("--reference", reference,
                     "reference invalid-click fraction to print alongside")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      harness::Corpus corpus =
          harness::cmd_gen_corpus(n_sites, campaigns_per_site, gen_seed,
                                  fs::path(gen_out));
      std::cout << "corpus: " << corpus.sites.size() << " sites, "
                << corpus.campaigns.size() << " campaigns -> " << gen_out
                << "/corpus.json\n";
      return harness::kExitOk;
    }

    if (run->parsed()) {
      if (seed_opt->count() > 0) run_seed = run_seed_value;
      fs::path out_dir = run_out.empty()
                             ? harness::default_out_root() /
                                   fs::path(scenario_file).stem()
                             : fs::path(run_out);
      harness::RunOutput out =
          harness::cmd_run(fs::path(scenario_file), run_seed, out_dir);
      std::cout << "run complete: " << out.out_dir.string() << "\n"
                << harness::render_report_text(out.report, 0.10);
      return harness::kExitOk;
    }

    if (extract->parsed()) {
      ex_opts.corpus_dir = corpus_dir;
      ex_opts.out_file = ex_out;
      if (!ex_opts.key.empty())
        ex_opts.key = harness::read_file(ex_opts.key);
      if (ex_opts.corpus_dir.empty() && ex_opts.service_url.empty()) {
        std::cerr << "extract needs --corpus or --service\n";
        return harness::kExitUsage;
      }
      extractor::ExtractionResult result;
      int rc = harness::cmd_extract(ex_opts, &result);
      std::cout << extractor::format_extraction_result(result);
      return rc;
    }

    if (report->parsed()) {
      std::cout << harness::cmd_report(fs::path(run_dir), reference);
      return harness::kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::IoError ? harness::kExitIo
                                          : harness::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return harness::kExitUsage;
  }
  return harness::kExitUsage;
}
