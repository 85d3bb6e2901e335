// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Argument: path to the scenarios directory.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <regex>

#include "adlab/detect.hpp"
#include "adlab/error.hpp"
#include "adlab/harness.hpp"
#include "adlab/rng.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;
using namespace adlab;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
  printf("%s  criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion,
         detail.c_str());
  if (!ok) ++g_failures;
}

fs::path scratch_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("adlab-acceptance-" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct FilterStats {
  uint64_t fraud_total = 0;
  uint64_t legit_total = 0;
  uint64_t flags_on_fraud = 0;
  uint64_t flags_on_legit = 0;
};

FilterStats filter_stats(const fs::path& run_dir, std::string_view filter) {
  FilterStats s;
  std::map<uint64_t, service::Truth> truth;
  std::string truth_text = harness::read_file(run_dir / "truth.tsv");
  size_t pos = 0;
  while (pos < truth_text.size()) {
    size_t nl = truth_text.find('\n', pos);
    if (nl == std::string::npos) nl = truth_text.size();
    std::string_view line{truth_text.data() + pos, nl - pos};
    pos = nl + 1;
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    uint64_t seq = std::stoull(std::string(line.substr(0, tab)));
    truth[seq] = service::truth_from(line.substr(tab + 1));
  }
  for (const auto& [seq, t] : truth)
    (t == service::Truth::Fraud ? s.fraud_total : s.legit_total)++;

  auto lists = detect::parse_filter_verdicts(
      harness::read_file(run_dir / "filter_verdicts.tsv"));
  for (const auto& list : lists) {
    for (const auto& v : list) {
      if (detect::filter_id_name(v.filter_id) != filter) continue;
      if (v.outcome != detect::Outcome::Flag) continue;
      if (truth.at(v.click_ref) == service::Truth::Fraud)
        ++s.flags_on_fraud;
      else
        ++s.flags_on_legit;
    }
  }
  return s;
}

// 1. extraction completeness over a generated 100-site corpus
void criterion_1() {
  harness::Corpus corpus = harness::gen_corpus(100, 3, 77);
  service::AdService svc = harness::make_corpus_service(corpus);
  extractor::InProcessFetcher fetcher(svc);
  extractor::Extractor ex(fetcher, {"acc-1", "172.16.0.1",
                                    service::Truth::Fraud});
  auto t0 = std::chrono::steady_clock::now();
  size_t pages = 0, exact = 0, links_total = 0, verified = 0;
  uint64_t now = 1'410'420'397'140ull;
  for (const auto& site : corpus.sites) {
    for (const auto& page : site.pages) {
      ++pages;
      size_t imp_before = svc.impressions().size();
      extractor::ExtractionResult res =
          ex.run_extraction(site.base_url + page, site.base_url, now);
      now += 1000;
      if (!res.complete()) continue;
      if (svc.impressions().size() != imp_before + 1) continue;
      const auto& minted = svc.impressions().back().links;
      if (res.link_urls == minted &&
          res.link_urls.size() ==
              std::min<size_t>(site.ad_config.max_num_ads, 3))
        ++exact;
      links_total += res.link_urls.size();
      for (const auto& link : res.links)
        if (adnet::verify_click_url(link, corpus.key)) ++verified;
    }
  }
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  bool clicks_clean = true;
  for (const auto& e : svc.events())
    clicks_clean = clicks_clean && e.kind != service::EventKind::Click;
  char buf[256];
  snprintf(buf, sizeof buf,
           "extraction completeness: %zu/%zu pages exact, %zu/%zu links "
           "verified, no clicks=%s, %.2fs (< 10s)",
           exact, pages, verified, links_total, clicks_clean ? "yes" : "NO",
           secs);
  report(1, exact == pages && verified == links_total && clicks_clean &&
                secs < 10.0,
         buf);
}

// 2. byte-exact origin rewrite on the captured ad-frame url
void criterion_2() {
  const std::string input = testfix::kCapturedAdFrameUrl;
  const std::string target = "http://www.anuncios.com";
  std::string rewritten;
  try {
    rewritten = extractor::rewrite_origin_params(input, target);
  } catch (const Error& e) {
    report(2, false, std::string("rewrite fidelity: ") + e.what());
    return;
  }
  bool has_url_span =
      rewritten.find("&url=http://www.anuncios.com/&adsafe") !=
      std::string::npos;
  std::string tail = "&p=http://www.anuncios.com";
  bool has_tail = rewritten.size() >= tail.size() &&
                  rewritten.compare(rewritten.size() - tail.size(),
                                    tail.size(), tail) == 0;
  // independent oracle: the same two greedy regex substitutions
  std::string expected = std::regex_replace(
      input, std::regex(R"(&url=.*&adsafe)"),
      "&url=http://www.anuncios.com/&adsafe");
  expected = std::regex_replace(expected, std::regex(R"(&p=http.*)"),
                                "&p=http://www.anuncios.com");
  bool exact = rewritten == expected;
  char buf[160];
  snprintf(buf, sizeof buf,
           "rewrite fidelity: url span=%s, trailing p=%s, byte-exact vs "
           "regex oracle=%s",
           has_url_span ? "yes" : "NO", has_tail ? "yes" : "NO",
           exact ? "yes" : "NO");
  report(2, has_url_span && has_tail && exact, buf);
}

// 3. the origin gate rejects the contaminated url and serves the rewrite
void criterion_3() {
  service::ServiceConfig cfg;
  cfg.key = "acceptance-key-0123456789abcdef";
  service::AdService svc(cfg);
  service::PublisherSite site;
  site.site_id = "anuncios";
  site.base_url = "http://www.anuncios.com";
  site.pages = {"/index.html"};
  site.baseline_popularity = 100;
  site.ad_config = adnet::make_ad_config("pub-1229649499684927",
                                         "ANUNCIOS.COM", 3, 336, 280, "es");
  svc.register_site(site);
  for (int i = 0; i < 3; ++i) {
    adnet::Campaign c;
    c.id = "c" + std::to_string(i);
    c.advertiser_id = "adv";
    c.landing_url = "http://advertiser" + std::to_string(i) + ".example/l";
    c.channel_targets = {"ANUNCIOS.COM"};
    c.headline = "h";
    svc.register_campaign(c);
  }

  extractor::InProcessFetcher fetcher(svc);
  extractor::Extractor ex(fetcher, {"acc-3", "172.16.0.3",
                                    service::Truth::Fraud});
  uint64_t now = 1'410'420'397'140ull;
  std::string raw = ex.emulate_client_render(
      site.ad_config, site.base_url + "/index.html", cfg.ads_base_url, now);

  bool raw_rejected = false;
  std::string raw_code = "none";
  try {
    svc.serve_ad_frame(adnet::parse_ad_request_url(raw),
                       {"acc-3", "172.16.0.3", service::Truth::Fraud}, now);
  } catch (const Error& e) {
    raw_rejected = e.code() == ErrorCode::OriginMismatch;
    raw_code = error_code_name(e.code());
  }

  std::string rewritten =
      extractor::rewrite_origin_params(raw, site.base_url);
  bool served = false;
  size_t anchors = 0;
  try {
    std::string html = svc.serve_ad_frame(
        adnet::parse_ad_request_url(rewritten),
        {"acc-3", "172.16.0.3", service::Truth::Fraud}, now);
    anchors = extractor::extract_ad_links(html).size();
    served = anchors == 3;
  } catch (const Error&) {
  }
  char buf[160];
  snprintf(buf, sizeof buf,
           "origin gate: raw url rejected with %s, rewritten url served "
           "with %zu anchors",
           raw_rejected ? "OriginMismatch" : raw_code.c_str(), anchors);
  report(3, raw_rejected && served, buf);
}

// 4. signature soundness under random tampering
void criterion_4() {
  const std::string key = "acceptance-key-0123456789abcdef";
  Rng rng(4242);
  adnet::AdConfig config = adnet::make_ad_config("pub-1229649499684927",
                                                 "ANUNCIOS.COM", 3, 336, 280);
  auto random_value = [&rng]() {
    static const char alphabet[] =
        "abcdefghijklmnopqrstuvwxyz0123456789/.:-_";
    std::string out;
    size_t len = 1 + rng.below(20);
    for (size_t i = 0; i < len; ++i)
      out.push_back(alphabet[rng.below(sizeof alphabet - 1)]);
    return out;
  };

  int pass_ok = 0, tamper_rejected = 0;
  for (int i = 0; i < 1000; ++i) {
    adnet::AdRequest imp = adnet::make_ad_request(
        config, "http://www.anuncios.com/index.html",
        "http://www.anuncios.com", 1'410'420'397'140ull + i,
        std::to_string(1'000'000'000'000ull + rng.below(9'000'000'000'000ull)),
        "vt-" + std::to_string(i));
    adnet::Campaign c;
    c.id = "c";
    c.advertiser_id = "a";
    c.landing_url = "http://campaign" + std::to_string(i) + ".example/land";
    c.channel_targets = {"ANUNCIOS.COM"};
    int slot = 1 + int(rng.below(3));
    adnet::AdLink link = adnet::mint_click_url(c, slot, imp, key);
    if (adnet::verify_click_url(link, key)) ++pass_ok;

    adnet::AdLink bad = link;
    switch (rng.below(5)) {
      case 0: bad.sa += "x"; break;
      case 1: bad.ai = random_value(); break;
      case 2: bad.num += 1 + int(rng.below(50)); break;
      case 3: bad.client += std::to_string(rng.below(10)); break;
      case 4: bad.adurl = "http://tampered.example/" + random_value(); break;
    }
    if (!adnet::verify_click_url(bad, key)) ++tamper_rejected;
  }
  char buf[160];
  snprintf(buf, sizeof buf,
           "signature soundness: %d/1000 untampered verified, %d/1000 "
           "tamperings rejected",
           pass_ok, tamper_rejected);
  report(4, pass_ok == 1000 && tamper_rejected == 1000, buf);
}

// 5. naive zero-dwell bots are caught by the dwell/ip test
double g_naive_catch_rate = 0;

void criterion_5(const fs::path& scenarios) {
  fs::path out = scratch_dir("naive");
  harness::cmd_run(scenarios / "naive_bots.json", std::nullopt, out);
  FilterStats s = filter_stats(out, "dwell_ip");
  double catch_rate =
      s.fraud_total ? double(s.flags_on_fraud) / double(s.fraud_total) : 0;
  double fp_rate =
      s.legit_total ? double(s.flags_on_legit) / double(s.legit_total) : 0;
  g_naive_catch_rate = catch_rate;
  char buf[200];
  snprintf(buf, sizeof buf,
           "naive-bot detection: dwell/ip flags %.1f%% of %llu fraud clicks "
           "(>= 99%%), false-positive rate %.2f%% of %llu legit (<= 1%%)",
           100 * catch_rate, (unsigned long long)s.fraud_total, 100 * fp_rate,
           (unsigned long long)s.legit_total);
  report(5, catch_rate >= 0.99 && fp_rate <= 0.01, buf);
}

// 6. the evasive policy stays under the rate-deviation radar
void criterion_6(const fs::path& scenarios) {
  fs::path out = scratch_dir("evasive");
  harness::cmd_run(scenarios / "evasive.json", std::nullopt, out);

  sim::ScenarioConfig cfg = sim::scenario_from_json(
      harness::read_file(scenarios / "evasive.json"));
  auto events =
      service::parse_event_log(harness::read_file(out / "events.log"));
  auto view = detect::strip_truth(events);
  auto z = detect::rate_window_zscores(view, cfg.detection_thresholds);
  double max_z = 0;
  for (const auto& [key, zi] : z) max_z = std::max(max_z, zi);

  FilterStats s = filter_stats(out, "rate_ratio");
  char buf[280];
  snprintf(buf, sizeof buf,
           "evasion: max click-rate z %.2f (< %.1f) over %zu windows, rate "
           "filter flags %llu of %llu fraud clicks; contrast: naive dwell/ip "
           "caught %.1f%%, evasive traffic shows no rate deviation at all",
           max_z, cfg.detection_thresholds.z_max, z.size(),
           (unsigned long long)s.flags_on_fraud,
           (unsigned long long)s.fraud_total, 100 * g_naive_catch_rate);
  report(6,
         max_z < cfg.detection_thresholds.z_max && s.flags_on_fraud == 0 &&
             s.fraud_total > 0,
         buf);
}

// 7. aggregate fractions on the mixed scenario
fs::path g_mixed_out;

void criterion_7(const fs::path& scenarios) {
  g_mixed_out = scratch_dir("mixed-a");
  harness::RunOutput run =
      harness::cmd_run(scenarios / "mixed.json", std::nullopt, g_mixed_out);
  const detect::DetectionReport& r = run.report;
  double fraud_share = 0;
  uint64_t fraud = r.tp + r.fn;
  if (r.clicks_total) fraud_share = double(fraud) / double(r.clicks_total);
  char buf[240];
  snprintf(buf, sizeof buf,
           "aggregate fractions: %.2f%% fraud injected, detected-invalid "
           "%.2f%% (10%% +/- 2pp), needs-investigation %.4f%% (<= 0.1%%) "
           "over %llu clicks",
           100 * fraud_share, 100 * r.invalid_fraction,
           100 * r.investigation_fraction, (unsigned long long)r.clicks_total);
  report(7,
         r.invalid_fraction >= 0.08 && r.invalid_fraction <= 0.12 &&
             r.investigation_fraction <= 0.001,
         buf);
}

// 8. byte-identical reruns
void criterion_8(const fs::path& scenarios) {
  fs::path out_b = scratch_dir("mixed-b");
  harness::cmd_run(scenarios / "mixed.json", std::nullopt, out_b);
  bool events_eq = harness::read_file(g_mixed_out / "events.log") ==
                   harness::read_file(out_b / "events.log");
  bool verdicts_eq = harness::read_file(g_mixed_out / "verdicts.tsv") ==
                     harness::read_file(out_b / "verdicts.tsv");
  bool truth_eq = harness::read_file(g_mixed_out / "truth.tsv") ==
                  harness::read_file(out_b / "truth.tsv");
  char buf[160];
  snprintf(buf, sizeof buf,
           "determinism: events byte-identical=%s, verdicts=%s, truth=%s",
           events_eq ? "yes" : "NO", verdicts_eq ? "yes" : "NO",
           truth_eq ? "yes" : "NO");
  report(8, events_eq && verdicts_eq && truth_eq, buf);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: adlab_acceptance <scenarios-dir>\n";
    return 2;
  }
  fs::path scenarios(argv[1]);
  try {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5(scenarios);
    criterion_6(scenarios);
    criterion_7(scenarios);
    criterion_8(scenarios);
  } catch (const std::exception& e) {
    std::cerr << "acceptance aborted: " << e.what() << "\n";
    return 2;
  }
  if (g_failures) {
    printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  printf("all 8 criteria PASSED\n");
  return 0;
}
