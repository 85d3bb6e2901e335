#include "adlab/harness.hpp"

#include <chrono>
#include <fstream>
#include <memory>
#include <sstream>

#include "adlab/error.hpp"
#include "adlab/http_service.hpp"
#include "adlab/rng.hpp"
#include "json.hpp"

namespace adlab::harness {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "adlab 0.1.0";

struct SizeOption {
  int width;
  int height;
};

// ad-unit palette; 336x280 stays in every corpus
constexpr SizeOption kSizePalette[] = {
    {336, 280}, {300, 250}, {728, 90}, {160, 600}};

constexpr const char* kPagePool[] = {"/index.html", "/news.html",
                                     "/offers.html", "/contact.html"};

constexpr const char* kColorPool[] = {"EEEEEE", "FFFFFF", "000066",
                                      "CC0000", "336699", "000000"};

std::string two_digit(int v) {
  char buf[16];
  snprintf(buf, sizeof buf, "%03d", v);
  return buf;
}

}  // namespace

Corpus gen_corpus(int n_sites, int campaigns_per_site, uint64_t seed) {
  if (n_sites < 1) fail(ErrorCode::BadParam, "n_sites must be >= 1");
  if (campaigns_per_site < 0)
    fail(ErrorCode::BadParam, "campaigns_per_site must be >= 0");
  Corpus corpus;
  corpus.seed = seed;
  corpus.key =
      "ck-" + sha256_hex("adlab-corpus-" + std::to_string(seed)).substr(0, 32);
  Rng rng(seed);
  int campaign_counter = 0;
  for (int i = 0; i < n_sites; ++i) {
    service::PublisherSite site;
    site.site_id = "site" + two_digit(i);
    site.base_url = "http://site" + two_digit(i) + ".mock";
    int n_pages = 1 + static_cast<int>(rng.below(3));
    for (int p = 0; p < n_pages; ++p) site.pages.push_back(kPagePool[p]);
    site.baseline_popularity = 30.0 + double(rng.below(120));

    std::string client_id = "pub-";
    for (int d = 0; d < 16; ++d) client_id += char('0' + rng.below(10));
    std::string channel = "SITE" + two_digit(i) + ".MOCK";
    int num_ads = 1 + static_cast<int>(rng.below(3));  // 1..3
    const SizeOption& size = kSizePalette[rng.below(std::size(kSizePalette))];
    adnet::AdColors colors;
    colors.border = kColorPool[rng.below(std::size(kColorPool))];
    colors.bg = kColorPool[rng.below(std::size(kColorPool))];
    colors.link = kColorPool[rng.below(std::size(kColorPool))];
    colors.text = kColorPool[rng.below(std::size(kColorPool))];
    colors.url = kColorPool[rng.below(std::size(kColorPool))];
    site.ad_config =
        adnet::make_ad_config(client_id, channel, num_ads, size.width,
                              size.height, rng.chance(0.5) ? "es" : "en",
                              adnet::SafeLevel::High, colors);
    corpus.sites.push_back(std::move(site));

    for (int c = 0; c < campaigns_per_site; ++c) {
      adnet::Campaign cam;
      cam.id = "c" + two_digit(campaign_counter);
      cam.advertiser_id = "adv" + two_digit(campaign_counter % 37);
      cam.landing_url = "http://advertiser" + two_digit(campaign_counter % 37) +
                        ".example/offer" + std::to_string(c);
      cam.channel_targets = {channel};
      cam.headline = "Offer " + std::to_string(campaign_counter) + " for " +
                     channel;
      corpus.campaigns.push_back(std::move(cam));
      ++campaign_counter;
    }
  }
  return corpus;
}

std::string corpus_to_json(const Corpus& corpus) {
  nlohmann::ordered_json j;
  j["seed"] = corpus.seed;
  j["key"] = corpus.key;
  j["ads_base_url"] = corpus.ads_base_url;
  j["sites"] = nlohmann::ordered_json::array();
  for (const auto& s : corpus.sites) {
    nlohmann::ordered_json js;
    js["site_id"] = s.site_id;
    js["base_url"] = s.base_url;
    js["pages"] = s.pages;
    js["baseline_popularity"] = s.baseline_popularity;
    js["ad_config"] = {
        {"client_id", s.ad_config.client_id},
        {"channel", s.ad_config.channel},
        {"ad_type", std::string(adnet::ad_type_name(s.ad_config.ad_type))},
        {"max_num_ads", s.ad_config.max_num_ads},
        {"language", s.ad_config.language},
        {"safe_level", std::string(adnet::safe_level_name(s.ad_config.safe_level))},
        {"encoding", s.ad_config.encoding},
        {"width", s.ad_config.width},
        {"height", s.ad_config.height},
        {"colors",
         {{"border", s.ad_config.colors.border},
          {"bg", s.ad_config.colors.bg},
          {"link", s.ad_config.colors.link},
          {"text", s.ad_config.colors.text},
          {"url", s.ad_config.colors.url}}}};
    j["sites"].push_back(std::move(js));
  }
  j["campaigns"] = nlohmann::ordered_json::array();
  for (const auto& c : corpus.campaigns) {
    j["campaigns"].push_back({{"id", c.id},
                              {"advertiser_id", c.advertiser_id},
                              {"landing_url", c.landing_url},
                              {"channel_targets", c.channel_targets},
                              {"headline", c.headline}});
  }
  return j.dump(2) + "\n";
}

Corpus corpus_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("bad corpus json: ") + e.what());
  }
  Corpus corpus;
  try {
    corpus.seed = j.value("seed", 0ull);
    corpus.key = j.at("key").get<std::string>();
    corpus.ads_base_url = j.value("ads_base_url", corpus.ads_base_url);
    for (const auto& js : j.at("sites")) {
      service::PublisherSite s;
      s.site_id = js.at("site_id").get<std::string>();
      s.base_url = js.at("base_url").get<std::string>();
      for (const auto& p : js.at("pages")) s.pages.push_back(p.get<std::string>());
      s.baseline_popularity = js.value("baseline_popularity", 1.0);
      const auto& jc = js.at("ad_config");
      adnet::AdColors colors;
      if (jc.contains("colors")) {
        colors.border = jc["colors"].value("border", colors.border);
        colors.bg = jc["colors"].value("bg", colors.bg);
        colors.link = jc["colors"].value("link", colors.link);
        colors.text = jc["colors"].value("text", colors.text);
        colors.url = jc["colors"].value("url", colors.url);
      }
      s.ad_config = adnet::make_ad_config(
          jc.at("client_id").get<std::string>(), jc.value("channel", ""),
          jc.value("max_num_ads", 1), jc.value("width", 336),
          jc.value("height", 280), jc.value("language", "en"),
          adnet::safe_level_from(jc.value("safe_level", "high")), colors);
      s.ad_config.encoding = jc.value("encoding", s.ad_config.encoding);
      corpus.sites.push_back(std::move(s));
    }
    for (const auto& jc : j.at("campaigns")) {
      adnet::Campaign c;
      c.id = jc.at("id").get<std::string>();
      c.advertiser_id = jc.value("advertiser_id", "");
      c.landing_url = jc.at("landing_url").get<std::string>();
      for (const auto& t : jc.value("channel_targets", json::array()))
        c.channel_targets.push_back(t.get<std::string>());
      c.headline = jc.value("headline", "");
      corpus.campaigns.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("corpus field: ") + e.what());
  }
  return corpus;
}

Corpus load_corpus_dir(const std::filesystem::path& dir) {
  return corpus_from_json(read_file(dir / "corpus.json"));
}

service::AdService make_corpus_service(const Corpus& corpus) {
  service::ServiceConfig cfg;
  cfg.key = corpus.key;
  cfg.ads_base_url = corpus.ads_base_url;
  service::AdService svc(cfg);
  for (const auto& s : corpus.sites) svc.register_site(s);
  for (const auto& c : corpus.campaigns) svc.register_campaign(c);
  return svc;
}

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["scenario_sha256"] = m.scenario_sha256;
  j["seed"] = m.seed;
  j["version"] = m.version;
  j["outputs"] = nlohmann::ordered_json::object();
  for (const auto& [name, path] : m.outputs) j["outputs"][name] = path;
  j["wall_clock_ms"] = m.wall_clock_ms;
  return j.dump(2) + "\n";
}

std::filesystem::path default_out_root() {
  if (const char* env = std::getenv("ADLAB_OUT"); env && *env)
    return std::filesystem::path(env);
  return std::filesystem::path("adlab-out");
}

std::string render_report_text(const detect::DetectionReport& r,
                               double reference) {
  std::ostringstream os;
  char line[160];
  os << "detection report\n================\n";
  snprintf(line, sizeof line, "clicks total            %10llu\n",
           (unsigned long long)r.clicks_total);
  os << line;
  snprintf(line, sizeof line, "valid                   %10llu\n",
           (unsigned long long)r.valid);
  os << line;
  snprintf(line, sizeof line, "invalid (auto)          %10llu  (%.2f%%)\n",
           (unsigned long long)r.invalid_auto, 100.0 * r.invalid_fraction);
  os << line;
  snprintf(line, sizeof line, "needs investigation     %10llu  (%.4f%%)\n",
           (unsigned long long)r.needs_investigation,
           100.0 * r.investigation_fraction);
  os << line;
  snprintf(line, sizeof line,
           "invalid fraction %.2f%% vs reference line %.2f%%\n",
           100.0 * r.invalid_fraction, 100.0 * reference);
  os << line;
  os << "\nper-filter flags (fraud / legit by ground truth)\n";
  for (const auto& [id, pf] : r.per_filter) {
    snprintf(line, sizeof line, "  %-18s %8llu  (%llu / %llu)\n",
             std::string(detect::filter_id_name(id)).c_str(),
             (unsigned long long)pf.flags, (unsigned long long)pf.flags_on_fraud,
             (unsigned long long)pf.flags_on_legit);
    os << line;
  }
  os << "\nconfusion vs ground truth (positive = fraud)\n";
  snprintf(line, sizeof line, "  tp %llu  fp %llu  tn %llu  fn %llu\n",
           (unsigned long long)r.tp, (unsigned long long)r.fp,
           (unsigned long long)r.tn, (unsigned long long)r.fn);
  os << line;
  snprintf(line, sizeof line, "  precision %.4f  recall %.4f\n", r.precision,
           r.recall);
  os << line;
  return os.str();
}

std::string report_to_json(const detect::DetectionReport& r, double reference) {
  nlohmann::ordered_json j;
  j["clicks_total"] = r.clicks_total;
  j["valid"] = r.valid;
  j["invalid_auto"] = r.invalid_auto;
  j["needs_investigation"] = r.needs_investigation;
  j["invalid_fraction"] = r.invalid_fraction;
  j["investigation_fraction"] = r.investigation_fraction;
  j["reference_invalid_fraction"] = reference;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["tn"] = r.tn;
  j["fn"] = r.fn;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["per_filter"] = nlohmann::ordered_json::object();
  for (const auto& [id, pf] : r.per_filter) {
    j["per_filter"][std::string(detect::filter_id_name(id))] = {
        {"flags", pf.flags},
        {"flags_on_fraud", pf.flags_on_fraud},
        {"flags_on_legit", pf.flags_on_legit}};
  }
  return j.dump(2) + "\n";
}

Corpus cmd_gen_corpus(int n_sites, int campaigns_per_site, uint64_t seed,
                      const std::filesystem::path& out_dir) {
  Corpus corpus = gen_corpus(n_sites, campaigns_per_site, seed);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  write_file(out_dir / "corpus.json", corpus_to_json(corpus));
  return corpus;
}

RunOutput cmd_run(const std::filesystem::path& scenario_file,
                  std::optional<uint64_t> seed_override,
                  const std::filesystem::path& out_dir) {
  auto t_start = std::chrono::steady_clock::now();
  std::string scenario_text = read_file(scenario_file);
  sim::ScenarioConfig config = sim::scenario_from_json(scenario_text);
  if (seed_override) config.seed = *seed_override;

  sim::ScenarioRun run = sim::run_scenario(config);
  const auto& events = run.events;

  std::vector<detect::EventView> view = detect::strip_truth(events);
  const detect::Thresholds& th = run.thresholds;
  std::vector<std::vector<detect::FilterVerdict>> fv;
  fv.push_back(detect::dwell_ip_filter(view, th));
  fv.push_back(detect::rate_ratio_filter(view, th));
  fv.push_back(detect::advertiser_panel_filter(view, th).verdicts);
  fv.push_back(detect::behavior_classifier(view, run.warmup_end_ts, th));
  std::vector<detect::Verdict> verdicts = detect::aggregate_verdicts(fv, th);

  std::map<uint64_t, service::Truth> truth;
  for (const auto& e : events)
    if (e.kind == service::EventKind::Click) truth[e.seq] = e.truth;
  detect::DetectionReport report = detect::evaluate(verdicts, truth);
  detect::tally_filter_flags(report, fv, truth);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  write_file(out_dir / "events.log", service::serialize_event_log(events));
  std::string truth_text = "# click_seq\ttruth\n";
  for (const auto& [seq, t] : truth) {
    truth_text += std::to_string(seq);
    truth_text += '\t';
    truth_text += service::truth_name(t);
    truth_text += '\n';
  }
  write_file(out_dir / "truth.tsv", truth_text);
  write_file(out_dir / "verdicts.tsv", detect::serialize_verdicts(verdicts));
  write_file(out_dir / "filter_verdicts.tsv",
             detect::serialize_filter_verdicts(fv));
  constexpr double kReference = 0.10;
  write_file(out_dir / "report.txt", render_report_text(report, kReference));
  write_file(out_dir / "report.json", report_to_json(report, kReference));
  write_file(out_dir / "scenario.json", scenario_text);

  RunOutput out;
  out.report = report;
  out.out_dir = out_dir;
  out.manifest.scenario_sha256 = sha256_hex(scenario_text);
  out.manifest.seed = config.seed;
  out.manifest.version = kVersion;
  for (const char* name :
       {"events.log", "truth.tsv", "verdicts.tsv", "filter_verdicts.tsv",
        "report.txt", "report.json", "scenario.json"})
    out.manifest.outputs.emplace_back(name, (out_dir / name).string());
  out.manifest.wall_clock_ms = static_cast<uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - t_start)
          .count());
  write_file(out_dir / "manifest.json", manifest_to_json(out.manifest));
  return out;
}

int cmd_extract(const ExtractOptions& opts, extractor::ExtractionResult* out) {
  std::optional<Corpus> corpus;
  std::optional<service::AdService> svc;
  std::unique_ptr<extractor::Fetcher> fetcher;
  std::string key = opts.key;

  if (!opts.service_url.empty()) {
    fetcher = extractor::make_http_fetcher(opts.service_url);
  } else if (!opts.corpus_dir.empty()) {
    corpus = load_corpus_dir(opts.corpus_dir);
    svc.emplace(make_corpus_service(*corpus));
    fetcher = std::make_unique<extractor::InProcessFetcher>(*svc);
    if (key.empty()) key = corpus->key;
  } else {
    return kExitUsage;
  }

  service::ClientContext ctx{"extract-cli", "127.0.0.1",
                             service::Truth::Fraud};
  extractor::Extractor ex(*fetcher, ctx, opts.execution_origin);
  extractor::ExtractionResult result =
      ex.run_extraction(opts.target_url, opts.rewrite_domain, opts.now_ms);
  if (out) *out = result;

  if (!opts.out_file.empty())
    write_file(opts.out_file, extractor::format_extraction_result(result));

  if (auto failed = result.failed_step())
    return kExitStepBase + static_cast<int>(*failed);
  if (result.link_urls.empty())
    return kExitStepBase + static_cast<int>(extractor::Step::J);
  if (!key.empty()) {
    for (const auto& link : result.links)
      if (!adnet::verify_click_url(link, key))
        return kExitStepBase + static_cast<int>(extractor::Step::J);
  }
  return kExitOk;
}

std::string cmd_report(const std::filesystem::path& run_dir, double reference) {
  std::vector<detect::Verdict> verdicts =
      detect::parse_verdicts(read_file(run_dir / "verdicts.tsv"));
  std::map<uint64_t, service::Truth> truth;
  std::string truth_text = read_file(run_dir / "truth.tsv");
  size_t pos = 0;
  while (pos < truth_text.size()) {
    size_t nl = truth_text.find('\n', pos);
    if (nl == std::string::npos) nl = truth_text.size();
    std::string_view line{truth_text.data() + pos, nl - pos};
    pos = nl + 1;
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string_view::npos)
      fail(ErrorCode::BadParam, "bad truth line");
    uint64_t seq = std::stoull(std::string(line.substr(0, tab)));
    truth[seq] = service::truth_from(line.substr(tab + 1));
  }
  detect::DetectionReport report = detect::evaluate(verdicts, truth);
  std::error_code ec;
  if (std::filesystem::exists(run_dir / "filter_verdicts.tsv", ec)) {
    auto fv = detect::parse_filter_verdicts(
        read_file(run_dir / "filter_verdicts.tsv"));
    detect::tally_filter_flags(report, fv, truth);
  }
  return render_report_text(report, reference);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, std::string_view data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + p.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) fail(ErrorCode::IoError, "short write to " + p.string());
}

}  // namespace adlab::harness
