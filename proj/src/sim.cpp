#include "adlab/sim.hpp"

#include <algorithm>
#include <memory>

#include "adlab/error.hpp"
#include "json.hpp"

namespace adlab::sim {

namespace {

constexpr uint64_t kDayMs = 86'400'000;
constexpr uint64_t kRenderDelayMinMs = 100;   // visit -> ad frame load
constexpr uint64_t kRenderDelaySpanMs = 300;
constexpr uint64_t kHiddenFrameDelayMs = 120; // capture page -> hidden frame

std::string legit_ip(int user_idx) {
  return "10." + std::to_string((user_idx / 65536) % 256) + "." +
         std::to_string((user_idx / 256) % 256) + "." +
         std::to_string(user_idx % 256);
}

std::string capture_ip(uint64_t idx) {
  return "172." + std::to_string(16 + (idx / 65536) % 64) + "." +
         std::to_string((idx / 256) % 256) + "." + std::to_string(idx % 256);
}

std::string draw_correlator(Rng& rng) {
  return std::to_string(1'000'000'000'000ull + rng.below(9'000'000'000'000ull));
}

/// Fraud-inclusive per-site counters scanned incrementally from the log.
class StatsTracker {
 public:
  explicit StatsTracker(const service::AdService& svc) : svc_(svc) {}

  void sync() {
    const auto& log = svc_.events();
    for (; scan_idx_ < log.size(); ++scan_idx_) {
      const service::Event& e = log[scan_idx_];
      auto& c = counts_[e.site_id];
      if (e.kind == service::EventKind::Visit) ++c.first;
      if (e.kind == service::EventKind::Click) ++c.second;
    }
  }

  void freeze_baselines() {
    sync();
    for (const auto& [site, c] : counts_)
      baseline_ctr_[site] = c.first ? double(c.second) / double(c.first) : 0.0;
  }

  SiteStats stats_for(const std::string& site_id, uint64_t day) {
    sync();
    SiteStats s;
    auto it = counts_.find(site_id);
    if (it != counts_.end()) {
      s.visits = it->second.first;
      s.clicks = it->second.second;
    }
    auto b = baseline_ctr_.find(site_id);
    s.baseline_ctr = b == baseline_ctr_.end() ? 0.0 : b->second;
    auto f = fraud_clicks_by_day_.find(day);
    s.fraud_clicks_today = f == fraud_clicks_by_day_.end() ? 0 : f->second;
    return s;
  }

  void count_fraud_click(uint64_t day) { ++fraud_clicks_by_day_[day]; }

 private:
  const service::AdService& svc_;
  size_t scan_idx_ = 0;
  std::map<std::string, std::pair<uint64_t, uint64_t>> counts_;
  std::map<std::string, double> baseline_ctr_;
  std::map<uint64_t, int> fraud_clicks_by_day_;
};

/// Browser-like ad render on an already-visited page: verification frame,
/// coherent ad request, impression. Returns the minted click URLs.
std::vector<std::string> render_page_ads(service::AdService& svc,
                                         const service::PublisherSite& site,
                                         const std::string& page,
                                         const service::ClientContext& ctx,
                                         Rng& rng, uint64_t now) {
  auto [doc, token] = svc.serve_verification_frame(site.base_url, now);
  (void)doc;
  adnet::AdRequest req = adnet::make_ad_request(
      site.ad_config, site.base_url + page, site.base_url, now,
      draw_correlator(rng), token.token);
  svc.serve_ad_frame(req, ctx, now);
  return svc.impressions().back().links;
}

struct LegitSessionState {
  uint64_t n_pages = 1;
  int64_t click_page = -1;  // impression index that receives the click, -1 none
  uint64_t page_idx = 0;
};

using ProfilePtr = std::shared_ptr<const SessionProfile>;

void legit_visit_step(service::AdService& svc, Scheduler& sched,
                      ProfilePtr profile, const service::PublisherSite* site,
                      Rng& rng, std::shared_ptr<LegitSessionState> st,
                      uint64_t now) {
  service::ClientContext ctx{profile->session_id, profile->ip,
                             service::Truth::Legit};
  const std::string& page = site->pages[rng.below(site->pages.size())];
  svc.fetch_page(site->site_id, page, ctx, now);
  uint64_t render_at = now + kRenderDelayMinMs + rng.below(kRenderDelaySpanMs);
  sched.schedule(render_at, [&svc, &sched, profile, site, &rng, st,
                             page](uint64_t t) {
    service::ClientContext ictx{profile->session_id, profile->ip,
                                service::Truth::Legit};
    std::vector<std::string> links =
        render_page_ads(svc, *site, page, ictx, rng, t);
    bool click_here =
        st->click_page == static_cast<int64_t>(st->page_idx) && !links.empty();
    uint64_t dwell_ms = static_cast<uint64_t>(
        rng.lognormal(profile->dwell_mu_log, profile->dwell_sigma_log) * 1000.0);
    if (dwell_ms == 0) dwell_ms = 1;
    std::string link = click_here ? links[rng.below(links.size())] : "";
    sched.schedule(t + dwell_ms, [&svc, &sched, profile, site, &rng, st,
                                  link](uint64_t t2) {
      service::ClientContext cctx{profile->session_id, profile->ip,
                                  service::Truth::Legit};
      if (!link.empty())
        svc.handle_click(adnet::parse_click_url(link), cctx, t2);
      st->page_idx++;
      if (st->page_idx < st->n_pages)
        legit_visit_step(svc, sched, profile, site, rng, st, t2);
    });
  });
}

void schedule_legit_session(service::AdService& svc, Scheduler& sched,
                            ProfilePtr profile,
                            const service::PublisherSite* site, Rng& rng,
                            uint64_t start_ts) {
  sched.schedule(start_ts, [&svc, &sched, profile, site, &rng](uint64_t t) {
    auto st = std::make_shared<LegitSessionState>();
    st->n_pages = rng.geometric1(profile->pages_per_visit_p);
    if (rng.chance(profile->click_propensity))
      st->click_page = static_cast<int64_t>(rng.below(st->n_pages));
    legit_visit_step(svc, sched, profile, site, rng, st, t);
  });
}

struct HijackPlan {
  service::AdService* svc = nullptr;
  Scheduler* sched = nullptr;
  SessionProfile captured;
  const service::PublisherSite* target = nullptr;
  const FraudPolicy* policy = nullptr;
  SiteStats* stats = nullptr;      // standalone mode: caller-owned counters
  StatsTracker* tracker = nullptr; // scenario mode: live log-backed counters
  Rng* rng = nullptr;
  uint64_t scenario_start = 0;
  std::vector<FraudAction>* actions = nullptr;
  bool* ok_out = nullptr;
  std::vector<std::string> links;
  int waits_done = 0;
};

void hijack_decide_step(std::shared_ptr<HijackPlan> plan, uint64_t now) {
  service::ClientContext ctx{plan->captured.session_id, plan->captured.ip,
                             service::Truth::Fraud};
  uint64_t day = now >= plan->scenario_start
                     ? (now - plan->scenario_start) / kDayMs
                     : 0;
  SiteStats stats = plan->tracker
                        ? plan->tracker->stats_for(plan->target->site_id, day)
                        : *plan->stats;
  FraudAction action = decide_action(*plan->policy, stats, *plan->rng);
  if (plan->actions) plan->actions->push_back(action);

  switch (action) {
    case FraudAction::Wait: {
      if (plan->waits_done >= plan->policy->max_waits) return;  // give up
      plan->waits_done++;
      uint64_t wait_ms = static_cast<uint64_t>(
          plan->rng->lognormal(plan->policy->wait_mu_log,
                               plan->policy->wait_sigma_log) *
          1000.0);
      if (wait_ms == 0) wait_ms = 1;
      plan->sched->schedule(
          now + wait_ms, [plan](uint64_t t) { hijack_decide_step(plan, t); });
      return;
    }
    case FraudAction::ExtraVisit: {
      const auto& pages = plan->target->pages;
      const std::string& page = pages[plan->rng->below(pages.size())];
      plan->svc->fetch_page(plan->target->site_id, page, ctx, now);
      render_page_ads(*plan->svc, *plan->target, page, ctx, *plan->rng, now);
      if (plan->stats) plan->stats->visits++;
      return;
    }
    case FraudAction::Click: {
      const std::string& href =
          plan->links[plan->rng->below(plan->links.size())];
      plan->svc->handle_click(adnet::parse_click_url(href), ctx, now);
      if (plan->tracker) plan->tracker->count_fraud_click(day);
      if (plan->stats) {
        plan->stats->clicks++;
        plan->stats->fraud_clicks_today++;
      }
      return;
    }
    case FraudAction::Skip:
      return;
  }
}

void schedule_hijack_session(std::shared_ptr<HijackPlan> plan,
                             const std::string& capture_site_id,
                             const std::string& capture_page,
                             uint64_t start_ts) {
  plan->sched->schedule(start_ts, [plan, capture_site_id,
                                   capture_page](uint64_t t) {
    service::ClientContext ctx{plan->captured.session_id, plan->captured.ip,
                               service::Truth::Fraud};
    plan->svc->fetch_page(capture_site_id, capture_page, ctx, t);
    const service::PublisherSite* capture =
        plan->svc->find_site(capture_site_id);
    std::string origin = capture->base_url + capture_page;
    plan->sched->schedule(t + kHiddenFrameDelayMs, [plan, origin](uint64_t t2) {
      service::ClientContext ctx2{plan->captured.session_id, plan->captured.ip,
                                  service::Truth::Fraud};
      extractor::InProcessFetcher fetcher(*plan->svc);
      extractor::Extractor ex(fetcher, ctx2, origin);
      const auto& pages = plan->target->pages;
      const std::string& page = pages[plan->rng->below(pages.size())];
      extractor::ExtractionResult res = ex.run_extraction(
          plan->target->base_url + page, plan->target->base_url, t2);
      if (!res.complete() || res.link_urls.empty()) {
        if (plan->ok_out) *plan->ok_out = false;
        return;  // hijack ends with no action
      }
      if (plan->ok_out) *plan->ok_out = true;
      plan->links = res.link_urls;
      if (plan->stats) plan->stats->visits++;
      hijack_decide_step(plan, t2);
    });
  });
}

}  // namespace

void SessionProfile::validate() const {
  if (click_propensity < 0 || click_propensity > 1)
    fail(ErrorCode::ConfigError, "click_propensity outside [0,1]");
  if (pages_per_visit_p <= 0 || pages_per_visit_p > 1)
    fail(ErrorCode::ConfigError, "pages_per_visit_p outside (0,1]");
  if (dwell_sigma_log < 0)
    fail(ErrorCode::ConfigError, "dwell_sigma_log must be >= 0");
}

void FraudPolicy::validate() const {
  if (p_wait < 0 || p_extra_visit < 0 || p_wait + p_extra_visit > 1.0)
    fail(ErrorCode::ConfigError, "p_wait + p_extra_visit must stay within [0,1]");
  if (target_ctr_cap <= 0 || target_ctr_cap > 1)
    fail(ErrorCode::ConfigError, "target_ctr_cap outside (0,1]");
  if (boost_ratio < 0) fail(ErrorCode::ConfigError, "boost_ratio must be >= 0");
  if (click_budget < 0) fail(ErrorCode::ConfigError, "click_budget must be >= 0");
  if (max_waits < 0) fail(ErrorCode::ConfigError, "max_waits must be >= 0");
}

std::string_view fraud_action_name(FraudAction a) {
  switch (a) {
    case FraudAction::Wait: return "wait";
    case FraudAction::ExtraVisit: return "extra_visit";
    case FraudAction::Skip: return "skip";
    case FraudAction::Click: return "click";
  }
  return "skip";
}

FraudAction decide_action(const FraudPolicy& policy, const SiteStats& stats,
                          Rng& rng) {
  double allowed_ctr = (1.0 + policy.target_ctr_cap) * stats.baseline_ctr;
  bool budget_left = stats.fraud_clicks_today < policy.click_budget;
  bool under_cap =
      double(stats.clicks + 1) / double(stats.visits + 1) <= allowed_ctr;
  if (budget_left && under_cap) return FraudAction::Click;
  double u = rng.u01();
  if (u < policy.p_wait) return FraudAction::Wait;
  if (u < policy.p_wait + policy.p_extra_visit) return FraudAction::ExtraVisit;
  return FraudAction::Skip;
}

std::vector<service::Event> spawn_legit_session(
    service::AdService& svc, const SessionProfile& profile,
    const service::PublisherSite& site, Rng& rng, uint64_t start_ts) {
  if (profile.behavior != Behavior::Legit)
    fail(ErrorCode::BadParam, "profile is not Legit");
  profile.validate();
  size_t before = svc.events().size();
  Scheduler sched;
  schedule_legit_session(svc, sched, std::make_shared<SessionProfile>(profile),
                         &site, rng, start_ts);
  sched.run_until(~0ull);
  return {svc.events().begin() + before, svc.events().end()};
}

HijackOutcome hijack_session(service::AdService& svc,
                             const SessionProfile& captured,
                             const std::string& capture_site_id,
                             const std::string& capture_page,
                             const service::PublisherSite& target,
                             const FraudPolicy& policy, SiteStats& stats,
                             Rng& rng, uint64_t start_ts) {
  if (captured.behavior != Behavior::Captured)
    fail(ErrorCode::BadParam, "profile is not Captured");
  policy.validate();
  size_t before = svc.events().size();
  HijackOutcome out;
  Scheduler sched;
  auto plan = std::make_shared<HijackPlan>();
  plan->svc = &svc;
  plan->sched = &sched;
  plan->captured = captured;
  plan->target = &target;
  plan->policy = &policy;
  plan->stats = &stats;
  plan->rng = &rng;
  plan->scenario_start = start_ts;
  plan->actions = &out.actions;
  plan->ok_out = &out.extraction_ok;
  schedule_hijack_session(plan, capture_site_id, capture_page, start_ts);
  sched.run_until(~0ull);
  out.events.assign(svc.events().begin() + before, svc.events().end());
  return out;
}

std::vector<service::Event> boost_traffic(service::AdService& svc,
                                          const service::PublisherSite& target,
                                          int n_visits, Rng& rng,
                                          uint64_t start_ts, uint64_t end_ts) {
  if (n_visits < 0) fail(ErrorCode::BadParam, "n_visits must be >= 0");
  size_t before = svc.events().size();
  Scheduler sched;
  // density grows linearly with t: inverse-cdf sampling via sqrt
  std::vector<uint64_t> times;
  times.reserve(n_visits);
  double span = double(end_ts - start_ts);
  for (int i = 0; i < n_visits; ++i)
    times.push_back(start_ts +
                    static_cast<uint64_t>(span * std::sqrt(rng.u01())));
  std::sort(times.begin(), times.end());
  for (int i = 0; i < n_visits; ++i) {
    std::string session = "B-" + std::to_string(i);
    std::string ip = capture_ip(rng.below(1u << 22));
    const std::string& page = target.pages[rng.below(target.pages.size())];
    sched.schedule(times[i], [&svc, &target, session, ip, page](uint64_t t) {
      service::ClientContext ctx{session, ip, service::Truth::Fraud};
      svc.fetch_page(target.site_id, page, ctx, t);
    });
  }
  sched.run_until(~0ull);
  return {svc.events().begin() + before, svc.events().end()};
}

void ScenarioConfig::validate() const {
  if (duration_hours <= 0) fail(ErrorCode::ConfigError, "duration must be > 0");
  if (warmup_hours < 0 || warmup_hours >= duration_hours)
    fail(ErrorCode::ConfigError, "warmup must sit inside the scenario duration");
  if (sites.empty()) fail(ErrorCode::ConfigError, "scenario needs sites");
  for (const auto& s : sites) s.validate();
  legit_profile.validate();
  fraud_policy.validate();
  if (n_legit_users < 0) fail(ErrorCode::ConfigError, "n_legit_users must be >= 0");
  if (n_capture_sites < 0)
    fail(ErrorCode::ConfigError, "n_capture_sites must be >= 0");
  if (capture_visit_rate < 0)
    fail(ErrorCode::ConfigError, "capture_visit_rate must be >= 0");
  if (capture_ip_pool < 1)
    fail(ErrorCode::ConfigError, "capture_ip_pool must be >= 1");
  if (n_capture_sites > 0 && !fraud_target_site.empty()) {
    bool found = false;
    for (const auto& s : sites) found = found || s.site_id == fraud_target_site;
    if (!found)
      fail(ErrorCode::ConfigError,
           "fraud_target_site " + fraud_target_site + " is not a scenario site");
  }
}

ScenarioRun run_scenario(const ScenarioConfig& config) {
  config.validate();

  service::ServiceConfig svc_cfg;
  svc_cfg.key =
      "sk-" + sha256_hex("adlab-scenario-" + std::to_string(config.seed))
                  .substr(0, 32);
  service::AdService svc(svc_cfg);
  for (const auto& s : config.sites) svc.register_site(s);
  for (const auto& c : config.campaigns) svc.register_campaign(c);

  // capture sites: one page each, their own non-targeted ad account
  std::vector<std::string> capture_ids;
  for (int i = 0; i < config.n_capture_sites; ++i) {
    service::PublisherSite cap;
    cap.site_id = "capture" + std::to_string(i);
    cap.base_url = "http://capture" + std::to_string(i) + ".mock";
    cap.pages = {"/index.html"};
    cap.baseline_popularity = std::max(config.capture_visit_rate, 1e-9);
    cap.ad_config = adnet::make_ad_config(
        "pub-capture" + std::to_string(i), "CAPTURE" + std::to_string(i), 1,
        336, 280);
    svc.register_site(cap);
    capture_ids.push_back(cap.site_id);
  }

  Rng rng(config.seed);
  Scheduler sched;
  StatsTracker tracker(svc);
  uint64_t t0 = config.start_ms;
  uint64_t t_end = t0 + config.duration_ms();
  uint64_t warmup_end = t0 + config.warmup_ms();

  std::vector<SessionProfile> users(std::max(config.n_legit_users, 0));
  for (int u = 0; u < config.n_legit_users; ++u) {
    users[u] = config.legit_profile;
    users[u].behavior = Behavior::Legit;
    users[u].ip = legit_ip(u);
  }
  std::vector<uint64_t> user_session_counter(users.size(), 0);

  // arrival loops; held here so the self-scheduling closures stay valid
  struct ArrivalLoop {
    std::function<void(uint64_t)> fn;
  };
  std::vector<std::shared_ptr<ArrivalLoop>> loops;

  // per-site Poisson visit arrivals over the whole run; each picks a user
  if (config.n_legit_users > 0) {
    for (const auto& site : config.sites) {
      auto loop = std::make_shared<ArrivalLoop>();
      loops.push_back(loop);
      ArrivalLoop* self = loop.get();
      const service::PublisherSite* site_ptr = svc.find_site(site.site_id);
      double mean_gap_ms = 3600e3 / site.baseline_popularity;
      self->fn = [&svc, &sched, &rng, &users, &user_session_counter, site_ptr,
                  mean_gap_ms, t_end, self](uint64_t now) {
        uint64_t u = rng.below(users.size());
        auto profile = std::make_shared<SessionProfile>(users[u]);
        profile->session_id = "L" + std::to_string(u) + "-" +
                              std::to_string(user_session_counter[u]++);
        schedule_legit_session(svc, sched, profile, site_ptr, rng, now);
        uint64_t next = now + static_cast<uint64_t>(rng.exponential(mean_gap_ms));
        if (next < t_end) sched.schedule(next, self->fn);
      };
      uint64_t first = t0 + static_cast<uint64_t>(rng.exponential(mean_gap_ms));
      if (first < t_end) sched.schedule(first, self->fn);
    }
  }

  // baseline CTRs freeze at the end of the warm-up
  sched.schedule(warmup_end, [&tracker](uint64_t) { tracker.freeze_baselines(); });

  // capture-site visitor arrivals drive hijacked sessions after warm-up
  const service::PublisherSite* target = nullptr;
  std::string target_id = config.fraud_target_site.empty()
                              ? config.sites.front().site_id
                              : config.fraud_target_site;
  target = svc.find_site(target_id);
  auto hijack_counter = std::make_shared<uint64_t>(0);
  if (target && config.capture_visit_rate > 0) {
    for (const auto& cap_id : capture_ids) {
      auto loop = std::make_shared<ArrivalLoop>();
      loops.push_back(loop);
      ArrivalLoop* self = loop.get();
      double mean_gap_ms = 3600e3 / config.capture_visit_rate;
      self->fn = [&svc, &sched, &rng, &tracker, &config, target, cap_id,
                  mean_gap_ms, t0, t_end, hijack_counter, self](uint64_t now) {
        uint64_t n = (*hijack_counter)++;
        auto plan = std::make_shared<HijackPlan>();
        plan->svc = &svc;
        plan->sched = &sched;
        plan->captured = config.legit_profile;
        plan->captured.behavior = Behavior::Captured;
        plan->captured.session_id = "H-" + std::to_string(n);
        plan->captured.ip =
            capture_ip(rng.below(uint64_t(config.capture_ip_pool)));
        plan->target = target;
        plan->policy = &config.fraud_policy;
        plan->tracker = &tracker;
        plan->rng = &rng;
        plan->scenario_start = t0;
        schedule_hijack_session(plan, cap_id, "/index.html", now);
        uint64_t next = now + static_cast<uint64_t>(rng.exponential(mean_gap_ms));
        if (next < t_end) sched.schedule(next, self->fn);
      };
      uint64_t first =
          warmup_end + static_cast<uint64_t>(rng.exponential(mean_gap_ms));
      if (first < t_end) sched.schedule(first, self->fn);
    }
  }

  // background traffic boost, ramping up over the post-warm-up span
  if (target && config.fraud_policy.boost_ratio > 0 &&
      config.fraud_policy.click_budget > 0) {
    double days = double(t_end - warmup_end) / double(kDayMs);
    int n_boost = static_cast<int>(config.fraud_policy.boost_ratio *
                                   config.fraud_policy.click_budget * days);
    std::vector<uint64_t> times;
    times.reserve(n_boost);
    double span = double(t_end - warmup_end);
    for (int i = 0; i < n_boost; ++i)
      times.push_back(warmup_end +
                      static_cast<uint64_t>(span * std::sqrt(rng.u01())));
    std::sort(times.begin(), times.end());
    for (int i = 0; i < n_boost; ++i) {
      std::string session = "B-" + std::to_string(i);
      std::string ip = capture_ip(rng.below(uint64_t(config.capture_ip_pool)));
      const std::string& page = target->pages[rng.below(target->pages.size())];
      sched.schedule(times[i], [&svc, target, session, ip, page](uint64_t t) {
        service::ClientContext ctx{session, ip, service::Truth::Fraud};
        svc.fetch_page(target->site_id, page, ctx, t);
      });
    }
  }

  sched.run_until(t_end);

  ScenarioRun run;
  run.events = svc.events();
  run.warmup_end_ts = warmup_end;
  run.thresholds = config.detection_thresholds;
  return run;
}

namespace {

using nlohmann::json;

adnet::AdColors colors_from_json(const json& j) {
  adnet::AdColors c;
  c.border = j.value("border", c.border);
  c.bg = j.value("bg", c.bg);
  c.link = j.value("link", c.link);
  c.text = j.value("text", c.text);
  c.url = j.value("url", c.url);
  return c;
}

adnet::AdConfig ad_config_from_json(const json& j) {
  adnet::AdConfig c = adnet::make_ad_config(
      j.at("client_id").get<std::string>(), j.value("channel", ""),
      j.value("max_num_ads", 1), j.value("width", 336), j.value("height", 280),
      j.value("language", "en"),
      adnet::safe_level_from(j.value("safe_level", "high")),
      j.contains("colors") ? colors_from_json(j["colors"]) : adnet::AdColors{});
  c.encoding = j.value("encoding", c.encoding);
  return c;
}

json ad_config_to_json(const adnet::AdConfig& c) {
  return json{{"client_id", c.client_id},
              {"channel", c.channel},
              {"ad_type", std::string(adnet::ad_type_name(c.ad_type))},
              {"max_num_ads", c.max_num_ads},
              {"language", c.language},
              {"safe_level", std::string(adnet::safe_level_name(c.safe_level))},
              {"encoding", c.encoding},
              {"width", c.width},
              {"height", c.height},
              {"colors",
               {{"border", c.colors.border},
                {"bg", c.colors.bg},
                {"link", c.colors.link},
                {"text", c.colors.text},
                {"url", c.colors.url}}}};
}

}  // namespace

ScenarioConfig scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("bad scenario json: ") + e.what());
  }
  ScenarioConfig c;
  try {
    c.seed = j.value("seed", 1ull);
    c.start_ms = j.value("start_ms", 0ull);
    c.duration_hours = j.at("duration_hours").get<double>();
    c.warmup_hours = j.value("warmup_hours", 0.0);
    for (const auto& js : j.value("sites", json::array())) {
      service::PublisherSite s;
      s.site_id = js.at("site_id").get<std::string>();
      s.base_url = js.at("base_url").get<std::string>();
      for (const auto& p : js.at("pages")) s.pages.push_back(p.get<std::string>());
      s.baseline_popularity = js.value("baseline_popularity", 1.0);
      s.ad_config = ad_config_from_json(js.at("ad_config"));
      c.sites.push_back(std::move(s));
    }
    for (const auto& jc : j.value("campaigns", json::array())) {
      adnet::Campaign cam;
      cam.id = jc.at("id").get<std::string>();
      cam.advertiser_id = jc.value("advertiser_id", "");
      cam.landing_url = jc.at("landing_url").get<std::string>();
      for (const auto& t : jc.value("channel_targets", json::array()))
        cam.channel_targets.push_back(t.get<std::string>());
      cam.headline = jc.value("headline", "");
      c.campaigns.push_back(std::move(cam));
    }
    c.n_legit_users = j.value("n_legit_users", 0);
    if (j.contains("legit_profile")) {
      const auto& jp = j["legit_profile"];
      c.legit_profile.pages_per_visit_p =
          jp.value("pages_per_visit_p", c.legit_profile.pages_per_visit_p);
      c.legit_profile.dwell_mu_log =
          jp.value("dwell_mu_log", c.legit_profile.dwell_mu_log);
      c.legit_profile.dwell_sigma_log =
          jp.value("dwell_sigma_log", c.legit_profile.dwell_sigma_log);
      c.legit_profile.click_propensity =
          jp.value("click_propensity", c.legit_profile.click_propensity);
    }
    c.n_capture_sites = j.value("n_capture_sites", 0);
    c.capture_visit_rate = j.value("capture_visit_rate", 0.0);
    c.capture_ip_pool = j.value("capture_ip_pool", 1);
    c.fraud_target_site = j.value("fraud_target_site", "");
    if (j.contains("fraud_policy")) {
      const auto& jf = j["fraud_policy"];
      c.fraud_policy.p_wait = jf.value("p_wait", 0.0);
      c.fraud_policy.wait_mu_log = jf.value("wait_mu_log", 3.4);
      c.fraud_policy.wait_sigma_log = jf.value("wait_sigma_log", 0.6);
      c.fraud_policy.p_extra_visit = jf.value("p_extra_visit", 0.0);
      c.fraud_policy.target_ctr_cap = jf.value("target_ctr_cap", 1.0);
      c.fraud_policy.boost_ratio = jf.value("boost_ratio", 0.0);
      c.fraud_policy.click_budget = jf.value("click_budget", 0);
      c.fraud_policy.max_waits = jf.value("max_waits", 2);
    }
    if (j.contains("detection_thresholds"))
      c.detection_thresholds =
          detect::thresholds_from_json(j["detection_thresholds"].dump());
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("scenario field: ") + e.what());
  }
  c.validate();
  return c;
}

std::string scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["start_ms"] = c.start_ms;
  j["duration_hours"] = c.duration_hours;
  j["warmup_hours"] = c.warmup_hours;
  j["sites"] = json::array();
  for (const auto& s : c.sites) {
    json js;
    js["site_id"] = s.site_id;
    js["base_url"] = s.base_url;
    js["pages"] = s.pages;
    js["baseline_popularity"] = s.baseline_popularity;
    js["ad_config"] = ad_config_to_json(s.ad_config);
    j["sites"].push_back(std::move(js));
  }
  j["campaigns"] = json::array();
  for (const auto& cam : c.campaigns) {
    j["campaigns"].push_back(json{{"id", cam.id},
                                  {"advertiser_id", cam.advertiser_id},
                                  {"landing_url", cam.landing_url},
                                  {"channel_targets", cam.channel_targets},
                                  {"headline", cam.headline}});
  }
  j["n_legit_users"] = c.n_legit_users;
  j["legit_profile"] =
      json{{"pages_per_visit_p", c.legit_profile.pages_per_visit_p},
           {"dwell_mu_log", c.legit_profile.dwell_mu_log},
           {"dwell_sigma_log", c.legit_profile.dwell_sigma_log},
           {"click_propensity", c.legit_profile.click_propensity}};
  j["n_capture_sites"] = c.n_capture_sites;
  j["capture_visit_rate"] = c.capture_visit_rate;
  j["capture_ip_pool"] = c.capture_ip_pool;
  j["fraud_target_site"] = c.fraud_target_site;
  j["fraud_policy"] = json{{"p_wait", c.fraud_policy.p_wait},
                           {"wait_mu_log", c.fraud_policy.wait_mu_log},
                           {"wait_sigma_log", c.fraud_policy.wait_sigma_log},
                           {"p_extra_visit", c.fraud_policy.p_extra_visit},
                           {"target_ctr_cap", c.fraud_policy.target_ctr_cap},
                           {"boost_ratio", c.fraud_policy.boost_ratio},
                           {"click_budget", c.fraud_policy.click_budget},
                           {"max_waits", c.fraud_policy.max_waits}};
  j["detection_thresholds"] =
      json::parse(detect::thresholds_to_json(c.detection_thresholds));
  return j.dump(2) + "\n";
}

}  // namespace adlab::sim
