#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <string>
#include <vector>

#include "adlab/detect.hpp"
#include "adlab/extractor.hpp"
#include "adlab/rng.hpp"
#include "adlab/service.hpp"

namespace adlab::sim {

enum class Behavior { Legit, Captured };

/// Browsing habits of one simulated visitor population.
struct SessionProfile {
  std::string session_id;
  std::string ip;
  Behavior behavior = Behavior::Legit;
  double pages_per_visit_p = 0.4;   // geometric(p) on {1,2,...}
  double dwell_mu_log = 3.4;        // lognormal of dwell seconds
  double dwell_sigma_log = 0.6;
  double click_propensity = 0.02;  // probability the session clicks at all

  void validate() const;
};

/// The automatic-click strategy knobs: when a hijacked session waits, pads
/// the visit count, skips, or clicks.
struct FraudPolicy {
  double p_wait = 0.0;
  double wait_mu_log = 3.4;   // lognormal of wait seconds
  double wait_sigma_log = 0.6;
  double p_extra_visit = 0.0;
  double target_ctr_cap = 1.0;   // fraction of headroom above baseline CTR
  double boost_ratio = 0.0;      // extra no-click visits per budgeted click
  int click_budget = 0;          // max fraud clicks per sim-day
  int max_waits = 2;             // wait re-entries before giving up

  void validate() const;
};

enum class FraudAction { Wait, ExtraVisit, Skip, Click };
std::string_view fraud_action_name(FraudAction a);

/// Rolling fraud-side view of the target site, fed to decide_action.
struct SiteStats {
  uint64_t visits = 0;        // fraud-inclusive visit count
  uint64_t clicks = 0;        // fraud-inclusive click count
  double baseline_ctr = 0.0;  // clicks per visit observed during warm-up
  int fraud_clicks_today = 0;
  int click_budget = 0;
};

/// Click is chosen only when the would-be click keeps the site CTR within
/// (1 + target_ctr_cap) * baseline_ctr and the daily budget has room;
/// otherwise Wait / ExtraVisit / Skip by policy probabilities.
FraudAction decide_action(const FraudPolicy& policy, const SiteStats& stats,
                          Rng& rng);

struct ScenarioConfig {
  uint64_t seed = 1;
  uint64_t start_ms = 0;
  double duration_hours = 1.0;
  double warmup_hours = 0.0;
  std::vector<service::PublisherSite> sites;
  std::vector<adnet::Campaign> campaigns;
  int n_legit_users = 0;
  SessionProfile legit_profile;  // session_id/ip filled per user
  int n_capture_sites = 0;
  double capture_visit_rate = 0.0;  // visitor arrivals per hour per capture site
  int capture_ip_pool = 1;
  std::string fraud_target_site;  // defaults to first site
  FraudPolicy fraud_policy;
  detect::Thresholds detection_thresholds;

  void validate() const;  // throws ConfigError
  uint64_t duration_ms() const { return static_cast<uint64_t>(duration_hours * 3600e3); }
  uint64_t warmup_ms() const { return static_cast<uint64_t>(warmup_hours * 3600e3); }
};

/// Discrete-event scheduler: handlers fire in (time, schedule order).
class Scheduler {
 public:
  using Handler = std::function<void(uint64_t now)>;

  void schedule(uint64_t at, Handler fn) {
    queue_.push(Item{at, next_id_++, std::move(fn)});
  }

  void run_until(uint64_t end) {
    while (!queue_.empty() && queue_.top().at <= end) {
      Item item = queue_.top();
      queue_.pop();
      now_ = item.at;
      item.fn(now_);
    }
    now_ = end;
  }

  uint64_t now() const { return now_; }

 private:
  struct Item {
    uint64_t at;
    uint64_t id;
    Handler fn;
    bool operator>(const Item& o) const {
      return at != o.at ? at > o.at : id > o.id;
    }
  };
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue_;
  uint64_t next_id_ = 0;
  uint64_t now_ = 0;
};

struct HijackOutcome {
  std::vector<service::Event> events;
  std::vector<FraudAction> actions;
  bool extraction_ok = false;
};

/// One legitimate browsing session on `site`, driven to completion on a
/// private scheduler. Returns the events it caused.
std::vector<service::Event> spawn_legit_session(service::AdService& svc,
                                                const SessionProfile& profile,
                                                const service::PublisherSite& site,
                                                Rng& rng, uint64_t start_ts);

/// One captured session: visit to the capture page, hidden-frame extraction
/// against the target, then the wait/visit/skip/click policy.
HijackOutcome hijack_session(service::AdService& svc,
                             const SessionProfile& captured,
                             const std::string& capture_site_id,
                             const std::string& capture_page,
                             const service::PublisherSite& target,
                             const FraudPolicy& policy, SiteStats& stats,
                             Rng& rng, uint64_t start_ts);

/// n_visits no-click background visits with a linearly increasing rate over
/// [start_ts, end_ts).
std::vector<service::Event> boost_traffic(service::AdService& svc,
                                          const service::PublisherSite& target,
                                          int n_visits, Rng& rng,
                                          uint64_t start_ts, uint64_t end_ts);

struct ScenarioRun {
  std::vector<service::Event> events;
  uint64_t warmup_end_ts = 0;
  detect::Thresholds thresholds;
};

/// Runs the whole scenario on one clock and one seeded stream; the returned
/// log is a pure function of the config.
ScenarioRun run_scenario(const ScenarioConfig& config);

// -- config (de)serialization: JSON documents --
ScenarioConfig scenario_from_json(const std::string& text);  // throws ConfigError
std::string scenario_to_json(const ScenarioConfig& config);

}  // namespace adlab::sim
