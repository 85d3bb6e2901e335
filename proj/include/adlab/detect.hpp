#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adlab/service.hpp"

namespace adlab::detect {

/// Truth-stripped projection of an event. Filters only ever see this view,
/// so ground-truth labels are unreachable by construction.
struct EventView {
  uint64_t seq = 0;
  service::EventKind kind = service::EventKind::Visit;
  uint64_t ts = 0;
  std::string session_id;
  std::string ip;
  std::string site_id;
  std::string page;
  int64_t dwell_ms = -1;
};

std::vector<EventView> strip_truth(const std::vector<service::Event>& events);
using LogView = std::span<const EventView>;

enum class FilterId { DwellIp, RateRatio, AdvertiserPanel, BehaviorClass };
enum class Outcome { Pass, Flag };
enum class Klass { Valid, InvalidAuto, NeedsInvestigation };

std::string_view filter_id_name(FilterId f);
std::string_view outcome_name(Outcome o);
std::string_view klass_name(Klass k);
FilterId filter_id_from(std::string_view s);
Klass klass_from(std::string_view s);

/// All detection constants. Scores are scaled so that > 1.0 means the
/// filter's rule fires; the gray band sits just under that boundary.
struct Thresholds {
  int64_t t_min_ms = 2000;              // minimum plausible dwell
  int64_t repeat_window_ms = 3'600'000; // same-ip same-site re-click window
  double z_max = 3.0;                   // click-rate deviation cutoff
  int64_t rate_window_ms = 60'000;      // click-rate bucketing window
  int rate_baseline_windows = 60;       // trailing windows forming the baseline
  int rate_min_baseline = 10;           // minimum trailing windows to evaluate
  double rate_sigma_floor = 1.5;        // count-noise floor for the z denominator
  int k_clicks_per_ip_day = 20;
  double day_growth_max = 3.0;          // day-over-day site click growth
  double d_max = 3.0;                   // behavior distance cutoff
  int n_min_sessions = 20;              // minimum warm-up clicking sessions
  double experience_match_eps = 0.05;   // near-exact pattern match
  double gray_band = 0.05;              // combined score within 5% of the boundary
};

struct FilterVerdict {
  uint64_t click_ref = 0;  // event seq of the click
  FilterId filter_id = FilterId::DwellIp;
  Outcome outcome = Outcome::Pass;
  double score = 0.0;
  std::string reason;  // non-empty iff Flag
};

struct Verdict {
  uint64_t click_ref = 0;
  Klass klass = Klass::Valid;
  double combined_score = 0.0;
  std::vector<FilterId> contributing;
};

struct DetectionReport {
  uint64_t clicks_total = 0;
  uint64_t valid = 0;
  uint64_t invalid_auto = 0;
  uint64_t needs_investigation = 0;
  // confusion vs truth (positive = fraud, predicted positive = InvalidAuto)
  uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 1.0;
  double recall = 1.0;
  double invalid_fraction = 0.0;
  double investigation_fraction = 0.0;
  struct PerFilter {
    uint64_t flags = 0;
    uint64_t flags_on_fraud = 0;
    uint64_t flags_on_legit = 0;
  };
  std::map<FilterId, PerFilter> per_filter;
};

/// Flags clicks with dwell below t_min and clicks whose ip already clicked
/// the same site within the repeat window. One verdict per click.
std::vector<FilterVerdict> dwell_ip_filter(LogView log, const Thresholds& t);

/// Per-site click-rate windows scored against a trailing baseline; every
/// click inside a window with z > z_max is flagged. Throws BaselineUnavailable
/// when no window has enough trailing history.
std::vector<FilterVerdict> rate_ratio_filter(LogView log, const Thresholds& t);

/// Per-window z-scores as the rate filter computes them, keyed
/// (site, window index). Exposed for reporting and scenario assertions.
std::map<std::pair<std::string, uint64_t>, double> rate_window_zscores(
    LogView log, const Thresholds& t);

struct PanelItem {
  std::string kind;     // "ip" or "site"
  std::string id;
  uint64_t day = 0;
  double value = 0.0;   // clicks for ips, growth ratio for sites
};

struct PanelResult {
  std::vector<FilterVerdict> verdicts;
  std::vector<PanelItem> panel;
};

/// Advertiser-side review panel: ips above K clicks/day and sites whose
/// day-over-day click growth exceeds R; their clicks are flagged.
PanelResult advertiser_panel_filter(LogView log, const Thresholds& t);

/// Centroid-distance session classifier. Features per session: pages, mean
/// click dwell (log scale), clicks, revisit rate. The centroid and robust
/// scales come from the warm-up's clicking sessions (fully inside
/// [0, training_end_ts)); later clicking sessions farther than d_max are
/// robot-classified and their clicks flagged. Flagged patterns feed an
/// experience store that is matched before re-scoring, so a seen robot shape
/// keeps flagging without a re-fit.
/// Throws InsufficientTraining when the warm-up has < n_min clicking sessions.
std::vector<FilterVerdict> behavior_classifier(LogView log,
                                               uint64_t training_end_ts,
                                               const Thresholds& t);

/// Any Flag -> InvalidAuto. All-pass clicks whose combined (max) score falls
/// within the gray band -> NeedsInvestigation, else Valid.
std::vector<Verdict> aggregate_verdicts(
    const std::vector<std::vector<FilterVerdict>>& filter_verdicts,
    const Thresholds& t);

/// Scores verdicts against ground truth. `truth` maps click seq -> label and
/// must align 1:1 with the verdicts (TruthMismatch otherwise).
DetectionReport evaluate(const std::vector<Verdict>& verdicts,
                         const std::map<uint64_t, service::Truth>& truth);

/// Attaches per-filter fraud/legit flag splits to a report.
void tally_filter_flags(DetectionReport& report,
                        const std::vector<std::vector<FilterVerdict>>& fv,
                        const std::map<uint64_t, service::Truth>& truth);

// -- persistence --
std::string serialize_verdicts(const std::vector<Verdict>& verdicts);
std::vector<Verdict> parse_verdicts(std::string_view text);
std::string serialize_filter_verdicts(const std::vector<std::vector<FilterVerdict>>& fv);
std::vector<std::vector<FilterVerdict>> parse_filter_verdicts(std::string_view text);
Thresholds thresholds_from_json(const std::string& text);
std::string thresholds_to_json(const Thresholds& t);

}  // namespace adlab::detect
