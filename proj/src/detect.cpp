#include "adlab/detect.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "adlab/error.hpp"
#include "json.hpp"

namespace adlab::detect {

namespace {

constexpr double kScoreCap = 1e6;

double capped(double v) { return std::min(v, kScoreCap); }

std::string format_score(double v) {
  char buf[40];
  snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct SessionFeatures {
  std::string session_id;
  uint64_t start_ts = 0;
  uint64_t end_ts = 0;
  double pages = 0;
  double log_dwell = 0;  // log1p(mean click dwell, seconds)
  double clicks = 0;
  double revisit_rate = 0;
  std::vector<uint64_t> click_refs;

  std::array<double, 4> vec() const {
    return {pages, log_dwell, clicks, revisit_rate};
  }
};

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string_view filter_id_name(FilterId f) {
  switch (f) {
    case FilterId::DwellIp: return "dwell_ip";
    case FilterId::RateRatio: return "rate_ratio";
    case FilterId::AdvertiserPanel: return "advertiser_panel";
    case FilterId::BehaviorClass: return "behavior_class";
  }
  return "dwell_ip";
}

std::string_view outcome_name(Outcome o) {
  return o == Outcome::Pass ? "pass" : "flag";
}

std::string_view klass_name(Klass k) {
  switch (k) {
    case Klass::Valid: return "valid";
    case Klass::InvalidAuto: return "invalid_auto";
    case Klass::NeedsInvestigation: return "needs_investigation";
  }
  return "valid";
}

FilterId filter_id_from(std::string_view s) {
  if (s == "dwell_ip") return FilterId::DwellIp;
  if (s == "rate_ratio") return FilterId::RateRatio;
  if (s == "advertiser_panel") return FilterId::AdvertiserPanel;
  if (s == "behavior_class") return FilterId::BehaviorClass;
  fail(ErrorCode::BadParam, "unknown filter id: " + std::string(s));
}

Klass klass_from(std::string_view s) {
  if (s == "valid") return Klass::Valid;
  if (s == "invalid_auto") return Klass::InvalidAuto;
  if (s == "needs_investigation") return Klass::NeedsInvestigation;
  fail(ErrorCode::BadParam, "unknown verdict class: " + std::string(s));
}

std::vector<EventView> strip_truth(const std::vector<service::Event>& events) {
  std::vector<EventView> out;
  out.reserve(events.size());
  for (const auto& e : events) {
    out.push_back({e.seq, e.kind, e.ts, e.session_id, e.ip, e.site_id, e.page,
                   e.dwell_ms});
  }
  return out;
}

std::vector<FilterVerdict> dwell_ip_filter(LogView log, const Thresholds& t) {
  std::vector<FilterVerdict> out;
  std::map<std::pair<std::string, std::string>, uint64_t> last_click;
  for (const EventView& e : log) {
    if (e.kind != service::EventKind::Click) continue;
    FilterVerdict v;
    v.click_ref = e.seq;
    v.filter_id = FilterId::DwellIp;

    int64_t dwell = std::max<int64_t>(e.dwell_ms, 0);
    double dwell_score =
        dwell == 0 ? kScoreCap : capped(double(t.t_min_ms) / double(dwell));
    bool dwell_bad = dwell < t.t_min_ms;

    double ip_score = 0.0;
    bool repeat_bad = false;
    uint64_t gap = 0;
    auto key = std::make_pair(e.ip, e.site_id);
    auto it = last_click.find(key);
    if (it != last_click.end()) {
      gap = e.ts - it->second;
      ip_score = gap == 0 ? kScoreCap
                          : capped(double(t.repeat_window_ms) / double(gap));
      repeat_bad = gap < static_cast<uint64_t>(t.repeat_window_ms);
    }
    last_click[key] = e.ts;

    v.score = std::max(dwell_score, ip_score);
    if (dwell_bad || repeat_bad) {
      v.outcome = Outcome::Flag;
      std::string why;
      if (dwell_bad)
        why = "dwell " + std::to_string(dwell) + "ms below " +
              std::to_string(t.t_min_ms) + "ms";
      if (repeat_bad) {
        if (!why.empty()) why += "; ";
        why += "same ip re-clicked site after " + std::to_string(gap) + "ms";
      }
      v.reason = why;
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::map<std::pair<std::string, uint64_t>, double> rate_window_zscores(
    LogView log, const Thresholds& t) {
  std::map<std::pair<std::string, uint64_t>, double> z;
  if (log.empty()) return z;
  uint64_t t0 = log.front().ts;
  uint64_t t_end = log.back().ts;
  uint64_t n_windows = (t_end - t0) / t.rate_window_ms + 1;

  std::map<std::string, std::vector<uint64_t>> counts;  // site -> per-window clicks
  std::set<std::string> sites;
  for (const EventView& e : log) sites.insert(e.site_id);
  for (const auto& s : sites) counts[s].assign(n_windows, 0);
  for (const EventView& e : log) {
    if (e.kind != service::EventKind::Click) continue;
    counts[e.site_id][(e.ts - t0) / t.rate_window_ms]++;
  }

  for (const auto& [site, c] : counts) {
    for (uint64_t w = 0; w < n_windows; ++w) {
      uint64_t lo = w > static_cast<uint64_t>(t.rate_baseline_windows)
                        ? w - t.rate_baseline_windows
                        : 0;
      uint64_t n = w - lo;
      if (n < static_cast<uint64_t>(t.rate_min_baseline)) continue;
      double mean = 0;
      for (uint64_t i = lo; i < w; ++i) mean += c[i];
      mean /= double(n);
      double var = 0;
      for (uint64_t i = lo; i < w; ++i) var += (c[i] - mean) * (c[i] - mean);
      double sd = std::sqrt(var / double(n));
      double sigma = std::max({sd, std::sqrt(mean), t.rate_sigma_floor});
      z[{site, w}] = (double(c[w]) - mean) / sigma;
    }
  }
  return z;
}

std::vector<FilterVerdict> rate_ratio_filter(LogView log, const Thresholds& t) {
  if (log.empty()) fail(ErrorCode::BaselineUnavailable, "empty log");
  uint64_t t0 = log.front().ts;
  uint64_t n_windows = (log.back().ts - t0) / t.rate_window_ms + 1;
  if (n_windows <= static_cast<uint64_t>(t.rate_min_baseline))
    fail(ErrorCode::BaselineUnavailable,
         "log spans " + std::to_string(n_windows) + " windows, need more than " +
             std::to_string(t.rate_min_baseline));
  auto z = rate_window_zscores(log, t);

  std::vector<FilterVerdict> out;
  for (const EventView& e : log) {
    if (e.kind != service::EventKind::Click) continue;
    FilterVerdict v;
    v.click_ref = e.seq;
    v.filter_id = FilterId::RateRatio;
    uint64_t w = (e.ts - t0) / t.rate_window_ms;
    auto it = z.find({e.site_id, w});
    if (it != z.end()) {
      double zi = it->second;
      v.score = capped(std::max(zi, 0.0) / t.z_max);
      if (zi > t.z_max) {
        v.outcome = Outcome::Flag;
        v.reason = "click-rate z " + format_score(zi) + " above " +
                   format_score(t.z_max) + " in window " + std::to_string(w);
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

PanelResult advertiser_panel_filter(LogView log, const Thresholds& t) {
  PanelResult res;
  if (log.empty()) return res;
  constexpr uint64_t kDayMs = 86'400'000;
  uint64_t t0 = log.front().ts;

  std::map<std::pair<std::string, uint64_t>, uint64_t> ip_day_clicks;
  std::map<std::pair<std::string, uint64_t>, uint64_t> site_day_clicks;
  for (const EventView& e : log) {
    if (e.kind != service::EventKind::Click) continue;
    uint64_t day = (e.ts - t0) / kDayMs;
    ip_day_clicks[{e.ip, day}]++;
    site_day_clicks[{e.site_id, day}]++;
  }

  std::set<std::pair<std::string, uint64_t>> flagged_ips, flagged_sites;
  for (const auto& [key, n] : ip_day_clicks) {
    if (n > static_cast<uint64_t>(t.k_clicks_per_ip_day)) {
      flagged_ips.insert(key);
      res.panel.push_back({"ip", key.first, key.second, double(n)});
    }
  }
  std::map<std::pair<std::string, uint64_t>, double> site_growth;
  for (const auto& [key, n] : site_day_clicks) {
    const auto& [site, day] = key;
    if (day == 0) continue;
    auto prev = site_day_clicks.find({site, day - 1});
    double prev_n = prev == site_day_clicks.end() ? 0.0 : double(prev->second);
    double growth = double(n) / std::max(prev_n, 1.0);
    site_growth[key] = growth;
    if (growth > t.day_growth_max) {
      flagged_sites.insert(key);
      res.panel.push_back({"site", site, day, growth});
    }
  }

  for (const EventView& e : log) {
    if (e.kind != service::EventKind::Click) continue;
    uint64_t day = (e.ts - t0) / kDayMs;
    FilterVerdict v;
    v.click_ref = e.seq;
    v.filter_id = FilterId::AdvertiserPanel;
    double ip_score =
        double(ip_day_clicks[{e.ip, day}]) / double(t.k_clicks_per_ip_day);
    double site_score = 0.0;
    auto g = site_growth.find({e.site_id, day});
    if (g != site_growth.end()) site_score = g->second / t.day_growth_max;
    v.score = capped(std::max(ip_score, site_score));
    bool ip_bad = flagged_ips.count({e.ip, day}) > 0;
    bool site_bad = flagged_sites.count({e.site_id, day}) > 0;
    if (ip_bad || site_bad) {
      v.outcome = Outcome::Flag;
      std::string why;
      if (ip_bad)
        why = "ip listed with " +
              std::to_string(ip_day_clicks[{e.ip, day}]) + " clicks on day " +
              std::to_string(day);
      if (site_bad) {
        if (!why.empty()) why += "; ";
        why += "site click growth " + format_score(site_growth[{e.site_id, day}]) +
               "x day-over-day";
      }
      v.reason = why;
    }
    res.verdicts.push_back(std::move(v));
  }
  return res;
}

std::vector<FilterVerdict> behavior_classifier(LogView log,
                                               uint64_t training_end_ts,
                                               const Thresholds& t) {
  std::map<std::string, SessionFeatures> by_session;
  std::map<std::string, std::set<std::pair<std::string, std::string>>> seen_pages;
  std::map<std::string, double> dwell_sum;
  std::vector<std::string> order;  // first-seen order

  for (const EventView& e : log) {
    auto it = by_session.find(e.session_id);
    if (it == by_session.end()) {
      SessionFeatures f;
      f.session_id = e.session_id;
      f.start_ts = e.ts;
      it = by_session.emplace(e.session_id, std::move(f)).first;
      order.push_back(e.session_id);
    }
    SessionFeatures& f = it->second;
    f.end_ts = e.ts;
    if (e.kind == service::EventKind::Visit) {
      f.pages += 1;
      seen_pages[e.session_id].insert({e.site_id, e.page});
    } else if (e.kind == service::EventKind::Click) {
      f.clicks += 1;
      f.click_refs.push_back(e.seq);
      dwell_sum[e.session_id] += double(std::max<int64_t>(e.dwell_ms, 0)) / 1000.0;
    }
  }
  for (auto& [sid, f] : by_session) {
    if (f.clicks > 0) f.log_dwell = std::log1p(dwell_sum[sid] / f.clicks);
    if (f.pages > 0)
      f.revisit_rate = 1.0 - double(seen_pages[sid].size()) / f.pages;
  }

  // only sessions that clicked carry verdicts, so the reference population
  // is the warm-up's clicking sessions
  std::vector<const SessionFeatures*> training;
  for (const auto& sid : order) {
    const SessionFeatures& f = by_session[sid];
    if (f.end_ts < training_end_ts && f.clicks > 0) training.push_back(&f);
  }
  if (training.size() < static_cast<size_t>(t.n_min_sessions))
    fail(ErrorCode::InsufficientTraining,
         "warm-up has " + std::to_string(training.size()) +
             " clicking sessions, need " + std::to_string(t.n_min_sessions));

  // robust center/scale per feature; floors keep count-valued and sparse
  // features from degenerating when most training values coincide
  constexpr double kScaleFloor[4] = {3.0, 0.5, 1.0, 0.5};
  std::array<double, 4> center{}, scale{};
  for (int i = 0; i < 4; ++i) {
    std::vector<double> vals;
    vals.reserve(training.size());
    for (const auto* f : training) vals.push_back(f->vec()[i]);
    center[i] = median_of(vals);
    std::vector<double> devs;
    devs.reserve(vals.size());
    for (double v : vals) devs.push_back(std::abs(v - center[i]));
    scale[i] = std::max(1.4826 * median_of(devs), kScaleFloor[i]);
  }

  auto normalized = [&](const SessionFeatures& f) {
    std::array<double, 4> nz{};
    auto x = f.vec();
    for (int i = 0; i < 4; ++i) nz[i] = (x[i] - center[i]) / scale[i];
    return nz;
  };
  auto distance = [](const std::array<double, 4>& a,
                     const std::array<double, 4>& b) {
    double sum = 0;
    for (int i = 0; i < 4; ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(sum);
  };

  std::vector<std::array<double, 4>> experience;
  std::vector<FilterVerdict> out;
  // sessions processed in first-appearance order == time order of the log
  for (const auto& sid : order) {
    const SessionFeatures& f = by_session[sid];
    if (f.click_refs.empty()) continue;
    bool in_training = f.end_ts < training_end_ts;
    double dist = 0.0;
    bool flagged = false;
    std::string reason;
    if (!in_training) {
      auto nz = normalized(f);
      std::array<double, 4> zero{};
      dist = distance(nz, zero);
      for (const auto& stored : experience) {
        if (distance(nz, stored) <= t.experience_match_eps) {
          flagged = true;
          reason = "matches stored robot pattern";
          break;
        }
      }
      if (!flagged && dist > t.d_max) {
        flagged = true;
        reason = "session distance " + format_score(dist) + " beyond " +
                 format_score(t.d_max);
        experience.push_back(nz);
      }
    }
    for (uint64_t ref : f.click_refs) {
      FilterVerdict v;
      v.click_ref = ref;
      v.filter_id = FilterId::BehaviorClass;
      v.score = capped(dist / t.d_max);
      if (flagged) {
        v.outcome = Outcome::Flag;
        v.reason = reason;
      }
      out.push_back(std::move(v));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.click_ref < b.click_ref; });
  return out;
}

std::vector<Verdict> aggregate_verdicts(
    const std::vector<std::vector<FilterVerdict>>& filter_verdicts,
    const Thresholds& t) {
  std::map<uint64_t, Verdict> by_ref;
  for (const auto& list : filter_verdicts) {
    for (const FilterVerdict& fv : list) {
      Verdict& v = by_ref[fv.click_ref];
      v.click_ref = fv.click_ref;
      v.combined_score = std::max(v.combined_score, fv.score);
      if (fv.outcome == Outcome::Flag) v.contributing.push_back(fv.filter_id);
    }
  }
  std::vector<Verdict> out;
  out.reserve(by_ref.size());
  for (auto& [ref, v] : by_ref) {
    (void)ref;
    std::sort(v.contributing.begin(), v.contributing.end());
    v.contributing.erase(
        std::unique(v.contributing.begin(), v.contributing.end()),
        v.contributing.end());
    if (!v.contributing.empty())
      v.klass = Klass::InvalidAuto;
    else if (v.combined_score > 1.0 - t.gray_band)
      v.klass = Klass::NeedsInvestigation;
    else
      v.klass = Klass::Valid;
    out.push_back(std::move(v));
  }
  return out;
}

DetectionReport evaluate(const std::vector<Verdict>& verdicts,
                         const std::map<uint64_t, service::Truth>& truth) {
  if (truth.size() != verdicts.size())
    fail(ErrorCode::TruthMismatch,
         "truth has " + std::to_string(truth.size()) + " clicks, verdicts " +
             std::to_string(verdicts.size()));
  DetectionReport r;
  r.clicks_total = verdicts.size();
  for (const Verdict& v : verdicts) {
    auto it = truth.find(v.click_ref);
    if (it == truth.end())
      fail(ErrorCode::TruthMismatch,
           "no truth for click " + std::to_string(v.click_ref));
    bool fraud = it->second == service::Truth::Fraud;
    bool predicted = v.klass == Klass::InvalidAuto;
    switch (v.klass) {
      case Klass::Valid: ++r.valid; break;
      case Klass::InvalidAuto: ++r.invalid_auto; break;
      case Klass::NeedsInvestigation: ++r.needs_investigation; break;
    }
    if (predicted && fraud) ++r.tp;
    else if (predicted && !fraud) ++r.fp;
    else if (!predicted && fraud) ++r.fn;
    else ++r.tn;
  }
  r.precision = (r.tp + r.fp) ? double(r.tp) / double(r.tp + r.fp) : 1.0;
  r.recall = (r.tp + r.fn) ? double(r.tp) / double(r.tp + r.fn) : 1.0;
  if (r.clicks_total) {
    r.invalid_fraction = double(r.invalid_auto) / double(r.clicks_total);
    r.investigation_fraction =
        double(r.needs_investigation) / double(r.clicks_total);
  }
  return r;
}

void tally_filter_flags(DetectionReport& report,
                        const std::vector<std::vector<FilterVerdict>>& fv,
                        const std::map<uint64_t, service::Truth>& truth) {
  for (const auto& list : fv) {
    for (const FilterVerdict& v : list) {
      auto& pf = report.per_filter[v.filter_id];
      if (v.outcome != Outcome::Flag) continue;
      ++pf.flags;
      auto it = truth.find(v.click_ref);
      if (it != truth.end() && it->second == service::Truth::Fraud)
        ++pf.flags_on_fraud;
      else
        ++pf.flags_on_legit;
    }
  }
  for (FilterId f : {FilterId::DwellIp, FilterId::RateRatio,
                     FilterId::AdvertiserPanel, FilterId::BehaviorClass})
    report.per_filter.try_emplace(f);
}

std::string serialize_verdicts(const std::vector<Verdict>& verdicts) {
  std::string out = "# click_seq\tklass\tscore\tcontributing\n";
  for (const Verdict& v : verdicts) {
    out += std::to_string(v.click_ref);
    out += '\t';
    out += klass_name(v.klass);
    out += '\t';
    out += format_score(v.combined_score);
    out += '\t';
    if (v.contributing.empty()) {
      out += '-';
    } else {
      for (size_t i = 0; i < v.contributing.size(); ++i) {
        if (i) out += ',';
        out += filter_id_name(v.contributing[i]);
      }
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string_view> split_cols(std::string_view line, char sep) {
  std::vector<std::string_view> cols;
  size_t p = 0;
  while (p <= line.size()) {
    size_t s = line.find(sep, p);
    if (s == std::string_view::npos) s = line.size();
    cols.push_back(line.substr(p, s - p));
    p = s + 1;
  }
  return cols;
}

uint64_t to_u64(std::string_view s) {
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    fail(ErrorCode::BadParam, "bad number: " + std::string(s));
  return v;
}

}  // namespace

std::vector<Verdict> parse_verdicts(std::string_view text) {
  std::vector<Verdict> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_cols(line, '\t');
    if (cols.size() != 4) fail(ErrorCode::BadParam, "bad verdict line");
    Verdict v;
    v.click_ref = to_u64(cols[0]);
    v.klass = klass_from(cols[1]);
    v.combined_score = std::stod(std::string(cols[2]));
    if (cols[3] != "-") {
      for (auto part : split_cols(cols[3], ','))
        v.contributing.push_back(filter_id_from(part));
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::string serialize_filter_verdicts(
    const std::vector<std::vector<FilterVerdict>>& fv) {
  std::string out = "# click_seq\tfilter\toutcome\tscore\treason\n";
  for (const auto& list : fv) {
    for (const FilterVerdict& v : list) {
      out += std::to_string(v.click_ref);
      out += '\t';
      out += filter_id_name(v.filter_id);
      out += '\t';
      out += outcome_name(v.outcome);
      out += '\t';
      out += format_score(v.score);
      out += '\t';
      out += v.reason.empty() ? "-" : v.reason;
      out += '\n';
    }
  }
  return out;
}

std::vector<std::vector<FilterVerdict>> parse_filter_verdicts(
    std::string_view text) {
  std::map<FilterId, std::vector<FilterVerdict>> grouped;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_cols(line, '\t');
    if (cols.size() != 5) fail(ErrorCode::BadParam, "bad filter verdict line");
    FilterVerdict v;
    v.click_ref = to_u64(cols[0]);
    v.filter_id = filter_id_from(cols[1]);
    v.outcome = cols[2] == "flag" ? Outcome::Flag : Outcome::Pass;
    v.score = std::stod(std::string(cols[3]));
    if (cols[4] != "-") v.reason = std::string(cols[4]);
    grouped[v.filter_id].push_back(std::move(v));
  }
  std::vector<std::vector<FilterVerdict>> out;
  for (auto& [id, list] : grouped) {
    (void)id;
    out.push_back(std::move(list));
  }
  return out;
}

Thresholds thresholds_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("bad thresholds json: ") + e.what());
  }
  Thresholds t;
  t.t_min_ms = j.value("t_min_ms", t.t_min_ms);
  t.repeat_window_ms = j.value("repeat_window_ms", t.repeat_window_ms);
  t.z_max = j.value("z_max", t.z_max);
  t.rate_window_ms = j.value("rate_window_ms", t.rate_window_ms);
  t.rate_baseline_windows = j.value("rate_baseline_windows", t.rate_baseline_windows);
  t.rate_min_baseline = j.value("rate_min_baseline", t.rate_min_baseline);
  t.rate_sigma_floor = j.value("rate_sigma_floor", t.rate_sigma_floor);
  t.k_clicks_per_ip_day = j.value("k_clicks_per_ip_day", t.k_clicks_per_ip_day);
  t.day_growth_max = j.value("day_growth_max", t.day_growth_max);
  t.d_max = j.value("d_max", t.d_max);
  t.n_min_sessions = j.value("n_min_sessions", t.n_min_sessions);
  t.experience_match_eps = j.value("experience_match_eps", t.experience_match_eps);
  t.gray_band = j.value("gray_band", t.gray_band);
  return t;
}

std::string thresholds_to_json(const Thresholds& t) {
  nlohmann::ordered_json j;
  j["t_min_ms"] = t.t_min_ms;
  j["repeat_window_ms"] = t.repeat_window_ms;
  j["z_max"] = t.z_max;
  j["rate_window_ms"] = t.rate_window_ms;
  j["rate_baseline_windows"] = t.rate_baseline_windows;
  j["rate_min_baseline"] = t.rate_min_baseline;
  j["rate_sigma_floor"] = t.rate_sigma_floor;
  j["k_clicks_per_ip_day"] = t.k_clicks_per_ip_day;
  j["day_growth_max"] = t.day_growth_max;
  j["d_max"] = t.d_max;
  j["n_min_sessions"] = t.n_min_sessions;
  j["experience_match_eps"] = t.experience_match_eps;
  j["gray_band"] = t.gray_band;
  return j.dump(2) + "\n";
}

}  // namespace adlab::detect
