#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adlab/adnet.hpp"

namespace adlab::service {

enum class Truth { Legit, Fraud };
enum class EventKind { Visit, Impression, Click };

std::string_view truth_name(Truth t);
std::string_view event_kind_name(EventKind k);
Truth truth_from(std::string_view s);
EventKind event_kind_from(std::string_view s);

/// Identity of the actor behind a request. `truth` is the generator-assigned
/// ground-truth label; detection code never sees it (see detect::EventView).
struct ClientContext {
  std::string session_id;
  std::string ip;
  Truth truth = Truth::Legit;
};

struct Event {
  uint64_t seq = 0;
  EventKind kind = EventKind::Visit;
  uint64_t ts = 0;  // sim epoch ms
  std::string session_id;
  std::string ip;
  std::string site_id;
  std::string page;
  std::string link;      // click URL; empty for visits/impressions
  int64_t dwell_ms = -1; // clicks only
  Truth truth = Truth::Legit;
};

struct PublisherSite {
  std::string site_id;
  std::string base_url;  // logical origin, e.g. "http://www.anuncios.com"
  std::vector<std::string> pages;  // absolute paths, e.g. "/index.html"
  adnet::AdConfig ad_config;
  double baseline_popularity = 1.0;  // expected visits per sim-hour

  void validate() const;
};

struct VerificationToken {
  std::string token;
  std::string issued_to;
  uint64_t issued_at = 0;
  uint64_t ttl_ms = 0;
  bool spent = false;
};

/// One served ad frame: which links were minted for it.
struct ImpressionRecord {
  uint64_t event_seq = 0;
  std::string site_id;
  std::string page;
  std::vector<std::string> links;  // rendered click URLs, slot order
};

struct ClickResult {
  bool accepted = false;
  std::string redirect_url;  // set iff accepted
};

struct ServiceConfig {
  std::string ads_base_url = "http://ads.adlab.test";
  std::string key;  // MAC key, >= 16 bytes
  uint64_t token_ttl_ms = 30'000;
};

/// The mock ad network plus its registered publisher sites. Single writer;
/// all mutation goes through the record/serve calls on one thread (the HTTP
/// adapter serializes around this).
class AdService {
 public:
  explicit AdService(ServiceConfig cfg);

  void register_site(PublisherSite site);
  void register_campaign(adnet::Campaign campaign);

  const ServiceConfig& config() const { return cfg_; }
  const std::vector<Event>& events() const { return log_; }
  const std::vector<ImpressionRecord>& impressions() const { return impressions_; }
  const PublisherSite* find_site(std::string_view site_id) const;
  const PublisherSite* find_site_by_host(std::string_view host) const;

  /// Publisher page markup: ad block with the per-site config plus the
  /// bootstrap script reference. Pure; throws NotFound for unknown pages.
  std::string render_publisher_page(const PublisherSite& site,
                                    std::string_view page) const;

  /// Renders a site page and records the Visit.
  std::string fetch_page(std::string_view site_id, std::string_view page,
                         const ClientContext& ctx, uint64_t now);

  /// Zero-size frame document plus a fresh single-use token bound to origin.
  std::pair<std::string, VerificationToken> serve_verification_frame(
      std::string_view origin, uint64_t now);

  /// Serves the ad document for a parsed request: validates origin coherence
  /// and the verification token, selects campaigns, mints one signed link per
  /// slot and records the Impression. Throws OriginMismatch / TokenRejected.
  std::string serve_ad_frame(const adnet::AdRequest& request,
                             const ClientContext& ctx, uint64_t now);

  /// Verifies the link; on success records the Click (with dwell measured
  /// from the session's last visit/impression on that site) and returns the
  /// advertiser URL as redirect target. Tampered links record nothing.
  ClickResult handle_click(const adnet::AdLink& link, const ClientContext& ctx,
                           uint64_t now);

  /// Up to `num` campaigns targeting `channel`, in id order.
  std::vector<adnet::Campaign> select_ads(std::string_view channel,
                                          int num) const;

  static std::string bootstrap_script();
  static std::string verification_frame_document();

 private:
  Event& append_event(EventKind kind, uint64_t ts, const ClientContext& ctx,
                      std::string site_id, std::string page);
  void note_activity(const std::string& session_id, const std::string& site_id,
                     uint64_t ts);

  ServiceConfig cfg_;
  std::deque<PublisherSite> sites_;             // registration order; stable refs
  std::map<std::string, size_t> site_by_id_;
  std::map<std::string, size_t> site_by_host_;
  std::map<std::string, size_t> site_by_client_;
  std::vector<adnet::Campaign> campaigns_;      // kept sorted by id
  std::map<std::string, VerificationToken> tokens_;
  std::vector<Event> log_;
  std::vector<ImpressionRecord> impressions_;
  std::map<std::string, size_t> impression_by_ai_;
  std::map<std::pair<std::string, std::string>, uint64_t> last_activity_;
  uint64_t next_seq_ = 0;
  uint64_t token_counter_ = 0;
};

/// One event per line, tab separated:
///   ts kind session ip site page link dwell_ms truth
/// "-" fills empty link/dwell columns. First line is a "#" header.
std::string format_event_line(const Event& e);
std::string serialize_event_log(const std::vector<Event>& events);
std::vector<Event> parse_event_log(std::string_view text);  // throws BadParam

}  // namespace adlab::service
