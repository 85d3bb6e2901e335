#include "adlab/service.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "adlab/error.hpp"

namespace adlab::service {

namespace {

std::string page_title(const PublisherSite& site, std::string_view page) {
  return site.site_id + std::string(page);
}

int64_t parse_i64(std::string_view s, std::string_view what) {
  int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    fail(ErrorCode::BadParam, std::string(what) + ": bad number " + std::string(s));
  return v;
}

}  // namespace

std::string_view truth_name(Truth t) {
  return t == Truth::Legit ? "legit" : "fraud";
}

std::string_view event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::Visit: return "visit";
    case EventKind::Impression: return "impression";
    case EventKind::Click: return "click";
  }
  return "visit";
}

Truth truth_from(std::string_view s) {
  if (s == "legit") return Truth::Legit;
  if (s == "fraud") return Truth::Fraud;
  fail(ErrorCode::BadParam, "unknown truth label: " + std::string(s));
}

EventKind event_kind_from(std::string_view s) {
  if (s == "visit") return EventKind::Visit;
  if (s == "impression") return EventKind::Impression;
  if (s == "click") return EventKind::Click;
  fail(ErrorCode::BadParam, "unknown event kind: " + std::string(s));
}

void PublisherSite::validate() const {
  if (site_id.empty()) fail(ErrorCode::ConfigError, "site without id");
  Url::parse(base_url);
  if (pages.empty())
    fail(ErrorCode::ConfigError, "site " + site_id + " has no pages");
  if (baseline_popularity <= 0)
    fail(ErrorCode::ConfigError, "site " + site_id + " popularity must be > 0");
  ad_config.validate();
}

AdService::AdService(ServiceConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.key.size() < 16)
    fail(ErrorCode::ConfigError, "service key shorter than 16 bytes");
}

void AdService::register_site(PublisherSite site) {
  site.validate();
  std::string host = Url::parse(site.base_url).host;
  if (site_by_id_.count(site.site_id))
    fail(ErrorCode::ConfigError, "duplicate site id: " + site.site_id);
  size_t idx = sites_.size();
  site_by_id_[site.site_id] = idx;
  site_by_host_[host] = idx;
  site_by_client_[site.ad_config.client_id] = idx;
  sites_.push_back(std::move(site));
}

void AdService::register_campaign(adnet::Campaign campaign) {
  if (campaign.id.empty()) fail(ErrorCode::ConfigError, "campaign without id");
  Url::parse(campaign.landing_url);
  auto pos = std::lower_bound(
      campaigns_.begin(), campaigns_.end(), campaign,
      [](const auto& a, const auto& b) { return a.id < b.id; });
  if (pos != campaigns_.end() && pos->id == campaign.id)
    fail(ErrorCode::ConfigError, "duplicate campaign id: " + campaign.id);
  campaigns_.insert(pos, std::move(campaign));
}

const PublisherSite* AdService::find_site(std::string_view site_id) const {
  auto it = site_by_id_.find(std::string(site_id));
  return it == site_by_id_.end() ? nullptr : &sites_[it->second];
}

const PublisherSite* AdService::find_site_by_host(std::string_view host) const {
  auto it = site_by_host_.find(std::string(host));
  return it == site_by_host_.end() ? nullptr : &sites_[it->second];
}

std::string AdService::render_publisher_page(const PublisherSite& site,
                                             std::string_view page) const {
  if (std::find(site.pages.begin(), site.pages.end(), page) == site.pages.end())
    fail(ErrorCode::NotFound, site.site_id + " has no page " + std::string(page));
  const adnet::AdConfig& c = site.ad_config;
  std::ostringstream os;
  os << "<!DOCTYPE html>\n<html>\n<head>\n"
     << "<title>" << page_title(site, page) << "</title>\n"
     << "<link rel=\"canonical\" href=\"" << site.base_url << page << "\">\n"
     << "</head>\n<body>\n"
     << "<h1>" << page_title(site, page) << "</h1>\n"
     << "<p>Listings and announcements for " << site.site_id << ".</p>\n"
     << "<ul>\n";
  for (const auto& p : site.pages)
    os << "<li><a href=\"" << site.base_url << p << "\">" << p << "</a></li>\n";
  os << "</ul>\n"
     << "<div id=\"GoogleAdSense\">\n"
     << "<script language=\"JavaScript\" type=\"text/javascript\">\n"
     << "  google_ad_client = \"" << c.client_id << "\";\n"
     << "  google_ad_channel = \"" << c.channel << "\";\n"
     << "  google_ad_type = \"" << adnet::ad_type_name(c.ad_type) << "\";\n"
     << "  google_max_num_ads = " << c.max_num_ads << ";\n"
     << "  google_language = \"" << c.language << "\";\n"
     << "  google_safe = \"" << adnet::safe_level_name(c.safe_level) << "\";\n"
     << "  google_encoding = \"" << c.encoding << "\";\n"
     << "  google_ad_width = " << c.width << ";\n"
     << "  google_ad_height = " << c.height << ";\n"
     << "  google_ad_format = \"" << c.format << "\";\n"
     << "  google_color_border = \"" << c.colors.border << "\";\n"
     << "  google_color_bg = \"" << c.colors.bg << "\";\n"
     << "  google_color_link = \"" << c.colors.link << "\";\n"
     << "  google_color_text = \"" << c.colors.text << "\";\n"
     << "  google_color_url = \"" << c.colors.url << "\";\n"
     << "</script>\n"
     << "<div id=\"GoogleAd\">\n"
     << "<span>Sponsored links </span>\n"
     << "<script language=\"JavaScript\" src=\"" << cfg_.ads_base_url
     << "/pagead/show_ads.js\" type=\"text/javascript\"></script>\n"
     << "</div>\n"
     << "</div>\n"
     << "</body>\n</html>\n";
  return os.str();
}

std::string AdService::fetch_page(std::string_view site_id,
                                  std::string_view page,
                                  const ClientContext& ctx, uint64_t now) {
  const PublisherSite* site = find_site(site_id);
  if (!site) fail(ErrorCode::NotFound, "unknown site: " + std::string(site_id));
  std::string html = render_publisher_page(*site, page);
  append_event(EventKind::Visit, now, ctx, site->site_id, std::string(page));
  note_activity(ctx.session_id, site->site_id, now);
  return html;
}

std::pair<std::string, VerificationToken> AdService::serve_verification_frame(
    std::string_view origin, uint64_t now) {
  VerificationToken t;
  ++token_counter_;
  uint64_t tag = fnv1a64(std::string(origin) + "|" +
                         std::to_string(now) + "|" +
                         std::to_string(token_counter_));
  char buf[32];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(tag));
  t.token = "vt" + std::to_string(token_counter_) + "-" + buf;
  t.issued_to = std::string(origin);
  t.issued_at = now;
  t.ttl_ms = cfg_.token_ttl_ms;
  tokens_[t.token] = t;
  return {verification_frame_document(), t};
}

std::string AdService::serve_ad_frame(const adnet::AdRequest& request,
                                      const ClientContext& ctx, uint64_t now) {
  // Origin coherence: url and p must agree, and must match the site that is
  // actually registered for this account. A request carrying the address of
  // whatever environment executed the ad code trips this check.
  std::string client_id = request.client;
  if (client_id.rfind("ca-", 0) == 0) client_id = client_id.substr(3);
  auto site_it = site_by_client_.find(client_id);
  if (site_it == site_by_client_.end())
    fail(ErrorCode::OriginMismatch, "no site registered for " + request.client);
  const PublisherSite& site = sites_[site_it->second];

  Url page_url = Url::parse(request.url);
  Url parent = Url::parse(request.parent);
  std::string site_host = Url::parse(site.base_url).host;
  if (page_url.host != parent.host)
    fail(ErrorCode::OriginMismatch,
         "url host " + page_url.host + " != p host " + parent.host);
  if (page_url.host != site_host)
    fail(ErrorCode::OriginMismatch,
         "request origin " + page_url.host + " is not " + site.site_id +
             "'s registered host " + site_host);

  auto tok_it = tokens_.find(request.verification_token);
  if (tok_it == tokens_.end())
    fail(ErrorCode::TokenRejected, "unknown verification token");
  VerificationToken& tok = tok_it->second;
  if (tok.spent) fail(ErrorCode::TokenRejected, "verification token already spent");
  if (now > tok.issued_at + tok.ttl_ms)
    fail(ErrorCode::TokenRejected, "verification token expired");

  std::vector<adnet::Campaign> picked = select_ads(request.channel, request.num_ads);

  std::ostringstream os;
  os << "<html><head><title>ads</title></head>\n<body>\n";
  std::vector<std::string> links;
  links.reserve(picked.size());
  for (size_t i = 0; i < picked.size(); ++i) {
    adnet::AdLink link = adnet::mint_click_url(picked[i], static_cast<int>(i + 1),
                                               request, cfg_.key);
    std::string href = adnet::render_click_url(cfg_.ads_base_url, link);
    os << "<div class=\"ad-slot\">\n<a href=\"" << href << "\">"
       << picked[i].headline << "</a>\n<span>" << picked[i].advertiser_id
       << "</span>\n</div>\n";
    links.push_back(href);
  }
  os << "</body></html>\n";

  tok.spent = true;

  Event& ev = append_event(EventKind::Impression, now, ctx, site.site_id,
                           page_url.path);
  note_activity(ctx.session_id, site.site_id, now);
  ImpressionRecord rec;
  rec.event_seq = ev.seq;
  rec.site_id = site.site_id;
  rec.page = page_url.path;
  rec.links = links;
  size_t rec_idx = impressions_.size();
  for (const std::string& href : links)
    impression_by_ai_[adnet::parse_click_url(href).ai] = rec_idx;
  impressions_.push_back(std::move(rec));
  return os.str();
}

ClickResult AdService::handle_click(const adnet::AdLink& link,
                                    const ClientContext& ctx, uint64_t now) {
  if (!adnet::verify_click_url(link, cfg_.key)) return {};
  auto it = impression_by_ai_.find(link.ai);
  if (it == impression_by_ai_.end()) return {};  // not minted in this run
  const ImpressionRecord& rec = impressions_[it->second];

  int64_t dwell = 0;
  auto act = last_activity_.find({ctx.session_id, rec.site_id});
  if (act != last_activity_.end() && now >= act->second)
    dwell = static_cast<int64_t>(now - act->second);

  Event& ev = append_event(EventKind::Click, now, ctx, rec.site_id, rec.page);
  ev.link = adnet::render_click_url(cfg_.ads_base_url, link);
  ev.dwell_ms = dwell;
  return {true, link.adurl};
}

std::vector<adnet::Campaign> AdService::select_ads(std::string_view channel,
                                                   int num) const {
  std::vector<adnet::Campaign> out;
  if (num < 1) fail(ErrorCode::BadParam, "num must be >= 1");
  for (const auto& c : campaigns_) {
    if (c.targets(channel)) {
      out.push_back(c);
      if (static_cast<int>(out.size()) == num) break;
    }
  }
  return out;
}

std::string AdService::bootstrap_script() {
  return
      "// adlab bootstrap. On a publisher page this inserts the zero-size\n"
      "// verification frame, then builds the ad frame URL from the page's\n"
      "// google_* variables and the document location. The sandbox client\n"
      "// performs the same sequence natively.\n"
      "(function () {\n"
      "  // 1. insert verification frame (/pagead/html/zrt_lookup.html)\n"
      "  // 2. build /pagead/ads?... from google_* config and location\n"
      "  // 3. insert iframe id=google_ads_frame1 with that URL\n"
      "})();\n";
}

std::string AdService::verification_frame_document() {
  return "<html><head></head><body></body></html>\n";
}

Event& AdService::append_event(EventKind kind, uint64_t ts,
                               const ClientContext& ctx, std::string site_id,
                               std::string page) {
  Event e;
  e.seq = next_seq_++;
  e.kind = kind;
  e.ts = ts;
  e.session_id = ctx.session_id;
  e.ip = ctx.ip;
  e.site_id = std::move(site_id);
  e.page = std::move(page);
  e.truth = ctx.truth;
  log_.push_back(std::move(e));
  return log_.back();
}

void AdService::note_activity(const std::string& session_id,
                              const std::string& site_id, uint64_t ts) {
  last_activity_[{session_id, site_id}] = ts;
}

std::string format_event_line(const Event& e) {
  std::ostringstream os;
  os << e.ts << '\t' << event_kind_name(e.kind) << '\t' << e.session_id << '\t'
     << e.ip << '\t' << e.site_id << '\t' << e.page << '\t'
     << (e.link.empty() ? "-" : e.link) << '\t';
  if (e.dwell_ms < 0)
    os << '-';
  else
    os << e.dwell_ms;
  os << '\t' << truth_name(e.truth);
  return os.str();
}

std::string serialize_event_log(const std::vector<Event>& events) {
  std::string out = "# ts\tkind\tsession\tip\tsite\tpage\tlink\tdwell_ms\ttruth\n";
  for (const Event& e : events) {
    out += format_event_line(e);
    out.push_back('\n');
  }
  return out;
}

std::vector<Event> parse_event_log(std::string_view text) {
  std::vector<Event> out;
  size_t pos = 0;
  uint64_t seq = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string_view> cols;
    size_t p = 0;
    while (p <= line.size()) {
      size_t tab = line.find('\t', p);
      if (tab == std::string_view::npos) tab = line.size();
      cols.push_back(line.substr(p, tab - p));
      p = tab + 1;
    }
    if (cols.size() != 9)
      fail(ErrorCode::BadParam, "event line does not have 9 columns");
    Event e;
    e.seq = seq++;
    e.ts = static_cast<uint64_t>(parse_i64(cols[0], "ts"));
    e.kind = event_kind_from(cols[1]);
    e.session_id = std::string(cols[2]);
    e.ip = std::string(cols[3]);
    e.site_id = std::string(cols[4]);
    e.page = std::string(cols[5]);
    e.link = cols[6] == "-" ? "" : std::string(cols[6]);
    e.dwell_ms = cols[7] == "-" ? -1 : parse_i64(cols[7], "dwell_ms");
    e.truth = truth_from(cols[8]);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace adlab::service
