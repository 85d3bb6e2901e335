#include "adlab/adnet.hpp"

#include <algorithm>
#include <charconv>

#include "adlab/error.hpp"

namespace adlab::adnet {

namespace {

constexpr size_t kMinKeyBytes = 16;

bool is_hex6(std::string_view s) {
  if (s.size() != 6) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isxdigit(c) != 0;
  });
}

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    fail(ErrorCode::BadParam, std::string(what) + " is not a number: " + std::string(s));
  return v;
}

uint64_t parse_u64(std::string_view s, std::string_view what) {
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    fail(ErrorCode::BadParam, std::string(what) + " is not a number: " + std::string(s));
  return v;
}

/// Signature preimage: every AdLink parameter except sig, values encoded.
QueryParams link_mac_params(const AdLink& link) {
  return {
      {"sa", percent_encode(link.sa)},
      {"ai", percent_encode(link.ai)},
      {"num", std::to_string(link.num)},
      {"client", percent_encode(link.client)},
      {"adurl", percent_encode(link.adurl)},
  };
}

std::string link_sig(const AdLink& link, std::string_view key) {
  return hmac_sha256_b64url(key, canonicalize_query(link_mac_params(link)));
}

}  // namespace

std::string_view ad_type_name(AdType t) {
  switch (t) {
    case AdType::Text: return "text";
  }
  return "text";
}

std::string_view safe_level_name(SafeLevel s) {
  switch (s) {
    case SafeLevel::High: return "high";
    case SafeLevel::Medium: return "medium";
    case SafeLevel::Off: return "off";
  }
  return "high";
}

AdType ad_type_from(std::string_view s) {
  if (s == "text") return AdType::Text;
  fail(ErrorCode::BadParam, "unknown ad type: " + std::string(s));
}

SafeLevel safe_level_from(std::string_view s) {
  if (s == "high") return SafeLevel::High;
  if (s == "medium") return SafeLevel::Medium;
  if (s == "off") return SafeLevel::Off;
  fail(ErrorCode::BadParam, "unknown safe level: " + std::string(s));
}

void AdConfig::validate() const {
  if (client_id.empty())
    fail(ErrorCode::ConfigError, "ad config without client_id");
  if (max_num_ads < 1)
    fail(ErrorCode::ConfigError, "max_num_ads must be >= 1");
  if (width <= 0 || height <= 0)
    fail(ErrorCode::ConfigError, "ad unit dimensions must be positive");
  std::string expect = std::to_string(width) + "x" + std::to_string(height) + "_as";
  if (format != expect)
    fail(ErrorCode::ConfigError, "format must be " + expect + ", got " + format);
  for (const std::string* c : {&colors.border, &colors.bg, &colors.link,
                               &colors.text, &colors.url}) {
    if (!is_hex6(*c))
      fail(ErrorCode::ConfigError, "color is not 6 hex digits: " + *c);
  }
}

AdConfig make_ad_config(std::string client_id, std::string channel,
                        int max_num_ads, int width, int height,
                        std::string language, SafeLevel safe, AdColors colors) {
  AdConfig c;
  c.client_id = std::move(client_id);
  c.channel = std::move(channel);
  c.max_num_ads = max_num_ads;
  c.width = width;
  c.height = height;
  c.format = std::to_string(width) + "x" + std::to_string(height) + "_as";
  c.language = std::move(language);
  c.safe_level = safe;
  c.colors = std::move(colors);
  c.validate();
  return c;
}

bool Campaign::targets(std::string_view channel) const {
  return std::find(channel_targets.begin(), channel_targets.end(), channel) !=
         channel_targets.end();
}

AdLink mint_click_url(const Campaign& campaign, int slot,
                      const AdRequest& impression, std::string_view key) {
  if (slot < 1 || slot > impression.num_ads)
    fail(ErrorCode::SlotRange,
         "slot " + std::to_string(slot) + " outside 1.." +
             std::to_string(impression.num_ads));
  if (key.size() < kMinKeyBytes)
    fail(ErrorCode::BadParam, "signing key shorter than 16 bytes");
  AdLink link;
  link.sa = "l";
  link.ai = hmac_sha256_b64url(
                key, "ai\n" + impression.correlator + "\n" + std::to_string(slot))
                .substr(0, 22);
  link.num = slot;
  link.client = impression.client;
  link.adurl = campaign.landing_url;
  link.sig = link_sig(link, key);
  return link;
}

bool verify_click_url(const AdLink& link, std::string_view key) {
  if (key.size() < kMinKeyBytes) return false;
  return link_sig(link, key) == link.sig;
}

std::string render_click_url(std::string_view ads_base, const AdLink& link) {
  QueryParams q = {
      {"sa", percent_encode(link.sa)},
      {"ai", percent_encode(link.ai)},
      {"num", std::to_string(link.num)},
      {"sig", percent_encode(link.sig)},
      {"client", percent_encode(link.client)},
      {"adurl", percent_encode(link.adurl)},
  };
  return std::string(ads_base) + "/aclk?" + join_query(q);
}

AdLink parse_click_url(std::string_view url) {
  Url u = Url::parse(url);
  if (u.path != "/aclk")
    fail(ErrorCode::BadParam, "not a click URL: " + u.path);
  AdLink link;
  bool have_sa = false, have_ai = false, have_num = false, have_sig = false,
       have_client = false, have_adurl = false;
  for (const auto& [k, raw] : split_query(u.query)) {
    std::string v = percent_decode(raw);
    if (k == "sa") { link.sa = v; have_sa = true; }
    else if (k == "ai") { link.ai = v; have_ai = true; }
    else if (k == "num") { link.num = parse_int(v, "num"); have_num = true; }
    else if (k == "sig") { link.sig = v; have_sig = true; }
    else if (k == "client") { link.client = v; have_client = true; }
    else if (k == "adurl") { link.adurl = v; have_adurl = true; }
  }
  if (!(have_sa && have_ai && have_num && have_sig && have_client && have_adurl))
    fail(ErrorCode::MissingParam, "click URL missing a required parameter");
  return link;
}

AdRequest make_ad_request(const AdConfig& config, std::string_view page_url,
                          std::string_view parent_origin, uint64_t now_ms,
                          std::string_view correlator,
                          std::string_view verification_token) {
  config.validate();
  Url::parse(page_url);  // must be absolute
  AdRequest r;
  r.client = "ca-" + config.client_id;
  r.format = config.format;
  r.height = config.height;
  r.width = config.width;
  r.num_ads = config.max_num_ads;
  r.channel = config.channel;
  r.ad_type = config.ad_type;
  r.colors = config.colors;
  r.oe = config.encoding;
  r.hl = config.language;
  r.adsafe = config.safe_level;
  r.url = std::string(page_url);
  r.parent = std::string(parent_origin);
  r.dt = now_ms;
  r.correlator = std::string(correlator);
  r.verification_token = std::string(verification_token);
  return r;
}

std::string render_ad_request_url(std::string_view ads_base,
                                  const AdRequest& r) {
  QueryParams q;
  q.emplace_back("client", percent_encode(r.client));
  q.emplace_back("format", percent_encode(r.format));
  q.emplace_back("h", std::to_string(r.height));
  q.emplace_back("w", std::to_string(r.width));
  q.emplace_back("num_ads", std::to_string(r.num_ads));
  q.emplace_back("channel", percent_encode(r.channel));
  q.emplace_back("ad_type", std::string(ad_type_name(r.ad_type)));
  q.emplace_back("color_bg", percent_encode(r.colors.bg));
  q.emplace_back("color_border", percent_encode(r.colors.border));
  q.emplace_back("color_link", percent_encode(r.colors.link));
  q.emplace_back("color_text", percent_encode(r.colors.text));
  q.emplace_back("color_url", percent_encode(r.colors.url));
  q.emplace_back("oe", percent_encode(r.oe));
  q.emplace_back("hl", percent_encode(r.hl));
  for (const auto& [k, v] : r.extras)
    q.emplace_back(k, percent_encode(v));
  // url before adsafe, p last: the rewrite pattern spans depend on this shape.
  q.emplace_back("url", percent_encode(r.url));
  q.emplace_back("adsafe", std::string(safe_level_name(r.adsafe)));
  q.emplace_back("dt", std::to_string(r.dt));
  q.emplace_back("correlator", percent_encode(r.correlator));
  q.emplace_back("vt", percent_encode(r.verification_token));
  q.emplace_back("p", percent_encode(r.parent));
  return std::string(ads_base) + "/pagead/ads?" + join_query(q);
}

std::string build_ad_request_url(std::string_view ads_base,
                                 const AdConfig& config,
                                 std::string_view page_url,
                                 std::string_view parent_origin,
                                 uint64_t now_ms, std::string_view correlator,
                                 std::string_view verification_token) {
  return render_ad_request_url(
      ads_base, make_ad_request(config, page_url, parent_origin, now_ms,
                                correlator, verification_token));
}

AdRequest parse_ad_request_url(std::string_view url) {
  Url u = Url::parse(url);
  if (u.path != "/pagead/ads")
    fail(ErrorCode::BadParam, "not an ad request URL: " + u.path);
  AdRequest r;
  bool have_client = false, have_url = false, have_p = false;
  for (const auto& [k, raw] : split_query(u.query)) {
    std::string v = percent_decode(raw);
    if (k == "client") { r.client = v; have_client = true; }
    else if (k == "format") { r.format = v; }
    else if (k == "h") { r.height = parse_int(v, "h"); }
    else if (k == "w") { r.width = parse_int(v, "w"); }
    else if (k == "num_ads") { r.num_ads = parse_int(v, "num_ads"); }
    else if (k == "channel") { r.channel = v; }
    else if (k == "ad_type") { r.ad_type = ad_type_from(v); }
    else if (k == "color_bg") { r.colors.bg = v; }
    else if (k == "color_border") { r.colors.border = v; }
    else if (k == "color_link") { r.colors.link = v; }
    else if (k == "color_text") { r.colors.text = v; }
    else if (k == "color_url") { r.colors.url = v; }
    else if (k == "oe") { r.oe = v; }
    else if (k == "hl") { r.hl = v; }
    else if (k == "adsafe") { r.adsafe = safe_level_from(v); }
    else if (k == "url") { r.url = v; have_url = true; }
    else if (k == "p") { r.parent = v; have_p = true; }
    else if (k == "dt") { r.dt = parse_u64(v, "dt"); }
    else if (k == "correlator") { r.correlator = v; }
    else if (k == "vt") { r.verification_token = v; }
    else { r.extras.emplace_back(k, v); }
  }
  if (!have_client) fail(ErrorCode::MissingParam, "ad request without client");
  if (!have_url) fail(ErrorCode::MissingParam, "ad request without url");
  if (!have_p) fail(ErrorCode::MissingParam, "ad request without p");
  return r;
}

}  // namespace adlab::adnet
