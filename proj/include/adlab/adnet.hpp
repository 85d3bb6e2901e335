#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adlab/url.hpp"

namespace adlab::adnet {

enum class AdType { Text };
enum class SafeLevel { High, Medium, Off };

std::string_view ad_type_name(AdType t);
std::string_view safe_level_name(SafeLevel s);
AdType ad_type_from(std::string_view s);        // throws BadParam
SafeLevel safe_level_from(std::string_view s);  // throws BadParam

struct AdColors {
  std::string border = "EEEEEE";
  std::string bg = "EEEEEE";
  std::string link = "000066";
  std::string text = "000000";
  std::string url = "CC0000";

  bool operator==(const AdColors&) const = default;
};

/// Publisher-side ad-unit declaration: the values a page's ad block assigns.
struct AdConfig {
  std::string client_id;  // account id, e.g. "pub-1229649499684927"
  std::string channel;
  AdType ad_type = AdType::Text;
  int max_num_ads = 1;
  std::string language = "en";
  SafeLevel safe_level = SafeLevel::High;
  std::string encoding = "utf8";
  int width = 336;
  int height = 280;
  std::string format = "336x280_as";  // always "{width}x{height}_as"
  AdColors colors;

  void validate() const;  // throws ConfigError on any invariant violation
  bool operator==(const AdConfig&) const = default;
};

/// Builds a config with the derived format field filled in.
AdConfig make_ad_config(std::string client_id, std::string channel,
                        int max_num_ads, int width, int height,
                        std::string language = "en",
                        SafeLevel safe = SafeLevel::High,
                        AdColors colors = {});

/// Parsed parameter set of an ad-frame URL.
struct AdRequest {
  std::string client;  // "ca-" + client_id
  std::string format;
  int height = 0;
  int width = 0;
  int num_ads = 1;
  std::string channel;
  AdType ad_type = AdType::Text;
  AdColors colors;
  std::string oe;       // encoding
  std::string hl;       // language
  SafeLevel adsafe = SafeLevel::High;
  std::string url;      // page URL (decoded)
  std::string parent;   // "p" param: parent origin (decoded)
  uint64_t dt = 0;      // request timestamp, sim epoch ms
  std::string correlator;
  std::string verification_token;
  QueryParams extras;   // unmodeled params, decoded, order preserved

  bool operator==(const AdRequest&) const = default;
};

/// A signed click URL (path "/aclk").
struct AdLink {
  std::string sa = "l";
  std::string ai;      // opaque impression token
  int num = 1;         // 1-based slot index
  std::string sig;     // MAC, unpadded base64url
  std::string client;  // "ca-" + client_id
  std::string adurl;   // advertiser landing URL (decoded)

  bool operator==(const AdLink&) const = default;
};

struct Campaign {
  std::string id;
  std::string advertiser_id;
  std::string landing_url;
  std::vector<std::string> channel_targets;
  std::string headline;

  bool targets(std::string_view channel) const;
};

// -- operations --

/// Signs a click link for `campaign` in slot `slot` of the given impression.
/// The signature is a keyed MAC over the canonical query of all other params.
AdLink mint_click_url(const Campaign& campaign, int slot,
                      const AdRequest& impression, std::string_view key);

/// True iff the link's sig matches a recomputed MAC (no parameter altered).
bool verify_click_url(const AdLink& link, std::string_view key);

/// Renders the link as an absolute URL on the ad host.
std::string render_click_url(std::string_view ads_base, const AdLink& link);

/// Parses an "/aclk" URL back into an AdLink. Throws MissingParam/BadParam.
AdLink parse_click_url(std::string_view url);

/// Assembles the ad-frame request an emulated client would issue.
AdRequest make_ad_request(const AdConfig& config, std::string_view page_url,
                          std::string_view parent_origin, uint64_t now_ms,
                          std::string_view correlator,
                          std::string_view verification_token);

/// Renders an AdRequest as the "/pagead/ads" URL. Parameter order keeps
/// "url" before "adsafe" and "p" last, matching the shape a live capture has.
std::string render_ad_request_url(std::string_view ads_base,
                                  const AdRequest& request);

std::string build_ad_request_url(std::string_view ads_base,
                                 const AdConfig& config,
                                 std::string_view page_url,
                                 std::string_view parent_origin,
                                 uint64_t now_ms, std::string_view correlator,
                                 std::string_view verification_token);

/// Parses a "/pagead/ads" URL. Unmodeled params land in extras in order.
/// Throws MissingParam when client/url/p are absent, BadParam on bad numbers.
AdRequest parse_ad_request_url(std::string_view url);

}  // namespace adlab::adnet
