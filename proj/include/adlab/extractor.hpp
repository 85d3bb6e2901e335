#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adlab/adnet.hpp"
#include "adlab/service.hpp"

namespace adlab::extractor {

/// Transport abstraction so the pipeline runs identically against the
/// in-process service (deterministic, used by the simulator) and a live
/// HTTP instance.
struct FetchResponse {
  int status = 0;
  std::string body;
  std::map<std::string, std::string> headers;
};

class Fetcher {
 public:
  virtual ~Fetcher() = default;
  virtual FetchResponse get(const std::string& url,
                            const service::ClientContext& ctx, uint64_t now) = 0;
};

/// Resolves logical hosts (publisher sites + the ad host) directly against an
/// AdService instance.
class InProcessFetcher : public Fetcher {
 public:
  explicit InProcessFetcher(service::AdService& svc) : svc_(svc) {}
  FetchResponse get(const std::string& url, const service::ClientContext& ctx,
                    uint64_t now) override;

 private:
  service::AdService& svc_;
};

enum class Step { A, B, C, D, E, F, G, H, I, J };
std::string_view step_name(Step s);   // "a".."j"
std::string_view step_label(Step s);  // short human description

struct StepTrace {
  Step step;
  std::string status;  // "ok", "skipped", or an error string
  uint64_t ts = 0;
  bool ok() const { return status == "ok" || status == "skipped"; }
};

struct ExtractionResult {
  std::string target_url;
  adnet::AdConfig config;  // first detected block
  std::string ad_frame_url_raw;
  std::string ad_frame_url_rewritten;
  std::vector<adnet::AdLink> links;
  std::vector<std::string> link_urls;  // raw hrefs, document order
  std::vector<StepTrace> step_trace;

  bool complete() const;  // all traced steps ok and trace reaches step j
  std::optional<Step> failed_step() const;
};

/// Finds every script block assigning google_ad_client and reads the
/// google_* variables out of it. Tolerates whitespace/order variation and
/// missing semicolons; absent fields keep their defaults.
std::vector<adnet::AdConfig> detect_ad_block(const std::string& html);

/// Host of the bootstrap script reference, if the page carries one.
std::optional<std::string> find_bootstrap_base(const std::string& html);

/// href of every anchor inside <body>, any nesting depth, document order.
std::vector<std::string> extract_ad_links(const std::string& ad_html);

/// Replaces the span from "&url=" to the last "&adsafe" with
/// "&url={target}/&adsafe" and the span from "&p=http" to the end with
/// "&p={target}". Everything else is byte-preserved. Throws PatternNotFound.
std::string rewrite_origin_params(const std::string& url,
                                  const std::string& target_domain);

/// The link-extraction pipeline. `execution_origin` is the page address the
/// emulated client runs from; it leaks into the ad-frame URL exactly as a
/// client-side render would leak its own location.
class Extractor {
 public:
  Extractor(Fetcher& fetcher, service::ClientContext ctx,
            std::string execution_origin = "http://localhost/vigilante/exploits/exploit2.php");

  /// Step (a): raw page text; the service records the Visit.
  std::string fetch_source(const std::string& url, uint64_t now);

  /// Steps (c)-(f): obtains a verification token and returns the ad-frame
  /// URL the bootstrap would build, with url/p bound to the execution origin.
  std::string emulate_client_render(const adnet::AdConfig& config,
                                    const std::string& page_url,
                                    const std::string& ads_base, uint64_t now);

  /// Steps (a)-(j). `rewrite_domain` empty means step (h) is skipped and the
  /// raw (origin-contaminated) URL is fetched as-is.
  ExtractionResult run_extraction(const std::string& target_url,
                                  const std::string& rewrite_domain,
                                  uint64_t now);

 private:
  Fetcher& fetcher_;
  service::ClientContext ctx_;
  std::string execution_origin_;
};

/// Serialization used by the extract command: one link per line plus a trace
/// section.
std::string format_extraction_result(const ExtractionResult& r);

}  // namespace adlab::extractor
