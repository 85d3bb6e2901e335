#pragma once

#include <memory>
#include <string>

#include "adlab/extractor.hpp"
#include "adlab/service.hpp"

namespace adlab::http {

/// HTTP front of one AdService. Mutations are serialized behind a single
/// writer lock; reads share the same lock for simplicity at mock scale.
/// Endpoints:
///   GET /site/{site_id}/{page}          publisher HTML (records a Visit)
///   GET /pagead/show_ads.js             static bootstrap asset
///   GET /pagead/html/zrt_lookup.html    verification frame (token in
///                                       X-Adlab-Token)
///   GET /pagead/ads?...                 ad frame
///   GET /aclk?...                       302 redirect to the advertiser
/// Caller identity comes from X-Adlab-Session / X-Adlab-Ip / X-Adlab-Truth
/// headers; the simulated clock from X-Adlab-Now (ms).
class HttpService {
 public:
  explicit HttpService(service::AdService& svc);
  ~HttpService();

  /// Binds 127.0.0.1 on a free port and serves from a background thread.
  void start();
  void stop();
  int port() const { return port_; }
  std::string base_url() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace adlab::http

namespace adlab::extractor {
/// Fetcher over HTTP. Logical site hosts are mapped onto the service's
/// /site/{id}{page} endpoint; ad-network paths go through as-is.
std::unique_ptr<Fetcher> make_http_fetcher(const std::string& base_url);
}  // namespace adlab::extractor
