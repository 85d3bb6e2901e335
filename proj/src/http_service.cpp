#include "adlab/http_service.hpp"

#include <mutex>
#include <thread>

#include "adlab/error.hpp"
#include "httplib.h"

namespace adlab::http {

namespace {

std::string header_or(const httplib::Request& req, const std::string& key,
                      const std::string& fallback) {
  return req.has_header(key) ? req.get_header_value(key) : fallback;
}

service::ClientContext context_from(const httplib::Request& req) {
  service::ClientContext ctx;
  ctx.session_id = header_or(req, "X-Adlab-Session", "http");
  ctx.ip = header_or(req, "X-Adlab-Ip", "127.0.0.1");
  ctx.truth = header_or(req, "X-Adlab-Truth", "legit") == "fraud"
                  ? service::Truth::Fraud
                  : service::Truth::Legit;
  return ctx;
}

uint64_t now_from(const httplib::Request& req) {
  std::string v = header_or(req, "X-Adlab-Now", "0");
  return std::strtoull(v.c_str(), nullptr, 10);
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::TokenRejected: return 401;
    case ErrorCode::OriginMismatch: return 409;
    default: return 400;
  }
}

}  // namespace

struct HttpService::Impl {
  service::AdService& svc;
  httplib::Server server;
  std::thread worker;
  std::mutex mu;  // single writer over the service

  explicit Impl(service::AdService& s) : svc(s) {}

  void route() {
    server.Get("/pagead/show_ads.js", [](const httplib::Request&,
                                         httplib::Response& res) {
      res.set_content(service::AdService::bootstrap_script(),
                      "application/javascript");
    });

    server.Get("/pagead/html/zrt_lookup.html",
               [this](const httplib::Request& req, httplib::Response& res) {
                 std::lock_guard lock(mu);
                 std::string origin = req.get_param_value("origin");
                 if (origin.empty()) origin = "unknown";
                 auto [doc, token] =
                     svc.serve_verification_frame(origin, now_from(req));
                 res.set_header("X-Adlab-Token", token.token);
                 res.set_content(doc, "text/html");
               });

    server.Get("/pagead/ads", [this](const httplib::Request& req,
                                     httplib::Response& res) {
      std::lock_guard lock(mu);
      try {
        std::string url = "http://" +
                          Url::parse(svc.config().ads_base_url).host +
                          req.target;
        adnet::AdRequest ad_req = adnet::parse_ad_request_url(url);
        res.set_content(svc.serve_ad_frame(ad_req, context_from(req),
                                           now_from(req)),
                        "text/html");
      } catch (const Error& e) {
        res.status = status_for(e.code());
        res.set_content(e.what(), "text/plain");
      }
    });

    server.Get("/aclk", [this](const httplib::Request& req,
                               httplib::Response& res) {
      std::lock_guard lock(mu);
      try {
        std::string url = "http://" +
                          Url::parse(svc.config().ads_base_url).host +
                          req.target;
        adnet::AdLink link = adnet::parse_click_url(url);
        service::ClickResult cr =
            svc.handle_click(link, context_from(req), now_from(req));
        if (cr.accepted) {
          res.status = 302;
          res.set_header("Location", cr.redirect_url);
        } else {
          res.status = 403;
          res.set_content("RejectedLink", "text/plain");
        }
      } catch (const Error& e) {
        res.status = status_for(e.code());
        res.set_content(e.what(), "text/plain");
      }
    });

    server.Get(R"(/site/([^/]+)(/.*))", [this](const httplib::Request& req,
                                               httplib::Response& res) {
      std::lock_guard lock(mu);
      try {
        res.set_content(svc.fetch_page(req.matches[1].str(),
                                       req.matches[2].str(),
                                       context_from(req), now_from(req)),
                        "text/html");
      } catch (const Error& e) {
        res.status = status_for(e.code());
        res.set_content(e.what(), "text/plain");
      }
    });

    // virtual-host routing: logical site URLs arrive with X-Adlab-Host
    server.Get(R"(/.*)", [this](const httplib::Request& req,
                                httplib::Response& res) {
      std::lock_guard lock(mu);
      std::string host = header_or(req, "X-Adlab-Host", "");
      const service::PublisherSite* site =
          host.empty() ? nullptr : svc.find_site_by_host(host);
      if (!site) {
        res.status = 404;
        res.set_content("NotFound: no site for this host", "text/plain");
        return;
      }
      try {
        res.set_content(svc.fetch_page(site->site_id, req.path,
                                       context_from(req), now_from(req)),
                        "text/html");
      } catch (const Error& e) {
        res.status = status_for(e.code());
        res.set_content(e.what(), "text/plain");
      }
    });
  }
};

HttpService::HttpService(service::AdService& svc)
    : impl_(std::make_unique<Impl>(svc)) {
  impl_->route();
}

HttpService::~HttpService() { stop(); }

void HttpService::start() {
  port_ = impl_->server.bind_to_any_port("127.0.0.1");
  if (port_ <= 0) fail(ErrorCode::IoError, "cannot bind a local port");
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpService::stop() {
  if (impl_ && impl_->worker.joinable()) {
    impl_->server.stop();
    impl_->worker.join();
  }
}

std::string HttpService::base_url() const {
  return "http://127.0.0.1:" + std::to_string(port_);
}

}  // namespace adlab::http

namespace adlab::extractor {

namespace {

class HttpFetcher : public Fetcher {
 public:
  explicit HttpFetcher(std::string base_url) : base_url_(std::move(base_url)) {
    Url u = Url::parse(base_url_);
    server_host_ = u.host;
  }

  FetchResponse get(const std::string& url, const service::ClientContext& ctx,
                    uint64_t now) override {
    FetchResponse out;
    Url u;
    try {
      u = Url::parse(url);
    } catch (const Error&) {
      out.status = 0;
      return out;
    }
    httplib::Client cli(base_url_);
    cli.set_follow_location(false);
    httplib::Headers headers{
        {"X-Adlab-Session", ctx.session_id},
        {"X-Adlab-Ip", ctx.ip},
        {"X-Adlab-Truth", std::string(service::truth_name(ctx.truth))},
        {"X-Adlab-Now", std::to_string(now)},
    };
    if (u.host != server_host_) headers.emplace("X-Adlab-Host", u.host);
    std::string target = u.path;
    if (!u.query.empty()) target += "?" + u.query;
    auto res = cli.Get(target, headers);
    if (!res) {
      out.status = 0;
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    for (const char* h : {"X-Adlab-Token", "Location"})
      if (res->has_header(h)) out.headers[h] = res->get_header_value(h);
    return out;
  }

 private:
  std::string base_url_;
  std::string server_host_;
};

}  // namespace

std::unique_ptr<Fetcher> make_http_fetcher(const std::string& base_url) {
  return std::make_unique<HttpFetcher>(base_url);
}

}  // namespace adlab::extractor
