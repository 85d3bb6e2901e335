#include "adlab/http_service.hpp"

#include "adlab/error.hpp"
#include "adlab/harness.hpp"
#include "doctest.h"
#include "httplib.h"

using namespace adlab;

namespace {

constexpr uint64_t kNow = 1'410'420'397'140ull;

httplib::Headers sim_headers(uint64_t now, const char* truth = "legit") {
  return {{"X-Adlab-Session", "it-1"},
          {"X-Adlab-Ip", "10.0.0.9"},
          {"X-Adlab-Truth", truth},
          {"X-Adlab-Now", std::to_string(now)}};
}

}  // namespace

TEST_CASE("the http endpoints mirror the in-process service") {
  harness::Corpus corpus = harness::gen_corpus(3, 3, 2);
  service::AdService svc = harness::make_corpus_service(corpus);
  http::HttpService server(svc);
  server.start();
  httplib::Client cli(server.base_url());
  cli.set_follow_location(false);

  const auto& site = corpus.sites[0];

  SUBCASE("publisher pages are served under /site/{id}{page}") {
    auto res = cli.Get("/site/" + site.site_id + site.pages[0],
                       sim_headers(kNow));
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body.find("GoogleAdSense") != std::string::npos);
    auto miss = cli.Get("/site/" + site.site_id + "/missing.html",
                        sim_headers(kNow));
    CHECK(miss->status == 404);
  }

  SUBCASE("the bootstrap asset and verification frame respond") {
    auto js = cli.Get("/pagead/show_ads.js");
    REQUIRE(js);
    CHECK(js->status == 200);
    CHECK(js->body.find("adlab bootstrap") != std::string::npos);

    auto zrt = cli.Get("/pagead/html/zrt_lookup.html?origin=http%3A%2F%2Fx",
                       sim_headers(kNow));
    REQUIRE(zrt);
    CHECK(zrt->status == 200);
    CHECK(zrt->has_header("X-Adlab-Token"));
  }

  SUBCASE("the full extraction pipeline works over http") {
    auto fetcher = extractor::make_http_fetcher(server.base_url());
    extractor::Extractor ex(*fetcher,
                            {"it-2", "172.16.5.5", service::Truth::Fraud});
    extractor::ExtractionResult res = ex.run_extraction(
        site.base_url + site.pages[0], site.base_url, kNow);
    CHECK(res.complete());
    CHECK(res.link_urls.size() == size_t(site.ad_config.max_num_ads));
    for (const auto& link : res.links)
      CHECK(adnet::verify_click_url(link, corpus.key));

    // raw (unrewritten) fetch trips the origin gate with a 409
    auto raw = fetcher->get(res.ad_frame_url_raw,
                            {"it-2", "172.16.5.5", service::Truth::Fraud},
                            kNow);
    CHECK(raw.status == 409);

    SUBCASE("clicking a minted link redirects; tampering is refused") {
      Url link_url = Url::parse(res.link_urls[0]);
      auto click = cli.Get(link_url.path + "?" + link_url.query,
                           sim_headers(kNow + 5000, "fraud"));
      REQUIRE(click);
      CHECK(click->status == 302);
      CHECK(click->get_header_value("Location") ==
            res.links[0].adurl);

      adnet::AdLink bad = res.links[0];
      bad.adurl = "http://evil.example/";
      std::string bad_url = adnet::render_click_url(corpus.ads_base_url, bad);
      Url bad_parsed = Url::parse(bad_url);
      auto rejected = cli.Get(bad_parsed.path + "?" + bad_parsed.query,
                              sim_headers(kNow + 5000, "fraud"));
      REQUIRE(rejected);
      CHECK(rejected->status == 403);
    }
  }

  SUBCASE("cmd_extract works against the live service with a key file") {
    harness::ExtractOptions opts;
    opts.service_url = server.base_url();
    opts.target_url = site.base_url + site.pages[0];
    opts.rewrite_domain = site.base_url;
    opts.key = corpus.key;
    extractor::ExtractionResult result;
    CHECK(harness::cmd_extract(opts, &result) == harness::kExitOk);
    CHECK(result.complete());
    CHECK(result.links.size() == size_t(site.ad_config.max_num_ads));

    // a wrong key turns verification failure into the step-j exit code
    opts.key = std::string(32, 'f');
    CHECK(harness::cmd_extract(opts, nullptr) ==
          harness::kExitStepBase + int(extractor::Step::J));
  }

  SUBCASE("expired tokens are refused over http") {
    auto zrt = cli.Get("/pagead/html/zrt_lookup.html?origin=http%3A%2F%2Fx",
                       sim_headers(kNow));
    std::string token = zrt->get_header_value("X-Adlab-Token");
    adnet::AdRequest req = adnet::make_ad_request(
        site.ad_config, site.base_url + site.pages[0], site.base_url,
        kNow + 60'000, "1234567890123", token);
    std::string url =
        adnet::render_ad_request_url(corpus.ads_base_url, req);
    Url parsed = Url::parse(url);
    auto res = cli.Get(parsed.path + "?" + parsed.query,
                       sim_headers(kNow + 60'000));
    REQUIRE(res);
    CHECK(res->status == 401);  // past the 30 s ttl
  }

  server.stop();
}
