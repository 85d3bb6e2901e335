#include "adlab/service.hpp"

#include "adlab/error.hpp"
#include "adlab/extractor.hpp"
#include "doctest.h"

using namespace adlab;
using namespace adlab::service;

namespace {

const char* kKey = "0123456789abcdef0123456789abcdef";

PublisherSite anuncios_site() {
  PublisherSite s;
  s.site_id = "anuncios";
  s.base_url = "http://www.anuncios.com";
  s.pages = {"/index.html", "/ofertas.html"};
  s.baseline_popularity = 100.0;
  s.ad_config = adnet::make_ad_config("pub-1229649499684927", "ANUNCIOS.COM",
                                      3, 336, 280, "es");
  return s;
}

adnet::Campaign campaign(std::string id) {
  adnet::Campaign c;
  c.id = id;
  c.advertiser_id = "adv-" + id;
  c.landing_url = "http://" + id + ".example/land";
  c.channel_targets = {"ANUNCIOS.COM"};
  c.headline = "Visit " + id;
  return c;
}

AdService make_service(int n_campaigns = 3) {
  ServiceConfig cfg;
  cfg.key = kKey;
  AdService svc(cfg);
  svc.register_site(anuncios_site());
  for (int i = 0; i < n_campaigns; ++i)
    svc.register_campaign(campaign("c" + std::to_string(i)));
  return svc;
}

/// Legit-browser request against the service's registered site.
adnet::AdRequest coherent_request(AdService& svc, uint64_t now,
                                  const std::string& page = "/index.html") {
  const PublisherSite* site = svc.find_site("anuncios");
  auto [doc, token] = svc.serve_verification_frame(site->base_url, now);
  (void)doc;
  return adnet::make_ad_request(site->ad_config, site->base_url + page,
                                site->base_url, now, "8467094044672",
                                token.token);
}

size_t count_anchors(const std::string& html) {
  return extractor::extract_ad_links(html).size();
}

}  // namespace

TEST_CASE("publisher page carries the ad block verbatim names") {
  AdService svc = make_service();
  const PublisherSite* site = svc.find_site("anuncios");
  std::string html = svc.render_publisher_page(*site, "/index.html");
  CHECK(html.find("<div id=\"GoogleAdSense\">") != std::string::npos);
  CHECK(html.find("google_ad_client = \"pub-1229649499684927\";") !=
        std::string::npos);
  CHECK(html.find("google_max_num_ads = 3;") != std::string::npos);
  CHECK(html.find("google_ad_format = \"336x280_as\";") != std::string::npos);
  CHECK(html.find("/pagead/show_ads.js") != std::string::npos);
  CHECK_THROWS_WITH_AS(svc.render_publisher_page(*site, "/nope.html"),
                       doctest::Contains("NotFound"), Error);
}

TEST_CASE("publisher page reflects the configured ad count") {
  ServiceConfig cfg;
  cfg.key = kKey;
  AdService svc(cfg);
  PublisherSite s = anuncios_site();
  s.ad_config = adnet::make_ad_config("pub-1229649499684927", "ANUNCIOS.COM",
                                      1, 336, 280, "es");
  svc.register_site(s);
  std::string html =
      svc.render_publisher_page(*svc.find_site("anuncios"), "/index.html");
  CHECK(html.find("google_max_num_ads = 1;") != std::string::npos);
}

TEST_CASE("rendered pages round-trip through the block detector") {
  AdService svc = make_service();
  const PublisherSite* site = svc.find_site("anuncios");
  for (const auto& page : site->pages) {
    auto configs =
        extractor::detect_ad_block(svc.render_publisher_page(*site, page));
    REQUIRE(configs.size() == 1);
    CHECK(configs[0] == site->ad_config);
  }
}

TEST_CASE("verification tokens are fresh and single-use") {
  AdService svc = make_service();
  auto [doc1, t1] = svc.serve_verification_frame("http://a", 1000);
  auto [doc2, t2] = svc.serve_verification_frame("http://a", 1000);
  CHECK(doc1 == doc2);
  CHECK(t1.token != t2.token);

  adnet::AdRequest req = coherent_request(svc, 2000);
  CHECK_NOTHROW(svc.serve_ad_frame(req, {"s1", "10.0.0.1", Truth::Legit}, 2000));
  // spent: the same token cannot serve twice
  CHECK_THROWS_WITH_AS(
      svc.serve_ad_frame(req, {"s1", "10.0.0.1", Truth::Legit}, 2100),
      doctest::Contains("TokenRejected"), Error);
}

TEST_CASE("expired tokens are rejected") {
  AdService svc = make_service();
  adnet::AdRequest req = coherent_request(svc, 1000);
  uint64_t expired_at = 1000 + svc.config().token_ttl_ms + 1;
  CHECK_THROWS_WITH_AS(
      svc.serve_ad_frame(req, {"s1", "10.0.0.1", Truth::Legit}, expired_at),
      doctest::Contains("TokenRejected"), Error);
  // an unknown token is rejected outright
  adnet::AdRequest bogus = coherent_request(svc, 2000);
  bogus.verification_token = "vt999-ffffffffffffffff";
  CHECK_THROWS_WITH_AS(
      svc.serve_ad_frame(bogus, {"s1", "10.0.0.1", Truth::Legit}, 2000),
      doctest::Contains("TokenRejected"), Error);
}

TEST_CASE("ad frame carries min(num_ads, matches) anchors") {
  SUBCASE("three matching campaigns fill three slots") {
    AdService svc = make_service(3);
    std::string html = svc.serve_ad_frame(coherent_request(svc, 1000),
                                          {"s1", "10.0.0.1", Truth::Legit},
                                          1000);
    CHECK(count_anchors(html) == 3);
    REQUIRE(svc.impressions().size() == 1);
    CHECK(svc.impressions()[0].links.size() == 3);
  }
  SUBCASE("five matching campaigns still fill only num_ads slots") {
    AdService svc = make_service(5);
    std::string html = svc.serve_ad_frame(coherent_request(svc, 1000),
                                          {"s1", "10.0.0.1", Truth::Legit},
                                          1000);
    CHECK(count_anchors(html) == 3);
  }
  SUBCASE("no matching campaigns yields an empty body") {
    AdService svc = make_service(0);
    std::string html = svc.serve_ad_frame(coherent_request(svc, 1000),
                                          {"s1", "10.0.0.1", Truth::Legit},
                                          1000);
    CHECK(count_anchors(html) == 0);
  }
}

TEST_CASE("origin coherence is enforced before anything is served") {
  AdService svc = make_service();
  SUBCASE("url host != p host") {
    adnet::AdRequest req = coherent_request(svc, 1000);
    req.parent = "http://other.mock";
    CHECK_THROWS_WITH_AS(
        svc.serve_ad_frame(req, {"s1", "10.0.0.1", Truth::Legit}, 1000),
        doctest::Contains("OriginMismatch"), Error);
  }
  SUBCASE("url/p agree but are not the registered site host") {
    adnet::AdRequest req = coherent_request(svc, 1000);
    req.url = "http://localhost/vigilante/exploits/exploit2.php";
    req.parent = "http://localhost";
    CHECK_THROWS_WITH_AS(
        svc.serve_ad_frame(req, {"s1", "10.0.0.1", Truth::Legit}, 1000),
        doctest::Contains("OriginMismatch"), Error);
    // and the token survives a mismatched attempt
    req.url = "http://www.anuncios.com/index.html";
    req.parent = "http://www.anuncios.com";
    CHECK_NOTHROW(
        svc.serve_ad_frame(req, {"s1", "10.0.0.1", Truth::Legit}, 1000));
  }
  SUBCASE("unknown client account") {
    adnet::AdRequest req = coherent_request(svc, 1000);
    req.client = "ca-pub-0000000000000000";
    CHECK_THROWS_WITH_AS(
        svc.serve_ad_frame(req, {"s1", "10.0.0.1", Truth::Legit}, 1000),
        doctest::Contains("OriginMismatch"), Error);
  }
}

TEST_CASE("clicks verify, measure dwell, and reject tampering") {
  AdService svc = make_service();
  ClientContext ctx{"s1", "10.0.0.1", Truth::Legit};
  svc.fetch_page("anuncios", "/index.html", ctx, 1000);
  svc.serve_ad_frame(coherent_request(svc, 1400), ctx, 1400);
  std::string href = svc.impressions()[0].links[0];
  adnet::AdLink link = adnet::parse_click_url(href);

  SUBCASE("a minted link redirects to the campaign landing url") {
    ClickResult r = svc.handle_click(link, ctx, 6400);
    CHECK(r.accepted);
    CHECK(r.redirect_url == "http://c0.example/land");
    // dwell measured from the impression, 5 sim-seconds earlier
    const Event& click = svc.events().back();
    CHECK(click.kind == EventKind::Click);
    CHECK(click.dwell_ms == 5000);
    CHECK(click.site_id == "anuncios");
  }

  SUBCASE("a tampered adurl is rejected and records nothing") {
    size_t n_before = svc.events().size();
    adnet::AdLink bad = link;
    bad.adurl = "http://evil.example/";
    ClickResult r = svc.handle_click(bad, ctx, 6400);
    CHECK_FALSE(r.accepted);
    CHECK(r.redirect_url.empty());
    CHECK(svc.events().size() == n_before);
  }

  SUBCASE("every recorded click's link verifies under the service key") {
    svc.handle_click(link, ctx, 2000);
    for (const Event& e : svc.events()) {
      if (e.kind != EventKind::Click) continue;
      CHECK(adnet::verify_click_url(adnet::parse_click_url(e.link), kKey));
    }
  }
}

TEST_CASE("select_ads picks deterministically by campaign id") {
  AdService svc = make_service(5);
  auto picked = svc.select_ads("ANUNCIOS.COM", 3);
  REQUIRE(picked.size() == 3);
  CHECK(picked[0].id == "c0");
  CHECK(picked[1].id == "c1");
  CHECK(picked[2].id == "c2");
  CHECK(svc.select_ads("NOSUCH.CHANNEL", 3).empty());
  // stable across repeated calls
  for (int i = 0; i < 5; ++i) {
    auto again = svc.select_ads("ANUNCIOS.COM", 3);
    REQUIRE(again.size() == picked.size());
    for (size_t k = 0; k < again.size(); ++k) CHECK(again[k].id == picked[k].id);
  }
}

TEST_CASE("event log is ordered and round-trips through the text format") {
  AdService svc = make_service();
  ClientContext ctx{"s1", "10.0.0.1", Truth::Legit};
  svc.fetch_page("anuncios", "/index.html", ctx, 1000);
  svc.serve_ad_frame(coherent_request(svc, 1300), ctx, 1300);
  std::string href = svc.impressions()[0].links[0];
  svc.handle_click(adnet::parse_click_url(href), ctx, 4300);

  const auto& events = svc.events();
  REQUIRE(events.size() == 3);
  for (size_t i = 1; i < events.size(); ++i) {
    CHECK(events[i].seq == events[i - 1].seq + 1);
    CHECK(events[i].ts >= events[i - 1].ts);
  }

  std::string text = serialize_event_log(events);
  std::vector<Event> back = parse_event_log(text);
  REQUIRE(back.size() == events.size());
  for (size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].kind == events[i].kind);
    CHECK(back[i].ts == events[i].ts);
    CHECK(back[i].session_id == events[i].session_id);
    CHECK(back[i].ip == events[i].ip);
    CHECK(back[i].site_id == events[i].site_id);
    CHECK(back[i].page == events[i].page);
    CHECK(back[i].link == events[i].link);
    CHECK(back[i].dwell_ms == events[i].dwell_ms);
    CHECK(back[i].truth == events[i].truth);
  }
  CHECK(serialize_event_log(back) == text);
}
