#include "adlab/extractor.hpp"

#include <regex>

#include "adlab/error.hpp"
#include "adlab/harness.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace adlab;
using namespace adlab::extractor;

namespace {

constexpr uint64_t kNow = 1'410'420'397'140ull;

harness::Corpus three_ad_corpus() {
  // enough campaigns per channel that every slot fills
  return harness::gen_corpus(4, 3, 2);
}

/// Oracle for anchor extraction: recursive tag-tree walk collecting every
/// <a href> below <body>. Independent of the production scanner.
void oracle_walk(const std::string& html, size_t from, size_t to, bool in_body,
                 std::vector<std::string>& out) {
  static const std::regex tag_re(R"(<(/?)([A-Za-z][A-Za-z0-9]*)([^>]*)>)");
  auto begin = std::sregex_iterator(html.begin() + from, html.begin() + to, tag_re);
  int depth = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const std::smatch& m = *it;
    std::string name = m[2].str();
    for (auto& ch : name) ch = char(tolower(ch));
    bool closing = m[1].length() > 0;
    if (name == "body") depth += closing ? -1 : 1;
    if ((in_body || depth > 0) && name == "a" && !closing) {
      std::smatch href;
      std::string attrs = m[3].str();
      if (std::regex_search(attrs, href,
                            std::regex(R"re(href\s*=\s*"([^"]*)")re")))
        out.push_back(href[1].str());
    }
  }
}

std::vector<std::string> oracle_links(const std::string& html) {
  std::vector<std::string> out;
  oracle_walk(html, 0, html.size(), false, out);
  return out;
}

}  // namespace

TEST_CASE("fetch_source returns the page and records one visit") {
  harness::Corpus corpus = three_ad_corpus();
  service::AdService svc = harness::make_corpus_service(corpus);
  InProcessFetcher fetcher(svc);
  Extractor ex(fetcher, {"x1", "172.16.0.1", service::Truth::Fraud});

  std::string url = corpus.sites[0].base_url + corpus.sites[0].pages[0];
  std::string html = ex.fetch_source(url, kNow);
  CHECK(html.find("GoogleAdSense") != std::string::npos);
  REQUIRE(svc.events().size() == 1);
  CHECK(svc.events()[0].kind == service::EventKind::Visit);

  CHECK_THROWS_WITH_AS(ex.fetch_source("http://no.such.host/x", kNow),
                       doctest::Contains("FetchError"), Error);
  CHECK_THROWS_AS(ex.fetch_source(corpus.sites[0].base_url + "/missing.html", kNow),
                  Error);

  // frozen clock: repeated fetches are byte-identical
  CHECK(ex.fetch_source(url, kNow) == ex.fetch_source(url, kNow));
}

TEST_CASE("the captured ad block parses to the expected config") {
  auto configs = detect_ad_block(testfix::kCapturedAdBlockHtml);
  REQUIRE(configs.size() == 1);
  const adnet::AdConfig& c = configs[0];
  CHECK(c.client_id == "pub-1229649499684927");
  CHECK(c.channel == "ANUNCIOS.COM");
  CHECK(c.ad_type == adnet::AdType::Text);
  CHECK(c.max_num_ads == 3);
  CHECK(c.language == "es");
  CHECK(c.safe_level == adnet::SafeLevel::High);
  CHECK(c.encoding == "utf8");
  CHECK(c.width == 336);
  CHECK(c.height == 280);
  CHECK(c.format == "336x280_as");
  CHECK(c.colors.border == "EEEEEE");
  CHECK(c.colors.bg == "EEEEEE");
  CHECK(c.colors.link == "000066");
  CHECK(c.colors.text == "000000");
  CHECK(c.colors.url == "CC0000");
}

TEST_CASE("block detection tolerates formatting variation and multiplicity") {
  CHECK(detect_ad_block("<html><body>no ads here</body></html>").empty());

  std::string two_blocks =
      "<html><body>"
      "<script type=\"text/javascript\" language=\"JavaScript\">"
      "google_ad_client='pub-1111';google_ad_channel='ONE';"
      "google_max_num_ads=2;google_ad_width=300;google_ad_height=250;"
      "google_ad_format=\"300x250_as\";</script>"
      "<p>text between</p>"
      "<SCRIPT>\n  google_ad_client = \"pub-2222\"\n"
      "  google_ad_channel = \"TWO\"\n  google_max_num_ads = 1;\n</SCRIPT>"
      "</body></html>";
  auto configs = detect_ad_block(two_blocks);
  REQUIRE(configs.size() == 2);
  CHECK(configs[0].client_id == "pub-1111");
  CHECK(configs[0].channel == "ONE");
  CHECK(configs[0].max_num_ads == 2);
  CHECK(configs[0].width == 300);
  CHECK(configs[1].client_id == "pub-2222");
  CHECK(configs[1].channel == "TWO");
  CHECK(configs[1].max_num_ads == 1);
}

TEST_CASE("emulated render leaks the execution origin into url and p") {
  harness::Corpus corpus = three_ad_corpus();
  service::AdService svc = harness::make_corpus_service(corpus);
  InProcessFetcher fetcher(svc);
  Extractor ex(fetcher, {"x1", "172.16.0.1", service::Truth::Fraud},
               "http://localhost/vigilante/exploits/exploit2.php");

  const auto& site = corpus.sites[0];
  std::string url = ex.emulate_client_render(
      site.ad_config, site.base_url + site.pages[0], corpus.ads_base_url, kNow);
  CHECK(url.find("url=http%3A%2F%2Flocalhost%2Fvigilante%2Fexploits%2Fexploit2.php") !=
        std::string::npos);
  CHECK(url.find("&p=http%3A%2F%2Flocalhost") != std::string::npos);

  adnet::AdRequest parsed = adnet::parse_ad_request_url(url);
  CHECK(parsed.client == "ca-" + site.ad_config.client_id);
  CHECK(parsed.url == "http://localhost/vigilante/exploits/exploit2.php");
  CHECK(parsed.parent == "http://localhost");

  // the url is a pure function of (config, page, token, clock)
  adnet::AdRequest again = adnet::make_ad_request(
      site.ad_config, "http://localhost/vigilante/exploits/exploit2.php",
      "http://localhost", kNow, parsed.correlator, parsed.verification_token);
  CHECK(adnet::render_ad_request_url(corpus.ads_base_url, again) == url);
}

TEST_CASE("origin rewrite reproduces the capture-exact spans") {
  std::string rewritten =
      rewrite_origin_params(testfix::kCapturedAdFrameUrl, "http://www.anuncios.com");

  CHECK(rewritten.find("&url=http://www.anuncios.com/&adsafe") !=
        std::string::npos);
  std::string tail = "&p=http://www.anuncios.com";
  REQUIRE(rewritten.size() >= tail.size());
  CHECK(rewritten.compare(rewritten.size() - tail.size(), tail.size(), tail) == 0);

  // oracle: the same two greedy substitutions expressed as regexes
  std::string expected = std::regex_replace(
      std::string(testfix::kCapturedAdFrameUrl),
      std::regex(R"(&url=.*&adsafe)"), "&url=http://www.anuncios.com/&adsafe");
  expected = std::regex_replace(expected, std::regex(R"(&p=http.*)"),
                                "&p=http://www.anuncios.com");
  CHECK(rewritten == expected);

  // no other byte changed: prefix before &url= is untouched
  size_t url_pos = std::string(testfix::kCapturedAdFrameUrl).find("&url=");
  CHECK(rewritten.compare(0, url_pos,
                          std::string(testfix::kCapturedAdFrameUrl), 0,
                          url_pos) == 0);

  SUBCASE("idempotent") {
    CHECK(rewrite_origin_params(rewritten, "http://www.anuncios.com") ==
          rewritten);
  }
}

TEST_CASE("rewrite fails cleanly when the pattern shapes are absent") {
  CHECK_THROWS_WITH_AS(
      rewrite_origin_params("http://x/pagead/ads?a=1&b=2", "http://t"),
      doctest::Contains("PatternNotFound"), Error);
  CHECK_THROWS_WITH_AS(
      rewrite_origin_params("http://x/ads?url=v&adsafe=high", "http://t"),
      doctest::Contains("PatternNotFound"), Error);  // no &url=
  CHECK_THROWS_WITH_AS(
      rewrite_origin_params("http://x/ads?a=1&url=v&adsafe=high&p=ftp", "http://t"),
      doctest::Contains("PatternNotFound"), Error);  // no &p=http
}

TEST_CASE("the rewritten url is served where the raw url is refused") {
  harness::Corpus corpus = three_ad_corpus();
  service::AdService svc = harness::make_corpus_service(corpus);
  InProcessFetcher fetcher(svc);
  Extractor ex(fetcher, {"x1", "172.16.0.1", service::Truth::Fraud});

  const auto& site = corpus.sites[0];
  std::string raw = ex.emulate_client_render(
      site.ad_config, site.base_url + site.pages[0], corpus.ads_base_url, kNow);

  FetchResponse raw_resp =
      fetcher.get(raw, {"x1", "172.16.0.1", service::Truth::Fraud}, kNow);
  CHECK(raw_resp.status == 409);
  CHECK(raw_resp.body.find("OriginMismatch") == 0);

  std::string rewritten = rewrite_origin_params(raw, site.base_url);
  FetchResponse ok_resp =
      fetcher.get(rewritten, {"x1", "172.16.0.1", service::Truth::Fraud}, kNow);
  CHECK(ok_resp.status == 200);
  CHECK(extract_ad_links(ok_resp.body).size() == size_t(site.ad_config.max_num_ads));
}

TEST_CASE("anchor extraction matches the exhaustive tree-walk oracle") {
  std::string doc =
      "<html><head><a href=\"http://not-in-body\">head</a></head><body>"
      "<a href=\"http://one\">1</a>"
      "<div><p><span><a href=\"http://two\">2</a></span></p></div>"
      "<div class=\"x\"><div><div><a style=\"color:red\" "
      "href=\"http://three\">3</a></div></div></div>"
      "<!-- <a href=\"http://commented\">no</a> -->"
      "<script>var s = '<a href=\"http://scripted\">no</a>';</script>"
      "</body></html>";
  auto links = extract_ad_links(doc);
  REQUIRE(links.size() == 3);
  CHECK(links[0] == "http://one");
  CHECK(links[1] == "http://two");
  CHECK(links[2] == "http://three");

  CHECK(extract_ad_links("<html><body><p>none</p></body></html>").empty());

  // oracle comparison over generated nestings
  for (int depth = 0; depth < 12; ++depth) {
    std::string nested = "<html><body>";
    for (int i = 0; i < depth; ++i) nested += "<div>";
    nested += "<a href=\"http://deep/" + std::to_string(depth) + "\">x</a>";
    for (int i = 0; i < depth; ++i) nested += "</div>";
    nested += "</body></html>";
    auto got = extract_ad_links(nested);
    auto expect = oracle_links(nested);
    CHECK(got == expect);
    REQUIRE(got.size() == 1);
  }
}

TEST_CASE("run_extraction recovers exactly the minted links") {
  harness::Corpus corpus = three_ad_corpus();
  service::AdService svc = harness::make_corpus_service(corpus);
  InProcessFetcher fetcher(svc);
  Extractor ex(fetcher, {"x1", "172.16.0.1", service::Truth::Fraud});

  for (const auto& site : corpus.sites) {
    for (const auto& page : site.pages) {
      size_t imp_before = svc.impressions().size();
      ExtractionResult res =
          ex.run_extraction(site.base_url + page, site.base_url, kNow);
      CHECK(res.complete());
      REQUIRE(svc.impressions().size() == imp_before + 1);
      const auto& minted = svc.impressions().back().links;
      CHECK(res.link_urls == minted);
      CHECK(res.links.size() == size_t(site.ad_config.max_num_ads));
      for (const auto& link : res.links)
        CHECK(adnet::verify_click_url(link, corpus.key));
    }
  }
  // extraction never clicks
  for (const auto& e : svc.events())
    CHECK(e.kind != service::EventKind::Click);
}

TEST_CASE("extraction trace stops at step b on an ad-free page") {
  harness::Corpus corpus = three_ad_corpus();
  // a site whose page renders without any ad block is easiest to fake by
  // pointing the extractor at the ads host's bootstrap asset
  service::AdService svc = harness::make_corpus_service(corpus);
  InProcessFetcher fetcher(svc);
  Extractor ex(fetcher, {"x1", "172.16.0.1", service::Truth::Fraud});
  ExtractionResult res = ex.run_extraction(
      corpus.ads_base_url + "/pagead/show_ads.js", "", kNow);
  CHECK_FALSE(res.complete());
  REQUIRE(res.step_trace.size() == 2);
  CHECK(res.step_trace[0].step == Step::A);
  CHECK(res.step_trace[0].ok());
  CHECK(res.step_trace[1].step == Step::B);
  CHECK_FALSE(res.step_trace[1].ok());
  CHECK(res.links.empty());
  CHECK(res.failed_step() == Step::B);
}

TEST_CASE("a page with two ad blocks yields both link sets in order") {
  // two sites' blocks pasted into one synthetic page, served from site0's host
  harness::Corpus corpus = three_ad_corpus();
  service::AdService svc = harness::make_corpus_service(corpus);
  const auto* s0 = svc.find_site(corpus.sites[0].site_id);
  const auto* s1 = svc.find_site(corpus.sites[1].site_id);
  std::string page0 = svc.render_publisher_page(*s0, s0->pages[0]);
  std::string page1 = svc.render_publisher_page(*s1, s1->pages[0]);
  auto c0 = detect_ad_block(page0);
  auto c1 = detect_ad_block(page1);
  REQUIRE(c0.size() == 1);
  REQUIRE(c1.size() == 1);
  std::string merged = page0 + page1;
  auto both = detect_ad_block(merged);
  REQUIRE(both.size() == 2);
  CHECK(both[0] == c0[0]);
  CHECK(both[1] == c1[0]);
}
