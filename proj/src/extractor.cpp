#include "adlab/extractor.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

#include "adlab/error.hpp"

namespace adlab::extractor {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

size_t ifind(std::string_view hay, std::string_view needle, size_t from) {
  if (needle.empty() || hay.size() < needle.size()) return std::string_view::npos;
  for (size_t i = from; i + needle.size() <= hay.size(); ++i)
    if (iequals(hay.substr(i, needle.size()), needle)) return i;
  return std::string_view::npos;
}

/// Maps a failed response back to the typed error the service raised; the
/// body carries "CodeName: detail" for service-side failures.
[[noreturn]] void raise_from_response(const FetchResponse& r,
                                      const std::string& what) {
  static const ErrorCode kCodes[] = {
      ErrorCode::OriginMismatch, ErrorCode::TokenRejected, ErrorCode::NotFound,
      ErrorCode::MissingParam,   ErrorCode::BadParam,
  };
  for (ErrorCode c : kCodes) {
    std::string_view name = error_code_name(c);
    if (r.body.rfind(name, 0) == 0) {
      std::string detail = r.body.substr(name.size());
      if (detail.rfind(": ", 0) == 0) detail = detail.substr(2);
      throw Error(c, detail);
    }
  }
  fail(ErrorCode::FetchError,
       what + " (status " + std::to_string(r.status) + ")");
}

struct TagToken {
  std::string name;   // lowercased
  bool closing = false;
  size_t attr_begin = 0, attr_end = 0;  // attribute text span in the source
};

/// Minimal well-formed-HTML tag scanner: yields tags, skips comments and
/// script/style bodies.
class TagScanner {
 public:
  explicit TagScanner(const std::string& html) : html_(html) {}

  bool next(TagToken& out) {
    while (true) {
      size_t lt = html_.find('<', pos_);
      if (lt == std::string::npos) return false;
      if (html_.compare(lt, 4, "<!--") == 0) {
        size_t end = html_.find("-->", lt + 4);
        pos_ = end == std::string::npos ? html_.size() : end + 3;
        continue;
      }
      size_t gt = html_.find('>', lt);
      if (gt == std::string::npos) return false;
      size_t name_start = lt + 1;
      bool closing = false;
      if (name_start < html_.size() && html_[name_start] == '/') {
        closing = true;
        ++name_start;
      }
      size_t name_end = name_start;
      while (name_end < gt &&
             !std::isspace(static_cast<unsigned char>(html_[name_end])) &&
             html_[name_end] != '/')
        ++name_end;
      out.name.assign(html_, name_start, name_end - name_start);
      std::transform(out.name.begin(), out.name.end(), out.name.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      out.closing = closing;
      out.attr_begin = name_end;
      out.attr_end = gt;
      pos_ = gt + 1;
      if (!closing && (out.name == "script" || out.name == "style")) {
        size_t end = ifind(html_, "</" + out.name, pos_);
        pos_ = end == std::string::npos ? html_.size() : end;
      }
      if (out.name.empty()) continue;
      return true;
    }
  }

  const std::string& source() const { return html_; }

 private:
  const std::string& html_;
  size_t pos_ = 0;
};

std::optional<std::string> attr_value(std::string_view attrs,
                                      std::string_view name) {
  size_t i = 0;
  while (i < attrs.size()) {
    while (i < attrs.size() &&
           (std::isspace(static_cast<unsigned char>(attrs[i])) || attrs[i] == '/'))
      ++i;
    size_t key_start = i;
    while (i < attrs.size() && attrs[i] != '=' &&
           !std::isspace(static_cast<unsigned char>(attrs[i])))
      ++i;
    std::string_view key = attrs.substr(key_start, i - key_start);
    while (i < attrs.size() && std::isspace(static_cast<unsigned char>(attrs[i])))
      ++i;
    std::string value;
    if (i < attrs.size() && attrs[i] == '=') {
      ++i;
      while (i < attrs.size() && std::isspace(static_cast<unsigned char>(attrs[i])))
        ++i;
      if (i < attrs.size() && (attrs[i] == '"' || attrs[i] == '\'')) {
        char quote = attrs[i++];
        size_t end = attrs.find(quote, i);
        if (end == std::string_view::npos) end = attrs.size();
        value.assign(attrs.substr(i, end - i));
        i = end + 1;
      } else {
        size_t end = i;
        while (end < attrs.size() &&
               !std::isspace(static_cast<unsigned char>(attrs[end])))
          ++end;
        value.assign(attrs.substr(i, end - i));
        i = end;
      }
    }
    if (!key.empty() && iequals(key, name)) return value;
    if (key.empty()) ++i;
  }
  return std::nullopt;
}

const std::regex& assignment_regex() {
  static const std::regex re(
      R"re(google_([A-Za-z0-9_]+)\s*=\s*(?:"([^"]*)"|'([^']*)'|([0-9]+)))re");
  return re;
}

}  // namespace

std::string_view step_name(Step s) {
  static const char* kNames[] = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
  return kNames[static_cast<int>(s)];
}

std::string_view step_label(Step s) {
  switch (s) {
    case Step::A: return "fetch target source";
    case Step::B: return "detect ad code";
    case Step::C: return "execute ad code";
    case Step::D: return "load verification and ad frames";
    case Step::E: return "insert capture form";
    case Step::F: return "capture ad frame url";
    case Step::G: return "submit capture form";
    case Step::H: return "prepare ad frame url";
    case Step::I: return "fetch ad frame source";
    case Step::J: return "extract ad links";
  }
  return "";
}

bool ExtractionResult::complete() const {
  if (step_trace.empty() || step_trace.back().step != Step::J) return false;
  return std::all_of(step_trace.begin(), step_trace.end(),
                     [](const StepTrace& t) { return t.ok(); });
}

std::optional<Step> ExtractionResult::failed_step() const {
  for (const StepTrace& t : step_trace)
    if (!t.ok()) return t.step;
  if (step_trace.empty() || step_trace.back().step != Step::J)
    return step_trace.empty() ? Step::A : step_trace.back().step;
  return std::nullopt;
}

FetchResponse InProcessFetcher::get(const std::string& url,
                                    const service::ClientContext& ctx,
                                    uint64_t now) {
  FetchResponse resp;
  try {
    Url u = Url::parse(url);
    std::string ads_host = Url::parse(svc_.config().ads_base_url).host;
    if (u.host == ads_host) {
      if (u.path == "/pagead/show_ads.js") {
        resp.status = 200;
        resp.body = service::AdService::bootstrap_script();
      } else if (u.path == "/pagead/html/zrt_lookup.html") {
        std::string origin = "unknown";
        for (const auto& [k, v] : split_query(u.query))
          if (k == "origin") origin = percent_decode(v);
        auto [doc, token] = svc_.serve_verification_frame(origin, now);
        resp.status = 200;
        resp.body = doc;
        resp.headers["X-Adlab-Token"] = token.token;
      } else if (u.path == "/pagead/ads") {
        adnet::AdRequest req = adnet::parse_ad_request_url(url);
        resp.body = svc_.serve_ad_frame(req, ctx, now);
        resp.status = 200;
      } else if (u.path == "/aclk") {
        adnet::AdLink link = adnet::parse_click_url(url);
        service::ClickResult cr = svc_.handle_click(link, ctx, now);
        if (cr.accepted) {
          resp.status = 302;
          resp.headers["Location"] = cr.redirect_url;
        } else {
          resp.status = 403;
          resp.body = "RejectedLink";
        }
      } else {
        resp.status = 404;
        resp.body = "NotFound: " + u.path;
      }
      return resp;
    }
    const service::PublisherSite* site = svc_.find_site_by_host(u.host);
    if (!site) {
      resp.status = 404;
      resp.body = "NotFound: no such host " + u.host;
      return resp;
    }
    resp.body = svc_.fetch_page(site->site_id, u.path, ctx, now);
    resp.status = 200;
    return resp;
  } catch (const Error& e) {
    resp.body = e.what();
    switch (e.code()) {
      case ErrorCode::NotFound: resp.status = 404; break;
      case ErrorCode::TokenRejected: resp.status = 401; break;
      case ErrorCode::OriginMismatch: resp.status = 409; break;
      default: resp.status = 400; break;
    }
    return resp;
  }
}

std::vector<adnet::AdConfig> detect_ad_block(const std::string& html) {
  std::vector<adnet::AdConfig> out;
  size_t pos = 0;
  while (true) {
    size_t open = ifind(html, "<script", pos);
    if (open == std::string::npos) break;
    size_t body_start = html.find('>', open);
    if (body_start == std::string::npos) break;
    ++body_start;
    size_t close = ifind(html, "</script", body_start);
    if (close == std::string::npos) break;
    std::string block = html.substr(body_start, close - body_start);
    pos = close + 1;
    if (block.find("google_ad_client") == std::string::npos) continue;

    adnet::AdConfig c;
    bool have_format = false;
    auto begin = std::sregex_iterator(block.begin(), block.end(), assignment_regex());
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
      const std::smatch& m = *it;
      std::string name = m[1].str();
      std::string value = m[2].matched ? m[2].str()
                        : m[3].matched ? m[3].str()
                                       : m[4].str();
      if (name == "ad_client") c.client_id = value;
      else if (name == "ad_channel") c.channel = value;
      else if (name == "ad_type") c.ad_type = adnet::ad_type_from(value);
      else if (name == "max_num_ads") c.max_num_ads = std::stoi(value);
      else if (name == "language") c.language = value;
      else if (name == "safe") c.safe_level = adnet::safe_level_from(value);
      else if (name == "encoding") c.encoding = value;
      else if (name == "ad_width") c.width = std::stoi(value);
      else if (name == "ad_height") c.height = std::stoi(value);
      else if (name == "ad_format") { c.format = value; have_format = true; }
      else if (name == "color_border") c.colors.border = value;
      else if (name == "color_bg") c.colors.bg = value;
      else if (name == "color_link") c.colors.link = value;
      else if (name == "color_text") c.colors.text = value;
      else if (name == "color_url") c.colors.url = value;
    }
    if (!have_format)
      c.format = std::to_string(c.width) + "x" + std::to_string(c.height) + "_as";
    out.push_back(std::move(c));
  }
  return out;
}

std::optional<std::string> find_bootstrap_base(const std::string& html) {
  TagScanner scan(html);
  TagToken tag;
  while (scan.next(tag)) {
    if (tag.closing || tag.name != "script") continue;
    std::string_view attrs(html.data() + tag.attr_begin,
                           tag.attr_end - tag.attr_begin);
    auto src = attr_value(attrs, "src");
    if (!src) continue;
    if (src->find("/pagead/show_ads.js") == std::string::npos) continue;
    Url u = Url::parse(*src);
    return u.origin();
  }
  return std::nullopt;
}

std::vector<std::string> extract_ad_links(const std::string& ad_html) {
  std::vector<std::string> out;
  TagScanner scan(ad_html);
  TagToken tag;
  int body_depth = 0;
  while (scan.next(tag)) {
    if (tag.name == "body") {
      body_depth += tag.closing ? -1 : 1;
      continue;
    }
    if (body_depth <= 0 || tag.closing || tag.name != "a") continue;
    std::string_view attrs(ad_html.data() + tag.attr_begin,
                           tag.attr_end - tag.attr_begin);
    if (auto href = attr_value(attrs, "href")) out.push_back(*href);
  }
  return out;
}

std::string rewrite_origin_params(const std::string& url,
                                  const std::string& target_domain) {
  size_t url_pos = url.find("&url=");
  if (url_pos == std::string::npos)
    fail(ErrorCode::PatternNotFound, "no &url= parameter");
  size_t adsafe_pos = url.rfind("&adsafe");
  if (adsafe_pos == std::string::npos || adsafe_pos < url_pos + 5)
    fail(ErrorCode::PatternNotFound, "no &adsafe after &url=");
  std::string out = url.substr(0, url_pos) + "&url=" + target_domain + "/" +
                    url.substr(adsafe_pos);
  size_t p_pos = out.find("&p=http");
  if (p_pos == std::string::npos)
    fail(ErrorCode::PatternNotFound, "no trailing &p=http parameter");
  out.erase(p_pos);
  out += "&p=" + target_domain;
  return out;
}

Extractor::Extractor(Fetcher& fetcher, service::ClientContext ctx,
                     std::string execution_origin)
    : fetcher_(fetcher),
      ctx_(std::move(ctx)),
      execution_origin_(std::move(execution_origin)) {}

std::string Extractor::fetch_source(const std::string& url, uint64_t now) {
  FetchResponse r = fetcher_.get(url, ctx_, now);
  if (r.status != 200)
    fail(ErrorCode::FetchError,
         "cannot fetch " + url + " (status " + std::to_string(r.status) +
             (r.body.empty() ? "" : ", " + r.body) + ")");
  return r.body;
}

std::string Extractor::emulate_client_render(const adnet::AdConfig& config,
                                             const std::string& page_url,
                                             const std::string& ads_base,
                                             uint64_t now) {
  std::string zrt = ads_base + "/pagead/html/zrt_lookup.html?origin=" +
                    percent_encode(execution_origin_);
  FetchResponse r = fetcher_.get(zrt, ctx_, now);
  if (r.status != 200) raise_from_response(r, "verification frame unreachable");
  auto tok = r.headers.find("X-Adlab-Token");
  if (tok == r.headers.end())
    fail(ErrorCode::FetchError, "verification frame returned no token");

  uint64_t h = fnv1a64(tok->second + "|" + page_url + "|" + std::to_string(now));
  std::string correlator =
      std::to_string(1'000'000'000'000ull + h % 9'000'000'000'000ull);

  // url/p carry the address the code runs from, not the target page: this is
  // exactly the contamination a client-side render leaks, and what the
  // rewrite step later repairs.
  std::string origin = Url::parse(execution_origin_).origin();
  adnet::AdRequest req = adnet::make_ad_request(
      config, execution_origin_, origin, now, correlator, tok->second);
  return adnet::render_ad_request_url(ads_base, req);
}

ExtractionResult Extractor::run_extraction(const std::string& target_url,
                                           const std::string& rewrite_domain,
                                           uint64_t now) {
  ExtractionResult result;
  result.target_url = target_url;
  auto trace = [&](Step s, std::string status) {
    result.step_trace.push_back({s, std::move(status), now});
  };

  std::string html;
  try {
    html = fetch_source(target_url, now);
    trace(Step::A, "ok");
  } catch (const Error& e) {
    trace(Step::A, e.what());
    return result;
  }

  std::vector<adnet::AdConfig> configs = detect_ad_block(html);
  if (configs.empty()) {
    trace(Step::B, "no ad block found");
    return result;
  }
  trace(Step::B, "ok");
  result.config = configs.front();

  auto ads_base = find_bootstrap_base(html);
  if (!ads_base) {
    trace(Step::C, "no bootstrap reference on page");
    return result;
  }
  trace(Step::C, "ok");

  bool first = true;
  for (const adnet::AdConfig& config : configs) {
    std::string raw_url;
    try {
      raw_url = emulate_client_render(config, target_url, *ads_base, now);
    } catch (const Error& e) {
      trace(Step::D, e.what());
      return result;
    }
    if (first) {
      trace(Step::D, "ok");
      trace(Step::E, "ok");
      result.ad_frame_url_raw = raw_url;
      trace(Step::F, "ok");
      trace(Step::G, "ok");
    }

    std::string prepared = raw_url;
    if (rewrite_domain.empty()) {
      if (first) trace(Step::H, "skipped");
    } else {
      try {
        prepared = rewrite_origin_params(raw_url, rewrite_domain);
      } catch (const Error& e) {
        trace(Step::H, e.what());
        return result;
      }
      if (first) trace(Step::H, "ok");
    }
    if (first) result.ad_frame_url_rewritten = prepared;

    FetchResponse frame = fetcher_.get(prepared, ctx_, now);
    if (frame.status != 200) {
      try {
        raise_from_response(frame, "cannot fetch ad frame");
      } catch (const Error& e) {
        trace(Step::I, e.what());
        return result;
      }
    }
    if (first) trace(Step::I, "ok");

    std::vector<std::string> hrefs = extract_ad_links(frame.body);
    try {
      for (const std::string& href : hrefs) {
        result.links.push_back(adnet::parse_click_url(href));
        result.link_urls.push_back(href);
      }
    } catch (const Error& e) {
      trace(Step::J, e.what());
      return result;
    }
    if (first) trace(Step::J, "ok");
    first = false;
  }
  return result;
}

std::string format_extraction_result(const ExtractionResult& r) {
  std::ostringstream os;
  os << "# extraction result\n"
     << "target\t" << r.target_url << "\n"
     << "client\t" << r.config.client_id << "\n"
     << "channel\t" << r.config.channel << "\n"
     << "num_ads\t" << r.config.max_num_ads << "\n"
     << "raw_url\t" << (r.ad_frame_url_raw.empty() ? "-" : r.ad_frame_url_raw)
     << "\n"
     << "rewritten_url\t"
     << (r.ad_frame_url_rewritten.empty() ? "-" : r.ad_frame_url_rewritten)
     << "\n"
     << "links\t" << r.link_urls.size() << "\n";
  for (const auto& href : r.link_urls) os << href << "\n";
  os << "trace\t" << r.step_trace.size() << "\n";
  for (const auto& t : r.step_trace)
    os << step_name(t.step) << "\t" << t.status << "\t" << t.ts << "\t"
       << step_label(t.step) << "\n";
  return os.str();
}

}  // namespace adlab::extractor
