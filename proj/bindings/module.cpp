#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "adlab/detect.hpp"
#include "adlab/error.hpp"
#include "adlab/extractor.hpp"
#include "adlab/harness.hpp"
#include "adlab/sim.hpp"

namespace py = pybind11;
using namespace adlab;

namespace {

py::dict extraction_to_dict(const extractor::ExtractionResult& r) {
  py::dict d;
  d["target"] = r.target_url;
  d["complete"] = r.complete();
  d["client_id"] = r.config.client_id;
  d["channel"] = r.config.channel;
  d["raw_url"] = r.ad_frame_url_raw;
  d["rewritten_url"] = r.ad_frame_url_rewritten;
  d["links"] = r.link_urls;
  py::list trace;
  for (const auto& t : r.step_trace)
    trace.append(py::make_tuple(std::string(extractor::step_name(t.step)),
                                t.status));
  d["trace"] = trace;
  return d;
}

}  // namespace

PYBIND11_MODULE(_adlab, m) {
  m.doc() = "pay-per-click sandbox: signed ad links, link extraction, "
            "traffic simulation and invalid-click detection";

  py::register_exception<Error>(m, "AdlabError");

  py::class_<adnet::AdColors>(m, "AdColors")
      .def(py::init<>())
      .def_readwrite("border", &adnet::AdColors::border)
      .def_readwrite("bg", &adnet::AdColors::bg)
      .def_readwrite("link", &adnet::AdColors::link)
      .def_readwrite("text", &adnet::AdColors::text)
      .def_readwrite("url", &adnet::AdColors::url);

  py::class_<adnet::AdConfig>(m, "AdConfig")
      .def(py::init([](const std::string& client_id, const std::string& channel,
                       int max_num_ads, int width, int height,
                       const std::string& language) {
             return adnet::make_ad_config(client_id, channel, max_num_ads,
                                          width, height, language);
           }),
           py::arg("client_id"), py::arg("channel"), py::arg("max_num_ads") = 3,
           py::arg("width") = 336, py::arg("height") = 280,
           py::arg("language") = "en")
      .def_readonly("client_id", &adnet::AdConfig::client_id)
      .def_readonly("channel", &adnet::AdConfig::channel)
      .def_readonly("max_num_ads", &adnet::AdConfig::max_num_ads)
      .def_readonly("width", &adnet::AdConfig::width)
      .def_readonly("height", &adnet::AdConfig::height)
      .def_readonly("format", &adnet::AdConfig::format)
      .def_readonly("language", &adnet::AdConfig::language)
      .def_readonly("colors", &adnet::AdConfig::colors);

  py::class_<adnet::Campaign>(m, "Campaign")
      .def(py::init([](const std::string& id, const std::string& landing_url,
                       const std::vector<std::string>& channel_targets,
                       const std::string& headline) {
             adnet::Campaign c;
             c.id = id;
             c.advertiser_id = "adv-" + id;
             c.landing_url = landing_url;
             c.channel_targets = channel_targets;
             c.headline = headline;
             return c;
           }),
           py::arg("id"), py::arg("landing_url"), py::arg("channel_targets"),
           py::arg("headline") = "")
      .def_readwrite("id", &adnet::Campaign::id)
      .def_readwrite("landing_url", &adnet::Campaign::landing_url);

  py::class_<adnet::AdRequest>(m, "AdRequest")
      .def_readonly("client", &adnet::AdRequest::client)
      .def_readonly("channel", &adnet::AdRequest::channel)
      .def_readonly("num_ads", &adnet::AdRequest::num_ads)
      .def_readonly("url", &adnet::AdRequest::url)
      .def_readonly("parent", &adnet::AdRequest::parent)
      .def_readonly("dt", &adnet::AdRequest::dt)
      .def_readonly("correlator", &adnet::AdRequest::correlator)
      .def_readonly("extras", &adnet::AdRequest::extras);

  py::class_<adnet::AdLink>(m, "AdLink")
      .def_readwrite("sa", &adnet::AdLink::sa)
      .def_readwrite("ai", &adnet::AdLink::ai)
      .def_readwrite("num", &adnet::AdLink::num)
      .def_readwrite("sig", &adnet::AdLink::sig)
      .def_readwrite("client", &adnet::AdLink::client)
      .def_readwrite("adurl", &adnet::AdLink::adurl);

  m.def("percent_encode", &percent_encode, py::arg("s"));
  m.def("percent_decode", &percent_decode, py::arg("s"));
  m.def("canonicalize_query", &canonicalize_query, py::arg("params"),
        "Deterministic canonical query string: keys sorted, k=v joined by &");

  m.def("make_ad_request", &adnet::make_ad_request, py::arg("config"),
        py::arg("page_url"), py::arg("parent_origin"), py::arg("now_ms"),
        py::arg("correlator"), py::arg("verification_token"));
  m.def("build_ad_request_url", &adnet::build_ad_request_url,
        py::arg("ads_base"), py::arg("config"), py::arg("page_url"),
        py::arg("parent_origin"), py::arg("now_ms"), py::arg("correlator"),
        py::arg("verification_token"));
  m.def("parse_ad_request_url", &adnet::parse_ad_request_url, py::arg("url"));

  m.def("mint_click_url", &adnet::mint_click_url, py::arg("campaign"),
        py::arg("slot"), py::arg("impression"), py::arg("key"));
  m.def("verify_click_url", &adnet::verify_click_url, py::arg("link"),
        py::arg("key"));
  m.def("render_click_url", &adnet::render_click_url, py::arg("ads_base"),
        py::arg("link"));
  m.def("parse_click_url", &adnet::parse_click_url, py::arg("url"));

  m.def("detect_ad_block", &extractor::detect_ad_block, py::arg("html"),
        "One AdConfig per script block assigning google_ad_client");
  m.def("extract_ad_links", &extractor::extract_ad_links, py::arg("ad_html"),
        "href of every anchor inside <body>, document order");
  m.def("rewrite_origin_params", &extractor::rewrite_origin_params,
        py::arg("url"), py::arg("target_domain"));

  m.def(
      "gen_corpus",
      [](int n_sites, int campaigns_per_site, uint64_t seed,
         const std::filesystem::path& out_dir) {
        harness::Corpus c =
            harness::cmd_gen_corpus(n_sites, campaigns_per_site, seed, out_dir);
        py::dict d;
        d["sites"] = c.sites.size();
        d["campaigns"] = c.campaigns.size();
        d["key"] = c.key;
        return d;
      },
      py::arg("n_sites"), py::arg("campaigns_per_site"), py::arg("seed"),
      py::arg("out_dir"));

  m.def(
      "extract",
      [](const std::filesystem::path& corpus_dir, const std::string& target_url,
         const std::string& rewrite_domain, const std::string& origin,
         uint64_t now_ms) {
        harness::ExtractOptions opts;
        opts.corpus_dir = corpus_dir;
        opts.target_url = target_url;
        opts.rewrite_domain = rewrite_domain;
        if (!origin.empty()) opts.execution_origin = origin;
        opts.now_ms = now_ms;
        extractor::ExtractionResult result;
        int rc = harness::cmd_extract(opts, &result);
        py::dict d = extraction_to_dict(result);
        d["exit_code"] = rc;
        return d;
      },
      py::arg("corpus_dir"), py::arg("target_url"),
      py::arg("rewrite_domain") = "", py::arg("origin") = "",
      py::arg("now_ms") = 1'410'420'397'140ull,
      "Run the extraction pipeline against a corpus directory");

  m.def(
      "run_scenario",
      [](const std::filesystem::path& scenario_file,
         const std::filesystem::path& out_dir, py::object seed) {
        std::optional<uint64_t> s;
        if (!seed.is_none()) s = seed.cast<uint64_t>();
        harness::RunOutput out = harness::cmd_run(scenario_file, s, out_dir);
        const auto& r = out.report;
        py::dict d;
        d["out_dir"] = out.out_dir.string();
        d["clicks_total"] = r.clicks_total;
        d["invalid_auto"] = r.invalid_auto;
        d["needs_investigation"] = r.needs_investigation;
        d["invalid_fraction"] = r.invalid_fraction;
        d["investigation_fraction"] = r.investigation_fraction;
        d["precision"] = r.precision;
        d["recall"] = r.recall;
        return d;
      },
      py::arg("scenario_file"), py::arg("out_dir"),
      py::arg("seed") = py::none(),
      "Run a scenario plus the full detection pass; returns report numbers");

  m.attr("__version__") = "0.1.0";
}
