"""Pay-per-click sandbox: signed ad links, link extraction, traffic
simulation and invalid-click detection. Thin wrapper over the C++ core."""

from ._adlab import (  # noqa: F401
    AdColors,
    AdConfig,
    AdLink,
    AdRequest,
    AdlabError,
    Campaign,
    build_ad_request_url,
    canonicalize_query,
    detect_ad_block,
    extract,
    extract_ad_links,
    gen_corpus,
    make_ad_request,
    mint_click_url,
    parse_ad_request_url,
    parse_click_url,
    percent_decode,
    percent_encode,
    render_click_url,
    rewrite_origin_params,
    run_scenario,
    verify_click_url,
    __version__,
)
