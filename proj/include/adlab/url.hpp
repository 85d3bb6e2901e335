#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace adlab {

using QueryParams = std::vector<std::pair<std::string, std::string>>;

/// RFC 3986 percent-encoding; everything outside the unreserved set is escaped.
std::string percent_encode(std::string_view s);

/// Decodes %HH sequences; malformed escapes are kept literally, '+' is not a space.
std::string percent_decode(std::string_view s);

/// Splits a raw query string on '&' into ordered key/value pairs.
/// Values stay exactly as they appear (no decoding); empty segments are dropped.
QueryParams split_query(std::string_view query);

/// Joins pairs as "k=v&k=v" without re-encoding.
std::string join_query(const QueryParams& params);

/// Minimal absolute-URL decomposition, enough for the mock network.
struct Url {
  std::string scheme;
  std::string host;   // lowercased, includes :port if present
  std::string path;   // "/" when absent
  std::string query;  // without '?'

  std::string origin() const { return scheme + "://" + host; }
  std::string str() const;

  static Url parse(std::string_view url);  // throws BadParam
};

/// Deterministic canonical form of a query: keys sorted lexicographically,
/// joined "k=v" with '&'. Values must already be percent-encoded.
/// Throws DuplicateKey on repeated keys.
std::string canonicalize_query(const QueryParams& params);

// -- small crypto/encoding helpers (backed by OpenSSL) --

std::string base64url_nopad(const unsigned char* data, size_t len);
std::string hmac_sha256_b64url(std::string_view key, std::string_view msg);
std::string sha256_hex(std::string_view data);

/// FNV-1a 64-bit; used for deterministic non-secret token derivation.
uint64_t fnv1a64(std::string_view s);

}  // namespace adlab
