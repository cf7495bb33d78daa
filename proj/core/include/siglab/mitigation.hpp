#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "siglab/wire.hpp"

namespace siglab::resolver {

/// Resolver-side defenses. Absent fields mean "no limit".
struct MitigationConfig {
  std::optional<std::size_t> max_records_per_type = 100;
  std::optional<std::size_t> dnskey_limit;
  std::optional<std::size_t> rrsig_max_size;
  std::optional<std::size_t> any_aggregate_cap;
  std::optional<std::size_t> validation_budget;

  /// Every defense disabled, including the record-count default.
  static MitigationConfig off();
  /// 744-octet signature cap and a DNSKEY/RRSIG limit of 20.
  static MitigationConfig recommended();

  /// Throws ConfigError when a present cap is zero.
  void check() const;
  /// True when every cap is at least as tight as `other`'s (absent = infinite).
  bool at_least_as_strict_as(const MitigationConfig& other) const noexcept;

  friend bool operator==(const MitigationConfig&, const MitigationConfig&) = default;
};

/// key=value lines using the field names above; "none" clears a field.
MitigationConfig parse_mitigation_text(std::string_view text);
MitigationConfig load_mitigation_file(const std::filesystem::path& path);
std::string to_text(const MitigationConfig& config);

struct MitigationReport {
  std::size_t dropped_by_record_limit = 0;
  std::size_t dropped_by_dnskey_limit = 0;
  std::size_t dropped_oversize_rrsig = 0;
  std::size_t dropped_by_any_cap = 0;

  std::size_t total() const noexcept {
    return dropped_by_record_limit + dropped_by_dnskey_limit + dropped_oversize_rrsig + dropped_by_any_cap;
  }
  MitigationReport& operator+=(const MitigationReport& other) noexcept;
};

struct FilteredResponse {
  wire::DnsMessage message;
  MitigationReport report;
};

/// Oversize RRSIGs go first, then per-RRSet count limits (RRSIGs counted per
/// covered RRSet). The ANY aggregate cap keeps the first N answer records in
/// the order received, whatever the other rules drop.
FilteredResponse apply_mitigations(const wire::DnsMessage& response, const MitigationConfig& config);

}  // namespace siglab::resolver
