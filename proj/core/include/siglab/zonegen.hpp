#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "siglab/dnssec.hpp"
#include "siglab/wire.hpp"

namespace siglab::zonegen {

using dnssec::DnsKeyRecord;
using dnssec::RrsigRecord;
using wire::DnsMessage;
using wire::DomainName;
using wire::RecordType;
using wire::ResourceRecord;
using wire::RRSetKey;

enum class AttackKind { Benign, BaitAndSwitch, MultiRsa, AnyType, KeyTrap, NsCacheFlush };

std::string_view to_string(AttackKind kind) noexcept;
std::optional<AttackKind> attack_kind_from_string(std::string_view text) noexcept;
/// Query type an attacker sends against a zone of this kind.
RecordType default_query_type(AttackKind kind) noexcept;

/// Leaf: instances are names inside the apex zone. Delegated: every instance
/// is its own signed child zone whose DS lives in the apex zone.
enum class InstanceLayout { Leaf, Delegated };

inline constexpr std::size_t kMaxRecordsPerRRSet = 100;
inline constexpr std::size_t kPaperBaselineOctets = 449;
inline constexpr std::uint32_t kDefaultTtl = 86400;

/// Which key made a genuine signature; absent for forged ones.
struct KeyRef {
  bool parent = false;
  std::size_t index = 0;

  friend bool operator==(const KeyRef&, const KeyRef&) = default;
};

struct SignedRRSet {
  std::vector<ResourceRecord> records;
  std::vector<RrsigRecord> sigs;
  std::vector<std::optional<KeyRef>> signers;  // parallel to sigs
  std::vector<wire::RData> sig_rdata;          // encoded sigs, parallel to sigs

  void add_sig(RrsigRecord sig, std::optional<KeyRef> signer);
};

struct PlanKey {
  DomainName name;
  RecordType type = RecordType::A;

  friend bool operator==(const PlanKey&, const PlanKey&) = default;
  friend std::strong_ordering operator<=>(const PlanKey& a, const PlanKey& b) noexcept;
};

/// A generated zone: the template instance is materialised, every other
/// instance is derived on demand by renaming and re-signing.
struct ZoneBundle {
  DomainName apex;
  AttackKind kind = AttackKind::Benign;
  InstanceLayout layout = InstanceLayout::Leaf;
  std::string instance_prefix;
  std::size_t instance_count = 0;
  DomainName parent_zone;
  std::vector<DnsKeyRecord> keys;
  std::vector<DnsKeyRecord> parent_keys;
  std::map<RRSetKey, SignedRRSet> rrsets;
  std::map<PlanKey, DnsMessage> response_plans;
  DnsMessage parent_ds_response;
  dnssec::ValidityWindow window;

  bool is_signed() const noexcept { return !parent_keys.empty(); }
  DomainName instance_name(std::size_t index) const;
  /// Zone holding the template instance's data.
  DomainName template_zone() const;
  std::optional<std::size_t> instance_index(const DomainName& name) const;
  bool serves(const DomainName& name) const;
  /// Zone cut a name belongs to; nullopt when the bundle does not serve it.
  std::optional<DomainName> zone_of(const DomainName& name) const;
  /// Authoritative response for any instance; nullopt when not served.
  std::optional<DnsMessage> respond(const DomainName& qname, RecordType qtype) const;

  /// Recomputes signer attribution and the template response plans. Call
  /// after mutating rrsets or keys directly.
  void finalize();

  /// Every record the bundle holds, RRSIGs included, in map order.
  std::vector<ResourceRecord> all_records() const;

 private:
  DnsMessage build_response(const DomainName& template_qname, RecordType qtype,
                            std::optional<std::size_t> instance) const;
};

struct GenOptions {
  std::size_t instances = 10'000;
  std::string prefix = "attack-";
  std::uint64_t seed = 0;
  std::uint32_t ttl = kDefaultTtl;
};

ZoneBundle gen_benign_zone(const DomainName& apex, std::size_t n_names, std::uint64_t seed = 0);
ZoneBundle gen_bait_switch_zone(const DomainName& apex, std::size_t target_size = wire::kMaxMessageOctets,
                                const GenOptions& options = {});
ZoneBundle gen_multi_rsa_zone(const DomainName& apex, std::size_t n_keys, const GenOptions& options = {});
ZoneBundle gen_any_zone(const DomainName& apex, std::size_t n_types, std::size_t sigs_per_type,
                        const GenOptions& options = {});
ZoneBundle gen_keytrap_zone(const DomainName& apex, std::size_t n_keys, std::size_t n_sigs,
                            const GenOptions& options = {}, std::size_t modeled_bits = 1024,
                            std::optional<std::uint16_t> target_tag = std::nullopt);
ZoneBundle gen_ns_cacheflush_zone(const DomainName& apex, std::size_t n_ns, const GenOptions& options = {});

/// Largest key count whose DNSKEY response still carries one RSA-4096
/// signature per key within 65,535 octets, for the given instance zone name.
std::size_t multi_rsa_full_pairing_limit(const DomainName& zone);

struct ResponseSize {
  PlanKey plan;
  std::size_t octets = 0;
  std::size_t records = 0;
};

struct PackReport {
  AttackKind kind = AttackKind::Benign;
  std::vector<ResponseSize> responses;
  std::map<RRSetKey, std::size_t> rrset_record_counts;
  std::size_t rrset_signature_total = 0;
  std::size_t max_response_octets = 0;
  /// Record octets fetched by one fresh resolution of the attack query
  /// (answer, DS and DNSKEY responses, each counted once).
  std::size_t resolution_octets = 0;
  /// Forged-signature octets within that resolution.
  std::size_t bogus_octets = 0;
  /// Signature checks a validator spends on that resolution.
  std::size_t validation_attempts = 0;
  std::size_t key_count = 0;
  double per_key_octets = 0.0;
  double baseline_octets = static_cast<double>(kPaperBaselineOctets);
  double amplification = 0.0;
};

PackReport pack_report(const ZoneBundle& bundle, double baseline_size = kPaperBaselineOctets);

/// Zone file in the project's master-file dialect.
void emit_zone_file(const ZoneBundle& bundle, const std::filesystem::path& path);
std::string emit_zone_text(const ZoneBundle& bundle);
ZoneBundle load_zone_file(const std::filesystem::path& path);
ZoneBundle parse_zone_text(std::string_view text);

/// Resperf-style query files: one "<name> <type>" per line.
void write_query_file(const std::filesystem::path& path, std::span<const wire::Question> queries);
std::vector<wire::Question> read_query_file(const std::filesystem::path& path);
std::vector<wire::Question> instance_queries(const ZoneBundle& bundle, RecordType type,
                                             std::optional<std::size_t> limit = std::nullopt);

}  // namespace siglab::zonegen
