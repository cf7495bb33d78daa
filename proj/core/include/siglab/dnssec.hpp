#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "siglab/digest.hpp"
#include "siglab/wire.hpp"

// DNSSEC keys and signatures over a simulated signature scheme: a signature
// is a SHA-256 digest binding the RRSet, the RRSIG header and the signing
// key, right-padded to the size the modeled algorithm would produce. Sizes
// are exact; only the asymmetric math is replaced.
namespace siglab::dnssec {

using wire::ByteView;
using wire::Bytes;
using wire::DomainName;
using wire::RData;
using wire::RecordType;
using wire::ResourceRecord;

inline constexpr std::uint8_t kAlgRsaSha256 = 8;
inline constexpr std::uint8_t kAlgEcdsaP384 = 14;
inline constexpr std::uint8_t kAlgPrivate = 253;
inline constexpr std::uint8_t kAlgPrivateOid = 254;
inline constexpr std::uint8_t kProtocol = 3;

inline constexpr std::size_t kDnskeyFixedOctets = 4;  // flags, protocol, algorithm
inline constexpr std::size_t kRrsigFixedOctets = 18;
inline constexpr std::size_t kDsRdataOctets = 36;
inline constexpr std::size_t kDigestOctets = 32;

enum class KeyRole { Ksk, Zsk };

inline std::uint16_t flags_for(KeyRole role) noexcept { return role == KeyRole::Ksk ? 257 : 256; }

bool is_private_algorithm(std::uint8_t algorithm) noexcept;

struct DnsKeyRecord {
  DomainName owner;
  KeyRole role = KeyRole::Zsk;
  std::uint8_t protocol = kProtocol;
  std::uint8_t algorithm = kAlgRsaSha256;
  RData public_key;
  std::size_t modeled_signature_size = 0;
  std::uint16_t keytag = 0;

  Bytes rdata() const;
  std::size_t rdata_size() const noexcept { return kDnskeyFixedOctets + public_key.size(); }
  ResourceRecord to_record(std::uint32_t ttl) const;
  /// Parses DNSKEY rdata; the modeled signature size is recovered from the
  /// algorithm and the public key layout.
  static DnsKeyRecord from_record(const ResourceRecord& rr);

  friend bool operator==(const DnsKeyRecord&, const DnsKeyRecord&) = default;
};

struct ValidityWindow {
  std::uint32_t inception = 1'700'000'000;
  std::uint32_t expiration = 1'800'000'000;
};

struct RrsigRecord {
  RecordType type_covered = RecordType::A;
  std::uint8_t algorithm = kAlgRsaSha256;
  std::uint8_t labels = 0;
  std::uint32_t original_ttl = 0;
  std::uint32_t expiration = 0;
  std::uint32_t inception = 0;
  std::uint16_t keytag = 0;
  DomainName signer;
  RData signature;

  std::size_t rdata_size() const noexcept {
    return kRrsigFixedOctets + signer.wire_size() + signature.size();
  }
  Bytes rdata() const;
  ResourceRecord to_record(const DomainName& owner, std::uint32_t ttl) const;
  static RrsigRecord from_record(const ResourceRecord& rr);
  /// Signature length straight from RRSIG rdata without copying the signature.
  static std::size_t signature_size_of(const ResourceRecord& rr);
  static RecordType type_covered_of(const ResourceRecord& rr);

  friend bool operator==(const RrsigRecord&, const RrsigRecord&) = default;
};

/// RFC 4034 Appendix B key tag over full DNSKEY rdata.
std::uint16_t compute_keytag(ByteView rdata) noexcept;

/// Deterministic key for (owner, role, algorithm, bits, seed). RSA-class and
/// private-algorithm keys use the RFC 3110 layout (1-octet exponent length,
/// 3-octet exponent, bits/8 modulus); ECDSA-class keys are 96 octets.
/// Accepted sizes: alg 8 with 1024/2048/4096 bits, alg 14 with 384 bits,
/// private algorithms with any multiple of 8 that fits in rdata.
DnsKeyRecord make_key(const DomainName& owner, KeyRole role, std::uint8_t algorithm, std::size_t modeled_bits,
                      std::uint64_t seed = 0);

/// Signs one RRSet. Throws MixedRRSet if the records do not share an RRSetKey
/// and UnknownAlgorithmKey for private-algorithm keys.
RrsigRecord sign_rrset(std::span<const ResourceRecord> rrset, const DnsKeyRecord& key,
                       const ValidityWindow& window = {});

/// Signature bytes `key` would produce for an RRSIG carrying `header`'s
/// fields over an RRSet with digest `rrset_digest`.
Bytes signature_for(const Digest& rrset_digest, const RrsigRecord& header, const DnsKeyRecord& key);

/// Bogus signature of `signature_size` octets of fixed filler. The signer
/// defaults to the RRSet owner.
RrsigRecord forge_rrsig(const wire::RRSetKey& rrset_key, std::uint16_t keytag, std::uint8_t algorithm,
                        std::size_t signature_size, std::optional<DomainName> signer = std::nullopt,
                        std::uint32_t original_ttl = 3600, const ValidityWindow& window = {});

/// `n` distinct keys sharing `target_tag`, found by solving for the two
/// trailing public-key octets.
std::vector<DnsKeyRecord> craft_colliding_keys(std::size_t n, std::uint16_t target_tag, std::uint8_t algorithm,
                                               std::size_t modeled_bits, const DomainName& owner,
                                               std::uint64_t seed = 0);

/// Digest of the canonical RRSet form; computing it once lets many
/// verification attempts share the cost.
Digest rrset_digest(std::span<const ResourceRecord> rrset);
bool verify(const Digest& rrset_digest, const RrsigRecord& sig, const DnsKeyRecord& key);
bool verify(std::span<const ResourceRecord> rrset, const RrsigRecord& sig, const DnsKeyRecord& key);

struct ValidationPolicy {
  std::set<std::uint8_t> known_algorithms{kAlgRsaSha256, kAlgEcdsaP384};
  std::optional<std::size_t> rrsig_max_size;
  std::optional<std::size_t> validation_budget;
};

enum class ValidationStatus { Secure, Bogus, Insecure };
std::string_view to_string(ValidationStatus status) noexcept;

struct ValidationOutcome {
  ValidationStatus status = ValidationStatus::Insecure;
  std::size_t attempts = 0;
  std::size_t ignored_signatures = 0;
  std::size_t rejected_signatures = 0;

  friend bool operator==(const ValidationOutcome&, const ValidationOutcome&) = default;
};

/// Accept-any-valid-signature validation with exact attempt counting.
/// Unknown-algorithm signatures are counted as ignored and oversize ones as
/// rejected before any attempt; the rest are tried in order against every key
/// with matching tag and algorithm until one verifies or the budget runs out.
ValidationOutcome validate_rrset(std::span<const ResourceRecord> rrset, std::span<const RrsigRecord> sigs,
                                 std::span<const DnsKeyRecord> keys, const ValidationPolicy& policy = {});

/// DS rdata for `key`: keytag, algorithm, digest type 2, SHA-256 of the
/// DNSKEY rdata.
Bytes ds_rdata(const DnsKeyRecord& key);
ResourceRecord make_ds(const DnsKeyRecord& key, std::uint32_t ttl);
bool ds_matches(ByteView ds, const DnsKeyRecord& key);

}  // namespace siglab::dnssec
