#include "siglab/dnssec.hpp"

#include <algorithm>
#include <string>

#include "siglab/error.hpp"

namespace siglab::dnssec {

namespace {

constexpr std::uint8_t kPadBase = 0xA5;
constexpr std::size_t kRsaExponentPrefix = 4;  // exponent length octet + 65537

std::string key_label(const DomainName& owner, KeyRole role, std::uint8_t algorithm, std::size_t bits,
                      std::uint64_t seed, std::uint64_t variant) {
  return "siglab-key|" + owner.lowercased().to_string() + "|" + (role == KeyRole::Ksk ? "ksk" : "zsk") + "|" +
         std::to_string(algorithm) + "|" + std::to_string(bits) + "|" + std::to_string(seed) + "|" +
         std::to_string(variant);
}

std::size_t public_key_octets(std::uint8_t algorithm, std::size_t bits) {
  if (algorithm == kAlgRsaSha256) {
    if (bits != 1024 && bits != 2048 && bits != 4096) {
      throw Error(ErrorCode::UnsupportedSize, "RSA-class keys are modeled at 1024, 2048 or 4096 bits");
    }
    return kRsaExponentPrefix + bits / 8;
  }
  if (algorithm == kAlgEcdsaP384) {
    if (bits != 384) throw Error(ErrorCode::UnsupportedSize, "ECDSA-class keys are modeled at 384 bits");
    return 96;
  }
  if (is_private_algorithm(algorithm)) {
    if (bits == 0 || bits % 8 != 0) {
      throw Error(ErrorCode::UnsupportedSize, "private-algorithm key size must be a positive multiple of 8");
    }
    const std::size_t octets = kRsaExponentPrefix + bits / 8;
    if (octets + kDnskeyFixedOctets > wire::kMaxRdataOctets) {
      throw Error(ErrorCode::UnsupportedSize, "key does not fit in 65,535 octets of rdata");
    }
    return octets;
  }
  throw Error(ErrorCode::UnsupportedSize, "unsupported algorithm " + std::to_string(algorithm));
}

std::size_t signature_octets(std::uint8_t algorithm, std::size_t public_octets) {
  if (algorithm == kAlgEcdsaP384) return 96;
  return public_octets > kRsaExponentPrefix ? public_octets - kRsaExponentPrefix : public_octets;
}

Bytes public_key_bytes(std::uint8_t algorithm, std::size_t octets, const std::string& label) {
  Bytes bytes = expand_bytes(label, octets);
  if (algorithm != kAlgEcdsaP384 && octets > kRsaExponentPrefix) {
    bytes[0] = 3;
    bytes[1] = 0x01;
    bytes[2] = 0x00;
    bytes[3] = 0x01;
    bytes[4] |= 0x80;
  }
  return bytes;
}

void append_rrsig_prefix(Bytes& out, const RrsigRecord& sig) {
  wire::put_u16(out, wire::code(sig.type_covered));
  out.push_back(sig.algorithm);
  out.push_back(sig.labels);
  wire::put_u32(out, sig.original_ttl);
  wire::put_u32(out, sig.expiration);
  wire::put_u32(out, sig.inception);
  wire::put_u16(out, sig.keytag);
}

std::uint8_t label_count(const DomainName& owner) {
  return static_cast<std::uint8_t>(std::min<std::size_t>(owner.label_count(), 255));
}

// The simulated signature is SHA-256(rrsig header | key rdata | rrset digest)
// followed by a fixed pad up to the modelled size.
Digest signature_digest(const Digest& rrset, const RrsigRecord& sig, const DnsKeyRecord& key) {
  Bytes header;
  header.reserve(kRrsigFixedOctets + sig.signer.wire_size());
  append_rrsig_prefix(header, sig);
  wire::append_name(header, sig.signer.lowercased());
  const std::array<std::uint8_t, 4> key_prefix{static_cast<std::uint8_t>(flags_for(key.role) >> 8),
                                               static_cast<std::uint8_t>(flags_for(key.role) & 0xFF),
                                               key.protocol, key.algorithm};
  return sha256({header, key_prefix, key.public_key.bytes(), rrset});
}

std::uint8_t pad_byte(std::size_t i) noexcept { return static_cast<std::uint8_t>(kPadBase ^ (i & 0xFF)); }

Bytes expected_signature(const Digest& rrset, const RrsigRecord& sig, const DnsKeyRecord& key) {
  const Digest d = signature_digest(rrset, sig, key);
  Bytes out(key.modeled_signature_size);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i < d.size() ? d[i] : pad_byte(i);
  return out;
}

}  // namespace

bool is_private_algorithm(std::uint8_t algorithm) noexcept {
  return algorithm == kAlgPrivate || algorithm == kAlgPrivateOid;
}

Bytes DnsKeyRecord::rdata() const {
  Bytes out;
  out.reserve(rdata_size());
  wire::put_u16(out, flags_for(role));
  out.push_back(protocol);
  out.push_back(algorithm);
  const auto key = public_key.bytes();
  out.insert(out.end(), key.begin(), key.end());
  return out;
}

ResourceRecord DnsKeyRecord::to_record(std::uint32_t ttl) const {
  return {owner, RecordType::DNSKEY, wire::kClassIn, ttl, RData(rdata())};
}

DnsKeyRecord DnsKeyRecord::from_record(const ResourceRecord& rr) {
  const auto data = rr.rdata.bytes();
  if (rr.type != RecordType::DNSKEY || data.size() < kDnskeyFixedOctets) {
    throw Error(ErrorCode::MalformedRecord, "not a DNSKEY record: " + rr.owner.to_string());
  }
  DnsKeyRecord key;
  key.owner = rr.owner;
  key.role = (wire::get_u16(data, 0) & 0x0001) ? KeyRole::Ksk : KeyRole::Zsk;
  key.protocol = data[2];
  key.algorithm = data[3];
  key.public_key = RData(Bytes(data.begin() + kDnskeyFixedOctets, data.end()));
  key.modeled_signature_size = signature_octets(key.algorithm, key.public_key.size());
  key.keytag = compute_keytag(data);
  return key;
}

Bytes RrsigRecord::rdata() const {
  Bytes out;
  out.reserve(rdata_size());
  append_rrsig_prefix(out, *this);
  wire::append_name(out, signer);
  const auto sig = signature.bytes();
  out.insert(out.end(), sig.begin(), sig.end());
  return out;
}

ResourceRecord RrsigRecord::to_record(const DomainName& owner, std::uint32_t ttl) const {
  return {owner, RecordType::RRSIG, wire::kClassIn, ttl, RData(rdata())};
}

RrsigRecord RrsigRecord::from_record(const ResourceRecord& rr) {
  const auto data = rr.rdata.bytes();
  if (rr.type != RecordType::RRSIG || data.size() < kRrsigFixedOctets + 1) {
    throw Error(ErrorCode::MalformedRecord, "not an RRSIG record: " + rr.owner.to_string());
  }
  RrsigRecord sig;
  const auto covered = wire::record_type_from_code(wire::get_u16(data, 0));
  if (!covered) throw Error(ErrorCode::MalformedRecord, "RRSIG covers an unsupported type");
  sig.type_covered = *covered;
  sig.algorithm = data[2];
  sig.labels = data[3];
  sig.original_ttl = wire::get_u32(data, 4);
  sig.expiration = wire::get_u32(data, 8);
  sig.inception = wire::get_u32(data, 12);
  sig.keytag = wire::get_u16(data, 16);
  auto [signer, next] = wire::decode_name(data, kRrsigFixedOctets);
  sig.signer = std::move(signer);
  sig.signature = RData::tail_of(rr.rdata, next);
  return sig;
}

std::size_t RrsigRecord::signature_size_of(const ResourceRecord& rr) {
  const auto data = rr.rdata.bytes();
  if (data.size() < kRrsigFixedOctets + 1) throw Error(ErrorCode::MalformedRecord, "short RRSIG rdata");
  const auto [signer, next] = wire::decode_name(data, kRrsigFixedOctets);
  return data.size() - next;
}

RecordType RrsigRecord::type_covered_of(const ResourceRecord& rr) {
  const auto covered = wire::record_type_from_code(wire::get_u16(rr.rdata.bytes(), 0));
  if (!covered) throw Error(ErrorCode::MalformedRecord, "RRSIG covers an unsupported type");
  return *covered;
}

std::uint16_t compute_keytag(ByteView rdata) noexcept {
  std::uint32_t acc = 0;
  for (std::size_t i = 0; i < rdata.size(); ++i) {
    acc += (i & 1) ? rdata[i] : static_cast<std::uint32_t>(rdata[i]) << 8;
  }
  acc += (acc >> 16) & 0xFFFF;
  return static_cast<std::uint16_t>(acc & 0xFFFF);
}

DnsKeyRecord make_key(const DomainName& owner, KeyRole role, std::uint8_t algorithm, std::size_t modeled_bits,
                      std::uint64_t seed) {
  const std::size_t octets = public_key_octets(algorithm, modeled_bits);
  DnsKeyRecord key;
  key.owner = owner;
  key.role = role;
  key.algorithm = algorithm;
  key.public_key = RData(public_key_bytes(algorithm, octets, key_label(owner, role, algorithm, modeled_bits, seed, 0)));
  key.modeled_signature_size = signature_octets(algorithm, octets);
  key.keytag = compute_keytag(key.rdata());
  return key;
}

RrsigRecord sign_rrset(std::span<const ResourceRecord> rrset, const DnsKeyRecord& key,
                       const ValidityWindow& window) {
  if (rrset.empty()) throw Error(ErrorCode::MixedRRSet, "cannot sign an empty RRSet");
  const auto first = wire::key_of(rrset.front());
  for (const auto& rr : rrset) {
    if (wire::key_of(rr) != first) {
      throw Error(ErrorCode::MixedRRSet, "records do not share owner and type: " + rr.owner.to_string());
    }
  }
  if (key.algorithm != kAlgRsaSha256 && key.algorithm != kAlgEcdsaP384) {
    throw Error(ErrorCode::UnknownAlgorithmKey,
                "cannot sign with algorithm " + std::to_string(key.algorithm));
  }
  RrsigRecord sig;
  sig.type_covered = first.type;
  sig.algorithm = key.algorithm;
  sig.labels = label_count(first.owner);
  sig.original_ttl = rrset.front().ttl;
  sig.expiration = window.expiration;
  sig.inception = window.inception;
  sig.keytag = key.keytag;
  sig.signer = key.owner;
  sig.signature = RData(expected_signature(rrset_digest(rrset), sig, key));
  return sig;
}

Bytes signature_for(const Digest& digest, const RrsigRecord& header, const DnsKeyRecord& key) {
  return expected_signature(digest, header, key);
}

RrsigRecord forge_rrsig(const wire::RRSetKey& rrset_key, std::uint16_t keytag, std::uint8_t algorithm,
                        std::size_t signature_size, std::optional<DomainName> signer, std::uint32_t original_ttl,
                        const ValidityWindow& window) {
  RrsigRecord sig;
  sig.type_covered = rrset_key.type;
  sig.algorithm = algorithm;
  sig.labels = label_count(rrset_key.owner);
  sig.original_ttl = original_ttl;
  sig.expiration = window.expiration;
  sig.inception = window.inception;
  sig.keytag = keytag;
  sig.signer = signer.value_or(rrset_key.owner);
  // Filler only depends on the length, so equal-size forgeries can share it.
  Bytes filler(std::max<std::size_t>(signature_size, 1));
  for (std::size_t i = 0; i < filler.size(); ++i) {
    filler[i] = static_cast<std::uint8_t>(0xF0 ^ ((i * 0x9D) & 0xFF));
  }
  sig.signature = RData(std::move(filler));
  return sig;
}

std::vector<DnsKeyRecord> craft_colliding_keys(std::size_t n, std::uint16_t target_tag, std::uint8_t algorithm,
                                               std::size_t modeled_bits, const DomainName& owner,
                                               std::uint64_t seed) {
  const std::size_t octets = public_key_octets(algorithm, modeled_bits);
  if (octets < 3) throw Error(ErrorCode::UnsupportedSize, "key too small to adjust its tag");
  std::vector<DnsKeyRecord> keys;
  keys.reserve(n);
  std::set<Bytes> seen;
  for (std::uint64_t variant = 1; keys.size() < n; ++variant) {
    DnsKeyRecord key;
    key.owner = owner;
    key.role = KeyRole::Zsk;
    key.algorithm = algorithm;
    key.modeled_signature_size = signature_octets(algorithm, octets);
    key.public_key = RData(public_key_bytes(algorithm, octets,
                                            key_label(owner, KeyRole::Zsk, algorithm, modeled_bits, seed, variant)));
    Bytes rdata = key.rdata();
    const std::size_t lo_pos = rdata.size() - 1;
    const std::size_t hi_pos = rdata.size() - 2;
    rdata[lo_pos] = 0;
    rdata[hi_pos] = 0;
    std::uint32_t rest = 0;
    for (std::size_t i = 0; i < rdata.size(); ++i) rest += (i & 1) ? rdata[i] : std::uint32_t{rdata[i]} << 8;
    bool solved = false;
    for (std::uint32_t a = 0; a < 256 && !solved; ++a) {
      for (std::uint32_t b = 0; b < 256; ++b) {
        const std::uint32_t add = ((hi_pos & 1) ? a : a << 8) + ((lo_pos & 1) ? b : b << 8);
        std::uint32_t acc = rest + add;
        acc += (acc >> 16) & 0xFFFF;
        if ((acc & 0xFFFF) == target_tag) {
          rdata[hi_pos] = static_cast<std::uint8_t>(a);
          rdata[lo_pos] = static_cast<std::uint8_t>(b);
          solved = true;
          break;
        }
      }
    }
    // The end-around carry leaves one residue unreachable for a given body;
    // a fresh body resolves it.
    if (!solved || !seen.insert(rdata).second) continue;
    key.public_key = RData(Bytes(rdata.begin() + kDnskeyFixedOctets, rdata.end()));
    key.keytag = compute_keytag(rdata);
    keys.push_back(std::move(key));
  }
  return keys;
}

Digest rrset_digest(std::span<const ResourceRecord> rrset) {
  std::vector<const ResourceRecord*> sorted;
  sorted.reserve(rrset.size());
  for (const auto& rr : rrset) sorted.push_back(&rr);
  std::sort(sorted.begin(), sorted.end(), [](const ResourceRecord* a, const ResourceRecord* b) {
    const auto x = a->rdata.bytes();
    const auto y = b->rdata.bytes();
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
  });
  Bytes canonical;
  for (const auto* rr : sorted) {
    wire::append_name(canonical, rr->owner.lowercased());
    wire::put_u16(canonical, wire::code(rr->type));
    wire::put_u16(canonical, rr->rclass);
    wire::put_u16(canonical, static_cast<std::uint16_t>(rr->rdata.size()));
    const auto data = rr->rdata.bytes();
    canonical.insert(canonical.end(), data.begin(), data.end());
  }
  return sha256(canonical);
}

bool verify(const Digest& digest, const RrsigRecord& sig, const DnsKeyRecord& key) {
  if (sig.algorithm != key.algorithm || sig.keytag != key.keytag) return false;
  if (sig.signature.size() != key.modeled_signature_size) return false;
  const auto actual = sig.signature.bytes();
  const Digest d = signature_digest(digest, sig, key);
  const std::size_t head = std::min(actual.size(), d.size());
  if (!std::equal(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(head), actual.begin())) return false;
  for (std::size_t i = head; i < actual.size(); ++i) {
    if (actual[i] != pad_byte(i)) return false;
  }
  return true;
}

bool verify(std::span<const ResourceRecord> rrset, const RrsigRecord& sig, const DnsKeyRecord& key) {
  return verify(rrset_digest(rrset), sig, key);
}

std::string_view to_string(ValidationStatus status) noexcept {
  switch (status) {
    case ValidationStatus::Secure: return "Secure";
    case ValidationStatus::Bogus: return "Bogus";
    case ValidationStatus::Insecure: break;
  }
  return "Insecure";
}

ValidationOutcome validate_rrset(std::span<const ResourceRecord> rrset, std::span<const RrsigRecord> sigs,
                                 std::span<const DnsKeyRecord> keys, const ValidationPolicy& policy) {
  ValidationOutcome outcome;
  std::vector<const RrsigRecord*> candidates;
  candidates.reserve(sigs.size());
  const std::optional<RecordType> covered =
      rrset.empty() ? std::nullopt : std::optional<RecordType>(rrset.front().type);
  for (const auto& sig : sigs) {
    if (covered && sig.type_covered != *covered) continue;
    if (!policy.known_algorithms.contains(sig.algorithm)) {
      ++outcome.ignored_signatures;
    } else if (policy.rrsig_max_size && sig.signature.size() > *policy.rrsig_max_size) {
      ++outcome.rejected_signatures;
    } else {
      candidates.push_back(&sig);
    }
  }
  if (rrset.empty()) return outcome;

  std::optional<Digest> digest;
  for (const auto* sig : candidates) {
    for (const auto& key : keys) {
      if (key.keytag != sig->keytag || key.algorithm != sig->algorithm) continue;
      if (policy.validation_budget && outcome.attempts >= *policy.validation_budget) {
        outcome.status = ValidationStatus::Bogus;
        return outcome;
      }
      if (!digest) digest = rrset_digest(rrset);
      ++outcome.attempts;
      if (verify(*digest, *sig, key)) {
        outcome.status = ValidationStatus::Secure;
        return outcome;
      }
    }
  }
  outcome.status = outcome.attempts > 0 ? ValidationStatus::Bogus : ValidationStatus::Insecure;
  return outcome;
}

Bytes ds_rdata(const DnsKeyRecord& key) {
  Bytes out;
  out.reserve(kDsRdataOctets);
  wire::put_u16(out, key.keytag);
  out.push_back(key.algorithm);
  out.push_back(2);
  const Digest d = sha256(key.rdata());
  out.insert(out.end(), d.begin(), d.end());
  return out;
}

ResourceRecord make_ds(const DnsKeyRecord& key, std::uint32_t ttl) {
  return {key.owner, RecordType::DS, wire::kClassIn, ttl, RData(ds_rdata(key))};
}

bool ds_matches(ByteView ds, const DnsKeyRecord& key) {
  const Bytes expected = ds_rdata(key);
  return std::equal(ds.begin(), ds.end(), expected.begin(), expected.end());
}

}  // namespace siglab::dnssec
