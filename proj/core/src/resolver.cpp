#include "siglab/resolver.hpp"

#include <algorithm>
#include <map>

#include "siglab/error.hpp"

namespace siglab::resolver {

namespace {

using dnssec::DnsKeyRecord;
using dnssec::RrsigRecord;
using dnssec::ValidationStatus;
using wire::DnsMessage;
using wire::RecordType;
using wire::ResourceRecord;
using wire::RRSetKey;

struct GroupedSet {
  RRSetKey key;
  bool in_answer = false;
  std::vector<ResourceRecord> records;
  std::vector<ResourceRecord> sig_records;
  std::vector<RrsigRecord> sigs;
};

/// Splits a response into RRSets (first-appearance order) with the RRSIGs
/// covering each attached. Signatures over absent RRSets are dropped.
std::vector<GroupedSet> group(const DnsMessage& msg) {
  std::vector<GroupedSet> sets;
  std::map<RRSetKey, std::size_t> where;
  std::vector<std::pair<const ResourceRecord*, bool>> sigs;
  for (const auto section : {wire::Section::Answer, wire::Section::Authority, wire::Section::Additional}) {
    const bool answer = section == wire::Section::Answer;
    for (const auto& rr : msg.section(section)) {
      if (rr.type == RecordType::RRSIG) {
        sigs.emplace_back(&rr, answer);
        continue;
      }
      const RRSetKey key = wire::key_of(rr);
      auto [it, fresh] = where.try_emplace(key, sets.size());
      if (fresh) sets.push_back({key, answer, {}, {}, {}});
      sets[it->second].records.push_back(rr);
    }
  }
  for (const auto& [rr, answer] : sigs) {
    RrsigRecord sig;
    try {
      sig = RrsigRecord::from_record(*rr);
    } catch (const Error&) {
      continue;  // malformed signatures are simply not usable
    }
    const auto it = where.find({rr->owner, sig.type_covered});
    if (it == where.end()) continue;
    sets[it->second].sig_records.push_back(*rr);
    sets[it->second].sigs.push_back(std::move(sig));
  }
  return sets;
}

std::vector<DnsKeyRecord> parse_keys(std::span<const ResourceRecord> records) {
  std::vector<DnsKeyRecord> keys;
  keys.reserve(records.size());
  for (const auto& rr : records) {
    try {
      keys.push_back(DnsKeyRecord::from_record(rr));
    } catch (const Error&) {
      // a key we cannot parse can never verify anything
    }
  }
  return keys;
}

const GroupedSet* find_set(const std::vector<GroupedSet>& sets, const RRSetKey& key) {
  const auto it = std::find_if(sets.begin(), sets.end(), [&](const GroupedSet& s) { return s.key == key; });
  return it == sets.end() ? nullptr : &*it;
}

CacheEntry entry_for(const GroupedSet& set, double now) {
  return CacheEntry::make(set.key, set.records, set.sig_records, now);
}

}  // namespace

std::string_view to_string(ResolveStatus status) noexcept {
  switch (status) {
    case ResolveStatus::Answer: return "answer";
    case ResolveStatus::ServFail: return "servfail";
    case ResolveStatus::Refused: return "refused";
  }
  return "unknown";
}

Resolver::Resolver(Upstream& upstream, ResolverOptions options)
    : upstream_(upstream),
      options_(std::move(options)),
      cache_(options_.cache_capacity, options_.attacker_apexes) {
  options_.mitigations.check();
}

ResolveResult Resolver::resolve(const wire::Question& question, double now) {
  return commit(prepare(question, now), now);
}

PreparedResolution Resolver::prepare(const wire::Question& question, double now) {
  PreparedResolution out;
  auto& result = out.result;
  const auto fail = [&](ResolveStatus status) {
    result.status = status;
    out.batch.clear();
    return out;
  };

  if (question.type != RecordType::ANY && cache_.lookup(question.name, question.type, now)) {
    result.served_from_cache = true;
    return out;
  }
  const auto zone = upstream_.zone_of(question.name);
  if (!zone) return fail(ResolveStatus::Refused);

  const auto& mitigations = options_.mitigations;
  const dnssec::ValidationPolicy policy{{dnssec::kAlgRsaSha256, dnssec::kAlgEcdsaP384},
                                        mitigations.rrsig_max_size,
                                        mitigations.validation_budget};
  const auto fetch = [&](const wire::Question& q) -> std::optional<DnsMessage> {
    ++result.upstream_fetches;
    auto raw = upstream_.query(q);
    if (!raw) return std::nullopt;
    auto filtered = apply_mitigations(*raw, mitigations);
    result.mitigation += filtered.report;
    return std::move(filtered.message);
  };
  const auto validate = [&](const GroupedSet& set, std::span<const DnsKeyRecord> keys) {
    const auto outcome = dnssec::validate_rrset(set.records, set.sigs, keys, policy);
    result.validation_attempts += outcome.attempts;
    return outcome.status;
  };

  const auto answer = fetch(question);
  if (!answer) return fail(ResolveStatus::Refused);
  if (answer->flags.rcode != wire::Rcode::NoError && answer->flags.rcode != wire::Rcode::NxDomain) {
    return fail(ResolveStatus::ServFail);
  }
  const auto answer_sets = group(*answer);

  // Chain of trust for the zone: DNSKEY first, then DS under the anchor, then
  // the DS-to-DNSKEY digest link. A cached, previously validated pair is reused.
  const RRSetKey dnskey_key{*zone, RecordType::DNSKEY};
  const RRSetKey ds_key{*zone, RecordType::DS};
  const auto anchor = upstream_.trust_anchor(*zone);
  std::vector<DnsKeyRecord> zone_keys;
  bool is_signed = false;
  std::vector<RRSetKey> handled;
  if (!anchor.empty()) {
    const CacheEntry* cached_keys = cache_.lookup(dnskey_key, now);
    const CacheEntry* cached_ds = cached_keys ? cache_.lookup(ds_key, now) : nullptr;
    if (cached_keys && cached_ds) {
      zone_keys = parse_keys(cached_keys->records);
      is_signed = true;
    } else {
      const auto ds_msg = question == wire::Question{*zone, RecordType::DS} ? answer : fetch({*zone, RecordType::DS});
      const auto ds_sets = ds_msg ? group(*ds_msg) : std::vector<GroupedSet>{};
      const GroupedSet* ds = find_set(ds_sets, ds_key);
      if (ds && !ds->records.empty()) {
        const bool reuse = question == wire::Question{*zone, RecordType::DNSKEY};
        const auto key_msg = reuse ? answer : fetch({*zone, RecordType::DNSKEY});
        const auto key_sets = key_msg ? group(*key_msg) : std::vector<GroupedSet>{};
        const GroupedSet* dnskey = find_set(key_sets, dnskey_key);
        if (!dnskey) return fail(ResolveStatus::ServFail);
        zone_keys = parse_keys(dnskey->records);
        if (validate(*dnskey, zone_keys) != ValidationStatus::Secure) return fail(ResolveStatus::ServFail);
        if (validate(*ds, anchor) != ValidationStatus::Secure) return fail(ResolveStatus::ServFail);
        const bool linked = std::any_of(ds->records.begin(), ds->records.end(), [&](const ResourceRecord& rr) {
          return std::any_of(zone_keys.begin(), zone_keys.end(),
                             [&](const DnsKeyRecord& key) { return dnssec::ds_matches(rr.rdata.bytes(), key); });
        });
        if (!linked) return fail(ResolveStatus::ServFail);
        out.batch.push_back(entry_for(*dnskey, now));
        out.batch.push_back(entry_for(*ds, now));
        handled = {dnskey_key, ds_key};
        is_signed = true;
      }
    }
  }

  // A bogus answer RRSet turns the reply into ServFail and stays out of the
  // cache; the chain and the answer RRSets that did validate still go in.
  for (const auto& set : answer_sets) {
    if (std::find(handled.begin(), handled.end(), set.key) != handled.end()) continue;
    if (is_signed) {
      const bool parent_signed = set.key == ds_key;
      const auto status = validate(set, parent_signed ? std::span<const DnsKeyRecord>(anchor) : zone_keys);
      if (status != ValidationStatus::Secure) {
        if (set.in_answer) result.status = ResolveStatus::ServFail;
        continue;
      }
    }
    out.batch.push_back(entry_for(set, now));
  }
  return out;
}

ResolveResult Resolver::commit(PreparedResolution prepared, double now) {
  ResolveResult result = prepared.result;
  if (result.served_from_cache || prepared.batch.empty()) return result;
  std::size_t octets = 0;
  for (const auto& e : prepared.batch) octets += e.stored_octets;
  std::vector<RRSetKey> evicted;
  if (cache_.insert_batch(std::move(prepared.batch), now, &evicted)) {
    result.octets_inserted = octets;
    result.evictions = evicted.size();
  }
  return result;
}

}  // namespace siglab::resolver
