#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <utility>

#include "oracles.hpp"
#include "siglab/error.hpp"
#include "siglab/zonegen.hpp"

using namespace siglab;
using namespace siglab::zonegen;

namespace {

const DomainName kAtk = DomainName::parse("atk.example.");

std::size_t plan_size(const ZoneBundle& b, std::size_t instance, RecordType type) {
  const auto msg = b.respond(b.instance_name(instance), type);
  return msg ? wire::encode_message(*msg).size() : 0;
}

std::vector<ResourceRecord> sorted_records(const ZoneBundle& b) {
  auto v = b.all_records();
  std::sort(v.begin(), v.end(), [](const ResourceRecord& x, const ResourceRecord& y) {
    const auto xb = wire::encode_record(x);
    const auto yb = wire::encode_record(y);
    return xb < yb;
  });
  return v;
}

void expect_round_trip(const ZoneBundle& b) {
  const auto back = parse_zone_text(emit_zone_text(b));
  EXPECT_EQ(back.kind, b.kind);
  EXPECT_EQ(back.apex, b.apex);
  EXPECT_EQ(back.instance_count, b.instance_count);
  EXPECT_EQ(back.parent_keys, b.parent_keys);
  EXPECT_EQ(sorted_records(back), sorted_records(b));
  EXPECT_EQ(back.response_plans, b.response_plans);
}

}  // namespace

TEST(Kinds, Names) {
  for (const auto k : {AttackKind::Benign, AttackKind::BaitAndSwitch, AttackKind::MultiRsa, AttackKind::AnyType,
                       AttackKind::KeyTrap, AttackKind::NsCacheFlush}) {
    EXPECT_EQ(attack_kind_from_string(to_string(k)), k);
  }
  EXPECT_FALSE(attack_kind_from_string("nope"));
}

TEST(Benign, SmallSignedResponses) {
  const auto b = gen_benign_zone(DomainName::parse("benign.example."), 1);
  EXPECT_LT(plan_size(b, 0, RecordType::A), 1000u);
  EXPECT_TRUE(b.is_signed());

  const auto big = gen_benign_zone(DomainName::parse("benign.example."), 100000);
  EXPECT_EQ(big.instance_count, 100000u);
  EXPECT_EQ(big.instance_name(0), DomainName::parse("benign-000000.benign.example."));
  EXPECT_EQ(big.instance_name(99999), DomainName::parse("benign-099999.benign.example."));
  EXPECT_EQ(big.instance_index(DomainName::parse("benign-012345.benign.example.")), 12345u);
  EXPECT_FALSE(big.instance_index(DomainName::parse("benign-100000.benign.example.")));

  const auto a = plan_size(big, 777, RecordType::A);
  EXPECT_GE(a, 449u / 2);
  EXPECT_LE(a, 449u * 2);
  EXPECT_LT(pack_report(big).amplification, 2.5);
}

TEST(BaitAndSwitch, ResponsesHitTheTarget) {
  const auto b = gen_bait_switch_zone(kAtk, 65535, {.instances = 5});
  for (const auto t : {RecordType::A, RecordType::DNSKEY, RecordType::DS}) {
    EXPECT_EQ(plan_size(b, 3, t), 65535u) << wire::to_string(t);
  }
  const auto r = pack_report(b);
  EXPECT_GE(r.amplification, 140.0);
  EXPECT_NEAR(static_cast<double>(r.resolution_octets), 130000.0, 0.15 * 130000);
}

TEST(BaitAndSwitch, SmallTarget) {
  const auto b = gen_bait_switch_zone(kAtk, 2000, {.instances = 2});
  for (const auto& [plan, msg] : b.response_plans) EXPECT_LE(wire::encode_message(msg).size(), 2000u);
  EXPECT_THROW(gen_bait_switch_zone(kAtk, 1999), Error);
  EXPECT_THROW(gen_bait_switch_zone(kAtk, 70000), Error);
}

TEST(BaitAndSwitch, EverySetValidatesWithOneIgnored) {
  const auto b = gen_bait_switch_zone(kAtk, 65535, {.instances = 2});
  for (const auto& [key, set] : b.rrsets) {
    const auto& keys = key.type == RecordType::DS ? b.parent_keys : b.keys;
    const auto out = dnssec::validate_rrset(set.records, set.sigs, keys);
    EXPECT_EQ(out.status, dnssec::ValidationStatus::Secure) << key.owner.to_string() << wire::to_string(key.type);
    EXPECT_EQ(out.ignored_signatures, 1u);
  }
}

TEST(BaitAndSwitch, DerivedInstancesAreResigned) {
  const auto b = gen_bait_switch_zone(kAtk, 65535, {.instances = 50});
  const auto msg = b.respond(b.instance_name(42), RecordType::A);
  ASSERT_TRUE(msg);
  std::vector<ResourceRecord> records;
  std::vector<dnssec::RrsigRecord> sigs;
  for (const auto& rr : msg->answers) {
    EXPECT_EQ(rr.owner, b.instance_name(42));
    if (rr.type == RecordType::RRSIG) {
      sigs.push_back(dnssec::RrsigRecord::from_record(rr));
    } else {
      records.push_back(rr);
    }
  }
  const auto keys_msg = b.respond(b.instance_name(42), RecordType::DNSKEY);
  std::vector<dnssec::DnsKeyRecord> keys;
  for (const auto& rr : keys_msg->answers) {
    if (rr.type == RecordType::DNSKEY) keys.push_back(dnssec::DnsKeyRecord::from_record(rr));
  }
  EXPECT_EQ(dnssec::validate_rrset(records, sigs, keys).status, dnssec::ValidationStatus::Secure);
  const auto past_end = b.respond(DomainName::parse("attack-000050.atk.example."), RecordType::A);
  ASSERT_TRUE(past_end);
  EXPECT_EQ(past_end->flags.rcode, wire::Rcode::NxDomain);
  EXPECT_FALSE(b.respond(DomainName::parse("elsewhere.example."), RecordType::A));
}

TEST(MultiRsa, Packing) {
  const auto b65 = gen_multi_rsa_zone(kAtk, 65, {.instances = 2});
  const auto size = plan_size(b65, 1, RecordType::DNSKEY);
  EXPECT_GE(size, 55000u);
  EXPECT_LE(size, 65535u);
  const auto r = pack_report(b65);
  EXPECT_GE(r.per_key_octets, 900.0);
  EXPECT_LE(r.per_key_octets, 1100.0);
  EXPECT_EQ(r.key_count, 65u);

  const auto b2 = gen_multi_rsa_zone(kAtk, 2, {.instances = 2});
  EXPECT_LT(plan_size(b2, 1, RecordType::DNSKEY), 3000u);

  const auto zone = b65.instance_name(0);
  const auto limit = multi_rsa_full_pairing_limit(zone);
  EXPECT_EQ(limit, oracle::multi_rsa_limit(zone.to_string()));
  EXPECT_GE(limit, 55u);
  EXPECT_LE(limit, 70u);
  EXPECT_THROW(gen_multi_rsa_zone(kAtk, 101), Error);
}

TEST(AnyType, Packing) {
  const auto b = gen_any_zone(kAtk, 6, 100, {.instances = 2});
  EXPECT_GE(plan_size(b, 1, RecordType::ANY), 60000u);
  for (const auto& [key, set] : b.rrsets) EXPECT_LE(set.sigs.size(), kMaxRecordsPerRRSet);

  const auto small = gen_any_zone(kAtk, 1, 1, {.instances = 2});
  EXPECT_LT(plan_size(small, 1, RecordType::ANY), 1500u);

  const auto asked = gen_any_zone(kAtk, 2, 500, {.instances = 2});
  for (const auto& [key, set] : asked.rrsets) EXPECT_LE(set.sigs.size(), kMaxRecordsPerRRSet);
}

TEST(KeyTrap, AttemptsAreTheProduct) {
  for (const auto [k, m] : std::vector<std::pair<std::size_t, std::size_t>>{{1, 1}, {10, 10}, {100, 100}}) {
    const auto b = gen_keytrap_zone(kAtk, k, m, {.instances = 2});
    EXPECT_EQ(pack_report(b).validation_attempts, k * m);
    std::set<std::uint16_t> tags;
    for (const auto& key : b.keys) tags.insert(key.keytag);
    EXPECT_EQ(tags.size(), 1u);
  }
}

TEST(NsFlush, ReferralSize) {
  const auto b = gen_ns_cacheflush_zone(kAtk, 1500, {.instances = 2});
  const auto r = pack_report(b);
  EXPECT_GE(r.max_response_octets, 55000u);
  EXPECT_LE(r.max_response_octets, 65535u);
  const auto one = gen_ns_cacheflush_zone(kAtk, 1, {.instances = 2});
  EXPECT_LT(pack_report(one).max_response_octets, 200u);
}

TEST(Pack, PlansFitAndSignedSetsValidate) {
  const std::vector<ZoneBundle> bundles{gen_benign_zone(DomainName::parse("b.example."), 3),
                                        gen_bait_switch_zone(kAtk, 65535, {.instances = 2}),
                                        gen_multi_rsa_zone(kAtk, 56, {.instances = 2}),
                                        gen_any_zone(kAtk, 6, 100, {.instances = 2}),
                                        gen_ns_cacheflush_zone(kAtk, 1500, {.instances = 2})};
  for (const auto& b : bundles) {
    for (const auto& [plan, msg] : b.response_plans) {
      EXPECT_LE(wire::encode_message(msg).size(), 65535u);
    }
    for (const auto& [key, set] : b.rrsets) {
      if (set.sigs.empty()) continue;
      const auto& keys = key.type == RecordType::DS ? b.parent_keys : b.keys;
      EXPECT_EQ(dnssec::validate_rrset(set.records, set.sigs, keys).status, dnssec::ValidationStatus::Secure)
          << to_string(b.kind) << " " << key.owner.to_string() << " " << wire::to_string(key.type);
    }
  }
}

TEST(ZoneFile, RoundTrips) {
  expect_round_trip(gen_benign_zone(DomainName::parse("b.example."), 20));
  expect_round_trip(gen_bait_switch_zone(kAtk, 8000, {.instances = 7}));
  expect_round_trip(gen_multi_rsa_zone(kAtk, 5, {.instances = 2}));
  expect_round_trip(gen_any_zone(kAtk, 3, 4, {.instances = 2}));
  expect_round_trip(gen_ns_cacheflush_zone(kAtk, 30, {.instances = 2}));
}

TEST(ZoneFile, KeyTrapReloadKeepsTags) {
  const auto b = gen_keytrap_zone(kAtk, 10, 10, {.instances = 3});
  const auto path = std::filesystem::temp_directory_path() / "siglab-keytrap-test.zone";
  emit_zone_file(b, path);
  const auto back = load_zone_file(path);
  std::filesystem::remove(path);
  ASSERT_EQ(back.keys.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(back.keys[i].keytag, b.keys[i].keytag);
    EXPECT_EQ(dnssec::compute_keytag(back.keys[i].rdata()), b.keys[i].keytag);
  }
}

TEST(ZoneFile, HandWritten) {
  const auto b = parse_zone_text(
      "# three records\n"
      "@kind benign\n"
      "@apex hand.example.\n"
      "www.hand.example. 300 IN A 192.0.2.1\n"
      "hand.example. 300 IN NS ns1.hand.example.\n"
      "hand.example. 300 IN MX 10 mail.hand.example.\n");
  EXPECT_EQ(b.all_records().size(), 3u);
  EXPECT_FALSE(b.is_signed());
}

TEST(ZoneFile, ErrorsCarryLines) {
  try {
    parse_zone_text("@kind benign\n@apex x.\nwww.x. 300 IN A 1.2.3\n");
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Queries, FileRoundTrip) {
  const auto b = gen_benign_zone(DomainName::parse("b.example."), 10);
  const auto qs = instance_queries(b, RecordType::A);
  ASSERT_EQ(qs.size(), 10u);
  const auto path = std::filesystem::temp_directory_path() / "siglab-queries-test.txt";
  write_query_file(path, qs);
  EXPECT_EQ(read_query_file(path), qs);
  std::filesystem::remove(path);
  EXPECT_EQ(instance_queries(b, RecordType::A, 3).size(), 3u);
}
