#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "siglab/dnssec.hpp"
#include "siglab/error.hpp"
#include "siglab/zonegen.hpp"

using namespace siglab;
using namespace siglab::dnssec;
using wire::Bytes;

namespace {

const DomainName kZone = DomainName::parse("example.com.");

std::vector<ResourceRecord> a_set(std::size_t n = 2) {
  std::vector<ResourceRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({kZone, RecordType::A, wire::kClassIn, 300,
                   RData{192, 0, 2, static_cast<std::uint8_t>(i)}});
  }
  return out;
}

}  // namespace

TEST(Keytag, HandValues) {
  EXPECT_EQ(compute_keytag(Bytes{0x01, 0x02}), 258);
  for (std::size_t n : {0u, 2u, 10u, 520u}) EXPECT_EQ(compute_keytag(Bytes(n, 0)), 0) << n;
  // odd length: final octet is the high byte of a zero-padded word
  EXPECT_EQ(compute_keytag(Bytes{0x00, 0x00, 0x01}), 256);
}

TEST(Keytag, AgreesWithOracle) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    Bytes rdata(std::uniform_int_distribution<std::size_t>(0, 2000)(rng));
    for (auto& b : rdata) b = static_cast<std::uint8_t>(rng());
    ASSERT_EQ(compute_keytag(rdata), oracle::keytag(rdata));
  }
}

TEST(Keys, Sizes) {
  const auto rsa = make_key(kZone, KeyRole::Zsk, kAlgRsaSha256, 4096);
  EXPECT_EQ(rsa.rdata().size(), 520u);
  EXPECT_EQ(rsa.public_key.size(), 516u);
  EXPECT_EQ(rsa.modeled_signature_size, 512u);
  EXPECT_EQ(rsa.keytag, compute_keytag(rsa.rdata()));
  EXPECT_EQ(rsa.to_record(60).type, RecordType::DNSKEY);

  const auto huge = make_key(kZone, KeyRole::Ksk, kAlgPrivate, 65536);
  EXPECT_EQ(huge.rdata().size(), 4u + 8192 + 4);
  EXPECT_EQ(flags_for(KeyRole::Ksk), 257);

  const auto ec = make_key(kZone, KeyRole::Zsk, kAlgEcdsaP384, 384);
  EXPECT_EQ(ec.public_key.size(), 96u);
}

TEST(Keys, Deterministic) {
  EXPECT_EQ(make_key(kZone, KeyRole::Ksk, 8, 2048, 5), make_key(kZone, KeyRole::Ksk, 8, 2048, 5));
  EXPECT_NE(make_key(kZone, KeyRole::Ksk, 8, 2048, 5).public_key, make_key(kZone, KeyRole::Ksk, 8, 2048, 6).public_key);
}

TEST(Keys, UnsupportedSizes) {
  EXPECT_THROW(make_key(kZone, KeyRole::Zsk, 8, 3000), Error);
  EXPECT_THROW(make_key(kZone, KeyRole::Zsk, 14, 256), Error);
  EXPECT_THROW(make_key(kZone, KeyRole::Zsk, kAlgPrivate, 12), Error);
}

TEST(Keys, RecordRoundTrip) {
  const auto k = make_key(kZone, KeyRole::Ksk, 8, 4096, 3);
  EXPECT_EQ(DnsKeyRecord::from_record(k.to_record(300)), k);
}

TEST(Sign, SelfConsistent) {
  const auto key = make_key(kZone, KeyRole::Zsk, 8, 4096);
  const auto set = a_set();
  const auto sig = sign_rrset(set, key);
  EXPECT_EQ(sig.signature.size(), 512u);
  EXPECT_EQ(sig.keytag, key.keytag);
  EXPECT_EQ(sig.rdata().size(), 18 + kZone.wire_size() + 512);
  EXPECT_EQ(RrsigRecord::from_record(sig.to_record(kZone, 300)), sig);

  const std::vector<RrsigRecord> sigs{sig};
  const std::vector<DnsKeyRecord> keys{key};
  const auto out = validate_rrset(set, sigs, keys);
  EXPECT_EQ(out.status, ValidationStatus::Secure);
  EXPECT_EQ(out.attempts, 1u);
}

TEST(Sign, AnyChangeBreaksIt) {
  const auto key = make_key(kZone, KeyRole::Zsk, 8, 1024);
  auto set = a_set();
  const auto sig = sign_rrset(set, key);
  EXPECT_TRUE(verify(set, sig, key));

  auto flipped = set;
  Bytes rd(flipped[1].rdata.bytes().begin(), flipped[1].rdata.bytes().end());
  rd[3] ^= 1;
  flipped[1].rdata = RData(rd);
  EXPECT_FALSE(verify(flipped, sig, key));

  auto other_window = sig;
  other_window.expiration += 1;
  EXPECT_FALSE(verify(set, other_window, key));

  EXPECT_FALSE(verify(set, sig, make_key(kZone, KeyRole::Zsk, 8, 1024, 99)));
}

TEST(Sign, CaseOfOwnerDoesNotMatter) {
  const auto key = make_key(kZone, KeyRole::Zsk, 8, 1024);
  auto set = a_set(1);
  const auto sig = sign_rrset(set, key);
  set[0].owner = DomainName::parse("EXAMPLE.com.");
  EXPECT_TRUE(verify(set, sig, key));
}

TEST(Sign, Errors) {
  const auto key = make_key(kZone, KeyRole::Zsk, 8, 1024);
  auto mixed = a_set();
  mixed[1].type = RecordType::TXT;
  EXPECT_THROW(sign_rrset(mixed, key), Error);
  EXPECT_THROW(sign_rrset(a_set(), make_key(kZone, KeyRole::Zsk, kAlgPrivate, 1024)), Error);
}

TEST(Forge, Sizes) {
  const auto big = forge_rrsig({kZone, RecordType::DNSKEY}, 1, kAlgPrivate, 64000);
  EXPECT_EQ(big.rdata().size(), 18 + kZone.wire_size() + 64000);
  const auto tiny = forge_rrsig({kZone, RecordType::A}, 1, kAlgRsaSha256, 1);
  EXPECT_EQ(tiny.signature.size(), 1u);
  EXPECT_EQ(big.signer, kZone);
}

TEST(Forge, KnownAlgorithmFailsUnknownIsIgnored) {
  const auto key = make_key(kZone, KeyRole::Zsk, 8, 1024);
  const auto set = a_set();
  const std::vector<DnsKeyRecord> keys{key};
  const std::vector<RrsigRecord> known{forge_rrsig({kZone, RecordType::A}, key.keytag, 8, 128)};
  const auto k = validate_rrset(set, known, keys);
  EXPECT_EQ(k.status, ValidationStatus::Bogus);
  EXPECT_EQ(k.attempts, 1u);

  const std::vector<RrsigRecord> unknown{forge_rrsig({kZone, RecordType::A}, key.keytag, kAlgPrivate, 128)};
  const auto u = validate_rrset(set, unknown, keys);
  EXPECT_EQ(u.status, ValidationStatus::Insecure);
  EXPECT_EQ(u.attempts, 0u);
  EXPECT_EQ(u.ignored_signatures, 1u);
}

TEST(Collide, AllShareTheTag) {
  const auto one = craft_colliding_keys(1, 0xBEEF, 8, 1024, kZone);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(oracle::keytag(one[0].rdata()), 0xBEEF);

  const auto keys = craft_colliding_keys(100, 0x1234, 8, 1024, kZone);
  std::set<Bytes> distinct;
  for (const auto& k : keys) {
    EXPECT_EQ(oracle::keytag(k.rdata()), 0x1234);
    EXPECT_EQ(compute_keytag(k.rdata()), 0x1234);
    distinct.insert(k.rdata());
  }
  EXPECT_EQ(distinct.size(), 100u);

  const auto two = craft_colliding_keys(2, 7, 8, 1024, kZone);
  EXPECT_EQ(compute_keytag(two[0].rdata()), compute_keytag(two[1].rdata()));
}

TEST(Validate, KeyTrapEnumeratesEveryPair) {
  for (const std::size_t n : {1u, 10u, 100u}) {
    const auto keys = craft_colliding_keys(n, 0x4242, 8, 1024, kZone);
    const auto set = a_set();
    std::vector<RrsigRecord> sigs;
    for (std::size_t i = 0; i < n; ++i) sigs.push_back(forge_rrsig({kZone, RecordType::A}, 0x4242, 8, 128));
    const auto out = validate_rrset(set, sigs, keys);
    EXPECT_EQ(out.status, ValidationStatus::Bogus);
    EXPECT_EQ(out.attempts, n * n);
  }
}

TEST(Validate, Budget) {
  const auto keys = craft_colliding_keys(10, 9, 8, 1024, kZone);
  std::vector<RrsigRecord> sigs(10, forge_rrsig({kZone, RecordType::A}, 9, 8, 128));
  ValidationPolicy p;
  p.validation_budget = 16;
  const auto out = validate_rrset(a_set(), sigs, keys, p);
  EXPECT_EQ(out.status, ValidationStatus::Bogus);
  EXPECT_EQ(out.attempts, 16u);
}

TEST(Validate, BaitAndSwitchPair) {
  const auto key = make_key(kZone, KeyRole::Zsk, 8, 1024);
  const auto set = a_set();
  const std::vector<RrsigRecord> sigs{sign_rrset(set, key),
                                      forge_rrsig({kZone, RecordType::A}, key.keytag, kAlgPrivate, 64000)};
  const std::vector<DnsKeyRecord> keys{key};
  const auto out = validate_rrset(set, sigs, keys);
  EXPECT_EQ(out.status, ValidationStatus::Secure);
  EXPECT_EQ(out.attempts, 1u);
  EXPECT_EQ(out.ignored_signatures, 1u);
}

TEST(Validate, EmptyAndOversize) {
  const auto key = make_key(kZone, KeyRole::Zsk, 8, 4096);
  const std::vector<DnsKeyRecord> keys{key};
  EXPECT_EQ(validate_rrset(a_set(), {}, keys), (ValidationOutcome{ValidationStatus::Insecure, 0, 0, 0}));

  // 512-octet RSA-4096 signature fits under 744; a 1,000-octet one does not.
  const auto set = a_set();
  ValidationPolicy p;
  p.rrsig_max_size = 744;
  const std::vector<RrsigRecord> ok{sign_rrset(set, key)};
  EXPECT_EQ(validate_rrset(set, ok, keys, p).status, ValidationStatus::Secure);
  const std::vector<RrsigRecord> big{forge_rrsig({kZone, RecordType::A}, key.keytag, 8, 1000)};
  const auto out = validate_rrset(set, big, keys, p);
  EXPECT_EQ(out.rejected_signatures, 1u);
  EXPECT_EQ(out.attempts, 0u);
}

TEST(Validate, TagMismatchIsNotAttempted) {
  const auto key = make_key(kZone, KeyRole::Zsk, 8, 1024);
  const std::vector<DnsKeyRecord> keys{key};
  const std::vector<RrsigRecord> sigs{
      forge_rrsig({kZone, RecordType::A}, static_cast<std::uint16_t>(key.keytag + 1), 8, 128)};
  const auto out = validate_rrset(a_set(), sigs, keys);
  EXPECT_EQ(out.attempts, 0u);
  EXPECT_EQ(out.status, ValidationStatus::Insecure);
}

TEST(Ds, MatchesOnlyItsKey) {
  const auto a = make_key(kZone, KeyRole::Ksk, 8, 2048, 1);
  const auto b = make_key(kZone, KeyRole::Ksk, 8, 2048, 2);
  const auto ds = ds_rdata(a);
  EXPECT_EQ(ds.size(), kDsRdataOctets);
  EXPECT_EQ(wire::get_u16(ds, 0), a.keytag);
  EXPECT_TRUE(ds_matches(ds, a));
  EXPECT_FALSE(ds_matches(ds, b));
}

TEST(Validate, KeyTrapZonePlans) {
  const auto b = zonegen::gen_keytrap_zone(DomainName::parse("kt.example."), 10, 10, {.instances = 2});
  const auto& set = b.rrsets.at({b.template_zone(), RecordType::DNSKEY});
  const auto out = validate_rrset(set.records, set.sigs, b.keys);
  EXPECT_EQ(out.attempts, 100u);
  EXPECT_EQ(out.status, ValidationStatus::Bogus);
}
