#include <gtest/gtest.h>

#include "siglab/dnssec.hpp"
#include "siglab/error.hpp"
#include "siglab/mitigation.hpp"
#include "siglab/zonegen.hpp"

using namespace siglab;
using namespace siglab::resolver;
using wire::DomainName;
using wire::RecordType;

namespace {

std::size_t count_type(const std::vector<wire::ResourceRecord>& rrs, RecordType t) {
  return static_cast<std::size_t>(std::count_if(rrs.begin(), rrs.end(), [&](const auto& rr) { return rr.type == t; }));
}

wire::DnsMessage txt_answer(std::size_t types, std::size_t per_type) {
  wire::DnsMessage m;
  const auto owner = DomainName::parse("x.example.");
  m.question = {owner, RecordType::ANY};
  const RecordType order[] = {RecordType::A, RecordType::NS, RecordType::MX, RecordType::TXT, RecordType::SOA,
                              RecordType::DS};
  for (std::size_t t = 0; t < types; ++t) {
    for (std::size_t i = 0; i < per_type; ++i) {
      m.answers.push_back({owner, order[t], wire::kClassIn, 60,
                           wire::RData{static_cast<std::uint8_t>(t), static_cast<std::uint8_t>(i >> 8),
                                       static_cast<std::uint8_t>(i), 0}});
    }
  }
  return m;
}

}  // namespace

TEST(Mitigation, Presets) {
  EXPECT_EQ(MitigationConfig{}.max_records_per_type, 100u);
  EXPECT_FALSE(MitigationConfig::off().max_records_per_type);
  const auto r = MitigationConfig::recommended();
  EXPECT_EQ(r.rrsig_max_size, 744u);
  EXPECT_EQ(r.dnskey_limit, 20u);
  EXPECT_TRUE(r.at_least_as_strict_as(MitigationConfig{}));
  EXPECT_FALSE(MitigationConfig::off().at_least_as_strict_as(r));
}

TEST(Mitigation, ZeroCapRejected) {
  MitigationConfig c;
  c.dnskey_limit = 0;
  EXPECT_THROW(c.check(), Error);
}

TEST(Mitigation, DnskeyLimit) {
  const auto b = zonegen::gen_multi_rsa_zone(DomainName::parse("m.example."), 65, {.instances = 2});
  const auto msg = *b.respond(b.instance_name(1), RecordType::DNSKEY);
  MitigationConfig c;
  c.dnskey_limit = 20;
  const auto out = apply_mitigations(msg, c);
  const auto keys = count_type(msg.answers, RecordType::DNSKEY);
  const auto sigs = count_type(msg.answers, RecordType::RRSIG);
  ASSERT_EQ(keys, 65u);
  EXPECT_EQ(count_type(out.message.answers, RecordType::DNSKEY), 20u);
  EXPECT_EQ(count_type(out.message.answers, RecordType::RRSIG), 20u);
  EXPECT_EQ(out.report.dropped_by_dnskey_limit, (keys - 20) + (sigs - 20));
}

TEST(Mitigation, OversizeSignatureDropped) {
  const auto b = zonegen::gen_bait_switch_zone(DomainName::parse("atk.example."), 65535, {.instances = 2});
  const auto msg = *b.respond(b.instance_name(1), RecordType::DNSKEY);
  MitigationConfig c;
  c.rrsig_max_size = 744;
  const auto out = apply_mitigations(msg, c);
  EXPECT_EQ(out.report.dropped_oversize_rrsig, 1u);
  EXPECT_LT(wire::encode_message(out.message).size(), 3000u);
  for (const auto& rr : out.message.answers) {
    if (rr.type == RecordType::RRSIG) EXPECT_LE(dnssec::RrsigRecord::signature_size_of(rr), 744u);
  }
}

TEST(Mitigation, RecordLimitPerRRSet) {
  const auto m = txt_answer(2, 150);
  MitigationConfig c;  // default 100
  const auto out = apply_mitigations(m, c);
  EXPECT_EQ(out.message.answers.size(), 200u);
  EXPECT_EQ(out.report.dropped_by_record_limit, 100u);
  EXPECT_EQ(apply_mitigations(m, MitigationConfig::off()).message.answers.size(), 300u);
}

TEST(Mitigation, AnyAggregateCap) {
  const auto m = txt_answer(6, 100);
  ASSERT_EQ(m.answers.size(), 600u);
  MitigationConfig c;
  c.any_aggregate_cap = 100;
  const auto out = apply_mitigations(m, c);
  EXPECT_EQ(out.message.answers.size(), 100u);
  EXPECT_EQ(out.report.dropped_by_any_cap, 500u);
  EXPECT_EQ(out.message.answers.front(), m.answers.front());

  auto not_any = m;
  not_any.question.type = RecordType::A;
  EXPECT_EQ(apply_mitigations(not_any, c).message.answers.size(), 600u);
}

TEST(Mitigation, NsReferralShrinks) {
  const auto b = zonegen::gen_ns_cacheflush_zone(DomainName::parse("ns.example."), 1500, {.instances = 2});
  const auto msg = *b.respond(b.instance_name(1), RecordType::A);
  const auto out = apply_mitigations(msg, MitigationConfig{});
  EXPECT_LE(count_type(out.message.authority, RecordType::NS), 100u);
  EXPECT_LT(wire::encode_message(out.message).size(), wire::encode_message(msg).size() / 5);
}

TEST(Mitigation, TextFormat) {
  const auto c = parse_mitigation_text("# comment\nrrsig_max_size = 744\ndnskey_limit=20\nmax_records_per_type=none\n");
  EXPECT_EQ(c.rrsig_max_size, 744u);
  EXPECT_EQ(c.dnskey_limit, 20u);
  EXPECT_FALSE(c.max_records_per_type);
  EXPECT_EQ(parse_mitigation_text(to_text(c)), c);
  try {
    parse_mitigation_text("dnskey_limit=20\nbogus_field=3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_mitigation_text("dnskey_limit=0\n"), Error);
  EXPECT_THROW(parse_mitigation_text("dnskey_limit\n"), Error);
}
