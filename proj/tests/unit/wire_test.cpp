#include <gtest/gtest.h>

#include <filesystem>
#include <functional>

#include "oracles.hpp"
#include "siglab/dnssec.hpp"
#include "siglab/error.hpp"
#include "siglab/wire.hpp"
#include "siglab/zonegen.hpp"

using namespace siglab;
using namespace siglab::wire;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no siglab::Error thrown";
  return ErrorCode::Io;
}

Bytes header(std::uint16_t qd, std::uint16_t an) {
  Bytes b{0x12, 0x34, 0x81, 0x00};
  put_u16(b, qd);
  put_u16(b, an);
  put_u16(b, 0);
  put_u16(b, 0);
  return b;
}

}  // namespace

TEST(Name, RootIsOneOctet) {
  EXPECT_EQ(encode_name(DomainName::parse(".")), Bytes{0});
  EXPECT_EQ(DomainName().wire_size(), 1u);
}

TEST(Name, ExampleComIsThirteenOctets) {
  const auto n = DomainName::parse("example.com.");
  EXPECT_EQ(encode_name(n).size(), 13u);
  EXPECT_EQ(n.wire_size(), oracle::name_octets("example.com."));
}

TEST(Name, Limits) {
  EXPECT_EQ(code_of([] { DomainName::parse(std::string(64, 'a') + ".com."); }), ErrorCode::LabelTooLong);
  EXPECT_NO_THROW(DomainName::parse(std::string(63, 'a') + ".com."));
  std::string long_name;
  for (int i = 0; i < 5; ++i) long_name += std::string(60, 'b') + ".";
  EXPECT_EQ(code_of([&] { DomainName::parse(long_name); }), ErrorCode::NameTooLong);
}

TEST(Name, CaseInsensitive) {
  const auto a = DomainName::parse("Example.COM.");
  const auto b = DomainName::parse("example.com");
  EXPECT_EQ(a, b);
  EXPECT_EQ(DomainNameHash{}(a), DomainNameHash{}(b));
  EXPECT_EQ(a.to_string(), "Example.COM.");
}

TEST(Name, SubdomainAndRebase) {
  const auto apex = DomainName::parse("atk.example.");
  const auto n = DomainName::parse("a.b.atk.example.");
  EXPECT_TRUE(n.is_subdomain_of(apex));
  EXPECT_FALSE(apex.is_subdomain_of(n));
  EXPECT_EQ(n.rebase(apex, DomainName::parse("x.")), DomainName::parse("a.b.x."));
  EXPECT_FALSE(n.rebase(DomainName::parse("other."), apex).has_value());
  EXPECT_EQ(n.parent().parent(), apex);
}

TEST(Name, RoundTrip) {
  const auto n = DomainName::parse("example.com.");
  const auto bytes = encode_name(n);
  const auto [back, next] = decode_name(bytes, 0);
  EXPECT_EQ(back, n);
  EXPECT_EQ(next, bytes.size());
}

TEST(Name, PointerLoop) {
  // offset 0: pointer to offset 2; offset 2: pointer to offset 0
  const Bytes loop{0xC0, 0x02, 0xC0, 0x00};
  EXPECT_EQ(code_of([&] { decode_name(loop, 2); }), ErrorCode::PointerLoop);
  const Bytes self{0xC0, 0x00};
  EXPECT_EQ(code_of([&] { decode_name(self, 0); }), ErrorCode::PointerLoop);
}

TEST(Name, BackwardPointerReassembles) {
  Bytes b = encode_name(DomainName::parse("example.com."));  // at offset 0
  const std::size_t start = b.size();
  b.insert(b.end(), {3, 'w', 'w', 'w', 0xC0, 0x00});
  const auto [name, next] = decode_name(b, start);
  EXPECT_EQ(name, DomainName::parse("www.example.com."));
  EXPECT_EQ(next, b.size());
  // pointer into the middle of a name
  b.insert(b.end(), {4, 'm', 'a', 'i', 'l', 0xC0, 0x08});
  EXPECT_EQ(decode_name(b, start + 6).first, DomainName::parse("mail.com."));
}

TEST(Record, SizesAreComponentSums) {
  ResourceRecord a{DomainName::parse("example.com."), RecordType::A, kClassIn, 300, RData{1, 2, 3, 4}};
  EXPECT_EQ(record_wire_size(a), 27u);
  EXPECT_EQ(encode_record(a).size(), 27u);

  const auto key = dnssec::make_key(DomainName::parse("example.com."), dnssec::KeyRole::Zsk, 8, 4096);
  EXPECT_EQ(record_wire_size(key.to_record(300)), 543u);

  ResourceRecord txt{DomainName(), RecordType::TXT, kClassIn, 0, RData()};
  EXPECT_EQ(record_wire_size(txt), 11u);
}

TEST(Message, EmptyResponseIsHeaderPlusQuestion) {
  DnsMessage m;
  m.question = {DomainName::parse("example.com."), RecordType::A};
  EXPECT_EQ(encode_message(m).size(), 12u + 13 + 4);
  EXPECT_EQ(message_wire_size(m), 29u);
}

TEST(Message, TooLarge) {
  DnsMessage m;
  m.question = {DomainName::parse("big."), RecordType::TXT};
  for (int i = 0; i < 2; ++i) {
    m.answers.push_back({DomainName::parse("big."), RecordType::TXT, kClassIn, 0, RData(Bytes(40000, 'x'))});
  }
  EXPECT_EQ(code_of([&] { encode_message(m); }), ErrorCode::MessageTooLarge);
}

TEST(Message, RandomRoundTripAndAdditiveSize) {
  oracle::MessageFactory f(1);
  for (int i = 0; i < 300; ++i) {
    const auto m = f.message();
    const auto bytes = encode_message(m);
    ASSERT_EQ(bytes.size(), message_wire_size(m));
    ASSERT_EQ(decode_message(bytes), m);
  }
}

TEST(Message, HeaderCountsMatchSections) {
  oracle::MessageFactory f(2);
  const auto m = f.message();
  const auto bytes = encode_message(m);
  EXPECT_EQ(get_u16(bytes, 4), 1);
  EXPECT_EQ(get_u16(bytes, 6), m.answers.size());
  EXPECT_EQ(get_u16(bytes, 8), m.authority.size());
  EXPECT_EQ(get_u16(bytes, 10), m.additional.size());
}

TEST(Message, CountMismatch) {
  ResourceRecord rr{DomainName::parse("a."), RecordType::A, kClassIn, 1, RData{1, 2, 3, 4}};
  Bytes b = header(1, 3);
  append_name(b, DomainName::parse("a."));
  put_u16(b, 1);
  put_u16(b, 1);
  append_record(b, rr);
  append_record(b, rr);
  EXPECT_EQ(code_of([&] { decode_message(b); }), ErrorCode::CountMismatch);

  Bytes extra = header(1, 1);
  append_name(extra, DomainName::parse("a."));
  put_u16(extra, 1);
  put_u16(extra, 1);
  append_record(extra, rr);
  extra.push_back(0);
  EXPECT_EQ(code_of([&] { decode_message(extra); }), ErrorCode::CountMismatch);
}

TEST(Message, TruncatedInput) {
  oracle::MessageFactory f(3);
  auto m = f.message();
  m.answers.push_back(f.record());
  auto bytes = encode_message(m);
  bytes.resize(bytes.size() - 1);
  EXPECT_ANY_THROW(decode_message(bytes));
}

TEST(Message, GeneratorResponsesRoundTrip) {
  const auto any = zonegen::gen_any_zone(DomainName::parse("any.example."), 6, 100, {.instances = 3});
  const auto mrsa = zonegen::gen_multi_rsa_zone(DomainName::parse("m.example."), 65, {.instances = 3});
  for (const auto* b : {&any, &mrsa}) {
    for (const auto& [plan, msg] : b->response_plans) {
      const auto bytes = encode_message(msg);
      EXPECT_LE(bytes.size(), kMaxMessageOctets);
      EXPECT_EQ(decode_message(bytes), msg);
    }
  }
  const auto dnskey = mrsa.respond(mrsa.instance_name(2), RecordType::DNSKEY);
  ASSERT_TRUE(dnskey);
  const auto size = encode_message(*dnskey).size();
  EXPECT_GE(size, 60000u);
  EXPECT_LE(size, 65535u);
}

TEST(Message, MaximalMessageDecodes) {
  const auto b = zonegen::gen_bait_switch_zone(DomainName::parse("atk.example."), 65535, {.instances = 2});
  std::size_t biggest = 0;
  for (const auto& [plan, msg] : b.response_plans) {
    const auto bytes = encode_message(msg);
    biggest = std::max(biggest, bytes.size());
    EXPECT_NO_THROW(decode_message(bytes));
  }
  EXPECT_EQ(biggest, 65535u);
}

TEST(RData, SharedBuffer) {
  RData a(Bytes(1000, 7));
  RData b = a;
  EXPECT_TRUE(a.shares_buffer_with(b));
  const auto tail = RData::tail_of(a, 990);
  EXPECT_EQ(tail.size(), 10u);
  EXPECT_TRUE(tail.shares_buffer_with(a));
  EXPECT_EQ(tail, RData(Bytes(10, 7)));
}

TEST(Dump, RoundTrip) {
  oracle::MessageFactory f(4);
  std::vector<DnsMessage> msgs;
  for (int i = 0; i < 20; ++i) msgs.push_back(f.message());
  const auto path = std::filesystem::temp_directory_path() / "siglab-wire-test.dnsdump";
  write_dump(path, msgs);
  EXPECT_EQ(read_dump(path), msgs);
  std::filesystem::remove(path);
}
