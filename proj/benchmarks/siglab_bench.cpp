#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "siglab/dnssec.hpp"
#include "siglab/harness.hpp"
#include "siglab/resolver.hpp"
#include "siglab/wire.hpp"
#include "siglab/zonegen.hpp"

using namespace siglab;
using wire::DomainName;
using wire::RecordType;

namespace {

const DomainName kZone = DomainName::parse("bench.example.");

void BM_Keytag(benchmark::State& state) {
  wire::Bytes rdata(static_cast<std::size_t>(state.range(0)));
  std::mt19937_64 rng(1);
  for (auto& b : rdata) b = static_cast<std::uint8_t>(rng());
  for (auto _ : state) benchmark::DoNotOptimize(dnssec::compute_keytag(rdata));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Keytag)->Arg(520)->Arg(8200);

void BM_CraftColliding(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dnssec::craft_colliding_keys(static_cast<std::size_t>(state.range(0)), 0x1234, 8, 1024, kZone));
  }
}
BENCHMARK(BM_CraftColliding)->Arg(100);

void BM_Sign(benchmark::State& state) {
  const auto key = dnssec::make_key(kZone, dnssec::KeyRole::Zsk, 8, 4096);
  std::vector<wire::ResourceRecord> set{{kZone, RecordType::A, wire::kClassIn, 300, wire::RData{192, 0, 2, 1}}};
  for (auto _ : state) benchmark::DoNotOptimize(dnssec::sign_rrset(set, key));
}
BENCHMARK(BM_Sign);

void BM_ValidateKeyTrap(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto b = zonegen::gen_keytrap_zone(kZone, n, n, {.instances = 1});
  const auto& set = b.rrsets.at({b.template_zone(), RecordType::DNSKEY});
  for (auto _ : state) benchmark::DoNotOptimize(dnssec::validate_rrset(set.records, set.sigs, b.keys));
  state.counters["attempts"] = static_cast<double>(n * n);
}
BENCHMARK(BM_ValidateKeyTrap)->Arg(10)->Arg(100);

void BM_EncodeDecodeMaximal(benchmark::State& state) {
  const auto b = zonegen::gen_multi_rsa_zone(kZone, 65, {.instances = 1});
  const auto msg = *b.respond(b.instance_name(0), RecordType::DNSKEY);
  for (auto _ : state) {
    const auto bytes = wire::encode_message(msg);
    benchmark::DoNotOptimize(wire::decode_message(bytes));
  }
}
BENCHMARK(BM_EncodeDecodeMaximal);

void BM_DerivedInstanceResponse(benchmark::State& state) {
  const auto b = zonegen::gen_bait_switch_zone(kZone, 65535, {.instances = 10000});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(b.respond(b.instance_name(i++ % 10000), RecordType::DNSKEY));
  }
}
BENCHMARK(BM_DerivedInstanceResponse);

void BM_CacheInsertLookup(benchmark::State& state) {
  resolver::ResolverCache cache(std::size_t{1} << 24);
  std::vector<wire::RRSetKey> keys;
  for (int i = 0; i < 4096; ++i) keys.push_back({kZone.prepend("n" + std::to_string(i)), RecordType::TXT});
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& key = keys[i++ % keys.size()];
    if (!cache.lookup(key, 0.0)) {
      std::vector<wire::ResourceRecord> rrs{
          {key.owner, RecordType::TXT, wire::kClassIn, 3600, wire::RData(wire::Bytes(400, 'x'))}};
      cache.insert(resolver::CacheEntry::make(key, std::move(rrs), {}, 0.0), 0.0);
    }
  }
}
BENCHMARK(BM_CacheInsertLookup);

void BM_ResolveBaitAndSwitch(benchmark::State& state) {
  const std::vector<std::shared_ptr<const zonegen::ZoneBundle>> zones{
      std::make_shared<const zonegen::ZoneBundle>(zonegen::gen_bait_switch_zone(kZone, 65535, {.instances = 10000}))};
  harness::AuthServerModel auth(zones);
  resolver::Resolver r(auth, {});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(r.resolve({zones[0]->instance_name(i++ % 10000), RecordType::DNSKEY}, 0.0));
  }
}
BENCHMARK(BM_ResolveBaitAndSwitch);

}  // namespace

BENCHMARK_MAIN();
