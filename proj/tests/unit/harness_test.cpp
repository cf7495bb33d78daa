#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "siglab/error.hpp"
#include "siglab/harness.hpp"
#include "siglab/zonegen.hpp"

using namespace siglab;
using namespace siglab::harness;
using wire::DomainName;
using wire::RecordType;
using Bundle = std::shared_ptr<const zonegen::ZoneBundle>;

namespace {

Bundle share(zonegen::ZoneBundle b) { return std::make_shared<const zonegen::ZoneBundle>(std::move(b)); }

struct World {
  World(std::size_t benign_names, zonegen::ZoneBundle attack)
      : zones{share(zonegen::gen_benign_zone(DomainName::parse("benign.example."), benign_names)),
              share(std::move(attack))} {
    benign = zonegen::instance_queries(*zones[0], RecordType::A);
    attacker = zonegen::instance_queries(*zones[1], zonegen::default_query_type(zones[1]->kind));
  }
  std::vector<Bundle> zones;
  std::vector<wire::Question> benign;
  std::vector<wire::Question> attacker;
};

TrafficProfile ramp(const World& w, double attacker_qps) {
  TrafficProfile t;
  t.benign = {0, 60000, 60, w.benign};
  t.attacker = {attacker_qps, 10, w.attacker};
  return t;
}

}  // namespace

TEST(CostModel, Baseline) {
  const CostModel c;
  EXPECT_DOUBLE_EQ(c.baseline_capacity(), 50000.0);
  CostModel bad;
  bad.cache_hit_cost = 0;
  EXPECT_THROW(bad.check(), Error);
}

TEST(Probe, BenignOnlyMatchesAnalyticCapacity) {
  World w(2000, zonegen::gen_bait_switch_zone(DomainName::parse("atk.example."), 65535, {.instances = 100}));
  Testbed tb(w.zones, {}, resolver::kDefaultCacheOctets);
  const auto s = max_qps_probe(tb, w.benign, {0, 0, w.attacker}, CostModel{});
  EXPECT_NEAR(s.capacity_ratio, 1.0, 0.02);
  EXPECT_NEAR(s.max_sustained_benign_qps, 50000, 1000);
}

TEST(Probe, KeyTrapBudgetHelps) {
  World w(2000, zonegen::gen_keytrap_zone(DomainName::parse("kt.example."), 100, 100, {.instances = 1000}));
  ProbeOptions fast;
  fast.warmup_s = 2;
  fast.window_s = 3;
  fast.resolution_qps = 500;
  Testbed open(w.zones, {}, resolver::kDefaultCacheOctets);
  resolver::MitigationConfig m;
  m.validation_budget = 16;
  Testbed capped(w.zones, m, resolver::kDefaultCacheOctets);
  const auto a = max_qps_probe(open, w.benign, {20, 0, w.attacker}, CostModel{}, fast);
  const auto b = max_qps_probe(capped, w.benign, {20, 0, w.attacker}, CostModel{}, fast);
  EXPECT_GT(b.capacity_ratio, a.capacity_ratio);
}

TEST(Experiment, SeriesShapeAndDeterminism) {
  World w(5000, zonegen::gen_bait_switch_zone(DomainName::parse("atk.example."), 65535, {.instances = 2000}));
  Testbed tb(w.zones, {}, resolver::kDefaultCacheOctets);
  const auto a = run_experiment(tb, ramp(w, 300), CostModel{}, 60, 7);
  const auto b = run_experiment(tb, ramp(w, 300), CostModel{}, 60, 7);
  ASSERT_EQ(a.series.size(), 60u);
  EXPECT_EQ(a.series, b.series);
  for (const auto& s : a.series) {
    EXPECT_EQ(s.cache_attacker_octets + s.cache_benign_octets, s.cache_total_octets);
    EXPECT_LE(s.cache_total_octets, resolver::kDefaultCacheOctets);
    EXPECT_LE(s.benign_answered + s.benign_servfail, s.benign_offered);
    if (s.second < 10) EXPECT_EQ(s.attacker_answered, 0u);
  }

  const auto path = std::filesystem::temp_directory_path() / "siglab-series-test.csv";
  write_timeseries_csv(a.series, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kTimeSeriesHeader);
  std::size_t lines = 1;
  while (std::getline(in, line)) {
    ++lines;
    std::stringstream fields(line);
    std::string f;
    while (std::getline(fields, f, ',')) {
      EXPECT_FALSE(f.empty());
      EXPECT_EQ(f.find_first_not_of("0123456789"), std::string::npos) << f;
    }
  }
  EXPECT_EQ(lines, 61u);
  EXPECT_EQ(read_timeseries_csv(path), a.series);
  std::filesystem::remove(path);

  const auto again = summarize_series(a.series, CostModel{}, 10, resolver::kDefaultCacheOctets);
  EXPECT_DOUBLE_EQ(again.avg_post_onset_benign_qps, a.summary.avg_post_onset_benign_qps);
}

TEST(Experiment, BadCsvReportsLine) {
  const auto path = std::filesystem::temp_directory_path() / "siglab-bad-test.csv";
  {
    std::ofstream out(path);
    out << kTimeSeriesHeader << "\n0,1,1,0,0,0,0,0,0,0\n1,2,x,0,0,0,0,0,0,0\n";
  }
  try {
    read_timeseries_csv(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_EQ(e.line(), 3u);
  }
  std::filesystem::remove(path);
}

TEST(Flush, SurvivalBounds) {
  const auto zone = share(zonegen::gen_bait_switch_zone(DomainName::parse("atk.example."), 65535, {.instances = 600}));
  const auto none = flush_experiment(zone, 0, 100'000'000, {});
  EXPECT_DOUBLE_EQ(none.benign_survival, 1.0);
  const auto hit = flush_experiment(zone, 500, 100'000'000, {});
  EXPECT_LE(hit.benign_survival, 0.05);
  EXPECT_TRUE(hit.domains_to_flush.has_value());
  const auto mitigated = flush_experiment(zone, 500, 100'000'000, resolver::MitigationConfig::recommended());
  EXPECT_GE(mitigated.benign_survival, 0.9);
  EXPECT_THROW(flush_experiment(zone, 601, 100'000'000, {}), Error);
}
