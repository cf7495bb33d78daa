#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "siglab/mitigation.hpp"
#include "siglab/resolver.hpp"
#include "siglab/zonegen.hpp"

namespace siglab::harness {

using wire::DomainName;
using wire::Question;
using zonegen::ZoneBundle;

/// Serves every registered bundle; the longest matching apex wins.
class AuthServerModel : public resolver::Upstream {
 public:
  explicit AuthServerModel(std::vector<std::shared_ptr<const ZoneBundle>> zones, double latency_ms = 0.0);

  std::optional<wire::DnsMessage> query(const Question& question) override;
  std::optional<DomainName> zone_of(const DomainName& name) const override;
  std::vector<dnssec::DnsKeyRecord> trust_anchor(const DomainName& zone) const override;

  const ZoneBundle* bundle_for(const DomainName& name) const;
  const std::vector<std::shared_ptr<const ZoneBundle>>& zones() const noexcept { return zones_; }
  double latency_ms() const noexcept { return latency_ms_; }
  std::uint64_t queries_served() const noexcept { return served_; }

 private:
  std::vector<std::shared_ptr<const ZoneBundle>> zones_;
  double latency_ms_;
  std::uint64_t served_ = 0;
};

/// Simulated resolver CPU, in microseconds.
struct CostModel {
  double cache_hit_cost = 20.0;
  double cache_miss_base_cost = 200.0;
  double per_validation_attempt_cost = 50.0;
  double per_kilobyte_insert_cost = 2.0;
  double resolver_budget = 1e6;  // per simulated second

  void check() const;
  /// Cost of a prepared resolution, hit or miss.
  double cost_of(const resolver::ResolveResult& result, std::size_t octets_to_insert) const noexcept;
  /// Warm-cache benign capacity: budget / hit cost.
  double baseline_capacity() const noexcept { return resolver_budget / cache_hit_cost; }
};

struct BenignTraffic {
  double start_qps = 0.0;
  double end_qps = 0.0;
  /// Seconds to go from start to end; 0 means the whole run.
  double ramp_seconds = 0.0;
  std::vector<Question> queries;
};

struct AttackerTraffic {
  double qps = 0.0;
  std::size_t onset_second = 0;
  std::vector<Question> queries;
};

struct TrafficProfile {
  BenignTraffic benign;
  AttackerTraffic attacker;

  void check() const;
};

struct SecondStats {
  std::uint64_t second = 0;
  std::uint64_t benign_offered = 0;
  std::uint64_t benign_answered = 0;
  std::uint64_t benign_servfail = 0;
  std::uint64_t attacker_answered = 0;
  std::uint64_t cache_total_octets = 0;
  std::uint64_t cache_attacker_octets = 0;
  std::uint64_t cache_benign_octets = 0;
  std::uint64_t validation_attempts = 0;
  std::uint64_t evictions = 0;

  friend bool operator==(const SecondStats&, const SecondStats&) = default;
};

using TimeSeries = std::vector<SecondStats>;

struct ExperimentSummary {
  double baseline_capacity_qps = 0.0;
  double max_sustained_benign_qps = 0.0;
  double capacity_ratio = 0.0;
  std::optional<std::size_t> time_to_flush;  // seconds after onset
  double avg_post_onset_benign_qps = 0.0;
  double attacker_octets_per_miss = 0.0;
  double mean_attacker_cache_share = 0.0;
  std::uint64_t validation_attempts = 0;
};

struct ExperimentOptions {
  std::size_t cache_capacity = resolver::kDefaultCacheOctets;
  std::size_t duration_s = 60;
  std::uint64_t seed = 0;
  /// Resolve every benign query once before the clock starts.
  bool prewarm = true;
  /// Apexes whose cached octets count as attacker-owned; empty means every
  /// non-benign bundle.
  std::vector<DomainName> attacker_apexes;
};

struct ExperimentResult {
  TimeSeries series;
  ExperimentSummary summary;
};

/// Zones plus everything derived from them that many runs can share: the
/// attacker apex list and (lazily) a cache warmed with the benign queries.
class Testbed {
 public:
  Testbed(std::vector<std::shared_ptr<const ZoneBundle>> zones, resolver::MitigationConfig mitigations,
          std::size_t cache_capacity, std::vector<DomainName> attacker_apexes = {});

  const std::vector<std::shared_ptr<const ZoneBundle>>& zones() const noexcept { return zones_; }
  const resolver::MitigationConfig& mitigations() const noexcept { return mitigations_; }
  std::size_t cache_capacity() const noexcept { return cache_capacity_; }
  const std::vector<DomainName>& attacker_apexes() const noexcept { return attacker_apexes_; }

  /// Cache after resolving `queries` once each (memoised on the query list).
  const resolver::ResolverCache& warm_cache(const std::vector<Question>& queries);

  /// Throws ConfigError when a query names no registered zone.
  void check_served(const std::vector<Question>& queries, const char* what) const;

 private:
  std::vector<std::shared_ptr<const ZoneBundle>> zones_;
  resolver::MitigationConfig mitigations_;
  std::size_t cache_capacity_;
  std::vector<DomainName> attacker_apexes_;
  std::vector<Question> warmed_for_;
  std::optional<resolver::ResolverCache> warm_;
};

ExperimentResult run_experiment(Testbed& testbed, const TrafficProfile& traffic, const CostModel& cost,
                                std::size_t duration_s, std::uint64_t seed, bool prewarm = true);
ExperimentResult run_experiment(const std::vector<std::shared_ptr<const ZoneBundle>>& zones,
                                const TrafficProfile& traffic, const resolver::MitigationConfig& mitigations,
                                const CostModel& cost, const ExperimentOptions& options);

struct ProbeOptions {
  std::size_t warmup_s = 15;
  std::size_t window_s = 5;
  double answered_fraction = 0.99;
  /// Search stops once the bracket is narrower than this many qps.
  double resolution_qps = 250.0;
  std::uint64_t seed = 0;
};

/// Highest constant benign rate answered at ≥99% over the window while the
/// attacker runs at `attacker.qps` from the first second.
ExperimentSummary max_qps_probe(Testbed& testbed, const std::vector<Question>& benign_queries,
                                const AttackerTraffic& attacker, const CostModel& cost,
                                const ProbeOptions& options = {});

struct FlushOptions {
  /// Attacker query type; unset means A for the attack kind's instances.
  std::optional<wire::RecordType> qtype;
  double attacker_qps = 1000.0;
  double prefill_fraction = 0.95;
  // Shape of each synthetic benign RRSet: records x strings x string octets.
  std::size_t fill_entry_records = 16;
  std::size_t fill_strings_per_record = 16;
  std::size_t fill_string_octets = 255;
};

struct FlushSummary {
  std::size_t cache_capacity = 0;
  std::size_t attack_domains = 0;
  std::size_t initial_benign_octets = 0;
  std::size_t final_benign_octets = 0;
  double benign_survival = 1.0;
  std::size_t attacker_octets_inserted = 0;
  double attacker_octets_per_domain = 0.0;
  std::size_t final_attacker_octets = 0;
  std::optional<std::size_t> domains_to_flush;  // attacker octets ≥ 95% of capacity
  std::optional<double> time_to_flush_s;
};

/// Cache pre-filled with synthetic benign RRSets, then one attacker query
/// per subdomain of the attack bundle.
FlushSummary flush_experiment(const std::shared_ptr<const ZoneBundle>& attack_zone, std::size_t n_attack_domains,
                              std::size_t cache_capacity, const resolver::MitigationConfig& mitigations,
                              const FlushOptions& options = {});

inline constexpr const char* kTimeSeriesHeader =
    "second,benign_offered,benign_answered,benign_servfail,attacker_answered,cache_total_octets,"
    "cache_attacker_octets,cache_benign_octets,validation_attempts,evictions";

void write_timeseries_csv(const TimeSeries& series, std::ostream& out);
void write_timeseries_csv(const TimeSeries& series, const std::filesystem::path& path);
TimeSeries read_timeseries_csv(const std::filesystem::path& path);

std::string summary_text(const ExperimentSummary& summary);

/// Summary recomputed from a time series alone (attacker_octets_per_miss
/// needs per-query data and stays 0).
ExperimentSummary summarize_series(const TimeSeries& series, const CostModel& cost, std::size_t onset_second,
                                   std::size_t cache_capacity);

}  // namespace siglab::harness
