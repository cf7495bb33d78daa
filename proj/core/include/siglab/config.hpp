#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "siglab/harness.hpp"
#include "siglab/mitigation.hpp"
#include "siglab/zonegen.hpp"

// JSON experiment configuration:
//
//   {
//     "zones": [
//       {"kind": "benign", "apex": "benign.example.", "names": 100000},
//       {"kind": "bait-and-switch", "apex": "atk.example.", "instances": 10000},
//       {"file": "zones/keytrap.zone"}
//     ],
//     "traffic": {
//       "benign":   {"zone": "benign.example.", "start_qps": 0, "end_qps": 60000},
//       "attacker": {"zone": "atk.example.", "qps": 1000, "qtype": "DNSKEY"}
//     },
//     "mitigations": "off" | "default" | "recommended" | {"rrsig_max_size": 744, ...},
//     "cost": {"cache_hit_cost": 20, ...},
//     "cache_capacity_octets": 104857600,
//     "duration": 60,
//     "seed": 0,
//     "sweep": {"attacker_qps": [0, 300, 1000, 3000]}
//   }
//
// Relative file paths resolve against the config file's directory.
namespace siglab::config {

struct ZoneSpec {
  std::optional<std::filesystem::path> file;
  zonegen::AttackKind kind = zonegen::AttackKind::Benign;
  wire::DomainName apex;
  std::size_t instances = 10'000;
  std::string prefix = "attack-";
  std::size_t names = 100'000;      // benign
  std::size_t target_size = 65'535;  // bait-and-switch
  std::size_t keys = 65;             // multi-rsa, keytrap
  std::size_t sigs = 100;            // keytrap, any-type (per type)
  std::size_t types = 6;             // any-type
  std::size_t ns = 1'500;            // ns-cacheflush
  std::size_t key_bits = 1'024;      // keytrap
};

struct QuerySource {
  std::optional<wire::DomainName> zone;
  std::optional<std::filesystem::path> query_file;
  std::optional<wire::RecordType> qtype;
  std::optional<std::size_t> limit;
};

struct ExperimentConfig {
  std::vector<ZoneSpec> zones;
  harness::BenignTraffic benign;
  QuerySource benign_source;
  harness::AttackerTraffic attacker;
  QuerySource attacker_source;
  resolver::MitigationConfig mitigations;
  harness::CostModel cost;
  std::size_t cache_capacity_octets = resolver::kDefaultCacheOctets;
  std::size_t duration = 60;
  std::uint64_t seed = 0;
  std::vector<double> sweep_attacker_qps;
};

/// Throws ConfigError; syntax errors carry the offending line.
ExperimentConfig parse_experiment_json(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

std::shared_ptr<const zonegen::ZoneBundle> build_zone(const ZoneSpec& spec, std::uint64_t seed);

struct Materialized {
  std::vector<std::shared_ptr<const zonegen::ZoneBundle>> zones;
  harness::TrafficProfile traffic;
};

/// Generates or loads every zone and expands the query sources.
Materialized materialize(const ExperimentConfig& config);

/// Mitigation preset names accepted by configs and the CLI.
std::optional<resolver::MitigationConfig> mitigation_preset(std::string_view name);

}  // namespace siglab::config
