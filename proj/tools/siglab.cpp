// siglab: zone generation, packing reports, load simulation and validation
// counting from the command line.
//
// Exit codes: 0 success, 1 runtime/domain error, 2 usage or config error.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "siglab/config.hpp"
#include "siglab/dnssec.hpp"
#include "siglab/error.hpp"
#include "siglab/harness.hpp"
#include "siglab/mitigation.hpp"
#include "siglab/zonegen.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace siglab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Global {
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool json = false;
};

// --seed beats SIGLAB_SEED, which beats whatever the caller falls back to.
std::optional<std::uint64_t> seed_override(const Global& g) {
  if (g.seed_given) return g.seed;
  if (const char* env = std::getenv("SIGLAB_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      return v;
    } catch (const std::exception&) {
      throw UsageError(std::string("SIGLAB_SEED is not an unsigned integer: ") + env);
    }
  }
  return std::nullopt;
}

resolver::MitigationConfig mitigations_from(const std::string& arg) {
  if (auto preset = config::mitigation_preset(arg)) return *preset;
  if (!fs::exists(arg)) throw UsageError("--mitigations: not a preset (off, default, recommended) or a file: " + arg);
  return resolver::load_mitigation_file(arg);
}

// Octet counts with optional decimal (K, M, G) or binary (Ki, Mi, Gi) suffix.
std::size_t parse_octets(const std::string& text) {
  static const std::map<std::string, std::size_t> kUnits{
      {"", 1},           {"K", 1000},         {"M", 1000 * 1000},        {"G", 1000ull * 1000 * 1000},
      {"Ki", 1u << 10}, {"Mi", 1u << 20},    {"Gi", std::size_t{1} << 30}};
  std::size_t pos = 0;
  double value = 0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw UsageError("not a size: " + text);
  }
  auto suffix = text.substr(pos);
  if (!suffix.empty() && (suffix.back() == 'B' || suffix.back() == 'b')) suffix.pop_back();
  const auto it = kUnits.find(suffix);
  if (it == kUnits.end() || value <= 0) throw UsageError("not a size: " + text);
  return static_cast<std::size_t>(value * static_cast<double>(it->second));
}

wire::RecordType parse_type(const std::string& text) {
  const auto t = wire::record_type_from_string(text);
  if (!t) throw UsageError("unknown record type: " + text);
  return *t;
}

json summary_json(const harness::ExperimentSummary& s) {
  json j;
  j["baseline_capacity_qps"] = s.baseline_capacity_qps;
  j["max_sustained_benign_qps"] = s.max_sustained_benign_qps;
  j["capacity_ratio"] = s.capacity_ratio;
  j["time_to_flush_s"] = s.time_to_flush ? json(*s.time_to_flush) : json(nullptr);
  j["avg_post_onset_benign_qps"] = s.avg_post_onset_benign_qps;
  j["attacker_octets_per_miss"] = s.attacker_octets_per_miss;
  j["mean_attacker_cache_share"] = s.mean_attacker_cache_share;
  j["validation_attempts"] = s.validation_attempts;
  return j;
}

json pack_json(const zonegen::ZoneBundle& bundle, const zonegen::PackReport& r) {
  json j;
  j["kind"] = std::string(zonegen::to_string(r.kind));
  j["apex"] = bundle.apex.to_string();
  j["instances"] = bundle.instance_count;
  j["max_response_octets"] = r.max_response_octets;
  j["resolution_octets"] = r.resolution_octets;
  j["bogus_octets"] = r.bogus_octets;
  j["validation_attempts"] = r.validation_attempts;
  j["key_count"] = r.key_count;
  j["per_key_octets"] = r.per_key_octets;
  j["baseline_octets"] = r.baseline_octets;
  j["amplification"] = r.amplification;
  json responses = json::array();
  for (const auto& resp : r.responses) {
    responses.push_back({{"name", resp.plan.name.to_string()},
                         {"type", std::string(wire::to_string(resp.plan.type))},
                         {"octets", resp.octets},
                         {"records", resp.records}});
  }
  j["responses"] = std::move(responses);
  return j;
}

void print_pack(const zonegen::ZoneBundle& bundle, const zonegen::PackReport& r, std::ostream& out) {
  out << "kind: " << zonegen::to_string(r.kind) << '\n'
      << "apex: " << bundle.apex.to_string() << '\n'
      << "instances: " << bundle.instance_count << '\n';
  for (const auto& resp : r.responses) {
    out << "  response " << resp.plan.name.to_string() << ' ' << wire::to_string(resp.plan.type) << ": "
        << resp.octets << " octets, " << resp.records << " records\n";
  }
  out << "max_response_octets: " << r.max_response_octets << '\n'
      << "resolution_octets: " << r.resolution_octets << '\n'
      << "bogus_octets: " << r.bogus_octets << '\n'
      << "validation_attempts: " << r.validation_attempts << '\n';
  if (r.key_count > 0) {
    out << "key_count: " << r.key_count << '\n' << "per_key_octets: " << r.per_key_octets << '\n';
  }
  out << "amplification: " << r.amplification << " (baseline " << r.baseline_octets << " octets)\n";
}

// ---- zonegen / pack ------------------------------------------------------

struct ZonegenArgs {
  std::string kind = "benign";
  std::string apex;
  std::string out;
  config::ZoneSpec spec;
  double baseline = zonegen::kPaperBaselineOctets;
};

int run_zonegen(const Global& g, ZonegenArgs& a) {
  const auto kind = zonegen::attack_kind_from_string(a.kind);
  if (!kind) throw UsageError("unknown --kind " + a.kind);
  a.spec.kind = *kind;
  a.spec.apex = wire::DomainName::parse(a.apex.empty() ? std::string(zonegen::to_string(*kind)) + ".example."
                                                       : a.apex);
  const auto bundle = config::build_zone(a.spec, seed_override(g).value_or(0));
  if (!a.out.empty()) zonegen::emit_zone_file(*bundle, a.out);
  const auto report = zonegen::pack_report(*bundle, a.baseline);
  if (g.json) {
    auto j = pack_json(*bundle, report);
    if (!a.out.empty()) j["zone_file"] = a.out;
    std::cout << j.dump(2) << '\n';
  } else {
    if (!a.out.empty()) std::cout << "wrote " << a.out << '\n';
    print_pack(*bundle, report, std::cout);
  }
  return kExitOk;
}

int run_pack(const Global& g, const std::vector<std::string>& zones, double baseline) {
  json all = json::array();
  for (const auto& path : zones) {
    const auto bundle = zonegen::load_zone_file(path);
    const auto report = zonegen::pack_report(bundle, baseline);
    if (g.json) {
      auto j = pack_json(bundle, report);
      j["zone_file"] = path;
      all.push_back(std::move(j));
    } else {
      std::cout << "== " << path << '\n';
      print_pack(bundle, report, std::cout);
    }
  }
  if (g.json) std::cout << all.dump(2) << '\n';
  return kExitOk;
}

// ---- simulate / probe ------------------------------------------------------

config::ExperimentConfig load_config(const std::string& path, const Global& g) {
  auto cfg = config::load_experiment_config(path);
  if (const auto seed = seed_override(g)) cfg.seed = *seed;
  return cfg;
}

std::vector<double> attacker_rates(const config::ExperimentConfig& cfg, const std::vector<double>& override_rates) {
  if (!override_rates.empty()) return override_rates;
  if (!cfg.sweep_attacker_qps.empty()) return cfg.sweep_attacker_qps;
  return {cfg.attacker.qps};
}

std::string rate_label(double qps) {
  std::ostringstream s;
  s << qps;
  return s.str();
}

fs::path per_rate_path(const fs::path& base, double qps, bool many) {
  if (!many) return base;
  auto out = base;
  out.replace_filename(base.stem().string() + "-" + rate_label(qps) + "qps" + base.extension().string());
  return out;
}

// Runs `work(i)` for i in [0, n) on up to `jobs` threads. Results land in
// per-index slots, so output order never depends on scheduling.
template <typename Work>
void fan_out(std::size_t n, std::size_t jobs, Work work) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
    return;
  }
  std::mutex m;
  std::size_t next = 0;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard lock(m);
          if (next >= n || failure) return;
          i = next++;
        }
        try {
          work(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

struct SimulateArgs {
  std::string config;
  std::string out_csv;
  std::string summary;
  std::size_t jobs = 1;
  std::vector<double> attacker_qps;
};

int run_simulate(const Global& g, const SimulateArgs& a) {
  const auto cfg = load_config(a.config, g);
  const auto world = config::materialize(cfg);
  const auto rates = attacker_rates(cfg, a.attacker_qps);
  const bool many = rates.size() > 1;

  std::vector<harness::ExperimentResult> results(rates.size());
  fan_out(rates.size(), a.jobs, [&](std::size_t i) {
    auto traffic = world.traffic;
    traffic.attacker.qps = rates[i];
    harness::ExperimentOptions opt;
    opt.cache_capacity = cfg.cache_capacity_octets;
    opt.duration_s = cfg.duration;
    opt.seed = cfg.seed;
    results[i] = harness::run_experiment(world.zones, traffic, cfg.mitigations, cfg.cost, opt);
  });

  json all = json::array();
  std::ostringstream text;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!a.out_csv.empty()) harness::write_timeseries_csv(results[i].series, per_rate_path(a.out_csv, rates[i], many));
    if (many) text << "[attacker_qps " << rate_label(rates[i]) << "]\n";
    text << harness::summary_text(results[i].summary);
    auto j = summary_json(results[i].summary);
    j["attacker_qps"] = rates[i];
    all.push_back(std::move(j));
  }
  if (!a.summary.empty()) {
    std::ofstream out(a.summary, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + a.summary);
    out << text.str();
  }
  if (g.json) {
    std::cout << (many ? all : all.front()).dump(2) << '\n';
  } else {
    std::cout << text.str();
  }
  return kExitOk;
}

struct ProbeArgs {
  std::string config;
  std::vector<double> attacker_qps;
  harness::ProbeOptions options;
};

int run_probe(const Global& g, ProbeArgs& a) {
  const auto cfg = load_config(a.config, g);
  const auto world = config::materialize(cfg);
  if (world.traffic.benign.queries.empty()) throw Error(ErrorCode::ConfigError, "probe needs traffic.benign");
  a.options.seed = cfg.seed;
  harness::Testbed testbed(world.zones, cfg.mitigations, cfg.cache_capacity_octets);
  json all = json::array();
  for (const double qps : attacker_rates(cfg, a.attacker_qps)) {
    auto attacker = world.traffic.attacker;
    attacker.qps = qps;
    const auto s = harness::max_qps_probe(testbed, world.traffic.benign.queries, attacker, cfg.cost, a.options);
    if (g.json) {
      auto j = summary_json(s);
      j["attacker_qps"] = qps;
      all.push_back(std::move(j));
    } else {
      std::cout << "attacker_qps " << rate_label(qps) << ": capacity " << s.max_sustained_benign_qps << " qps, ratio "
                << s.capacity_ratio << ", attacker octets/miss " << s.attacker_octets_per_miss << '\n';
    }
  }
  if (g.json) std::cout << all.dump(2) << '\n';
  return kExitOk;
}

// ---- flush ------------------------------------------------------------------

struct FlushArgs {
  std::string kind = "bait-and-switch";
  std::string apex = "atk.example.";
  std::size_t domains = 500;
  std::string capacity = "100M";
  std::string mitigations = "off";
  std::string qtype;
  harness::FlushOptions options;
};

int run_flush(const Global& g, const FlushArgs& a) {
  const auto kind = zonegen::attack_kind_from_string(a.kind);
  if (!kind || *kind == zonegen::AttackKind::Benign) throw UsageError("--kind must name an attack");
  config::ZoneSpec spec;
  spec.kind = *kind;
  spec.apex = wire::DomainName::parse(a.apex);
  spec.instances = std::max<std::size_t>(a.domains, 1);
  const auto bundle = config::build_zone(spec, seed_override(g).value_or(0));
  auto options = a.options;
  if (!a.qtype.empty()) options.qtype = parse_type(a.qtype);
  const auto s = harness::flush_experiment(bundle, a.domains, parse_octets(a.capacity), mitigations_from(a.mitigations),
                                           options);
  if (g.json) {
    json j;
    j["cache_capacity"] = s.cache_capacity;
    j["attack_domains"] = s.attack_domains;
    j["initial_benign_octets"] = s.initial_benign_octets;
    j["final_benign_octets"] = s.final_benign_octets;
    j["benign_survival"] = s.benign_survival;
    j["attacker_octets_inserted"] = s.attacker_octets_inserted;
    j["attacker_octets_per_domain"] = s.attacker_octets_per_domain;
    j["final_attacker_octets"] = s.final_attacker_octets;
    j["domains_to_flush"] = s.domains_to_flush ? json(*s.domains_to_flush) : json(nullptr);
    j["time_to_flush_s"] = s.time_to_flush_s ? json(*s.time_to_flush_s) : json(nullptr);
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "cache_capacity: " << s.cache_capacity << '\n'
              << "attack_domains: " << s.attack_domains << '\n'
              << "initial_benign_octets: " << s.initial_benign_octets << '\n'
              << "final_benign_octets: " << s.final_benign_octets << '\n'
              << "benign_survival: " << s.benign_survival << '\n'
              << "attacker_octets_per_domain: " << s.attacker_octets_per_domain << '\n'
              << "domains_to_flush: " << (s.domains_to_flush ? std::to_string(*s.domains_to_flush) : "none") << '\n'
              << "time_to_flush_s: " << (s.time_to_flush_s ? std::to_string(*s.time_to_flush_s) : "none") << '\n';
  }
  return kExitOk;
}

// ---- validate-bench -----------------------------------------------------------

int run_validate_bench(const Global& g, const std::string& zone, std::optional<std::size_t> budget,
                       std::optional<std::size_t> max_sig) {
  const auto bundle = zonegen::load_zone_file(zone);
  dnssec::ValidationPolicy policy;
  policy.validation_budget = budget;
  policy.rrsig_max_size = max_sig;
  if (budget && *budget == 0) throw UsageError("--budget must be at least 1");
  const auto template_zone = bundle.template_zone();

  json rows = json::array();
  std::size_t total = 0;
  for (const auto& [key, set] : bundle.rrsets) {
    if (set.sigs.empty()) continue;
    // Whoever signed it: the zone's own keys, or the parent's for the DS.
    const bool by_parent = set.sigs.front().signer != template_zone;
    const auto& keys = by_parent ? bundle.parent_keys : bundle.keys;
    const auto outcome = dnssec::validate_rrset(set.records, set.sigs, keys, policy);
    total += outcome.attempts;
    if (g.json) {
      rows.push_back({{"owner", key.owner.to_string()},
                      {"type", std::string(wire::to_string(key.type))},
                      {"status", std::string(dnssec::to_string(outcome.status))},
                      {"attempts", outcome.attempts},
                      {"ignored", outcome.ignored_signatures},
                      {"rejected", outcome.rejected_signatures}});
    } else {
      std::cout << key.owner.to_string() << ' ' << wire::to_string(key.type) << ": "
                << dnssec::to_string(outcome.status) << ", attempts: " << outcome.attempts
                << ", ignored: " << outcome.ignored_signatures << ", rejected: " << outcome.rejected_signatures
                << '\n';
    }
  }
  if (g.json) {
    std::cout << json{{"rrsets", rows}, {"total_attempts", total}}.dump(2) << '\n';
  } else {
    std::cout << "total attempts: " << total << '\n';
  }
  return kExitOk;
}

// ---- report ------------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> csv;
  std::size_t onset = 0;
  std::string capacity = "100Mi";
  harness::CostModel cost;
};

int run_report(const Global& g, const ReportArgs& a) {
  json all = json::array();
  for (const auto& path : a.csv) {
    const auto series = harness::read_timeseries_csv(path);
    const auto s = harness::summarize_series(series, a.cost, a.onset, parse_octets(a.capacity));
    if (g.json) {
      auto j = summary_json(s);
      j["csv"] = path;
      j["seconds"] = series.size();
      all.push_back(std::move(j));
    } else {
      std::cout << "== " << path << " (" << series.size() << " s)\n" << harness::summary_text(s);
    }
  }
  if (g.json) std::cout << all.dump(2) << '\n';
  return kExitOk;
}

void add_cost_flags(CLI::App* cmd, harness::CostModel& cost) {
  cmd->add_option("--hit-cost", cost.cache_hit_cost, "Cache hit cost (us)");
  cmd->add_option("--miss-cost", cost.cache_miss_base_cost, "Cache miss base cost (us)");
  cmd->add_option("--attempt-cost", cost.per_validation_attempt_cost, "Cost per validation attempt (us)");
  cmd->add_option("--insert-cost", cost.per_kilobyte_insert_cost, "Cost per KB inserted (us)");
  cmd->add_option("--budget-us", cost.resolver_budget, "Resolver CPU per simulated second (us)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"siglab: DNSSEC cache-flush attack lab"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "Generator/simulation seed (default 0, or SIGLAB_SEED)")
      ->each([&](const std::string&) { g.seed_given = true; });
  app.add_flag("--json", g.json, "Machine-readable output");

  ZonegenArgs zg;
  auto* zonegen_cmd = app.add_subcommand("zonegen", "Generate a zone and print its packing report");
  zonegen_cmd->add_option("--kind", zg.kind,
                          "benign, bait-and-switch, multi-rsa, any-type, keytrap or ns-cacheflush")
      ->required();
  zonegen_cmd->add_option("--apex", zg.apex, "Zone apex (default <kind>.example.)");
  zonegen_cmd->add_option("--out", zg.out, "Zone file to write");
  zonegen_cmd->add_option("--instances", zg.spec.instances, "Attack subdomains");
  zonegen_cmd->add_option("--prefix", zg.spec.prefix, "Subdomain label prefix");
  zonegen_cmd->add_option("--names", zg.spec.names, "Benign names");
  zonegen_cmd->add_option("--target", zg.spec.target_size, "Bait-and-switch target response size");
  zonegen_cmd->add_option("--keys", zg.spec.keys, "Keys (multi-rsa, keytrap)");
  zonegen_cmd->add_option("--sigs", zg.spec.sigs, "Signatures (keytrap) or signatures per type (any-type)");
  zonegen_cmd->add_option("--types", zg.spec.types, "RRSet types (any-type)");
  zonegen_cmd->add_option("--ns", zg.spec.ns, "NS records per referral (ns-cacheflush)");
  zonegen_cmd->add_option("--key-bits", zg.spec.key_bits, "Modelled key size (keytrap)");
  zonegen_cmd->add_option("--baseline", zg.baseline, "Baseline response size for amplification");

  std::vector<std::string> pack_zones;
  double pack_baseline = zonegen::kPaperBaselineOctets;
  auto* pack_cmd = app.add_subcommand("pack", "Packing report for zone files");
  pack_cmd->add_option("--zone", pack_zones, "Zone file(s)")->required()->check(CLI::ExistingFile);
  pack_cmd->add_option("--baseline", pack_baseline, "Baseline response size for amplification");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a load experiment from a JSON config");
  sim_cmd->add_option("--config", sim.config, "Experiment config")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--out-csv", sim.out_csv, "Per-second CSV (one file per sweep rate)");
  sim_cmd->add_option("--summary", sim.summary, "Summary text file");
  sim_cmd->add_option("--jobs", sim.jobs, "Parallel runs for sweeps")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--attacker-qps", sim.attacker_qps, "Attacker rate(s); overrides the config")
      ->delimiter(',');

  ProbeArgs probe;
  auto* probe_cmd = app.add_subcommand("probe", "Maximum sustainable benign rate per attacker rate");
  probe_cmd->add_option("--config", probe.config, "Experiment config")->required()->check(CLI::ExistingFile);
  probe_cmd->add_option("--attacker-qps", probe.attacker_qps, "Attacker rate(s); overrides the config")
      ->delimiter(',');
  probe_cmd->add_option("--warmup", probe.options.warmup_s, "Warmup seconds before the window");
  probe_cmd->add_option("--window", probe.options.window_s, "Measurement window seconds")->check(CLI::PositiveNumber);
  probe_cmd->add_option("--resolution", probe.options.resolution_qps, "Search resolution (qps)")
      ->check(CLI::PositiveNumber);

  FlushArgs flush;
  auto* flush_cmd = app.add_subcommand("flush", "Cache-flush experiment against a pre-filled cache");
  flush_cmd->add_option("--kind", flush.kind, "Attack kind");
  flush_cmd->add_option("--apex", flush.apex, "Attack zone apex");
  flush_cmd->add_option("--domains", flush.domains, "Attacker subdomains queried");
  flush_cmd->add_option("--capacity", flush.capacity, "Cache size, e.g. 100M, 2G, 100Mi");
  flush_cmd->add_option("--mitigations", flush.mitigations, "Preset (off, default, recommended) or file");
  flush_cmd->add_option("--qtype", flush.qtype, "Attacker query type");
  flush_cmd->add_option("--attacker-qps", flush.options.attacker_qps, "Attacker rate for time-to-flush")
      ->check(CLI::PositiveNumber);
  flush_cmd->add_option("--prefill", flush.options.prefill_fraction, "Benign fill fraction")
      ->check(CLI::Range(0.0, 1.0));

  std::string vb_zone;
  std::optional<std::size_t> vb_budget;
  std::optional<std::size_t> vb_max_sig;
  auto* vb_cmd = app.add_subcommand("validate-bench", "Validate every signed RRSet of a zone file");
  vb_cmd->add_option("--zone", vb_zone, "Zone file")->required()->check(CLI::ExistingFile);
  vb_cmd->add_option("--budget", vb_budget, "Validation attempt budget per RRSet");
  vb_cmd->add_option("--rrsig-max-size", vb_max_sig, "Reject signatures above this size");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Summaries from time-series CSVs");
  report_cmd->add_option("--csv", report.csv, "CSV file(s)")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--onset", report.onset, "Attack onset second");
  report_cmd->add_option("--capacity", report.capacity, "Cache size used for the run");
  add_cost_flags(report_cmd, report.cost);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*zonegen_cmd) return run_zonegen(g, zg);
    if (*pack_cmd) return run_pack(g, pack_zones, pack_baseline);
    if (*sim_cmd) return run_simulate(g, sim);
    if (*probe_cmd) return run_probe(g, probe);
    if (*flush_cmd) return run_flush(g, flush);
    if (*vb_cmd) return run_validate_bench(g, vb_zone, vb_budget, vb_max_sig);
    if (*report_cmd) return run_report(g, report);
  } catch (const UsageError& e) {
    std::cerr << "siglab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "siglab: " << e.what() << '\n';
    return e.code() == ErrorCode::ConfigError ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "siglab: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
