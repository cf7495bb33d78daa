#include "siglab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "siglab/error.hpp"

namespace siglab::harness {

namespace {

using resolver::PreparedResolution;
using resolver::ResolveStatus;

std::vector<DomainName> default_attacker_apexes(const std::vector<std::shared_ptr<const ZoneBundle>>& zones) {
  std::vector<DomainName> out;
  for (const auto& z : zones) {
    if (z->kind != zonegen::AttackKind::Benign) out.push_back(z->apex);
  }
  return out;
}

std::size_t batch_octets(const PreparedResolution& p) {
  std::size_t n = 0;
  for (const auto& e : p.batch) n += e.stored_octets;
  return n;
}

/// Evenly spaced arrivals within one second, offset by `phase` in [0, 1).
double arrival(std::size_t second, std::size_t i, std::size_t n, double phase) {
  return static_cast<double>(second) + (static_cast<double>(i) + phase) / static_cast<double>(n);
}

struct RunTotals {
  std::uint64_t attacker_misses = 0;
  std::uint64_t attacker_miss_octets = 0;
};

/// The event loop shared by run_experiment and the probe. `benign_count`
/// gives the number of benign arrivals in each second.
template <typename BenignCount>
TimeSeries simulate(Testbed& testbed, const std::vector<Question>& benign, BenignCount benign_count,
                    const AttackerTraffic& attacker, const CostModel& cost, std::size_t duration_s,
                    std::uint64_t seed, bool prewarm, RunTotals* totals = nullptr) {
  AuthServerModel auth(testbed.zones());
  resolver::Resolver resolver(auth, {testbed.cache_capacity(), testbed.mitigations(), testbed.attacker_apexes()});
  if (prewarm && !benign.empty()) resolver.set_cache(testbed.warm_cache(benign));

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(benign.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const double benign_phase = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const double attacker_phase = 0.5;

  const auto attacker_n = static_cast<std::size_t>(std::llround(std::max(0.0, attacker.qps)));
  std::size_t next_benign = 0;
  std::size_t next_attacker = 0;
  std::uint64_t evictions_before = resolver.cache().evictions();

  TimeSeries series;
  series.reserve(duration_s);
  for (std::size_t s = 0; s < duration_s; ++s) {
    SecondStats row;
    row.second = s;
    const std::size_t nb = benign.empty() ? 0 : benign_count(s);
    const std::size_t na = (s >= attacker.onset_second && !attacker.queries.empty()) ? attacker_n : 0;
    row.benign_offered = nb;
    double remaining = cost.resolver_budget;

    std::size_t ib = 0;
    std::size_t ia = 0;
    while (ib < nb || ia < na) {
      const double tb = ib < nb ? arrival(s, ib, nb, benign_phase) : INFINITY;
      const double ta = ia < na ? arrival(s, ia, na, attacker_phase) : INFINITY;
      const bool is_attacker = ta < tb;
      const double now = is_attacker ? ta : tb;
      const Question& q = is_attacker ? attacker.queries[next_attacker++ % attacker.queries.size()]
                                      : benign[order[next_benign++ % order.size()]];
      (is_attacker ? ia : ib)++;
      // Once the budget is gone every later arrival in this second is lost.
      if (remaining <= 0.0) continue;

      PreparedResolution prepared = resolver.prepare(q, now);
      const double c = cost.cost_of(prepared.result, batch_octets(prepared));
      if (c > remaining) {
        remaining = 0.0;
        continue;
      }
      remaining -= c;
      const auto result = resolver.commit(std::move(prepared), now);
      row.validation_attempts += result.validation_attempts;
      if (is_attacker) {
        if (result.status == ResolveStatus::Answer) ++row.attacker_answered;
        if (!result.served_from_cache && totals) {
          ++totals->attacker_misses;
          totals->attacker_miss_octets += result.octets_inserted;
        }
      } else if (result.status == ResolveStatus::Answer) {
        ++row.benign_answered;
      } else if (result.status == ResolveStatus::ServFail) {
        ++row.benign_servfail;
      }
    }
    const auto& cache = resolver.cache();
    row.cache_total_octets = cache.total_octets();
    row.cache_attacker_octets = cache.attacker_octets();
    row.cache_benign_octets = cache.benign_octets();
    row.evictions = cache.evictions() - evictions_before;
    evictions_before = cache.evictions();
    series.push_back(row);
  }
  return series;
}

ExperimentSummary summarize(const TimeSeries& series, const CostModel& cost, std::size_t onset,
                            std::size_t capacity, const RunTotals& totals) {
  ExperimentSummary sum;
  sum.baseline_capacity_qps = cost.baseline_capacity();
  double answered_total = 0.0;
  double share_total = 0.0;
  std::size_t post = 0;
  for (const auto& row : series) {
    sum.validation_attempts += row.validation_attempts;
    if (row.second < onset) continue;
    ++post;
    answered_total += static_cast<double>(row.benign_answered);
    share_total += static_cast<double>(row.cache_attacker_octets) / static_cast<double>(capacity);
    if (row.benign_offered > 0 &&
        static_cast<double>(row.benign_answered) >= 0.99 * static_cast<double>(row.benign_offered)) {
      sum.max_sustained_benign_qps = std::max(sum.max_sustained_benign_qps, static_cast<double>(row.benign_answered));
    }
    if (!sum.time_to_flush &&
        static_cast<double>(row.cache_attacker_octets) >= 0.95 * static_cast<double>(capacity)) {
      sum.time_to_flush = row.second - onset;
    }
  }
  if (post > 0) {
    sum.avg_post_onset_benign_qps = answered_total / static_cast<double>(post);
    sum.mean_attacker_cache_share = share_total / static_cast<double>(post);
  }
  if (totals.attacker_misses > 0) {
    sum.attacker_octets_per_miss =
        static_cast<double>(totals.attacker_miss_octets) / static_cast<double>(totals.attacker_misses);
  }
  sum.capacity_ratio = std::clamp(sum.max_sustained_benign_qps / sum.baseline_capacity_qps, 0.0, 1.0);
  return sum;
}

std::vector<std::shared_ptr<const ZoneBundle>> require_zones(std::vector<std::shared_ptr<const ZoneBundle>> zones) {
  if (zones.empty()) throw Error(ErrorCode::ConfigError, "at least one zone is required");
  for (const auto& z : zones) {
    if (!z) throw Error(ErrorCode::ConfigError, "null zone bundle");
  }
  return zones;
}

}  // namespace

AuthServerModel::AuthServerModel(std::vector<std::shared_ptr<const ZoneBundle>> zones, double latency_ms)
    : zones_(std::move(zones)), latency_ms_(latency_ms) {}

const ZoneBundle* AuthServerModel::bundle_for(const DomainName& name) const {
  const ZoneBundle* best = nullptr;
  for (const auto& z : zones_) {
    if (z->serves(name) && (!best || z->apex.label_count() > best->apex.label_count())) best = z.get();
  }
  return best;
}

std::optional<wire::DnsMessage> AuthServerModel::query(const Question& question) {
  const ZoneBundle* bundle = bundle_for(question.name);
  if (!bundle) return std::nullopt;
  ++served_;
  return bundle->respond(question.name, question.type);
}

std::optional<DomainName> AuthServerModel::zone_of(const DomainName& name) const {
  const ZoneBundle* bundle = bundle_for(name);
  return bundle ? bundle->zone_of(name) : std::nullopt;
}

std::vector<dnssec::DnsKeyRecord> AuthServerModel::trust_anchor(const DomainName& zone) const {
  const ZoneBundle* bundle = bundle_for(zone);
  return bundle ? bundle->parent_keys : std::vector<dnssec::DnsKeyRecord>{};
}

void CostModel::check() const {
  for (const double v : {cache_hit_cost, cache_miss_base_cost, per_validation_attempt_cost, per_kilobyte_insert_cost,
                         resolver_budget}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::ConfigError, "cost model values must be positive");
  }
}

double CostModel::cost_of(const resolver::ResolveResult& result, std::size_t octets_to_insert) const noexcept {
  if (result.served_from_cache) return cache_hit_cost;
  return cache_miss_base_cost + per_validation_attempt_cost * static_cast<double>(result.validation_attempts) +
         per_kilobyte_insert_cost * static_cast<double>(octets_to_insert) / 1024.0;
}

void TrafficProfile::check() const {
  if (benign.start_qps < 0 || benign.end_qps < 0 || attacker.qps < 0) {
    throw Error(ErrorCode::ConfigError, "query rates must be non-negative");
  }
  if (benign.end_qps < benign.start_qps) throw Error(ErrorCode::ConfigError, "benign ramp must not decrease");
  if (benign.ramp_seconds < 0) throw Error(ErrorCode::ConfigError, "ramp_seconds must be non-negative");
  if (benign.end_qps > 0 && benign.queries.empty()) throw Error(ErrorCode::ConfigError, "benign traffic needs queries");
  if (attacker.qps > 0 && attacker.queries.empty()) {
    throw Error(ErrorCode::ConfigError, "attacker traffic needs queries");
  }
}

Testbed::Testbed(std::vector<std::shared_ptr<const ZoneBundle>> zones, resolver::MitigationConfig mitigations,
                 std::size_t cache_capacity, std::vector<DomainName> attacker_apexes)
    : zones_(require_zones(std::move(zones))),
      mitigations_(mitigations),
      cache_capacity_(cache_capacity),
      attacker_apexes_(attacker_apexes.empty() ? default_attacker_apexes(zones_) : std::move(attacker_apexes)) {
  mitigations_.check();
  if (cache_capacity_ == 0) throw Error(ErrorCode::ConfigError, "cache capacity must be positive");
}

const resolver::ResolverCache& Testbed::warm_cache(const std::vector<Question>& queries) {
  if (!warm_ || warmed_for_ != queries) {
    AuthServerModel auth(zones_);
    resolver::Resolver r(auth, {cache_capacity_, mitigations_, attacker_apexes_});
    for (const auto& q : queries) r.resolve(q, 0.0);
    warm_ = r.cache();
    warmed_for_ = queries;
  }
  return *warm_;
}

void Testbed::check_served(const std::vector<Question>& queries, const char* what) const {
  AuthServerModel auth(zones_);
  for (const auto& q : queries) {
    if (!auth.bundle_for(q.name)) {
      throw Error(ErrorCode::ConfigError,
                  std::string(what) + " query " + q.name.to_string() + " names no configured zone");
    }
  }
}

ExperimentResult run_experiment(Testbed& testbed, const TrafficProfile& traffic, const CostModel& cost,
                                std::size_t duration_s, std::uint64_t seed, bool prewarm) {
  cost.check();
  traffic.check();
  if (duration_s == 0) throw Error(ErrorCode::ConfigError, "duration must be at least one second");
  testbed.check_served(traffic.benign.queries, "benign");
  testbed.check_served(traffic.attacker.queries, "attacker");

  const auto& b = traffic.benign;
  const double ramp = b.ramp_seconds > 0 ? b.ramp_seconds : static_cast<double>(std::max<std::size_t>(duration_s - 1, 1));
  const auto count = [&](std::size_t s) {
    const double rate = b.start_qps + (b.end_qps - b.start_qps) * std::min(1.0, static_cast<double>(s) / ramp);
    return static_cast<std::size_t>(std::llround(rate));
  };
  RunTotals totals;
  ExperimentResult out;
  out.series = simulate(testbed, b.queries, count, traffic.attacker, cost, duration_s, seed, prewarm, &totals);
  out.summary = summarize(out.series, cost, traffic.attacker.onset_second, testbed.cache_capacity(), totals);
  return out;
}

ExperimentResult run_experiment(const std::vector<std::shared_ptr<const ZoneBundle>>& zones,
                                const TrafficProfile& traffic, const resolver::MitigationConfig& mitigations,
                                const CostModel& cost, const ExperimentOptions& options) {
  Testbed testbed(zones, mitigations, options.cache_capacity, options.attacker_apexes);
  return run_experiment(testbed, traffic, cost, options.duration_s, options.seed, options.prewarm);
}

ExperimentSummary max_qps_probe(Testbed& testbed, const std::vector<Question>& benign_queries,
                                const AttackerTraffic& attacker, const CostModel& cost, const ProbeOptions& options) {
  cost.check();
  if (benign_queries.empty()) throw Error(ErrorCode::ConfigError, "the probe needs benign queries");
  if (attacker.qps > 0 && attacker.queries.empty()) throw Error(ErrorCode::ConfigError, "attacker traffic needs queries");
  testbed.check_served(benign_queries, "benign");
  testbed.check_served(attacker.queries, "attacker");

  AttackerTraffic from_start = attacker;
  from_start.onset_second = 0;
  const std::size_t duration = options.warmup_s + options.window_s;
  struct Trial {
    bool pass = false;
    double answered_per_s = 0.0;
    RunTotals totals;
  };
  const auto trial = [&](double rate) {
    const auto n = static_cast<std::size_t>(std::llround(rate));
    Trial t;
    const auto series = simulate(
        testbed, benign_queries, [n](std::size_t) { return n; }, from_start, cost, duration, options.seed, true,
        &t.totals);
    std::uint64_t offered = 0;
    std::uint64_t answered = 0;
    for (std::size_t s = options.warmup_s; s < duration; ++s) {
      offered += series[s].benign_offered;
      answered += series[s].benign_answered;
    }
    t.pass = static_cast<double>(answered) >= options.answered_fraction * static_cast<double>(offered);
    t.answered_per_s = static_cast<double>(answered) / static_cast<double>(std::max<std::size_t>(options.window_s, 1));
    return t;
  };

  // Bracketed search: lo always passes (rate 0 trivially does), hi always
  // fails. A failing trial's answered rate is a good guess at capacity, so the
  // next candidate starts there; steps then gallop in whichever direction the
  // trials keep pointing.
  const double baseline = cost.baseline_capacity();
  const double res = std::max(options.resolution_qps, 1.0);
  double lo = 0.0;
  double hi = std::ceil(baseline * 1.05);
  RunTotals best_totals;
  Trial t = trial(hi);
  if (t.pass) {
    lo = hi;
    best_totals = t.totals;
  }
  double up = res;
  double down = res;
  double candidate = std::floor(t.answered_per_s / options.answered_fraction);
  while (hi - lo > res) {
    if (candidate <= lo) candidate = lo + res;
    if (candidate >= hi) candidate = std::floor((lo + hi) / 2.0);
    t = trial(candidate);
    if (t.pass) {
      lo = candidate;
      best_totals = t.totals;
      candidate = lo + up;
      up *= 2.0;
      down = res;
    } else {
      hi = candidate;
      // Repeated failures mean the guess creeps down slowly; force it.
      candidate = std::min(std::floor(t.answered_per_s / options.answered_fraction), hi - down);
      down *= 2.0;
      up = res;
    }
  }
  ExperimentSummary sum;
  sum.baseline_capacity_qps = baseline;
  sum.max_sustained_benign_qps = lo;
  sum.capacity_ratio = std::clamp(lo / baseline, 0.0, 1.0);
  sum.avg_post_onset_benign_qps = lo;
  if (best_totals.attacker_misses > 0) {
    sum.attacker_octets_per_miss =
        static_cast<double>(best_totals.attacker_miss_octets) / static_cast<double>(best_totals.attacker_misses);
  }
  return sum;
}

FlushSummary flush_experiment(const std::shared_ptr<const ZoneBundle>& attack_zone, std::size_t n_attack_domains,
                              std::size_t cache_capacity, const resolver::MitigationConfig& mitigations,
                              const FlushOptions& options) {
  if (!attack_zone) throw Error(ErrorCode::ConfigError, "flush experiment needs an attack zone");
  if (n_attack_domains > std::max<std::size_t>(attack_zone->instance_count, 1)) {
    throw Error(ErrorCode::ConfigError, "attack zone has only " + std::to_string(attack_zone->instance_count) +
                                            " subdomains");
  }
  if (options.attacker_qps <= 0) throw Error(ErrorCode::ConfigError, "attacker_qps must be positive");
  if (options.fill_entry_records == 0 || options.fill_strings_per_record == 0 || options.fill_string_octets == 0 ||
      options.fill_string_octets > 255) {
    throw Error(ErrorCode::ConfigError, "fill entries need records of 1..255-octet strings");
  }

  FlushSummary out;
  out.cache_capacity = cache_capacity;
  out.attack_domains = n_attack_domains;

  // Synthetic benign fill: TXT RRSets of identical shape whose rdata buffers
  // are shared, so even a 2GB cache costs little real memory.
  resolver::ResolverCache cache(cache_capacity, {attack_zone->apex});
  std::vector<wire::RData> fill_rdata;
  for (std::size_t r = 0; r < options.fill_entry_records; ++r) {
    wire::Bytes bytes;
    for (std::size_t chunk = 0; chunk < options.fill_strings_per_record; ++chunk) {
      bytes.push_back(static_cast<std::uint8_t>(options.fill_string_octets));
      for (std::size_t k = 0; k < options.fill_string_octets; ++k) {
        bytes.push_back(static_cast<std::uint8_t>('a' + (r + chunk + k) % 26));
      }
    }
    fill_rdata.emplace_back(std::move(bytes));
  }
  const DomainName fill_apex = DomainName::parse("cache-fill.benign.example.");
  const double target = options.prefill_fraction * static_cast<double>(cache_capacity);
  for (std::size_t i = 0; static_cast<double>(cache.total_octets()) < target; ++i) {
    char label[16];
    std::snprintf(label, sizeof label, "f%07zu", i);
    const DomainName owner = fill_apex.prepend(label);
    std::vector<wire::ResourceRecord> records;
    records.reserve(fill_rdata.size());
    for (const auto& rdata : fill_rdata) records.push_back({owner, wire::RecordType::TXT, wire::kClassIn, 86400, rdata});
    auto entry = resolver::CacheEntry::make({owner, wire::RecordType::TXT}, std::move(records), {}, 0.0);
    if (cache.total_octets() + entry.stored_octets > cache_capacity) break;
    cache.insert(std::move(entry), 0.0);
  }
  out.initial_benign_octets = cache.benign_octets();

  AuthServerModel auth({attack_zone});
  resolver::Resolver r(auth, {cache_capacity, mitigations, {attack_zone->apex}});
  r.set_cache(std::move(cache));
  const auto qtype = options.qtype.value_or(
      attack_zone->kind == zonegen::AttackKind::AnyType ? wire::RecordType::ANY : wire::RecordType::A);
  for (std::size_t j = 0; j < n_attack_domains; ++j) {
    const double now = static_cast<double>(j) / options.attacker_qps;
    const DomainName name = attack_zone->instance_count > 0 ? attack_zone->instance_name(j) : attack_zone->apex;
    out.attacker_octets_inserted += r.resolve({name, qtype}, now).octets_inserted;
    if (!out.domains_to_flush &&
        static_cast<double>(r.cache().attacker_octets()) >= 0.95 * static_cast<double>(cache_capacity)) {
      out.domains_to_flush = j + 1;
      out.time_to_flush_s = static_cast<double>(j + 1) / options.attacker_qps;
    }
  }
  out.final_benign_octets = r.cache().benign_octets();
  out.final_attacker_octets = r.cache().attacker_octets();
  out.benign_survival = out.initial_benign_octets == 0
                            ? 1.0
                            : static_cast<double>(out.final_benign_octets) /
                                  static_cast<double>(out.initial_benign_octets);
  if (n_attack_domains > 0) {
    out.attacker_octets_per_domain =
        static_cast<double>(out.attacker_octets_inserted) / static_cast<double>(n_attack_domains);
  }
  return out;
}

void write_timeseries_csv(const TimeSeries& series, std::ostream& out) {
  out << kTimeSeriesHeader << '\n';
  for (const auto& r : series) {
    out << r.second << ',' << r.benign_offered << ',' << r.benign_answered << ',' << r.benign_servfail << ','
        << r.attacker_answered << ',' << r.cache_total_octets << ',' << r.cache_attacker_octets << ','
        << r.cache_benign_octets << ',' << r.validation_attempts << ',' << r.evictions << '\n';
  }
}

void write_timeseries_csv(const TimeSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  write_timeseries_csv(series, out);
  if (!out) throw Error(ErrorCode::Io, "write failed on " + path.string());
}

TimeSeries read_timeseries_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kTimeSeriesHeader) {
    throw Error(ErrorCode::ParseError, path.string() + ": unexpected CSV header", 1);
  }
  TimeSeries series;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    SecondStats r;
    char comma = 0;
    std::uint64_t* cols[] = {&r.second,           &r.benign_offered,        &r.benign_answered,
                             &r.benign_servfail,  &r.attacker_answered,     &r.cache_total_octets,
                             &r.cache_attacker_octets, &r.cache_benign_octets, &r.validation_attempts,
                             &r.evictions};
    for (std::size_t c = 0; c < std::size(cols); ++c) {
      if (c > 0 && (!(fields >> comma) || comma != ',')) {
        throw Error(ErrorCode::ParseError, path.string() + ": malformed row", line_no);
      }
      if (!(fields >> *cols[c])) throw Error(ErrorCode::ParseError, path.string() + ": non-integer field", line_no);
    }
    series.push_back(r);
  }
  return series;
}

ExperimentSummary summarize_series(const TimeSeries& series, const CostModel& cost, std::size_t onset_second,
                                   std::size_t cache_capacity) {
  cost.check();
  if (cache_capacity == 0) throw Error(ErrorCode::ConfigError, "cache capacity must be positive");
  return summarize(series, cost, onset_second, cache_capacity, {});
}

std::string summary_text(const ExperimentSummary& s) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << "baseline_capacity_qps: " << s.baseline_capacity_qps << '\n'
      << "max_sustained_benign_qps: " << s.max_sustained_benign_qps << '\n'
      << "capacity_ratio: " << s.capacity_ratio << '\n'
      << "time_to_flush_s: " << (s.time_to_flush ? std::to_string(*s.time_to_flush) : "none") << '\n'
      << "avg_post_onset_benign_qps: " << s.avg_post_onset_benign_qps << '\n'
      << "attacker_octets_per_miss: " << s.attacker_octets_per_miss << '\n'
      << "mean_attacker_cache_share: " << s.mean_attacker_cache_share << '\n'
      << "validation_attempts: " << s.validation_attempts << '\n';
  return out.str();
}

}  // namespace siglab::harness
