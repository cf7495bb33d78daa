#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "siglab/cache.hpp"
#include "siglab/dnssec.hpp"
#include "siglab/mitigation.hpp"
#include "siglab/wire.hpp"

namespace siglab::resolver {

/// What the resolver can reach upstream: authoritative answers, the zone cut
/// for a name, and the trust anchor that signs that zone's DS RRSet.
class Upstream {
 public:
  virtual ~Upstream() = default;
  virtual std::optional<wire::DnsMessage> query(const wire::Question& question) = 0;
  virtual std::optional<wire::DomainName> zone_of(const wire::DomainName& name) const = 0;
  /// Empty for unsigned zones.
  virtual std::vector<dnssec::DnsKeyRecord> trust_anchor(const wire::DomainName& zone) const = 0;
};

enum class ResolveStatus { Answer, ServFail, Refused };
std::string_view to_string(ResolveStatus status) noexcept;

struct ResolveResult {
  ResolveStatus status = ResolveStatus::Answer;
  bool served_from_cache = false;
  std::size_t upstream_fetches = 0;
  std::size_t validation_attempts = 0;
  std::size_t octets_inserted = 0;
  std::size_t evictions = 0;
  MitigationReport mitigation;
};

/// Work done by a cache miss before anything touches the cache; the harness
/// prices it first and only then decides whether to commit it.
struct PreparedResolution {
  ResolveResult result;
  std::vector<CacheEntry> batch;
};

struct ResolverOptions {
  std::size_t cache_capacity = kDefaultCacheOctets;
  MitigationConfig mitigations;
  std::vector<wire::DomainName> attacker_apexes;
};

class Resolver {
 public:
  Resolver(Upstream& upstream, ResolverOptions options);

  ResolveResult resolve(const wire::Question& question, double now);

  /// Cache hit, or the full upstream/validation pass for a miss. A hit is
  /// returned with served_from_cache set and an empty batch.
  PreparedResolution prepare(const wire::Question& question, double now);
  /// Inserts a prepared miss atomically and fills in octets and evictions.
  ResolveResult commit(PreparedResolution prepared, double now);

  ResolverCache& cache() noexcept { return cache_; }
  const ResolverCache& cache() const noexcept { return cache_; }
  const MitigationConfig& mitigations() const noexcept { return options_.mitigations; }
  void set_cache(ResolverCache cache) { cache_ = std::move(cache); }

 private:
  Upstream& upstream_;
  ResolverOptions options_;
  ResolverCache cache_;
};

}  // namespace siglab::resolver
