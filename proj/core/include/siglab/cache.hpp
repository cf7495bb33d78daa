#pragma once

#include <cstddef>
#include <cstdint>
#include <list>
#include <span>
#include <unordered_map>
#include <vector>

#include "siglab/wire.hpp"

namespace siglab::resolver {

inline constexpr std::size_t kDefaultCacheOctets = std::size_t{100} << 20;

struct CacheEntry {
  wire::RRSetKey key;
  std::vector<wire::ResourceRecord> records;
  std::vector<wire::ResourceRecord> sigs;
  std::size_t stored_octets = 0;
  double expires_at = 0.0;
  double last_used = 0.0;
  bool attacker = false;  // set by the cache from its apex list

  /// Builds an entry, computing stored_octets and expiry from the minimum TTL.
  static CacheEntry make(wire::RRSetKey key, std::vector<wire::ResourceRecord> records,
                         std::vector<wire::ResourceRecord> sigs, double now);
};

/// Byte-bounded LRU cache of RRSets with attacker/benign attribution.
class ResolverCache {
 public:
  explicit ResolverCache(std::size_t capacity_octets = kDefaultCacheOctets,
                         std::vector<wire::DomainName> attacker_apexes = {});
  // Copies rebuild the index so a warmed cache can seed many simulations.
  ResolverCache(const ResolverCache& other);
  ResolverCache& operator=(const ResolverCache& other);
  ResolverCache(ResolverCache&&) noexcept = default;
  ResolverCache& operator=(ResolverCache&&) noexcept = default;

  /// Inserts or replaces one entry, evicting least-recently-used entries
  /// until the total fits. Throws EntryTooLarge for entries over capacity.
  std::vector<wire::RRSetKey> insert(CacheEntry entry, double now);
  /// All-or-nothing insert of one resolution's RRSets. Returns false and
  /// changes nothing when the batch cannot fit even in an empty cache.
  bool insert_batch(std::vector<CacheEntry> batch, double now, std::vector<wire::RRSetKey>* evicted = nullptr);

  /// Hit refreshes recency; an expired entry is removed and reported as a miss.
  const CacheEntry* lookup(const wire::DomainName& owner, wire::RecordType type, double now);
  const CacheEntry* lookup(const wire::RRSetKey& key, double now) { return lookup(key.owner, key.type, now); }
  bool contains(const wire::RRSetKey& key) const;

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t total_octets() const noexcept { return total_; }
  std::size_t attacker_octets() const noexcept { return attacker_; }
  std::size_t benign_octets() const noexcept { return total_ - attacker_; }
  std::size_t size() const noexcept { return index_.size(); }
  std::uint64_t evictions() const noexcept { return evictions_; }

  bool is_attacker(const wire::DomainName& owner) const;
  /// Recomputes every octet sum from scratch and checks it against the
  /// running counters and the capacity.
  bool audit() const;
  void clear();

 private:
  using Lru = std::list<CacheEntry>;  // front = most recently used

  // The index points at each entry's own key (list nodes never move), and
  // lookups go through KeyRef so a hit never copies a name.
  struct KeyRef {
    const wire::DomainName* owner;
    wire::RecordType type;
  };
  struct IndexHash {
    using is_transparent = void;
    std::size_t operator()(const wire::RRSetKey* k) const noexcept { return (*this)(KeyRef{&k->owner, k->type}); }
    std::size_t operator()(const KeyRef& k) const noexcept;
  };
  struct IndexEq {
    using is_transparent = void;
    static bool same(const KeyRef& a, const KeyRef& b) noexcept { return a.type == b.type && *a.owner == *b.owner; }
    static KeyRef ref(const wire::RRSetKey* k) noexcept { return {&k->owner, k->type}; }
    static KeyRef ref(const KeyRef& k) noexcept { return k; }
    template <typename A, typename B>
    bool operator()(const A& a, const B& b) const noexcept {
      return same(ref(a), ref(b));
    }
  };

  void erase(Lru::iterator it);
  void evict_until_fits(std::size_t incoming, std::span<const wire::RRSetKey> protect,
                        std::vector<wire::RRSetKey>* evicted);

  std::size_t capacity_;
  std::vector<wire::DomainName> attacker_apexes_;
  Lru lru_;
  std::unordered_map<const wire::RRSetKey*, Lru::iterator, IndexHash, IndexEq> index_;
  std::size_t total_ = 0;
  std::size_t attacker_ = 0;
  std::uint64_t evictions_ = 0;
};

}  // namespace siglab::resolver
