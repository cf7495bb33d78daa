#include "siglab/cache.hpp"

#include <algorithm>
#include <limits>

#include "siglab/error.hpp"

namespace siglab::resolver {

CacheEntry CacheEntry::make(wire::RRSetKey key, std::vector<wire::ResourceRecord> records,
                            std::vector<wire::ResourceRecord> sigs, double now) {
  CacheEntry e;
  e.key = std::move(key);
  std::uint32_t ttl = std::numeric_limits<std::uint32_t>::max();
  for (const auto* list : {&records, &sigs}) {
    for (const auto& rr : *list) {
      e.stored_octets += wire::record_wire_size(rr);
      ttl = std::min(ttl, rr.ttl);
    }
  }
  if (records.empty() && sigs.empty()) ttl = 0;
  e.records = std::move(records);
  e.sigs = std::move(sigs);
  e.expires_at = now + static_cast<double>(ttl);
  e.last_used = now;
  return e;
}

ResolverCache::ResolverCache(std::size_t capacity_octets, std::vector<wire::DomainName> attacker_apexes)
    : capacity_(capacity_octets), attacker_apexes_(std::move(attacker_apexes)) {}

ResolverCache::ResolverCache(const ResolverCache& other)
    : capacity_(other.capacity_),
      attacker_apexes_(other.attacker_apexes_),
      lru_(other.lru_),
      total_(other.total_),
      attacker_(other.attacker_),
      evictions_(other.evictions_) {
  index_.reserve(lru_.size());
  for (auto it = lru_.begin(); it != lru_.end(); ++it) index_.emplace(&it->key, it);
}

ResolverCache& ResolverCache::operator=(const ResolverCache& other) {
  if (this != &other) {
    ResolverCache copy(other);
    *this = std::move(copy);
  }
  return *this;
}

bool ResolverCache::is_attacker(const wire::DomainName& owner) const {
  return std::any_of(attacker_apexes_.begin(), attacker_apexes_.end(),
                     [&](const wire::DomainName& apex) { return owner.is_subdomain_of(apex); });
}

void ResolverCache::erase(Lru::iterator it) {
  total_ -= it->stored_octets;
  if (it->attacker) attacker_ -= it->stored_octets;
  index_.erase(&it->key);
  lru_.erase(it);
}

void ResolverCache::evict_until_fits(std::size_t incoming, std::span<const wire::RRSetKey> protect,
                                     std::vector<wire::RRSetKey>* evicted) {
  auto it = lru_.end();
  while (total_ + incoming > capacity_ && it != lru_.begin()) {
    --it;
    if (std::find(protect.begin(), protect.end(), it->key) != protect.end()) continue;
    if (evicted) evicted->push_back(it->key);
    ++evictions_;
    auto victim = it++;
    erase(victim);
  }
}

std::vector<wire::RRSetKey> ResolverCache::insert(CacheEntry entry, double now) {
  if (entry.stored_octets > capacity_) {
    throw Error(ErrorCode::EntryTooLarge, "entry of " + std::to_string(entry.stored_octets) +
                                              " octets exceeds cache capacity " + std::to_string(capacity_));
  }
  std::vector<wire::RRSetKey> evicted;
  std::vector<CacheEntry> one;
  one.push_back(std::move(entry));
  insert_batch(std::move(one), now, &evicted);
  return evicted;
}

bool ResolverCache::insert_batch(std::vector<CacheEntry> batch, double now, std::vector<wire::RRSetKey>* evicted) {
  std::size_t incoming = 0;
  std::vector<wire::RRSetKey> keys;
  keys.reserve(batch.size());
  for (const auto& e : batch) {
    incoming += e.stored_octets;
    keys.push_back(e.key);
  }
  if (incoming > capacity_) return false;

  // Replaced entries leave first so they never count against the batch.
  for (const auto& key : keys) {
    if (const auto it = index_.find(&key); it != index_.end()) erase(it->second);
  }
  evict_until_fits(incoming, keys, evicted);
  for (auto& e : batch) {
    if (const auto it = index_.find(&e.key); it != index_.end()) erase(it->second);  // repeated key in batch
    e.last_used = now;
    e.attacker = is_attacker(e.key.owner);
    total_ += e.stored_octets;
    if (e.attacker) attacker_ += e.stored_octets;
    lru_.push_front(std::move(e));
    index_.emplace(&lru_.front().key, lru_.begin());
  }
  return true;
}

std::size_t ResolverCache::IndexHash::operator()(const KeyRef& k) const noexcept {
  return wire::DomainNameHash{}(*k.owner) * 31u + wire::code(k.type);
}

const CacheEntry* ResolverCache::lookup(const wire::DomainName& owner, wire::RecordType type, double now) {
  const auto it = index_.find(KeyRef{&owner, type});
  if (it == index_.end()) return nullptr;
  if (it->second->expires_at <= now) {
    erase(it->second);
    return nullptr;
  }
  it->second->last_used = now;
  lru_.splice(lru_.begin(), lru_, it->second);
  return &*it->second;
}

bool ResolverCache::contains(const wire::RRSetKey& key) const { return index_.contains(&key); }

bool ResolverCache::audit() const {
  std::size_t total = 0;
  std::size_t attacker = 0;
  for (const auto& e : lru_) {
    std::size_t octets = 0;
    for (const auto& rr : e.records) octets += wire::record_wire_size(rr);
    for (const auto& rr : e.sigs) octets += wire::record_wire_size(rr);
    if (octets != e.stored_octets) return false;
    if (e.attacker != is_attacker(e.key.owner)) return false;
    total += octets;
    if (e.attacker) attacker += octets;
  }
  return total == total_ && attacker == attacker_ && total_ <= capacity_ && index_.size() == lru_.size();
}

void ResolverCache::clear() {
  lru_.clear();
  index_.clear();
  total_ = 0;
  attacker_ = 0;
}

}  // namespace siglab::resolver
