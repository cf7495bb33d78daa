#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace siglab::wire {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline constexpr std::size_t kMaxLabelOctets = 63;
inline constexpr std::size_t kMaxNameOctets = 255;
inline constexpr std::size_t kMaxMessageOctets = 65535;
inline constexpr std::size_t kMaxRdataOctets = 65535;
inline constexpr std::size_t kHeaderOctets = 12;
inline constexpr std::size_t kRecordFixedOctets = 10;  // type, class, ttl, rdlength
inline constexpr std::uint16_t kClassIn = 1;

/// An absolute domain name. Labels are stored as given; comparison, ordering
/// and hashing are ASCII case-insensitive.
class DomainName {
 public:
  DomainName() = default;  // the root
  explicit DomainName(std::vector<std::string> labels);

  /// Parses presentation text ("example.com." or "example.com"); "." or ""
  /// is the root. Throws LabelTooLong / NameTooLong.
  static DomainName parse(std::string_view text);

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  bool is_root() const noexcept { return labels_.empty(); }
  std::size_t label_count() const noexcept { return labels_.size(); }

  /// Octets of the uncompressed wire encoding, terminal zero included.
  std::size_t wire_size() const noexcept;

  std::string to_string() const;
  DomainName lowercased() const;

  /// Name with the leftmost label removed; the root stays the root.
  DomainName parent() const;
  /// New name with `label` prepended.
  DomainName prepend(std::string_view label) const;

  bool is_subdomain_of(const DomainName& ancestor) const noexcept;
  /// Replaces the `from` suffix with `to`; returns nullopt when `from` is not
  /// a suffix of this name.
  std::optional<DomainName> rebase(const DomainName& from, const DomainName& to) const;

  friend bool operator==(const DomainName& a, const DomainName& b) noexcept;
  friend std::strong_ordering operator<=>(const DomainName& a, const DomainName& b) noexcept;

 private:
  std::vector<std::string> labels_;
};

struct DomainNameHash {
  std::size_t operator()(const DomainName& name) const noexcept;
};

enum class RecordType : std::uint16_t {
  A = 1,
  NS = 2,
  SOA = 6,
  MX = 15,
  TXT = 16,
  DS = 43,
  RRSIG = 46,
  DNSKEY = 48,
  ANY = 255,
};

std::optional<RecordType> record_type_from_code(std::uint16_t code) noexcept;
std::optional<RecordType> record_type_from_string(std::string_view text) noexcept;
std::string_view to_string(RecordType type) noexcept;
inline std::uint16_t code(RecordType type) noexcept { return static_cast<std::uint16_t>(type); }

/// Immutable, cheaply copyable octet string. Copies share one buffer; the
/// simulator relies on this to keep thousands of cached 64KB forged
/// signatures at the cost of one.
class RData {
 public:
  RData();
  explicit RData(Bytes bytes);
  RData(std::initializer_list<std::uint8_t> bytes) : RData(Bytes(bytes)) {}

  /// The tail of `whole` from `offset` on, sharing its buffer.
  static RData tail_of(const RData& whole, std::size_t offset);

  ByteView bytes() const noexcept { return {buffer_->data() + offset_, size_}; }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  bool shares_buffer_with(const RData& other) const noexcept { return buffer_ == other.buffer_; }

  friend bool operator==(const RData& a, const RData& b) noexcept;

 private:
  std::shared_ptr<const Bytes> buffer_;
  std::size_t offset_ = 0;
  std::size_t size_ = 0;
};

struct ResourceRecord {
  DomainName owner;
  RecordType type = RecordType::A;
  std::uint16_t rclass = kClassIn;
  std::uint32_t ttl = 0;
  RData rdata;

  friend bool operator==(const ResourceRecord&, const ResourceRecord&) = default;
};

struct RRSetKey {
  DomainName owner;
  RecordType type = RecordType::A;

  friend bool operator==(const RRSetKey&, const RRSetKey&) = default;
  friend std::strong_ordering operator<=>(const RRSetKey& a, const RRSetKey& b) noexcept;
};

struct RRSetKeyHash {
  std::size_t operator()(const RRSetKey& key) const noexcept;
};

inline RRSetKey key_of(const ResourceRecord& rr) { return {rr.owner, rr.type}; }

enum class Rcode : std::uint8_t { NoError = 0, FormErr = 1, ServFail = 2, NxDomain = 3, Refused = 5 };

struct MessageFlags {
  bool response = false;
  bool authoritative = false;
  bool truncated = false;
  bool recursion_desired = false;
  bool recursion_available = false;
  // Stands in for an EDNS0 OPT record advertising a 65,535-octet payload;
  // carried in the header Z bit.
  bool large_responses = false;
  Rcode rcode = Rcode::NoError;

  friend bool operator==(const MessageFlags&, const MessageFlags&) = default;
};

struct Question {
  DomainName name;
  RecordType type = RecordType::A;

  friend bool operator==(const Question&, const Question&) = default;
};

enum class Section { Answer, Authority, Additional };

struct DnsMessage {
  std::uint16_t id = 0;
  MessageFlags flags;
  Question question;
  std::vector<ResourceRecord> answers;
  std::vector<ResourceRecord> authority;
  std::vector<ResourceRecord> additional;

  std::vector<ResourceRecord>& section(Section s);
  const std::vector<ResourceRecord>& section(Section s) const;
  std::size_t record_count() const noexcept {
    return answers.size() + authority.size() + additional.size();
  }

  friend bool operator==(const DnsMessage&, const DnsMessage&) = default;
};

// Names.
Bytes encode_name(const DomainName& name);
void append_name(Bytes& out, const DomainName& name);
/// Decodes a possibly compressed name at `offset`; returns the name and the
/// offset just past it in the original stream. Compression pointers must
/// point strictly backwards.
std::pair<DomainName, std::size_t> decode_name(ByteView bytes, std::size_t offset);

// Records.
std::size_t record_wire_size(const ResourceRecord& rr) noexcept;
void append_record(Bytes& out, const ResourceRecord& rr);
Bytes encode_record(const ResourceRecord& rr);

// Messages.
std::size_t question_wire_size(const Question& q) noexcept;
/// Exact encoded size; additive because the encoder never compresses.
std::size_t message_wire_size(const DnsMessage& msg) noexcept;
Bytes encode_message(const DnsMessage& msg);
DnsMessage decode_message(ByteView bytes);

// .dnsdump files: repeated [2-octet big-endian length][message].
void write_dump(const std::filesystem::path& path, std::span<const DnsMessage> messages);
std::vector<DnsMessage> read_dump(const std::filesystem::path& path);

// Big-endian helpers shared by the rdata codecs.
void put_u16(Bytes& out, std::uint16_t v);
void put_u32(Bytes& out, std::uint32_t v);
std::uint16_t get_u16(ByteView bytes, std::size_t offset);
std::uint32_t get_u32(ByteView bytes, std::size_t offset);

}  // namespace siglab::wire
