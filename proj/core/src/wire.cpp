#include "siglab/wire.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <iterator>

#include "siglab/error.hpp"

namespace siglab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::LabelTooLong: return "LabelTooLong";
    case ErrorCode::NameTooLong: return "NameTooLong";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::PointerLoop: return "PointerLoop";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::MessageTooLarge: return "MessageTooLarge";
    case ErrorCode::UnsupportedSize: return "UnsupportedSize";
    case ErrorCode::MixedRRSet: return "MixedRRSet";
    case ErrorCode::UnknownAlgorithmKey: return "UnknownAlgorithmKey";
    case ErrorCode::TargetTooSmall: return "TargetTooSmall";
    case ErrorCode::TooManyKeys: return "TooManyKeys";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EntryTooLarge: return "EntryTooLarge";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace siglab

namespace siglab::wire {

namespace {

// DNS case folding is ASCII-only, whatever the locale says.
inline unsigned char fold(unsigned char c) noexcept {
  return (c >= 'A' && c <= 'Z') ? static_cast<unsigned char>(c + ('a' - 'A')) : c;
}

int compare_label(std::string_view a, std::string_view b) noexcept {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto ca = fold(static_cast<unsigned char>(a[i]));
    const auto cb = fold(static_cast<unsigned char>(b[i]));
    if (ca != cb) return ca < cb ? -1 : 1;
  }
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

void check_name(const std::vector<std::string>& labels) {
  std::size_t total = 1;
  for (const auto& label : labels) {
    if (label.empty()) throw Error(ErrorCode::MalformedRecord, "empty label in domain name");
    if (label.size() > kMaxLabelOctets) {
      throw Error(ErrorCode::LabelTooLong, "label exceeds 63 octets: " + label.substr(0, 16) + "...");
    }
    total += 1 + label.size();
  }
  if (total > kMaxNameOctets) {
    throw Error(ErrorCode::NameTooLong, "name encoding exceeds 255 octets");
  }
}

void need(ByteView bytes, std::size_t offset, std::size_t count) {
  if (offset > bytes.size() || bytes.size() - offset < count) {
    throw Error(ErrorCode::Truncated, "message truncated at offset " + std::to_string(offset));
  }
}

}  // namespace

DomainName::DomainName(std::vector<std::string> labels) : labels_(std::move(labels)) {
  check_name(labels_);
}

DomainName DomainName::parse(std::string_view text) {
  std::vector<std::string> labels;
  if (text.empty() || text == ".") return DomainName{};
  if (text.back() == '.') text.remove_suffix(1);
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto dot = text.find('.', start);
    const auto end = dot == std::string_view::npos ? text.size() : dot;
    labels.emplace_back(text.substr(start, end - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return DomainName(std::move(labels));
}

std::size_t DomainName::wire_size() const noexcept {
  std::size_t n = 1;
  for (const auto& label : labels_) n += 1 + label.size();
  return n;
}

std::string DomainName::to_string() const {
  if (labels_.empty()) return ".";
  std::string out;
  for (const auto& label : labels_) {
    out += label;
    out += '.';
  }
  return out;
}

DomainName DomainName::lowercased() const {
  DomainName out = *this;
  for (auto& label : out.labels_) {
    std::transform(label.begin(), label.end(), label.begin(),
                   [](char c) { return static_cast<char>(fold(static_cast<unsigned char>(c))); });
  }
  return out;
}

DomainName DomainName::parent() const {
  if (labels_.empty()) return {};
  DomainName out;
  out.labels_.assign(labels_.begin() + 1, labels_.end());
  return out;
}

DomainName DomainName::prepend(std::string_view label) const {
  std::vector<std::string> labels;
  labels.reserve(labels_.size() + 1);
  labels.emplace_back(label);
  labels.insert(labels.end(), labels_.begin(), labels_.end());
  return DomainName(std::move(labels));
}

bool DomainName::is_subdomain_of(const DomainName& ancestor) const noexcept {
  if (ancestor.labels_.size() > labels_.size()) return false;
  const std::size_t skip = labels_.size() - ancestor.labels_.size();
  for (std::size_t i = 0; i < ancestor.labels_.size(); ++i) {
    if (compare_label(labels_[skip + i], ancestor.labels_[i]) != 0) return false;
  }
  return true;
}

std::optional<DomainName> DomainName::rebase(const DomainName& from, const DomainName& to) const {
  if (!is_subdomain_of(from)) return std::nullopt;
  std::vector<std::string> labels(labels_.begin(),
                                  labels_.begin() + static_cast<std::ptrdiff_t>(labels_.size() - from.labels_.size()));
  labels.insert(labels.end(), to.labels_.begin(), to.labels_.end());
  return DomainName(std::move(labels));
}

bool operator==(const DomainName& a, const DomainName& b) noexcept {
  if (a.labels_.size() != b.labels_.size()) return false;
  for (std::size_t i = 0; i < a.labels_.size(); ++i) {
    if (compare_label(a.labels_[i], b.labels_[i]) != 0) return false;
  }
  return true;
}

std::strong_ordering operator<=>(const DomainName& a, const DomainName& b) noexcept {
  // Canonical DNS order: compare from the rightmost label.
  auto ia = a.labels_.rbegin();
  auto ib = b.labels_.rbegin();
  for (; ia != a.labels_.rend() && ib != b.labels_.rend(); ++ia, ++ib) {
    const int c = compare_label(*ia, *ib);
    if (c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return a.labels_.size() <=> b.labels_.size();
}

std::size_t DomainNameHash::operator()(const DomainName& name) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (const auto& label : name.labels()) {
    for (const char c : label) {
      h ^= fold(static_cast<unsigned char>(c));
      h *= 1099511628211ull;
    }
    h ^= 0x2e;
    h *= 1099511628211ull;
  }
  return h;
}

std::strong_ordering operator<=>(const RRSetKey& a, const RRSetKey& b) noexcept {
  if (auto c = a.owner <=> b.owner; c != 0) return c;
  return code(a.type) <=> code(b.type);
}

std::size_t RRSetKeyHash::operator()(const RRSetKey& key) const noexcept {
  return DomainNameHash{}(key.owner) * 31u + code(key.type);
}

namespace {

constexpr std::array<std::pair<RecordType, std::string_view>, 9> kTypeNames{{
    {RecordType::A, "A"},
    {RecordType::NS, "NS"},
    {RecordType::SOA, "SOA"},
    {RecordType::MX, "MX"},
    {RecordType::TXT, "TXT"},
    {RecordType::DS, "DS"},
    {RecordType::RRSIG, "RRSIG"},
    {RecordType::DNSKEY, "DNSKEY"},
    {RecordType::ANY, "ANY"},
}};

}  // namespace

std::optional<RecordType> record_type_from_code(std::uint16_t value) noexcept {
  for (const auto& [type, name] : kTypeNames) {
    if (code(type) == value) return type;
  }
  return std::nullopt;
}

std::optional<RecordType> record_type_from_string(std::string_view text) noexcept {
  for (const auto& [type, name] : kTypeNames) {
    if (text.size() == name.size() &&
        std::equal(text.begin(), text.end(), name.begin(),
                   [](char a, char b) { return std::toupper(static_cast<unsigned char>(a)) == b; })) {
      return type;
    }
  }
  return std::nullopt;
}

std::string_view to_string(RecordType type) noexcept {
  for (const auto& [t, name] : kTypeNames) {
    if (t == type) return name;
  }
  return "TYPE?";
}

namespace {
const std::shared_ptr<const Bytes>& empty_buffer() {
  static const auto buffer = std::make_shared<const Bytes>();
  return buffer;
}
}  // namespace

RData::RData() : buffer_(empty_buffer()) {}

RData::RData(Bytes bytes) : buffer_(std::make_shared<const Bytes>(std::move(bytes))), size_(buffer_->size()) {
  if (size_ > kMaxRdataOctets) {
    throw Error(ErrorCode::MalformedRecord, "rdata exceeds 65,535 octets");
  }
}

RData RData::tail_of(const RData& whole, std::size_t offset) {
  if (offset > whole.size_) throw Error(ErrorCode::MalformedRecord, "rdata slice past the end");
  RData out = whole;
  out.offset_ += offset;
  out.size_ -= offset;
  return out;
}

bool operator==(const RData& a, const RData& b) noexcept {
  const auto x = a.bytes();
  const auto y = b.bytes();
  return (a.buffer_ == b.buffer_ && a.offset_ == b.offset_ && a.size_ == b.size_) ||
         std::equal(x.begin(), x.end(), y.begin(), y.end());
}

std::vector<ResourceRecord>& DnsMessage::section(Section s) {
  switch (s) {
    case Section::Answer: return answers;
    case Section::Authority: return authority;
    case Section::Additional: break;
  }
  return additional;
}

const std::vector<ResourceRecord>& DnsMessage::section(Section s) const {
  return const_cast<DnsMessage*>(this)->section(s);
}

void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(Bytes& out, std::uint32_t v) {
  put_u16(out, static_cast<std::uint16_t>(v >> 16));
  put_u16(out, static_cast<std::uint16_t>(v));
}

std::uint16_t get_u16(ByteView bytes, std::size_t offset) {
  need(bytes, offset, 2);
  return static_cast<std::uint16_t>((bytes[offset] << 8) | bytes[offset + 1]);
}

std::uint32_t get_u32(ByteView bytes, std::size_t offset) {
  return (std::uint32_t{get_u16(bytes, offset)} << 16) | get_u16(bytes, offset + 2);
}

void append_name(Bytes& out, const DomainName& name) {
  for (const auto& label : name.labels()) {
    out.push_back(static_cast<std::uint8_t>(label.size()));
    out.insert(out.end(), label.begin(), label.end());
  }
  out.push_back(0);
}

Bytes encode_name(const DomainName& name) {
  Bytes out;
  out.reserve(name.wire_size());
  append_name(out, name);
  return out;
}

std::pair<DomainName, std::size_t> decode_name(ByteView bytes, std::size_t offset) {
  std::vector<std::string> labels;
  std::size_t total = 1;
  std::size_t pos = offset;
  std::optional<std::size_t> resume;
  for (;;) {
    need(bytes, pos, 1);
    const std::uint8_t len = bytes[pos];
    if ((len & 0xC0) == 0xC0) {
      need(bytes, pos, 2);
      const std::size_t target = ((len & 0x3F) << 8) | bytes[pos + 1];
      if (target >= pos) {
        throw Error(ErrorCode::PointerLoop,
                    "compression pointer at " + std::to_string(pos) + " does not point backwards");
      }
      if (!resume) resume = pos + 2;
      pos = target;
      continue;
    }
    if ((len & 0xC0) != 0) {
      throw Error(ErrorCode::MalformedRecord, "unsupported label type at " + std::to_string(pos));
    }
    if (len == 0) {
      ++pos;
      break;
    }
    need(bytes, pos + 1, len);
    total += 1 + len;
    if (total > kMaxNameOctets) throw Error(ErrorCode::NameTooLong, "decoded name exceeds 255 octets");
    labels.emplace_back(reinterpret_cast<const char*>(bytes.data() + pos + 1), len);
    pos += 1 + len;
  }
  return {DomainName(std::move(labels)), resume.value_or(pos)};
}

std::size_t record_wire_size(const ResourceRecord& rr) noexcept {
  return rr.owner.wire_size() + kRecordFixedOctets + rr.rdata.size();
}

void append_record(Bytes& out, const ResourceRecord& rr) {
  append_name(out, rr.owner);
  put_u16(out, code(rr.type));
  put_u16(out, rr.rclass);
  put_u32(out, rr.ttl);
  put_u16(out, static_cast<std::uint16_t>(rr.rdata.size()));
  const auto data = rr.rdata.bytes();
  out.insert(out.end(), data.begin(), data.end());
}

Bytes encode_record(const ResourceRecord& rr) {
  Bytes out;
  out.reserve(record_wire_size(rr));
  append_record(out, rr);
  return out;
}

std::size_t question_wire_size(const Question& q) noexcept { return q.name.wire_size() + 4; }

std::size_t message_wire_size(const DnsMessage& msg) noexcept {
  std::size_t n = kHeaderOctets + question_wire_size(msg.question);
  for (const auto* sec : {&msg.answers, &msg.authority, &msg.additional}) {
    for (const auto& rr : *sec) n += record_wire_size(rr);
  }
  return n;
}

namespace {

std::uint16_t pack_flags(const MessageFlags& f) {
  std::uint16_t v = 0;
  if (f.response) v |= 0x8000;
  if (f.authoritative) v |= 0x0400;
  if (f.truncated) v |= 0x0200;
  if (f.recursion_desired) v |= 0x0100;
  if (f.recursion_available) v |= 0x0080;
  if (f.large_responses) v |= 0x0040;
  v |= static_cast<std::uint16_t>(f.rcode) & 0x000F;
  return v;
}

MessageFlags unpack_flags(std::uint16_t v) {
  MessageFlags f;
  f.response = v & 0x8000;
  f.authoritative = v & 0x0400;
  f.truncated = v & 0x0200;
  f.recursion_desired = v & 0x0100;
  f.recursion_available = v & 0x0080;
  f.large_responses = v & 0x0040;
  f.rcode = static_cast<Rcode>(v & 0x000F);
  return f;
}

ResourceRecord decode_record(ByteView bytes, std::size_t& pos) {
  auto [owner, next] = decode_name(bytes, pos);
  need(bytes, next, kRecordFixedOctets);
  const std::uint16_t type_code = get_u16(bytes, next);
  const auto type = record_type_from_code(type_code);
  if (!type || *type == RecordType::ANY) {
    throw Error(ErrorCode::MalformedRecord, "unsupported record type " + std::to_string(type_code));
  }
  ResourceRecord rr;
  rr.owner = std::move(owner);
  rr.type = *type;
  rr.rclass = get_u16(bytes, next + 2);
  rr.ttl = get_u32(bytes, next + 4);
  const std::uint16_t rdlength = get_u16(bytes, next + 8);
  next += kRecordFixedOctets;
  if (bytes.size() - next < rdlength) {
    throw Error(ErrorCode::MalformedRecord, "rdata runs past end of message");
  }
  rr.rdata = RData(Bytes(bytes.begin() + static_cast<std::ptrdiff_t>(next),
                         bytes.begin() + static_cast<std::ptrdiff_t>(next + rdlength)));
  pos = next + rdlength;
  return rr;
}

}  // namespace

Bytes encode_message(const DnsMessage& msg) {
  const std::size_t size = message_wire_size(msg);
  if (size > kMaxMessageOctets) {
    throw Error(ErrorCode::MessageTooLarge,
                "message of " + std::to_string(size) + " octets exceeds 65,535");
  }
  Bytes out;
  out.reserve(size);
  put_u16(out, msg.id);
  put_u16(out, pack_flags(msg.flags));
  put_u16(out, 1);
  put_u16(out, static_cast<std::uint16_t>(msg.answers.size()));
  put_u16(out, static_cast<std::uint16_t>(msg.authority.size()));
  put_u16(out, static_cast<std::uint16_t>(msg.additional.size()));
  append_name(out, msg.question.name);
  put_u16(out, code(msg.question.type));
  put_u16(out, kClassIn);
  for (const auto* sec : {&msg.answers, &msg.authority, &msg.additional}) {
    for (const auto& rr : *sec) append_record(out, rr);
  }
  return out;
}

DnsMessage decode_message(ByteView bytes) {
  need(bytes, 0, kHeaderOctets);
  DnsMessage msg;
  msg.id = get_u16(bytes, 0);
  msg.flags = unpack_flags(get_u16(bytes, 2));
  const std::uint16_t qdcount = get_u16(bytes, 4);
  const std::array<std::uint16_t, 3> counts{get_u16(bytes, 6), get_u16(bytes, 8), get_u16(bytes, 10)};
  if (qdcount != 1) {
    throw Error(ErrorCode::CountMismatch, "expected exactly one question, header says " + std::to_string(qdcount));
  }
  std::size_t pos = kHeaderOctets;
  auto [qname, next] = decode_name(bytes, pos);
  need(bytes, next, 4);
  const auto qtype = record_type_from_code(get_u16(bytes, next));
  if (!qtype) throw Error(ErrorCode::MalformedRecord, "unsupported question type");
  msg.question = {std::move(qname), *qtype};
  pos = next + 4;

  constexpr std::array<Section, 3> sections{Section::Answer, Section::Authority, Section::Additional};
  for (std::size_t s = 0; s < sections.size(); ++s) {
    auto& out = msg.section(sections[s]);
    out.reserve(counts[s]);
    for (std::uint16_t i = 0; i < counts[s]; ++i) {
      if (pos == bytes.size()) {
        throw Error(ErrorCode::CountMismatch, "header claims more records than present");
      }
      out.push_back(decode_record(bytes, pos));
    }
  }
  if (pos != bytes.size()) {
    throw Error(ErrorCode::CountMismatch, "trailing octets after the last counted record");
  }
  return msg;
}

void write_dump(const std::filesystem::path& path, std::span<const DnsMessage> messages) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  for (const auto& msg : messages) {
    const Bytes encoded = encode_message(msg);
    Bytes frame;
    put_u16(frame, static_cast<std::uint16_t>(encoded.size()));
    out.write(reinterpret_cast<const char*>(frame.data()), 2);
    out.write(reinterpret_cast<const char*>(encoded.data()), static_cast<std::streamsize>(encoded.size()));
  }
  if (!out) throw Error(ErrorCode::Io, "write failed on " + path.string());
}

std::vector<DnsMessage> read_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  const Bytes data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::vector<DnsMessage> messages;
  std::size_t pos = 0;
  while (pos < data.size()) {
    const ByteView view(data);
    const std::uint16_t len = get_u16(view, pos);
    need(view, pos + 2, len);
    messages.push_back(decode_message(view.subspan(pos + 2, len)));
    pos += 2 + len;
  }
  return messages;
}

}  // namespace siglab::wire
