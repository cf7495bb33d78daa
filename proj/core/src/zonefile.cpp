// Master-file dialect used for generated zones.
//
//   # comment
//   @kind bait-and-switch
//   @apex atk.example.
//   @parent atk.example.
//   @instances attack- 10000 delegated
//   @window 1700000000 1800000000
//   @anchor <DNSKEY record line>      trust-anchor key of the parent zone
//   <owner> <ttl> IN <TYPE> <rdata>
//
// A, NS and MX rdata use presentation format; everything else is written as
// RFC 3597 generic rdata ("\# <len> <hex>") since forged signatures have no
// sensible presentation form.

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "siglab/error.hpp"
#include "siglab/zonegen.hpp"

namespace siglab::zonegen {

namespace {

using wire::Bytes;

constexpr std::string_view kHex = "0123456789abcdef";

std::string hex(wire::ByteView bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (const auto b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  }
  return out;
}

std::string rdata_text(const ResourceRecord& rr) {
  const auto data = rr.rdata.bytes();
  switch (rr.type) {
    case RecordType::A:
      if (data.size() == 4) {
        return std::to_string(data[0]) + "." + std::to_string(data[1]) + "." + std::to_string(data[2]) + "." +
               std::to_string(data[3]);
      }
      break;
    case RecordType::NS: {
      auto [name, next] = wire::decode_name(data, 0);
      if (next == data.size()) return name.to_string();
      break;
    }
    case RecordType::MX:
      if (data.size() > 2) {
        auto [name, next] = wire::decode_name(data, 2);
        if (next == data.size()) return std::to_string(wire::get_u16(data, 0)) + " " + name.to_string();
      }
      break;
    default: break;
  }
  return "\\# " + std::to_string(data.size()) + (data.empty() ? "" : " " + hex(data));
}

std::string record_line(const ResourceRecord& rr) {
  return rr.owner.to_string() + " " + std::to_string(rr.ttl) + " IN " + std::string(wire::to_string(rr.type)) + " " +
         rdata_text(rr);
}

[[noreturn]] void fail(std::size_t line, const std::string& message) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + message, line);
}

template <typename T>
T parse_number(std::string_view text, std::size_t line, const char* what) {
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) fail(line, std::string("bad ") + what + " '" + std::string(text) + "'");
  return value;
}

DomainName parse_name(std::string_view text, std::size_t line) {
  try {
    return DomainName::parse(text);
  } catch (const Error& e) {
    fail(line, e.what());
  }
}

Bytes parse_hex(std::string_view text, std::size_t line) {
  if (text.size() % 2 != 0) fail(line, "odd-length hex rdata");
  Bytes out(text.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto a = kHex.find(static_cast<char>(std::tolower(static_cast<unsigned char>(text[2 * i]))));
    const auto b = kHex.find(static_cast<char>(std::tolower(static_cast<unsigned char>(text[2 * i + 1]))));
    if (a == std::string_view::npos || b == std::string_view::npos) fail(line, "invalid hex digit in rdata");
    out[i] = static_cast<std::uint8_t>(a << 4 | b);
  }
  return out;
}

// "#" opens a comment only at the start of a field, so the "\#" generic
// rdata marker survives.
std::string_view strip_comment(std::string_view line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) return line.substr(0, i);
  }
  return line;
}

std::vector<std::string_view> split(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

ResourceRecord parse_record(std::span<const std::string_view> f, std::size_t line) {
  if (f.size() < 5) fail(line, "expected '<owner> <ttl> IN <type> <rdata>'");
  ResourceRecord rr;
  rr.owner = parse_name(f[0], line);
  rr.ttl = parse_number<std::uint32_t>(f[1], line, "ttl");
  if (f[2] != "IN" && f[2] != "in") fail(line, "only class IN is supported");
  const auto type = wire::record_type_from_string(f[3]);
  if (!type || *type == RecordType::ANY) fail(line, "unknown record type '" + std::string(f[3]) + "'");
  rr.type = *type;
  const auto rdata = f.subspan(4);

  if (rdata[0] == "\\#") {
    if (rdata.size() < 2) fail(line, "generic rdata needs a length");
    const auto len = parse_number<std::size_t>(rdata[1], line, "rdata length");
    std::string joined;
    for (const auto part : rdata.subspan(2)) joined += part;
    Bytes bytes = parse_hex(joined, line);
    if (bytes.size() != len) fail(line, "rdata length does not match hex data");
    if (bytes.size() > wire::kMaxRdataOctets) fail(line, "rdata exceeds 65,535 octets");
    rr.rdata = wire::RData(std::move(bytes));
    return rr;
  }

  Bytes bytes;
  switch (rr.type) {
    case RecordType::A: {
      if (rdata.size() != 1) fail(line, "A rdata must be one dotted quad");
      std::string_view text = rdata[0];
      for (int part = 0; part < 4; ++part) {
        const auto dot = part < 3 ? text.find('.') : text.size();
        if (dot == std::string_view::npos) fail(line, "malformed IPv4 address");
        bytes.push_back(parse_number<std::uint8_t>(text.substr(0, dot), line, "address octet"));
        text = dot < text.size() ? text.substr(dot + 1) : std::string_view{};
      }
      break;
    }
    case RecordType::NS:
      if (rdata.size() != 1) fail(line, "NS rdata must be one name");
      bytes = wire::encode_name(parse_name(rdata[0], line));
      break;
    case RecordType::MX:
      if (rdata.size() != 2) fail(line, "MX rdata must be '<preference> <exchange>'");
      wire::put_u16(bytes, parse_number<std::uint16_t>(rdata[0], line, "preference"));
      wire::append_name(bytes, parse_name(rdata[1], line));
      break;
    default: fail(line, std::string(wire::to_string(rr.type)) + " rdata must use the \\# generic form");
  }
  rr.rdata = wire::RData(std::move(bytes));
  return rr;
}

}  // namespace

std::string emit_zone_text(const ZoneBundle& bundle) {
  std::ostringstream out;
  out << "# siglab zone\n";
  out << "@kind " << to_string(bundle.kind) << '\n';
  out << "@apex " << bundle.apex.to_string() << '\n';
  out << "@parent " << bundle.parent_zone.to_string() << '\n';
  if (bundle.instance_count > 0) {
    out << "@instances " << bundle.instance_prefix << ' ' << bundle.instance_count << ' '
        << (bundle.layout == InstanceLayout::Delegated ? "delegated" : "leaf") << '\n';
  }
  out << "@window " << bundle.window.inception << ' ' << bundle.window.expiration << '\n';
  for (const auto& key : bundle.parent_keys) out << "@anchor " << record_line(key.to_record(kDefaultTtl)) << '\n';
  for (const auto& rr : bundle.all_records()) out << record_line(rr) << '\n';
  return out.str();
}

void emit_zone_file(const ZoneBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << emit_zone_text(bundle);
  if (!out) throw Error(ErrorCode::Io, "write failed on " + path.string());
}

ZoneBundle parse_zone_text(std::string_view text) {
  ZoneBundle b;
  std::optional<DomainName> apex;
  std::optional<DomainName> parent;
  std::vector<ResourceRecord> records;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    line = strip_comment(line);
    const auto f = split(line);
    if (f.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    if (f[0] == "@kind") {
      if (f.size() != 2) fail(line_no, "@kind takes one argument");
      const auto kind = attack_kind_from_string(f[1]);
      if (!kind) fail(line_no, "unknown attack kind '" + std::string(f[1]) + "'");
      b.kind = *kind;
    } else if (f[0] == "@apex") {
      if (f.size() != 2) fail(line_no, "@apex takes one argument");
      apex = parse_name(f[1], line_no);
    } else if (f[0] == "@parent") {
      if (f.size() != 2) fail(line_no, "@parent takes one argument");
      parent = parse_name(f[1], line_no);
    } else if (f[0] == "@instances") {
      if (f.size() != 4) fail(line_no, "@instances takes '<prefix> <count> <leaf|delegated>'");
      b.instance_prefix = std::string(f[1]);
      b.instance_count = parse_number<std::size_t>(f[2], line_no, "instance count");
      if (f[3] == "leaf") {
        b.layout = InstanceLayout::Leaf;
      } else if (f[3] == "delegated") {
        b.layout = InstanceLayout::Delegated;
      } else {
        fail(line_no, "instance layout must be leaf or delegated");
      }
    } else if (f[0] == "@window") {
      if (f.size() != 3) fail(line_no, "@window takes '<inception> <expiration>'");
      b.window.inception = parse_number<std::uint32_t>(f[1], line_no, "inception");
      b.window.expiration = parse_number<std::uint32_t>(f[2], line_no, "expiration");
    } else if (f[0] == "@anchor") {
      const auto rr = parse_record(std::span(f).subspan(1), line_no);
      if (rr.type != RecordType::DNSKEY) fail(line_no, "@anchor must carry a DNSKEY record");
      try {
        b.parent_keys.push_back(dnssec::DnsKeyRecord::from_record(rr));
      } catch (const Error& e) {
        fail(line_no, e.what());
      }
    } else if (f[0].starts_with('@')) {
      fail(line_no, "unknown directive '" + std::string(f[0]) + "'");
    } else {
      records.push_back(parse_record(f, line_no));
      if (records.back().type == RecordType::RRSIG) {
        try {
          (void)RrsigRecord::from_record(records.back());
        } catch (const Error& e) {
          fail(line_no, e.what());
        }
      }
    }
    if (eol == text.size()) break;
  }

  if (!apex) apex = records.empty() ? DomainName{} : records.front().owner;
  b.apex = *apex;
  b.parent_zone = parent.value_or(b.layout == InstanceLayout::Leaf ? b.apex.parent() : b.apex);

  for (const auto& rr : records) {
    if (rr.type == RecordType::RRSIG) {
      auto sig = RrsigRecord::from_record(rr);
      b.rrsets[{rr.owner, sig.type_covered}].sigs.push_back(std::move(sig));
    } else {
      b.rrsets[{rr.owner, rr.type}].records.push_back(rr);
    }
  }
  if (const auto it = b.rrsets.find({b.template_zone(), RecordType::DNSKEY}); it != b.rrsets.end()) {
    for (const auto& rr : it->second.records) b.keys.push_back(dnssec::DnsKeyRecord::from_record(rr));
  }
  b.finalize();
  return b;
}

ZoneBundle load_zone_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_zone_text(buffer.str());
}

}  // namespace siglab::zonegen
