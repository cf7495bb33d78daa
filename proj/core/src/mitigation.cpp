#include "siglab/mitigation.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "siglab/dnssec.hpp"
#include "siglab/error.hpp"

namespace siglab::resolver {

namespace {

using Field = std::optional<std::size_t> MitigationConfig::*;

constexpr std::array<std::pair<std::string_view, Field>, 5> kFields{{
    {"max_records_per_type", &MitigationConfig::max_records_per_type},
    {"dnskey_limit", &MitigationConfig::dnskey_limit},
    {"rrsig_max_size", &MitigationConfig::rrsig_max_size},
    {"any_aggregate_cap", &MitigationConfig::any_aggregate_cap},
    {"validation_budget", &MitigationConfig::validation_budget},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool tighter_or_equal(const std::optional<std::size_t>& a, const std::optional<std::size_t>& b) {
  if (!a) return !b;
  return !b || *a <= *b;
}

std::optional<std::size_t> limit_for(wire::RecordType type, const MitigationConfig& config) {
  if (type != wire::RecordType::DNSKEY) return config.max_records_per_type;
  if (!config.dnskey_limit) return config.max_records_per_type;
  if (!config.max_records_per_type) return config.dnskey_limit;
  return std::min(*config.dnskey_limit, *config.max_records_per_type);
}

void filter_section(std::vector<wire::ResourceRecord>& section, const MitigationConfig& config,
                    MitigationReport& report) {
  std::unordered_map<wire::RRSetKey, std::size_t, wire::RRSetKeyHash> records_seen;
  std::unordered_map<wire::RRSetKey, std::size_t, wire::RRSetKeyHash> sigs_seen;  // keyed by covered RRSet
  std::vector<wire::ResourceRecord> kept;
  kept.reserve(section.size());
  for (auto& rr : section) {
    const bool is_sig = rr.type == wire::RecordType::RRSIG;
    if (is_sig && config.rrsig_max_size &&
        dnssec::RrsigRecord::signature_size_of(rr) > *config.rrsig_max_size) {
      ++report.dropped_oversize_rrsig;
      continue;
    }
    // RRSIGs are grouped per covered RRSet and share that type's limit.
    const wire::RecordType limited_type = is_sig ? dnssec::RrsigRecord::type_covered_of(rr) : rr.type;
    const auto limit = limit_for(limited_type, config);
    auto& count = (is_sig ? sigs_seen : records_seen)[{rr.owner, limited_type}];
    if (limit && count >= *limit) {
      const bool dnskey_rule = limited_type == wire::RecordType::DNSKEY && config.dnskey_limit &&
                               (!config.max_records_per_type || *config.dnskey_limit < *config.max_records_per_type);
      ++(dnskey_rule ? report.dropped_by_dnskey_limit : report.dropped_by_record_limit);
      continue;
    }
    ++count;
    kept.push_back(std::move(rr));
  }
  section = std::move(kept);
}

}  // namespace

MitigationConfig MitigationConfig::off() {
  MitigationConfig c;
  c.max_records_per_type.reset();
  return c;
}

MitigationConfig MitigationConfig::recommended() {
  MitigationConfig c;
  c.rrsig_max_size = 744;
  c.dnskey_limit = 20;
  return c;
}

void MitigationConfig::check() const {
  for (const auto& [name, field] : kFields) {
    if ((this->*field).has_value() && *(this->*field) == 0) {
      throw Error(ErrorCode::ConfigError, std::string(name) + " must be at least 1");
    }
  }
}

bool MitigationConfig::at_least_as_strict_as(const MitigationConfig& other) const noexcept {
  return std::all_of(kFields.begin(), kFields.end(),
                     [&](const auto& f) { return tighter_or_equal(this->*f.second, other.*f.second); });
}

MitigationConfig parse_mitigation_text(std::string_view text) {
  MitigationConfig config;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected key=value", line_no);
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto field = std::find_if(kFields.begin(), kFields.end(), [&](const auto& f) { return f.first == key; });
    if (field == kFields.end()) {
      throw Error(ErrorCode::ConfigError,
                  "line " + std::to_string(line_no) + ": unknown mitigation '" + std::string(key) + "'", line_no);
    }
    if (value == "none" || value == "off") {
      (config.*(field->second)).reset();
      continue;
    }
    std::size_t n = 0;
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
    if (ec != std::errc{} || end != value.data() + value.size() || n == 0) {
      throw Error(ErrorCode::ConfigError,
                  "line " + std::to_string(line_no) + ": " + std::string(key) + " needs a positive integer or none",
                  line_no);
    }
    config.*(field->second) = n;
  }
  return config;
}

MitigationConfig load_mitigation_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_mitigation_text(buffer.str());
}

std::string to_text(const MitigationConfig& config) {
  std::string out;
  for (const auto& [name, field] : kFields) {
    const auto& v = config.*field;
    out += std::string(name) + "=" + (v ? std::to_string(*v) : "none") + "\n";
  }
  return out;
}

MitigationReport& MitigationReport::operator+=(const MitigationReport& other) noexcept {
  dropped_by_record_limit += other.dropped_by_record_limit;
  dropped_by_dnskey_limit += other.dropped_by_dnskey_limit;
  dropped_oversize_rrsig += other.dropped_oversize_rrsig;
  dropped_by_any_cap += other.dropped_by_any_cap;
  return *this;
}

FilteredResponse apply_mitigations(const wire::DnsMessage& response, const MitigationConfig& config) {
  FilteredResponse out{response, {}};
  // The ANY cap counts positions in the answer as received. Counting after
  // the per-type limits would let a tighter per-type cap pull later, larger
  // records in under the aggregate cap.
  if (response.question.type == wire::RecordType::ANY && config.any_aggregate_cap &&
      out.message.answers.size() > *config.any_aggregate_cap) {
    out.report.dropped_by_any_cap += out.message.answers.size() - *config.any_aggregate_cap;
    out.message.answers.resize(*config.any_aggregate_cap);
  }
  for (auto* section : {&out.message.answers, &out.message.authority, &out.message.additional}) {
    filter_section(*section, config, out.report);
  }
  return out;
}

}  // namespace siglab::resolver
