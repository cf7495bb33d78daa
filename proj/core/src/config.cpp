#include "siglab/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "siglab/error.hpp"

namespace siglab::config {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& message) {
  throw Error(ErrorCode::ConfigError, where + ": " + message);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) bad(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) bad(where, "unknown key '" + key + "'");
  }
}

template <typename T>
T get(const json& obj, const std::string& where, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(where + "." + key, e.what());
  }
}

std::size_t get_count(const json& obj, const std::string& where, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) bad(where + "." + key, "expected a non-negative integer");
  return v.get<std::size_t>();
}

double get_rate(const json& obj, const std::string& where, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number() || v.get<double>() < 0) bad(where + "." + key, "expected a non-negative number");
  return v.get<double>();
}

wire::DomainName get_name(const json& obj, const std::string& where, const char* key) {
  const auto text = get<std::string>(obj, where, key, "");
  if (text.empty()) bad(where, std::string("missing '") + key + "'");
  try {
    return wire::DomainName::parse(text);
  } catch (const Error& e) {
    bad(where + "." + key, e.what());
  }
}

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

ZoneSpec parse_zone(const json& z, const std::string& where, const std::filesystem::path& base) {
  only_keys(z, where,
            {"file", "kind", "apex", "instances", "prefix", "names", "target_size", "keys", "sigs", "types", "ns",
             "key_bits"});
  ZoneSpec spec;
  if (z.contains("file")) {
    spec.file = resolve_path(base, get<std::string>(z, where, "file", ""));
    return spec;
  }
  const auto kind_text = get<std::string>(z, where, "kind", "");
  const auto kind = zonegen::attack_kind_from_string(kind_text);
  if (!kind) bad(where + ".kind", "unknown attack kind '" + kind_text + "'");
  spec.kind = *kind;
  spec.apex = get_name(z, where, "apex");
  spec.instances = get_count(z, where, "instances", spec.instances);
  spec.prefix = get<std::string>(z, where, "prefix", spec.prefix);
  spec.names = get_count(z, where, "names", spec.names);
  spec.target_size = get_count(z, where, "target_size", spec.target_size);
  spec.keys = get_count(z, where, "keys", spec.keys);
  spec.sigs = get_count(z, where, "sigs", spec.sigs);
  spec.types = get_count(z, where, "types", spec.types);
  spec.ns = get_count(z, where, "ns", spec.ns);
  spec.key_bits = get_count(z, where, "key_bits", spec.key_bits);
  return spec;
}

QuerySource parse_source(const json& t, const std::string& where, const std::filesystem::path& base) {
  QuerySource src;
  if (t.contains("zone")) src.zone = get_name(t, where, "zone");
  if (t.contains("query_file")) src.query_file = resolve_path(base, get<std::string>(t, where, "query_file", ""));
  if (t.contains("qtype")) {
    const auto text = get<std::string>(t, where, "qtype", "");
    src.qtype = wire::record_type_from_string(text);
    if (!src.qtype) bad(where + ".qtype", "unknown record type '" + text + "'");
  }
  if (t.contains("limit")) src.limit = get_count(t, where, "limit", 0);
  return src;
}

resolver::MitigationConfig parse_mitigations(const json& m) {
  if (m.is_string()) {
    const auto preset = mitigation_preset(m.get<std::string>());
    if (!preset) bad("mitigations", "unknown preset '" + m.get<std::string>() + "'");
    return *preset;
  }
  only_keys(m, "mitigations",
            {"max_records_per_type", "dnskey_limit", "rrsig_max_size", "any_aggregate_cap", "validation_budget"});
  resolver::MitigationConfig c = resolver::MitigationConfig::off();
  const auto field = [&](const char* key, std::optional<std::size_t>& out) {
    if (!m.contains(key) || m.at(key).is_null()) return;
    out = get_count(m, "mitigations", key, 0);
  };
  field("max_records_per_type", c.max_records_per_type);
  field("dnskey_limit", c.dnskey_limit);
  field("rrsig_max_size", c.rrsig_max_size);
  field("any_aggregate_cap", c.any_aggregate_cap);
  field("validation_budget", c.validation_budget);
  c.check();
  return c;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

// Line of every value in already-validated JSON text, keyed by the same
// paths the parser reports in its errors ("zones[0].kind").
std::map<std::string, std::size_t> value_lines(std::string_view text) {
  struct Frame {
    bool array = false;
    std::size_t index = 0;
    std::string key;
    std::string path;
  };
  std::map<std::string, std::size_t> out;
  std::vector<Frame> stack;
  std::size_t line = 1;
  bool expect_key = false;
  const auto here = [&]() -> std::string {
    if (stack.empty()) return "";
    const auto& f = stack.back();
    if (f.array) return f.path + "[" + std::to_string(f.index) + "]";
    return f.path.empty() ? f.key : f.path + "." + f.key;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
    } else if (c == '"') {
      std::string str;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\') ++i;
        if (i < text.size()) str.push_back(text[i]);
      }
      if (expect_key) {
        stack.back().key = str;
        out.emplace(here(), line);
        expect_key = false;
      } else {
        out.emplace(here(), line);
      }
    } else if (c == '{' || c == '[') {
      if (!stack.empty() || i > 0) out.emplace(here(), line);
      stack.push_back({c == '[', 0, "", here()});
      expect_key = c == '{';
    } else if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
    } else if (c == ',') {
      if (!stack.empty()) {
        if (stack.back().array) {
          ++stack.back().index;
        } else {
          expect_key = true;
        }
      }
    } else if (!std::isspace(static_cast<unsigned char>(c)) && c != ':') {
      out.emplace(here(), line);
      while (i + 1 < text.size() && std::string_view(",}] \t\r\n").find(text[i + 1]) == std::string_view::npos) ++i;
    }
  }
  return out;
}

std::size_t line_for_error(const std::map<std::string, std::size_t>& lines, const std::string& what) {
  const auto colon = what.find(": ");
  if (colon == std::string::npos) return 0;
  std::string path = what.substr(0, colon);
  if (path.starts_with("config.")) path.erase(0, 7);
  if (path == "config") path.clear();
  const std::string unknown = "unknown key '";
  if (const auto k = what.find(unknown, colon); k != std::string::npos) {
    const auto name = what.substr(k + unknown.size(), what.find('\'', k + unknown.size()) - k - unknown.size());
    path = path.empty() ? name : path + "." + name;
  }
  while (!path.empty()) {
    if (const auto it = lines.find(path); it != lines.end()) return it->second;
    const auto cut = path.find_last_of(".[");
    path.resize(cut == std::string::npos ? 0 : cut);
  }
  return 0;
}

std::vector<wire::Question> expand(const QuerySource& src, const std::vector<std::shared_ptr<const zonegen::ZoneBundle>>& zones,
                                   const char* what) {
  if (src.query_file) {
    auto qs = zonegen::read_query_file(*src.query_file);
    if (src.limit && qs.size() > *src.limit) qs.resize(*src.limit);
    return qs;
  }
  if (!src.zone) return {};
  const auto it = std::find_if(zones.begin(), zones.end(), [&](const auto& z) { return z->apex == *src.zone; });
  if (it == zones.end()) {
    throw Error(ErrorCode::ConfigError,
                std::string("traffic.") + what + ".zone " + src.zone->to_string() + " is not a configured zone");
  }
  const auto& bundle = **it;
  return zonegen::instance_queries(bundle, src.qtype.value_or(zonegen::default_query_type(bundle.kind)), src.limit);
}

}  // namespace

std::optional<resolver::MitigationConfig> mitigation_preset(std::string_view name) {
  if (name == "off" || name == "none") return resolver::MitigationConfig::off();
  if (name == "default") return resolver::MitigationConfig{};
  if (name == "recommended") return resolver::MitigationConfig::recommended();
  return std::nullopt;
}

namespace {

ExperimentConfig parse_tree(const json& root, const std::filesystem::path& base_dir) {
  only_keys(root, "config",
            {"zones", "traffic", "mitigations", "cost", "cache_capacity_octets", "duration", "seed", "sweep"});

  ExperimentConfig cfg;
  if (!root.contains("zones") || !root.at("zones").is_array() || root.at("zones").empty()) {
    bad("zones", "expected a non-empty array");
  }
  for (std::size_t i = 0; i < root.at("zones").size(); ++i) {
    cfg.zones.push_back(parse_zone(root.at("zones")[i], "zones[" + std::to_string(i) + "]", base_dir));
  }

  if (root.contains("traffic")) {
    const auto& t = root.at("traffic");
    only_keys(t, "traffic", {"benign", "attacker"});
    if (t.contains("benign")) {
      const auto& b = t.at("benign");
      only_keys(b, "traffic.benign", {"zone", "query_file", "qtype", "limit", "start_qps", "end_qps", "ramp_seconds"});
      cfg.benign_source = parse_source(b, "traffic.benign", base_dir);
      cfg.benign.start_qps = get_rate(b, "traffic.benign", "start_qps", 0.0);
      cfg.benign.end_qps = get_rate(b, "traffic.benign", "end_qps", cfg.benign.start_qps);
      cfg.benign.ramp_seconds = get_rate(b, "traffic.benign", "ramp_seconds", 0.0);
    }
    if (t.contains("attacker")) {
      const auto& a = t.at("attacker");
      only_keys(a, "traffic.attacker", {"zone", "query_file", "qtype", "limit", "qps", "onset"});
      cfg.attacker_source = parse_source(a, "traffic.attacker", base_dir);
      cfg.attacker.qps = get_rate(a, "traffic.attacker", "qps", 0.0);
      cfg.attacker.onset_second = get_count(a, "traffic.attacker", "onset", 0);
    }
  }
  if (root.contains("mitigations")) cfg.mitigations = parse_mitigations(root.at("mitigations"));
  if (root.contains("cost")) {
    const auto& c = root.at("cost");
    only_keys(c, "cost",
              {"cache_hit_cost", "cache_miss_base_cost", "per_validation_attempt_cost", "per_kilobyte_insert_cost",
               "resolver_budget"});
    cfg.cost.cache_hit_cost = get_rate(c, "cost", "cache_hit_cost", cfg.cost.cache_hit_cost);
    cfg.cost.cache_miss_base_cost = get_rate(c, "cost", "cache_miss_base_cost", cfg.cost.cache_miss_base_cost);
    cfg.cost.per_validation_attempt_cost =
        get_rate(c, "cost", "per_validation_attempt_cost", cfg.cost.per_validation_attempt_cost);
    cfg.cost.per_kilobyte_insert_cost =
        get_rate(c, "cost", "per_kilobyte_insert_cost", cfg.cost.per_kilobyte_insert_cost);
    cfg.cost.resolver_budget = get_rate(c, "cost", "resolver_budget", cfg.cost.resolver_budget);
    cfg.cost.check();
  }
  cfg.cache_capacity_octets = get_count(root, "config", "cache_capacity_octets", cfg.cache_capacity_octets);
  if (cfg.cache_capacity_octets == 0) bad("cache_capacity_octets", "must be positive");
  cfg.duration = get_count(root, "config", "duration", cfg.duration);
  if (cfg.duration == 0) bad("duration", "must be at least 1");
  cfg.seed = get_count(root, "config", "seed", 0);
  if (root.contains("sweep")) {
    const auto& s = root.at("sweep");
    only_keys(s, "sweep", {"attacker_qps"});
    if (!s.contains("attacker_qps") || !s.at("attacker_qps").is_array()) bad("sweep", "expected attacker_qps array");
    for (const auto& v : s.at("attacker_qps")) {
      if (!v.is_number() || v.get<double>() < 0) bad("sweep.attacker_qps", "rates must be non-negative numbers");
      cfg.sweep_attacker_qps.push_back(v.get<double>());
    }
  }
  return cfg;
}

}  // namespace

ExperimentConfig parse_experiment_json(std::string_view text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t line = line_of(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorCode::ConfigError, "line " + std::to_string(line) + ": " + e.what(), line);
  }
  try {
    return parse_tree(root, base_dir);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConfigError || e.line() != 0) throw;
    const std::size_t line = line_for_error(value_lines(text), e.what());
    if (line == 0) throw;
    throw Error(ErrorCode::ConfigError, "line " + std::to_string(line) + ": " + e.what(), line);
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_json(buffer.str(), path.parent_path());
}

std::shared_ptr<const zonegen::ZoneBundle> build_zone(const ZoneSpec& spec, std::uint64_t seed) {
  if (spec.file) return std::make_shared<const zonegen::ZoneBundle>(zonegen::load_zone_file(*spec.file));
  zonegen::GenOptions opt;
  opt.instances = spec.instances;
  opt.prefix = spec.prefix;
  opt.seed = seed;
  using zonegen::AttackKind;
  switch (spec.kind) {
    case AttackKind::Benign:
      return std::make_shared<const zonegen::ZoneBundle>(zonegen::gen_benign_zone(spec.apex, spec.names, seed));
    case AttackKind::BaitAndSwitch:
      return std::make_shared<const zonegen::ZoneBundle>(
          zonegen::gen_bait_switch_zone(spec.apex, spec.target_size, opt));
    case AttackKind::MultiRsa:
      return std::make_shared<const zonegen::ZoneBundle>(zonegen::gen_multi_rsa_zone(spec.apex, spec.keys, opt));
    case AttackKind::AnyType:
      return std::make_shared<const zonegen::ZoneBundle>(
          zonegen::gen_any_zone(spec.apex, spec.types, spec.sigs, opt));
    case AttackKind::KeyTrap:
      return std::make_shared<const zonegen::ZoneBundle>(
          zonegen::gen_keytrap_zone(spec.apex, spec.keys, spec.sigs, opt, spec.key_bits));
    case AttackKind::NsCacheFlush:
      return std::make_shared<const zonegen::ZoneBundle>(zonegen::gen_ns_cacheflush_zone(spec.apex, spec.ns, opt));
  }
  throw Error(ErrorCode::ConfigError, "unhandled attack kind");
}

Materialized materialize(const ExperimentConfig& config) {
  Materialized out;
  std::set<wire::DomainName> apexes;
  for (const auto& spec : config.zones) {
    auto bundle = build_zone(spec, config.seed);
    if (!apexes.insert(bundle->apex).second) {
      throw Error(ErrorCode::ConfigError, "zone " + bundle->apex.to_string() + " is configured twice");
    }
    out.zones.push_back(std::move(bundle));
  }
  out.traffic.benign = config.benign;
  out.traffic.benign.queries = expand(config.benign_source, out.zones, "benign");
  out.traffic.attacker = config.attacker;
  out.traffic.attacker.queries = expand(config.attacker_source, out.zones, "attacker");
  out.traffic.check();
  return out;
}

}  // namespace siglab::config
