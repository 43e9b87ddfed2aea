#include "cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mwg::cli {

namespace {

struct KeyDefault {
  const char* key;
  const char* value;  // nullptr: no default
};

constexpr KeyDefault kKeys[] = {
    {"target.kind", "normal_iid"},
    {"target.d", "20"},
    {"target.rho", "0"},
    {"target.nu", "50"},
    {"kernel.kind", "rwm"},
    {"kernel.c", "1"},
    {"theory.I", nullptr},
    {"theory.K", nullptr},
    {"theory.l_min", "0"},
    {"theory.l_max", "5"},
    {"theory.l_points", "101"},
    {"theory.l_values", nullptr},
    {"cost.a", nullptr},
    {"cost.b", nullptr},
    {"sweep.points", "50"},
    {"sweep.iterations", "100000"},
    {"sweep.replicates", "1"},
    {"sweep.sigma2_min", nullptr},
    {"sweep.sigma2_max", nullptr},
    {"tune.target_accept", nullptr},
    {"tune.budget", "200000"},
    {"tune.initial_l", "1"},
    {"mixing.ds", "10,20,40"},
    {"mixing.steps_per_d", nullptr},
    {"run.seed", "1"},
    {"run.threads", "0"},
};

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key, "expected a number, got '" + text + "'");
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ConfigError(key, "expected a non-negative integer, got '" + text + "'");
  return v;
}

}  // namespace

const std::vector<std::string>& RunConfig::known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& e : kKeys) k.emplace_back(e.key);
    return k;
  }();
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError(key, "unknown key");
  values_[key] = value;
}

RunConfig RunConfig::parse_text(const std::string& text) {
  RunConfig cfg;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    const auto& obj = doc.contains("config") ? doc.at("config") : doc;
    if (!obj.is_object()) throw ConfigError("config", "expected an object of key/value strings");
    for (const auto& [k, v] : obj.items()) cfg.set(k, v.is_string() ? v.get<std::string>() : v.dump());
    return cfg;
  }
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

std::optional<std::string> RunConfig::raw(const std::string& key) const {
  if (auto it = values_.find(key); it != values_.end()) return it->second;
  for (const auto& e : kKeys)
    if (key == e.key && e.value) return std::string(e.value);
  return std::nullopt;
}

std::string RunConfig::get_string(const std::string& key) const {
  auto v = raw(key);
  if (!v) throw ConfigError(key, "required but not set");
  return *v;
}

double RunConfig::get_double(const std::string& key) const { return parse_double(key, get_string(key)); }

std::uint64_t RunConfig::get_u64(const std::string& key) const { return parse_u64(key, get_string(key)); }

std::optional<double> RunConfig::find_double(const std::string& key) const {
  if (auto v = raw(key)) return parse_double(key, *v);
  return std::nullopt;
}

std::vector<std::size_t> RunConfig::get_size_list(const std::string& key) const {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(get_string(key))) out.push_back(parse_u64(key, item));
  if (out.empty()) throw ConfigError(key, "expected a comma-separated list");
  return out;
}

std::vector<double> RunConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get_string(key))) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError(key, "expected a comma-separated list");
  return out;
}

TargetSpec RunConfig::target() const {
  TargetSpec spec;
  const auto kind = parse_target_kind(get_string("target.kind"));
  if (!kind) throw ConfigError("target.kind", "expected one of normal_iid, laplace_iid, exchangeable_normal, student_t");
  spec.kind = *kind;
  spec.d = get_u64("target.d");
  if (spec.d < 1) throw ConfigError("target.d", "must be positive");
  spec.rho = get_double("target.rho");
  if (!(spec.rho >= 0.0 && spec.rho < 1.0)) throw ConfigError("target.rho", "must lie in [0, 1)");
  if ((spec.kind == TargetKind::normal_iid || spec.kind == TargetKind::laplace_iid) && spec.rho != 0.0)
    throw ConfigError("target.rho", "product targets have no correlation; use exchangeable_normal or student_t");
  spec.nu = get_double("target.nu");
  if (!(spec.nu > 0.0)) throw ConfigError("target.nu", "must be positive");
  return spec;
}

Algorithm RunConfig::kernel_kind() const {
  const auto kind = parse_algorithm(get_string("kernel.kind"));
  if (!kind) throw ConfigError("kernel.kind", "expected rwm or mala");
  return *kind;
}

double RunConfig::kernel_c() const {
  const double c = get_double("kernel.c");
  if (!(c > 0.0 && c <= 1.0)) throw ConfigError("kernel.c", "must lie in (0, 1]");
  return c;
}

unsigned RunConfig::threads() const { return static_cast<unsigned>(get_u64("run.threads")); }

std::map<std::string, std::string> RunConfig::resolved() const {
  std::map<std::string, std::string> out;
  for (const auto& e : kKeys) {
    if (std::string_view(e.key) == "run.threads") continue;
    if (auto v = raw(e.key)) out.emplace(e.key, *v);
  }
  return out;
}

}  // namespace mwg::cli
