#include "revival/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>

#include "revival/errors.hpp"

namespace revival {

namespace {

constexpr std::array<const char*, 28> keys{
    "w0_um",        "L_mm",          "lambda_p_nm",     "d_cm",      "r_mm",
    "sigma_r_mm",   "delta_l",       "delta_l_turb",    "delta_p_per_mm", "z_min_cm",
    "z_max_cm",     "z_points",      "n_theta",         "n_radial",  "ensemble",
    "seed",         "workers",       "frames",          "pair_rate", "background_rate",
    "qe",           "width",         "height",          "pixel_um",  "magnification",
    "strip_height", "sectors",       "z_mm"};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

bool Config::known_key(const std::string& key) {
  return std::any_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; });
}

Config Config::parse(std::istream& in, const std::string& source) {
  Config cfg;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(number);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (cfg.values_.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in, path.string());
}

std::optional<double> Config::optional_number(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  const std::string& text = it->second;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("key '" + key + "' is not a number: '" + text + "'");
  return value;
}

double Config::number(const std::string& key) const {
  const auto v = optional_number(key);
  if (!v) throw ConfigError("missing config key '" + key + "'");
  return *v;
}

double Config::number_or(const std::string& key, double fallback) const {
  return optional_number(key).value_or(fallback);
}

void Config::set(const std::string& key, const std::string& value) {
  if (!known_key(key)) throw ConfigError("unknown key '" + key + "'");
  values_[key] = value;
}

}  // namespace revival
