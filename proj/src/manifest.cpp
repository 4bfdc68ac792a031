#include "jointnorm/manifest.hpp"

#include "jointnorm/io.hpp"

#include <charconv>
#include <fstream>

namespace jointnorm {

void Manifest::set(const std::string& key, const std::string& value) {
  if (key.empty() || key.find_first_of("=\n") != std::string::npos ||
      value.find('\n') != std::string::npos)
    throw ConfigError("manifest entries must be single-line key=value");
  entries_[key] = value;
}

void Manifest::set(const std::string& key, double value) {
  set(key, format_double(value));
}

void Manifest::set(const std::string& key, long long value) {
  set(key, std::to_string(value));
}

std::optional<std::string> Manifest::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

double Manifest::number(const std::string& key) const {
  const auto text = get(key);
  if (!text) throw DataError("manifest is missing '" + key + "'");
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
  if (ec != std::errc() || ptr != text->data() + text->size())
    throw DataError("manifest value for '" + key + "' is not a number");
  return v;
}

long long Manifest::integer(const std::string& key) const {
  const auto text = get(key);
  if (!text) throw DataError("manifest is missing '" + key + "'");
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
  if (ec != std::errc() || ptr != text->data() + text->size())
    throw DataError("manifest value for '" + key + "' is not an integer");
  return v;
}

void Manifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& [key, value] : entries_) out << key << '=' << value << '\n';
}

Manifest Manifest::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  Manifest m;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw DataError(path.string() + ": malformed manifest line '" + line + "'");
    m.entries_[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return m;
}

} // namespace jointnorm
