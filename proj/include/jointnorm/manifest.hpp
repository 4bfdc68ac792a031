#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace jointnorm {

/// Flat `key=value` run record, one entry per line, keys sorted.
class Manifest {
public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  /// Throws DataError when the key is missing or not a number.
  double number(const std::string& key) const;
  long long integer(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

  void write(const std::filesystem::path& path) const;
  static Manifest read(const std::filesystem::path& path);

private:
  std::map<std::string, std::string> entries_;
};

} // namespace jointnorm
