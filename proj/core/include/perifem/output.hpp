#pragma once

#include <string>
#include <vector>

namespace perifem {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

/// Write content to path atomically (temp file in the same directory,
/// fsync'd rename). Creates parent directories as needed.
void atomic_write_file(const std::string& path, const std::string& content);

/// Key=value summary block, one entry per line.
struct KeyValueBlock {
  std::vector<std::pair<std::string, std::string>> entries;
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, long long value);
  std::string to_string() const;
};

} // namespace perifem
