#include "perifem/output.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <system_error>

#include "perifem/errors.hpp"

namespace perifem {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw Error("cannot create directory " + target.parent_path().string());
  }

  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw Error("cannot open " + tmp.string() + ": " + std::strerror(errno));
  const size_t written = std::fwrite(content.data(), 1, content.size(), f);
  const bool flushed = std::fflush(f) == 0;
  std::fclose(f);
  if (written != content.size() || !flushed) {
    fs::remove(tmp, ec);
    throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot rename " + tmp.string() + " to " + target.string());
  }
}

void KeyValueBlock::add(const std::string& key, const std::string& value) {
  entries.emplace_back(key, value);
}

void KeyValueBlock::add(const std::string& key, double value) {
  entries.emplace_back(key, format_double(value));
}

void KeyValueBlock::add(const std::string& key, long long value) {
  entries.emplace_back(key, std::to_string(value));
}

std::string KeyValueBlock::to_string() const {
  std::string out;
  for (const auto& [k, v] : entries) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

} // namespace perifem
