#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace dunkl {

// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

std::uint64_t fnv1a(std::string_view data);

// 16 hex digits of the FNV-1a hash of the canonical JSON dump.
std::string config_hash(const nlohmann::json& config);

// Writes to a temporary sibling and renames it into place.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// CSV output with a '#' comment header carrying the config hash.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& hash, const std::vector<std::string>& columns);

  CsvWriter& operator<<(double value);
  CsvWriter& operator<<(long long value);
  CsvWriter& operator<<(int value) { return *this << static_cast<long long>(value); }
  CsvWriter& operator<<(std::size_t value) { return *this << static_cast<long long>(value); }
  CsvWriter& operator<<(const std::string& value);
  void end_row();

 private:
  void separator();

  std::ofstream out_;
  bool row_started_ = false;
};

// Adds {"header": {"generator", "config_hash"}} and writes atomically.
void write_json(const std::filesystem::path& path, nlohmann::json body, const std::string& hash);

nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace dunkl
