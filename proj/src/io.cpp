#include "dunkl/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dunkl/errors.hpp"

namespace dunkl {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash(const nlohmann::json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config.dump())));
  return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(fnv1a(content) & 0xffff);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << content;
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& hash,
                     const std::vector<std::string>& columns) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::trunc);
  if (!out_) throw ConfigError("cannot open " + path.string());
  out_ << "# generator: dunkl\n# config_hash: " << hash << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::separator() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

CsvWriter& CsvWriter::operator<<(double value) {
  separator();
  out_ << format_double(value);
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long value) {
  separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& value) {
  separator();
  out_ << value;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_started_ = false;
}

void write_json(const std::filesystem::path& path, nlohmann::json body, const std::string& hash) {
  body["header"] = {{"generator", "dunkl"}, {"config_hash", hash}};
  atomic_write(path, body.dump(2) + "\n");
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace dunkl
