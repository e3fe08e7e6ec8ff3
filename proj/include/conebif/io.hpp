#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conebif/cone_geometry.hpp"
#include "conebif/grid.hpp"

namespace conebif::io {

/// 17 significant digits, so files are exact and reproducible.
std::string number(double x);

/// Writes `j` with a "config_hash" member added, pretty-printed.
void write_json(const std::filesystem::path& path, nlohmann::json j, const std::string& hash);

/// CSV table with a leading "# config_hash=..." comment line.
class Csv {
 public:
  Csv(std::string hash, std::vector<std::string> columns);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);
  void save(const std::filesystem::path& path) const;
  const std::string& text() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

/// Rows (s, theta, value) in storage order.
void write_field_csv(const std::filesystem::path& path, const Field& f, const std::string& hash);
void write_profile_csv(const std::filesystem::path& path, const AngularProfile& p, const std::string& hash);

}  // namespace conebif::io
