#include "conebif/io.hpp"

#include <cstdio>
#include <fstream>

#include "conebif/error.hpp"

namespace conebif::io {

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {
void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}
}  // namespace

void write_json(const std::filesystem::path& path, nlohmann::json j, const std::string& hash) {
  j["config_hash"] = hash;
  write_text(path, j.dump(2) + "\n");
}

Csv::Csv(std::string hash, std::vector<std::string> columns) : columns_(columns.size()) {
  text_ = "# config_hash=" + hash + "\n";
  for (std::size_t k = 0; k < columns.size(); ++k) text_ += (k ? "," : "") + columns[k];
  text_ += "\n";
}

void Csv::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(number(v));
  row(cells);
}

void Csv::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("Csv::row: wrong number of cells");
  for (std::size_t k = 0; k < cells.size(); ++k) text_ += (k ? "," : "") + cells[k];
  text_ += "\n";
}

void Csv::save(const std::filesystem::path& path) const { write_text(path, text_); }

void write_field_csv(const std::filesystem::path& path, const Field& f, const std::string& hash) {
  Csv csv(hash, {"s", "theta", "value"});
  const Grid& g = *f.grid;
  for (int i = 0; i < g.n_s(); ++i)
    for (int j = 0; j < g.n_theta(); ++j) csv.row(std::vector<double>{g.s(i), g.theta(j), f(i, j)});
  csv.save(path);
}

void write_profile_csv(const std::filesystem::path& path, const AngularProfile& p, const std::string& hash) {
  Csv csv(hash, {"theta", "value"});
  for (std::size_t j = 0; j < p.theta.size(); ++j) csv.row(std::vector<double>{p.theta[j], p.values[j]});
  csv.save(path);
}

}  // namespace conebif::io
