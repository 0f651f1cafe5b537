#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace mdlab::io {

using json = nlohmann::json;

// One named float64 block inside a .bin file. Blocks are concatenated in the
// order listed; the sidecar records names, per-block shapes, and byte offsets.
struct NamedField {
  std::string name;
  const double* data = nullptr;
  std::vector<std::size_t> shape;

  std::size_t count() const {
    std::size_t c = 1;
    for (auto s : shape) c *= s;
    return c;
  }
};

// Writes base.bin (raw little-endian float64, row-major) and base.json
// (sidecar: dtype, field names/shapes/offsets, plus caller metadata).
void write_field_file(const std::string& base_path, const std::vector<NamedField>& fields,
                      const json& metadata);

struct FieldFile {
  json metadata;
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> fields;
  std::map<std::string, std::vector<std::size_t>> shapes;

  const std::vector<double>& at(const std::string& name) const;
};

FieldFile read_field_file(const std::string& base_path);

void write_json(const std::string& path, const json& j);
json read_json(const std::string& path);

// CSV with a fixed header; one flush per row so partial runs stay readable.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::size_t ncols_;
  std::ofstream out_;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  int column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

void ensure_dir(const std::string& path);
bool file_exists(const std::string& path);

}  // namespace mdlab::io
