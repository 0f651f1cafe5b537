#include "mdlab/io.hpp"

#include <bit>
#include <filesystem>
#include <sstream>
#include <stdexcept>

namespace mdlab::io {

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; big-endian hosts unsupported");
static_assert(sizeof(double) == 8);

void write_field_file(const std::string& base_path, const std::vector<NamedField>& fields,
                      const json& metadata) {
  std::ofstream bin(base_path + ".bin", std::ios::binary | std::ios::trunc);
  if (!bin) throw std::runtime_error("cannot open for write: " + base_path + ".bin");

  json sidecar;
  sidecar["dtype"] = "float64";
  sidecar["byte_order"] = "little";
  sidecar["layout"] = "row-major";
  sidecar["metadata"] = metadata;
  json field_list = json::array();
  std::size_t offset = 0;
  for (const auto& f : fields) {
    bin.write(reinterpret_cast<const char*>(f.data),
              static_cast<std::streamsize>(f.count() * sizeof(double)));
    field_list.push_back({{"name", f.name}, {"shape", f.shape}, {"offset_bytes", offset}});
    offset += f.count() * sizeof(double);
  }
  if (!bin) throw std::runtime_error("short write: " + base_path + ".bin");
  bin.close();
  sidecar["fields"] = field_list;
  sidecar["total_bytes"] = offset;
  write_json(base_path + ".json", sidecar);
}

const std::vector<double>& FieldFile::at(const std::string& name) const {
  auto it = fields.find(name);
  if (it == fields.end()) throw std::runtime_error("field file has no field named " + name);
  return it->second;
}

FieldFile read_field_file(const std::string& base_path) {
  FieldFile out;
  out.metadata = read_json(base_path + ".json");
  std::ifstream bin(base_path + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open: " + base_path + ".bin");
  for (const auto& f : out.metadata.at("fields")) {
    const std::string name = f.at("name");
    std::vector<std::size_t> shape = f.at("shape").get<std::vector<std::size_t>>();
    std::size_t count = 1;
    for (auto s : shape) count *= s;
    std::vector<double> data(count);
    bin.seekg(static_cast<std::streamoff>(f.at("offset_bytes").get<std::size_t>()));
    bin.read(reinterpret_cast<char*>(data.data()),
             static_cast<std::streamsize>(count * sizeof(double)));
    if (!bin) throw std::runtime_error("short read: " + base_path + ".bin field " + name);
    out.order.push_back(name);
    out.shapes[name] = std::move(shape);
    out.fields[name] = std::move(data);
  }
  out.metadata = out.metadata.at("metadata");
  return out;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << j.dump(2) << "\n";
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  json j;
  in >> j;
  return j;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : path_(path), ncols_(columns.size()), out_(path, std::ios::trunc) {
  if (!out_) throw std::runtime_error("cannot open for write: " + path);
  for (std::size_t i = 0; i < columns.size(); ++i)
    out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != ncols_)
    throw std::invalid_argument("csv row width mismatch in " + path_);
  out_.precision(17);
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << (i ? "," : "") << values[i];
  out_ << "\n";
  out_.flush();
}

int CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const int c = column_index(name);
  if (c < 0) throw std::runtime_error("csv has no column named " + name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[static_cast<std::size_t>(c)]);
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.columns.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream rs(line);
    std::vector<double> row;
    while (std::getline(rs, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != t.columns.size())
      throw std::runtime_error("ragged csv row in " + path);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void ensure_dir(const std::string& path) { std::filesystem::create_directories(path); }

bool file_exists(const std::string& path) { return std::filesystem::exists(path); }

}  // namespace mdlab::io
