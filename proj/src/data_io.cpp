// Copyright (c) the mintmc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mintmc/data_io.hpp"

#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mintmc {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::uint32_t read_be_u32(std::ifstream& in, const std::string& path,
                          const char* what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw_data("truncated IDX file '" + path + "' while reading " + what);
  return (static_cast<std::uint32_t>(b[0]) << 24) |
         (static_cast<std::uint32_t>(b[1]) << 16) |
         (static_cast<std::uint32_t>(b[2]) << 8) |
         static_cast<std::uint32_t>(b[3]);
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open CSV file '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw_data("CSV file '" + path + "' is empty");
  const auto header = split_csv_line(strip_cr(line));
  if (header.size() != schema.columns.size())
    throw_data("CSV header of '" + path + "' has " +
               std::to_string(header.size()) + " columns, schema expects " +
               std::to_string(schema.columns.size()));
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] != schema.columns[i])
      throw_data("CSV header mismatch in '" + path + "': column " +
                 std::to_string(i) + " is '" + header[i] + "', expected '" +
                 schema.columns[i] + "'");

  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != schema.columns.size())
      throw_data("CSV row at line " + std::to_string(line_no) + " of '" +
                 path + "' has " + std::to_string(cells.size()) + " cells");
    for (const auto& cell : cells) {
      errno = 0;
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0' || errno == ERANGE)
        throw_data("malformed number '" + cell + "' at line " +
                   std::to_string(line_no) + " of '" + path + "'");
      values.push_back(v);
    }
  }
  if (values.empty())
    throw_data("CSV file '" + path + "' contains no data rows");
  return Dataset(std::move(values), schema.columns.size());
}

void write_csv(const std::string& path, const CsvSchema& schema,
               const Dataset& data) {
  if (data.row_width() != schema.columns.size())
    throw_config("CSV schema has " + std::to_string(schema.columns.size()) +
                 " columns, dataset rows have " +
                 std::to_string(data.row_width()));
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw_io("cannot write CSV file '" + path + "'");
  for (std::size_t i = 0; i < schema.columns.size(); ++i)
    std::fprintf(f, "%s%s", i == 0 ? "" : ",", schema.columns[i].c_str());
  std::fputc('\n', f);
  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto row = data.row(r);
    for (std::size_t c = 0; c < row.size(); ++c)
      std::fprintf(f, "%s%.17g", c == 0 ? "" : ",", row[c]);
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw_io("failed to flush CSV file '" + path + "'");
}

Dataset load_idx(const std::string& images_path,
                 const std::string& labels_path, int digit_a, int digit_b) {
  if (digit_a == digit_b)
    throw_config("IDX digit filter needs two distinct digits");

  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw_io("cannot open IDX image file '" + images_path + "'");
  const std::uint32_t img_magic = read_be_u32(img, images_path, "magic");
  if (img_magic != 0x00000803u)
    throw_data("bad magic number in IDX image file '" + images_path +
               "': expected 0x00000803");
  const std::uint32_t n_images = read_be_u32(img, images_path, "count");
  const std::uint32_t rows = read_be_u32(img, images_path, "rows");
  const std::uint32_t cols = read_be_u32(img, images_path, "cols");

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw_io("cannot open IDX label file '" + labels_path + "'");
  const std::uint32_t lab_magic = read_be_u32(lab, labels_path, "magic");
  if (lab_magic != 0x00000801u)
    throw_data("bad magic number in IDX label file '" + labels_path +
               "': expected 0x00000801");
  const std::uint32_t n_labels = read_be_u32(lab, labels_path, "count");
  if (n_images != n_labels)
    throw_data("IDX image/label count mismatch: " + std::to_string(n_images) +
               " images vs " + std::to_string(n_labels) + " labels");

  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  std::vector<unsigned char> image(pixels);
  std::vector<double> values;
  for (std::uint32_t i = 0; i < n_images; ++i) {
    if (!img.read(reinterpret_cast<char*>(image.data()),
                  static_cast<std::streamsize>(pixels)))
      throw_data("truncated IDX image file '" + images_path + "' at image " +
                 std::to_string(i));
    char label_byte = 0;
    if (!lab.read(&label_byte, 1))
      throw_data("truncated IDX label file '" + labels_path + "' at image " +
                 std::to_string(i));
    const int label = static_cast<unsigned char>(label_byte);
    if (label != digit_a && label != digit_b) continue;
    for (std::size_t p = 0; p < pixels; ++p)
      values.push_back(static_cast<double>(image[p]) / 255.0);
    values.push_back(label == digit_b ? 1.0 : 0.0);
  }
  if (values.empty())
    throw_data("IDX filter kept no examples: digits " +
               std::to_string(digit_a) + " and " + std::to_string(digit_b) +
               " are absent from '" + labels_path + "'");
  return Dataset(std::move(values), pixels + 1);
}

}  // namespace mintmc
