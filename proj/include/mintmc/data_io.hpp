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

#ifndef MINTMC_DATA_IO_HPP
#define MINTMC_DATA_IO_HPP

#include <string>
#include <vector>

#include "mintmc/types.hpp"

namespace mintmc {

struct CsvSchema {
  std::vector<std::string> columns;
};

/// Reads a UTF-8 CSV with a header row that must match the schema exactly.
/// Every cell is parsed as a decimal float; malformed rows report their line
/// number.
Dataset load_csv(const std::string& path, const CsvSchema& schema);

/// Writes header + rows with floats at 17 significant digits, so a
/// write-then-read round trip reproduces the doubles exactly.
void write_csv(const std::string& path, const CsvSchema& schema,
               const Dataset& data);

/// Parses an IDX image/label file pair (big-endian; image magic 0x00000803,
/// label magic 0x00000801), keeps only the two requested digits, maps
/// digit_a -> label 0 and digit_b -> label 1, and scales pixels to [0, 1].
/// Rows are rows*cols features followed by the label (the logistic model
/// appends its own bias feature).
Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 int digit_a, int digit_b);

}  // namespace mintmc

#endif  // MINTMC_DATA_IO_HPP
