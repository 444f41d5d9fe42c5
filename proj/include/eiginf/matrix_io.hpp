#pragma once

// Matrix files: CSV (one row per line, comma separated, no header) and JSON
// {"rows": r, "cols": c, "data": [row-major values]}.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "eiginf/matcore.hpp"

namespace eiginf {

using Json = nlohmann::json;

// Errors carry "<source>:<line>:<column>" positions.
Mat parse_matrix_csv(std::string_view text, std::string_view source = "<csv>");
std::string format_matrix_csv(const Mat& m);

// Accepts the {"rows","cols","data"} object or a nested array of rows.
Mat matrix_from_json(const Json& j, std::string_view source = "<json>");
Json matrix_to_json(const Mat& m);

// Dispatches on extension (.json, otherwise CSV).
Mat read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Mat& m);

// A directory of matrix files (sorted by file name) or a JSON file holding
// an array of matrices.
std::vector<Mat> read_matrix_list(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace eiginf
