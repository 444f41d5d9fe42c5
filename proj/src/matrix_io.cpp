#include "eiginf/matrix_io.hpp"

#include <cmath>
#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace eiginf {

namespace {

std::string position(std::string_view source, std::size_t line, std::size_t column) {
  std::ostringstream os;
  os << source << ":" << line << ":" << column;
  return os.str();
}

}  // namespace

Mat parse_matrix_csv(std::string_view text, std::string_view source) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (std::all_of(line.begin(), line.end(),
                    [](char c) { return std::isspace(static_cast<unsigned char>(c)); })) {
      if (end == text.size()) break;
      continue;
    }

    std::vector<double> row;
    std::size_t field_start = 0;
    std::size_t column = 1;
    while (true) {
      const auto comma = line.find(',', field_start);
      const auto field_end = comma == std::string_view::npos ? line.size() : comma;
      std::string field(line.substr(field_start, field_end - field_start));
      const auto first = field.find_first_not_of(" \t");
      const auto last = field.find_last_not_of(" \t");
      if (first == std::string::npos) {
        throw InputError(position(source, line_no, column) + ": empty field");
      }
      field = field.substr(first, last - first + 1);
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(field, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != field.size()) {
        throw InputError(position(source, line_no, column) + ": cannot parse '" + field +
                         "' as a number");
      }
      if (!std::isfinite(value)) {
        throw InputError(position(source, line_no, column) + ": non-finite value '" +
                         field + "'");
      }
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      field_start = comma + 1;
      ++column;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError(position(source, line_no, row.size()) + ": row has " +
                       std::to_string(row.size()) + " fields, expected " +
                       std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
    if (end == text.size()) break;
  }
  if (rows.empty()) throw InputError(std::string(source) + ": no data rows");

  Mat m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

std::string format_matrix_csv(const Mat& m) {
  std::ostringstream os;
  os.precision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << m(i, j);
    }
    os << '\n';
  }
  return os.str();
}

Mat matrix_from_json(const Json& j, std::string_view source) {
  const std::string src(source);
  auto number = [&](const Json& v, std::size_t i, std::size_t k) {
    if (!v.is_number()) {
      throw InputError(src + ": entry (" + std::to_string(i + 1) + "," +
                       std::to_string(k + 1) + ") is not a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InputError(src + ": non-finite entry");
    return x;
  };

  if (j.is_object()) {
    if (!j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
      throw InputError(src + ": matrix object needs rows, cols and data");
    }
    const auto rows = j.at("rows").get<long long>();
    const auto cols = j.at("cols").get<long long>();
    const auto& data = j.at("data");
    if (rows < 0 || cols < 0 || !data.is_array() ||
        data.size() != static_cast<std::size_t>(rows * cols)) {
      throw InputError(src + ": data length does not match rows*cols");
    }
    Mat m(rows, cols);
    for (long long r = 0; r < rows; ++r) {
      for (long long c = 0; c < cols; ++c) {
        m(r, c) = number(data[static_cast<std::size_t>(r * cols + c)],
                         static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      }
    }
    return m;
  }
  if (j.is_array() && !j.empty() && j.front().is_array()) {
    const std::size_t cols = j.front().size();
    Mat m(static_cast<Index>(j.size()), static_cast<Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
      if (!j[r].is_array() || j[r].size() != cols) {
        throw InputError(src + ": row " + std::to_string(r + 1) + " has the wrong length");
      }
      for (std::size_t c = 0; c < cols; ++c) {
        m(static_cast<Index>(r), static_cast<Index>(c)) = number(j[r][c], r, c);
      }
    }
    return m;
  }
  if (j.is_array() && !j.empty() && j.front().is_number()) {
    Mat m(static_cast<Index>(j.size()), 1);
    for (std::size_t r = 0; r < j.size(); ++r) m(static_cast<Index>(r), 0) = number(j[r], r, 0);
    return m;
  }
  throw InputError(src + ": not a matrix (expected {rows,cols,data} or nested arrays)");
}

Json matrix_to_json(const Mat& m) {
  Json data = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

namespace {

bool is_json_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".json";
}

Json parse_json_file(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace

Mat read_matrix(const std::filesystem::path& path) {
  if (is_json_path(path)) return matrix_from_json(parse_json_file(path), path.string());
  return parse_matrix_csv(read_text_file(path), path.string());
}

void write_matrix(const std::filesystem::path& path, const Mat& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  if (is_json_path(path)) {
    out << matrix_to_json(m).dump(2) << '\n';
  } else {
    out << format_matrix_csv(m);
  }
}

std::vector<Mat> read_matrix_list(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::vector<Mat> out;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (!entry.is_regular_file()) continue;
      const auto ext = entry.path().extension().string();
      if (ext == ".csv" || ext == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.push_back(read_matrix(f));
  } else if (is_json_path(path)) {
    const Json j = parse_json_file(path);
    if (!j.is_array()) throw InputError(path.string() + ": expected an array of matrices");
    for (std::size_t i = 0; i < j.size(); ++i) {
      out.push_back(matrix_from_json(j[i], path.string() + "[" + std::to_string(i) + "]"));
    }
  } else {
    throw InputError(path.string() + ": expected a directory of matrices or a JSON array");
  }
  if (out.empty()) throw InputError(path.string() + ": no matrices found");
  return out;
}

}  // namespace eiginf
