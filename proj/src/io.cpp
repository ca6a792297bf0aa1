#include "exsp/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "exsp/errors.hpp"
#include "json.hpp"

namespace exsp {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view field) {
  const std::string_view t = trim(field);
  require(!t.empty(), "csv: empty field");
  const char* begin = t.data();
  if (*begin == '+') ++begin;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), v);
  require(ec == std::errc() && ptr == t.data() + t.size(),
          "csv: malformed number '" + std::string(t) + "'");
  return v;
}

Vector parse_row(std::string_view line) {
  Vector row;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    row.push_back(parse_number(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return row;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

void write_matrix_csv(std::ostream& os, const Matrix& A) {
  for (std::size_t r = 0; r < A.rows(); ++r) {
    for (std::size_t c = 0; c < A.cols(); ++c) {
      if (c) os << ',';
      os << format_double(A(r, c));
    }
    os << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& A) {
  auto out = open_out(path);
  write_matrix_csv(out, A);
}

void write_vector_csv(const std::filesystem::path& path, std::span<const double> v) {
  auto out = open_out(path);
  for (double x : v) out << format_double(x) << '\n';
}

Matrix read_matrix_csv(std::istream& is) {
  std::vector<Vector> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(parse_row(line));
    require(rows.back().size() == rows.front().size(), "csv: ragged rows");
  }
  require(!rows.empty(), "csv: no data rows");
  return Matrix::from_rows(rows);
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix_csv(in);
}

Vector read_vector_csv(const std::filesystem::path& path) {
  const Matrix A = read_matrix_csv(path);
  require(A.rows() == 1 || A.cols() == 1, "csv: expected a single row or column");
  return Vector(A.data(), A.data() + A.rows() * A.cols());
}

Vector parse_vector(std::string_view text) {
  require(!trim(text).empty(), "vector: empty list");
  return parse_row(text);
}

std::string groups_to_json(const GroupSet& groups) {
  nlohmann::json j;
  j["n"] = groups.n();
  j["groups"] = groups.one_based();
  return j.dump();
}

GroupSet groups_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("groups json: ") + e.what());
  }
  require(j.is_object() && j.contains("n") && j.contains("groups"),
          "groups json: expected {\"n\": int, \"groups\": [[...], ...]}");
  require(j["n"].is_number_unsigned(), "groups json: n must be a positive integer");
  require(j["groups"].is_array(), "groups json: groups must be an array");
  std::vector<IndexList> groups;
  for (const auto& g : j["groups"]) {
    require(g.is_array(), "groups json: each group must be an array");
    IndexList list;
    for (const auto& idx : g) {
      require(idx.is_number_unsigned(), "groups json: indices must be positive integers");
      list.push_back(idx.get<std::size_t>());
    }
    groups.push_back(std::move(list));
  }
  return GroupSet::from_one_based(groups, j["n"].get<std::size_t>());
}

void write_groups_json(const std::filesystem::path& path, const GroupSet& groups) {
  write_text_file(path, groups_to_json(groups) + "\n");
}

GroupSet read_groups_json(const std::filesystem::path& path) {
  return groups_from_json(read_text_file(path));
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace exsp
