#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "exsp/groups.hpp"
#include "exsp/linalg.hpp"

namespace exsp {

/// printf %.17g, which round-trips every double.
std::string format_double(double v);

/// Comma-separated rows, no header, LF endings.
void write_matrix_csv(std::ostream& os, const Matrix& A);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& A);
/// One value per line.
void write_vector_csv(const std::filesystem::path& path, std::span<const double> v);

/// Throws InvalidArgument on ragged rows, empty input or a malformed number.
Matrix read_matrix_csv(std::istream& is);
Matrix read_matrix_csv(const std::filesystem::path& path);
/// Accepts one value per line or a single comma-separated row.
Vector read_vector_csv(const std::filesystem::path& path);

/// Comma-separated list such as "3,1" or "-2, 2".
Vector parse_vector(std::string_view text);

/// {"n": int, "groups": [[1-based indices], ...]}
std::string groups_to_json(const GroupSet& groups);
GroupSet groups_from_json(std::string_view text);
void write_groups_json(const std::filesystem::path& path, const GroupSet& groups);
GroupSet read_groups_json(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace exsp
