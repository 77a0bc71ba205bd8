#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "trunclr/synthetic_model.hpp"

namespace trunclr {

/// CSV with header x1,...,xd,y and one sample per row; values are written
/// with 17 significant digits so that reading them back is lossless.
void write_dataset(const Dataset& data, std::ostream& out);
void save_dataset(const Dataset& data, const std::filesystem::path& path);

/// Throws SchemaError naming the offending line or column.
Dataset read_dataset(std::istream& in, const std::string& source = "<stream>");
Dataset load_dataset(const std::filesystem::path& path);

/// Shortest-exact rendering used by every text output.
std::string format_double(double v);

}  // namespace trunclr
