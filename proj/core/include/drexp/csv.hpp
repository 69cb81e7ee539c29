#pragma once

#include <filesystem>
#include <istream>

#include "drexp/families.hpp"

namespace drexp {

/// Reads observations from CSV: one decimal value per line, optional single
/// header line "x", UTF-8, LF or CRLF endings. Malformed rows and support
/// violations raise InputError naming the offending row.
Observations load_observations_csv(std::istream& in, const ModelFamily& family);
Observations load_observations_csv(const std::filesystem::path& path,
                                   const ModelFamily& family);

/// Writes observations in the same format (header "x", one value per line).
void write_observations_csv(std::ostream& out, const Observations& obs);

}  // namespace drexp
