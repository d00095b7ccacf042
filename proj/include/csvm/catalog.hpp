#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "csvm/document.hpp"

namespace csvm {

struct ScanOptions {
  bool recursive = false;
  std::optional<std::string> extension_filter;  // ".csvm" or "csvm"
  bool posix_paths = false;                     // force '/' separators
};

/// Walk a directory and build a three-column table: directory, file name,
/// and a pending third column holding the last-write date as dd:mon:yyyy
/// (UTC). Rows are sorted by directory then file name so the same tree
/// always gives the same bytes. Unreadable entries are skipped with a
/// warning; an unreadable or missing root is an error.
Document scan_directory(const std::filesystem::path& root, const ScanOptions& options = {},
                        std::vector<std::string>* warnings = nullptr);

}  // namespace csvm
