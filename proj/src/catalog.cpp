#include "csvm/catalog.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <system_error>

namespace csvm {

namespace fs = std::filesystem;

namespace {

constexpr const char* kMonths[12] = {"jan", "feb", "mar", "apr", "may", "jun",
                                     "jul", "aug", "sep", "oct", "nov", "dec"};

std::string format_mtime(fs::file_time_type mtime) {
  const auto sys = std::chrono::file_clock::to_sys(mtime);
  const std::time_t t = std::chrono::system_clock::to_time_t(sys);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%s:%04d", tm.tm_mday, kMonths[tm.tm_mon],
                tm.tm_year + 1900);
  return buf;
}

std::string path_text(const fs::path& p, bool posix) {
  return posix ? p.generic_string() : p.string();
}

struct Entry {
  std::string dir;
  std::string file;
  std::string stamp;
};

void collect(const fs::path& root, const ScanOptions& options, std::vector<Entry>& entries,
             std::vector<std::string>* warnings) {
  std::string ext;
  if (options.extension_filter) {
    ext = *options.extension_filter;
    if (!ext.empty() && ext[0] != '.') ext = "." + ext;
  }
  auto take = [&](const fs::directory_entry& e) {
    std::error_code ec;
    if (!e.is_regular_file(ec)) {
      if (ec && warnings)
        warnings->push_back("skipping " + path_text(e.path(), options.posix_paths) + ": " +
                            ec.message());
      return;
    }
    if (options.extension_filter && e.path().extension().string() != ext) return;
    auto mtime = e.last_write_time(ec);
    if (ec) {
      if (warnings)
        warnings->push_back("skipping " + path_text(e.path(), options.posix_paths) + ": " +
                            ec.message());
      return;
    }
    entries.push_back({path_text(e.path().parent_path(), options.posix_paths),
                       e.path().filename().string(), format_mtime(mtime)});
  };
  std::error_code ec;
  if (options.recursive) {
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) throw Error(Errc::PermissionDenied, "cannot open " + root.string() + ": " + ec.message());
    for (const auto& e : it) take(e);
  } else {
    fs::directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) throw Error(Errc::PermissionDenied, "cannot open " + root.string() + ": " + ec.message());
    for (const auto& e : it) take(e);
  }
}

}  // namespace

Document scan_directory(const fs::path& root, const ScanOptions& options,
                        std::vector<std::string>* warnings) {
  std::error_code ec;
  if (!fs::exists(root, ec) || ec)
    throw Error(Errc::RootNotFound, "no such directory: " + root.string());
  if (!fs::is_directory(root, ec) || ec)
    throw Error(Errc::RootNotFound, root.string() + " is not a directory");

  std::vector<Entry> entries;
  collect(root, options, entries, warnings);
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.dir != b.dir) return a.dir < b.dir;
    return a.file < b.file;
  });

  Document doc;
  doc.kind = Kind::Csvm;
  doc.headers = {"DIR", "FILE", "-"};
  doc.col_types = {"TEXT", "TEXT", "TEXT"};
  doc.widths = {50, 50, 50};
  for (auto& e : entries) doc.data.push_back({std::move(e.dir), std::move(e.file), std::move(e.stamp)});
  return doc;
}

}  // namespace csvm
