#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "csvm/document.hpp"

namespace csvm {

enum class Combiner { And, Or };

/// A multi-term text query. strict compares the whitespace-trimmed cell
/// against the whole term; otherwise a raw substring test is used. negate
/// inverts each term's verdict before terms are combined.
struct QuerySpec {
  std::vector<std::string> terms;
  Combiner combiner = Combiner::Or;
  bool strict = true;
  bool negate = false;
};

using Matrix = std::vector<std::vector<std::string>>;

/// Indices of every column whose header equals `name` exactly.
std::vector<std::size_t> get_column_indices(const Document& doc, std::string_view name);

/// First column whose header matches `pattern` (strict or substring);
/// returns the match count and that column's cells top to bottom.
std::pair<std::size_t, std::vector<std::string>> get_column(const Document& doc,
                                                            std::string_view pattern,
                                                            bool strict);

/// Append columns on the right; every existing row gets `fill` in the
/// new cells. names/types/widths must have equal lengths.
Document add_columns(const Document& doc, const std::vector<std::string>& names,
                     const std::vector<std::string>& types, const std::vector<long>& widths,
                     const std::string& fill);

Document rename_column(const Document& doc, std::size_t index, const std::string& new_name);

/// Column-aligned union: result columns are a's, then b's whose names match
/// none of a's. Pending names (empty marker or blank) never match. Rows of
/// a come first, then rows of b, each projected with empty-marker fill.
/// On shared names, a's type/width win; disagreement is reported to
/// `warnings`. A duplicated non-pending header inside one input is an error.
Document union_tables(const Document& a, const Document& b,
                      const std::string& empty_marker = "-",
                      std::vector<std::string>* warnings = nullptr);

/// Keeps only columns named in both inputs (a's order); rows of a then b.
/// No shared non-pending name means no result at all.
std::optional<Document> intersect_tables(const Document& a, const Document& b,
                                         const std::string& empty_marker = "-");

/// Row indices of matrix cells in column `col` satisfying the query.
/// Or-combined results list hits term by term (first occurrence kept);
/// And-combined results are ascending.
std::vector<std::size_t> query_columns(const Matrix& matrix, const QuerySpec& spec,
                                       std::size_t col);

/// Same combination rules applied across one row's cells.
std::vector<std::size_t> query_row(const std::vector<std::string>& row, const QuerySpec& spec);

struct LookupFillResult {
  Document document;
  std::size_t added = 0;
  std::vector<std::string> not_found;  // target keys with no source row
};

/// Dictionary fill: for each target row, look its key up in source
/// (first source row wins) and copy the value into the dest column.
/// Rows without a hit are left untouched and their keys reported.
LookupFillResult lookup_fill(const Document& target, const Document& source,
                             std::string_view key_header, std::string_view value_header,
                             std::string_view dest_header,
                             std::vector<std::string>* warnings = nullptr);

/// Explode a compact multi-series table into per-series two-column
/// documents (time column + one series each), dropping empty-marker cells.
std::vector<Document> split_series(const Document& doc, std::string_view time_header,
                                   const std::string& empty_marker = "-");

}  // namespace csvm
