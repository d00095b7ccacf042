#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "csvm/errors.hpp"

namespace csvm {

enum class Kind { Csv, Csvm };

enum class ShortRowPolicy { PadWithEmptyMarker, Error };

struct ParseOptions {
  char delimiter = '\t';
  std::string empty_marker = "-";
  bool keep_annotations = false;
  ShortRowPolicy short_rows = ShortRowPolicy::PadWithEmptyMarker;
};

/// A retained comment row. `position` is the index of the data row the
/// comment preceded; comments after the last row carry the row count.
struct Annotation {
  std::size_t position = 0;
  std::string text;  // whole line, including the leading '#'
  friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// In-memory form of one tabular file. Every cell is kept as the string
/// that was read; nothing is coerced to numbers at this layer.
struct Document {
  std::string source;  // origin label, provenance only; not part of equality
  Kind kind = Kind::Csv;
  std::string title;
  std::vector<std::string> headers;
  std::vector<std::string> col_types;
  std::vector<long> widths;
  std::string meta;
  std::vector<std::vector<std::string>> data;
  std::vector<Annotation> annotations;
  // Width tokens that were not non-negative integers, kept verbatim so
  // validate_document can name them; the widths slot holds the default.
  std::vector<std::pair<std::size_t, std::string>> width_errors;

  std::size_t row_count() const { return data.size(); }
  std::size_t column_count() const;

  friend bool operator==(const Document& a, const Document& b);
};

/// Parse one file image. Metadata rows start with '#' immediately followed
/// by a keyword and then the delimiter (or end of line); every other row
/// starting with '#' is a comment. Blank lines are skipped. Never reads
/// the disk and never interprets cell contents.
Document parse_document(std::string_view text, const ParseOptions& options = {},
                        std::vector<std::string>* warnings = nullptr);

/// Inverse of parse_document: data rows first (comments re-inserted at their
/// recorded positions), then the metadata block. Empty data cells are written
/// as the empty marker. Throws InvariantViolation for documents that cannot
/// be read back (delimiter inside a cell, newline inside a cell, a first
/// cell starting with '#', a comment that would re-parse as metadata).
std::string serialize_document(const Document& doc, const ParseOptions& options = {});

/// Fixed-layout human-readable summary: kind, metadata, per-column
/// width/type/name lines, counts, then every row with bracketed cells.
std::string dump_document(const Document& doc);

/// Structural checks; one message per violation, empty means consistent.
std::vector<std::string> validate_document(const Document& doc);

/// Value-reset: returns a fresh empty document (kind Csv, no columns).
Document clear_document(const Document& doc);

}  // namespace csvm
