#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "csvm/document.hpp"

namespace csvm {

/// Key/value rows read off the top of a result table. `terminated` records
/// whether an explicit END row was seen (END itself is not stored).
struct KeyValueBlock {
  std::vector<std::pair<std::string, std::string>> entries;
  bool terminated = false;
};

struct SchemaTable {
  std::string name;
  std::string file;
  long key_column = 0;
};

struct SchemaForeignKey {
  std::string from_table;
  long from_column = 0;
  std::string to_table;
  long to_column = 0;
};

/// Declarative description of a relational import: one DB row, TABLE rows,
/// FOREIGN rows. Nothing is connected to or loaded here.
struct SchemaModel {
  std::string db_host;
  std::string db_user;
  std::string db_password_slot;
  std::string db_name;
  std::vector<SchemaTable> tables;
  std::vector<SchemaForeignKey> foreign_keys;
};

/// Ingest metadata-less CSV text: synthesizes headers C0..Cn-1, TEXT types
/// and default widths. Empty input gives an empty document.
Document from_plain_csv(std::string_view text, char delimiter = '\t');

/// Data rows only, no metadata block, cells verbatim.
std::string to_plain_csv(const Document& doc, char delimiter = '\t');

/// Ingest whitespace-separated x y pairs laid out in repeated column pairs.
/// Header lines made of X/Y tokens and all-dash rules are skipped; the
/// remaining tokens are taken in reading order two at a time.
Document from_xy_pairs(std::string_view text, std::vector<std::string>* warnings = nullptr);

/// Two-column fitter exchange format: a count line, left-justified x then y
/// per line, and a '#'-prefixed dotted key/value trailer.
std::string to_solver_two_column(const Document& series, std::string_view header_x,
                                 std::string_view header_y, std::string_view source_label);

struct SolverFile {
  Document series;
  std::vector<std::pair<std::string, std::string>> trailer;
};

SolverFile parse_solver_two_column(std::string_view text);

/// Static JavaScript arrays for an offline browser viewer: flag list,
/// getfield list, then one data_array assignment per row.
std::string to_javascript_table(const Document& doc, const std::vector<std::string>& flags,
                                const std::vector<std::string>& getf);

/// Read key/value rows top-down; stops at END (terminated) or at the first
/// empty-marker/blank key (unterminated). Repeated keys are kept in order.
KeyValueBlock extract_kv_block(const Document& doc, std::string_view key_header,
                               std::string_view value_header,
                               const std::string& empty_marker = "-");

/// Inverse: append key/value columns and write the block into the top rows,
/// plus an END row when the block is terminated. The block must fit.
Document append_kv_columns(const Document& doc, const KeyValueBlock& block,
                           std::string_view key_header, std::string_view value_header,
                           const std::string& empty_marker = "-");

SchemaModel parse_db_schema(const Document& doc, std::vector<std::string>* warnings = nullptr);

/// Split a packed cell on a secondary separator; the empty marker or an
/// empty cell yields no items. Interior empty items are kept.
std::vector<std::string> split_multivalue_cell(std::string_view cell,
                                               std::string_view secondary_delimiter,
                                               std::string_view empty_marker = "-");

}  // namespace csvm
