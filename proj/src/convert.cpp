#include "csvm/convert.hpp"

#include <algorithm>
#include <regex>
#include <unordered_map>

#include "csvm/ops.hpp"
#include "internal_util.hpp"

namespace csvm {

namespace {

bool all_dashes(std::string_view s) {
  return !s.empty() && s.find_first_not_of('-') == std::string_view::npos;
}

std::string js_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '\\' || c == '"') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string js_array(const std::vector<std::string>& items) {
  std::string out = "new Array (";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += js_quote(items[i]);
  }
  out += ");";
  return out;
}

// Trailer lines carry a dotted leader so keys line up: the key plus dots
// occupy a fixed ten-character field.
std::string trailer_line(const std::string& key, const std::string& value) {
  std::string out = "# " + key;
  if (key.size() <= 9) {
    out += ' ';
    out += std::string(9 - key.size(), '.');
  }
  out += ' ';
  out += value;
  return out;
}

}  // namespace

Document from_plain_csv(std::string_view text, char delimiter) {
  ParseOptions options;
  options.delimiter = delimiter;
  Document doc = parse_document(text, options);
  if (doc.data.empty()) return Document{};
  const std::size_t cols = doc.data.front().size();
  doc.kind = Kind::Csvm;
  doc.title.clear();
  doc.meta.clear();
  doc.headers.clear();
  for (std::size_t i = 0; i < cols; ++i) doc.headers.push_back("C" + std::to_string(i));
  doc.col_types.assign(cols, "TEXT");
  doc.widths.assign(cols, 50);
  doc.width_errors.clear();
  return doc;
}

std::string to_plain_csv(const Document& doc, char delimiter) {
  std::string out;
  for (const auto& row : doc.data) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += delimiter;
      out += row[c];
    }
    out += '\n';
  }
  return out;
}

Document from_xy_pairs(std::string_view text, std::vector<std::string>* warnings) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line =
        eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto line_tokens = detail::split_whitespace(line);
    if (line_tokens.empty()) continue;
    if (all_dashes(detail::trim(line))) continue;  // horizontal rule under the header
    bool header = std::all_of(line_tokens.begin(), line_tokens.end(),
                              [](const std::string& t) { return t == "X" || t == "Y"; });
    if (header) continue;
    for (auto& t : line_tokens) tokens.push_back(std::move(t));
  }
  for (const auto& t : tokens)
    if (!detail::parse_double(t))
      throw Error(Errc::NonNumericCell, "token '" + t + "' is not a number");
  if (tokens.size() % 2 != 0)
    throw Error(Errc::OddTokenCount,
                std::to_string(tokens.size()) + " values cannot form complete x y pairs");

  Document doc;
  doc.kind = Kind::Csvm;
  doc.headers = {"X", "Y"};
  doc.col_types = {"NUMERIC", "NUMERIC"};
  doc.widths = {50, 50};
  double prev = 0;
  for (std::size_t i = 0; i + 1 < tokens.size(); i += 2) {
    double x = *detail::parse_double(tokens[i]);
    if (i > 0 && warnings && x <= prev)
      warnings->push_back("x does not increase at pair " + std::to_string(i / 2) + " (" +
                          tokens[i] + ")");
    prev = x;
    doc.data.push_back({tokens[i], tokens[i + 1]});
  }
  return doc;
}

std::string to_solver_two_column(const Document& series, std::string_view header_x,
                                 std::string_view header_y, std::string_view source_label) {
  if (series.column_count() != 2)
    throw Error(Errc::InvalidArgument, "a solver file holds exactly two columns, document has " +
                                           std::to_string(series.column_count()));
  std::string out = std::to_string(series.data.size()) + '\n';
  for (std::size_t r = 0; r < series.data.size(); ++r) {
    const auto& row = series.data[r];
    auto x = detail::parse_double(row[0]);
    auto y = detail::parse_double(row.size() > 1 ? row[1] : std::string());
    if (!x || !y)
      throw Error(Errc::NonNumericCell, "row " + std::to_string(r) + " is not a numeric pair");
    std::string xs = detail::fmt_double(*x);
    if (xs.size() < 10)
      xs.append(10 - xs.size(), ' ');
    else
      xs += ' ';
    out += xs + detail::fmt_double(*y) + '\n';
  }
  out += trailer_line("LPZ file", std::string(source_label)) + '\n';
  out += trailer_line("Npts", std::to_string(series.data.size())) + '\n';
  out += trailer_line("Colx no", "0") + '\n';
  out += trailer_line("Header x", std::string(header_x)) + '\n';
  out += trailer_line("Coly no", "1") + '\n';
  out += trailer_line("Header y", std::string(header_y)) + '\n';
  return out;
}

SolverFile parse_solver_two_column(std::string_view text) {
  SolverFile out;
  static const std::regex kTrailer(R"(^#\s*(.*?)\s+\.+\s+(.*)$)");
  static const std::regex kBare(R"(^#\s*(.*?)\s*$)");

  bool have_count = false;
  std::size_t declared = 0;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line =
        eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (detail::trim(line).empty()) continue;

    if (line[0] == '#') {
      std::string owned(line);
      std::smatch m;
      if (std::regex_match(owned, m, kTrailer))
        out.trailer.emplace_back(m[1].str(), m[2].str());
      else if (std::regex_match(owned, m, kBare))
        out.trailer.emplace_back(detail::trim(m[1].str()), "");
      continue;
    }
    if (!have_count) {
      auto n = detail::parse_nonneg_long(line);
      if (!n)
        throw Error(Errc::MalformedRow,
                    "line " + std::to_string(line_no) + ": expected the point count, got '" +
                        std::string(detail::trim(line)) + "'");
      declared = static_cast<std::size_t>(*n);
      have_count = true;
      continue;
    }
    auto tokens = detail::split_whitespace(line);
    if (tokens.size() != 2)
      throw Error(Errc::MalformedRow, "line " + std::to_string(line_no) + ": expected 'x y', got " +
                                          std::to_string(tokens.size()) + " values");
    for (const auto& t : tokens)
      if (!detail::parse_double(t))
        throw Error(Errc::NonNumericCell,
                    "line " + std::to_string(line_no) + ": '" + t + "' is not a number");
    out.series.data.push_back({tokens[0], tokens[1]});
  }
  if (!have_count)
    throw Error(Errc::MalformedRow, "missing point count line");
  if (declared != out.series.data.size())
    throw Error(Errc::CountMismatch, "file declares " + std::to_string(declared) +
                                         " points but holds " +
                                         std::to_string(out.series.data.size()));

  auto trailer_value = [&](std::string_view key, const char* fallback) {
    for (const auto& [k, v] : out.trailer)
      if (k == key) return v;
    return std::string(fallback);
  };
  out.series.kind = Kind::Csvm;
  out.series.headers = {trailer_value("Header x", "X"), trailer_value("Header y", "Y")};
  out.series.col_types = {"NUMERIC", "NUMERIC"};
  out.series.widths = {50, 50};
  return out;
}

std::string to_javascript_table(const Document& doc, const std::vector<std::string>& flags,
                                const std::vector<std::string>& getf) {
  std::string out;
  out += "var flags_array = " + js_array(flags) + '\n';
  out += "var flags_n=" + std::to_string(flags.size()) + ";\n";
  out += "var getf_array = " + js_array(getf) + '\n';
  out += "var getf_n=" + std::to_string(getf.size()) + ";\n";
  out += "var data_c=" + std::to_string(doc.column_count()) + ";\n";
  out += '\n';
  out += "var data_array = new Array();\n";
  out += "var data_r=0;\n";
  for (const auto& row : doc.data)
    out += "data_array[data_r++] = " + js_array(row) + '\n';
  return out;
}

KeyValueBlock extract_kv_block(const Document& doc, std::string_view key_header,
                               std::string_view value_header, const std::string& empty_marker) {
  auto key_idx = get_column_indices(doc, key_header);
  auto value_idx = get_column_indices(doc, value_header);
  if (key_idx.empty())
    throw Error(Errc::MissingColumn, "no column named '" + std::string(key_header) + "'");
  if (value_idx.empty())
    throw Error(Errc::MissingColumn, "no column named '" + std::string(value_header) + "'");
  const std::size_t ki = key_idx.front();
  const std::size_t vi = value_idx.front();

  KeyValueBlock block;
  for (const auto& row : doc.data) {
    const std::string key = ki < row.size() ? row[ki] : std::string();
    if (key == "END") {
      block.terminated = true;
      break;
    }
    if (key.empty() || key == empty_marker) break;
    block.entries.emplace_back(key, vi < row.size() ? row[vi] : std::string());
  }
  return block;
}

Document append_kv_columns(const Document& doc, const KeyValueBlock& block,
                           std::string_view key_header, std::string_view value_header,
                           const std::string& empty_marker) {
  const std::size_t needed = block.entries.size() + (block.terminated ? 1 : 0);
  if (needed > doc.row_count())
    throw Error(Errc::BlockLongerThanData,
                "block needs " + std::to_string(needed) + " rows but the table has " +
                    std::to_string(doc.row_count()));
  Document out = add_columns(doc, {std::string(key_header), std::string(value_header)},
                             {"TEXT", "TEXT"}, {50, 50}, empty_marker);
  const std::size_t ki = out.column_count() - 2;
  for (std::size_t i = 0; i < block.entries.size(); ++i) {
    out.data[i][ki] = block.entries[i].first;
    out.data[i][ki + 1] = block.entries[i].second;
  }
  if (block.terminated) {
    out.data[block.entries.size()][ki] = "END";
    out.data[block.entries.size()][ki + 1] = empty_marker;
  }
  return out;
}

SchemaModel parse_db_schema(const Document& doc, std::vector<std::string>* warnings) {
  SchemaModel model;
  bool seen_db = false;
  auto cell = [](const std::vector<std::string>& row, std::size_t i) {
    return i < row.size() ? row[i] : std::string();
  };
  auto index_at = [](const std::string& token, std::size_t row_no, const char* what) {
    auto v = detail::parse_nonneg_long(token);
    if (!v)
      throw Error(Errc::MalformedRow, "row " + std::to_string(row_no) + ": " + what + " '" +
                                          token + "' is not a non-negative column index");
    return *v;
  };
  for (std::size_t r = 0; r < doc.data.size(); ++r) {
    const auto& row = doc.data[r];
    const std::string kw = cell(row, 0);
    if (kw == "DB") {
      if (row.size() < 5)
        throw Error(Errc::MalformedRow,
                    "row " + std::to_string(r) + ": DB needs host, user, password and name");
      if (seen_db && warnings)
        warnings->push_back("row " + std::to_string(r) + ": repeated DB row, keeping the last");
      seen_db = true;
      model.db_host = row[1];
      model.db_user = row[2];
      model.db_password_slot = row[3];
      model.db_name = row[4];
    } else if (kw == "TABLE") {
      if (row.size() < 4)
        throw Error(Errc::MalformedRow,
                    "row " + std::to_string(r) + ": TABLE needs name, file and key column");
      model.tables.push_back({row[1], row[2], index_at(row[3], r, "key column")});
    } else if (kw == "FOREIGN") {
      if (row.size() < 5)
        throw Error(Errc::MalformedRow,
                    "row " + std::to_string(r) + ": FOREIGN needs table, column, table, column");
      model.foreign_keys.push_back(
          {row[1], index_at(row[2], r, "column"), row[3], index_at(row[4], r, "column")});
    } else if (warnings) {
      warnings->push_back("row " + std::to_string(r) + ": unknown keyword '" + kw + "' ignored");
    }
  }
  for (const auto& fk : model.foreign_keys) {
    auto declared = [&](const std::string& name) {
      return std::any_of(model.tables.begin(), model.tables.end(),
                         [&](const SchemaTable& t) { return t.name == name; });
    };
    if (!declared(fk.from_table))
      throw Error(Errc::ForeignKeyToUndeclaredTable,
                  "foreign key references undeclared table '" + fk.from_table + "'");
    if (!declared(fk.to_table))
      throw Error(Errc::ForeignKeyToUndeclaredTable,
                  "foreign key references undeclared table '" + fk.to_table + "'");
  }
  return model;
}

std::vector<std::string> split_multivalue_cell(std::string_view cell,
                                               std::string_view secondary_delimiter,
                                               std::string_view empty_marker) {
  if (cell.empty() || cell == empty_marker) return {};
  if (secondary_delimiter.empty())
    throw Error(Errc::InvalidArgument, "the secondary delimiter cannot be empty");
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = cell.find(secondary_delimiter, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(cell.substr(start));
      return out;
    }
    out.emplace_back(cell.substr(start, pos - start));
    start = pos + secondary_delimiter.size();
  }
}

}  // namespace csvm
