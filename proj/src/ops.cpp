#include "csvm/ops.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include "internal_util.hpp"

namespace csvm {

namespace {

bool term_matches(const std::string& cell, const std::string& term, bool strict) {
  if (strict) return detail::trim(cell) == term;
  return cell.find(term) != std::string::npos;
}

// Shared engine for column and row queries: `cell_at(i)` addresses the
// i-th candidate. Or keeps per-term hit order (first occurrence wins),
// And intersects and therefore comes out ascending.
std::vector<std::size_t> run_query(std::size_t count,
                                   const std::function<const std::string&(std::size_t)>& cell_at,
                                   const QuerySpec& spec) {
  if (spec.terms.empty())
    throw Error(Errc::InvalidArgument, "a query needs at least one term");
  std::vector<std::vector<std::size_t>> per_term;
  per_term.reserve(spec.terms.size());
  for (const auto& term : spec.terms) {
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < count; ++i) {
      bool m = term_matches(cell_at(i), term, spec.strict);
      if (spec.negate) m = !m;
      if (m) hits.push_back(i);
    }
    per_term.push_back(std::move(hits));
  }
  std::vector<std::size_t> out;
  if (spec.combiner == Combiner::Or) {
    std::unordered_set<std::size_t> seen;
    for (const auto& hits : per_term)
      for (std::size_t i : hits)
        if (seen.insert(i).second) out.push_back(i);
  } else {
    std::vector<char> in_all(count, 1);
    for (const auto& hits : per_term) {
      std::vector<char> here(count, 0);
      for (std::size_t i : hits) here[i] = 1;
      for (std::size_t i = 0; i < count; ++i) in_all[i] &= here[i];
    }
    for (std::size_t i = 0; i < count; ++i)
      if (in_all[i]) out.push_back(i);
  }
  return out;
}

bool is_pending(const std::string& name, const std::string& empty_marker) {
  return name.empty() || name == empty_marker;
}

// Column names padded out to the column count, so headerless documents
// take part in set operations as all-pending.
std::vector<std::string> effective_headers(const Document& doc, const std::string& empty_marker) {
  std::vector<std::string> h = doc.headers;
  h.resize(doc.column_count(), empty_marker);
  return h;
}

void check_no_duplicate_names(const std::vector<std::string>& headers,
                              const std::string& empty_marker, const char* side) {
  std::unordered_set<std::string> seen;
  for (const auto& h : headers) {
    if (is_pending(h, empty_marker)) continue;
    if (!seen.insert(h).second)
      throw Error(Errc::DuplicateHeader,
                  std::string(side) + " input names column '" + h + "' more than once");
  }
}

std::string type_of(const Document& doc, std::size_t i) {
  return i < doc.col_types.size() ? doc.col_types[i] : std::string("TEXT");
}

long width_of(const Document& doc, std::size_t i) {
  return i < doc.widths.size() ? doc.widths[i] : 50;
}

}  // namespace

std::vector<std::size_t> get_column_indices(const Document& doc, std::string_view name) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < doc.headers.size(); ++i)
    if (doc.headers[i] == name) out.push_back(i);
  return out;
}

std::pair<std::size_t, std::vector<std::string>> get_column(const Document& doc,
                                                            std::string_view pattern,
                                                            bool strict) {
  const std::string term(pattern);
  std::size_t matches = 0;
  std::size_t first = 0;
  for (std::size_t i = 0; i < doc.headers.size(); ++i) {
    if (term_matches(doc.headers[i], term, strict)) {
      if (matches == 0) first = i;
      ++matches;
    }
  }
  std::vector<std::string> values;
  if (matches > 0) {
    values.reserve(doc.data.size());
    for (const auto& row : doc.data)
      values.push_back(first < row.size() ? row[first] : std::string());
  }
  return {matches, std::move(values)};
}

Document add_columns(const Document& doc, const std::vector<std::string>& names,
                     const std::vector<std::string>& types, const std::vector<long>& widths,
                     const std::string& fill) {
  if (names.size() != types.size() || names.size() != widths.size())
    throw Error(Errc::LengthMismatch, "names, types and widths must have equal lengths");
  Document out = doc;
  out.kind = Kind::Csvm;
  const std::size_t old_cols = out.column_count();
  out.headers.resize(old_cols, "-");
  out.col_types.resize(old_cols, "TEXT");
  out.widths.resize(old_cols, 50);
  out.headers.insert(out.headers.end(), names.begin(), names.end());
  out.col_types.insert(out.col_types.end(), types.begin(), types.end());
  out.widths.insert(out.widths.end(), widths.begin(), widths.end());
  for (auto& row : out.data) {
    row.resize(old_cols, "-");
    row.insert(row.end(), names.size(), fill);
  }
  return out;
}

Document rename_column(const Document& doc, std::size_t index, const std::string& new_name) {
  if (index >= doc.headers.size())
    throw Error(Errc::IndexOutOfRange, "column " + std::to_string(index) +
                                           " does not exist (document has " +
                                           std::to_string(doc.headers.size()) + " named columns)");
  Document out = doc;
  out.headers[index] = new_name;
  return out;
}

Document union_tables(const Document& a, const Document& b, const std::string& empty_marker,
                      std::vector<std::string>* warnings) {
  const auto ha = effective_headers(a, empty_marker);
  const auto hb = effective_headers(b, empty_marker);
  check_no_duplicate_names(ha, empty_marker, "left");
  check_no_duplicate_names(hb, empty_marker, "right");

  std::unordered_map<std::string, std::size_t> b_by_name;
  for (std::size_t i = 0; i < hb.size(); ++i)
    if (!is_pending(hb[i], empty_marker)) b_by_name.emplace(hb[i], i);

  struct Col {
    bool from_a;          // column carried over from a (may also map into b)
    std::size_t a_index;  // valid when from_a
    std::size_t b_index;  // SIZE_MAX when the column never reads from b
  };
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<Col> cols;
  Document out;
  out.kind = Kind::Csvm;
  for (std::size_t i = 0; i < ha.size(); ++i) {
    std::size_t bi = kNone;
    if (!is_pending(ha[i], empty_marker)) {
      auto it = b_by_name.find(ha[i]);
      if (it != b_by_name.end()) {
        bi = it->second;
        if (warnings && type_of(b, bi) != type_of(a, i))
          warnings->push_back("column '" + ha[i] + "': type " + type_of(b, bi) +
                              " on the right, keeping " + type_of(a, i));
        if (warnings && width_of(b, bi) != width_of(a, i))
          warnings->push_back("column '" + ha[i] + "': width " +
                              std::to_string(width_of(b, bi)) + " on the right, keeping " +
                              std::to_string(width_of(a, i)));
      }
    }
    cols.push_back({true, i, bi});
    out.headers.push_back(ha[i]);
    out.col_types.push_back(type_of(a, i));
    out.widths.push_back(width_of(a, i));
  }
  std::unordered_set<std::string> a_names;
  for (const auto& h : ha)
    if (!is_pending(h, empty_marker)) a_names.insert(h);
  for (std::size_t i = 0; i < hb.size(); ++i) {
    if (!is_pending(hb[i], empty_marker) && a_names.count(hb[i])) continue;
    cols.push_back({false, 0, i});
    out.headers.push_back(hb[i]);
    out.col_types.push_back(type_of(b, i));
    out.widths.push_back(width_of(b, i));
  }

  for (const auto& row : a.data) {
    std::vector<std::string> r;
    r.reserve(cols.size());
    for (const auto& col : cols)
      r.push_back(col.from_a && col.a_index < row.size() ? row[col.a_index] : empty_marker);
    out.data.push_back(std::move(r));
  }
  for (const auto& row : b.data) {
    std::vector<std::string> r;
    r.reserve(cols.size());
    for (const auto& col : cols)
      r.push_back(col.b_index != kNone && col.b_index < row.size() ? row[col.b_index]
                                                                   : empty_marker);
    out.data.push_back(std::move(r));
  }
  out.title = a.title.empty() ? b.title : a.title;
  out.meta = a.meta.empty() ? b.meta : a.meta;
  return out;
}

std::optional<Document> intersect_tables(const Document& a, const Document& b,
                                         const std::string& empty_marker) {
  const auto ha = effective_headers(a, empty_marker);
  const auto hb = effective_headers(b, empty_marker);
  check_no_duplicate_names(ha, empty_marker, "left");
  check_no_duplicate_names(hb, empty_marker, "right");

  std::unordered_map<std::string, std::size_t> b_by_name;
  for (std::size_t i = 0; i < hb.size(); ++i)
    if (!is_pending(hb[i], empty_marker)) b_by_name.emplace(hb[i], i);

  std::vector<std::pair<std::size_t, std::size_t>> shared;  // (a index, b index)
  Document out;
  out.kind = Kind::Csvm;
  for (std::size_t i = 0; i < ha.size(); ++i) {
    if (is_pending(ha[i], empty_marker)) continue;
    auto it = b_by_name.find(ha[i]);
    if (it == b_by_name.end()) continue;
    shared.emplace_back(i, it->second);
    out.headers.push_back(ha[i]);
    out.col_types.push_back(type_of(a, i));
    out.widths.push_back(width_of(a, i));
  }
  if (shared.empty()) return std::nullopt;

  for (const auto& row : a.data) {
    std::vector<std::string> r;
    r.reserve(shared.size());
    for (const auto& [aidx, bidx] : shared)
      r.push_back(aidx < row.size() ? row[aidx] : empty_marker);
    out.data.push_back(std::move(r));
  }
  for (const auto& row : b.data) {
    std::vector<std::string> r;
    r.reserve(shared.size());
    for (const auto& [aidx, bidx] : shared)
      r.push_back(bidx < row.size() ? row[bidx] : empty_marker);
    out.data.push_back(std::move(r));
  }
  out.title = a.title.empty() ? b.title : a.title;
  out.meta = a.meta.empty() ? b.meta : a.meta;
  return out;
}

std::vector<std::size_t> query_columns(const Matrix& matrix, const QuerySpec& spec,
                                       std::size_t col) {
  for (std::size_t r = 0; r < matrix.size(); ++r)
    if (col >= matrix[r].size())
      throw Error(Errc::IndexOutOfRange, "row " + std::to_string(r) + " has no column " +
                                             std::to_string(col));
  return run_query(
      matrix.size(), [&](std::size_t i) -> const std::string& { return matrix[i][col]; }, spec);
}

std::vector<std::size_t> query_row(const std::vector<std::string>& row, const QuerySpec& spec) {
  return run_query(
      row.size(), [&](std::size_t i) -> const std::string& { return row[i]; }, spec);
}

LookupFillResult lookup_fill(const Document& target, const Document& source,
                             std::string_view key_header, std::string_view value_header,
                             std::string_view dest_header, std::vector<std::string>* warnings) {
  auto one_index = [](const Document& doc, std::string_view name, const char* side) {
    auto idx = get_column_indices(doc, name);
    if (idx.empty())
      throw Error(Errc::MissingColumn,
                  std::string(side) + " has no column named '" + std::string(name) + "'");
    return idx.front();
  };
  const std::size_t key_t = one_index(target, key_header, "the target");
  const std::size_t dest_t = one_index(target, dest_header, "the target");
  const std::size_t key_s = one_index(source, key_header, "the source");
  const std::size_t value_s = one_index(source, value_header, "the source");

  std::unordered_map<std::string, std::size_t> first_row;
  for (std::size_t r = 0; r < source.data.size(); ++r) {
    const auto& row = source.data[r];
    if (key_s >= row.size()) continue;
    auto [it, inserted] = first_row.emplace(row[key_s], r);
    if (!inserted && warnings)
      warnings->push_back("source key '" + row[key_s] + "' repeats at row " + std::to_string(r) +
                          ", keeping row " + std::to_string(it->second));
  }

  LookupFillResult result;
  result.document = target;
  for (auto& row : result.document.data) {
    if (key_t >= row.size() || dest_t >= row.size()) continue;
    auto it = first_row.find(row[key_t]);
    if (it == first_row.end()) {
      result.not_found.push_back(row[key_t]);
      continue;
    }
    const auto& srow = source.data[it->second];
    row[dest_t] = value_s < srow.size() ? srow[value_s] : std::string();
    ++result.added;
  }
  return result;
}

std::vector<Document> split_series(const Document& doc, std::string_view time_header,
                                   const std::string& empty_marker) {
  auto idx = get_column_indices(doc, time_header);
  if (idx.empty())
    throw Error(Errc::MissingColumn,
                "no column named '" + std::string(time_header) + "' to use as the time axis");
  if (idx.size() > 1)
    throw Error(Errc::AmbiguousColumn,
                "column '" + std::string(time_header) + "' appears more than once");
  const std::size_t t = idx.front();

  std::vector<Document> out;
  for (std::size_t c = 0; c < doc.column_count(); ++c) {
    if (c == t) continue;
    Document series;
    series.kind = Kind::Csvm;
    series.title = doc.title;
    series.headers = {doc.headers[t], c < doc.headers.size() ? doc.headers[c] : empty_marker};
    series.col_types = {type_of(doc, t), type_of(doc, c)};
    series.widths = {width_of(doc, t), width_of(doc, c)};
    for (const auto& row : doc.data) {
      if (c >= row.size() || row[c] == empty_marker) continue;
      series.data.push_back({t < row.size() ? row[t] : std::string(), row[c]});
    }
    out.push_back(std::move(series));
  }
  return out;
}

}  // namespace csvm
