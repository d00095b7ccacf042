#include "csvm/document.hpp"

#include <algorithm>
#include <string>

#include "internal_util.hpp"

namespace csvm {

namespace {

constexpr long kDefaultWidth = 50;
constexpr const char* kDefaultType = "TEXT";

enum class Kw { Title, Header, Type, Width, Meta, None };

// A '#' row is metadata only when the keyword is followed by the live
// delimiter or by the end of the line; "#TITLEX" stays a comment.
Kw match_keyword(std::string_view after_hash, char delimiter, std::size_t* kw_len) {
  struct Entry {
    std::string_view word;
    Kw kw;
  };
  static constexpr Entry kTable[] = {
      {"TITLE", Kw::Title}, {"HEADER", Kw::Header}, {"TYPE", Kw::Type},
      {"WIDTH", Kw::Width}, {"META", Kw::Meta},
  };
  for (const auto& e : kTable) {
    if (after_hash.substr(0, e.word.size()) == e.word &&
        (after_hash.size() == e.word.size() || after_hash[e.word.size()] == delimiter)) {
      *kw_len = e.word.size();
      return e.kw;
    }
  }
  return Kw::None;
}

std::vector<std::string> keyword_values(std::string_view after_hash, std::size_t kw_len,
                                        char delimiter) {
  if (after_hash.size() == kw_len) return {};
  return detail::split(after_hash.substr(kw_len + 1), delimiter);
}

void warn(std::vector<std::string>* sink, std::string message) {
  if (sink) sink->push_back(std::move(message));
}

}  // namespace

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::InvalidEncoding: return "InvalidEncoding";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::DuplicateHeader: return "DuplicateHeader";
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::AmbiguousColumn: return "AmbiguousColumn";
    case Errc::OddTokenCount: return "OddTokenCount";
    case Errc::CountMismatch: return "CountMismatch";
    case Errc::NonNumericCell: return "NonNumericCell";
    case Errc::ForeignKeyToUndeclaredTable: return "ForeignKeyToUndeclaredTable";
    case Errc::BlockLongerThanData: return "BlockLongerThanData";
    case Errc::MalformedResult: return "MalformedResult";
    case Errc::RootNotFound: return "RootNotFound";
    case Errc::PermissionDenied: return "PermissionDenied";
    case Errc::DegenerateCurve: return "DegenerateCurve";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::InsufficientPoints: return "InsufficientPoints";
    case Errc::SingularDesign: return "SingularDesign";
    case Errc::NonPositiveSlope: return "NonPositiveSlope";
    case Errc::UnknownSpecies: return "UnknownSpecies";
    case Errc::UnknownRate: return "UnknownRate";
    case Errc::MalformedExpression: return "MalformedExpression";
    case Errc::NegativeConcentration: return "NegativeConcentration";
    case Errc::NonFiniteState: return "NonFiniteState";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

std::size_t Document::column_count() const {
  if (!headers.empty()) return headers.size();
  std::size_t c = 0;
  for (const auto& row : data) c = std::max(c, row.size());
  return c;
}

bool operator==(const Document& a, const Document& b) {
  return a.kind == b.kind && a.title == b.title && a.headers == b.headers &&
         a.col_types == b.col_types && a.widths == b.widths && a.meta == b.meta &&
         a.data == b.data && a.annotations == b.annotations;
}

Document parse_document(std::string_view text, const ParseOptions& options,
                        std::vector<std::string>* warnings) {
  if (!detail::is_valid_utf8(text))
    throw Error(Errc::InvalidEncoding, "input is not valid UTF-8");

  Document doc;
  bool seen_title = false, seen_header = false, seen_type = false, seen_width = false,
       seen_meta = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    if (pos == text.size() && line_no > 0) break;
    std::size_t eol = text.find('\n', pos);
    std::string_view line =
        eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    if (line[0] == '#') {
      std::string_view after_hash = line.substr(1);
      std::size_t kw_len = 0;
      Kw kw = match_keyword(after_hash, options.delimiter, &kw_len);
      if (kw == Kw::None) {
        if (options.keep_annotations)
          doc.annotations.push_back({doc.data.size(), std::string(line)});
        continue;
      }
      doc.kind = Kind::Csvm;
      std::vector<std::string> values = keyword_values(after_hash, kw_len, options.delimiter);
      switch (kw) {
        case Kw::Title:
          if (seen_title) warn(warnings, "line " + std::to_string(line_no) + ": repeated #TITLE row, keeping the last");
          seen_title = true;
          doc.title = values.empty() ? std::string() : values[0];
          if (values.size() > 1)
            warn(warnings, "line " + std::to_string(line_no) + ": #TITLE row has extra cells, ignored");
          break;
        case Kw::Meta:
          if (seen_meta) warn(warnings, "line " + std::to_string(line_no) + ": repeated #META row, keeping the last");
          seen_meta = true;
          doc.meta = values.empty() ? std::string() : values[0];
          if (values.size() > 1)
            warn(warnings, "line " + std::to_string(line_no) + ": #META row has extra cells, ignored");
          break;
        case Kw::Header:
          if (seen_header) warn(warnings, "line " + std::to_string(line_no) + ": repeated #HEADER row, keeping the last");
          seen_header = true;
          doc.headers = std::move(values);
          break;
        case Kw::Type:
          if (seen_type) warn(warnings, "line " + std::to_string(line_no) + ": repeated #TYPE row, keeping the last");
          seen_type = true;
          doc.col_types = std::move(values);
          break;
        case Kw::Width: {
          if (seen_width) {
            warn(warnings, "line " + std::to_string(line_no) + ": repeated #WIDTH row, keeping the last");
            doc.width_errors.clear();
          }
          seen_width = true;
          doc.widths.clear();
          for (std::size_t i = 0; i < values.size(); ++i) {
            auto w = detail::parse_nonneg_long(values[i]);
            if (w) {
              doc.widths.push_back(*w);
            } else {
              doc.width_errors.emplace_back(i, values[i]);
              doc.widths.push_back(kDefaultWidth);
              warn(warnings, "line " + std::to_string(line_no) + ": width entry " +
                                 std::to_string(i) + " ('" + values[i] +
                                 "') is not a non-negative integer, using default");
            }
          }
          break;
        }
        case Kw::None:
          break;
      }
      continue;
    }
    doc.data.push_back(detail::split(line, options.delimiter));
  }

  // Reconcile the three column lists against the header row. When only
  // TYPE/WIDTH were given the columns exist but have no names yet.
  if (doc.kind == Kind::Csvm) {
    std::size_t cols = seen_header ? doc.headers.size()
                                   : std::max(doc.col_types.size(), doc.widths.size());
    if (!seen_header && cols > 0) {
      doc.headers.assign(cols, options.empty_marker);
      warn(warnings, "column types or widths given without a #HEADER row; pending names supplied");
    }
    if (doc.col_types.size() > cols) {
      warn(warnings, "#TYPE row longer than the header row, truncated");
      doc.col_types.resize(cols);
    }
    while (doc.col_types.size() < cols) doc.col_types.push_back(kDefaultType);
    if (doc.widths.size() > cols) {
      warn(warnings, "#WIDTH row longer than the header row, truncated");
      doc.widths.resize(cols);
      std::erase_if(doc.width_errors, [cols](const auto& e) { return e.first >= cols; });
    }
    while (doc.widths.size() < cols) doc.widths.push_back(kDefaultWidth);
  }

  const std::size_t cols = doc.column_count();
  for (std::size_t r = 0; r < doc.data.size(); ++r) {
    auto& row = doc.data[r];
    if (row.size() > cols)
      throw Error(Errc::MalformedRow, "data row " + std::to_string(r) + " has " +
                                          std::to_string(row.size()) + " cells but only " +
                                          std::to_string(cols) + " columns are declared");
    if (row.size() < cols) {
      if (options.short_rows == ShortRowPolicy::Error)
        throw Error(Errc::MalformedRow, "data row " + std::to_string(r) + " has " +
                                            std::to_string(row.size()) + " cells, expected " +
                                            std::to_string(cols));
      row.resize(cols, options.empty_marker);
    }
  }
  return doc;
}

std::string serialize_document(const Document& doc, const ParseOptions& options) {
  {
    auto violations = validate_document(doc);
    if (!violations.empty())
      throw Error(Errc::InvariantViolation, violations.front());
  }
  const char d = options.delimiter;
  auto check_scalar = [&](const std::string& value, const char* what) {
    if (value.find(d) != std::string::npos)
      throw Error(Errc::InvariantViolation,
                  std::string(what) + " contains the delimiter and cannot be written");
  };
  check_scalar(doc.title, "title");
  check_scalar(doc.meta, "meta");
  for (const auto& h : doc.headers) check_scalar(h, "header entry");
  for (const auto& t : doc.col_types) check_scalar(t, "type entry");
  for (const auto& a : doc.annotations) {
    std::size_t kw_len = 0;
    if (match_keyword(std::string_view(a.text).substr(1), d, &kw_len) != Kw::None)
      throw Error(Errc::InvariantViolation,
                  "comment '" + a.text + "' would be read back as a metadata row");
  }

  // Annotations are stored in file order, but tolerate hand-built
  // documents whose positions are unsorted.
  std::vector<Annotation> ordered = doc.annotations;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Annotation& a, const Annotation& b) { return a.position < b.position; });

  std::string out;
  std::size_t ai = 0;
  for (std::size_t r = 0; r <= doc.data.size(); ++r) {
    while (ai < ordered.size() && ordered[ai].position <= r) {
      out += ordered[ai].text;
      out += '\n';
      ++ai;
    }
    if (r == doc.data.size()) break;
    const auto& row = doc.data[r];
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string& cell = row[c];
      if (cell.find(d) != std::string::npos)
        throw Error(Errc::InvariantViolation,
                    "cell (" + std::to_string(r) + "," + std::to_string(c) +
                        ") contains the delimiter and cannot be written");
      if (c) out += d;
      out += cell.empty() ? options.empty_marker : cell;
    }
    out += '\n';
  }

  if (doc.kind == Kind::Csvm) {
    out += "#TITLE";
    out += d;
    out += doc.title;
    out += '\n';
    out += "#HEADER";
    for (const auto& h : doc.headers) {
      out += d;
      out += h;
    }
    out += '\n';
    out += "#TYPE";
    for (const auto& t : doc.col_types) {
      out += d;
      out += t;
    }
    out += '\n';
    out += "#WIDTH";
    for (long w : doc.widths) {
      out += d;
      out += std::to_string(w);
    }
    out += '\n';
    out += "#META";
    out += d;
    out += doc.meta;
    out += '\n';
  }
  return out;
}

std::string dump_document(const Document& doc) {
  std::string out = "DUMP: CSVM info {\n";
  out += "SOURCE";
  if (!doc.source.empty()) {
    out += ' ';
    out += doc.source;
  }
  out += '\n';
  out += "CSV ";
  out += doc.kind == Kind::Csvm ? "CSVM" : "CSV";
  out += '\n';
  out += "META [" + doc.meta + "]\n";
  out += "TITLE_N 1\n";
  out += "TITLE";
  if (!doc.title.empty()) {
    out += ' ';
    out += doc.title;
  }
  out += '\n';
  out += "HEADER_N " + std::to_string(doc.headers.size()) + '\n';
  out += "TYPE_N " + std::to_string(doc.col_types.size()) + '\n';
  out += "WIDTH_N " + std::to_string(doc.widths.size()) + '\n';
  for (std::size_t i = 0; i < doc.headers.size(); ++i) {
    long w = i < doc.widths.size() ? doc.widths[i] : kDefaultWidth;
    const std::string& t = i < doc.col_types.size() ? doc.col_types[i] : std::string(kDefaultType);
    out += std::to_string(i) + ' ' + std::to_string(w) + ' ' + t + " {" + doc.headers[i] + "}\n";
  }
  const std::size_t rows = doc.row_count();
  const std::size_t cols = doc.column_count();
  out += "DATA_R " + std::to_string(rows) + '\n';
  out += "DATA_C " + std::to_string(cols) + '\n';
  out += std::to_string(rows) + ' ' + std::to_string(cols) + '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    out += std::to_string(r) + ' ';
    for (const auto& cell : doc.data[r]) {
      out += '[';
      out += cell;
      out += ']';
    }
    out += '\n';
  }
  out += "}\n";
  return out;
}

std::vector<std::string> validate_document(const Document& doc) {
  std::vector<std::string> v;
  if (doc.kind == Kind::Csv) {
    if (!doc.title.empty()) v.push_back("kind is CSV but a title is set");
    if (!doc.meta.empty()) v.push_back("kind is CSV but meta is set");
    if (!doc.headers.empty()) v.push_back("kind is CSV but headers are set");
    if (!doc.col_types.empty()) v.push_back("kind is CSV but column types are set");
    if (!doc.widths.empty()) v.push_back("kind is CSV but widths are set");
  }
  auto pair_check = [&](std::size_t a, std::size_t b, const char* na, const char* nb) {
    if (a != 0 && b != 0 && a != b)
      v.push_back(std::string(na) + " has " + std::to_string(a) + " entries but " + nb +
                  " has " + std::to_string(b));
  };
  pair_check(doc.headers.size(), doc.col_types.size(), "the header row", "the type row");
  pair_check(doc.headers.size(), doc.widths.size(), "the header row", "the width row");
  pair_check(doc.col_types.size(), doc.widths.size(), "the type row", "the width row");

  for (std::size_t i = 0; i < doc.widths.size(); ++i)
    if (doc.widths[i] < 0)
      v.push_back("width " + std::to_string(i) + " is negative");
  for (const auto& [index, token] : doc.width_errors)
    v.push_back("width entry " + std::to_string(index) + " ('" + token +
                "') is not a non-negative integer");

  auto scalar_check = [&](const std::string& s, const std::string& what) {
    if (s.find('\n') != std::string::npos || s.find('\r') != std::string::npos)
      v.push_back(what + " contains a line break");
  };
  scalar_check(doc.title, "the title");
  scalar_check(doc.meta, "the meta field");
  for (std::size_t i = 0; i < doc.headers.size(); ++i)
    scalar_check(doc.headers[i], "header " + std::to_string(i));
  for (std::size_t i = 0; i < doc.col_types.size(); ++i)
    scalar_check(doc.col_types[i], "type " + std::to_string(i));

  const std::size_t cols = doc.column_count();
  for (std::size_t r = 0; r < doc.data.size(); ++r) {
    const auto& row = doc.data[r];
    if (row.size() != cols)
      v.push_back("data row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                  " cells, expected " + std::to_string(cols));
    for (std::size_t c = 0; c < row.size(); ++c)
      scalar_check(row[c], "cell (" + std::to_string(r) + "," + std::to_string(c) + ")");
    if (!row.empty() && !row[0].empty() && row[0][0] == '#')
      v.push_back("data row " + std::to_string(r) +
                  " starts with '#' and would be read back as a comment");
  }
  for (std::size_t i = 0; i < doc.annotations.size(); ++i) {
    const auto& a = doc.annotations[i];
    if (a.text.empty() || a.text[0] != '#')
      v.push_back("comment " + std::to_string(i) + " does not start with '#'");
    scalar_check(a.text, "comment " + std::to_string(i));
    if (a.position > doc.data.size())
      v.push_back("comment " + std::to_string(i) + " is positioned past the last data row");
  }
  return v;
}

Document clear_document(const Document&) { return Document{}; }

}  // namespace csvm
