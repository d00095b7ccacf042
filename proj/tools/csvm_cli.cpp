#include <CLI11.hpp>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "csvm/catalog.hpp"
#include "csvm/convert.hpp"
#include "csvm/document.hpp"
#include "csvm/kinetics.hpp"
#include "csvm/ode.hpp"
#include "csvm/ops.hpp"

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw csvm::Error(csvm::Errc::RootNotFound, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw csvm::Error(csvm::Errc::RootNotFound, "cannot write " + out_path);
  out << text;
}

char parse_delimiter(const std::string& text) {
  if (text == "\\t" || text == "tab" || text == "TAB") return '\t';
  if (text.size() == 1) {
    const char c = text[0];
    if (c == '#' || c == '\n' || c == '\r')
      throw csvm::Error(csvm::Errc::InvalidArgument, "'" + text + "' cannot be the delimiter");
    return c;
  }
  throw csvm::Error(csvm::Errc::InvalidArgument,
                    "the delimiter must be one character, 'tab' or '\\t'");
}

void report_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "csvm: warning: " << w << "\n";
}

std::string sanitize_name(const std::string& name) {
  std::string out;
  for (char c : name)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out.empty() ? std::string("column") : out;
}

std::string format_indices(const std::vector<std::size_t>& indices) {
  std::string out;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(indices[i]);
  }
  if (!out.empty()) out += '\n';
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular files with an embedded metadata block: parse, dump, "
               "convert, combine, query, catalog, fit and simulate"};
  app.require_subcommand(1);
  app.fallthrough(true);

  std::string delimiter_text = "\\t";
  std::string empty_marker = "-";
  bool keep_annotations = false;
  app.add_option("-d,--delimiter", delimiter_text,
                 "cell delimiter: one character, 'tab' or '\\t'")
      ->envname("CSVM_DELIMITER");
  app.add_option("-m,--empty-marker", empty_marker, "token standing for an empty cell");
  app.add_flag("--keep-annotations", keep_annotations, "retain '#' comment rows");

  int rc = 0;
  auto options = [&]() {
    csvm::ParseOptions o;
    o.delimiter = parse_delimiter(delimiter_text);
    o.empty_marker = empty_marker;
    o.keep_annotations = keep_annotations;
    return o;
  };
  auto load = [&](const std::string& path) {
    std::vector<std::string> warnings;
    csvm::Document doc = csvm::parse_document(read_file(path), options(), &warnings);
    report_warnings(warnings);
    doc.source = path;
    return doc;
  };

  // dump
  {
    auto* cmd = app.add_subcommand("dump", "print the fixed-layout summary of one file");
    auto file = std::make_shared<std::string>();
    cmd->add_option("file", *file, "input file")->required();
    cmd->callback([&, file] { std::cout << csvm::dump_document(load(*file)); });
  }

  // convert
  {
    auto* cmd = app.add_subcommand("convert", "translate between exchange formats");
    struct Args {
      std::string file, from, to, out, label;
      std::vector<std::string> flags, getf;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("file", a->file, "input file")->required();
    cmd->add_option("--from", a->from, "input format")
        ->required()
        ->check(CLI::IsMember({"csvm", "csv", "xy", "solver"}));
    cmd->add_option("--to", a->to, "output format")
        ->required()
        ->check(CLI::IsMember({"csvm", "csv", "solver", "js"}));
    cmd->add_option("-o,--output", a->out, "output file (default stdout)");
    cmd->add_option("--label", a->label, "source label written into solver trailers");
    cmd->add_option("--flags", a->flags, "flag list for the js table")->delimiter(',');
    cmd->add_option("--getf", a->getf, "getfield list for the js table")->delimiter(',');
    cmd->callback([&, a] {
      const auto opts = options();
      csvm::Document doc;
      if (a->from == "csvm") {
        doc = load(a->file);
      } else if (a->from == "csv") {
        doc = csvm::from_plain_csv(read_file(a->file), opts.delimiter);
      } else if (a->from == "xy") {
        std::vector<std::string> warnings;
        doc = csvm::from_xy_pairs(read_file(a->file), &warnings);
        report_warnings(warnings);
      } else {
        doc = csvm::parse_solver_two_column(read_file(a->file)).series;
      }
      std::string text;
      if (a->to == "csvm") {
        text = csvm::serialize_document(doc, opts);
      } else if (a->to == "csv") {
        text = csvm::to_plain_csv(doc, opts.delimiter);
      } else if (a->to == "solver") {
        if (doc.column_count() != 2)
          throw csvm::Error(csvm::Errc::InvalidArgument,
                            "solver output needs a two-column table");
        const std::string hx = doc.headers.size() > 0 ? doc.headers[0] : "X";
        const std::string hy = doc.headers.size() > 1 ? doc.headers[1] : "Y";
        text = csvm::to_solver_two_column(doc, hx, hy,
                                          a->label.empty() ? a->file : a->label);
      } else {
        const std::vector<std::string>& flags = a->flags.empty() ? doc.headers : a->flags;
        const std::vector<std::string>& getf = a->getf.empty() ? doc.headers : a->getf;
        text = csvm::to_javascript_table(doc, flags, getf);
      }
      write_output(text, a->out);
    });
  }

  // query
  {
    auto* cmd = app.add_subcommand("query", "match terms against a column or a row");
    struct Args {
      std::string file;
      long long col = -1, row = -1;
      std::vector<std::string> terms;
      bool use_and = false, use_or = false, strict = false, inc = false, negate = false;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("file", a->file, "input file")->required();
    auto* col = cmd->add_option("--col", a->col, "column index to search");
    auto* row = cmd->add_option("--row", a->row, "row index to search");
    col->excludes(row);
    cmd->add_option("--terms", a->terms, "one or more search terms")->required()->expected(-1);
    cmd->add_flag("--and", a->use_and, "every term must match");
    cmd->add_flag("--or", a->use_or, "any term may match (default)");
    cmd->add_flag("--strict", a->strict, "whole-cell comparison, trimmed (default)");
    cmd->add_flag("--inc", a->inc, "substring comparison");
    cmd->add_flag("--not", a->negate, "invert each term before combining");
    cmd->callback([&, a] {
      if ((a->col < 0) == (a->row < 0))
        throw csvm::Error(csvm::Errc::InvalidArgument, "give exactly one of --col or --row");
      if (a->use_and && a->use_or)
        throw csvm::Error(csvm::Errc::InvalidArgument, "--and and --or conflict");
      if (a->strict && a->inc)
        throw csvm::Error(csvm::Errc::InvalidArgument, "--strict and --inc conflict");
      csvm::QuerySpec spec;
      spec.terms = a->terms;
      spec.combiner = a->use_and ? csvm::Combiner::And : csvm::Combiner::Or;
      spec.strict = !a->inc;
      spec.negate = a->negate;
      const csvm::Document doc = load(a->file);
      std::vector<std::size_t> hits;
      if (a->col >= 0) {
        hits = csvm::query_columns(doc.data, spec, static_cast<std::size_t>(a->col));
      } else {
        if (static_cast<std::size_t>(a->row) >= doc.data.size())
          throw csvm::Error(csvm::Errc::IndexOutOfRange,
                            "row " + std::to_string(a->row) + " is outside the table");
        hits = csvm::query_row(doc.data[static_cast<std::size_t>(a->row)], spec);
      }
      std::cout << format_indices(hits);
    });
  }

  // union / intersect
  {
    auto* cmd = app.add_subcommand("union", "column-aligned union of two tables");
    struct Args {
      std::string a, b, out;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("left", a->a, "left table")->required();
    cmd->add_option("right", a->b, "right table")->required();
    cmd->add_option("-o,--output", a->out, "output file (default stdout)");
    cmd->callback([&, a] {
      std::vector<std::string> warnings;
      csvm::Document merged =
          csvm::union_tables(load(a->a), load(a->b), empty_marker, &warnings);
      report_warnings(warnings);
      write_output(csvm::serialize_document(merged, options()), a->out);
    });
  }
  {
    auto* cmd = app.add_subcommand("intersect", "keep only columns shared by both tables");
    struct Args {
      std::string a, b, out;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("left", a->a, "left table")->required();
    cmd->add_option("right", a->b, "right table")->required();
    cmd->add_option("-o,--output", a->out, "output file (default stdout)");
    cmd->callback([&, a] {
      auto result = csvm::intersect_tables(load(a->a), load(a->b), empty_marker);
      if (!result) {
        std::cerr << "No data found\n";
        rc = 3;
        return;
      }
      write_output(csvm::serialize_document(*result, options()), a->out);
    });
  }

  // merge
  {
    auto* cmd = app.add_subcommand("merge", "fill a column by key lookup in a second table");
    struct Args {
      std::string target, source, key, value, dest, out;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("target", a->target, "table to fill")->required();
    cmd->add_option("source", a->source, "dictionary table")->required();
    cmd->add_option("--key", a->key, "key column name, present in both")->required();
    cmd->add_option("--value", a->value, "value column name in the source")->required();
    cmd->add_option("--dest", a->dest, "destination column name in the target")->required();
    cmd->add_option("-o,--output", a->out, "output file (default stdout)");
    cmd->callback([&, a] {
      std::vector<std::string> warnings;
      csvm::LookupFillResult result =
          csvm::lookup_fill(load(a->target), load(a->source), a->key, a->value, a->dest,
                            &warnings);
      report_warnings(warnings);
      write_output(csvm::serialize_document(result.document, options()), a->out);
      std::cerr << "added " << result.added << " / not found " << result.not_found.size()
                << "\n";
    });
  }

  // split
  {
    auto* cmd = app.add_subcommand("split", "explode a compact table into per-series files");
    struct Args {
      std::string file, time_col, outdir;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("file", a->file, "input file")->required();
    cmd->add_option("--time-col", a->time_col, "name of the shared time column")->required();
    cmd->add_option("--outdir", a->outdir, "directory for the series files")->required();
    cmd->callback([&, a] {
      const csvm::Document doc = load(a->file);
      const auto series = csvm::split_series(doc, a->time_col, empty_marker);
      fs::create_directories(a->outdir);
      const std::string stem = fs::path(a->file).stem().string();
      for (std::size_t i = 0; i < series.size(); ++i) {
        char index[8];
        std::snprintf(index, sizeof index, "%02zu", i);
        const fs::path out = fs::path(a->outdir) /
                             (stem + "_" + index + "_" + sanitize_name(series[i].headers[1]) +
                              ".csvm");
        write_output(csvm::serialize_document(series[i], options()), out.string());
        std::cout << out.string() << "\n";
      }
    });
  }

  // catalog
  {
    auto* cmd = app.add_subcommand("catalog", "index a directory tree as a table");
    struct Args {
      std::string root, out, ext;
      bool recursive = false, posix = false;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("root", a->root, "directory to scan")->required();
    cmd->add_flag("--recursive", a->recursive, "descend into subdirectories");
    cmd->add_flag("--posix-paths", a->posix, "write '/'-separated paths");
    cmd->add_option("--ext", a->ext, "only files with this extension");
    cmd->add_option("-o,--output", a->out, "output file (default stdout)");
    cmd->callback([&, a] {
      csvm::ScanOptions scan;
      scan.recursive = a->recursive;
      scan.posix_paths = a->posix;
      if (!a->ext.empty()) scan.extension_filter = a->ext;
      std::vector<std::string> warnings;
      csvm::Document doc = csvm::scan_directory(a->root, scan, &warnings);
      report_warnings(warnings);
      write_output(csvm::serialize_document(doc, options()), a->out);
    });
  }

  // fit
  {
    auto* cmd = app.add_subcommand("fit", "fit the slow-binding progress model to a curve");
    struct Args {
      std::string file, init, label, model = "SlowBinding", out;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("file", a->file, "two-column time/signal table")->required();
    cmd->add_option("--init", a->init, "starting point as k,v0,vst (default: estimated)");
    cmd->add_option("--label", a->label, "source label for the result (default: file name)");
    cmd->add_option("--model-name", a->model, "model name written into the result");
    cmd->add_option("-o,--output", a->out, "output file (default stdout)");
    cmd->callback([&, a] {
      const csvm::Document doc = load(a->file);
      if (doc.column_count() < 2)
        throw csvm::Error(csvm::Errc::InvalidArgument, "the fit needs two columns");
      csvm::ProgressCurve curve;
      for (std::size_t r = 0; r < doc.data.size(); ++r) {
        const auto& row = doc.data[r];
        char* end = nullptr;
        const double t = std::strtod(row[0].c_str(), &end);
        if (end != row[0].c_str() + row[0].size() || row[0].empty())
          throw csvm::Error(csvm::Errc::NonNumericCell,
                            "row " + std::to_string(r) + ": '" + row[0] + "' is not a number");
        const double p = std::strtod(row[1].c_str(), &end);
        if (end != row[1].c_str() + row[1].size() || row[1].empty())
          throw csvm::Error(csvm::Errc::NonNumericCell,
                            "row " + std::to_string(r) + ": '" + row[1] + "' is not a number");
        curve.t.push_back(t);
        curve.p.push_back(p);
      }
      csvm::SlowBindingParams init;
      if (a->init.empty()) {
        init = csvm::estimate_initial_params(curve);
      } else {
        std::istringstream in(a->init);
        char c1 = 0, c2 = 0;
        if (!(in >> init.k >> c1 >> init.v0 >> c2 >> init.v_st) || c1 != ',' || c2 != ',')
          throw csvm::Error(csvm::Errc::InvalidArgument, "--init expects k,v0,vst");
      }
      const csvm::FitResult fit = csvm::fit_progress(curve, init);
      const csvm::Document result = csvm::fit_result_to_document(
          curve, fit, a->label.empty() ? a->file : a->label, a->model);
      write_output(csvm::serialize_document(result, options()), a->out);
    });
  }

  // aggregate
  {
    auto* cmd = app.add_subcommand("aggregate", "one summary row per fit result table");
    struct Args {
      std::vector<std::string> files;
      std::string out;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("files", a->files, "fit result files");
    cmd->add_option("-o,--output", a->out, "output file (default stdout)");
    cmd->callback([&, a] {
      std::vector<csvm::Document> docs;
      docs.reserve(a->files.size());
      for (const auto& f : a->files) docs.push_back(load(f));
      write_output(csvm::serialize_document(csvm::aggregate_results(docs), options()), a->out);
    });
  }

  // simulate
  {
    auto* cmd = app.add_subcommand("simulate", "integrate a reaction model");
    struct Args {
      std::string file, out;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("file", a->file, "model table")->required();
    cmd->add_option("-o,--out,--output", a->out, "output file (default stdout)");
    cmd->callback([&, a] {
      std::vector<std::string> warnings;
      const csvm::OdeModel model = csvm::parse_ode_model(load(a->file), &warnings);
      report_warnings(warnings);
      write_output(csvm::serialize_document(csvm::integrate_rk4(model), options()), a->out);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const csvm::Error& e) {
    std::cerr << "csvm: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "csvm: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
