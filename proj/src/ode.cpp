#include "csvm/ode.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

#include "internal_util.hpp"

namespace csvm {

namespace {

struct Token {
  enum class Type { Plus, Minus, Dot, RateRef, Name };
  Type type;
  std::string text;  // name for RateRef/Name
};

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '\t') {
      ++i;
    } else if (c == '+') {
      out.push_back({Token::Type::Plus, ""});
      ++i;
    } else if (c == '-') {
      out.push_back({Token::Type::Minus, ""});
      ++i;
    } else if (c == '.') {
      out.push_back({Token::Type::Dot, ""});
      ++i;
    } else if (c == '<') {
      // Rate references tolerate embedded blanks: "<k -1>" names "k-1".
      std::size_t close = text.find('>', i + 1);
      if (close == std::string_view::npos)
        throw Error(Errc::MalformedExpression, "unclosed '<' in '" + std::string(text) + "'");
      std::string name;
      for (std::size_t k = i + 1; k < close; ++k)
        if (text[k] != ' ' && text[k] != '\t') name += text[k];
      if (name.empty())
        throw Error(Errc::MalformedExpression, "empty rate reference in '" + std::string(text) + "'");
      out.push_back({Token::Type::RateRef, std::move(name)});
      i = close + 1;
    } else if (is_name_start(c)) {
      std::size_t start = i;
      while (i < text.size() && is_name_char(text[i])) ++i;
      out.push_back({Token::Type::Name, std::string(text.substr(start, i - start))});
    } else {
      throw Error(Errc::MalformedExpression,
                  std::string("unexpected character '") + c + "' in '" + std::string(text) + "'");
    }
  }
  return out;
}

struct RawFactor {
  bool is_rate;
  std::string name;
};

struct RawTerm {
  int sign;
  std::vector<RawFactor> factors;
};

// expression := [sign] term (sign term)*         (empty input is allowed)
// term       := factor ('.' factor)*
// factor     := '<'name'>' | name
std::vector<RawTerm> parse_terms(std::string_view text) {
  const auto tokens = tokenize(text);
  std::vector<RawTerm> terms;
  std::size_t i = 0;
  auto fail = [&](const std::string& why) {
    throw Error(Errc::MalformedExpression, why + " in '" + std::string(text) + "'");
  };
  while (i < tokens.size()) {
    int sign = 1;
    if (tokens[i].type == Token::Type::Plus) {
      ++i;
    } else if (tokens[i].type == Token::Type::Minus) {
      sign = -1;
      ++i;
    } else if (!terms.empty()) {
      fail("terms must be joined by '+' or '-'");
    }
    RawTerm term{sign, {}};
    while (true) {
      if (i >= tokens.size()) fail("a term is missing its factor");
      const Token& t = tokens[i];
      if (t.type == Token::Type::RateRef)
        term.factors.push_back({true, t.text});
      else if (t.type == Token::Type::Name)
        term.factors.push_back({false, t.text});
      else
        fail("expected a species or rate name");
      ++i;
      if (i < tokens.size() && tokens[i].type == Token::Type::Dot) {
        ++i;
        continue;
      }
      break;
    }
    terms.push_back(std::move(term));
  }
  return terms;
}

std::optional<double> cell_number(const std::string& s) { return detail::parse_double(s); }

}  // namespace

double eval_expression(const OdeModel& model, const RateExpression& expr,
                       std::span<const double> state) {
  double total = 0;
  for (const auto& term : expr.terms) {
    double product = term.sign;
    for (const auto& f : term.factors) {
      if (f.kind == ExprFactor::Kind::Rate) {
        if (f.index >= model.rates.size())
          throw Error(Errc::UnknownRate, "rate index " + std::to_string(f.index) +
                                             " is outside the model");
        product *= model.rates[f.index].value;
      } else {
        if (f.index >= state.size())
          throw Error(Errc::UnknownSpecies, "species index " + std::to_string(f.index) +
                                                " is outside the state vector");
        product *= state[f.index];
      }
    }
    total += product;
  }
  return total;
}

OdeModel parse_ode_model(const Document& doc, std::vector<std::string>* warnings) {
  OdeModel model;
  bool seen_time = false;
  struct PendingExpr {
    std::size_t row;
    bool is_path;
    std::string target;  // species for PATH, monitor name for MONI
    std::string text;
    std::string comment;
  };
  std::vector<PendingExpr> pending;

  auto numeric = [](const std::string& cell, std::size_t row, const char* what) {
    auto v = cell_number(cell);
    if (!v)
      throw Error(Errc::MalformedRow, "row " + std::to_string(row) + ": " + what + " '" + cell +
                                          "' is not numeric");
    return *v;
  };
  auto need = [](const std::vector<std::string>& row, std::size_t count, std::size_t row_no,
                 const char* kw) {
    if (row.size() < count)
      throw Error(Errc::MalformedRow, "row " + std::to_string(row_no) + ": " + kw + " needs " +
                                          std::to_string(count - 1) + " value cells");
  };
  auto comment_of = [](const std::vector<std::string>& row, std::size_t used) {
    return row.size() > used ? row.back() : std::string();
  };

  for (std::size_t r = 0; r < doc.data.size(); ++r) {
    const auto& row = doc.data[r];
    const std::string kw = row.empty() ? std::string() : row[0];
    if (kw == "ALGO") {
      need(row, 2, r, "ALGO");
      model.algo = row[1];
    } else if (kw == "TIME") {
      need(row, 5, r, "TIME");
      seen_time = true;
      model.t0 = numeric(row[1], r, "start time");
      model.t_end = numeric(row[2], r, "end time");
      model.atol_slot = numeric(row[3], r, "tolerance slot");
      model.dt = numeric(row[4], r, "step");
    } else if (kw == "SPEC") {
      need(row, 3, r, "SPEC");
      for (const auto& s : model.species)
        if (s.name == row[1])
          throw Error(Errc::InvalidArgument,
                      "row " + std::to_string(r) + ": species '" + row[1] + "' declared twice");
      model.species.push_back({row[1], numeric(row[2], r, "initial value"), comment_of(row, 3)});
    } else if (kw == "RATE") {
      need(row, 3, r, "RATE");
      for (const auto& k : model.rates)
        if (k.name == row[1])
          throw Error(Errc::InvalidArgument,
                      "row " + std::to_string(r) + ": rate '" + row[1] + "' declared twice");
      model.rates.push_back({row[1], numeric(row[2], r, "rate value"), comment_of(row, 3)});
    } else if (kw == "PATH") {
      need(row, 3, r, "PATH");
      pending.push_back({r, true, row[1], row[2], comment_of(row, 3)});
    } else if (kw == "MONI") {
      need(row, 3, r, "MONI");
      pending.push_back({r, false, row[1], row[2], comment_of(row, 3)});
    } else if (!kw.empty() && kw != "-") {
      if (warnings)
        warnings->push_back("row " + std::to_string(r) + ": unknown keyword '" + kw + "' ignored");
    }
  }
  if (!seen_time)
    throw Error(Errc::MalformedRow, "the model has no TIME row");
  if (!(model.dt > 0))
    throw Error(Errc::InvariantViolation, "the step must be positive");
  if (!(model.t_end > model.t0))
    throw Error(Errc::InvariantViolation, "the end time must lie after the start time");

  std::unordered_map<std::string, std::size_t> species_index;
  for (std::size_t i = 0; i < model.species.size(); ++i)
    species_index.emplace(model.species[i].name, i);
  std::unordered_map<std::string, std::size_t> rate_index;
  for (std::size_t i = 0; i < model.rates.size(); ++i)
    rate_index.emplace(model.rates[i].name, i);

  // Names resolve only after the whole table is read, so PATH rows may
  // reference species declared below them.
  auto compile = [&](const PendingExpr& p) {
    RateExpression expr;
    expr.text = p.text;
    std::vector<RawTerm> raw;
    try {
      raw = parse_terms(p.text);
    } catch (const Error& e) {
      throw Error(Errc::MalformedExpression, "row " + std::to_string(p.row) + ": " + e.what());
    }
    for (const auto& rt : raw) {
      ExprTerm term;
      term.sign = rt.sign;
      for (const auto& f : rt.factors) {
        if (f.is_rate) {
          auto it = rate_index.find(f.name);
          if (it == rate_index.end())
            throw Error(Errc::UnknownRate,
                        "row " + std::to_string(p.row) + ": unknown rate '" + f.name + "'");
          term.factors.push_back({ExprFactor::Kind::Rate, it->second});
        } else {
          auto it = species_index.find(f.name);
          if (it == species_index.end())
            throw Error(Errc::UnknownSpecies,
                        "row " + std::to_string(p.row) + ": unknown species '" + f.name + "'");
          term.factors.push_back({ExprFactor::Kind::Species, it->second});
        }
      }
      expr.terms.push_back(std::move(term));
    }
    return expr;
  };
  for (const auto& p : pending) {
    if (p.is_path) {
      auto it = species_index.find(p.target);
      if (it == species_index.end())
        throw Error(Errc::UnknownSpecies,
                    "row " + std::to_string(p.row) + ": unknown species '" + p.target + "'");
      model.paths.push_back({it->second, compile(p)});
    } else {
      model.monitors.push_back({p.target, compile(p), p.comment});
    }
  }
  return model;
}

Document integrate_rk4(const OdeModel& model, std::optional<double> negative_tolerance) {
  const double tolerance =
      negative_tolerance ? *negative_tolerance : std::max(model.atol_slot, 0.0);
  const std::size_t ns = model.species.size();
  std::vector<double> state(ns);
  for (std::size_t i = 0; i < ns; ++i) state[i] = model.species[i].initial;

  auto derivative = [&](const std::vector<double>& s) {
    std::vector<double> d(ns, 0.0);
    for (const auto& path : model.paths)
      d[path.species] += eval_expression(model, path.expr, s);
    return d;
  };
  auto axpy = [&](const std::vector<double>& s, double h, const std::vector<double>& d) {
    std::vector<double> out(ns);
    for (std::size_t i = 0; i < ns; ++i) out[i] = s[i] + h * d[i];
    return out;
  };
  auto step = [&](const std::vector<double>& s, double h) {
    const auto k1 = derivative(s);
    const auto k2 = derivative(axpy(s, h / 2, k1));
    const auto k3 = derivative(axpy(s, h / 2, k2));
    const auto k4 = derivative(axpy(s, h, k3));
    std::vector<double> out(ns);
    for (std::size_t i = 0; i < ns; ++i)
      out[i] = s[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return out;
  };
  auto check = [&](const std::vector<double>& s, double t) {
    for (std::size_t i = 0; i < ns; ++i) {
      if (!std::isfinite(s[i]))
        throw Error(Errc::NonFiniteState, "species " + model.species[i].name +
                                              " is not finite at t=" + detail::fmt_double(t));
      if (s[i] < -tolerance)
        throw Error(Errc::NegativeConcentration,
                    "species " + model.species[i].name + " falls to " +
                        detail::fmt_double(s[i]) + " at t=" + detail::fmt_double(t));
    }
  };

  Document out;
  out.kind = Kind::Csvm;
  out.headers = {"t"};
  for (const auto& s : model.species) out.headers.push_back(s.name);
  for (const auto& m : model.monitors) out.headers.push_back(m.name);
  out.col_types.assign(out.headers.size(), "NUMERIC");
  out.widths.assign(out.headers.size(), 50);

  auto emit = [&](double t, const std::vector<double>& s) {
    std::vector<std::string> row;
    row.reserve(out.headers.size());
    row.push_back(detail::fmt_double(t));
    for (double v : s) row.push_back(detail::fmt_double(v));
    for (const auto& m : model.monitors)
      row.push_back(detail::fmt_double(eval_expression(model, m.expr, s)));
    out.data.push_back(std::move(row));
  };

  check(state, model.t0);
  emit(model.t0, state);
  const double span = model.t_end - model.t0;
  const auto whole_steps = static_cast<std::size_t>(std::floor(span / model.dt + 1e-9));
  for (std::size_t i = 1; i <= whole_steps; ++i) {
    state = step(state, model.dt);
    const double t = model.t0 + static_cast<double>(i) * model.dt;
    check(state, t);
    emit(t, state);
  }
  const double remainder = span - static_cast<double>(whole_steps) * model.dt;
  if (remainder > 1e-12 * std::max(std::abs(span), model.dt)) {
    state = step(state, remainder);
    check(state, model.t_end);
    emit(model.t_end, state);
  }
  return out;
}

}  // namespace csvm
