#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csvm/document.hpp"

namespace csvm {

struct OdeSpecies {
  std::string name;
  double initial = 0;
  std::string comment;
};

struct OdeRate {
  std::string name;
  double value = 0;
  std::string comment;
};

struct ExprFactor {
  enum class Kind { Rate, Species };
  Kind kind = Kind::Species;
  std::size_t index = 0;
};

struct ExprTerm {
  int sign = 1;
  std::vector<ExprFactor> factors;  // multiplied together
};

/// A signed sum of products. Factors are either <rate> references or bare
/// species names; whitespace inside <...> is insignificant.
struct RateExpression {
  std::string text;  // original right-hand side, for messages
  std::vector<ExprTerm> terms;
};

struct OdePath {
  std::size_t species = 0;  // index into OdeModel::species
  RateExpression expr;
};

struct OdeMonitor {
  std::string name;
  RateExpression expr;
  std::string comment;
};

/// A reaction network read from a keyword table: ALGO/TIME rows, SPEC
/// initial values, RATE constants, PATH derivative expressions and MONI
/// derived quantities. atol_slot is carried but not acted on.
struct OdeModel {
  std::string algo;
  double t0 = 0;
  double t_end = 0;
  double atol_slot = 0;
  double dt = 0;
  std::vector<OdeSpecies> species;
  std::vector<OdeRate> rates;
  std::vector<OdePath> paths;
  std::vector<OdeMonitor> monitors;
};

/// Build a model from a parsed keyword table. Names are resolved after all
/// rows are read, so declaration order does not matter. Errors carry the
/// offending data row number.
OdeModel parse_ode_model(const Document& doc, std::vector<std::string>* warnings = nullptr);

/// Evaluate an expression against the model's rate constants and a state
/// vector ordered like model.species.
double eval_expression(const OdeModel& model, const RateExpression& expr,
                       std::span<const double> state);

/// Classical fixed-step 4th-order Runge-Kutta over [t0, t_end] in steps of
/// dt (a short final step closes any remainder). Output columns: t, each
/// species, each monitor. A concentration below -tolerance aborts the run:
/// that is the step-size-failure signal for steps too coarse for the
/// system's fastest mode. The tolerance defaults to the model's atol slot.
Document integrate_rk4(const OdeModel& model,
                       std::optional<double> negative_tolerance = std::nullopt);

}  // namespace csvm
