#include "csvm/kinetics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "csvm/convert.hpp"
#include "internal_util.hpp"

namespace csvm {

namespace {

struct PointEval {
  double value;
  double dk, dv0, dvst;
};

// g(k,t) = (1 - exp(-k t))/k evaluated without cancellation; its k-limit
// at 0 is t and its k-derivative limit is -t^2/2.
PointEval eval_with_grad(const SlowBindingParams& q, double t) {
  double g, dgdk;
  if (q.k == 0.0) {
    g = t;
    dgdk = -0.5 * t * t;
  } else {
    g = -std::expm1(-q.k * t) / q.k;
    if (std::abs(q.k * t) < 1e-6)
      dgdk = -0.5 * t * t * (1.0 - 2.0 * q.k * t / 3.0);
    else
      dgdk = (t * std::exp(-q.k * t) - g) / q.k;
  }
  PointEval e;
  e.value = q.v_st * t + (q.v0 - q.v_st) * g;
  e.dk = (q.v0 - q.v_st) * dgdk;
  e.dv0 = g;
  e.dvst = t - g;
  return e;
}

double sum_squared_residuals(const ProgressCurve& curve, const SlowBindingParams& q) {
  double sse = 0;
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    const double r = curve.p[i] - eval_progress(q, curve.t[i]);
    sse += r * r;
  }
  return sse;
}

std::string fmt(double v) { return detail::fmt_double(v); }

}  // namespace

double eval_progress(const SlowBindingParams& params, double t) {
  if (params.k == 0.0) return params.v0 * t;
  const double g = -std::expm1(-params.k * t) / params.k;
  return params.v_st * t + (params.v0 - params.v_st) * g;
}

SlowBindingParams estimate_initial_params(const ProgressCurve& curve) {
  const std::size_t n = curve.t.size();
  SlowBindingParams q{1.0, 1.0, 1.0};
  if (n < 2) return q;
  const std::size_t head = std::max<std::size_t>(1, n / 10);
  const std::size_t tail = std::max<std::size_t>(1, n / 10);
  auto slope = [&](std::size_t a, std::size_t b) {
    const double dt = curve.t[b] - curve.t[a];
    return dt != 0 ? (curve.p[b] - curve.p[a]) / dt : 0.0;
  };
  q.v0 = slope(0, std::min(head, n - 1));
  q.v_st = slope(n - 1 - std::min(tail, n - 1), n - 1);
  // For large t the curve approaches v_st*t + (v0 - v_st)/k; read k off
  // that asymptote's intercept.
  const double intercept = curve.p[n - 1] - q.v_st * curve.t[n - 1];
  const double span = curve.t[n - 1] - curve.t[0];
  if (intercept != 0 && std::isfinite(intercept))
    q.k = (q.v0 - q.v_st) / intercept;
  if (!(q.k > 0) || !std::isfinite(q.k)) q.k = span > 0 ? 1.0 / span : 1.0;
  if (!std::isfinite(q.v0)) q.v0 = 1.0;
  if (!std::isfinite(q.v_st)) q.v_st = 1.0;
  return q;
}

FitResult fit_progress(const ProgressCurve& curve, const SlowBindingParams& init) {
  const std::size_t n = curve.t.size();
  if (n != curve.p.size())
    throw Error(Errc::InvalidArgument, "time and signal lists differ in length");
  if (n < 3)
    throw Error(Errc::DegenerateCurve,
                "need at least 3 points to fit 3 parameters, got " + std::to_string(n));
  for (std::size_t i = 1; i < n; ++i)
    if (!(curve.t[i] > curve.t[i - 1]))
      throw Error(Errc::InvalidArgument, "time values must increase strictly");
  {
    const auto [lo, hi] = std::minmax_element(curve.p.begin(), curve.p.end());
    if (*lo == *hi)
      throw Error(Errc::DegenerateCurve, "signal is constant, nothing to fit");
  }

  Eigen::Vector3d theta(init.k, init.v0, init.v_st);
  auto params_at = [](const Eigen::Vector3d& th) {
    return SlowBindingParams{th[0], th[1], th[2]};
  };
  double sse = sum_squared_residuals(curve, params_at(theta));
  double lambda = 1e-3;
  bool converged = false;
  int iterations = 0;

  for (int outer = 0; outer < 200 && !converged; ++outer) {
    ++iterations;
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    const SlowBindingParams q = params_at(theta);
    for (std::size_t i = 0; i < n; ++i) {
      const PointEval e = eval_with_grad(q, curve.t[i]);
      const Eigen::Vector3d j(e.dk, e.dv0, e.dvst);
      jtj += j * j.transpose();
      jtr += j * (curve.p[i] - e.value);
    }
    const double max_diag = jtj.diagonal().maxCoeff();
    Eigen::Vector3d damp = jtj.diagonal().cwiseMax(std::max(1e-12 * max_diag, 1e-300));

    bool accepted = false;
    for (int inner = 0; inner < 60; ++inner) {
      Eigen::Matrix3d m = jtj;
      m.diagonal() += lambda * damp;
      Eigen::Vector3d delta = m.ldlt().solve(jtr);
      if (!delta.allFinite()) {
        lambda *= 7;
        continue;
      }
      const Eigen::Vector3d trial = theta + delta;
      const double trial_sse = sum_squared_residuals(curve, params_at(trial));
      if (std::isfinite(trial_sse) && trial_sse <= sse) {
        const double step = (delta.cwiseAbs().array() /
                             (theta.cwiseAbs().array() + 1e-30)).maxCoeff();
        const double drop = sse - trial_sse;
        theta = trial;
        sse = trial_sse;
        lambda = std::max(lambda * 0.35, 1e-14);
        accepted = true;
        if (step < 1e-12 || sse == 0.0 || drop <= 1e-15 * std::max(sse, 1e-300))
          converged = true;
        break;
      }
      lambda *= 7;
      if (lambda > 1e15) break;
    }
    if (!accepted) {
      // The damped step cannot improve the fit any further; accept the
      // current point as the solution if the gradient is already tiny.
      const double scale = std::max(sse, 1e-300);
      if (jtr.cwiseAbs().maxCoeff() < 1e-10 * std::sqrt(scale) + 1e-300) {
        converged = true;
      } else {
        throw Error(Errc::NonConvergence, "fit stalled after " + std::to_string(iterations) +
                                              " iterations without reaching a minimum");
      }
    }
  }
  if (!converged)
    throw Error(Errc::NonConvergence, "fit did not settle within the iteration budget");

  FitResult result;
  result.params = params_at(theta);
  result.iterations = iterations;
  result.f_value = 0;
  result.residuals.resize(n);
  Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
  double abs_signal = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const PointEval e = eval_with_grad(result.params, curve.t[i]);
    const Eigen::Vector3d j(e.dk, e.dv0, e.dvst);
    jtj += j * j.transpose();
    result.residuals[i] = curve.p[i] - e.value;
    result.f_value += result.residuals[i] * result.residuals[i];
    abs_signal += std::abs(curve.p[i]);
  }
  const double dof = n > 3 ? static_cast<double>(n - 3) : 0.0;
  result.et = dof > 0 ? std::sqrt(result.f_value / dof) : 0.0;
  const double variance = dof > 0 ? result.f_value / dof : 0.0;
  const char* names[3] = {"k", "Vo", "Vs"};
  for (int i = 0; i < 3; ++i) {
    const double half_width = jtj(i, i) > 0 ? std::sqrt(variance / jtj(i, i)) : 0.0;
    result.estimates[i] =
        ParameterEstimate{names[i], theta[i], theta[i] - half_width, theta[i] + half_width};
  }
  const double mean_abs = abs_signal / static_cast<double>(n);
  long score = mean_abs > 0 ? std::lround(1000.0 * (1.0 - result.et / mean_abs)) : 0;
  result.quality = static_cast<int>(std::clamp(score, 0L, 1000L));
  return result;
}

Document fit_result_to_document(const ProgressCurve& curve, const FitResult& fit,
                                std::string_view source_label, std::string_view model_name) {
  const std::size_t n = curve.t.size();
  KeyValueBlock block;
  block.terminated = true;
  auto add = [&](const char* key, std::string value) {
    block.entries.emplace_back(key, std::move(value));
  };
  add("LFILE", std::string(source_label));
  add("PROG", std::string(model_name));
  add("VER", "v:(1.0)");
  add("NPTS", std::to_string(n));
  add("NPAR", "3");
  add("NVAL", "1");
  add("F", fmt(fit.f_value));
  add("ET", fmt(fit.et));
  for (std::size_t g = 0; g < fit.estimates.size(); ++g) {
    const auto& e = fit.estimates[g];
    add("PNUM", std::to_string(g + 1));
    add("PNAME", e.name);
    add("PSOL", fmt(e.solution));
    add("PMIN", fmt(e.conf_min));
    add("PMAX", fmt(e.conf_max));
  }
  add("CNUM", "1");
  add("CNAME", "Quality");
  add("CVAL", std::to_string(fit.quality));

  Document doc;
  doc.kind = Kind::Csvm;
  doc.title = "/ " + std::string(model_name);
  doc.meta = "CSVM Result / LM QB BUILD";
  doc.headers = {"X0", "Y0", "Y0 calc", "RES"};
  doc.col_types = {"NUMERIC", "NUMERIC", "NUMERIC", "NUMERIC"};
  doc.widths = {50, 50, 50, 50};
  const std::size_t rows = std::max(n, block.entries.size() + 1);
  for (std::size_t r = 0; r < rows; ++r) {
    if (r < n)
      doc.data.push_back({fmt(curve.t[r]), fmt(curve.p[r]),
                          fmt(curve.p[r] - fit.residuals[r]), fmt(fit.residuals[r])});
    else
      doc.data.push_back({"-", "-", "-", "-"});
  }
  return append_kv_columns(doc, block, "KEY", "VALUE");
}

Document aggregate_results(const std::vector<Document>& docs) {
  struct Group {
    std::string num, name, sol, min, max;
  };
  struct Row {
    std::string lfile, prog, npts, npar, nval, f, et;
    std::vector<Group> groups;
  };
  std::vector<Row> rows;
  std::size_t max_groups = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    KeyValueBlock block;
    try {
      block = extract_kv_block(docs[d], "KEY", "VALUE");
    } catch (const Error& e) {
      throw Error(Errc::MalformedResult,
                  "input " + std::to_string(d) + " is not a fit result: " + e.what());
    }
    Row row;
    bool have_lfile = false;
    Group* current = nullptr;
    for (const auto& [key, value] : block.entries) {
      if (key == "LFILE") {
        row.lfile = value;
        have_lfile = true;
      } else if (key == "PROG") {
        row.prog = value;
      } else if (key == "NPTS") {
        row.npts = value;
      } else if (key == "NPAR") {
        row.npar = value;
      } else if (key == "NVAL") {
        row.nval = value;
      } else if (key == "F") {
        row.f = value;
      } else if (key == "ET") {
        row.et = value;
      } else if (key == "PNUM") {
        row.groups.push_back({value, "-", "-", "-", "-"});
        current = &row.groups.back();
      } else if (current && key == "PNAME") {
        current->name = value;
      } else if (current && key == "PSOL") {
        current->sol = value;
      } else if (current && key == "PMIN") {
        current->min = value;
      } else if (current && key == "PMAX") {
        current->max = value;
      }
    }
    if (!have_lfile)
      throw Error(Errc::MalformedResult,
                  "input " + std::to_string(d) + " carries no LFILE entry in its block");
    max_groups = std::max(max_groups, row.groups.size());
    rows.push_back(std::move(row));
  }

  Document out;
  out.kind = Kind::Csvm;
  out.title = "Results";
  out.headers = {"LFILE", "PROG", "NPTS", "NPAR", "NVAL", "F", "ET"};
  for (std::size_t g = 0; g < max_groups; ++g) {
    out.headers.push_back("PNUM");
    out.headers.push_back("PNAME");
    out.headers.push_back("PSOL");
    out.headers.push_back("PMIN");
    out.headers.push_back("PMAX");
  }
  out.col_types.assign(out.headers.size(), "UNDEF");
  out.widths.assign(out.headers.size(), 50);
  for (const auto& row : rows) {
    std::vector<std::string> cells = {row.lfile, row.prog, row.npts, row.npar,
                                      row.nval,  row.f,    row.et};
    for (std::size_t g = 0; g < max_groups; ++g) {
      if (g < row.groups.size()) {
        const auto& gr = row.groups[g];
        cells.insert(cells.end(), {gr.num, gr.name, gr.sol, gr.min, gr.max});
      } else {
        cells.insert(cells.end(), {"-", "-", "-", "-", "-"});
      }
    }
    out.data.push_back(std::move(cells));
  }
  return out;
}

LineFit fit_k_vs_inhibitor(const std::vector<std::pair<double, double>>& points, double s_conc,
                           double km) {
  if (points.size() < 2)
    throw Error(Errc::InsufficientPoints,
                "a line needs at least 2 points, got " + std::to_string(points.size()));
  if (!(km > 0))
    throw Error(Errc::InvalidArgument, "the Michaelis constant must be positive");
  if (s_conc < 0)
    throw Error(Errc::InvalidArgument, "the substrate concentration cannot be negative");
  const double shield = 1.0 + s_conc / km;
  double mx = 0, my = 0;
  for (const auto& [i_conc, k] : points) {
    mx += i_conc / shield;
    my += k;
  }
  const double inv_n = 1.0 / static_cast<double>(points.size());
  mx *= inv_n;
  my *= inv_n;
  double sxx = 0, sxy = 0;
  for (const auto& [i_conc, k] : points) {
    const double dx = i_conc / shield - mx;
    sxx += dx * dx;
    sxy += dx * (k - my);
  }
  if (sxx == 0)
    throw Error(Errc::SingularDesign, "all inhibitor concentrations are equal");
  LineFit fit;
  fit.k_on = sxy / sxx;
  fit.k_off = my - fit.k_on * mx;
  return fit;
}

double fit_ki_star(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2)
    throw Error(Errc::InsufficientPoints,
                "a line needs at least 2 points, got " + std::to_string(points.size()));
  double sxx = 0, sxy = 0;
  for (const auto& [i_conc, ratio] : points) {
    sxx += i_conc * i_conc;
    sxy += i_conc * (ratio - 1.0);
  }
  if (sxx == 0)
    throw Error(Errc::SingularDesign, "all inhibitor concentrations are zero");
  const double slope = sxy / sxx;
  if (!(slope > 0))
    throw Error(Errc::NonPositiveSlope,
                "the rate ratio does not grow with the inhibitor, slope " + fmt(slope));
  return 1.0 / slope;
}

}  // namespace csvm
