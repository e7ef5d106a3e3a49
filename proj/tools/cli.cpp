#include "cli.hpp"

#include "json_out.hpp"

#include "holq/error.hpp"
#include "holq/holq.hpp"
#include "holq/hypothesis.hpp"
#include "holq/ihop.hpp"
#include "holq/inference.hpp"
#include "holq/spectral.hpp"
#include "holq/tensor_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace holq::cli {

namespace {

using Json = nlohmann::ordered_json;

struct UsageError : Error {
  using Error::Error;
};

struct Config {
  std::string input;
  double tol = 1e-10;
  std::size_t max_iter = 500;
  std::string variant = "orthogonalized";
  std::string output;
  std::string format = "json";
  std::string core_out;
  std::string constraints;
  std::vector<std::size_t> ranks;
  std::string h0;
  std::string h1;
  std::size_t nsim = 999;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool allow_unnested = false;
  std::vector<std::size_t> shape;
  std::size_t n = 1;
  double sigma2 = 1.0;
  std::vector<std::string> covs;
};

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json factors_json(const std::vector<Matrix>& factors, std::size_t order) {
  Json out = Json::array();
  for (std::size_t k = 0; k < order; ++k) {
    if (k >= factors.size() || factors[k].size() == 0)
      out.push_back("identity");
    else
      out.push_back(matrix_json(factors[k]));
  }
  return out;
}

Json tensor_json(const Tensor& t) {
  Json data = Json::array();
  for (double v : t.data()) data.push_back(v);
  return Json{{"shape", t.shape()}, {"data", std::move(data)}};
}

Json diagnostics_json(const Diagnostics& d) {
  return Json{{"iterations", d.iterations},
              {"converged", d.converged},
              {"residual", d.residual},
              {"variant", to_string(d.variant)},
              {"init", d.init},
              {"criterion_history", d.criterion_history}};
}

Json options_json(const SolverOptions& o) {
  return Json{{"tol", o.tol},
              {"max_iter", o.max_iter},
              {"core_tol", o.core_tol},
              {"blowup_cond", o.blowup_cond},
              {"variant", to_string(o.variant)}};
}

std::string constraint_letters(std::span<const ModeConstraint> cs) {
  std::string s;
  for (auto c : cs) s += to_char(c);
  return s;
}

SolverOptions solver_options(const Config& c) {
  SolverOptions o;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  if (c.variant == "orthogonalized" || c.variant == "orth")
    o.variant = Variant::Orthogonalized;
  else if (c.variant == "plain")
    o.variant = Variant::Plain;
  else
    throw UsageError("--variant must be 'orthogonalized' or 'plain', got '" + c.variant + "'");
  o.validate();
  return o;
}

std::vector<ModeConstraint> constraints_for(const Config& c, const Tensor& t) {
  if (c.constraints.empty()) throw UsageError("--constraints is required");
  auto cs = parse_constraints(c.constraints);
  if (cs.size() != t.order()) {
    throw UsageError("constraint string \"" + c.constraints + "\" has " +
                     std::to_string(cs.size()) + " letters but the tensor has " +
                     std::to_string(t.order()) + " modes");
  }
  return cs;
}

Json base_doc(const std::string& command, const Config& c, const Tensor& t) {
  return Json{{"command", command}, {"input", c.input}, {"shape", t.shape()}};
}

void attach_core(Json& doc, const Config& c, const Tensor& core) {
  doc["core"] = tensor_json(core);
  if (!c.core_out.empty()) {
    write_tensor_file(c.core_out, core);
    doc["core_path"] = c.core_out;
  }
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string scalar_text(const Json& j) {
  if (j.is_number_float()) return format_double(j.get<double>());
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

bool is_matrix(const Json& j) {
  if (!j.is_array() || j.empty()) return false;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != j[0].size()) return false;
    for (const auto& v : row)
      if (!v.is_number()) return false;
  }
  return true;
}

void write_text(std::ostream& os, const Json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
  for (const auto& [key, value] : j.items()) {
    if (is_matrix(value)) {
      std::vector<std::vector<std::string>> cells;
      std::size_t width = 0;
      for (const auto& row : value) {
        cells.emplace_back();
        for (const auto& v : row) {
          cells.back().push_back(scalar_text(v));
          width = std::max(width, cells.back().back().size());
        }
      }
      os << pad << key << ":\n";
      for (const auto& row : cells) {
        os << pad << " ";
        for (const auto& cell : row) os << ' ' << pad_left(cell, width);
        os << '\n';
      }
    } else if (value.is_object()) {
      os << pad << key << ":\n";
      write_text(os, value, depth + 1);
    } else if (value.is_array() && std::any_of(value.begin(), value.end(),
                                               [](const Json& v) { return v.is_structured(); })) {
      os << pad << key << ":\n";
      std::size_t i = 0;
      for (const auto& v : value) {
        Json wrapped;
        wrapped["[" + std::to_string(i++) + "]"] = v;
        write_text(os, wrapped, depth + 1);
      }
    } else if (value.is_array()) {
      os << pad << key << ":";
      for (const auto& v : value) os << ' ' << scalar_text(v);
      os << '\n';
    } else {
      os << pad << key << ": " << scalar_text(value) << '\n';
    }
  }
}

void emit(const Json& doc, const Config& c, std::ostream& out) {
  std::ostringstream buffer;
  if (c.format == "json")
    dump_json(buffer, doc);
  else
    write_text(buffer, doc, 0);
  if (c.output.empty()) {
    out << buffer.str();
    return;
  }
  std::ofstream file(c.output);
  if (!file) throw Error(c.output + ": cannot open for writing");
  file << buffer.str();
  if (!file) throw Error(c.output + ": write failed");
}

int finish(const Json& doc, const Config& c, bool converged, std::ostream& out,
           std::ostream& err) {
  emit(doc, c, out);
  if (!converged) {
    err << "warning: solver did not converge; result flagged in the output\n";
    return kNotConverged;
  }
  return kOk;
}

Json holq_json(const HolqDecomposition& d, const Config& c, const SolverOptions& o,
               const std::string& command, const Tensor& t) {
  Json doc = base_doc(command, c, t);
  doc["options"] = options_json(o);
  doc["constraints"] = constraint_letters(d.constraints);
  doc["ell"] = d.ell;
  doc["factors"] = factors_json(d.factors, t.order());
  attach_core(doc, c, d.core);
  doc["core_residuals"] = check_core(d.core, d.constraints).residuals;
  doc["diagnostics"] = diagnostics_json(d.diagnostics);
  return doc;
}

int cmd_holq(const Config& c, std::ostream& out, std::ostream& err, bool junior) {
  const Tensor t = read_tensor_file(c.input);
  const auto o = solver_options(c);
  HolqDecomposition d = junior ? holq_junior(t, constraints_for(c, t), o) : holq(t, o);
  return finish(holq_json(d, c, o, junior ? "junior" : "holq", t), c, d.diagnostics.converged,
                out, err);
}

int cmd_horq(const Config& c, std::ostream& out, std::ostream& err) {
  const Tensor t = read_tensor_file(c.input);
  const auto o = solver_options(c);
  const auto d = holq(t, o);
  const auto r = horq(d);
  Json doc = base_doc("horq", c, t);
  doc["options"] = options_json(o);
  doc["r"] = r.r;
  doc["factors"] = factors_json(r.factors, t.order());
  attach_core(doc, c, r.core);
  doc["diagnostics"] = diagnostics_json(d.diagnostics);
  return finish(doc, c, d.diagnostics.converged, out, err);
}

int cmd_isvd(const Config& c, std::ostream& out, std::ostream& err) {
  const Tensor t = read_tensor_file(c.input);
  const auto o = solver_options(c);
  const auto d = isvd(t, o);
  Json doc = base_doc("isvd", c, t);
  doc["options"] = options_json(o);
  doc["ell"] = d.ell;
  Json u = Json::array(), dd = Json::array();
  for (std::size_t k = 0; k < d.u.size(); ++k) {
    u.push_back(matrix_json(d.u[k]));
    dd.push_back(vector_json(d.d[k]));
  }
  doc["u"] = std::move(u);
  doc["d"] = std::move(dd);
  attach_core(doc, c, d.core);
  doc["diagnostics"] = diagnostics_json(d.diagnostics);
  return finish(doc, c, d.diagnostics.converged, out, err);
}

int cmd_tisvd(const Config& c, std::ostream& out, std::ostream& err) {
  const Tensor t = read_tensor_file(c.input);
  const auto o = solver_options(c);
  if (c.ranks.empty()) throw UsageError("--ranks is required");
  if (c.ranks.size() + 1 != t.order()) {
    throw UsageError("--ranks needs " + std::to_string(t.order() - 1) + " values, got " +
                     std::to_string(c.ranks.size()));
  }
  const auto d = truncated_isvd(t, c.ranks, o);
  Json doc = base_doc("tisvd", c, t);
  doc["options"] = options_json(o);
  doc["ranks"] = d.ranks;
  doc["ell"] = d.ell;
  Json u = Json::array(), dd = Json::array();
  for (std::size_t k = 0; k < d.u.size(); ++k) {
    u.push_back(matrix_json(d.u[k]));
    dd.push_back(vector_json(d.d[k]));
  }
  doc["u"] = std::move(u);
  doc["d"] = std::move(dd);
  attach_core(doc, c, d.core);
  doc["residual"] = d.residual;
  doc["hooi_residual"] = d.hooi_residual;
  doc["diagnostics"] = diagnostics_json(d.diagnostics);
  return finish(doc, c, d.diagnostics.converged, out, err);
}

int cmd_ihop(const Config& c, std::ostream& out, std::ostream& err) {
  const Tensor t = read_tensor_file(c.input);
  const auto o = solver_options(c);
  const auto d = ihop(t, o);
  Json doc = base_doc("ihop", c, t);
  doc["options"] = options_json(o);
  doc["ell"] = d.ell;
  doc["p"] = factors_json(d.p, t.order());
  doc["factors"] = factors_json(d.factors, t.order());
  attach_core(doc, c, d.core);
  doc["diagnostics"] = diagnostics_json(d.diagnostics);
  return finish(doc, c, d.diagnostics.converged, out, err);
}

int cmd_mle(const Config& c, std::ostream& out, std::ostream& err) {
  const Tensor t = read_tensor_file(c.input);
  const auto o = solver_options(c);
  const auto cs = constraints_for(c, t);
  const auto m = mle(t, cs, o);
  Json doc = base_doc("mle", c, t);
  doc["options"] = options_json(o);
  doc["constraints"] = constraint_letters(cs);
  doc["n_elements"] = m.n_elements;
  doc["sigma2_hat"] = m.sigma2_hat;
  doc["max_loglik"] = m.max_loglik;
  Json sigmas = Json::array();
  for (const auto& s : m.sigma_hats) sigmas.push_back(matrix_json(s));
  doc["sigma_hats"] = std::move(sigmas);
  doc["ell"] = m.fit.ell;
  doc["diagnostics"] = diagnostics_json(m.fit.diagnostics);
  return finish(doc, c, m.fit.diagnostics.converged, out, err);
}

int cmd_lrt(const Config& c, std::ostream& out, std::ostream& err) {
  const Tensor t = read_tensor_file(c.input);
  if (c.h0.empty() || c.h1.empty()) throw UsageError("--h0 and --h1 are required");
  const auto h0 = parse_hypothesis(c.h0, t.order());
  const auto h1 = parse_hypothesis(c.h1, t.order());
  NullOptions o;
  o.solver = solver_options(c);
  o.nsim = c.nsim;
  o.seed = c.seed;
  o.threads = c.threads;
  const auto r = lrt_test(t, h0, h1, o, c.allow_unnested);

  Json doc = base_doc("lrt", c, t);
  doc["options"] = options_json(o.solver);
  doc["h0"] = h0.to_string();
  doc["h1"] = h1.to_string();
  doc["nested"] = is_nested(h0, h1);
  doc["stat"] = r.stat;
  doc["log_lr"] = r.log_lr;
  doc["p_value"] = r.p_value;
  doc["nsim"] = r.nsim;
  doc["nsim_effective"] = r.nsim_effective;
  doc["failures"] = r.failures;
  doc["nonconverged"] = r.nonconverged;
  doc["seed"] = r.seed;
  doc["generator"] = kGeneratorName;
  Json q = Json::array();
  for (const auto& [prob, value] : r.null_quantiles)
    q.push_back(Json{{"probability", prob}, {"value", value}});
  doc["null_quantiles"] = std::move(q);
  doc["observed"] = Json{{"ell", r.observed.ell},
                         {"a", r.observed.a},
                         {"n_elements", r.observed.n_elements},
                         {"h0_diagnostics", diagnostics_json(r.observed.h0_diagnostics)},
                         {"h1_diagnostics", diagnostics_json(r.observed.h1_diagnostics)}};
  return finish(doc, c, r.observed.converged(), out, err);
}

int cmd_simulate(const Config& c, std::ostream& out, std::ostream& err) {
  if (c.output.empty()) throw UsageError("simulate needs -o for the generated tensor");
  std::map<std::size_t, Matrix> given;
  for (const auto& spec : c.covs) {
    const auto eq = spec.find('=');
    std::size_t mode = 0;
    try {
      if (eq == std::string::npos || eq == 0) throw std::invalid_argument("");
      std::size_t used = 0;
      mode = std::stoul(spec.substr(0, eq), &used);
      if (used != eq || mode == 0) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw UsageError("--cov expects MODE=PATH with a 1-based mode, got '" + spec + "'");
    }
    const Tensor m = read_tensor_file(spec.substr(eq + 1));
    if (m.order() != 2 || m.dim(0) != m.dim(1))
      throw UsageError("covariance file " + spec.substr(eq + 1) + " must hold a square matrix");
    given[mode - 1] = Eigen::Map<const Matrix>(m.data().data(), static_cast<Eigen::Index>(m.dim(0)),
                                               static_cast<Eigen::Index>(m.dim(1)));
  }
  Shape shape(c.shape.begin(), c.shape.end());
  const std::size_t modes = std::max(shape.size(), given.empty() ? 0 : given.rbegin()->first + 1);
  if (modes == 0) throw UsageError("simulate needs --shape or at least one --cov");
  std::vector<Matrix> sigmas(modes);
  for (std::size_t k = 0; k < modes; ++k) {
    auto it = given.find(k);
    if (it != given.end()) {
      if (k < shape.size() && shape[k] != static_cast<std::size_t>(it->second.rows())) {
        throw UsageError("--cov for mode " + std::to_string(k + 1) + " is " +
                         std::to_string(it->second.rows()) + "x" +
                         std::to_string(it->second.rows()) + " but --shape says " +
                         std::to_string(shape[k]));
      }
      sigmas[k] = it->second;
    } else if (k < shape.size()) {
      const auto p = static_cast<Eigen::Index>(shape[k]);
      sigmas[k] = Matrix::Identity(p, p);
    } else {
      throw UsageError("mode " + std::to_string(k + 1) + " has neither --shape nor --cov");
    }
  }
  const Tensor x = sample_multilinear_normal(c.sigma2, sigmas, c.n, c.seed);
  write_tensor_file(c.output, x);
  Json doc{{"command", "simulate"},
           {"output", c.output},
           {"shape", x.shape()},
           {"sigma2", c.sigma2},
           {"n", c.n},
           {"seed", c.seed},
           {"generator", kGeneratorName}};
  Json covs = Json::array();
  for (const auto& s : sigmas) covs.push_back(matrix_json(s));
  doc["sigmas"] = std::move(covs);
  Config to_stdout = c;
  to_stdout.output.clear();
  return finish(doc, to_stdout, true, out, err);
}

void add_solver_flags(CLI::App* sub, Config& c) {
  sub->add_option("input", c.input, "tensor file")->required();
  sub->add_option("--tol", c.tol, "relative criterion change that stops the solver")
      ->capture_default_str();
  sub->add_option("--max-iter", c.max_iter, "sweep cap")->capture_default_str();
  sub->add_option("--variant", c.variant, "orthogonalized or plain")->capture_default_str();
  sub->add_option("-o,--output", c.output, "write the result here instead of stdout");
  sub->add_option("--format", c.format, "json or text")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"HOLQ tensor decompositions and separable covariance inference", "holq"};
  app.require_subcommand(1);

  auto* holq_cmd = app.add_subcommand("holq", "HOLQ with the last mode as the sample mode");
  auto* junior_cmd = app.add_subcommand("junior", "HOLQ junior with per-mode constraints");
  auto* horq_cmd = app.add_subcommand("horq", "HORQ");
  auto* isvd_cmd = app.add_subcommand("isvd", "incredible SVD");
  auto* tisvd_cmd = app.add_subcommand("tisvd", "truncated incredible SVD");
  auto* ihop_cmd = app.add_subcommand("ihop", "incredible higher order polar decomposition");
  auto* mle_cmd = app.add_subcommand("mle", "separable covariance maximum likelihood");
  auto* lrt_cmd = app.add_subcommand("lrt", "Monte Carlo likelihood ratio test");
  auto* sim_cmd = app.add_subcommand("simulate", "draw from the multilinear normal model");

  for (auto* sub : {holq_cmd, junior_cmd, horq_cmd, isvd_cmd, tisvd_cmd, ihop_cmd, mle_cmd, lrt_cmd})
    add_solver_flags(sub, c);
  for (auto* sub : {holq_cmd, junior_cmd, horq_cmd, isvd_cmd, tisvd_cmd, ihop_cmd})
    sub->add_option("--core-out", c.core_out, "also write the core tensor to this file");
  for (auto* sub : {junior_cmd, mle_cmd})
    sub->add_option("--constraints", c.constraints, "one of u, d, c, i per mode")->required();
  tisvd_cmd->add_option("--ranks", c.ranks, "ranks of the non-sample modes, e.g. 2,2")
      ->delimiter(',')
      ->required();

  lrt_cmd->add_option("--h0", c.h0, "null hypothesis, e.g. \"du i\"")->required();
  lrt_cmd->add_option("--h1", c.h1, "alternative, e.g. \"uu i\" or \"(12)u i\"")->required();
  lrt_cmd->add_option("--nsim", c.nsim, "null replicates")->capture_default_str();
  lrt_cmd->add_option("--seed", c.seed, "64-bit seed")->capture_default_str();
  lrt_cmd->add_option("--threads", c.threads, "worker threads (default: HOLQ_THREADS or all cores)");
  lrt_cmd->add_flag("--allow-unnested", c.allow_unnested,
                    "run even when h0 is not structurally nested in h1");

  sim_cmd->add_option("--shape", c.shape, "sizes of the non-sample modes, e.g. 3,4")
      ->delimiter(',');
  sim_cmd->add_option("--cov", c.covs, "MODE=PATH covariance of a 1-based mode (repeatable)");
  sim_cmd->add_option("--n", c.n, "sample count (size of the last mode)")->capture_default_str();
  sim_cmd->add_option("--sigma2", c.sigma2, "overall variance")->capture_default_str();
  sim_cmd->add_option("--seed", c.seed, "64-bit seed")->capture_default_str();
  sim_cmd->add_option("-o,--output", c.output, "tensor file to write")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kFailure;
  }

  try {
    if (*holq_cmd) return cmd_holq(c, out, err, false);
    if (*junior_cmd) return cmd_holq(c, out, err, true);
    if (*horq_cmd) return cmd_horq(c, out, err);
    if (*isvd_cmd) return cmd_isvd(c, out, err);
    if (*tisvd_cmd) return cmd_tisvd(c, out, err);
    if (*ihop_cmd) return cmd_ihop(c, out, err);
    if (*mle_cmd) return cmd_mle(c, out, err);
    if (*lrt_cmd) return cmd_lrt(c, out, err);
    if (*sim_cmd) return cmd_simulate(c, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace holq::cli
