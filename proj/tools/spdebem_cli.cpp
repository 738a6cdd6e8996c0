#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "spdebem/analysis.hpp"
#include "spdebem/basis.hpp"
#include "spdebem/basis_io.hpp"
#include "spdebem/beyn.hpp"
#include "spdebem/plot.hpp"
#include "spdebem/spde.hpp"

namespace fs = std::filesystem;
using namespace spdebem;

namespace {

constexpr const char* kToolVersion = "spdebem 1.0.0";

enum ExitCode { kOk = 0, kNumeric = 1, kSpectral = 2, kIo = 3 };

std::string fmt(double v, int digits = 12) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

std::string timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << std::setprecision(17);
  return out;
}

/// Resolved options of the active command in CLI11 config syntax, so that
/// `spdebem --config <file>` re-runs it.
void write_run_config(const CLI::App& root, const CLI::App& leaf, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "# " << kToolVersion << "\n# written " << timestamp() << "\n";
  out << "threads=" << root.get_option("--threads")->as<int>() << "\n";
  std::vector<const CLI::App*> chain;
  for (const CLI::App* a = &leaf; a != nullptr && a != &root; a = a->get_parent()) chain.insert(chain.begin(), a);
  std::string section;
  for (const CLI::App* a : chain) section += (section.empty() ? "" : ".") + a->get_name();
  out << "[" << section << "]\n" << leaf.config_to_str(true, false);
}

NoiseSpec make_noise(double decay, double eps_q, double amplitude, double gamma) {
  NoiseSpec n;
  n.decay = decay;
  n.eps_q = eps_q;
  n.amplitude = amplitude;
  n.gamma = gamma;
  return n;
}

Nonlinearity make_nonlinearity(const std::string& spec, double lipschitz) {
  if (spec.rfind("expr:", 0) == 0) return Nonlinearity::expression(spec.substr(5), lipschitz);
  return Nonlinearity::parse(spec);
}

std::shared_ptr<const PackedBasis> load_packed(const std::string& path, int n, OrthonormalBasis* full = nullptr) {
  OrthonormalBasis b = load_basis(path);
  if (n > b.size()) throw DomainError("basis '" + path + "' holds " + std::to_string(b.size()) + " functions, " + std::to_string(n) + " requested");
  auto packed = std::make_shared<const PackedBasis>(b);
  if (full) *full = b;
  if (n > 0 && n < packed->size()) return std::make_shared<const PackedBasis>(packed->head(n));
  return packed;
}

struct SolveArgs {
  std::string basis;
  std::string f = "f1";
  double lipschitz = -1.0;
  double T = 0.1;
  int M = 100;
  int n = 0;
  std::uint64_t seed = 1;
  std::vector<int> snapshots;
  double decay = 2.0;
  double eps_q = 0.0;
  double amplitude = 1.0;
  double gamma = 0.5;
  std::vector<double> init{0.4, 0.6, 0.3, 0.5};
  int realizations = 1;
  bool force_quadrature = false;
  std::string out_dir = "run";
};

void add_problem_options(CLI::App* c, SolveArgs& a) {
  c->add_option("--basis", a.basis, "ONB2 basis file")->required();
  c->add_option("--f", a.f, "Nonlinearity: f1, f2, bump:<p>, zero or expr:<f(x)>")->capture_default_str();
  c->add_option("--lipschitz", a.lipschitz, "Lipschitz constant of an expr: nonlinearity (<0: sampled)")->capture_default_str();
  c->add_option("--T", a.T, "Final time")->capture_default_str();
  c->add_option("--M", a.M, "Time steps")->capture_default_str();
  c->add_option("--n", a.n, "Modes used (0: all in the basis)")->capture_default_str();
  c->add_option("--seed", a.seed, "Noise seed")->capture_default_str();
  c->add_option("--decay", a.decay, "Noise decay exponent")->capture_default_str();
  c->add_option("--eps-q", a.eps_q, "Noise decay offset")->capture_default_str();
  c->add_option("--amplitude", a.amplitude, "Noise amplitude")->capture_default_str();
  c->add_option("--gamma", a.gamma, "Noise regularity parameter")->capture_default_str();
  c->add_option("--init", a.init, "Initial bump rectangle x1,x2,y1,y2")->delimiter(',')->expected(4)->capture_default_str();
  c->add_option("--realizations", a.realizations, "Independent realizations")->capture_default_str();
  c->add_flag("--force-quadrature", a.force_quadrature, "Evaluate a linear drift through the grid too");
  c->add_option("--out-dir", a.out_dir, "Output directory")->capture_default_str();
}

SpdeProblem make_problem(const SolveArgs& a, OrthonormalBasis* full = nullptr) {
  SpdeProblem p;
  OrthonormalBasis b;
  p.basis = load_packed(a.basis, a.n, &b);
  if (a.init.size() != 4) throw DomainError("--init needs four values x1,x2,y1,y2");
  p.initial = p.basis->pack(bump_initial(a.init[0], a.init[1], a.init[2], a.init[3], b.resolution, b.mask));
  p.nonlinearity = make_nonlinearity(a.f, a.lipschitz);
  p.noise = make_noise(a.decay, a.eps_q, a.amplitude, a.gamma);
  p.T = a.T;
  p.M = a.M;
  p.seed = a.seed;
  p.force_quadrature = a.force_quadrature;
  p.snapshots = a.snapshots;
  if (full) *full = std::move(b);
  return p;
}

nlohmann::json problem_json(const SolveArgs& a, const SpdeProblem& p) {
  return {{"tool", kToolVersion},
          {"written", timestamp()},
          {"basis", a.basis},
          {"T", p.T},
          {"M", p.M},
          {"N", p.basis->size()},
          {"seed", p.seed},
          {"nonlinearity", p.nonlinearity.name()},
          {"lipschitz", p.nonlinearity.lipschitz()},
          {"noise_decay", p.noise.decay},
          {"noise_eps_q", p.noise.eps_q},
          {"noise_amplitude", p.noise.amplitude},
          {"init", a.init},
          {"realizations", a.realizations},
          {"force_quadrature", p.force_quadrature}};
}

void write_coefficients(const Trajectory& t, const std::string& path) {
  auto out = open_out(path);
  out << "step";
  for (Eigen::Index j = 0; j < t.coefficients.cols(); ++j) out << ",v" << (j + 1);
  out << "\n";
  for (Eigen::Index k = 0; k < t.coefficients.rows(); ++k) {
    out << k;
    for (Eigen::Index j = 0; j < t.coefficients.cols(); ++j) out << "," << t.coefficients(k, j);
    out << "\n";
  }
}

Trajectory read_coefficients(const std::string& path, double T) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');  // step
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) throw IoError("ragged coefficient file '" + path + "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("empty coefficient file '" + path + "'");
  Trajectory t;
  t.T = T;
  t.M = static_cast<int>(rows.size()) - 1;
  t.coefficients.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t j = 0; j < rows[k].size(); ++j) t.coefficients(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = rows[k][j];
  }
  return t;
}

void write_grid(const std::vector<double>& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(grid.data()), static_cast<std::streamsize>(grid.size() * sizeof(double)));
}

std::vector<std::pair<std::string, std::string>> bound_rows(const ErrorBoundParams& p, const ErrorBound& b) {
  const auto& c = b.constants;
  const auto& s = p.sup;
  std::vector<std::pair<std::string, std::string>> rows;
  auto add = [&](const std::string& k, double v) { rows.emplace_back(k, fmt(v, 6)); };
  add("T", p.T);
  add("N", p.N);
  add("M", p.M);
  add("R", p.R);
  add("L", p.L);
  add("lambda_1", p.lambda_1);
  add("lambda_N", p.lambda_N);
  add("eps_lambda", p.eps_lambda);
  add("eps_eta", p.eps_eta);
  add("C", p.C);
  add("C_T", p.C_T);
  add("eps", p.eps);
  add("eps0_2", p.eps0_2);
  add("eps0_3", p.eps0_3);
  add("eps0_4", p.eps0_4);
  add("sup_sum_eps_plus_abs_v", s.sum_eps_plus_abs_v);
  add("sup_sum_eps", s.sum_eps);
  add("sup_sum_abs_f", s.sum_abs_f);
  add("sup_norm_v", s.norm_v);
  add("sup_norm_f", s.norm_f);
  add("sum_abs_v_final", s.sum_abs_v_final);
  add("max_abs_v_final", s.max_abs_v_final);
  add("h", p.h());
  add("lambda_tilde", p.lambda_tilde());
  add("a2", c.a2);
  add("a2_tilde", c.a2_tilde);
  add("b2", c.b2);
  add("b3", c.b3);
  add("b4", c.b4);
  add("b5", c.b5);
  add("E1 (symbolic C_T, not rigorous)", b.e1);
  add("E234", b.e234);
  add("total", b.total);
  add("E234 limit (M to infinity)", b.limit);
  rows.emplace_back("regime", b.regime);
  if (s.max_abs_v > 0.0) rows.emplace_back("observed max |V_kj| <= 1", s.max_abs_v <= 1.0 ? "yes" : "no");
  return rows;
}

int run(int argc, char** argv) {
  CLI::App app{"Stochastic reaction-diffusion on planar domains with boundary-element eigenbases"};
  app.set_config("--config", "", "Read options from a config file (CLI11 TOML/INI syntax)");
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (0: OpenMP default)")->capture_default_str();

  // basis build
  auto* basis = app.add_subcommand("basis", "Eigenbasis construction and verification")->configurable();
  basis->require_subcommand(1);
  std::string shape = "peanut";
  int n_functions = 10, scenario_id = 1, grid = 301, fixed_elements = 0, nodes = 24;
  std::string basis_out = "basis.onb2";
  bool allow_multiplicity = false, analytic = false, verbose = false;
  std::uint64_t beyn_seed = BeynConfig{}.seed;
  auto* build = basis->add_subcommand("build", "Build an orthonormal eigenbasis and write it as ONB2")->configurable();
  build->add_option("--shape", shape, "peanut, disc, disc01 or custom:<file>")->capture_default_str();
  build->add_option("--n", n_functions, "Number of eigenfunctions")->capture_default_str();
  build->add_option("--scenario", scenario_id, "Tolerance scenario")->check(CLI::Range(1, 3))->capture_default_str();
  build->add_option("--grid", grid, "Grid resolution R")->check(CLI::Range(3, 4001))->capture_default_str();
  build->add_option("--elements", fixed_elements, "Fixed element count (0: scenario rule)")->capture_default_str();
  build->add_option("--nodes", nodes, "Trapezoid nodes per contour")->capture_default_str();
  build->add_option("--seed", beyn_seed, "Probe-matrix seed")->capture_default_str();
  build->add_flag("--allow-multiplicity", allow_multiplicity, "Orthonormalize repeated eigenvalues instead of aborting");
  build->add_flag("--analytic-disc", analytic, "Exact Bessel basis of disc01 (no boundary elements)");
  build->add_flag("--verbose", verbose, "Progress on stderr");
  build->add_option("--out", basis_out, "Output file")->capture_default_str();

  // basis verify
  int index = 1, nf_ref = 256, verify_grid = 81;
  std::vector<int> nf_list{16, 24, 32, 48, 64};
  std::string verify_dir = "verify";
  auto* verify = basis->add_subcommand("verify", "Element convergence of one eigenpair against a fine reference")->configurable();
  verify->add_option("--shape", shape, "Domain")->capture_default_str();
  verify->add_option("--index", index, "1-based eigenpair index")->capture_default_str();
  verify->add_option("--nf-list", nf_list, "Element counts")->delimiter(',')->capture_default_str();
  verify->add_option("--nf-ref", nf_ref, "Reference element count")->capture_default_str();
  verify->add_option("--grid", verify_grid, "Grid resolution for eigenfunction errors")->capture_default_str();
  verify->add_option("--out-dir", verify_dir, "Output directory")->capture_default_str();

  // spectrum export
  double kappa_max = 6.0, kappa_min = 0.0;
  int spectrum_elements = 0;
  bool no_refine = false;
  std::string spectrum_out = "-";
  auto* spectrum = app.add_subcommand("spectrum", "Wavenumber scans")->configurable();
  spectrum->require_subcommand(1);
  auto* sexport = spectrum->add_subcommand("export", "Scan [kappa_min, kappa_max] and write the eigenpair table")->configurable();
  sexport->add_option("--shape", shape, "Domain")->capture_default_str();
  sexport->add_option("--kappa-max", kappa_max, "Upper wavenumber")->capture_default_str();
  sexport->add_option("--kappa-min", kappa_min, "Lower wavenumber (0: Faber-Krahn bound)")->capture_default_str();
  sexport->add_option("--elements", spectrum_elements, "Element count (0: default rules)")->capture_default_str();
  sexport->add_option("--scenario", scenario_id, "Tolerance scenario for refinement")->check(CLI::Range(1, 3))->capture_default_str();
  sexport->add_flag("--no-refine", no_refine, "Report scan candidates only");
  sexport->add_option("--out", spectrum_out, "Output file, - for stdout")->capture_default_str();

  // spde solve / converge
  auto* spde = app.add_subcommand("spde", "Exponential Euler solver")->configurable();
  spde->require_subcommand(1);
  SolveArgs solve_args;
  auto* solve_cmd = spde->add_subcommand("solve", "Solve and write coefficients, snapshots and heatmaps")->configurable();
  add_problem_options(solve_cmd, solve_args);
  solve_cmd->add_option("--snapshots", solve_args.snapshots, "Steps whose fields are written")->delimiter(',');

  SolveArgs conv_args;
  conv_args.out_dir = "converge";
  char mode = 'M';
  std::vector<int> values;
  auto* converge = spde->add_subcommand("converge", "Strong-error convergence in M or N")->configurable();
  add_problem_options(converge, conv_args);
  converge->add_option("--mode", mode, "M or N")->check(CLI::IsMember({'M', 'N'}))->capture_default_str();
  converge->add_option("--values", values, "Parameter values")->delimiter(',')->required();

  // error-bound
  ErrorBoundParams eb;
  double v_cap = 1.0, e_cap = 1.0, f_cap = 1.0, eps0 = 1e-4;
  std::string from_run, bound_csv;
  auto* bound = app.add_subcommand("error-bound", "Evaluate the a-priori strong-error bound")->configurable();
  bound->add_option("--T", eb.T)->capture_default_str();
  bound->add_option("--N", eb.N)->capture_default_str();
  bound->add_option("--M", eb.M)->capture_default_str();
  bound->add_option("--R", eb.R)->capture_default_str();
  bound->add_option("--L", eb.L, "Lipschitz constant")->capture_default_str();
  bound->add_option("--lambda1", eb.lambda_1)->capture_default_str();
  bound->add_option("--lambdaN", eb.lambda_N, "Enters E1 only (<=0: omitted)")->capture_default_str();
  bound->add_option("--eps-lambda", eb.eps_lambda)->capture_default_str();
  bound->add_option("--eps-eta", eb.eps_eta)->capture_default_str();
  bound->add_option("--C", eb.C, "Quadrature constant")->capture_default_str();
  bound->add_option("--CT", eb.C_T, "E1 constant")->capture_default_str();
  bound->add_option("--eps", eb.eps, "E1 exponent")->capture_default_str();
  bound->add_option("--eps0", eps0, "Initial errors eps0_2 = eps0_3 = eps0_4")->capture_default_str();
  bound->add_option("--v-cap", v_cap, "Bound on |V_kj|")->capture_default_str();
  bound->add_option("--e-cap", e_cap, "Bound on eps_kj")->capture_default_str();
  bound->add_option("--f-cap", f_cap, "Bound on |f^j(V_k)|")->capture_default_str();
  bound->add_option("--from-run", from_run, "Extract coefficient suprema from a spde solve directory");
  bound->add_option("--csv", bound_csv, "Also write the report as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (threads > 0) omp_set_num_threads(threads);

  if (*build) {
    const auto t0 = std::chrono::steady_clock::now();
    OrthonormalBasis b;
    if (analytic) {
      if (shape != "disc01") throw DomainError("--analytic-disc requires --shape disc01");
      b = disc_bessel_basis(n_functions, grid);
    } else {
      BuildOptions o;
      o.resolution = grid;
      o.scenario = scenario(scenario_id);
      o.fixed_elements = fixed_elements;
      o.allow_multiplicity = allow_multiplicity;
      o.sampling.orthonormalize_clusters = allow_multiplicity;
      o.beyn.seed = beyn_seed;
      o.beyn.nodes = nodes;
      o.verbose = verbose;
      BuildReport report;
      const BoundaryCurve curve = make_shape(shape);
      b = build_onb(curve, n_functions, o, &report);
      std::cout << std::left << std::setw(6) << "index" << std::setw(20) << "kappa" << std::setw(20) << "lambda"
                << std::setw(7) << "n_f" << std::setw(14) << "residual" << std::setw(10) << "seconds" << "flags\n";
      for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const auto& e = report.entries[i];
        std::cout << std::left << std::setw(6) << i + 1 << std::setw(20) << fmt(e.record.kappa) << std::setw(20)
                  << fmt(e.record.lambda) << std::setw(7) << e.record.n_f << std::setw(14) << fmt(e.record.residual, 3)
                  << std::setw(10) << fmt(e.seconds, 3) << (e.flags.empty() ? "-" : e.flags) << "\n";
      }
      std::cout << "scan seconds " << fmt(report.scan_seconds, 4) << ", total seconds " << fmt(report.total_seconds, 4)
                << ", predicted cost " << fmt(report.predicted_cost, 4) << " (reference-machine units)\n";
      std::cout << "gram: max |diag - 1| " << fmt(report.gram_diag_dev_max, 3) << ", max |offdiag| "
                << fmt(report.gram_offdiag_max, 3) << "\n";
    }
    b.metadata["tool"] = kToolVersion;
    b.metadata["built"] = timestamp();
    b.metadata["build_seconds"] = fmt(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 4);
    save_basis(b, basis_out);
    write_manifest(manifest_path(basis_out), b.metadata);
    write_run_config(app, *build, basis_out + ".run.ini");
    std::cout << "wrote " << basis_out << " (" << b.size() << " functions, R = " << b.resolution << ")\n";
    return kOk;
  }

  if (*verify) {
    ensure_dir(verify_dir);
    VerifyOptions o;
    o.resolution = verify_grid;
    const auto rows = verify_against_reference(make_shape(shape), index, nf_list, nf_ref, o);
    auto csv = open_out(verify_dir + "/verify.csv");
    csv << "n_f,kappa,ev_error,ef_error\n";
    Series ev{{}, {}, {200, 40, 40}};
    Series ef{{}, {}, {40, 70, 200}};
    std::cout << std::left << std::setw(8) << "n_f" << std::setw(22) << "kappa" << std::setw(16) << "ev_error" << "ef_error\n";
    for (const auto& r : rows) {
      csv << r.n_f << "," << r.kappa << "," << r.ev_error << "," << r.ef_error << "\n";
      std::cout << std::left << std::setw(8) << r.n_f << std::setw(22) << fmt(r.kappa, 14) << std::setw(16)
                << fmt(r.ev_error, 4) << fmt(r.ef_error, 4) << "\n";
      ev.x.push_back(r.n_f);
      ev.y.push_back(r.ev_error);
      ef.x.push_back(r.n_f);
      ef.y.push_back(r.ef_error);
    }
    line_chart({ev, ef}, true, true).write_ppm(verify_dir + "/verify.ppm");
    write_run_config(app, *verify, verify_dir + "/run.ini");
    return kOk;
  }

  if (*sexport) {
    const BoundaryCurve curve = make_shape(shape);
    ScanOptions o;
    o.kappa_min = kappa_min;
    o.kappa_max = kappa_max;
    o.refine = !no_refine;
    if (spectrum_elements > 0) {
      o.scan_elements = [spectrum_elements](double) { return spectrum_elements; };
      o.refine_elements = [spectrum_elements](double) { return spectrum_elements; };
    } else {
      const ToleranceScenario sc = scenario(scenario_id);
      o.scan_elements = default_scan_elements;
      o.refine_elements = [sc](double k) { return required_elements(k, sc); };
    }
    const ScanReport report = scan_spectrum(curve, o, BeynConfig{});
    const auto& pairs = no_refine ? report.candidates : report.pairs;
    std::ofstream file;
    if (spectrum_out != "-") {
      file = open_out(spectrum_out);
    }
    std::ostream& out = spectrum_out == "-" ? std::cout : file;
    out << "index kappa lambda residual n_f flags\n";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& p = pairs[i];
      const std::string flags = flag_string(p.flags);
      out << i + 1 << " " << fmt(p.kappa.real(), 15) << " " << fmt(p.lambda, 15) << " " << fmt(p.residual, 4) << " "
          << p.n_f << " " << (flags.empty() ? "-" : flags) << "\n";
    }
    if (spectrum_out != "-") write_run_config(app, *sexport, spectrum_out + ".run.ini");
    return kOk;
  }

  if (*solve_cmd) {
    ensure_dir(solve_args.out_dir);
    OrthonormalBasis full;
    const SpdeProblem p = make_problem(solve_args, &full);
    p.validate();
    for (int r = 0; r < solve_args.realizations; ++r) {
      const Trajectory t = solve(p, r);
      write_coefficients(t, solve_args.out_dir + "/coefficients_r" + std::to_string(r) + ".csv");
      if (r == 0) {
        for (const auto& [k, g] : t.snapshots) {
          write_grid(g, solve_args.out_dir + "/snapshot_k" + std::to_string(k) + ".f64");
          heatmap(g, full.resolution, full.mask).write_ppm(solve_args.out_dir + "/snapshot_k" + std::to_string(k) + ".ppm");
        }
        const auto final_grid = p.basis->unpack(p.basis->field(t.final()));
        write_grid(final_grid, solve_args.out_dir + "/final.f64");
        heatmap(final_grid, full.resolution, full.mask).write_ppm(solve_args.out_dir + "/final.ppm");
      }
    }
    nlohmann::json m = problem_json(solve_args, p);
    m["resolution"] = full.resolution;
    m["snapshots"] = solve_args.snapshots;
    auto out = open_out(solve_args.out_dir + "/manifest.json");
    out << m.dump(2) << "\n";
    write_run_config(app, *solve_cmd, solve_args.out_dir + "/run.ini");
    std::cout << "wrote " << solve_args.realizations << " trajectories to " << solve_args.out_dir << "\n";
    return kOk;
  }

  if (*converge) {
    ensure_dir(conv_args.out_dir);
    const SpdeProblem p = make_problem(conv_args);
    const ConvergenceTable table = convergence_study(p, mode, values, conv_args.realizations);
    auto csv = open_out(conv_args.out_dir + "/convergence.csv");
    csv << table.mode << ",error,std_error\n";
    Series s{{}, {}, {40, 70, 200}};
    std::cout << std::left << std::setw(8) << table.mode << std::setw(16) << "error" << "std_error\n";
    for (const auto& r : table.rows) {
      csv << r.parameter << "," << r.error << "," << r.std_error << "\n";
      std::cout << std::left << std::setw(8) << r.parameter << std::setw(16) << fmt(r.error, 5) << fmt(r.std_error, 3) << "\n";
      s.x.push_back(r.parameter);
      s.y.push_back(r.error);
    }
    std::cout << "fitted slope " << fmt(table.slope, 4) << "\n";
    // reference line of slope -1 through the first point
    Series ref{{}, {}, {150, 150, 150}};
    if (!table.rows.empty()) {
      for (const auto& r : table.rows) {
        ref.x.push_back(r.parameter);
        ref.y.push_back(table.rows.front().error * table.rows.front().parameter / r.parameter);
      }
    }
    line_chart({ref, s}, true, true).write_ppm(conv_args.out_dir + "/convergence.ppm");
    nlohmann::json m = problem_json(conv_args, p);
    m["mode"] = table.mode;
    m["values"] = values;
    m["slope"] = table.slope;
    auto out = open_out(conv_args.out_dir + "/manifest.json");
    out << m.dump(2) << "\n";
    write_run_config(app, *converge, conv_args.out_dir + "/run.ini");
    return kOk;
  }

  if (*bound) {
    eb.eps0_2 = eb.eps0_3 = eb.eps0_4 = eps0;
    eb.sup = CoefficientSuprema::from_caps(eb.N, v_cap, e_cap, f_cap);
    if (!from_run.empty()) {
      std::ifstream in(from_run + "/manifest.json");
      if (!in) throw IoError("no manifest.json in '" + from_run + "'");
      const nlohmann::json m = nlohmann::json::parse(in);
      SolveArgs a;
      a.basis = m.at("basis").get<std::string>();
      a.n = m.at("N").get<int>();
      const std::string f = m.at("nonlinearity").get<std::string>();
      const Nonlinearity nl = make_nonlinearity(f, m.at("lipschitz").get<double>());
      const auto packed = load_packed(a.basis, a.n);
      std::vector<Trajectory> runs;
      for (int r = 0; r < m.at("realizations").get<int>(); ++r) {
        runs.push_back(read_coefficients(from_run + "/coefficients_r" + std::to_string(r) + ".csv", m.at("T").get<double>()));
      }
      eb.sup = extract_suprema(runs, *packed, nl, e_cap);
      eb.T = m.at("T").get<double>();
      eb.M = m.at("M").get<int>();
      eb.N = packed->size();
      eb.L = nl.lipschitz();
      OrthonormalBasis b = load_basis(a.basis);
      eb.R = b.resolution;
      eb.lambda_1 = b.records.front().lambda;
      eb.lambda_N = b.records[static_cast<std::size_t>(eb.N) - 1].lambda;
    }
    const ErrorBound result = error_bound(eb);
    const auto rows = bound_rows(eb, result);
    for (const auto& [k, v] : rows) std::cout << std::left << std::setw(34) << k << v << "\n";
    if (!bound_csv.empty()) {
      auto csv = open_out(bound_csv);
      csv << "quantity,value\n";
      for (const auto& [k, v] : rows) csv << '"' << k << "\"," << v << "\n";
    }
    return kOk;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const SpectralAnomaly& e) {
    std::cerr << "spectral anomaly: " << e.what() << "\n";
    return kSpectral;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
}
