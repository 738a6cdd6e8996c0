#include "spdebem/spde.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace spdebem {

double NoiseSpec::q(int n) const {
  return amplitude * amplitude * std::pow(static_cast<double>(n), -(decay - eps_q));
}

RealVector NoiseSpec::coefficients(int count) const {
  RealVector out(count);
  for (int n = 1; n <= count; ++n) out(n - 1) = q(n);
  return out;
}

void NoiseSpec::validate() const {
  if (!(decay - eps_q > 1.0)) throw DomainError("noise: decay must exceed 1 (trace class)");
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("noise: gamma must lie in (0, 1)");
  if (!(gamma < 0.5 * (decay - eps_q))) throw DomainError("noise: gamma must be below decay / 2");
  if (!(amplitude >= 0.0)) throw DomainError("noise: amplitude must be non-negative");
}

Nonlinearity Nonlinearity::identity() {
  Nonlinearity f;
  f.kind_ = Kind::Identity;
  f.lipschitz_ = 1.0;
  return f;
}

Nonlinearity Nonlinearity::rational() {
  Nonlinearity f;
  f.kind_ = Kind::Rational;
  f.lipschitz_ = 3.0 * std::sqrt(3.0) / 8.0;  // |f'| peaks at x = 1/sqrt(3)
  return f;
}

Nonlinearity Nonlinearity::bump(double p) {
  Nonlinearity f;
  f.kind_ = Kind::Bump;
  f.p_ = p;
  f.lipschitz_ = std::sqrt(20.0 / std::exp(1.0));  // |f'| peaks at |x - p| = 1/sqrt(20)
  return f;
}

Nonlinearity Nonlinearity::zero() { return {}; }

Nonlinearity Nonlinearity::expression(const std::string& source, double lipschitz) {
  Nonlinearity f;
  f.kind_ = Kind::Expression;
  f.expr_ = std::make_shared<const Expression>(source);
  f.lipschitz_ = lipschitz >= 0.0 ? lipschitz : f.sampled_lipschitz();
  return f;
}

Nonlinearity Nonlinearity::parse(const std::string& spec) {
  if (spec == "f1" || spec == "identity") return identity();
  if (spec == "f2" || spec == "rational") return rational();
  if (spec == "zero") return zero();
  if (spec.rfind("bump:", 0) == 0) {
    std::size_t used = 0;
    const std::string arg = spec.substr(5);
    double p = 0.0;
    try {
      p = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size()) throw DomainError("nonlinearity: malformed bump parameter '" + arg + "'");
    return bump(p);
  }
  if (spec.rfind("expr:", 0) == 0) return expression(spec.substr(5));
  throw DomainError("unknown nonlinearity '" + spec + "' (expected f1, f2, bump:<p>, zero or expr:<f(x)>)");
}

std::string Nonlinearity::name() const {
  switch (kind_) {
    case Kind::Identity: return "f1";
    case Kind::Rational: return "f2";
    case Kind::Zero: return "zero";
    case Kind::Bump: {
      std::ostringstream s;
      s << "bump:" << p_;
      return s.str();
    }
    case Kind::Expression: return "expr:" + expr_->source();
  }
  return "?";
}

double Nonlinearity::operator()(double x) const {
  switch (kind_) {
    case Kind::Identity: return x;
    case Kind::Rational: return 1.0 / (1.0 + x * x);
    case Kind::Bump: return std::exp(-10.0 * (x - p_) * (x - p_));
    case Kind::Zero: return 0.0;
    case Kind::Expression: return (*expr_)(x);
  }
  return 0.0;
}

double Nonlinearity::sampled_lipschitz(double lo, double hi, int samples) const {
  const double step = (hi - lo) / (samples - 1);
  const double d = 1e-6 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = lo + i * step;
    const double slope = std::abs((*this)(x + d) - (*this)(x - d)) / (2.0 * d);
    if (std::isfinite(slope)) best = std::max(best, slope);
  }
  return best;
}

std::vector<double> bump_initial(double x1, double x2, double y1, double y2, int resolution,
                                 const std::vector<std::uint8_t>& mask) {
  if (!(x1 < x2 && y1 < y2)) throw DomainError("bump_initial: need x1 < x2 and y1 < y2");
  const auto r = static_cast<std::size_t>(resolution);
  if (mask.size() != r * r) throw DomainError("bump_initial: mask size does not match R*R");
  const double cx = 0.5 * (x1 + x2);
  const double cy = 0.5 * (y1 + y2);
  std::vector<double> grid(r * r, 0.0);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      const std::size_t c = i * r + j;
      if (!mask[c]) continue;
      const Point p = grid_point(resolution, static_cast<int>(i), static_cast<int>(j));
      const double r2 = (p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy);
      if (r2 < 1.0) grid[c] = std::exp(-1.0 / (1.0 - r2));
    }
  }
  return grid;
}

void SpdeProblem::validate() const {
  if (!basis) throw DomainError("spde: problem has no basis");
  if (!(T > 0.0)) throw DomainError("spde: T must be positive");
  if (M < 1) throw DomainError("spde: M must be >= 1");
  if (initial.size() != static_cast<Eigen::Index>(basis->inside().size())) {
    throw DomainError("spde: initial condition does not match the basis grid");
  }
  noise.validate();
  if ((basis->eigenvalues().array() <= 0.0).any()) throw DomainError("spde: eigenvalues must be positive");
}

RealVector exp_euler_step(const RealVector& v, const RealVector& f, const RealVector& normals,
                          const RealVector& lambda, const RealVector& q, double h) {
  const Eigen::Index n = v.size();
  if (f.size() != n || normals.size() != n || lambda.size() != n || q.size() != n) {
    throw DomainError("exp_euler_step: vector lengths differ");
  }
  if (!(h > 0.0)) throw DomainError("exp_euler_step: h must be positive");
  if (!v.allFinite() || !f.allFinite() || !normals.allFinite()) throw NumericError("exp_euler_step: non-finite input");
  RealVector out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double l = lambda(j);
    const double decay = std::exp(-l * h);
    const double drift = -std::expm1(-l * h) / l;
    const double variance = -q(j) * std::expm1(-2.0 * l * h) / (2.0 * l);
    out(j) = decay * v(j) + drift * f(j) + std::sqrt(variance) * normals(j);
  }
  return out;
}

RealVector nemytskii_coeffs(const PackedBasis& basis, const RealVector& v, const Nonlinearity& f) {
  if (v.size() != basis.size()) throw DomainError("nemytskii_coeffs: coefficient count must equal N");
  if (f.kind() == Nonlinearity::Kind::Zero) return RealVector::Zero(v.size());
  RealVector u = basis.field(v);
  for (Eigen::Index k = 0; k < u.size(); ++k) u(k) = f(u(k));
  return basis.project(u);
}

RealMatrix noise_draws(std::uint64_t seed, int realization, int steps, int modes) {
  RealMatrix out(steps, modes);
  for (int j = 0; j < modes; ++j) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(realization), static_cast<std::uint32_t>(j)};
    std::mt19937_64 gen(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int k = 0; k < steps; ++k) out(k, j) = normal(gen);
  }
  return out;
}

namespace {

Trajectory run(const SpdeProblem& problem, int realization, bool exact_linear) {
  problem.validate();
  const PackedBasis& basis = *problem.basis;
  const int n = basis.size();
  const double h = problem.T / problem.M;
  RealVector lambda = basis.eigenvalues();
  if (exact_linear) {
    if ((lambda.array() <= 1.0).any()) throw DomainError("exact_linear_solution: shift makes mode unstable (lambda <= 1)");
    lambda.array() -= 1.0;
  }
  const RealVector q = problem.noise.coefficients(n);
  const RealMatrix normals = noise_draws(problem.seed, realization, problem.M, n);
  const bool spectral = problem.nonlinearity.kind() == Nonlinearity::Kind::Identity && !problem.force_quadrature;

  Trajectory traj;
  traj.T = problem.T;
  traj.M = problem.M;
  traj.coefficients.resize(problem.M + 1, n);
  RealVector v = basis.project(problem.initial);
  traj.coefficients.row(0) = v.transpose();
  auto keep = [&](int k) {
    if (std::find(problem.snapshots.begin(), problem.snapshots.end(), k) != problem.snapshots.end()) {
      traj.snapshots[k] = basis.unpack(basis.field(v));
    }
  };
  keep(0);
  const RealVector zero = RealVector::Zero(n);
  for (int k = 0; k < problem.M; ++k) {
    RealVector f;
    if (exact_linear) f = zero;
    else if (spectral) f = v;
    else f = nemytskii_coeffs(basis, v, problem.nonlinearity);
    v = exp_euler_step(v, f, normals.row(k).transpose(), lambda, q, h);
    traj.coefficients.row(k + 1) = v.transpose();
    keep(k + 1);
  }
  return traj;
}

}  // namespace

Trajectory solve(const SpdeProblem& problem, int realization) { return run(problem, realization, false); }

Trajectory exact_linear_solution(const SpdeProblem& problem, int realization) {
  if (problem.nonlinearity.kind() != Nonlinearity::Kind::Identity) {
    throw DomainError("exact_linear_solution: requires the identity nonlinearity");
  }
  return run(problem, realization, true);
}

double strong_error(const Trajectory& a, const Trajectory& b, const PackedBasis& basis) {
  if (std::abs(a.T - b.T) > 1e-12 * std::max(1.0, std::abs(a.T))) throw DomainError("strong_error: final times differ");
  RealVector va = a.final();
  RealVector vb = b.final();
  const Eigen::Index n = std::max(va.size(), vb.size());
  if (n > basis.size()) throw DomainError("strong_error: basis holds fewer functions than the trajectories");
  va.conservativeResizeLike(RealVector::Zero(n));
  vb.conservativeResizeLike(RealVector::Zero(n));
  const RealVector diff_field = basis.functions().topRows(n).transpose() * (va - vb);
  return basis.l2_norm(diff_field);
}

ConvergenceTable convergence_study(const SpdeProblem& problem, char mode, const std::vector<int>& values,
                                   int realizations) {
  if (realizations < 1) throw DomainError("convergence_study: need at least one realization");
  if (values.size() < 2) throw DomainError("convergence_study: need at least two parameter values");
  if (mode != 'M' && mode != 'N') throw DomainError("convergence_study: mode must be 'M' or 'N'");
  if (mode == 'M' && problem.nonlinearity.kind() != Nonlinearity::Kind::Identity) {
    throw DomainError("convergence_study: M mode compares against the exact linear solution and needs f1");
  }
  problem.validate();
  ConvergenceTable table;
  table.mode = std::string(1, mode);
  const auto nv = values.size();
  const auto nr = static_cast<std::size_t>(realizations);
  std::vector<double> errors(nv * nr, 0.0);

  // Realizations are independent; each writes only its own slots.
  std::vector<std::shared_ptr<const PackedBasis>> heads(nv);
  if (mode == 'N') {
    for (std::size_t i = 0; i < nv; ++i) {
      if (values[i] < 1 || values[i] > problem.basis->size()) {
        throw DomainError("convergence_study: N = " + std::to_string(values[i]) + " exceeds the basis size");
      }
      heads[i] = std::make_shared<const PackedBasis>(problem.basis->head(values[i]));
    }
  }
  bool failed = false;
  std::string message;
#pragma omp parallel for schedule(dynamic, 1)
  for (int r = 0; r < realizations; ++r) {
    try {
      if (mode == 'M') {
        for (std::size_t i = 0; i < nv; ++i) {
          SpdeProblem p = problem;
          p.M = values[i];
          p.snapshots.clear();
          errors[i * nr + static_cast<std::size_t>(r)] =
              strong_error(solve(p, r), exact_linear_solution(p, r), *problem.basis);
        }
      } else {
        SpdeProblem ref = problem;
        ref.snapshots.clear();
        const Trajectory reference = solve(ref, r);
        for (std::size_t i = 0; i < nv; ++i) {
          SpdeProblem p = ref;
          p.basis = heads[i];
          errors[i * nr + static_cast<std::size_t>(r)] = strong_error(solve(p, r), reference, *problem.basis);
        }
      }
    } catch (const std::exception& e) {
#pragma omp critical(spdebem_convergence_error)
      if (!failed) {
        failed = true;
        message = e.what();
      }
    }
  }
  if (failed) throw NumericError(message);

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < nv; ++i) {
    double mean = 0.0;
    for (std::size_t r = 0; r < nr; ++r) mean += errors[i * nr + r];
    mean /= static_cast<double>(nr);
    double var = 0.0;
    for (std::size_t r = 0; r < nr; ++r) var += (errors[i * nr + r] - mean) * (errors[i * nr + r] - mean);
    const double std_error = nr > 1 ? std::sqrt(var / static_cast<double>(nr - 1) / static_cast<double>(nr)) : 0.0;
    table.rows.push_back({values[i], mean, std_error});
    xs.push_back(values[i]);
    ys.push_back(mean);
  }
  table.slope = loglog_slope(xs, ys);
  return table;
}

RealMatrix final_coefficients(const SpdeProblem& problem, int realizations) {
  problem.validate();
  RealMatrix out(realizations, problem.basis->size());
#pragma omp parallel for schedule(dynamic, 16)
  for (int r = 0; r < realizations; ++r) {
    SpdeProblem p = problem;
    p.snapshots.clear();
    out.row(r) = solve(p, r).final().transpose();
  }
  return out;
}

}  // namespace spdebem
