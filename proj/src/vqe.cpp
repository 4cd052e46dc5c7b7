#include "vqe.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

Ansatz build_ansatz(int n_qubits, int depth, Entanglement mode) {
  if (n_qubits < 1) throw std::invalid_argument("build_ansatz: need at least one qubit");
  if (depth < 0) throw std::invalid_argument("build_ansatz: negative depth");
  Ansatz a;
  a.n_qubits = n_qubits;
  a.depth = depth;
  a.entanglement = mode;
  if (mode == Entanglement::Full) {
    for (int i = 0; i < n_qubits; ++i)
      for (int j = i + 1; j < n_qubits; ++j) a.pairs.emplace_back(i, j);
  } else {
    for (int i = 0; i + 1 < n_qubits; ++i) a.pairs.emplace_back(i, i + 1);
  }
  a.param_count = 2 * n_qubits * (depth + 1);
  return a;
}

namespace {

void apply_ry(std::vector<cdouble>& v, int n, int q, double theta) {
  double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  int step = 1 << (n - 1 - q);
  int dim = 1 << n;
  for (int base = 0; base < dim; base += 2 * step)
    for (int off = 0; off < step; ++off) {
      cdouble a0 = v[base + off], a1 = v[base + off + step];
      v[base + off] = c * a0 - s * a1;
      v[base + off + step] = s * a0 + c * a1;
    }
}

void apply_rz(std::vector<cdouble>& v, int n, int q, double theta) {
  cdouble e0 = std::polar(1.0, -0.5 * theta), e1 = std::polar(1.0, 0.5 * theta);
  int step = 1 << (n - 1 - q);
  int dim = 1 << n;
  for (int base = 0; base < dim; base += 2 * step)
    for (int off = 0; off < step; ++off) {
      v[base + off] *= e0;
      v[base + off + step] *= e1;
    }
}

void apply_cx(std::vector<cdouble>& v, int n, int control, int target) {
  int cb = 1 << (n - 1 - control);
  int tb = 1 << (n - 1 - target);
  int dim = 1 << n;
  for (int i = 0; i < dim; ++i)
    if ((i & cb) && !(i & tb)) std::swap(v[i], v[i | tb]);
}

void prepare_into(const Ansatz& a, const std::vector<double>& params, std::vector<cdouble>& v) {
  int n = a.n_qubits;
  int dim = 1 << n;
  v.assign(static_cast<size_t>(dim), cdouble(0.0, 0.0));
  v[0] = 1.0;
  int p = 0;
  for (int q = 0; q < n; ++q) apply_ry(v, n, q, params[p++]);
  for (int q = 0; q < n; ++q) apply_rz(v, n, q, params[p++]);
  for (int layer = 0; layer < a.depth; ++layer) {
    for (const auto& [c, t] : a.pairs) apply_cx(v, n, c, t);
    for (int q = 0; q < n; ++q) apply_ry(v, n, q, params[p++]);
    for (int q = 0; q < n; ++q) apply_rz(v, n, q, params[p++]);
  }
}

// <v|H|v> with a caller-provided scratch buffer, no tolerance checks:
// the circuit keeps |v| normalized and H is validated once by the caller
double rayleigh(const std::vector<cdouble>& v, const OperatorMatrix& h,
                std::vector<cdouble>& scratch) {
  int dim = h.dim;
  scratch.resize(static_cast<size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    const cdouble* row = &h.a[static_cast<size_t>(i) * dim];
    cdouble s = 0.0;
    for (int j = 0; j < dim; ++j) s += row[j] * v[j];
    scratch[i] = s;
  }
  double acc = 0.0;
  for (int i = 0; i < dim; ++i)
    acc += v[i].real() * scratch[i].real() + v[i].imag() * scratch[i].imag();
  return acc;
}

}  // namespace

StateVector prepare_state(const Ansatz& ansatz, const std::vector<double>& params) {
  if (static_cast<int>(params.size()) != ansatz.param_count)
    throw std::invalid_argument("prepare_state: expected " + std::to_string(ansatz.param_count) +
                                " parameters, got " + std::to_string(params.size()));
  for (const auto& [c, t] : ansatz.pairs)
    if (c < 0 || t < 0 || c >= ansatz.n_qubits || t >= ansatz.n_qubits || c == t)
      throw std::invalid_argument("prepare_state: bad entangler pair");
  StateVector out(1 << ansatz.n_qubits);
  prepare_into(ansatz, params, out.v);
  return out;
}

double expectation(const StateVector& state, const OperatorMatrix& h) {
  if (state.dim != h.dim) throw std::invalid_argument("expectation: dimension mismatch");
  StateVector hv = matvec(h, state);
  cdouble num = 0.0;
  double den = 0.0;
  for (int i = 0; i < state.dim; ++i) {
    num += std::conj(state.v[i]) * hv.v[i];
    den += std::norm(state.v[i]);
  }
  if (den == 0.0) throw std::invalid_argument("expectation: zero state");
  cdouble value = num / den;
  if (std::abs(value.imag()) >= 1e-10)
    throw numeric_error("expectation: imaginary residue " + std::to_string(value.imag()));
  return value.real();
}

double expectation_pauli(const StateVector& state, const PauliSum& sum) {
  if (state.dim != (1 << sum.n_qubits))
    throw std::invalid_argument("expectation_pauli: dimension mismatch");
  uint32_t dim = static_cast<uint32_t>(state.dim);
  double total = 0.0;
  for (const PauliTerm& term : sum.terms) {
    uint32_t xmask = 0, zymask = 0;
    int n_y = 0;
    int n = sum.n_qubits;
    for (int q = 0; q < n; ++q) {
      uint32_t bit = 1u << (n - 1 - q);
      char ch = term.label[static_cast<size_t>(q)];
      if (ch == 'X' || ch == 'Y') xmask |= bit;
      if (ch == 'Y' || ch == 'Z') zymask |= bit;
      if (ch == 'Y') ++n_y;
    }
    // <psi|P|psi> = sum_c phase(c) conj(psi[c ^ xmask]) psi[c]
    cdouble acc = 0.0;
    for (uint32_t c = 0; c < dim; ++c) {
      cdouble contrib = std::conj(state.v[c ^ xmask]) * state.v[c];
      if (std::popcount(c & zymask) & 1)
        acc -= contrib;
      else
        acc += contrib;
    }
    cdouble q(1.0, 0.0);
    switch (n_y & 3) {
      case 1: q = {0.0, 1.0}; break;
      case 2: q = {-1.0, 0.0}; break;
      case 3: q = {0.0, -1.0}; break;
      default: break;
    }
    total += term.coefficient * (q * acc).real();
  }
  return total;
}

namespace {

// shared evaluation context: counts and traces every energy evaluation
struct Evaluator {
  const OperatorMatrix& h;
  const Ansatz& ansatz;
  std::vector<TracePoint>& trace;
  std::vector<cdouble> state, scratch;

  double operator()(const std::vector<double>& params) {
    prepare_into(ansatz, params, state);
    double e = rayleigh(state, h, scratch);
    trace.push_back({static_cast<long long>(trace.size()) + 1, e});
    return e;
  }
};

void shift_gradient(Evaluator& eval, std::vector<double>& params, std::vector<double>& grad) {
  size_t p = params.size();
  grad.resize(p);
  for (size_t k = 0; k < p; ++k) {
    double saved = params[k];
    params[k] = saved + std::numbers::pi / 2.0;
    double plus = eval(params);
    params[k] = saved - std::numbers::pi / 2.0;
    double minus = eval(params);
    params[k] = saved;
    grad[k] = 0.5 * (plus - minus);
  }
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct RestartOutcome {
  double energy = 0.0;
  std::vector<double> params;
};

// BFGS on the inverse Hessian with Armijo backtracking
RestartOutcome quasi_newton(Evaluator& eval, std::vector<double> theta, int max_iterations) {
  size_t p = theta.size();
  std::vector<double> hinv(p * p, 0.0);
  for (size_t i = 0; i < p; ++i) hinv[i * p + i] = 1.0;

  double energy = eval(theta);
  std::vector<double> grad, grad_next, dir(p), theta_next(p), s(p), y(p), hy(p);
  shift_gradient(eval, theta, grad);

  int flat_steps = 0;
  bool fresh_hessian = true;
  for (int iter = 0; iter < max_iterations; ++iter) {
    if (inf_norm(grad) < 1e-6) break;

    for (size_t i = 0; i < p; ++i) {
      double acc = 0.0;
      for (size_t j = 0; j < p; ++j) acc += hinv[i * p + j] * grad[j];
      dir[i] = -acc;
    }
    double slope = std::inner_product(grad.begin(), grad.end(), dir.begin(), 0.0);
    if (slope > -1e-18) {  // not a descent direction, restart from steepest descent
      for (size_t i = 0; i < p; ++i) {
        for (size_t j = 0; j < p; ++j) hinv[i * p + j] = (i == j) ? 1.0 : 0.0;
        dir[i] = -grad[i];
      }
      fresh_hessian = true;
      slope = -std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0);
      if (slope > -1e-18) break;
    }

    double step = 1.0;
    double energy_next = energy;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      for (size_t i = 0; i < p; ++i) theta_next[i] = theta[i] + step * dir[i];
      energy_next = eval(theta_next);
      if (energy_next <= energy + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // line search stalled, keep best so far

    shift_gradient(eval, theta_next, grad_next);
    double sy = 0.0;
    for (size_t i = 0; i < p; ++i) {
      s[i] = theta_next[i] - theta[i];
      y[i] = grad_next[i] - grad[i];
      sy += s[i] * y[i];
    }
    if (sy > 1e-12) {
      if (fresh_hessian) {
        // scale the identity guess to the curvature just measured before updating
        double yy = std::inner_product(y.begin(), y.end(), y.begin(), 0.0);
        if (yy > 1e-18) {
          double h0 = sy / yy;
          for (size_t i = 0; i < p; ++i)
            for (size_t j = 0; j < p; ++j) hinv[i * p + j] = (i == j) ? h0 : 0.0;
        }
        fresh_hessian = false;
      }
      // hinv <- (I - s y^T / sy) hinv (I - y s^T / sy) + s s^T / sy
      double rho = 1.0 / sy;
      for (size_t i = 0; i < p; ++i) {
        double acc = 0.0;
        for (size_t j = 0; j < p; ++j) acc += hinv[i * p + j] * y[j];
        hy[i] = acc;
      }
      double yhy = std::inner_product(y.begin(), y.end(), hy.begin(), 0.0);
      for (size_t i = 0; i < p; ++i)
        for (size_t j = 0; j < p; ++j)
          hinv[i * p + j] += rho * rho * yhy * s[i] * s[j] - rho * (s[i] * hy[j] + hy[i] * s[j]) +
                             rho * s[i] * s[j];
    }

    flat_steps = (std::abs(energy_next - energy) < 1e-9) ? flat_steps + 1 : 0;
    theta.swap(theta_next);
    grad.swap(grad_next);
    energy = energy_next;
    if (flat_steps >= 5) break;
  }
  return {energy, std::move(theta)};
}

// reflection/expansion/contraction/shrink simplex, gradient-free fallback
RestartOutcome nelder_mead(Evaluator& eval, std::vector<double> theta0, int max_iterations) {
  size_t p = theta0.size();
  std::vector<std::vector<double>> pts(p + 1, theta0);
  std::vector<double> vals(p + 1);
  for (size_t i = 1; i <= p; ++i) pts[i][i - 1] += 0.25;
  for (size_t i = 0; i <= p; ++i) vals[i] = eval(pts[i]);

  std::vector<size_t> order(p + 1);
  std::vector<double> centroid(p), trial(p), trial2(p);
  for (int iter = 0; iter < max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return vals[a] < vals[b]; });
    size_t best = order[0], worst = order[p], second = order[p - 1];
    if (vals[worst] - vals[best] < 1e-9) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (size_t k = 0; k <= p; ++k) {
      if (k == worst) continue;
      for (size_t i = 0; i < p; ++i) centroid[i] += pts[k][i];
    }
    for (size_t i = 0; i < p; ++i) centroid[i] /= static_cast<double>(p);

    for (size_t i = 0; i < p; ++i) trial[i] = centroid[i] + (centroid[i] - pts[worst][i]);
    double e_reflect = eval(trial);
    if (e_reflect < vals[best]) {
      for (size_t i = 0; i < p; ++i) trial2[i] = centroid[i] + 2.0 * (centroid[i] - pts[worst][i]);
      double e_expand = eval(trial2);
      if (e_expand < e_reflect) {
        pts[worst] = trial2;
        vals[worst] = e_expand;
      } else {
        pts[worst] = trial;
        vals[worst] = e_reflect;
      }
    } else if (e_reflect < vals[second]) {
      pts[worst] = trial;
      vals[worst] = e_reflect;
    } else {
      bool outside = e_reflect < vals[worst];
      for (size_t i = 0; i < p; ++i)
        trial2[i] = outside ? centroid[i] + 0.5 * (trial[i] - centroid[i])
                            : centroid[i] - 0.5 * (centroid[i] - pts[worst][i]);
      double e_contract = eval(trial2);
      if (e_contract < std::min(e_reflect, vals[worst])) {
        pts[worst] = trial2;
        vals[worst] = e_contract;
      } else {
        for (size_t k = 0; k <= p; ++k) {
          if (k == best) continue;
          for (size_t i = 0; i < p; ++i) pts[k][i] = pts[best][i] + 0.5 * (pts[k][i] - pts[best][i]);
          vals[k] = eval(pts[k]);
        }
      }
    }
  }
  size_t best = 0;
  for (size_t k = 1; k <= p; ++k)
    if (vals[k] < vals[best]) best = k;
  return {vals[best], pts[best]};
}

}  // namespace

std::vector<double> gradient(const OperatorMatrix& h, const Ansatz& ansatz,
                             const std::vector<double>& params) {
  if (static_cast<int>(params.size()) != ansatz.param_count)
    throw std::invalid_argument("gradient: parameter count mismatch");
  std::vector<TracePoint> scratch_trace;
  Evaluator eval{h, ansatz, scratch_trace, {}, {}};
  std::vector<double> theta = params, grad;
  shift_gradient(eval, theta, grad);
  return grad;
}

VqeResult minimize(const OperatorMatrix& h, const Ansatz& ansatz, const MinimizeConfig& config) {
  if (h.dim != (1 << ansatz.n_qubits))
    throw std::invalid_argument("minimize: Hamiltonian dimension does not match ansatz qubits");
  if (config.restarts < 1) throw std::invalid_argument("minimize: need at least one restart");
  double defect = hermiticity_defect(h);
  if (defect > 1e-10)
    throw numeric_error("minimize: Hamiltonian not Hermitian, defect " + std::to_string(defect));

  VqeResult result;
  result.seed = config.seed;
  result.restarts_used = config.restarts;
  Evaluator eval{h, ansatz, result.trace, {}, {}};

  RestartOutcome best;
  bool have_best = false;
  for (int r = 0; r < config.restarts; ++r) {
    std::mt19937_64 rng(config.seed + static_cast<std::uint64_t>(r));
    std::vector<double> theta(static_cast<size_t>(ansatz.param_count));
    for (double& t : theta) {
      double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
      t = -std::numbers::pi + 2.0 * std::numbers::pi * u;
    }
    RestartOutcome out = (config.optimizer == OptimizerKind::GradientQuasiNewton)
                             ? quasi_newton(eval, std::move(theta), config.max_iterations)
                             : nelder_mead(eval, std::move(theta), config.max_iterations);
    if (!have_best || out.energy < best.energy) {
      best = std::move(out);
      have_best = true;
    }
  }

  std::vector<double> final_grad;
  shift_gradient(eval, best.params, final_grad);
  result.converged = inf_norm(final_grad) < 1e-4;
  result.energy = eval(best.params);  // final trace entry matches the reported energy
  result.optimal_params = std::move(best.params);
  result.evaluations = static_cast<long long>(result.trace.size());
  return result;
}
