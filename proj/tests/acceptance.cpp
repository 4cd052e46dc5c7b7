// acceptance gate for the gauge theory toolkit.
//
//   acceptance <criterion 1..7 | all> [cli-binary]
//
// each criterion prints indented detail lines and exactly one verdict line
// "criterion N: PASS|FAIL". exit code 0 iff every requested criterion passed.
// criterion 7 shells out to the cli binary and needs its path.

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "harness.hpp"

namespace {

namespace fs = std::filesystem;

struct Criterion {
  int number;
  bool ok = true;

  void check(bool pass, const std::string& text) {
    std::printf("  [%s] %s\n", pass ? " ok" : "BAD", text.c_str());
    ok = ok && pass;
  }
  bool verdict(const std::string& summary) {
    std::printf("criterion %d: %s (%s)\n", number, ok ? "PASS" : "FAIL", summary.c_str());
    std::fflush(stdout);
    return ok;
  }
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::vector<LatticeSpec> reference_systems() {
  LatticeSpec two;
  two.n_sites = 2;
  two.n_links = 1;
  two.topology = Topology::OpenChain;
  LatticeSpec three;
  three.n_sites = 3;
  three.n_links = 2;
  three.topology = Topology::OpenChain;
  LatticeSpec triangle;
  return {two, three, triangle};
}

const char* kSystemNames[3] = {"4-qubit", "7-qubit", "8-qubit"};

double ground_energy(const LatticeSpec& spec) {
  return eigh(build_hamiltonian(spec)).eigenvalues.front();
}

fs::path fresh_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("acceptance_" + tag + "_" + std::to_string(getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// 1. ground energies against the target values for the three systems
bool criterion1() {
  Criterion c{1};
  const double targets[3] = {-0.30901699, -0.69930137, -0.86375772};
  std::vector<LatticeSpec> systems = reference_systems();
  for (int k = 0; k < 3; ++k) {
    double e = ground_energy(systems[static_cast<size_t>(k)]);
    double err = std::abs(e - targets[k]);
    c.check(err < 1e-6, std::string(kSystemNames[k]) + " energy " + format_real(e) +
                            " vs target " + num(targets[k]) + " (|diff| " + num(err) + ")");
  }
  return c.verdict("exact energies within 1e-6 of the target values");
}

// 2. pauli term counts with unit padding against the target counts
bool criterion2() {
  Criterion c{2};
  const int targets[3] = {20, 196, 547};
  std::vector<LatticeSpec> systems = reference_systems();
  for (int k = 0; k < 3; ++k) {
    auto [padded, nq] = qubitize(build_hamiltonian(systems[static_cast<size_t>(k)]), 1.0);
    int count = term_count(decompose(padded, 1e-12));
    c.check(count == targets[k], std::string(kSystemNames[k]) + " term count " +
                                     std::to_string(count) + " vs target " +
                                     std::to_string(targets[k]) + " (threshold 1e-12)");
  }
  return c.verdict("term counts equal the target counts at lambda=1");
}

// 3. vqe quality at the pinned settings: depth 3, full entanglement,
//    600 iterations, best of 5 restarts
bool criterion3() {
  Criterion c{3};
  const double tolerances[3] = {1e-3, 2.5e-2, 4e-2};
  std::vector<LatticeSpec> systems = reference_systems();
  for (int k = 0; k < 3; ++k) {
    const LatticeSpec& spec = systems[static_cast<size_t>(k)];
    OperatorMatrix h = build_hamiltonian(spec);
    double exact = eigh(h).eigenvalues.front();
    auto [padded, nq] = qubitize(h, 1.0);
    Ansatz ansatz = build_ansatz(nq, 3, Entanglement::Full);
    MinimizeConfig mc{OptimizerKind::GradientQuasiNewton, 600, 5, 1234567};
    VqeResult r = minimize(padded, ansatz, mc);
    double gap = r.energy - exact;
    c.check(gap <= tolerances[k], std::string(kSystemNames[k]) + " gap " + num(gap) +
                                      " vs tolerance " + num(tolerances[k]) + " (" +
                                      std::to_string(r.evaluations) + " evaluations)");
    bool bound = true;
    for (const TracePoint& p : r.trace) bound = bound && (p.energy >= exact - 1e-9);
    c.check(bound, std::string(kSystemNames[k]) +
                       " variational bound holds over every evaluation");
  }
  return c.verdict("vqe gaps within tolerance and variationally bounded");
}

// 4. equation of state: shape of the exact curve, vqe sitting above it,
//    and the large-mu slope equalling the ground state particle number
bool criterion4() {
  Criterion c{4};
  RunConfig cfg = resolve_config(
      nullptr, {{"max_iter", "60"}, {"restarts", "2"}}, "eos");
  cfg.out_dir = fresh_dir("c4").string();
  std::vector<EosPoint> pts = run_eos(cfg);
  c.check(pts.size() == 21, "grid has 21 points over [0, 2] step 0.1");

  bool nondec = true, concave = true, above = true;
  double max_second_diff = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (i > 0) nondec = nondec && (pts[i].exact_energy >= pts[i - 1].exact_energy - 1e-12);
    if (i > 0 && i + 1 < pts.size()) {
      double second = pts[i + 1].exact_energy - 2.0 * pts[i].exact_energy +
                      pts[i - 1].exact_energy;
      max_second_diff = std::max(max_second_diff, second);
      concave = concave && (second <= 1e-9);
    }
    above = above && (pts[i].vqe_energy >= pts[i].exact_energy - 1e-9);
  }
  c.check(nondec, "exact curve is non-decreasing in mu");
  c.check(concave, "exact curve is concave (max second difference " + num(max_second_diff) + ")");
  c.check(above, "vqe curve sits above the exact curve at every grid point");

  // slope of the final plateau against a direct derivative of the exact energy
  double grid_slope = (pts[20].exact_energy - pts[19].exact_energy) / 0.1;
  LatticeSpec probe = cfg.lattice;
  const double mu0 = 1.95, h = 1e-4;
  probe.mu = mu0 + h;
  double ep = ground_energy(probe);
  probe.mu = mu0 - h;
  double em = ground_energy(probe);
  double particle_number = (ep - em) / (2.0 * h);
  c.check(std::abs(grid_slope - particle_number) <= 5e-3,
          "plateau slope " + num(grid_slope) + " matches dE/dmu = <N> = " +
              num(particle_number) + " within 5e-3");
  c.check(std::abs(particle_number - std::round(particle_number)) <= 5e-3,
          "plateau particle number " + num(particle_number) + " is an integer within 5e-3");
  return c.verdict("equation of state has the staircase structure");
}

// 5. cross-checks between independent computational paths
bool criterion5() {
  Criterion c{5};
  std::vector<LatticeSpec> systems = reference_systems();
  std::mt19937 rng(20260819);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  for (int k = 0; k < 3; ++k) {
    OperatorMatrix h = build_hamiltonian(systems[static_cast<size_t>(k)]);
    auto [padded, nq] = qubitize(h, 1.0);
    PauliSum sum = decompose(padded, 1e-12);

    double round_trip = max_abs_diff(reconstruct(sum), padded);
    c.check(round_trip < 1e-10, std::string(kSystemNames[k]) +
                                    " decompose/reconstruct round trip deviation " +
                                    num(round_trip));

    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      StateVector s(padded.dim);
      for (cdouble& z : s.v) z = cdouble(u(rng), u(rng));
      double scale = 1.0 / s.norm();
      for (cdouble& z : s.v) z *= scale;
      worst = std::max(worst, std::abs(expectation(s, padded) - expectation_pauli(s, sum)));
    }
    c.check(worst < 1e-10, std::string(kSystemNames[k]) +
                               " dense vs termwise expectation max deviation " + num(worst) +
                               " over 20 random states");

    EighResult eig = eigh(h);
    double bound = 1e-8 * std::max(1.0, max_abs_entry(h));
    double worst_res = 0.0;
    for (int col = 0; col < h.dim; ++col) {
      double res = 0.0;
      for (int i = 0; i < h.dim; ++i) {
        cdouble acc = 0.0;
        for (int j = 0; j < h.dim; ++j) acc += h.at(i, j) * eig.eigenvectors.at(j, col);
        acc -= eig.eigenvalues[static_cast<size_t>(col)] * eig.eigenvectors.at(i, col);
        res += std::norm(acc);
      }
      worst_res = std::max(worst_res, std::sqrt(res));
    }
    c.check(worst_res < bound, std::string(kSystemNames[k]) + " eigensolver residual " +
                                   num(worst_res) + " below " + num(bound));
  }

  // parameter-shift gradient vs central finite differences on the small system
  auto [padded, nq] = qubitize(build_hamiltonian(systems[0]), 1.0);
  Ansatz ansatz = build_ansatz(nq, 3, Entanglement::Full);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  double worst_grad = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> params(static_cast<size_t>(ansatz.param_count));
    for (double& x : params) x = angle(rng);
    std::vector<double> g = gradient(padded, ansatz, params);
    for (size_t i = 0; i < params.size(); ++i) {
      std::vector<double> plus = params, minus = params;
      plus[i] += 1e-5;
      minus[i] -= 1e-5;
      double fd = (expectation(prepare_state(ansatz, plus), padded) -
                   expectation(prepare_state(ansatz, minus), padded)) / 2e-5;
      worst_grad = std::max(worst_grad, std::abs(g[i] - fd));
    }
  }
  c.check(worst_grad < 1e-6,
          "parameter-shift vs finite-difference gradient max deviation " + num(worst_grad) +
              " over 10 random points");
  return c.verdict("independent computational paths agree");
}

// 6. operator algebra invariants at 1e-12
bool criterion6() {
  Criterion c{6};

  auto commutator = [](const OperatorMatrix& a, const OperatorMatrix& b) {
    return mat_add(mat_mul(a, b), mat_scale(-1.0, mat_mul(b, a)));
  };
  auto anticommutator = [](const OperatorMatrix& a, const OperatorMatrix& b) {
    return mat_add(mat_mul(a, b), mat_mul(b, a));
  };

  LatticeSpec tri;  // triangle exercises every operator slot
  ModelOperators ops = build_operators(tri);
  OperatorMatrix id = OperatorMatrix::identity(ops.physical_dim);

  double worst_anti = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const OperatorMatrix& ci = ops.fermion_ops[static_cast<size_t>(i)];
      const OperatorMatrix& cj = ops.fermion_ops[static_cast<size_t>(j)];
      worst_anti = std::max(worst_anti, max_abs_entry(anticommutator(ci, cj)));
      OperatorMatrix mixed = anticommutator(ci, dagger(cj));
      if (i == j)
        worst_anti = std::max(worst_anti, max_abs_diff(mixed, id));
      else
        worst_anti = std::max(worst_anti, max_abs_entry(mixed));
    }
  c.check(worst_anti < 1e-12, "fermion anticommutation relations, worst defect " + num(worst_anti));

  double worst_link = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (a != b)
        worst_link = std::max(
            worst_link,
            max_abs_entry(commutator(ops.link_pos_ops[static_cast<size_t>(a)],
                                     ops.link_field_ops[static_cast<size_t>(b)])));
      worst_link = std::max(
          worst_link, max_abs_entry(commutator(ops.link_pos_ops[static_cast<size_t>(a)],
                                               ops.link_pos_ops[static_cast<size_t>(b)])));
      worst_link = std::max(
          worst_link, max_abs_entry(commutator(ops.link_field_ops[static_cast<size_t>(a)],
                                               ops.link_field_ops[static_cast<size_t>(b)])));
    }
  for (int a = 0; a < 3; ++a)
    for (int j = 0; j < 3; ++j) {
      worst_link = std::max(
          worst_link, max_abs_entry(commutator(ops.link_pos_ops[static_cast<size_t>(a)],
                                               ops.fermion_ops[static_cast<size_t>(j)])));
      worst_link = std::max(
          worst_link, max_abs_entry(commutator(ops.link_field_ops[static_cast<size_t>(a)],
                                               ops.fermion_ops[static_cast<size_t>(j)])));
    }
  c.check(worst_link < 1e-12,
          "link operators commute across links and with fermions, worst defect " +
              num(worst_link));

  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst_herm = 0.0;
  std::vector<LatticeSpec> systems = reference_systems();
  for (int trial = 0; trial < 8; ++trial) {
    LatticeSpec s = systems[static_cast<size_t>(trial % 3)];
    s.m = u(rng);
    s.g = u(rng);
    s.mu = u(rng);
    worst_herm = std::max(worst_herm, hermiticity_defect(build_hamiltonian(s)));
  }
  c.check(worst_herm < 1e-12,
          "hamiltonian hermitian over randomized couplings, worst defect " + num(worst_herm));

  OperatorMatrix s = sylvester();
  double unit = max_abs_diff(mat_mul(dagger(s), s), OperatorMatrix::identity(3));
  c.check(unit < 1e-12, "sylvester matrix unitary, defect " + num(unit));

  EighResult pe = eigh(clock_p());
  double spec_err = std::max({std::abs(pe.eigenvalues[0] + 1.0), std::abs(pe.eigenvalues[1]),
                              std::abs(pe.eigenvalues[2] - 1.0)});
  c.check(spec_err < 1e-12, "field operator spectrum is {-1, 0, 1}, defect " + num(spec_err));
  return c.verdict("operator algebra invariants hold at 1e-12");
}

// 7. byte-identical artifacts from two identically seeded cli runs
bool criterion7(const std::string& cli) {
  Criterion c{7};
  if (cli.empty()) {
    c.check(false, "cli binary path argument missing");
    return c.verdict("determinism unchecked");
  }
  fs::path a = fresh_dir("c7a"), b = fresh_dir("c7b");
  std::string common = " tables --max-iter 60 --restarts 2 --seed 20260819 --out ";
  int ra = std::system(("\"" + cli + "\"" + common + a.string() + " > " +
                        (a / "stdout.txt").string()).c_str());
  int rb = std::system(("\"" + cli + "\"" + common + b.string() + " > " +
                        (b / "stdout.txt").string()).c_str());
  c.check(ra == 0 && rb == 0, "both cli runs exited 0");
  for (const char* name : {"summary.txt", "manifest.txt", "trace_4q.csv", "trace_7q.csv",
                           "trace_8q.csv", "stdout.txt"}) {
    std::string va = slurp(a / name), vb = slurp(b / name);
    c.check(!va.empty() && va == vb, std::string(name) + " byte-identical across runs (" +
                                         std::to_string(va.size()) + " bytes)");
  }
  return c.verdict("identically seeded runs produce identical artifacts");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <criterion 1..7 | all> [cli-binary]\n");
    return 2;
  }
  std::string which = argv[1];
  std::string cli = argc > 2 ? argv[2] : "";

  bool all_ok = true;
  auto want = [&](int n) { return which == "all" || which == std::to_string(n); };
  if (want(1)) all_ok = criterion1() && all_ok;
  if (want(2)) all_ok = criterion2() && all_ok;
  if (want(3)) all_ok = criterion3() && all_ok;
  if (want(4)) all_ok = criterion4() && all_ok;
  if (want(5)) all_ok = criterion5() && all_ok;
  if (want(6)) all_ok = criterion6() && all_ok;
  if (want(7)) all_ok = criterion7(cli) && all_ok;
  return all_ok ? 0 : 1;
}
