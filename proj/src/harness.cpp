#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last)
    throw config_error(key + ": expected a real number, got '" + value + "'");
  return out;
}

long long parse_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last)
    throw config_error(key + ": expected an integer, got '" + value + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last)
    throw config_error(key + ": expected a non-negative integer, got '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  throw config_error(key + ": expected a boolean, got '" + value + "'");
}

struct ResolveState {
  bool n_links_explicit = false;
};

void apply_key(RunConfig& c, ResolveState& st, const std::string& key, const std::string& value) {
  if (key == "n_sites")
    c.lattice.n_sites = static_cast<int>(parse_int(key, value));
  else if (key == "n_links") {
    c.lattice.n_links = static_cast<int>(parse_int(key, value));
    st.n_links_explicit = true;
  } else if (key == "topology") {
    if (value == "open")
      c.lattice.topology = Topology::OpenChain;
    else if (value == "triangle")
      c.lattice.topology = Topology::ClosedTriangle;
    else
      throw config_error("topology: expected 'open' or 'triangle', got '" + value + "'");
  } else if (key == "g")
    c.lattice.g = parse_double(key, value);
  else if (key == "m") {
    c.lattice.m = parse_double(key, value);
    c.mass_explicit = true;
  } else if (key == "mu")
    c.lattice.mu = parse_double(key, value);
  else if (key == "lambda")
    c.lattice.padding_lambda = parse_double(key, value);
  else if (key == "stagger_offset")
    c.lattice.stagger_offset = static_cast<int>(parse_int(key, value));
  else if (key == "safe_padding")
    c.safe_padding = parse_bool(key, value);
  else if (key == "depth")
    c.depth = static_cast<int>(parse_int(key, value));
  else if (key == "entanglement") {
    if (value == "full")
      c.entanglement = Entanglement::Full;
    else if (value == "linear")
      c.entanglement = Entanglement::Linear;
    else
      throw config_error("entanglement: expected 'full' or 'linear', got '" + value + "'");
  } else if (key == "optimizer") {
    if (value == "quasi_newton")
      c.optimizer = OptimizerKind::GradientQuasiNewton;
    else if (value == "nelder_mead")
      c.optimizer = OptimizerKind::NelderMeadLike;
    else
      throw config_error("optimizer: expected 'quasi_newton' or 'nelder_mead', got '" + value + "'");
  } else if (key == "max_iter")
    c.max_iterations = static_cast<int>(parse_int(key, value));
  else if (key == "restarts")
    c.restarts = static_cast<int>(parse_int(key, value));
  else if (key == "seed")
    c.seed = parse_u64(key, value);
  else if (key == "threshold")
    c.pauli_threshold = parse_double(key, value);
  else if (key == "mu_start")
    c.mu_start = parse_double(key, value);
  else if (key == "mu_end")
    c.mu_end = parse_double(key, value);
  else if (key == "mu_step")
    c.mu_step = parse_double(key, value);
  else if (key == "out")
    c.out_dir = value;
  else
    throw config_error("unknown key '" + key + "'");
}

}  // namespace

RunConfig resolve_config(const std::string* config_path,
                         const std::vector<std::pair<std::string, std::string>>& overrides,
                         const std::string& subcommand) {
  RunConfig c;
  ResolveState st;

  if (config_path) {
    std::ifstream in(*config_path);
    if (!in) throw config_error("config file not readable: " + *config_path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw config_error("config line " + std::to_string(lineno) + ": expected key=value");
      apply_key(c, st, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }
  for (const auto& [key, value] : overrides) apply_key(c, st, key, value);

  if (c.lattice.topology == Topology::OpenChain && !st.n_links_explicit)
    c.lattice.n_links = c.lattice.n_sites - 1;
  if (subcommand == "eos" && !c.mass_explicit) c.lattice.m = 1.0;

  try {
    c.lattice.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
  if (c.depth < 0) throw config_error("depth: must be non-negative");
  if (c.max_iterations < 1) throw config_error("max_iter: must be positive");
  if (c.restarts < 1) throw config_error("restarts: must be positive");
  if (c.pauli_threshold < 0.0) throw config_error("threshold: must be non-negative");
  if (subcommand == "eos") {
    if (c.mu_step <= 0.0) throw config_error("mu_step: must be positive");
    if (c.mu_end < c.mu_start) throw config_error("mu_end: must be >= mu_start");
    if (c.lattice.topology != Topology::ClosedTriangle)
      throw config_error("topology: eos sweep requires the triangle");
  }
  return c;
}

int eos_grid_count(double mu_start, double mu_end, double mu_step) {
  return static_cast<int>(std::floor((mu_end - mu_start) / mu_step + 1e-9)) + 1;
}

double safe_padding_lambda(double m, double mu) {
  return 10.0 * (1.0 + std::abs(mu) + std::abs(m) + 1.0);
}

namespace {

std::string topology_name(Topology t) {
  return t == Topology::OpenChain ? "open" : "triangle";
}

std::string describe(const LatticeSpec& s) {
  std::string out = std::to_string(s.n_sites) + " sites, " + std::to_string(s.n_links) +
                    (s.n_links == 1 ? " link, " : " links, ");
  out += (s.topology == Topology::OpenChain) ? "open chain" : "closed triangle";
  return out;
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  std::string path = dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string manifest_text(const RunConfig& c, const std::string& subcommand,
                          const std::vector<std::pair<std::string, std::string>>& extras) {
  std::string t;
  t += "subcommand=" + subcommand + "\n";
  t += "n_sites=" + std::to_string(c.lattice.n_sites) + "\n";
  t += "n_links=" + std::to_string(c.lattice.n_links) + "\n";
  t += "topology=" + topology_name(c.lattice.topology) + "\n";
  t += "g=" + format_real(c.lattice.g) + "\n";
  t += "m=" + format_real(c.lattice.m) + "\n";
  t += "mu=" + format_real(c.lattice.mu) + "\n";
  t += "stagger_offset=" + std::to_string(c.lattice.stagger_offset) + "\n";
  t += "lambda=" + format_real(c.lattice.padding_lambda) + "\n";
  t += "safe_padding=" + std::string(c.safe_padding ? "1" : "0") + "\n";
  t += "depth=" + std::to_string(c.depth) + "\n";
  t += "entanglement=" + std::string(c.entanglement == Entanglement::Full ? "full" : "linear") + "\n";
  t += "optimizer=" + std::string(c.optimizer == OptimizerKind::GradientQuasiNewton
                                      ? "quasi_newton"
                                      : "nelder_mead") + "\n";
  t += "max_iter=" + std::to_string(c.max_iterations) + "\n";
  t += "restarts=" + std::to_string(c.restarts) + "\n";
  t += "seed=" + std::to_string(c.seed) + "\n";
  t += "threshold=" + format_real(c.pauli_threshold) + "\n";
  if (subcommand == "eos") {
    t += "mu_start=" + format_real(c.mu_start) + "\n";
    t += "mu_end=" + format_real(c.mu_end) + "\n";
    t += "mu_step=" + format_real(c.mu_step) + "\n";
  }
  for (const auto& [k, v] : extras) t += k + "=" + v + "\n";
  return t;
}

std::string trace_csv(const std::vector<TracePoint>& trace) {
  std::string t = "evaluation,energy\n";
  for (const TracePoint& p : trace)
    t += std::to_string(p.evaluation) + "," + format_real(p.energy) + "\n";
  return t;
}

int padded_qubits(int dim) {
  int n = 0;
  while ((1 << n) < dim) ++n;
  return n;
}

std::string svg_coord(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string svg_tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string eos_svg(const std::vector<EosPoint>& pts) {
  const double x0 = 70, x1 = 640, y0 = 30, y1 = 400;
  double mu_lo = pts.front().mu, mu_hi = pts.back().mu;
  if (mu_hi <= mu_lo) mu_hi = mu_lo + 1.0;
  double e_lo = pts[0].exact_energy, e_hi = pts[0].exact_energy;
  for (const EosPoint& p : pts) {
    e_lo = std::min({e_lo, p.exact_energy, p.vqe_energy});
    e_hi = std::max({e_hi, p.exact_energy, p.vqe_energy});
  }
  double margin = std::max(0.05 * (e_hi - e_lo), 1e-3);
  e_lo -= margin;
  e_hi += margin;
  auto px = [&](double mu) { return x0 + (mu - mu_lo) / (mu_hi - mu_lo) * (x1 - x0); };
  auto py = [&](double e) { return y0 + (e_hi - e) / (e_hi - e_lo) * (y1 - y0); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"680\" height=\"460\" "
       "viewBox=\"0 0 680 460\">\n";
  s += "<rect width=\"680\" height=\"460\" fill=\"white\"/>\n";
  s += "<line x1=\"70\" y1=\"400\" x2=\"640\" y2=\"400\" stroke=\"black\"/>\n";
  s += "<line x1=\"70\" y1=\"30\" x2=\"70\" y2=\"400\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double mu = mu_lo + (mu_hi - mu_lo) * i / 4.0;
    double x = px(mu);
    s += "<line x1=\"" + svg_coord(x) + "\" y1=\"400\" x2=\"" + svg_coord(x) +
         "\" y2=\"405\" stroke=\"black\"/>\n";
    s += "<text x=\"" + svg_coord(x) + "\" y=\"420\" font-size=\"12\" text-anchor=\"middle\">" +
         svg_tick_label(mu) + "</text>\n";
    double e = e_lo + (e_hi - e_lo) * i / 4.0;
    double y = py(e);
    s += "<line x1=\"65\" y1=\"" + svg_coord(y) + "\" x2=\"70\" y2=\"" + svg_coord(y) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"60\" y=\"" + svg_coord(y + 4) +
         "\" font-size=\"12\" text-anchor=\"end\">" + svg_tick_label(e) + "</text>\n";
  }
  s += "<text x=\"355\" y=\"445\" font-size=\"13\" text-anchor=\"middle\">chemical potential"
       "</text>\n";
  s += "<text x=\"18\" y=\"215\" font-size=\"13\" text-anchor=\"middle\" "
       "transform=\"rotate(-90 18 215)\">ground state energy</text>\n";

  std::string exact_pts, vqe_pts;
  for (const EosPoint& p : pts) {
    exact_pts += svg_coord(px(p.mu)) + "," + svg_coord(py(p.exact_energy)) + " ";
    vqe_pts += svg_coord(px(p.mu)) + "," + svg_coord(py(p.vqe_energy)) + " ";
  }
  s += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"" + exact_pts +
       "\"/>\n";
  s += "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6 3\" "
       "points=\"" + vqe_pts + "\"/>\n";
  s += "<line x1=\"500\" y1=\"50\" x2=\"530\" y2=\"50\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  s += "<text x=\"536\" y=\"54\" font-size=\"12\">exact</text>\n";
  s += "<line x1=\"500\" y1=\"70\" x2=\"530\" y2=\"70\" stroke=\"#d62728\" stroke-width=\"2\" "
       "stroke-dasharray=\"6 3\"/>\n";
  s += "<text x=\"536\" y=\"74\" font-size=\"12\">vqe</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace

EdReport run_ed(const RunConfig& config) {
  OperatorMatrix h = build_hamiltonian(config.lattice);
  EighResult eig = eigh(h);
  EdReport report;
  report.ground_energy = eig.eigenvalues.front();
  report.dim = h.dim;
  report.n_qubits = padded_qubits(h.dim);

  std::string summary;
  summary += "exact diagonalization\n";
  summary += "system: " + describe(config.lattice) + "\n";
  summary += "dim: " + std::to_string(report.dim) + " (" + std::to_string(report.n_qubits) +
             " qubits when padded)\n";
  summary += "g=" + format_real(config.lattice.g) + " m=" + format_real(config.lattice.m) +
             " mu=" + format_real(config.lattice.mu) + "\n";
  summary += "ground energy = " + format_real(report.ground_energy) + "\n";
  write_file(config.out_dir, "manifest.txt", manifest_text(config, "ed", {}));
  write_file(config.out_dir, "summary.txt", summary);
  return report;
}

PauliReport run_pauli(const RunConfig& config) {
  OperatorMatrix h = build_hamiltonian(config.lattice);
  auto [padded, n_qubits] = qubitize(h, 1.0);  // unit identity padding
  PauliSum sum = decompose(padded, config.pauli_threshold);

  PauliReport report;
  report.n_qubits = n_qubits;
  report.count = term_count(sum);
  report.threshold = config.pauli_threshold;

  std::string summary;
  summary += "pauli decomposition\n";
  summary += "system: " + describe(config.lattice) + "\n";
  summary += "qubits: " + std::to_string(n_qubits) + "\n";
  summary += "threshold: " + format_real(report.threshold) + "\n";
  summary += "terms: " + std::to_string(report.count) + "\n";
  write_file(config.out_dir, "manifest.txt",
             manifest_text(config, "pauli", {{"resolved_lambda", format_real(1.0)}}));
  write_file(config.out_dir, "summary.txt", summary);
  write_file(config.out_dir, "pauli_terms.txt", serialize(sum));
  return report;
}

VqeReport run_vqe(const RunConfig& config) {
  OperatorMatrix h = build_hamiltonian(config.lattice);
  EighResult eig = eigh(h);

  VqeReport report;
  report.exact_energy = eig.eigenvalues.front();
  report.dim = h.dim;
  report.lambda_used = config.safe_padding
                           ? safe_padding_lambda(config.lattice.m, config.lattice.mu)
                           : config.lattice.padding_lambda;
  auto [padded, n_qubits] = qubitize(h, report.lambda_used);
  report.n_qubits = n_qubits;
  report.pauli_terms = term_count(decompose(padded, config.pauli_threshold));

  Ansatz ansatz = build_ansatz(n_qubits, config.depth, config.entanglement);
  MinimizeConfig mc{config.optimizer, config.max_iterations, config.restarts, config.seed};
  report.vqe = minimize(padded, ansatz, mc);
  report.gap = report.vqe.energy - report.exact_energy;

  std::string summary;
  summary += "vqe\n";
  summary += "system: " + describe(config.lattice) + "\n";
  summary += "qubits: " + std::to_string(n_qubits) + " (dim " + std::to_string(report.dim) +
             " padded to " + std::to_string(padded.dim) + ", lambda " +
             format_real(report.lambda_used) + ")\n";
  summary += "pauli terms: " + std::to_string(report.pauli_terms) + "\n";
  summary += "ansatz: RyRz depth " + std::to_string(config.depth) + ", " +
             (config.entanglement == Entanglement::Full ? "full" : "linear") + " entanglement, " +
             std::to_string(ansatz.param_count) + " parameters\n";
  summary += "exact energy = " + format_real(report.exact_energy) + "\n";
  summary += "vqe energy   = " + format_real(report.vqe.energy) + "\n";
  summary += "gap          = " + format_real(report.gap) + "\n";
  summary += "evaluations: " + std::to_string(report.vqe.evaluations) + "\n";
  summary += "restarts: " + std::to_string(report.vqe.restarts_used) + "\n";
  summary += "converged: " + std::string(report.vqe.converged ? "yes" : "no") + "\n";
  write_file(config.out_dir, "manifest.txt",
             manifest_text(config, "vqe", {{"resolved_lambda", format_real(report.lambda_used)}}));
  write_file(config.out_dir, "summary.txt", summary);
  write_file(config.out_dir, "trace.csv", trace_csv(report.vqe.trace));
  return report;
}

std::vector<EosPoint> run_eos(const RunConfig& config) {
  int count = eos_grid_count(config.mu_start, config.mu_end, config.mu_step);
  std::vector<EosPoint> points(static_cast<size_t>(count));

  unsigned pool = std::max(1u, std::thread::hardware_concurrency());
  pool = std::min(pool, static_cast<unsigned>(count));
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        LatticeSpec spec = config.lattice;
        spec.mu = config.mu_start + i * config.mu_step;
        OperatorMatrix h = build_hamiltonian(spec);
        EighResult eig = eigh(h);
        double lam = safe_padding_lambda(spec.m, spec.mu);
        auto [padded, n_qubits] = qubitize(h, lam);
        Ansatz ansatz = build_ansatz(n_qubits, config.depth, config.entanglement);
        MinimizeConfig mc{config.optimizer, config.max_iterations, config.restarts, config.seed};
        VqeResult v = minimize(padded, ansatz, mc);
        points[static_cast<size_t>(i)] =
            {spec.mu, eig.eigenvalues.front(), v.energy, v.energy - eig.eigenvalues.front()};
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < pool; ++t) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);

  std::string csv = "mu,exact,vqe,gap\n";
  for (const EosPoint& p : points)
    csv += format_real(p.mu) + "," + format_real(p.exact_energy) + "," +
           format_real(p.vqe_energy) + "," + format_real(p.gap) + "\n";

  std::string summary;
  summary += "equation of state sweep\n";
  summary += "system: " + describe(config.lattice) + "\n";
  summary += "g=" + format_real(config.lattice.g) + " m=" + format_real(config.lattice.m) + "\n";
  summary += "grid: mu in [" + format_real(config.mu_start) + ", " + format_real(config.mu_end) +
             "] step " + format_real(config.mu_step) + " (" + std::to_string(count) + " points)\n";
  for (const EosPoint& p : points)
    summary += "mu=" + format_real(p.mu) + " exact=" + format_real(p.exact_energy) +
               " vqe=" + format_real(p.vqe_energy) + " gap=" + format_real(p.gap) + "\n";

  write_file(config.out_dir, "manifest.txt", manifest_text(config, "eos", {}));
  write_file(config.out_dir, "summary.txt", summary);
  write_file(config.out_dir, "eos.csv", csv);
  write_file(config.out_dir, "eos.svg", eos_svg(points));
  return points;
}

std::vector<TableRow> run_tables(const RunConfig& config) {
  struct SystemDef {
    int n_sites, n_links;
    Topology topology;
  };
  const SystemDef systems[3] = {{2, 1, Topology::OpenChain},
                                {3, 2, Topology::OpenChain},
                                {3, 3, Topology::ClosedTriangle}};
  std::vector<TableRow> rows;
  for (const SystemDef& def : systems) {
    LatticeSpec spec = config.lattice;
    spec.n_sites = def.n_sites;
    spec.n_links = def.n_links;
    spec.topology = def.topology;

    OperatorMatrix h = build_hamiltonian(spec);
    EighResult eig = eigh(h);
    auto [padded, n_qubits] = qubitize(h, spec.padding_lambda);
    PauliSum sum = decompose(padded, config.pauli_threshold);
    Ansatz ansatz = build_ansatz(n_qubits, config.depth, config.entanglement);
    MinimizeConfig mc{config.optimizer, config.max_iterations, config.restarts, config.seed};
    VqeResult v = minimize(padded, ansatz, mc);

    TableRow row;
    row.name = describe(spec);
    row.dim = h.dim;
    row.n_qubits = n_qubits;
    row.pauli_terms = term_count(sum);
    row.exact_energy = eig.eigenvalues.front();
    row.vqe_energy = v.energy;
    rows.push_back(row);
    write_file(config.out_dir, "trace_" + std::to_string(n_qubits) + "q.csv", trace_csv(v.trace));
  }

  std::string summary;
  summary += "system | qubits | paulis | exact | vqe\n";
  for (const TableRow& r : rows)
    summary += r.name + " | " + std::to_string(r.n_qubits) + " | " +
               std::to_string(r.pauli_terms) + " | " + format_real(r.exact_energy) + " | " +
               format_real(r.vqe_energy) + "\n";
  write_file(config.out_dir, "manifest.txt", manifest_text(config, "tables", {}));
  write_file(config.out_dir, "summary.txt", summary);
  return rows;
}

namespace {

struct BoundFlag {
  std::string key;
  CLI::Option* opt;
  const std::string* value;  // null for pure flags
};

struct FlagBag {
  std::string config_path;
  std::deque<std::string> storage;  // stable addresses: CLI11 holds references
  std::vector<BoundFlag> bound;
};

// flag spellings map onto config-file keys so both layers share one parser
void add_common_options(CLI::App* sub, FlagBag& bag) {
  static const struct {
    const char* flag;
    const char* key;
    const char* help;
  } specs[] = {
      {"--g", "g", "gauge coupling"},
      {"--m", "m", "staggered mass"},
      {"--mu", "mu", "chemical potential"},
      {"--n-sites", "n_sites", "fermion sites"},
      {"--n-links", "n_links", "gauge links"},
      {"--topology", "topology", "open|triangle"},
      {"--depth", "depth", "ansatz depth"},
      {"--entanglement", "entanglement", "full|linear"},
      {"--optimizer", "optimizer", "quasi_newton|nelder_mead"},
      {"--max-iter", "max_iter", "optimizer iteration cap"},
      {"--restarts", "restarts", "random restarts"},
      {"--seed", "seed", "random seed"},
      {"--lambda", "lambda", "padding block value"},
      {"--threshold", "threshold", "pauli truncation threshold"},
      {"--stagger-offset", "stagger_offset", "0 or 1"},
      {"--mu-start", "mu_start", "sweep start"},
      {"--mu-end", "mu_end", "sweep end"},
      {"--mu-step", "mu_step", "sweep step"},
      {"--out", "out", "output directory"},
  };
  sub->add_option("--config", bag.config_path, "key=value config file");
  for (const auto& spec : specs) {
    std::string& slot = bag.storage.emplace_back();
    CLI::Option* opt = sub->add_option(spec.flag, slot, spec.help);
    bag.bound.push_back({spec.key, opt, &slot});
  }
  CLI::Option* safe = sub->add_flag("--safe-padding", "pad with a large diagonal block");
  bag.bound.push_back({"safe_padding", safe, nullptr});
}

}  // namespace

int harness_main(int argc, char** argv) {
  CLI::App app{"Z3 gauge theory with staggered fermions: exact diagonalization, Pauli "
               "mapping, VQE, and equation of state"};
  app.require_subcommand(1);

  // one shared bag: exactly one subcommand parses, so bindings cannot collide
  FlagBag bag;
  const char* names[5] = {"ed", "vqe", "pauli", "eos", "tables"};
  const char* helps[5] = {"ground energy by exact diagonalization",
                          "variational ground state search",
                          "pauli term decomposition",
                          "chemical potential sweep",
                          "all three reference systems"};
  for (int i = 0; i < 5; ++i) add_common_options(app.add_subcommand(names[i], helps[i]), bag);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  std::string sub = app.get_subcommands().front()->get_name();
  try {
    std::vector<std::pair<std::string, std::string>> overrides;
    bool has_config = false;
    std::string config_path;
    for (CLI::App* s : app.get_subcommands()) {
      if (CLI::Option* copt = s->get_option_no_throw("--config"); copt && copt->count() > 0) {
        has_config = true;
        config_path = bag.config_path;
      }
    }
    for (const BoundFlag& f : bag.bound)
      if (f.opt->count() > 0) overrides.emplace_back(f.key, f.value ? *f.value : "1");
    RunConfig cfg = resolve_config(has_config ? &config_path : nullptr, overrides, sub);

    if (sub == "ed") {
      EdReport r = run_ed(cfg);
      std::cout << "system: " << describe(cfg.lattice) << " (" << r.n_qubits
                << " qubits padded)\n";
      std::cout << "ground energy = " << format_real(r.ground_energy) << "\n";
    } else if (sub == "vqe") {
      VqeReport r = run_vqe(cfg);
      std::cout << "exact = " << format_real(r.exact_energy) << "\n";
      std::cout << "vqe   = " << format_real(r.vqe.energy) << " (gap " << format_real(r.gap)
                << ", " << r.vqe.evaluations << " evaluations)\n";
    } else if (sub == "pauli") {
      PauliReport r = run_pauli(cfg);
      std::cout << r.count << " pauli terms on " << r.n_qubits << " qubits (threshold "
                << format_real(r.threshold) << ")\n";
    } else if (sub == "eos") {
      std::vector<EosPoint> pts = run_eos(cfg);
      std::cout << "eos sweep: " << pts.size() << " points written to " << cfg.out_dir << "\n";
    } else {
      std::vector<TableRow> rows = run_tables(cfg);
      std::cout << "system | qubits | paulis | exact | vqe\n";
      for (const TableRow& r : rows)
        std::cout << r.name << " | " << r.n_qubits << " | " << r.pauli_terms << " | "
                  << format_real(r.exact_energy) << " | " << format_real(r.vqe_energy) << "\n";
    }
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
