#include "dfrt/driver.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "dfrt/errors.hpp"
#include "dfrt/exact.hpp"
#include "dfrt/kohn_sham.hpp"
#include "dfrt/potentials.hpp"
#include "dfrt/resonance.hpp"

namespace dfrt {
namespace {

namespace fs = std::filesystem;

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string angle_tag(double theta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", theta);
  return buf;
}

std::string iso_now() {
  const std::time_t t = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&t, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

struct Table {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

class Summary {
 public:
  void add(int depth, const std::string& key, const std::string& value = {}) {
    std::string line(2 * depth, ' ');
    line += key + ":";
    if (!value.empty()) line += " " + value;
    lines_.push_back(std::move(line));
  }
  void add(int depth, const std::string& key, double value) {
    add(depth, key, sci(value));
  }
  void add(int depth, const std::string& key, int value) {
    add(depth, key, std::to_string(value));
  }
  void add(int depth, const std::string& key, bool value) {
    add(depth, key, std::string(value ? "true" : "false"));
  }
  void add(int depth, const std::string& key, Complex value) {
    add(depth, key + "_re", value.real());
    add(depth, key + "_im", value.imag());
  }
  void add_lifetime(int depth, const std::optional<double>& lifetime) {
    add(depth, "lifetime", lifetime ? sci(*lifetime) : std::string("none"));
  }
  void append(const Summary& other) {
    lines_.insert(lines_.end(), other.lines_.begin(), other.lines_.end());
  }
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  std::vector<std::string> lines_;
};

/// What one sweep point contributes: rows for shared tables, standalone
/// tables and a summary block.
struct TaskOutput {
  std::map<std::string, Table> rows;
  std::map<std::string, Table> files;
  Summary summary;
};

struct Task {
  std::string label;
  std::function<void(TaskOutput&)> body;
};

struct TaskRecord {
  TaskOutput output;
  std::exception_ptr error;
  bool done = false;
};

class Logger {
 public:
  Logger(std::ostream& out, bool verbose) : out_(out), verbose_(verbose) {}
  void note(const std::string& message) {
    if (!verbose_) return;
    const double t = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start_)
                         .count();
    std::lock_guard<std::mutex> lock(mutex_);
    char buf[32];
    std::snprintf(buf, sizeof buf, "[dfrt %8.2fs] ", t);
    out_ << buf << message << '\n' << std::flush;
  }

 private:
  std::ostream& out_;
  bool verbose_;
  std::mutex mutex_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void run_tasks(std::vector<Task>& tasks, std::vector<TaskRecord>& records,
               int workers, Logger& log) {
  records.assign(tasks.size(), TaskRecord{});
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      log.note("start " + tasks[i].label);
      try {
        tasks[i].body(records[i].output);
        records[i].done = true;
        log.note("done  " + tasks[i].label);
      } catch (...) {
        records[i].error = std::current_exception();
        log.note("failed " + tasks[i].label);
      }
    }
  };
  const int count = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));
  if (count == 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (int i = 0; i < count; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

void write_table(const fs::path& path, const Table& table, const RunConfig& config,
                 bool partial) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << "# dfrt " << code_version() << ": " << table.title << '\n';
  if (partial) out << "# status: partial (failed points are missing; see summary.txt)\n";
  for (const auto& [key, value] : config.echo()) {
    out << "# " << key << " = " << value << '\n';
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << sci(row[i]);
    out << '\n';
  }
  if (!out) throw Error("failed while writing '" + path.string() + "'");
}

Table density_table(const ComplexDensity& n, const std::string& title) {
  Table t{title, {"x", "re_n", "im_n"}, {}};
  for (int i = 0; i < n.grid.size(); ++i) {
    t.rows.push_back({n.grid[i], n.values[i].real(), n.values[i].imag()});
  }
  return t;
}

void add_row(TaskOutput& out, const std::string& file, const std::string& title,
             std::vector<std::string> columns, std::vector<double> row) {
  auto& t = out.rows[file];
  if (t.columns.empty()) {
    t.title = title;
    t.columns = std::move(columns);
  }
  t.rows.push_back(std::move(row));
}

double optional_or_nan(const std::optional<double>& v) {
  return v ? *v : std::nan("");
}

void summarize_resonance(Summary& s, int depth, const ResonanceEigenpair& r) {
  s.add(depth, "energy", r.energy);
  s.add_lifetime(depth, r.lifetime);
  s.add(depth, "stationarity", r.stationarity);
  s.add(depth, "path", r.path);
  s.add(depth, "ambiguous_match", r.ambiguous);
}

void summarize_scf(Summary& s, int depth, const SCFResult& r) {
  s.add(depth, "converged", r.converged);
  s.add(depth, "iterations", r.iterations);
  s.add(depth, "orbital_energy", r.orbital_energy);
  s.add(depth, "total_energy", r.total_energy);
  s.add(depth, "orbital_sum", 2.0 * r.orbital_energy);
  s.add(depth, "non_interacting_energy", r.non_interacting_energy);
  s.add_lifetime(depth, r.lifetime);
  s.add(depth, "particle_number", r.density.total());
}

Table scf_trace_table(const std::vector<SCFIteration>& trace, double theta) {
  Table t{"x-only SCF iteration trace at theta = " + angle_tag(theta),
          {"iteration", "re_eps", "im_eps", "re_E", "im_E", "re_E_closed",
           "im_E_closed", "density_change", "re_N", "im_N", "overlap"},
          {}};
  for (const auto& it : trace) {
    t.rows.push_back({double(it.iteration), it.orbital_energy.real(),
                      it.orbital_energy.imag(), it.total_energy.real(),
                      it.total_energy.imag(), it.closed_form_energy.real(),
                      it.closed_form_energy.imag(), it.density_change,
                      it.particle_number.real(), it.particle_number.imag(),
                      it.overlap});
  }
  return t;
}

PotentialParams with_lambda(const RunConfig& c, double lambda) {
  PotentialParams p = c.potential;
  p.lambda = lambda;
  return p;
}

SCFConfig scf_at(const RunConfig& c, double theta) {
  SCFConfig s = c.scf;
  s.theta = theta;
  s.exact.order = s.order;
  return s;
}

ExactOptions exact_options(const RunConfig& c) {
  ExactOptions e = c.scf.exact;
  e.order = c.scf.order;
  return e;
}

// ---------------------------------------------------------------- modes

std::vector<Task> exact1e_tasks(const RunConfig& c) {
  std::vector<Task> tasks;
  const Grid1D grid(c.grid.x_min, c.grid.x_max, c.grid.points.front());
  const PotentialParams p = with_lambda(c, c.lambdas.front());
  for (double theta : c.thetas) {
    tasks.push_back({"exact1e theta=" + angle_tag(theta), [=](TaskOutput& out) {
      const auto r = exact_1e_ler(grid, p, theta, exact_options(c));
      add_row(out, "exact1e_energies.csv", "one-body LER per angle",
              {"theta", "re_E", "im_E", "stationarity", "lifetime"},
              {theta, r.energy.real(), r.energy.imag(), r.stationarity,
               optional_or_nan(r.lifetime)});
      ComplexDensity n{grid, r.vector.cwiseProduct(r.vector), 1};
      out.files["exact1e_density_theta_" + angle_tag(theta) + ".csv"] =
          density_table(n, "one-body LER density at theta = " + angle_tag(theta));
      out.summary.add(1, "theta_" + angle_tag(theta));
      summarize_resonance(out.summary, 2, r);
      out.summary.add(2, "particle_number", n.total());
    }});
  }
  return tasks;
}

struct ExactTwo {
  std::vector<TwoBodyResult> results;
  std::vector<ComplexDensity> densities;
};

ExactTwo exact_two(const Grid1D& grid, const PotentialParams& p,
                   const std::vector<double>& thetas, const ExactOptions& e) {
  ExactTwo out;
  if (thetas.size() >= 2) {
    out.results = solve_2e_trajectory(grid, p, thetas, std::nullopt, e);
  } else {
    out.results.push_back(solve_2e_ler(grid, p, thetas.front(), std::nullopt, e));
  }
  for (const auto& r : out.results) {
    out.densities.push_back(reduce_density(grid, r.resonance.vector));
  }
  return out;
}

void summarize_two(Summary& s, int depth, const TwoBodyResult& r,
                   const ComplexDensity& n) {
  summarize_resonance(s, depth, r.resonance);
  s.add(depth, "symmetry_defect", r.symmetry_defect);
  s.add(depth, "shift", r.shift);
  s.add(depth, "particle_number", n.total());
  for (std::size_t i = 0; i < r.notices.size(); ++i) {
    s.add(depth, "notice_" + std::to_string(i), r.notices[i]);
  }
}

std::vector<Task> exact2e_tasks(const RunConfig& c) {
  const Grid1D grid(c.grid.x_min, c.grid.x_max, c.grid.points.front());
  const PotentialParams p = with_lambda(c, c.lambdas.front());
  return {{"exact2e trajectory", [=](TaskOutput& out) {
    const auto two = exact_two(grid, p, c.thetas, exact_options(c));
    for (std::size_t t = 0; t < two.results.size(); ++t) {
      const auto& r = two.results[t];
      const double theta = r.resonance.theta;
      add_row(out, "exact2e_energies.csv", "two-body LER per angle",
              {"theta", "re_E", "im_E", "stationarity", "lifetime", "symmetry_defect"},
              {theta, r.resonance.energy.real(), r.resonance.energy.imag(),
               r.resonance.stationarity, optional_or_nan(r.resonance.lifetime),
               r.symmetry_defect});
      out.files["exact2e_density_theta_" + angle_tag(theta) + ".csv"] =
          density_table(two.densities[t],
                        "exact two-electron density at theta = " + angle_tag(theta));
      out.summary.add(1, "theta_" + angle_tag(theta));
      summarize_two(out.summary, 2, r, two.densities[t]);
    }
  }}};
}

std::vector<Task> scf_tasks(const RunConfig& c) {
  std::vector<Task> tasks;
  const Grid1D grid(c.grid.x_min, c.grid.x_max, c.grid.points.front());
  const PotentialParams p = with_lambda(c, c.lambdas.front());
  for (double theta : c.thetas) {
    tasks.push_back({"scf_xonly theta=" + angle_tag(theta), [=](TaskOutput& out) {
      const std::string tag = angle_tag(theta);
      SCFResult r(grid);
      try {
        r = scf_xonly(grid, p, scf_at(c, theta));
      } catch (const ScfConvergenceError& e) {
        out.files["scf_xonly_trace_theta_" + tag + ".csv"] =
            scf_trace_table(e.trace(), theta);
        throw;
      }
      add_row(out, "scf_xonly_energies.csv", "x-only SCF per angle",
              {"theta", "re_E", "im_E", "re_eps", "im_eps", "re_2eps", "im_2eps",
               "iterations", "lifetime"},
              {theta, r.total_energy.real(), r.total_energy.imag(),
               r.orbital_energy.real(), r.orbital_energy.imag(),
               2.0 * r.orbital_energy.real(), 2.0 * r.orbital_energy.imag(),
               double(r.iterations), optional_or_nan(r.lifetime)});
      out.files["scf_xonly_trace_theta_" + tag + ".csv"] = scf_trace_table(r.trace, theta);
      out.files["scf_xonly_density_theta_" + tag + ".csv"] =
          density_table(r.density, "x-only SCF density at theta = " + tag);
      const CVector parent = scaled_parent_potential(p, theta, grid);
      const CVector vs = r.potential.values();
      Table pot{"x-only KS potential at theta = " + tag,
                {"x", "re_vs", "im_vs", "re_vhx", "im_vhx", "re_vext", "im_vext",
                 "re_vparent", "im_vparent"},
                {}};
      for (int i = 0; i < grid.size(); ++i) {
        pot.rows.push_back({grid[i], vs[i].real(), vs[i].imag(),
                            r.potential.hartree_exchange[i].real(),
                            r.potential.hartree_exchange[i].imag(),
                            r.potential.external[i].real(),
                            r.potential.external[i].imag(), parent[i].real(),
                            parent[i].imag()});
      }
      out.files["scf_xonly_potential_theta_" + tag + ".csv"] = pot;
      out.summary.add(1, "theta_" + tag);
      summarize_scf(out.summary, 2, r);
    }});
  }
  return tasks;
}

std::vector<Task> inversion_tasks(const RunConfig& c, bool with_correlation) {
  const Grid1D grid(c.grid.x_min, c.grid.x_max, c.grid.points.front());
  const PotentialParams p = with_lambda(c, c.lambdas.front());
  const double theta = reference_theta(c);
  const std::string name = with_correlation ? "correlation" : "invert";
  return {{name + " theta=" + angle_tag(theta), [=](TaskOutput& out) {
    const std::string tag = angle_tag(theta);
    const ExactOptions e = exact_options(c);
    const auto two = solve_2e_ler(grid, p, theta, std::nullopt, e);
    const auto n = reduce_density(grid, two.resonance.vector);
    const auto inv = invert_ks(grid, theta, n, p, c.inversion);
    const auto fid = inversion_fidelity(grid, theta, inv, n, c.scf.order,
                                        c.scf.eig_tol);
    const CVector vext = scaled_potential(p, theta, grid);
    const CVector parent = scaled_parent_potential(p, theta, grid);

    out.files["exact2e_density_theta_" + tag + ".csv"] =
        density_table(n, "exact two-electron density at theta = " + tag);
    Table pot{"inverted KS potential at theta = " + tag,
              {"x", "re_vs", "im_vs", "re_vext", "im_vext", "re_vparent", "im_vparent"},
              {}};
    for (int i = 0; i < grid.size(); ++i) {
      pot.rows.push_back({grid[i], inv.potential[i].real(), inv.potential[i].imag(),
                          vext[i].real(), vext[i].imag(), parent[i].real(),
                          parent[i].imag()});
    }
    out.files["invert_potential_theta_" + tag + ".csv"] = pot;

    out.summary.add(1, "theta_" + tag);
    out.summary.add(2, "exact_two_body");
    summarize_two(out.summary, 3, two, n);
    out.summary.add(2, "inversion");
    out.summary.add(3, "homo_energy", inv.orbital_energy);
    out.summary.add(3, "window_begin", inv.window_begin);
    out.summary.add(3, "window_end", inv.window_end);
    out.summary.add(3, "roundtrip_orbital_energy", fid.solution.orbital.value);
    out.summary.add(3, "roundtrip_density_error_re", fid.real_error);
    out.summary.add(3, "roundtrip_density_error_im", fid.imag_error);

    if (with_correlation) {
      const auto split = correlation_potential(grid, theta, p, inv.potential, n,
                                               c.scf.hartree_scaling);
      Table corr{"Hartree-exchange and correlation potentials at theta = " + tag,
                 {"x", "re_vhx", "im_vhx", "re_vc", "im_vc", "re_vs", "im_vs",
                  "re_vext", "im_vext"},
                 {}};
      for (int i = 0; i < grid.size(); ++i) {
        corr.rows.push_back({grid[i], split.hartree_exchange[i].real(),
                             split.hartree_exchange[i].imag(),
                             split.correlation[i].real(), split.correlation[i].imag(),
                             inv.potential[i].real(), inv.potential[i].imag(),
                             vext[i].real(), vext[i].imag()});
      }
      out.files["correlation_theta_" + tag + ".csv"] = corr;
      out.summary.add(2, "correlation");
      out.summary.add(3, "max_abs_vc", split.correlation.cwiseAbs().maxCoeff());
    }
  }}};
}

std::vector<Task> affinity_tasks(const RunConfig& c) {
  const Grid1D grid(c.grid.x_min, c.grid.x_max, c.grid.points.front());
  const PotentialParams p = with_lambda(c, c.lambdas.front());
  const double theta = reference_theta(c);
  return {{"affinity theta=" + angle_tag(theta), [=](TaskOutput& out) {
    const auto r = affinity_report(grid, p, theta, scf_at(c, theta), c.inversion);
    const std::string tag = angle_tag(theta);
    out.summary.add(1, "theta_" + tag);
    out.summary.add(2, "energy_one_electron", r.energy_one);
    out.summary.add(2, "energy_two_electron", r.energy_two);
    out.summary.add(2, "affinity_gap", r.affinity_gap);
    out.summary.add(2, "ks_homo_exact", r.ks_homo_exact);
    out.summary.add(2, "ks_homo_xonly", r.ks_homo_xonly);
    out.summary.add(2, "xonly_total_energy", r.xonly_total_energy);
    out.summary.add(2, "koopmans_gap", r.koopmans_gap);
    add_row(out, "affinity.csv", "Koopmans comparison",
            {"theta", "re_I", "im_I", "re_homo_exact", "im_homo_exact",
             "re_homo_xonly", "im_homo_xonly"},
            {theta, r.affinity_gap.real(), r.affinity_gap.imag(),
             r.ks_homo_exact.real(), r.ks_homo_exact.imag(), r.ks_homo_xonly.real(),
             r.ks_homo_xonly.imag()});
  }}};
}

std::vector<Task> sweep_tasks(const RunConfig& c) {
  std::vector<Task> tasks;
  const Grid1D grid(c.grid.x_min, c.grid.x_max, c.grid.points.front());
  const double theta = reference_theta(c);
  for (double lambda : c.lambdas) {
    tasks.push_back({"sweep_lambda lambda=" + sci(lambda), [=](TaskOutput& out) {
      const PotentialParams p = with_lambda(c, lambda);
      const std::vector<std::string> cols{"lambda", "re_E", "im_E"};
      const auto two = solve_2e_ler(grid, p, theta, std::nullopt, exact_options(c));
      const Complex pt = first_order_pt(grid, p, theta, exact_options(c));
      const auto scf = scf_xonly(grid, p, scf_at(c, theta));
      add_row(out, "sweep_lambda_exact.csv", "exact two-body LER versus lambda", cols,
              {lambda, two.resonance.energy.real(), two.resonance.energy.imag()});
      add_row(out, "sweep_lambda_pt.csv", "first-order perturbation versus lambda",
              cols, {lambda, pt.real(), pt.imag()});
      add_row(out, "sweep_lambda_xonly.csv", "x-only SCF energy versus lambda", cols,
              {lambda, scf.total_energy.real(), scf.total_energy.imag()});
      out.summary.add(1, "lambda_" + sci(lambda));
      out.summary.add(2, "exact_energy", two.resonance.energy);
      out.summary.add(2, "exact_stationarity", two.resonance.stationarity);
      out.summary.add(2, "pt_energy", pt);
      out.summary.add(2, "xonly_energy", scf.total_energy);
      out.summary.add(2, "xonly_iterations", scf.iterations);
    }});
  }
  return tasks;
}

std::vector<Task> table_tasks(const RunConfig& c) {
  std::vector<Task> tasks;
  const PotentialParams p = with_lambda(c, c.lambdas.front());
  for (int n : c.grid.points) {
    for (double theta : c.thetas) {
      tasks.push_back({"table_theta N=" + std::to_string(n) + " theta=" + angle_tag(theta),
                       [=](TaskOutput& out) {
        const Grid1D grid(c.grid.x_min, c.grid.x_max, n);
        const auto r = scf_xonly(grid, p, scf_at(c, theta));
        add_row(out, "table_theta.csv", "x-only SCF energy on the (N, theta) grid",
                {"N", "theta", "re_E", "im_E", "re_2eps", "im_2eps", "iterations"},
                {double(n), theta, r.total_energy.real(), r.total_energy.imag(),
                 2.0 * r.orbital_energy.real(), 2.0 * r.orbital_energy.imag(),
                 double(r.iterations)});
        out.summary.add(1, "N_" + std::to_string(n) + "_theta_" + angle_tag(theta));
        summarize_scf(out.summary, 2, r);
      }});
    }
  }
  return tasks;
}

void table_spans(Summary& s, const Table& table) {
  std::map<int, std::pair<double, double>> span;
  for (const auto& row : table.rows) {
    const int n = static_cast<int>(row[0]);
    auto [it, fresh] = span.try_emplace(n, row[2], row[2]);
    if (!fresh) {
      it->second.first = std::min(it->second.first, row[2]);
      it->second.second = std::max(it->second.second, row[2]);
    }
  }
  s.add(1, "re_energy_span");
  for (const auto& [n, mm] : span) {
    s.add(2, "N_" + std::to_string(n), mm.second - mm.first);
  }
}

int classify(const std::exception_ptr& e, std::string& message) {
  try {
    std::rethrow_exception(e);
  } catch (const ConfigError& x) {
    message = std::string("configuration error: ") + x.what();
    return kExitConfigError;
  } catch (const DimensionError& x) {
    message = std::string("configuration error: ") + x.what();
    return kExitConfigError;
  } catch (const std::exception& x) {
    message = std::string("numerical error: ") + x.what();
    return kExitNonConvergence;
  } catch (...) {
    message = "unknown error";
    return kExitNonConvergence;
  }
}

}  // namespace

std::string code_version() {
#ifdef DFRT_VERSION
  return DFRT_VERSION;
#else
  return "unknown";
#endif
}

double reference_theta(const RunConfig& config) {
  return config.thetas[config.thetas.size() / 2];
}

fs::path resolve_output_dir(const std::optional<fs::path>& cli_out,
                            const RunConfig& config) {
  if (cli_out && !cli_out->empty()) return *cli_out;
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "dfrt_output";
}

RunOutcome run(const RunConfig& config, const RunOptions& options) {
  RunOutcome outcome;
  std::ostream& log_stream = options.log ? *options.log : std::cerr;
  Logger log(log_stream, options.verbose);
  const std::string started = iso_now();
  const auto t0 = std::chrono::steady_clock::now();

  try {
    config.validate();
  } catch (const ConfigError& e) {
    outcome.exit_code = kExitConfigError;
    outcome.status = "failed";
    outcome.errors.push_back(std::string("configuration error: ") + e.what());
    return outcome;
  }
  std::error_code ec;
  fs::create_directories(options.output_dir, ec);
  if (ec) {
    outcome.exit_code = kExitConfigError;
    outcome.status = "failed";
    outcome.errors.push_back("cannot create output directory '" +
                             options.output_dir.string() + "': " + ec.message());
    return outcome;
  }

  std::vector<Task> tasks;
  switch (config.mode) {
    case RunMode::kExact1e: tasks = exact1e_tasks(config); break;
    case RunMode::kExact2e: tasks = exact2e_tasks(config); break;
    case RunMode::kScfXonly: tasks = scf_tasks(config); break;
    case RunMode::kInvert: tasks = inversion_tasks(config, false); break;
    case RunMode::kCorrelation: tasks = inversion_tasks(config, true); break;
    case RunMode::kAffinity: tasks = affinity_tasks(config); break;
    case RunMode::kSweepLambda: tasks = sweep_tasks(config); break;
    case RunMode::kTableTheta: tasks = table_tasks(config); break;
  }
  const int workers = options.workers > 0 ? options.workers : config.workers;
  log.note("mode " + to_string(config.mode) + ", " + std::to_string(tasks.size()) +
           " point(s), " + std::to_string(workers) + " worker(s)");

  std::vector<TaskRecord> records;
  run_tasks(tasks, records, workers, log);

  Summary results;
  std::map<std::string, Table> shared;
  std::vector<std::pair<std::string, Table>> standalone;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& rec = records[i];
    for (auto& [file, table] : rec.output.rows) {
      auto& t = shared[file];
      if (t.columns.empty()) {
        t.title = table.title;
        t.columns = table.columns;
      }
      t.rows.insert(t.rows.end(), table.rows.begin(), table.rows.end());
    }
    for (auto& [file, table] : rec.output.files) standalone.emplace_back(file, table);
    if (rec.done) {
      results.append(rec.output.summary);
    } else {
      std::string message;
      const int code = classify(rec.error, message);
      outcome.exit_code = std::max(outcome.exit_code, code);
      outcome.errors.push_back(tasks[i].label + ": " + message);
    }
  }
  const std::size_t failures = outcome.errors.size();
  outcome.status = failures == 0 ? "ok" : (failures < records.size() ? "partial" : "failed");
  const bool partial = failures > 0;
  if (config.mode == RunMode::kTableTheta && shared.count("table_theta.csv")) {
    table_spans(results, shared["table_theta.csv"]);
  }

  try {
    for (const auto& [file, table] : shared) {
      write_table(options.output_dir / file, table, config, partial);
      outcome.files.push_back(options.output_dir / file);
    }
    for (const auto& [file, table] : standalone) {
      write_table(options.output_dir / file, table, config, partial);
      outcome.files.push_back(options.output_dir / file);
    }
  } catch (const std::exception& e) {
    outcome.exit_code = std::max(outcome.exit_code, kExitConfigError);
    outcome.errors.push_back(e.what());
    outcome.status = "failed";
  }

  Summary s;
  s.add(0, "run");
  s.add(1, "code", std::string("dfrt"));
  s.add(1, "version", code_version());
  s.add(1, "mode", to_string(config.mode));
  s.add(1, "status", outcome.status);
  s.add(1, "exit_code", outcome.exit_code);
  s.add(1, "started", started);
  s.add(1, "finished", iso_now());
  s.add(1, "elapsed_seconds",
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  s.add(1, "workers", workers);
  if (!outcome.errors.empty()) {
    s.add(1, "errors");
    for (std::size_t i = 0; i < outcome.errors.size(); ++i) {
      s.add(2, "error_" + std::to_string(i), outcome.errors[i]);
    }
  }
  s.add(0, "config");
  for (const auto& [key, value] : config.echo()) s.add(1, key, value);
  s.add(0, "results");
  s.append(results);
  s.add(0, "files");
  for (std::size_t i = 0; i < outcome.files.size(); ++i) {
    s.add(1, "file_" + std::to_string(i), outcome.files[i].filename().string());
  }

  const fs::path summary_path = options.output_dir / "summary.txt";
  std::ofstream out(summary_path);
  for (const auto& line : s.lines()) out << line << '\n';
  if (out) {
    outcome.files.push_back(summary_path);
  } else {
    outcome.exit_code = std::max(outcome.exit_code, kExitConfigError);
    outcome.errors.push_back("cannot write '" + summary_path.string() + "'");
  }
  for (const auto& e : outcome.errors) log_stream << "dfrt: " << e << '\n';
  return outcome;
}

}  // namespace dfrt
