// Command-line harness: solve single instances, race the two solvers,
// and run the color-transfer / word-alignment pipelines over a grid of
// regularization strengths. Every command records a run manifest that the
// replay command can re-execute; with --clock none the data outputs are
// byte-identical across replays.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ot/image.hpp"
#include "ot/pipelines.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string num17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string iso_utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// FNV-1a 64 over the raw file bytes, rendered as 16 hex digits.
std::string file_digest(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ot::IoError("cannot read input for digest: " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char chunk[4096];
  while (is.read(chunk, sizeof(chunk)) || is.gcount() > 0) {
    for (std::streamsize i = 0; i < is.gcount(); ++i) {
      h ^= static_cast<unsigned char>(chunk[i]);
      h *= 0x100000001b3ull;
    }
    if (!is) break;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// All outputs go through a .partial staging name that is renamed only
// after the write has succeeded.
void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".partial";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw ot::IoError("cannot open " + tmp.string());
    os << content;
    os.flush();
    if (!os) throw ot::IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_png_atomic(const fs::path& path, const ot::Image& img) {
  const fs::path tmp = path.string() + ".partial";
  ot::save_png(tmp.string(), img);
  fs::rename(tmp, path);
}

fs::path resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("OTACCEL_OUT_DIR")) return env;
  return ".";
}

// ---------------------------------------------------------------------------
// Config blocks. Each command's configuration round-trips through JSON so a
// stored manifest replays the identical run.

struct InstanceConfig {
  std::string kind = "synthetic";  // "synthetic" | "csv"
  long n = 100;
  long m = 100;
  std::uint64_t seed = 1;
  std::string path;  // csv only
  double eps = 1e-2;
};

void to_json(json& j, const InstanceConfig& c) {
  j = json{{"kind", c.kind}, {"n", c.n},       {"m", c.m},
           {"seed", c.seed}, {"path", c.path}, {"eps", c.eps}};
}

void from_json(const json& j, InstanceConfig& c) {
  j.at("kind").get_to(c.kind);
  j.at("n").get_to(c.n);
  j.at("m").get_to(c.m);
  j.at("seed").get_to(c.seed);
  j.at("path").get_to(c.path);
  j.at("eps").get_to(c.eps);
}

struct SolverConfig {
  std::string solver = "acc-homotopy";
  double mu = 0.5;
  double mu0 = 0.5;
  long m0 = 4;
  long max_iters = 2000000;
  long trace_stride = 1;
  std::string clock = "wall";  // "wall" | "none"
};

void to_json(json& j, const SolverConfig& c) {
  j = json{{"solver", c.solver}, {"mu", c.mu},
           {"mu0", c.mu0},       {"m0", c.m0},
           {"max_iters", c.max_iters}, {"trace_stride", c.trace_stride},
           {"clock", c.clock}};
}

void from_json(const json& j, SolverConfig& c) {
  j.at("solver").get_to(c.solver);
  j.at("mu").get_to(c.mu);
  j.at("mu0").get_to(c.mu0);
  j.at("m0").get_to(c.m0);
  j.at("max_iters").get_to(c.max_iters);
  j.at("trace_stride").get_to(c.trace_stride);
  j.at("clock").get_to(c.clock);
}

ot::SolverSpec to_spec(const SolverConfig& c, bool record_trace) {
  ot::SolverSpec spec;
  spec.kind = ot::solver_kind_from_name(c.solver);
  spec.mu = c.mu;
  spec.mu0 = c.mu0;
  spec.m0 = c.m0;
  spec.max_iters = c.max_iters;
  spec.record_trace = record_trace;
  spec.trace_stride = c.trace_stride;
  spec.wall_clock = c.clock == "wall";
  return spec;
}

struct SolveCmdConfig {
  InstanceConfig inst;
  SolverConfig solver;
  std::string tol = "auto";
  std::string out_dir;
};

void to_json(json& j, const SolveCmdConfig& c) {
  j = json{{"instance", c.inst}, {"solver", c.solver}, {"tol_l1", c.tol},
           {"out_dir", c.out_dir}};
}

void from_json(const json& j, SolveCmdConfig& c) {
  j.at("instance").get_to(c.inst);
  j.at("solver").get_to(c.solver);
  j.at("tol_l1").get_to(c.tol);
  j.at("out_dir").get_to(c.out_dir);
}

struct CompareCmdConfig {
  InstanceConfig inst;
  SolverConfig solver;  // shared knobs; kind is ignored (both solvers run)
  std::string tol = "auto";
  std::string out_dir;
};

void to_json(json& j, const CompareCmdConfig& c) {
  j = json{{"instance", c.inst}, {"solver", c.solver}, {"tol_l1", c.tol},
           {"out_dir", c.out_dir}};
}

void from_json(const json& j, CompareCmdConfig& c) {
  j.at("instance").get_to(c.inst);
  j.at("solver").get_to(c.solver);
  j.at("tol_l1").get_to(c.tol);
  j.at("out_dir").get_to(c.out_dir);
}

struct TransferCmdConfig {
  std::string src;
  std::string tgt;
  int samples = 1000;
  std::uint64_t seed = 1;
  std::vector<double> eps_grid = {1.0, 1e-1, 1e-2, 1e-3, 1e-4};
  SolverConfig solver;  // kind ignored: the grid runs both solvers
  std::string tol = "auto";
  std::string out_dir;
};

void to_json(json& j, const TransferCmdConfig& c) {
  j = json{{"src", c.src},       {"tgt", c.tgt},           {"samples", c.samples},
           {"seed", c.seed},     {"eps_grid", c.eps_grid}, {"solver", c.solver},
           {"tol_l1", c.tol},    {"out_dir", c.out_dir}};
}

void from_json(const json& j, TransferCmdConfig& c) {
  j.at("src").get_to(c.src);
  j.at("tgt").get_to(c.tgt);
  j.at("samples").get_to(c.samples);
  j.at("seed").get_to(c.seed);
  j.at("eps_grid").get_to(c.eps_grid);
  j.at("solver").get_to(c.solver);
  j.at("tol_l1").get_to(c.tol);
  j.at("out_dir").get_to(c.out_dir);
}

struct AlignCmdConfig {
  std::string src_vec;
  std::string tgt_vec;
  std::string dict;
  int n = 500;
  std::vector<double> eps_grid = {1.0, 1e-1, 1e-2, 1e-3, 1e-4};
  SolverConfig solver;  // kind ignored: the grid runs both solvers
  std::string tol = "auto";
  std::string cost_norm = "minmax";  // "minmax" | "halfrange"
  std::string out_dir;
};

void to_json(json& j, const AlignCmdConfig& c) {
  j = json{{"src_vec", c.src_vec}, {"tgt_vec", c.tgt_vec}, {"dict", c.dict},
           {"n", c.n},             {"eps_grid", c.eps_grid}, {"solver", c.solver},
           {"tol_l1", c.tol},      {"cost_norm", c.cost_norm}, {"out_dir", c.out_dir}};
}

void from_json(const json& j, AlignCmdConfig& c) {
  j.at("src_vec").get_to(c.src_vec);
  j.at("tgt_vec").get_to(c.tgt_vec);
  j.at("dict").get_to(c.dict);
  j.at("n").get_to(c.n);
  j.at("eps_grid").get_to(c.eps_grid);
  j.at("solver").get_to(c.solver);
  j.at("tol_l1").get_to(c.tol);
  j.at("cost_norm").get_to(c.cost_norm);
  j.at("out_dir").get_to(c.out_dir);
}

// ---------------------------------------------------------------------------

ot::TransportProblem load_instance(InstanceConfig& c,
                                   std::map<std::string, std::string>& inputs) {
  if (c.kind == "synthetic") {
    return ot::with_epsilon(ot::synthetic_instance(c.n, c.m, c.seed), c.eps);
  }
  if (c.kind != "csv") throw ot::OtError("instance kind must be synthetic or csv");
  inputs[c.path] = file_digest(c.path);
  ot::TransportProblem p = ot::read_instance_csv(c.path);
  if (c.eps > 0.0) {
    p = ot::with_epsilon(std::move(p), c.eps);
  } else {
    c.eps = p.epsilon;  // record the file's strength so a replay matches
  }
  c.n = p.n();
  c.m = p.m();
  return p;
}

// "auto" resolves to the transfer-style 2/n, or 1% of that for the
// alignment-style runs; anything else must parse as a positive number.
double resolve_tol(const std::string& tol, Eigen::Index n, bool alignment_style) {
  if (tol == "auto") {
    const double base = 2.0 / static_cast<double>(n);
    return alignment_style ? 0.01 * base : base;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tol, &used);
  } catch (const std::exception&) {
    throw ot::OtError("bad --tol-l1 value: " + tol);
  }
  if (used != tol.size() || !(v > 0.0)) throw ot::OtError("bad --tol-l1 value: " + tol);
  return v;
}

void write_manifest(const fs::path& file, const std::string& command, const json& config,
                    std::uint64_t seed, const std::map<std::string, std::string>& inputs,
                    const std::string& started) {
  json m{{"command", command}, {"version", kVersion}, {"seed", seed},
         {"config", config},   {"inputs", inputs},   {"started", started},
         {"finished", iso_utc_now()}};
  write_file_atomic(file, m.dump(2) + "\n");
}

std::string trace_csv(const ot::SolverTrace& trace) {
  std::ostringstream os;
  trace.to_csv(os);
  return os.str();
}

// Re-renders a trace with a leading solver column so the two solvers can
// be plotted from one file, keyed either by iteration or by wall time.
void append_joined(std::ostringstream& os, const std::string& solver,
                   const ot::SolverTrace& trace) {
  std::istringstream is(trace_csv(trace));
  std::string line;
  std::getline(is, line);  // per-solver header dropped; the joined one leads
  while (std::getline(is, line)) os << solver << ',' << line << '\n';
}

json result_json(const ot::SolveResult& r, const std::string& solver, double eps,
                 double tol) {
  return json{{"solver", solver},
              {"eps", eps},
              {"tol_l1", tol},
              {"converged", r.converged},
              {"iterations", r.iterations},
              {"evaluations", r.evaluations},
              {"outer_stages", r.outer_stages},
              {"final_violation", r.final_violation},
              {"final_reduced_f", r.final_reduced_f},
              {"max_v_inf", r.max_v_inf}};
}

int run_solve(SolveCmdConfig cfg) {
  const fs::path out = resolve_out_dir(cfg.out_dir);
  fs::create_directories(out);
  std::map<std::string, std::string> inputs;
  const std::string started = iso_utc_now();

  ot::TransportProblem prob = load_instance(cfg.inst, inputs);
  ot::TransportProblem scaled = ot::rescale_problem(prob);
  const double tol = resolve_tol(cfg.tol, scaled.n(), false);
  ot::SolveResult r = ot::run_solver(scaled, to_spec(cfg.solver, true), tol);

  write_file_atomic(out / "solve_trace.csv", trace_csv(r.trace));
  write_file_atomic(out / "solve_result.json",
                    result_json(r, cfg.solver.solver, cfg.inst.eps, tol).dump(2) + "\n");
  write_manifest(out / "solve_manifest.json", "solve", json(cfg), cfg.inst.seed, inputs,
                 started);
  return r.converged ? 0 : 2;
}

int run_compare(CompareCmdConfig cfg) {
  const fs::path out = resolve_out_dir(cfg.out_dir);
  fs::create_directories(out);
  std::map<std::string, std::string> inputs;
  const std::string started = iso_utc_now();

  ot::TransportProblem prob = load_instance(cfg.inst, inputs);
  ot::TransportProblem scaled = ot::rescale_problem(prob);
  const double tol = resolve_tol(cfg.tol, scaled.n(), false);

  SolverConfig sink = cfg.solver;
  sink.solver = "sinkhorn";
  SolverConfig acc = cfg.solver;
  acc.solver = "acc-homotopy";
  ot::SolveResult rs = ot::run_solver(scaled, to_spec(sink, true), tol);
  ot::SolveResult ra = ot::run_solver(scaled, to_spec(acc, true), tol);

  std::ostringstream joined;
  joined << "solver," << ot::SolverTrace::csv_header() << '\n';
  append_joined(joined, "sinkhorn", rs.trace);
  append_joined(joined, "acc-homotopy", ra.trace);
  write_file_atomic(out / "compare_trace.csv", joined.str());

  json summary{{"eps", cfg.inst.eps},
               {"tol_l1", tol},
               {"n", cfg.inst.n},
               {"m", cfg.inst.m},
               {"sinkhorn", result_json(rs, "sinkhorn", cfg.inst.eps, tol)},
               {"acc_homotopy", result_json(ra, "acc-homotopy", cfg.inst.eps, tol)}};
  if (rs.converged && ra.converged) {
    double speedup = 1.0;
    if (rs.iterations != 0 || ra.iterations != 0) {
      speedup = static_cast<double>(rs.iterations) /
                static_cast<double>(std::max<long>(ra.iterations, 1));
    }
    summary["speedup_inner_iterations"] = speedup;
  } else {
    summary["speedup_inner_iterations"] = nullptr;
  }
  write_file_atomic(out / "compare_summary.json", summary.dump(2) + "\n");
  write_manifest(out / "compare_manifest.json", "compare", json(cfg), cfg.inst.seed,
                 inputs, started);
  return rs.converged && ra.converged ? 0 : 2;
}

std::string num_short(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

std::string eps_tag(double eps) {
  std::string s = num_short(eps);
  for (char& ch : s) {
    if (ch == '.') ch = 'p';
    if (ch == '+') ch = '_';
    if (ch == '-') ch = 'm';
  }
  return s;
}

int run_transfer(TransferCmdConfig cfg) {
  const fs::path out = resolve_out_dir(cfg.out_dir);
  fs::create_directories(out);
  std::map<std::string, std::string> inputs;
  const std::string started = iso_utc_now();

  inputs[cfg.src] = file_digest(cfg.src);
  inputs[cfg.tgt] = file_digest(cfg.tgt);
  const ot::Image src = ot::load_image(cfg.src);
  const ot::Image tgt = ot::load_image(cfg.tgt);
  const bool wall = cfg.solver.clock == "wall";

  std::ostringstream stats;
  stats << "eps,solver,converged,iterations,seconds\n";
  bool all_converged = true;
  for (double eps : cfg.eps_grid) {
    for (const char* solver : {"sinkhorn", "acc-homotopy"}) {
      SolverConfig sc = cfg.solver;
      sc.solver = solver;
      ot::TransferConfig tc;
      tc.n_samples = cfg.samples;
      tc.eps = eps;
      tc.seed = cfg.seed;
      tc.solver = to_spec(sc, false);
      if (cfg.tol != "auto") tc.tol_l1 = resolve_tol(cfg.tol, cfg.samples, false);
      const auto t0 = std::chrono::steady_clock::now();
      bool converged = false;
      long iterations = 0;
      try {
        ot::TransferResult tr = ot::run_color_transfer(src, tgt, tc);
        converged = tr.solve.converged;
        iterations = tr.solve.iterations;
        write_png_atomic(out / ("transfer_" + eps_tag(eps) + "_" + solver + ".png"),
                         tr.output);
      } catch (const ot::OtError& e) {
        // a grid cell can die (degenerate projection at tiny eps) without
        // taking the table down; the flag column records the failure
        std::cerr << "cell eps=" << num_short(eps) << " solver=" << solver
                  << " failed: " << e.what() << "\n";
      }
      const double secs =
          wall ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
               : 0.0;
      all_converged = all_converged && converged;
      stats << num_short(eps) << ',' << solver << ',' << (converged ? 1 : 0) << ','
            << iterations << ',' << num17(secs) << '\n';
    }
  }
  write_file_atomic(out / "transfer_stats.csv", stats.str());
  write_manifest(out / "transfer_manifest.json", "color-transfer", json(cfg), cfg.seed,
                 inputs, started);
  return all_converged ? 0 : 2;
}

int run_align(AlignCmdConfig cfg) {
  const fs::path out = resolve_out_dir(cfg.out_dir);
  fs::create_directories(out);
  std::map<std::string, std::string> inputs;
  const std::string started = iso_utc_now();

  inputs[cfg.src_vec] = file_digest(cfg.src_vec);
  inputs[cfg.tgt_vec] = file_digest(cfg.tgt_vec);
  inputs[cfg.dict] = file_digest(cfg.dict);
  const ot::WordVectors src = ot::load_word_vectors(cfg.src_vec, cfg.n);
  const ot::WordVectors tgt = ot::load_word_vectors(cfg.tgt_vec, cfg.n);
  const ot::BilingualDictionary dict = ot::load_dictionary(cfg.dict, src, tgt);
  const bool wall = cfg.solver.clock == "wall";
  ot::CosineNormalization norm;
  if (cfg.cost_norm == "minmax") {
    norm = ot::CosineNormalization::MinMax;
  } else if (cfg.cost_norm == "halfrange") {
    norm = ot::CosineNormalization::HalfRange;
  } else {
    throw ot::OtError("cost-norm must be minmax or halfrange");
  }

  std::ostringstream stats;
  stats << "eps,solver,converged,iterations,seconds,top1,top5\n";
  bool all_converged = true;
  for (double eps : cfg.eps_grid) {
    for (const char* solver : {"sinkhorn", "acc-homotopy"}) {
      SolverConfig sc = cfg.solver;
      sc.solver = solver;
      ot::AlignmentConfig ac;
      ac.eps = eps;
      ac.solver = to_spec(sc, false);
      ac.cost_norm = norm;
      if (cfg.tol != "auto") ac.tol_l1 = resolve_tol(cfg.tol, cfg.n, true);
      const auto t0 = std::chrono::steady_clock::now();
      bool converged = false;
      long iterations = 0;
      std::string top1_cell, top5_cell;
      try {
        ot::AlignmentReport rep = ot::run_word_alignment(src, tgt, dict, ac);
        converged = rep.solve.converged;
        iterations = rep.solve.iterations;
        if (rep.top1) top1_cell = num17(*rep.top1);
        if (rep.top5) top5_cell = num17(*rep.top5);
        json rj{{"eps", rep.eps},
                {"tol_l1", rep.tol_l1},
                {"solver", solver},
                {"n", rep.n},
                {"dictionary_pairs", rep.dictionary_pairs},
                {"evaluated_pairs", rep.evaluated_pairs},
                {"converged", rep.solve.converged},
                {"iterations", rep.solve.iterations},
                {"cost_raw_min", rep.cost_raw_min},
                {"cost_raw_max", rep.cost_raw_max}};
        rj["top1"] = rep.top1 ? json(*rep.top1) : json(nullptr);
        rj["top5"] = rep.top5 ? json(*rep.top5) : json(nullptr);
        write_file_atomic(out / ("align_report_" + eps_tag(eps) + "_" + solver + ".json"),
                          rj.dump(2) + "\n");
      } catch (const ot::OtError& e) {
        std::cerr << "cell eps=" << num_short(eps) << " solver=" << solver
                  << " failed: " << e.what() << "\n";
      }
      const double secs =
          wall ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
               : 0.0;
      all_converged = all_converged && converged;
      stats << num_short(eps) << ',' << solver << ',' << (converged ? 1 : 0) << ','
            << iterations << ',' << num17(secs) << ','
            << top1_cell << ',' << top5_cell << '\n';
    }
  }
  write_file_atomic(out / "align_stats.csv", stats.str());
  write_manifest(out / "align_manifest.json", "word-align", json(cfg), 0, inputs, started);
  return all_converged ? 0 : 2;
}

int run_replay(const std::string& manifest_path, const std::string& out_dir_override) {
  std::ifstream is(manifest_path);
  if (!is) throw ot::IoError("cannot read manifest: " + manifest_path);
  json m = json::parse(is);

  const auto inputs = m.at("inputs").get<std::map<std::string, std::string>>();
  for (const auto& [path, digest] : inputs) {
    const std::string now = file_digest(path);
    if (now != digest) {
      throw ot::IoError("input changed since the recorded run: " + path + " (digest " +
                        now + ", manifest " + digest + ")");
    }
  }

  const std::string command = m.at("command").get<std::string>();
  const json& config = m.at("config");
  if (command == "solve") {
    SolveCmdConfig cfg = config.get<SolveCmdConfig>();
    if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;
    return run_solve(std::move(cfg));
  }
  if (command == "compare") {
    CompareCmdConfig cfg = config.get<CompareCmdConfig>();
    if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;
    return run_compare(std::move(cfg));
  }
  if (command == "color-transfer") {
    TransferCmdConfig cfg = config.get<TransferCmdConfig>();
    if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;
    return run_transfer(std::move(cfg));
  }
  if (command == "word-align") {
    AlignCmdConfig cfg = config.get<AlignCmdConfig>();
    if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;
    return run_align(std::move(cfg));
  }
  throw ot::OtError("unknown command in manifest: " + command);
}

// `--synthetic n=100,m=50,seed=7` -> InstanceConfig fields.
void parse_synthetic_spec(const std::string& spec, InstanceConfig& inst) {
  inst.kind = "synthetic";
  std::istringstream is(spec);
  std::string part;
  while (std::getline(is, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--synthetic", "expected key=value: " + part);
    const std::string key = part.substr(0, eq);
    const std::string val = part.substr(eq + 1);
    try {
      if (key == "n") {
        inst.n = std::stol(val);
      } else if (key == "m") {
        inst.m = std::stol(val);
      } else if (key == "seed") {
        inst.seed = std::stoull(val);
      } else {
        throw CLI::ValidationError("--synthetic", "unknown key: " + key);
      }
    } catch (const std::invalid_argument&) {
      throw CLI::ValidationError("--synthetic", "bad value: " + part);
    } catch (const std::out_of_range&) {
      throw CLI::ValidationError("--synthetic", "bad value: " + part);
    }
  }
}

void add_instance_flags(CLI::App* cmd, InstanceConfig& inst, std::string& synthetic_spec,
                        std::string& csv_path) {
  cmd->add_option("--synthetic", synthetic_spec,
                  "synthetic instance spec, e.g. n=100,m=50,seed=7");
  cmd->add_option("--instance", csv_path, "instance CSV dump (name,index,value)");
  cmd->add_option("--eps", inst.eps,
                  "regularization strength (csv instances: overrides the file)");
}

void finish_instance_flags(const CLI::App* cmd, InstanceConfig& inst,
                           const std::string& synthetic_spec, const std::string& csv_path) {
  if (!synthetic_spec.empty() && !csv_path.empty()) {
    throw CLI::ValidationError("--instance", "choose either --synthetic or --instance");
  }
  if (!csv_path.empty()) {
    inst.kind = "csv";
    inst.path = csv_path;
    if (cmd->count("--eps") == 0) inst.eps = -1.0;  // keep the file's strength
  } else if (!synthetic_spec.empty()) {
    parse_synthetic_spec(synthetic_spec, inst);
  }
}

void add_solver_flags(CLI::App* cmd, SolverConfig& sc, bool with_kind) {
  if (with_kind) {
    cmd->add_option("--solver", sc.solver, "sinkhorn | acc | acc-homotopy")
        ->check(CLI::IsMember({"sinkhorn", "acc", "acc-homotopy"}));
  }
  cmd->add_option("--mu", sc.mu, "strong-convexity knob for the fixed-mu solver");
  cmd->add_option("--mu0", sc.mu0, "homotopy starting mu");
  cmd->add_option("--m0", sc.m0, "homotopy first-stage inner iterations");
  cmd->add_option("--max-iters", sc.max_iters, "inner iteration cap");
  cmd->add_option("--trace-stride", sc.trace_stride, "record every k-th trace row");
  cmd->add_option("--clock", sc.clock, "wall | none (none zeroes recorded seconds)")
      ->check(CLI::IsMember({"wall", "none"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entropy-regularized optimal transport: solvers, races, pipelines"};
  app.require_subcommand(1);

  SolveCmdConfig solve_cfg;
  std::string solve_synth, solve_csv;
  CLI::App* solve = app.add_subcommand("solve", "run one solver on one instance");
  add_instance_flags(solve, solve_cfg.inst, solve_synth, solve_csv);
  add_solver_flags(solve, solve_cfg.solver, true);
  solve->add_option("--tol-l1", solve_cfg.tol, "stopping tolerance, or auto for 2/n");
  solve->add_option("--out-dir", solve_cfg.out_dir, "output directory (or $OTACCEL_OUT_DIR)");

  CompareCmdConfig cmp_cfg;
  std::string cmp_synth, cmp_csv;
  CLI::App* cmp = app.add_subcommand("compare", "race sinkhorn against acc-homotopy");
  add_instance_flags(cmp, cmp_cfg.inst, cmp_synth, cmp_csv);
  add_solver_flags(cmp, cmp_cfg.solver, false);
  cmp->add_option("--tol-l1", cmp_cfg.tol, "stopping tolerance, or auto for 2/n");
  cmp->add_option("--out-dir", cmp_cfg.out_dir, "output directory (or $OTACCEL_OUT_DIR)");

  TransferCmdConfig tr_cfg;
  CLI::App* transfer = app.add_subcommand("color-transfer", "palette transfer over the eps grid");
  transfer->add_option("--src", tr_cfg.src, "source image (png or ppm)")->required();
  transfer->add_option("--tgt", tr_cfg.tgt, "target image (png or ppm)")->required();
  transfer->add_option("--samples", tr_cfg.samples, "pixels sampled per image");
  transfer->add_option("--seed", tr_cfg.seed, "sampling seed");
  transfer->add_option("--eps-grid", tr_cfg.eps_grid, "comma-separated eps values")
      ->delimiter(',');
  add_solver_flags(transfer, tr_cfg.solver, false);
  transfer->add_option("--tol-l1", tr_cfg.tol, "stopping tolerance, or auto for 2/n");
  transfer->add_option("--out-dir", tr_cfg.out_dir, "output directory (or $OTACCEL_OUT_DIR)");

  AlignCmdConfig al_cfg;
  CLI::App* align = app.add_subcommand("word-align", "translation retrieval over the eps grid");
  align->add_option("--src-vec", al_cfg.src_vec, "source embeddings (fastText text format)")
      ->required();
  align->add_option("--tgt-vec", al_cfg.tgt_vec, "target embeddings")->required();
  align->add_option("--dict", al_cfg.dict, "evaluation dictionary, two words per line")
      ->required();
  align->add_option("--n", al_cfg.n, "vocabulary size kept per side");
  align->add_option("--eps-grid", al_cfg.eps_grid, "comma-separated eps values")
      ->delimiter(',');
  add_solver_flags(align, al_cfg.solver, false);
  align->add_option("--cost-norm", al_cfg.cost_norm, "minmax | halfrange")
      ->check(CLI::IsMember({"minmax", "halfrange"}));
  align->add_option("--tol-l1", al_cfg.tol, "stopping tolerance, or auto for 0.01*2/n");
  align->add_option("--out-dir", al_cfg.out_dir, "output directory (or $OTACCEL_OUT_DIR)");

  std::string replay_manifest, replay_out;
  CLI::App* replay = app.add_subcommand("replay", "re-execute a recorded manifest");
  replay->add_option("--manifest", replay_manifest, "manifest JSON from a previous run")
      ->required();
  replay->add_option("--out-dir", replay_out, "override the recorded output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (solve->parsed()) {
      finish_instance_flags(solve, solve_cfg.inst, solve_synth, solve_csv);
      return run_solve(std::move(solve_cfg));
    }
    if (cmp->parsed()) {
      finish_instance_flags(cmp, cmp_cfg.inst, cmp_synth, cmp_csv);
      return run_compare(std::move(cmp_cfg));
    }
    if (transfer->parsed()) return run_transfer(std::move(tr_cfg));
    if (align->parsed()) return run_align(std::move(al_cfg));
    if (replay->parsed()) return run_replay(replay_manifest, replay_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
