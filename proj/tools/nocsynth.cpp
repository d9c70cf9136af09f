#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nocsynth/decompose.hpp"
#include "nocsynth/report.hpp"
#include "nocsynth/simulator.hpp"
#include "nocsynth/synthesis.hpp"
#include "nocsynth/workloads.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace nocsynth;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInfeasible = 2;

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void spit(const fs::path& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << content;
}

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct CommonOpts {
  std::string acg_path;
  std::string library_path;
  std::string energy_spec = "unit";
  double lambda = -1.0;  // <0: keep the spec's default
  double max_link_bw = 0.0;
  double max_bisection = 0.0;
  int timeout_iso_ms = 10000;
  int timeout_search_ms = 60000;
  std::string out_dir = "out";
};

Library load_library(const CommonOpts& o) {
  if (o.library_path.empty()) return builtin_library();
  return parse_library(slurp(o.library_path));
}

EnergyModel load_energy(const CommonOpts& o) {
  EnergyModel em = parse_energy_spec(o.energy_spec);
  if (o.lambda >= 0) em.lambda = o.lambda;
  if (!em.valid()) throw std::runtime_error("invalid energy model (lambda must be >= 1)");
  return em;
}

Constraints load_constraints(const CommonOpts& o) {
  Constraints c;
  if (o.max_link_bw > 0) c.max_link_bandwidth = o.max_link_bw;
  if (o.max_bisection > 0) c.max_bisection_bandwidth = o.max_bisection;
  return c;
}

struct SynthOutput {
  Acg acg;
  Library lib;
  EnergyModel em;
  Decomposition decomposition;
  Architecture arch;
  RoutingTables tables;
  json report;
};

// Shared pipeline behind `synth` and `compare`: decompose, glue, route,
// check, report. Throws SynthInfeasible when no feasible decomposition
// exists.
struct SynthInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SynthOutput run_synthesis(const CommonOpts& o) {
  SynthOutput s;
  std::string acg_text = slurp(o.acg_path);
  s.acg = parse_acg(acg_text);
  s.lib = load_library(o);
  s.em = load_energy(o);
  Constraints cons = load_constraints(o);

  for (const CommPrimitive& p : s.lib.primitives) {
    auto violations = validate_primitive(p);
    if (!violations.empty()) {
      std::string msg = "library validation failed:";
      for (const auto& v : violations) msg += "\n  " + v;
      throw std::runtime_error(msg);
    }
  }

  DecomposeOptions dopts;
  dopts.iso_timeout = std::chrono::milliseconds(o.timeout_iso_ms);
  dopts.search_timeout = std::chrono::milliseconds(o.timeout_search_ms);
  double t0 = now_ms();
  DecomposeResult res = decompose(s.acg, s.lib, s.em, cons, dopts);
  double decompose_ms = now_ms() - t0;

  if (!res.best) {
    std::string msg = "no feasible decomposition";
    for (const auto& why : res.infeasibility) msg += "\n  " + why;
    throw SynthInfeasible(msg);
  }
  s.decomposition = *res.best;

  t0 = now_ms();
  s.arch = glue(s.decomposition, s.acg, s.lib, s.em);
  s.tables = build_routing_tables(s.arch, s.decomposition, s.acg, s.lib);
  DeadlockReport dl = detect_deadlock(s.arch, s.tables);
  double synth_ms = now_ms() - t0;

  auto bw_violations = check_bandwidth(s.decomposition, s.acg, s.lib, cons);

  json rep;
  rep["input_digest"] = digest(acg_text);
  rep["library_digest"] = digest(serialize_library(s.lib));
  rep["energy_model"] = describe_energy_model(s.em);
  rep["decomposition"] = {
      {"cost", s.decomposition.cost},
      {"matches", s.decomposition.matches.size()},
      {"remainder_edges", s.decomposition.remainder.size()},
      {"truncated", s.decomposition.truncated},
      {"listing", format_decomposition(s.decomposition, s.lib)},
  };
  json viols = json::array();
  for (const auto& v : bw_violations)
    viols.push_back({{"link", {v.a, v.b}}, {"demand", v.demand}, {"capacity", v.capacity}});
  rep["constraint_checks"] = {{"bandwidth_violations", viols}};
  json arch_stats;
  arch_stats["links"] = s.arch.links.size();
  if (s.arch.nodes.size() >= 2 && !s.arch.links.empty()) {
    BisectionResult bi = bisection_bandwidth(s.arch);
    arch_stats["bisection_bandwidth"] = bi.value;
    arch_stats["bisection_exact"] = bi.exact;
  }
  int max_diam = 0;
  for (const CommPrimitive& p : s.lib.primitives) {
    std::vector<AcgNode> vn;
    std::vector<AcgEdge> ve;
    for (int v = 1; v <= p.k; ++v) vn.push_back({v, std::nullopt});
    for (auto [a, b] : p.implementation) ve.push_back({a, b, 0, 0});
    auto d = diameter(Acg(vn, ve), true);
    if (d) max_diam = std::max(max_diam, *d);
  }
  arch_stats["max_library_diameter"] = max_diam;
  arch_stats["deadlock_cycles"] = dl.cycles.size();
  arch_stats["min_virtual_channels"] = dl.min_virtual_channels;
  rep["architecture"] = arch_stats;
  rep["timings_ms"] = {{"decompose", decompose_ms}, {"synthesis", synth_ms}};
  s.report = std::move(rep);
  return s;
}

int cmd_synth(const CommonOpts& o) {
  SynthOutput s = run_synthesis(o);
  fs::create_directories(o.out_dir);
  std::string listing = format_decomposition(s.decomposition, s.lib);
  spit(fs::path(o.out_dir) / "decomposition.txt", listing);
  spit(fs::path(o.out_dir) / "architecture.txt", serialize_architecture(s.arch, s.tables));
  spit(fs::path(o.out_dir) / "report.json", s.report.dump(2) + "\n");
  std::cout << listing;
  return kExitOk;
}

int cmd_compare(const CommonOpts& o, const std::string& mesh_spec, int rounds, int flit_bits,
                int vcs, std::uint64_t /*seed*/) {
  int rows = 0, cols = 0;
  if (std::sscanf(mesh_spec.c_str(), "%dx%d", &rows, &cols) != 2 || rows < 1 || cols < 1)
    throw std::runtime_error("--mesh expects RxC, e.g. 4x4");

  SynthOutput s = run_synthesis(o);
  for (const AcgNode& n : s.acg.nodes())
    if (n.id < 1 || n.id > rows * cols)
      throw std::runtime_error("ACG node " + std::to_string(n.id) + " does not fit a " +
                               mesh_spec + " mesh (ids must be 1.." +
                               std::to_string(rows * cols) + ")");

  auto [mesh, mesh_tables] = mesh_baseline(rows, cols);

  SimConfig cfg;
  cfg.flit_bits = flit_bits;
  cfg.virtual_channels = vcs;
  Traffic traffic = traffic_from_acg(s.acg, rounds);

  SimResult custom = simulate(s.arch, s.tables, traffic, cfg, s.em);
  SimResult meshr = simulate(mesh, mesh_tables, traffic, cfg, s.em);

  double bits_per_run = 0;
  for (const auto& round : traffic.rounds)
    for (const auto& ev : round) bits_per_run += ev.payload_bits;
  std::string scenario = "acg-rounds-" + std::to_string(rounds);

  std::string csv = "scenario,arch,delta_cycles,avg_latency,throughput_bps,energy_j,p_ave_w\n";
  csv += custom.csv_row(scenario, "custom",
                        throughput(custom.delta_cycles, cfg.f_clk_hz, bits_per_run)) + "\n";
  csv += meshr.csv_row(scenario, "mesh" + mesh_spec,
                       throughput(meshr.delta_cycles, cfg.f_clk_hz, bits_per_run)) + "\n";

  std::vector<BarGroup> groups = {
      {"makespan (cycles)", {double(custom.delta_cycles), double(meshr.delta_cycles)}},
      {"avg latency (cycles)", {custom.avg_latency_cycles, meshr.avg_latency_cycles}},
      {"energy (uJ)", {custom.energy_joules * 1e6, meshr.energy_joules * 1e6}},
  };
  std::string svg = render_bar_chart_svg("custom vs mesh " + mesh_spec,
                                         {"custom", "mesh" + mesh_spec}, groups);

  fs::create_directories(o.out_dir);
  spit(fs::path(o.out_dir) / "compare.csv", csv);
  spit(fs::path(o.out_dir) / "compare.svg", svg);
  std::cout << csv;
  return kExitOk;
}

// Planted decomposition suites of growing size; the mix cycles through the
// library so every size exercises several primitive kinds.
PlantedAcg bench_instance(int n, std::uint64_t seed) {
  static const char* cycle[] = {"MGG4", "L4", "G123", "P4", "G124", "L5", "L3", "P3"};
  std::vector<PlantRequest> mix;
  int budget = std::max(4, (n * 3) / 5);
  int used = 0, i = 0;
  Library lib = builtin_library();
  while (true) {
    const CommPrimitive* p = lib.find(cycle[i % 8]);
    if (used + p->k > budget) break;
    mix.push_back({p->name, 1});
    used += p->k;
    ++i;
  }
  return planted_acg(seed, n, mix, /*noise_edges=*/n / 4);
}

int cmd_bench(const std::vector<int>& sizes, int instances, std::uint64_t seed,
              const std::string& out_dir) {
  std::string csv = "n,seed,wall_ms\n";
  Library lib = builtin_library();
  for (int n : sizes) {
    for (int k = 0; k < instances; ++k) {
      std::uint64_t s = seed + 1000ull * n + k;
      PlantedAcg inst = bench_instance(n, s);
      double t0 = now_ms();
      DecomposeResult res = decompose(inst.acg, lib, EnergyModel::unit(), Constraints::unlimited());
      double ms = now_ms() - t0;
      if (!res.best) throw std::runtime_error("bench instance unexpectedly infeasible");
      csv += std::to_string(n) + "," + std::to_string(s) + "," + format_number(ms) + "\n";
      std::cout << "n=" << n << " seed=" << s << " " << format_number(ms) << " ms (cost "
                << format_number(res.best->cost) << ")\n";
    }
  }
  fs::create_directories(out_dir);
  spit(fs::path(out_dir) / "bench.csv", csv);
  return kExitOk;
}

int cmd_gen(const std::string& workload, std::uint64_t seed, int n, int edges,
            const std::string& mix_spec, int noise, const std::string& out_path) {
  if (workload == "aes") {
    spit(out_path, serialize_acg(aes_acg()));
  } else if (workload == "planted") {
    std::vector<PlantRequest> mix;
    std::istringstream is(mix_spec);
    std::string item;
    while (std::getline(is, item, ',')) {
      auto colon = item.find(':');
      PlantRequest r;
      r.primitive = item.substr(0, colon);
      r.count = colon == std::string::npos ? 1 : std::stoi(item.substr(colon + 1));
      if (!r.primitive.empty()) mix.push_back(r);
    }
    PlantedAcg p = planted_acg(seed, n, mix, noise);
    spit(out_path, serialize_acg(p.acg));
    spit(out_path + ".truth", describe_planted(p));
  } else if (workload == "random") {
    spit(out_path, serialize_acg(random_acg(seed, n, edges)));
  } else {
    throw std::runtime_error("unknown workload '" + workload + "'");
  }
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

int cmd_validate_lib(const std::string& library_path) {
  Library lib = library_path.empty() ? builtin_library() : parse_library(slurp(library_path));
  bool any = false;
  for (const CommPrimitive& p : lib.primitives) {
    auto violations = validate_primitive(p);
    for (const auto& v : violations) {
      std::cout << v << "\n";
      any = true;
    }
  }
  if (!any) {
    std::cout << "library ok (" << lib.primitives.size() << " primitives)\n";
    return kExitOk;
  }
  return kExitInputError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nocsynth: application-specific NoC topology synthesis"};
  app.require_subcommand(1);

  CommonOpts common;
  std::string mesh_spec = "4x4";
  int rounds = 4, flit_bits = 32, vcs = 1;
  std::uint64_t seed = 1;

  auto add_common = [&](CLI::App* cmd, bool needs_acg) {
    if (needs_acg) cmd->add_option("--acg", common.acg_path, "ACG input file")->required();
    cmd->add_option("--library", common.library_path, "user communication library file");
    cmd->add_option("--energy", common.energy_spec,
                    "unit | linear:<e_router>,<e_wire>[,<default_mm>[,<lambda>]]");
    cmd->add_option("--lambda", common.lambda, "remainder penalty (>= 1)");
    cmd->add_option("--max-link-bw", common.max_link_bw, "per-link bandwidth cap (bits/s)");
    cmd->add_option("--max-bisection", common.max_bisection, "bisection bandwidth cap (bits/s)");
    cmd->add_option("--timeout-iso", common.timeout_iso_ms,
                    "isomorphism timeout per primitive (ms)");
    cmd->add_option("--timeout-search", common.timeout_search_ms,
                    "branch-and-bound timeout (ms, 0 = unlimited)");
    cmd->add_option("--out-dir", common.out_dir, "output directory");
  };

  CLI::App* synth = app.add_subcommand("synth", "decompose an ACG and synthesize a topology");
  add_common(synth, true);

  CLI::App* compare =
      app.add_subcommand("compare", "simulate the synthesized topology against a mesh");
  add_common(compare, true);
  compare->add_option("--mesh", mesh_spec, "mesh size RxC");
  compare->add_option("--rounds", rounds, "traffic rounds");
  compare->add_option("--flit-bits", flit_bits, "flit size in bits");
  compare->add_option("--vc", vcs, "virtual channels");
  compare->add_option("--seed", seed, "random seed");

  CLI::App* bench = app.add_subcommand("bench", "runtime benchmark over planted suites");
  std::string sizes_spec = "4,6,8,10,12,14,16,18,24,32,40";
  int instances = 3;
  std::string bench_out = "out";
  bench->add_option("--sizes", sizes_spec, "comma-separated node counts");
  bench->add_option("--instances", instances, "instances per size");
  bench->add_option("--seed", seed, "random seed");
  bench->add_option("--out-dir", bench_out, "output directory");

  CLI::App* gen = app.add_subcommand("gen", "generate workload ACGs");
  std::string workload = "aes", mix_spec, gen_out = "workload.acg";
  int gen_n = 16, gen_edges = 24, noise = 0;
  gen->add_option("--workload", workload, "aes | planted | random")->required();
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--n", gen_n, "node count");
  gen->add_option("--edges", gen_edges, "edge count (random)");
  gen->add_option("--mix", mix_spec, "planted mix, e.g. MGG4:1,G123:3");
  gen->add_option("--noise", noise, "noise edges (planted)");
  gen->add_option("--out", gen_out, "output file")->required();

  CLI::App* vlib = app.add_subcommand("validate-lib", "validate a communication library");
  vlib->add_option("--library", common.library_path, "library file (default: builtin)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(common);
    if (compare->parsed()) return cmd_compare(common, mesh_spec, rounds, flit_bits, vcs, seed);
    if (bench->parsed()) {
      std::vector<int> sizes;
      std::istringstream is(sizes_spec);
      std::string tok;
      while (std::getline(is, tok, ',')) sizes.push_back(std::stoi(tok));
      return cmd_bench(sizes, instances, seed, bench_out);
    }
    if (gen->parsed()) return cmd_gen(workload, seed, gen_n, gen_edges, mix_spec, noise, gen_out);
    if (vlib->parsed()) return cmd_validate_lib(common.library_path);
  } catch (const SynthInfeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
