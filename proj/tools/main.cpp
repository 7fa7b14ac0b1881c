// Command line front end: mesh generation, forward saw-tooth analysis,
// inverse identification of the traction-separation curve, and parameter
// sweeps. All parameters come from a key = value config file; -D overrides
// individual keys from the command line.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "slafem/forward.hpp"
#include "slafem/inverse.hpp"
#include "slafem/loading_curve.hpp"
#include "slafem/mesh.hpp"
#include "slafem/outputs.hpp"
#include "slafem/run_config.hpp"
#include "slafem/sawtooth.hpp"
#include "slafem/ts_curve.hpp"

namespace {

using namespace slafem;

struct CommonArgs {
  std::string config;
  std::vector<std::string> defines;
  std::string outdir;
  std::int64_t seed = -1;
  int workers = 1;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config, "key = value configuration file");
  sub->add_option("-D,--define", args.defines, "override a config key (key=value)");
  sub->add_option("--outdir", args.outdir, "output directory")
      ->envname("SLAFEM_OUTDIR");
  sub->add_option("--seed", args.seed, "random seed for tie breaking");
  sub->add_option("--workers", args.workers, "parallel workers (sweep only)");
}

RunConfig build_config(const CommonArgs& args) {
  RunConfig cfg;
  if (!args.config.empty()) cfg = RunConfig::from_file(args.config);
  for (const std::string& def : args.defines) {
    const auto eq = def.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::runtime_error("-D expects key=value, got '" + def + "'");
    }
    cfg.set(def.substr(0, eq), def.substr(eq + 1));
  }
  if (args.seed >= 0) cfg.set("seed", std::to_string(args.seed));
  if (!args.outdir.empty()) cfg.set("outdir", args.outdir);
  return cfg;
}

std::string resolve_outdir(const RunConfig& cfg) { return cfg.get_str("outdir", "out"); }

Mesh resolve_mesh(const RunConfig& cfg) {
  if (cfg.has("mesh_file")) return read_mesh(cfg.require_str("mesh_file"));
  const std::string kind = cfg.get_str("mesh_kind", "beam");
  if (kind == "beam") {
    BeamOptions opt;
    const std::string response = cfg.get_str("response", "cmod");
    if (response == "cmod") {
      opt.response = ResponseKind::Cmod;
    } else if (response == "deflection") {
      opt.response = ResponseKind::Deflection;
    } else {
      throw std::runtime_error("response must be cmod or deflection, got '" + response + "'");
    }
    opt.load = cfg.get_double("load", 1.0);
    return generate_notched_beam(cfg.require_double("span"), cfg.require_double("depth"),
                                 cfg.require_double("thickness"),
                                 cfg.get_double("notch_depth", 0.0),
                                 cfg.get_double("notch_width", 0.0),
                                 cfg.require_double("elem_size"), opt);
  }
  if (kind == "ct") {
    CtOptions opt;
    opt.load = cfg.get_double("load", 1.0);
    return generate_compact_tension(cfg.require_double("width"), cfg.require_double("height"),
                                    cfg.require_double("thickness"),
                                    cfg.require_double("notch_length"),
                                    cfg.require_double("elem_fine"),
                                    cfg.require_double("elem_coarse"), opt);
  }
  throw std::runtime_error("mesh_kind must be beam or ct, got '" + kind + "'");
}

std::vector<Material> resolve_materials(const RunConfig& cfg) {
  if (cfg.has("E_xx")) {
    return {Material::orthotropic(cfg.require_double("E_xx"), cfg.require_double("E_yy"),
                                  cfg.require_double("G_xy"), cfg.require_double("nu_xy"))};
  }
  return {Material::isotropic(cfg.require_double("E"), cfg.get_double("nu", 0.2))};
}

TsCurve resolve_ts(const RunConfig& cfg) {
  if (cfg.has("ts_file")) return read_ts_csv(cfg.require_str("ts_file"));
  const std::string kind = cfg.get_str("ts", "triangle");
  const double f_t = cfg.require_double("f_t");
  if (kind == "triangle") {
    const double w_c = cfg.has("w_c") ? cfg.require_double("w_c")
                                      : 2.0 * cfg.require_double("G_F") / f_t;
    return triangle_ts(f_t, w_c);
  }
  if (kind == "exponential") {
    return exponential_ts(f_t, cfg.require_double("G_F"), cfg.get_int("ts_points", 400));
  }
  throw std::runtime_error("ts must be triangle or exponential, got '" + kind + "'");
}

SawtoothLaw resolve_law(const RunConfig& cfg, const TsCurve& ts, double k0) {
  const std::string construction = cfg.get_str("construction", "band");
  if (construction == "band") {
    const double band = cfg.has("band") ? cfg.require_double("band")
                                        : cfg.get_double("band_fraction", 0.01) * ts.f_t();
    return sawtooth_stress_band(ts, band, k0);
  }
  if (construction == "factor") {
    return sawtooth_stiffness_factor(ts, cfg.get_double("rho", 0.9), k0);
  }
  if (construction == "decrement") {
    const double dsigma = cfg.has("dsigma_abs")
                              ? cfg.require_double("dsigma_abs")
                              : cfg.get_double("dsigma_fraction", 0.01) * ts.f_t();
    return sawtooth_stress_decrement(ts, dsigma, k0);
  }
  throw std::runtime_error("construction must be band, factor or decrement, got '" +
                           construction + "'");
}

LoadingCurve resolve_record(const RunConfig& cfg) {
  CurveColumns cols;
  cols.control = cfg.get_str("control_column", "control");
  cols.response = cfg.get_str("response_column", "response");
  cols.control_scale = cfg.has("control_unit") ? unit_scale(cfg.require_str("control_unit"))
                                               : cfg.get_double("control_scale", 1.0);
  cols.response_scale = cfg.has("response_unit")
                            ? unit_scale(cfg.require_str("response_unit"))
                            : cfg.get_double("response_scale", 1.0);
  LoadingCurve record = load_curve_csv(cfg.require_str("record_file"), cols);
  const int decimate = cfg.get_int("decimate", 0);
  if (decimate > 0) record = decimate_curve(record, decimate);
  return record;
}

IdentConfig resolve_ident(const RunConfig& cfg, const std::vector<Material>& materials) {
  IdentConfig ident;
  ident.k0 = cfg.get_double("k0", materials.front().reference_modulus());
  ident.g0 = cfg.get_double("g0", 0.0);
  ident.dsigma_fraction = cfg.get_double("dsigma_fraction", 0.01);
  ident.dsigma_abs = cfg.get_double("dsigma_abs", 0.0);
  ident.max_events = cfg.get_int("max_events", 500000);
  ident.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
  ident.validate();
  return ident;
}

int run_mesh(const RunConfig& cfg) {
  const Mesh mesh = resolve_mesh(cfg);
  const std::string outdir = resolve_outdir(cfg);
  std::filesystem::create_directories(outdir);
  const std::string path = (std::filesystem::path(outdir) / "mesh.txt").string();
  write_mesh(mesh, path);
  std::cout << "mesh: " << mesh.nodes.size() << " nodes, " << mesh.quads.size()
            << " quads, " << mesh.interfaces.size() << " interface elements -> " << path
            << "\n";
  return 0;
}

int run_forward_cmd(const RunConfig& cfg) {
  const Mesh mesh = resolve_mesh(cfg);
  const std::vector<Material> materials = resolve_materials(cfg);
  const TsCurve ts = resolve_ts(cfg);
  const double k0 = cfg.get_double("k0", materials.front().reference_modulus());
  const SawtoothLaw law = resolve_law(cfg, ts, k0);

  ForwardConfig fwd;
  fwd.g0 = cfg.get_double("g0", 0.0);
  fwd.max_events = cfg.get_int("max_events", 100000);
  if (cfg.has("response_limit")) fwd.response_limit = cfg.require_double("response_limit");
  if (cfg.has("control_limit")) fwd.control_limit = cfg.require_double("control_limit");
  fwd.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));

  const ForwardResult result = run_forward(mesh, materials, law, fwd);

  // the physical record starts unloaded; exports carry the origin explicitly
  std::vector<std::array<double, 2>> curve;
  curve.reserve(result.curve.size() + 1);
  curve.push_back({0.0, 0.0});
  curve.insert(curve.end(), result.curve.begin(), result.curve.end());
  const int decimate = cfg.get_int("decimate", 0);
  if (decimate > 0) {
    const LoadingCurve thin = decimate_curve(LoadingCurve(curve), decimate);
    curve = thin.points();
  }

  const std::string outdir = resolve_outdir(cfg);
  std::filesystem::create_directories(outdir);
  const auto base = std::filesystem::path(outdir);
  write_curve_csv(curve, (base / "curve.csv").string());
  write_events_csv(result.events, (base / "events.csv").string());
  std::cout << "forward: " << result.events.size() << " events, termination "
            << result.termination << ", " << law.teeth.size() << " teeth -> " << outdir
            << "\n";
  return 0;
}

constexpr const char* kStiffnessHint =
    "error: the elastic response never meets the record; the assumed stiffness is "
    "above the measured one (check the modulus and the record units)";

int run_inverse_cmd(const RunConfig& cfg) {
  const Mesh mesh = resolve_mesh(cfg);
  const std::vector<Material> materials = resolve_materials(cfg);
  const LoadingCurve record = resolve_record(cfg);
  const IdentConfig ident = resolve_ident(cfg, materials);
  const int passes = cfg.get_int("passes", 1);

  const std::vector<IdentTrace> traces = run_multipass(mesh, materials, record, ident, passes);

  const std::string outdir = resolve_outdir(cfg);
  write_outputs(outdir, record, traces);

  bool ok = !traces.empty();
  for (std::size_t p = 0; p < traces.size(); ++p) {
    const IdentTrace& t = traces[p];
    const FractureEnergy e = t.ts.empty() ? FractureEnergy{0.0, true} : fracture_energy(t.ts);
    std::cout << "pass " << (p + 1) << ": lead ip " << t.lead_ip << ", f_t "
              << format_double(t.f_t) << " MPa, G_F " << format_double(e.value)
              << (e.lower_bound ? " (lower bound)" : "") << " N/mm, "
              << t.case_a_count << " curve points, " << to_string(t.reason) << "\n";
    ok = ok && (t.reason == StopReason::TsComplete || t.reason == StopReason::CurveExhausted);
  }
  if (!traces.empty() && traces.front().reason != StopReason::TsComplete) {
    std::cerr << "warning: first pass did not finish its curve ("
              << to_string(traces.front().reason) << ")\n";
  }
  if (!traces.empty() && traces.front().reason == StopReason::UnreachableState &&
      traces.front().f_t == 0.0) {
    std::cerr << kStiffnessHint << "\n";
  }
  std::cout << "outputs -> " << outdir << "\n";
  return ok ? 0 : 1;
}

int run_sweep_cmd(const RunConfig& cfg) {
  const std::string key = cfg.require_str("sweep_key");
  const std::vector<double> values = cfg.get_list("sweep_values");
  if (values.empty()) throw std::runtime_error("sweep_values must list at least one value");
  const int workers = std::max(1, cfg.get_int("workers", 1));
  const std::string outdir = resolve_outdir(cfg);
  std::filesystem::create_directories(outdir);

  struct Cell {
    bool ok = false;
    std::string row;
  };
  std::vector<Cell> cells(values.size());
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    for (std::size_t i = next.fetch_add(1); i < values.size(); i = next.fetch_add(1)) {
      RunConfig local = cfg;
      local.set(key, format_double(values[i]));
      const std::string cell_dir =
          (std::filesystem::path(outdir) / ("cell_" + std::to_string(i))).string();
      local.set("outdir", cell_dir);
      Cell& cell = cells[i];
      try {
        const Mesh mesh = resolve_mesh(local);
        const std::vector<Material> materials = resolve_materials(local);
        const LoadingCurve record = resolve_record(local);
        const IdentConfig ident = resolve_ident(local, materials);
        const int passes = local.get_int("passes", 1);
        const std::vector<IdentTrace> traces =
            run_multipass(mesh, materials, record, ident, passes);
        write_outputs(cell_dir, record, traces);

        bool ok = !traces.empty();
        for (const IdentTrace& t : traces) {
          ok = ok && (t.reason == StopReason::TsComplete ||
                      t.reason == StopReason::CurveExhausted);
        }
        const IdentTrace& first = traces.front();
        const FractureEnergy e =
            first.ts.empty() ? FractureEnergy{0.0, true} : fracture_energy(first.ts);
        cell.ok = ok;
        cell.row = std::to_string(i) + "," + key + "," + format_double(values[i]) + "," +
                   format_double(first.f_t) + "," + format_double(e.value) + "," +
                   std::to_string(traces.size()) + "," + to_string(first.reason);
      } catch (const std::exception& err) {
        cell.ok = false;
        cell.row = std::to_string(i) + "," + key + "," + format_double(values[i]) +
                   ",,,0,error: " + err.what();
      }
    }
  };

  std::vector<std::thread> pool;
  const int n_threads = std::min<std::size_t>(workers, values.size());
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();

  const std::string summary = (std::filesystem::path(outdir) / "sweep.csv").string();
  {
    std::ofstream out(summary);
    if (!out) throw std::runtime_error("cannot write '" + summary + "'");
    out << "cell,key,value,f_t_MPa,G_F_N_per_mm,passes,reason\n";
    for (const Cell& c : cells) out << c.row << "\n";
  }

  bool all_ok = true;
  for (const Cell& c : cells) {
    std::cout << c.row << "\n";
    all_ok = all_ok && c.ok;
  }
  std::cout << "sweep summary -> " << summary << "\n";
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plane-stress saw-tooth fracture analysis and traction-separation "
               "curve identification"};
  app.require_subcommand(1);

  CommonArgs mesh_args, fwd_args, inv_args, sweep_args;
  CLI::App* mesh_cmd = app.add_subcommand("mesh", "generate a mesh and write it to a file");
  add_common(mesh_cmd, mesh_args);
  CLI::App* fwd_cmd =
      app.add_subcommand("forward", "run a saw-tooth analysis with a prescribed curve");
  add_common(fwd_cmd, fwd_args);
  CLI::App* inv_cmd =
      app.add_subcommand("inverse", "identify the traction-separation curve from a record");
  add_common(inv_cmd, inv_args);
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "repeat the inverse analysis over a parameter range");
  add_common(sweep_cmd, sweep_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (mesh_cmd->parsed()) return run_mesh(build_config(mesh_args));
    if (fwd_cmd->parsed()) return run_forward_cmd(build_config(fwd_args));
    if (inv_cmd->parsed()) return run_inverse_cmd(build_config(inv_args));
    if (sweep_cmd->parsed()) {
      RunConfig cfg = build_config(sweep_args);
      if (sweep_args.workers > 1) cfg.set("workers", std::to_string(sweep_args.workers));
      return run_sweep_cmd(cfg);
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 2;
}
