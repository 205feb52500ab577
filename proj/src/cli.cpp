// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#include "mpi_forge/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mpi_forge/cbgs.hpp"
#include "mpi_forge/edit.hpp"
#include "mpi_forge/errors.hpp"
#include "mpi_forge/gradcheck.hpp"
#include "mpi_forge/io.hpp"
#include "mpi_forge/mpi.hpp"
#include "mpi_forge/parallel.hpp"
#include "mpi_forge/reweigh.hpp"
#include "mpi_forge/stats.hpp"
#include "mpi_forge/synth.hpp"

namespace mpi_forge::cli {
namespace {

using toy::ToyOp;
using toy::kAllToyOps;
using toy::gradcheck_op;

/// Reads `--config` files of the form
///   {"threads": 4, "build": {"planes": 128, "size": "400x224"}}
/// Nested objects address subcommands; arrays become multi-value inputs.
class JsonConfig : public CLI::Config {
public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConfigError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    flatten(j, {}, items);
    return items;
  }

private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConfigError("config values must be strings, numbers, booleans or arrays of those");
  }

  static void flatten(const nlohmann::json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        auto path = parents;
        path.push_back(key);
        flatten(value, path, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array())
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      else
        item.inputs.push_back(scalar(value));
      out.push_back(std::move(item));
    }
  }
};

struct Size {
  int width{0};
  int height{0};
};

Size parse_size(const std::string& text) {
  const auto x = text.find('x');
  auto number = [&](const std::string& s) {
    if (s.empty() || s.size() > 9 || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw ConfigError("--size must look like WIDTHxHEIGHT, got \"" + text + "\"");
    return std::stoi(s);
  };
  if (x == std::string::npos) throw ConfigError("--size must look like WIDTHxHEIGHT, got \"" + text + "\"");
  return {number(text.substr(0, x)), number(text.substr(x + 1))};
}

struct Globals {
  int threads{default_thread_count()};
  int verbosity{0};
};

void note(const Globals& g, const std::string& message) {
  if (g.verbosity > 0) std::cerr << "mpi-forge: " << message << '\n';
}

OccupancyGrid load_grid(const std::string& path) { return decode_grid(read_file(path)); }
MpiStack load_stack(const std::string& path) { return decode_stack(read_file(path)); }

void check_view(const MpiStack& stack, int view) {
  if (view < 0 || view >= stack.views())
    throw ConfigError("--view " + std::to_string(view) + " is out of range for a stack with " +
                      std::to_string(stack.views()) + " views");
}

// ------------------------------------------------------------- commands

struct BuildArgs {
  std::string grid, rig, size{"800x448"}, out;
  int planes{256};
  double d_min{0.0}, d_max{50.0};
};

void build(const BuildArgs& a, const Globals& g) {
  const Size size = parse_size(a.size);
  MpiConfig config{a.planes, a.d_min, a.d_max, size.height, size.width};
  config.validate();
  const auto grid = load_grid(a.grid);
  const auto rig = decode_rig(read_file(a.rig));
  const auto stack = build_rig_mpi(grid, rig, config, g.threads);
  write_file(a.out, encode_stack(stack));
  note(g, "wrote " + a.out + " (" + std::to_string(stack.views()) + " views, " + std::to_string(config.planes) +
              " planes, " + a.size + ")");
}

struct CompositeArgs {
  std::string stack, semantic, depth, palette;
  int view{0};
};

void composite(const CompositeArgs& a, const Globals& g) {
  if (a.semantic.empty() && a.depth.empty()) throw ConfigError("composite needs --semantic and/or --depth");
  const Palette palette = a.palette.empty() ? default_palette() : decode_palette(read_file(a.palette));
  const auto stack = load_stack(a.stack);
  check_view(stack, a.view);
  if (!a.semantic.empty()) {
    write_file(a.semantic, encode_ppm(colorize(composite_semantic(stack, a.view, g.threads), palette)));
    note(g, "wrote " + a.semantic);
  }
  if (!a.depth.empty()) {
    write_file(a.depth, encode_pgm(composite_depth(stack, a.view, g.threads)));
    note(g, "wrote " + a.depth);
  }
}

struct EditArgs {
  std::string grid, script, out, report;
};

void edit(const EditArgs& a, const Globals& g) {
  const auto script = decode_edit_script(read_file(a.script));
  if (auto diags = validate_script(script); !diags.empty()) throw ScriptError(std::move(diags));
  const auto before = load_grid(a.grid);
  const auto after = apply_edit_script(before, script);
  write_file(a.out, encode_grid(after));
  const auto diff = diff_grids(before, after);
  if (!a.report.empty()) write_file(a.report, encode_diff_report(diff));
  note(g, "applied " + std::to_string(script.ops.size()) + " ops, " + std::to_string(diff.changed) +
              " voxels changed");
}

struct WeightsArgs {
  std::string stack, out;
  int view{0};
  std::int64_t step{0};
  std::int64_t total_steps{0};
  double max_weight{2.0};
  double max_depth{50.0};
  std::vector<int> foreground;
  int downsample{1};
};

void weights(const WeightsArgs& a, const Globals& g) {
  ReweighConfig config;
  config.max_weight = a.max_weight;
  config.total_steps = a.total_steps;
  config.max_depth = a.max_depth;
  if (!a.foreground.empty()) {
    config.foreground.clear();
    for (int id : a.foreground) {
      if (!is_valid_label_id(id)) throw ConfigError("--foreground holds invalid label id " + std::to_string(id));
      config.foreground.insert(static_cast<Label>(id));
    }
  }
  config.validate();
  if (a.step < 0) throw ConfigError("--step must be non-negative");
  if (a.downsample < 1) throw ConfigError("--downsample must be at least 1");
  const auto stack = load_stack(a.stack);
  check_view(stack, a.view);
  auto map = build_weight_map(composite_semantic(stack, a.view, g.threads),
                              composite_depth_meters(stack, a.view, g.threads), static_cast<double>(a.step), config,
                              g.threads);
  if (a.downsample > 1) map = downsample_weight_map(map, a.downsample);
  write_file(a.out, encode_weight_map(map));
  note(g, "wrote " + a.out + " (" + std::to_string(map.values.cols()) + "x" + std::to_string(map.values.rows()) +
              ")");
}

struct CbgsArgs {
  std::string index, out, report, weighting{"presence"};
  std::size_t target_len{0};
  std::uint64_t seed{0};
};

void cbgs(const CbgsArgs& a, const Globals& g) {
  if (a.target_len == 0) throw ConfigError("--target-len must be positive");
  const auto base = std::filesystem::path(a.index).parent_path();
  const auto index = decode_index(
      read_file(a.index),
      [&](const std::string& p) {
        const std::filesystem::path path(p);
        return load_grid((path.is_absolute() ? path : base / path).string());
      },
      g.threads);
  const auto weighting = a.weighting == "voxel-count" ? GroupWeighting::VoxelCount : GroupWeighting::Presence;
  const auto plan = build_sampling_plan(index, a.target_len, a.seed, weighting);
  write_file(a.out, encode_plan(plan));
  const auto report = balance_report(plan, index);
  if (!a.report.empty()) write_file(a.report, encode_balance_report(report));
  std::ostringstream msg;
  msg << "plan of " << plan.entries.size() << " entries, balance ratio " << report.ratio_before << " -> "
      << report.ratio_after;
  note(g, msg.str());
}

struct GradcheckArgs {
  std::uint64_t seed{0};
  int cases{20};
  double tol{1e-4};
  double step{1e-5};
};

int gradcheck(const GradcheckArgs& a) {
  if (a.cases < 1) throw ConfigError("--cases must be at least 1");
  if (!(a.tol > 0) || !(a.step > 0)) throw ConfigError("--tol and --step must be positive");
  bool ok = true;
  std::cerr << std::left << std::setw(16) << "op" << std::setw(8) << "cases" << std::setw(14) << "max_rel_err"
            << std::setw(12) << "worst_seed" << "status\n";
  for (ToyOp op : kAllToyOps) {
    double worst = 0.0;
    std::uint64_t worst_seed = a.seed;
    for (int c = 0; c < a.cases; ++c) {
      const std::uint64_t s = a.seed + static_cast<std::uint64_t>(c);
      const auto r = gradcheck_op(op, s, a.step);
      if (!(r.max_rel_error <= worst) || c == 0) {
        worst = r.max_rel_error;
        worst_seed = s;
      }
    }
    const bool pass = worst <= a.tol;
    ok = ok && pass;
    std::ostringstream err;
    err << std::scientific << std::setprecision(3) << worst;
    std::cerr << std::left << std::setw(16) << to_string(op) << std::setw(8) << a.cases << std::setw(14) << err.str()
              << std::setw(12) << worst_seed << (pass ? "ok" : "FAIL") << '\n';
  }
  return ok ? kOk : kCheckFailure;
}

struct SynthArgs {
  std::string out, rig_out, recipe;
  std::uint64_t seed{0};
};

void synth(const SynthArgs& a, const Globals& g) {
  SceneRecipe recipe = a.recipe.empty() ? SceneRecipe{} : decode_recipe(read_file(a.recipe));
  recipe.seed = a.seed;
  recipe.validate();
  std::string rig_out = a.rig_out;
  if (rig_out.empty()) rig_out = std::filesystem::path(a.out).replace_extension(".rig.json").string();
  const auto scene = synth_scene(recipe);
  write_file(a.out, encode_grid(scene.grid));
  write_file(rig_out, encode_rig(scene.rig));
  note(g, "wrote " + a.out + " with " + std::to_string(scene.objects.size()) + " objects and " + rig_out);
}

struct StatsArgs {
  std::string grid, stack, out;
};

void stats(const StatsArgs& a, const Globals& g) {
  if (a.grid.empty() == a.stack.empty()) throw ConfigError("stats needs exactly one of --grid and --stack");
  const std::string text =
      a.grid.empty() ? encode_stats(stack_stats(load_stack(a.stack))) : encode_stats(grid_stats(load_grid(a.grid)));
  write_file(a.out, text);
  note(g, "wrote " + a.out);
}

const CLI::App* deepest(const CLI::App& app) {
  const CLI::App* at = &app;
  while (!at->get_subcommands().empty()) at = at->get_subcommands().front();
  return at;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Semantic multi-plane image toolkit for occupancy-conditioned driving-scene synthesis.", "mpi-forge"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with option values; command-line flags take precedence");
  app.require_subcommand(1, 1);

  Globals g;
  app.add_option("--threads", g.threads, "Worker threads (env MPI_FORGE_THREADS)")
      ->envname("MPI_FORGE_THREADS")
      ->check(CLI::Range(1, 4096));
  app.add_flag("-v,--verbose", g.verbosity, "Progress notes on stderr; repeat for more");

  BuildArgs ba;
  auto* b = app.add_subcommand("build", "Build a semantic MPI stack from an occupancy grid and a rig");
  b->add_option("--grid", ba.grid, "OCCV1 occupancy grid")->required();
  b->add_option("--rig", ba.rig, "Rig JSON")->required();
  b->add_option("--planes", ba.planes, "Number of depth planes")->capture_default_str();
  b->add_option("--dmin", ba.d_min, "Nearest plane depth, meters")->capture_default_str();
  b->add_option("--dmax", ba.d_max, "Far depth bound, meters")->capture_default_str();
  b->add_option("--size", ba.size, "Output WIDTHxHEIGHT")->capture_default_str();
  b->add_option("--out", ba.out, "Output MPIT stack")->required();

  CompositeArgs ca;
  auto* c = app.add_subcommand("composite", "Render first-hit semantic and depth images of one view");
  c->add_option("--stack", ca.stack, "MPIT stack")->required();
  c->add_option("--view", ca.view, "View index")->capture_default_str();
  c->add_option("--semantic", ca.semantic, "Output semantic image (PPM)");
  c->add_option("--depth", ca.depth, "Output depth image (PGM)");
  c->add_option("--palette", ca.palette, "Palette JSON (default: built-in)");

  EditArgs ea;
  auto* e = app.add_subcommand("edit", "Apply an edit script to an occupancy grid");
  e->add_option("--grid", ea.grid, "Input OCCV1 grid")->required();
  e->add_option("--script", ea.script, "Edit script JSON")->required();
  e->add_option("--out", ea.out, "Output OCCV1 grid")->required();
  e->add_option("--report", ea.report, "Diff report JSON");

  WeightsArgs wa;
  auto* w = app.add_subcommand("weights", "Compute the per-pixel loss weight map of one view");
  w->add_option("--stack", wa.stack, "MPIT stack")->required();
  w->add_option("--view", wa.view, "View index")->capture_default_str();
  w->add_option("--step", wa.step, "Training step")->required();
  w->add_option("--total-steps", wa.total_steps, "Total training steps")->required();
  w->add_option("--max-weight", wa.max_weight, "Maximum weight m")->capture_default_str();
  w->add_option("--max-depth", wa.max_depth, "Depth at which the depth factor saturates, meters")
      ->capture_default_str();
  w->add_option("--foreground", wa.foreground, "Foreground label ids (default 1..10)");
  w->add_option("--downsample", wa.downsample, "Block-mean pooling factor")->capture_default_str();
  w->add_option("--out", wa.out, "Output WMAP file")->required();

  CbgsArgs cba;
  auto* cb = app.add_subcommand("cbgs", "Build a class-balanced sampling plan");
  cb->add_option("--index", cba.index, "Dataset index JSON")->required();
  cb->add_option("--target-len", cba.target_len, "Approximate plan length")->required();
  cb->add_option("--seed", cba.seed, "Sampling seed")->required();
  cb->add_option("--weighting", cba.weighting, "Within-group weighting")
      ->check(CLI::IsMember({"presence", "voxel-count"}))
      ->capture_default_str();
  cb->add_option("--out", cba.out, "Output plan JSON")->required();
  cb->add_option("--report", cba.report, "Balance report JSON");

  GradcheckArgs ga;
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference checks of the toy conditioning ops");
  gc->add_option("--seed", ga.seed, "First case seed")->capture_default_str();
  gc->add_option("--cases", ga.cases, "Cases per op")->capture_default_str();
  gc->add_option("--tol", ga.tol, "Maximum relative error")->capture_default_str();
  gc->add_option("--step", ga.step, "Central-difference step")->capture_default_str();

  SynthArgs sa;
  auto* sy = app.add_subcommand("synth", "Generate a procedural occupancy scene and its camera rig");
  sy->add_option("--seed", sa.seed, "Scene seed")->required();
  sy->add_option("--out", sa.out, "Output OCCV1 grid")->required();
  sy->add_option("--rig-out", sa.rig_out, "Output rig JSON (default: <out stem>.rig.json)");
  sy->add_option("--recipe", sa.recipe, "Scene recipe JSON");

  StatsArgs sta;
  auto* st = app.add_subcommand("stats", "Summarize a grid or a stack as JSON");
  auto* sg = st->add_option("--grid", sta.grid, "OCCV1 grid");
  auto* ss = st->add_option("--stack", sta.stack, "MPIT stack");
  sg->excludes(ss);
  st->add_option("--out", sta.out, "Output JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForVersion& err) {
    return app.exit(err);
  } catch (const CLI::FileError& err) {
    std::cerr << "mpi-forge: " << err.what() << '\n';
    return kIoError;
  } catch (const CLI::ParseError& err) {
    std::cerr << "mpi-forge: " << err.what() << "\n\n" << deepest(app)->help();
    return kValidationError;
  }

  try {
    if (b->parsed()) build(ba, g);
    else if (c->parsed()) composite(ca, g);
    else if (e->parsed()) edit(ea, g);
    else if (w->parsed()) weights(wa, g);
    else if (cb->parsed()) cbgs(cba, g);
    else if (gc->parsed()) return gradcheck(ga);
    else if (sy->parsed()) synth(sa, g);
    else if (st->parsed()) stats(sta, g);
    return kOk;
  } catch (const ScriptError& err) {
    std::cerr << "mpi-forge: invalid edit script\n";
    for (const auto& d : err.diagnostics()) std::cerr << "  " << to_string(d) << '\n';
    return kValidationError;
  } catch (const ConfigError& err) {
    std::cerr << "mpi-forge: " << err.what() << '\n';
    return kValidationError;
  } catch (const FormatError& err) {
    std::cerr << "mpi-forge: " << err.what() << '\n';
    return kIoError;
  } catch (const IoError& err) {
    std::cerr << "mpi-forge: " << err.what() << '\n';
    return kIoError;
  } catch (const std::exception& err) {
    std::cerr << "mpi-forge: unexpected error: " << err.what() << '\n';
    return kIoError;
  }
}

}  // namespace mpi_forge::cli
