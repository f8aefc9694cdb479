// Copyright 2026 The nnUZoo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nnuzoo/cli/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nnuzoo/eval/report.hpp"
#include "nnuzoo/models/checkpoint.hpp"
#include "nnuzoo/tensor/parallel.hpp"
#include "nnuzoo/train/trainer.hpp"

#ifndef NNUZOO_VERSION
#define NNUZOO_VERSION "0.0.0"
#endif

namespace nnuzoo::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string version() { return NNUZOO_VERSION; }

namespace {

// ---------------------------------------------------------------- helpers

std::string millions(double m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, m >= 10 ? "%.1fM" : "%.2fM", m);
  return buf;
}

std::string percent(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.1f%%", 100 * (ratio - 1));
  return buf;
}

void check_preset(const std::string& p) {
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), p) == names.end()) {
    std::string all;
    for (const auto& n : names) all += (all.empty() ? "" : ", ") + n;
    throw ValueError("unknown preset '" + p + "' (expected one of " + all + ")");
  }
}

void write_json(const std::string& path, const json& j) {
  std::ofstream o(path);
  if (!o) throw DataError("cannot write '" + path + "'");
  o << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("'" + path + "' does not parse: " + e.what());
  }
}

/// Written before any result. `argv` is the full subcommand line so the run
/// can be replayed.
void write_manifest(const std::string& dir, const std::string& command, const std::vector<std::string>& argv,
                    const json& config, std::uint64_t seed, const json& extra = json::object()) {
  fs::create_directories(dir);
  json m{{"command", command},     {"argv", argv},   {"config", config},
         {"seed", seed},           {"version", version()},
         {"output_dir", dir}};
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  write_json((fs::path(dir) / kRunManifest).string(), m);
}

json protocol_json(const train::TrainConfig& tc, double split_ratio, std::uint64_t split_seed,
                   const std::vector<std::string>& val_ids) {
  return {{"split", {{"ratio", split_ratio}, {"seed", split_seed}, {"val_ids", val_ids}}},
          {"loss", {{"w_dice", tc.loss.dice}, {"w_ce", tc.loss.ce}}},
          {"augmentation",
           {{"enabled", tc.augment},
            {"flip_prob", tc.augment_options.flip_prob},
            {"rotate_prob", tc.augment_options.rotate_prob}}},
          {"optimizer",
           {{"kind", train::optimizer_name(tc.optimizer.kind)},
            {"lr", tc.optimizer.lr},
            {"beta1", tc.optimizer.beta1},
            {"beta2", tc.optimizer.beta2},
            {"momentum", tc.optimizer.momentum},
            {"nesterov", tc.optimizer.nesterov}}},
          {"lr_schedule", {{"kind", "poly"}, {"exponent", tc.poly_exponent}}},
          {"epochs", tc.epochs},
          {"seed", tc.seed}};
}

data::Dataset prepare(const data::Dataset& ds, const ModelConfig& cfg) {
  return ds.map([&](const data::SegmentationSample& s) { return data::preprocess(s, cfg.height, cfg.width); });
}

std::string load_manifest_path(const std::string& data_dir) {
  const fs::path p(data_dir);
  return fs::is_directory(p) ? (p / "manifest.json").string() : data_dir;
}

void apply_threads(int threads) {
  if (threads < 0) throw ValueError("--threads must be >= 0");
  if (threads > 0) set_num_threads(threads);
}

// ---------------------------------------------------------------- options

struct TrainFlags {
  std::string arch, data, preset = "SynthShapes", out;
  std::int64_t epochs = 20, batch = 0;
  std::uint64_t seed = 0;
  double width = 1.0, lr = 1e-3, w_dice = 1.0, w_ce = 1.0, split = 0.8;
  std::string optimizer = "adam";
  bool no_augment = false;
  std::int64_t checkpoint_every = 0;
};

void add_train_protocol(CLI::App* s, TrainFlags& f) {
  s->add_option("--epochs", f.epochs, "Training epochs");
  s->add_option("--seed", f.seed, "Seed for weights, split, batch order and augmentation");
  s->add_option("--width", f.width, "Channel width multiplier");
  s->add_option("--batch", f.batch, "Batch size (0: preset default)");
  s->add_option("--optimizer", f.optimizer, "adam or sgd")->check(CLI::IsMember({"adam", "sgd"}));
  s->add_option("--lr", f.lr, "Initial learning rate");
  s->add_option("--w-dice", f.w_dice, "Dice loss weight");
  s->add_option("--w-ce", f.w_ce, "Cross-entropy loss weight");
  s->add_option("--split", f.split, "Training fraction of the seeded split");
  s->add_flag("--no-augment", f.no_augment, "Disable flips and rotations");
}

train::TrainConfig train_config(const TrainFlags& f, const ModelConfig& mc) {
  train::TrainConfig tc;
  tc.epochs = f.epochs;
  tc.batch_size = f.batch > 0 ? f.batch : mc.batch_size;
  tc.seed = f.seed;
  tc.optimizer.kind = train::optimizer_from_name(f.optimizer);
  if (tc.optimizer.kind == train::OptimizerConfig::Kind::sgd) tc.optimizer = train::OptimizerConfig::sgd(f.lr);
  tc.optimizer.lr = f.lr;
  tc.loss = {f.w_dice, f.w_ce};
  tc.augment = !f.no_augment;
  tc.checkpoint_every = f.checkpoint_every;
  tc.validate();
  return tc;
}

ModelConfig model_config(const std::string& arch, const std::string& preset, double width, std::uint64_t seed) {
  check_preset(preset);
  auto c = preset_config(arch_from_name(arch), preset, width);
  c.seed = seed;
  c.validate();
  return c;
}

struct TrainedRun {
  train::TrainResult result;
  eval::CaseDice cases;
  json protocol;
};

/// Split, train and evaluate on the validation part; writes into `out`.
TrainedRun train_and_eval(Model& model, const data::Dataset& prepared, const TrainFlags& f,
                          const train::TrainConfig& base, const std::string& out, std::ostream& log) {
  auto tc = base;
  tc.out_dir = out;
  const auto [tr, va] = data::split_dataset(prepared, f.split, f.seed);
  std::vector<std::string> val_ids;
  for (std::size_t i = 0; i < va.size(); ++i) val_ids.push_back(va.id(i));
  TrainedRun run;
  run.protocol = protocol_json(tc, f.split, f.seed, val_ids);
  run.result = train::train_loop(model, tr, va, tc, [&](const train::EpochRecord& r) {
    log << "epoch " << r.epoch << "  lr " << eval::format_double(r.lr) << "  train_loss " << r.train_loss
        << "  val_loss " << r.val_loss << "  val_dice " << r.val_dice << '\n';
  });
  auto best = load_model((fs::path(out) / "best.ckpt").string());
  const auto ev = train::evaluate(*best, va, tc.batch_size, tc.loss);
  run.cases = {arch_name(model.config().arch), model.config().preset, ev.case_ids, ev.case_dice};
  return run;
}

// ---------------------------------------------------------------- commands

int cmd_list(std::ostream& out) {
  out << "architectures:\n";
  for (auto a : all_architectures())
    out << "  " << arch_name(a) << (is_nested(a) ? "  (nested)" : "") << '\n';
  out << "presets:\n";
  for (const auto& p : preset_names()) {
    const auto c = preset_config(ArchitectureId::U2NetS, p);
    out << "  " << p << "  " << c.height << "x" << c.width << ", " << c.num_classes << " classes, " << c.in_channels
        << " channel(s), batch " << c.batch_size << '\n';
  }
  return kExitOk;
}

int cmd_params(const std::string& arch, const std::string& preset, double width, std::ostream& out) {
  const auto c = model_config(arch, preset, width, 0);
  const auto n = count_params(c);
  const double m = static_cast<double>(n) / 1e6;
  out << arch_name(c.arch) << " @ " << preset << ": " << n << " parameters (" << millions(m) << ")";
  if (const auto t = target_params_millions(c.arch, preset); t && width == 1.0)
    out << ", reference " << millions(*t) << ", delta " << percent(m / *t);
  out << '\n';
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"nnuzoo: nested U-Net segmentation zoo", "nnuzoo"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  int threads = 0;
  auto threads_opt = [&](CLI::App* s) {
    s->add_option("--threads", threads, "Worker threads (0: NNUZOO_THREADS or 1)");
  };

  // list
  auto* list = app.add_subcommand("list", "List architectures and dataset presets");
  threads_opt(list);

  // params
  std::string p_arch, p_preset = "AbdomenCT";
  double p_width = 1.0;
  auto* params = app.add_subcommand("params", "Parameter count versus the reference table");
  params->add_option("arch", p_arch, "Architecture name")->required();
  params->add_option("--preset", p_preset, "Dataset preset");
  params->add_option("--width", p_width, "Channel width multiplier");
  threads_opt(params);

  // build
  std::string b_arch, b_preset = "SynthShapes", b_out;
  double b_width = 1.0;
  std::uint64_t b_seed = 0;
  auto* build = app.add_subcommand("build", "Build a freshly initialized model and save its checkpoint");
  build->add_option("arch", b_arch, "Architecture name")->required();
  build->add_option("--preset", b_preset, "Dataset preset");
  build->add_option("--width", b_width, "Channel width multiplier");
  build->add_option("--seed", b_seed, "Initialization seed");
  build->add_option("--out", b_out, "Checkpoint path")->required();
  threads_opt(build);

  // synth
  std::string s_spec, s_preset = "SynthShapes", s_out;
  std::size_t s_count = 120;
  std::uint64_t s_seed = 0;
  double s_noise = -1;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic shapes dataset in NZT1 format");
  synth->add_option("--spec", s_spec, "JSON file overriding generator fields (height, width, num_classes, ...)");
  synth->add_option("--preset", s_preset, "Preset providing the default generator fields");
  synth->add_option("--noise", s_noise, "Gaussian noise sigma (negative: keep preset or spec value)");
  synth->add_option("--count", s_count, "Number of samples");
  synth->add_option("--seed", s_seed, "Generator seed");
  synth->add_option("--out", s_out, "Output directory")->required();
  threads_opt(synth);

  // train
  TrainFlags tf;
  auto* trn = app.add_subcommand("train", "Train one architecture on a dataset directory");
  trn->add_option("arch", tf.arch, "Architecture name")->required();
  trn->add_option("--data", tf.data, "Dataset directory or manifest.json")->required();
  trn->add_option("--preset", tf.preset, "Dataset preset (geometry and class count)");
  trn->add_option("--out", tf.out, "Output directory")->required();
  add_train_protocol(trn, tf);
  trn->add_option("--checkpoint-every", tf.checkpoint_every, "Extra checkpoint every N epochs (0: off)");
  threads_opt(trn);

  // eval
  std::string e_ckpt, e_data, e_report, e_format = "csv";
  auto* evl = app.add_subcommand("eval", "Per-case dice of a checkpoint on a dataset");
  evl->add_option("--ckpt", e_ckpt, "Checkpoint file")->required();
  evl->add_option("--data", e_data, "Dataset directory or manifest.json")->required();
  evl->add_option("--report", e_report, "Report directory")->required();
  evl->add_option("--format", e_format, "csv or markdown")->check(CLI::IsMember({"csv", "markdown"}));
  threads_opt(evl);

  // bench
  std::string k_archs = "U2NetS,SS2D2NetS", k_preset = "SynthShapes", k_out, k_data, k_format = "csv";
  int k_reps = 5, k_warmup = 1;
  std::size_t k_count = 40;
  double k_noise = 0.0;
  TrainFlags kf;
  kf.epochs = 0;
  auto* bench = app.add_subcommand("bench", "Parameter, timing and (optionally) accuracy comparison");
  bench->add_option("--archs", k_archs, "Comma-separated architectures, or 'all'");
  bench->add_option("--preset", k_preset, "Dataset preset (geometry)");
  bench->add_option("--reps", k_reps, "Timed repetitions after warmup (>= 3)");
  bench->add_option("--warmup", k_warmup, "Untimed warmup repetitions");
  bench->add_option("--data", k_data, "Dataset for training runs (default: synthetic)");
  bench->add_option("--count", k_count, "Synthetic sample count when --data is not given");
  bench->add_option("--noise", k_noise, "Synthetic noise sigma when --data is not given");
  bench->add_option("--format", k_format, "Report format: csv or markdown")->check(CLI::IsMember({"csv", "markdown"}));
  bench->add_option("--out", k_out, "Output directory")->required();
  add_train_protocol(bench, kf);
  threads_opt(bench);

  // compare
  std::vector<std::string> c_runs;
  std::string c_out, c_zero = "wilcox";
  auto* cmp = app.add_subcommand("compare", "Pairwise Wilcoxon signed-rank tests on per-case dice files");
  cmp->add_option("--runs", c_runs, "Per-case dice CSV files (case_id,dice)")->required()->expected(2, -1);
  cmp->add_option("--zero-method", c_zero, "wilcox or pratt")->check(CLI::IsMember({"wilcox", "pratt"}));
  cmp->add_option("--out", c_out, "Output directory for pvalues.csv (optional)");
  threads_opt(cmp);

  // rerun
  std::string r_manifest, r_out;
  auto* rerun = app.add_subcommand("rerun", "Replay the command recorded in a run manifest");
  rerun->add_option("--manifest", r_manifest, "run.json of a previous run")->required();
  rerun->add_option("--out", r_out, "Replacement output location (default: the recorded one)");

  try {
    std::vector<std::string> rev(argv.rbegin(), argv.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    apply_threads(threads);
    if (*list) return cmd_list(out);
    if (*params) return cmd_params(p_arch, p_preset, p_width, out);

    if (*build) {
      const auto c = model_config(b_arch, b_preset, b_width, b_seed);
      const auto dir = fs::path(b_out).parent_path().string();
      write_manifest(dir.empty() ? "." : dir, "build", argv, json::parse(config_to_json(c)), b_seed);
      auto m = build_model(c);
      save_checkpoint(b_out, *m);
      out << "wrote " << b_out << " (" << arch_name(c.arch) << ", " << count_params(*m) << " parameters)\n";
      return kExitOk;
    }

    if (*synth) {
      check_preset(s_preset);
      auto spec = data::preset_synth_spec(s_preset);
      if (!s_spec.empty()) {
        const auto j = read_json(s_spec);
        try {
          spec.height = j.value("height", spec.height);
          spec.width = j.value("width", spec.width);
          spec.num_classes = j.value("num_classes", spec.num_classes);
          spec.channels = j.value("channels", spec.channels);
          spec.shapes_per_image = j.value("shapes_per_image", spec.shapes_per_image);
          spec.intensity_separation = j.value("intensity_separation", spec.intensity_separation);
          spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
        } catch (const json::exception& e) {
          throw DataError("'" + s_spec + "': " + e.what());
        }
      }
      if (s_noise >= 0) spec.noise_sigma = s_noise;
      spec.validate();
      const json resolved{{"height", spec.height},
                          {"width", spec.width},
                          {"num_classes", spec.num_classes},
                          {"channels", spec.channels},
                          {"shapes_per_image", spec.shapes_per_image},
                          {"intensity_separation", spec.intensity_separation},
                          {"noise_sigma", spec.noise_sigma},
                          {"count", s_count},
                          {"preset", s_preset}};
      write_manifest(s_out, "synth", argv, resolved, s_seed);
      const auto path = data::write_dataset(data::generate_synthetic(spec, s_count, s_seed, s_preset), s_out);
      out << "wrote " << s_count << " samples to " << path << '\n';
      return kExitOk;
    }

    if (*trn) {
      auto mc = model_config(tf.arch, tf.preset, tf.width, tf.seed);
      const auto tc = train_config(tf, mc);
      const auto ds = data::load_dataset(load_manifest_path(tf.data));
      const auto prepared = prepare(ds, mc);
      auto split = data::split_indices(prepared.size(), tf.split, tf.seed);
      std::vector<std::string> val_ids;
      for (auto i : split.val) val_ids.push_back(prepared.id(i));
      write_manifest(tf.out, "train", argv, {{"model", json::parse(config_to_json(mc))}, {"data", tf.data}}, tf.seed,
                     {{"protocol", protocol_json([&] { auto t = tc; t.out_dir = tf.out; return t; }(), tf.split,
                                                 tf.seed, val_ids)}});
      auto model = build_model(mc);
      const auto run = train_and_eval(*model, prepared, tf, tc, tf.out, out);
      eval::write_case_dice_csv((fs::path(tf.out) / "val_dice.csv").string(), run.cases);
      const auto& last = run.result.history.back();
      out << "final val_dice " << last.val_dice << "  best " << run.result.best_val_dice << " (epoch "
          << run.result.best_epoch << ")\n";
      return kExitOk;
    }

    if (*evl) {
      const auto fmt = eval::report_format_from_name(e_format);
      auto model = load_model(e_ckpt);
      const auto& mc = model->config();
      write_manifest(e_report, "eval", argv, {{"model", json::parse(config_to_json(mc))}, {"data", e_data}}, mc.seed);
      const auto ds = data::load_dataset(load_manifest_path(e_data));
      if (ds.num_classes() != mc.num_classes)
        throw DataError("dataset has " + std::to_string(ds.num_classes()) + " classes, checkpoint predicts " +
                        std::to_string(mc.num_classes));
      const auto ev = train::evaluate(*model, prepare(ds, mc), mc.batch_size);
      eval::CaseDice cases{arch_name(mc.arch), mc.preset, ev.case_ids, ev.case_dice};
      fs::create_directories(fs::path(e_report) / "cases");
      eval::write_case_dice_csv((fs::path(e_report) / "cases" / (cases.label + ".csv")).string(), cases);
      eval::BenchReport rep;
      rep.dice.push_back(cases);
      eval::emit_report(rep, e_report, fmt);
      out << arch_name(mc.arch) << " mean dice " << ev.mean_dice << " over " << ev.case_dice.size() << " cases\n";
      return kExitOk;
    }

    if (*bench) {
      check_preset(k_preset);
      const auto fmt = eval::report_format_from_name(k_format);
      std::vector<ArchitectureId> archs;
      if (k_archs == "all") archs = all_architectures();
      else {
        std::stringstream ss(k_archs);
        std::string a;
        while (std::getline(ss, a, ','))
          if (!a.empty()) archs.push_back(arch_from_name(a));
      }
      if (archs.empty()) throw ValueError("--archs names no architecture");
      kf.preset = k_preset;
      write_manifest(k_out, "bench", argv,
                     {{"archs", k_archs}, {"preset", k_preset}, {"width", kf.width}, {"reps", k_reps},
                      {"warmup", k_warmup}, {"epochs", kf.epochs}},
                     kf.seed);

      data::Dataset source;
      if (kf.epochs > 0) {
        if (!k_data.empty()) source = data::load_dataset(load_manifest_path(k_data));
        else {
          auto spec = data::preset_synth_spec(k_preset);
          spec.noise_sigma = k_noise;
          source = data::generate_synthetic(spec, k_count, kf.seed, k_preset);
        }
      }

      eval::BenchReport rep;
      for (auto a : archs) {
        auto mc = model_config(arch_name(a), k_preset, kf.width, kf.seed);
        const auto tc = train_config(kf.epochs > 0 ? kf : [&] { auto g = kf; g.epochs = 1; return g; }(), mc);
        const auto dir = (fs::path(k_out) / arch_name(a)).string();
        json protocol = nullptr;
        if (kf.epochs > 0) {
          const auto prepared = prepare(source, mc);
          const auto split = data::split_indices(prepared.size(), kf.split, kf.seed);
          std::vector<std::string> val_ids;
          for (auto i : split.val) val_ids.push_back(prepared.id(i));
          protocol = protocol_json(tc, kf.split, kf.seed, val_ids);
        }
        write_manifest(dir, "bench", argv, {{"model", json::parse(config_to_json(mc))}}, kf.seed,
                       {{"protocol", protocol}});
        rep.params.push_back({a, k_preset, count_params(mc), target_params_millions(a, k_preset)});
        eval::BenchOptions bo;
        bo.reps = k_reps;
        bo.warmup = k_warmup;
        bo.batch = tc.batch_size;
        bo.seed = kf.seed;
        rep.timings.push_back(eval::benchmark_model(mc, bo));
        out << arch_name(a) << ": " << rep.params.back().params << " parameters, step "
            << eval::format_double(rep.timings.back().step.median_ms) << " ms\n";
        if (kf.epochs > 0) {
          auto model = build_model(mc);
          const auto run = train_and_eval(*model, prepare(source, mc), kf, tc, dir, out);
          eval::write_case_dice_csv((fs::path(dir) / "val_dice.csv").string(), run.cases);
          rep.dice.push_back(run.cases);
        }
      }
      if (rep.dice.size() >= 2) rep.pvalues = eval::pairwise_wilcoxon(rep.dice);
      for (const auto& f : eval::emit_report(rep, k_out, fmt)) out << "wrote " << f << '\n';
      if (fmt != eval::ReportFormat::markdown) eval::emit_report(rep, k_out, eval::ReportFormat::markdown);
      return kExitOk;
    }

    if (*cmp) {
      std::vector<eval::CaseDice> runs;
      for (const auto& r : c_runs) runs.push_back(eval::read_case_dice_csv(r));
      eval::WilcoxonOptions wo;
      wo.zero_method = c_zero == "pratt" ? eval::ZeroMethod::pratt : eval::ZeroMethod::wilcox;
      const auto t = eval::pairwise_wilcoxon(runs, wo);
      if (!c_out.empty()) {
        write_manifest(c_out, "compare", argv, {{"runs", c_runs}, {"zero_method", c_zero}}, 0);
        eval::BenchReport rep;
        rep.pvalues = t;
        eval::emit_report(rep, c_out, eval::ReportFormat::csv);
      }
      for (std::size_t i = 0; i < t.labels.size(); ++i)
        for (std::size_t j = i + 1; j < t.labels.size(); ++j)
          out << t.labels[i] << " vs " << t.labels[j] << ": "
              << (t.p[i][j] ? "p = " + eval::format_double(*t.p[i][j]) : std::string("undefined")) << '\n';
      if (!t.undefined.empty()) {
        for (const auto& [a, b] : t.undefined)
          err << "error: " << a << " vs " << b << ": every paired difference is zero; the test is undefined\n";
        return kExitUndefined;
      }
      return kExitOk;
    }

    if (*rerun) {
      const auto m = read_json(r_manifest);
      std::vector<std::string> args;
      try {
        args = m.at("argv").get<std::vector<std::string>>();
      } catch (const json::exception& e) {
        throw DataError("'" + r_manifest + "' is not a run manifest: " + e.what());
      }
      if (!args.empty() && args[0] == "rerun") throw ValueError("a rerun manifest cannot be replayed");
      if (!r_out.empty()) {
        bool replaced = false;
        for (std::size_t i = 0; i + 1 < args.size(); ++i)
          if (args[i] == "--out" || args[i] == "--report") {
            args[i + 1] = r_out;
            replaced = true;
          }
        if (!replaced) throw ValueError("the recorded command has no output location to replace");
      }
      return run_command(args, out, err);
    }
  } catch (const UndefinedTestError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUndefined;
  } catch (const ValueError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

int run_command(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_command(args, std::cout, std::cerr);
}

}  // namespace nnuzoo::cli
