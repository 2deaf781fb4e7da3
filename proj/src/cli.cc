/* Copyright 2026 The StyleForge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "styleforge/cli.h"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "styleforge/gradcheck.h"
#include "styleforge/vgg19.h"

namespace styleforge::cli {
namespace {

double parse_decimal(std::string_view text, const std::string& what) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw UsageError(what + ": '" + std::string(text) + "' is not a finite number");
  }
  return value;
}

std::array<double, 3> parse_triple(const std::string& text, const char* flag) {
  std::array<double, 3> out{};
  std::size_t start = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t comma = text.find(',', start);
    const bool last = i == 2;
    if (last != (comma == std::string::npos)) {
      throw UsageError(std::string(flag) + " expects three comma-separated values, got '" +
                       text + "'");
    }
    const std::string_view part =
        std::string_view(text).substr(start, last ? std::string::npos : comma - start);
    out[i] = parse_decimal(part, flag);
    start = comma + 1;
  }
  return out;
}

std::string join3(const std::array<double, 3>& v) {
  return fmt::format("{},{},{}", v[0], v[1], v[2]);
}

// Quotes an argument only when the shell would split it.
std::string shell_arg(const std::string& s) {
  if (!s.empty() && s.find_first_of(" \t\n'\"\\$`") == std::string::npos) return s;
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') {
      q += "'\\''";
    } else {
      q += c;
    }
  }
  return q + "'";
}

std::string step_file(std::size_t step) { return fmt::format("step_{:06d}.png", step); }

}  // namespace

StyleArg parse_style_arg(std::string_view text) {
  if (text.empty()) throw UsageError("--style: empty argument");
  const std::size_t colon = text.rfind(':');
  if (colon == std::string_view::npos) return {std::filesystem::path(text), std::nullopt};
  const std::string_view path = text.substr(0, colon);
  const std::string_view weight = text.substr(colon + 1);
  if (path.empty()) throw UsageError("--style: missing path in '" + std::string(text) + "'");
  const double w = parse_decimal(weight, "--style weight");
  if (!(w > 0.0)) {
    throw UsageError("--style weight must be positive, got '" + std::string(weight) + "'");
  }
  return {std::filesystem::path(path), w};
}

CliInvocation parse_invocation(const std::vector<std::string>& args) {
  CliInvocation inv;
  RunConfig& run = inv.run;
  CLI::App app{"Multi-style neural style transfer with a VGG19 feature extractor",
               args.empty() ? "styleforge" : args.front()};

  std::string content, weights, out = inv.out_path.string(), loss_csv, snapshot_dir;
  std::vector<std::string> styles, layer_weights;
  std::string mean = join3(inv.norm.mean), std = join3(inv.norm.std);
  std::string mode = to_string(run.mode);
  std::size_t size = inv.norm.max_dim;

  app.add_option("--content", content, "Content image (PNG or JPEG)");
  app.add_option("--style", styles, "Style image, repeatable: path[:blend_weight]");
  app.add_option("--weights", weights, "VGG19 weights in VGGW format");
  app.add_option("--out", out, "Output PNG")->capture_default_str();
  app.add_option("--steps", run.steps, "Optimizer steps per run")->capture_default_str();
  app.add_option("--lr", run.lr, "Adam learning rate")->capture_default_str();
  app.add_option("--alpha", run.alpha, "Content loss weight")->capture_default_str();
  app.add_option("--beta", run.beta, "Style loss weight")->capture_default_str();
  app.add_option("--layer-weight", layer_weights,
                 "Style layer weight override, repeatable: name=value");
  app.add_option("--size", size, "Longest image side in pixels")->capture_default_str();
  app.add_option("--mean", mean, "Normalization mean r,g,b")->capture_default_str();
  app.add_option("--std", std, "Normalization std r,g,b")->capture_default_str();
  app.add_option("--mode", mode, "Multi-style mode")
      ->check(CLI::IsMember({"sequential", "blended"}))
      ->capture_default_str();
  app.add_option("--snapshot-every", run.snapshot_every, "Snapshot interval in steps")
      ->capture_default_str();
  app.add_option("--snapshot-dir", snapshot_dir,
                 "Snapshot directory (default: <out stem>_snapshots)");
  app.add_option("--loss-csv", loss_csv, "Loss CSV path (default: <out stem>_losses.csv)");
  app.add_option("--seed", run.seed, "Seed for the gradient self-test")->capture_default_str();
  app.add_flag("--check-grad", inv.check_grad,
               "Run the finite-difference gradient self-test and exit");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (inv.check_grad) return inv;

  if (content.empty()) throw UsageError("--content is required");
  if (styles.empty()) throw UsageError("at least one --style is required");
  if (weights.empty()) throw UsageError("--weights is required");
  inv.content_path = content;
  inv.weights_path = weights;
  inv.out_path = out;

  double total = 0.0;
  for (const auto& s : styles) {
    inv.styles.push_back(parse_style_arg(s));
    total += inv.styles.back().weight.value_or(1.0);
  }
  for (const auto& s : inv.styles) inv.blend.push_back(s.weight.value_or(1.0) / total);

  for (const auto& lw : layer_weights) {
    const std::size_t eq = lw.find('=');
    if (eq == std::string::npos) {
      throw UsageError("--layer-weight expects name=value, got '" + lw + "'");
    }
    const std::string name = lw.substr(0, eq);
    if (std::find(kStyleLayers.begin(), kStyleLayers.end(), name) == kStyleLayers.end()) {
      throw UsageError("--layer-weight: '" + name + "' is not a style layer");
    }
    const double v = parse_decimal(std::string_view(lw).substr(eq + 1), "--layer-weight");
    if (v < 0.0) throw UsageError("--layer-weight values must be >= 0");
    run.layer_weights[name] = v;
  }

  inv.norm.mean = parse_triple(mean, "--mean");
  inv.norm.std = parse_triple(std, "--std");
  inv.norm.max_dim = size;
  run.mode = mode == "blended" ? MultiStyleMode::kBlended : MultiStyleMode::kSequential;

  const auto parent = inv.out_path.parent_path();
  const auto stem = inv.out_path.stem().string();
  inv.loss_csv = loss_csv.empty() ? parent / (stem + "_losses.csv") : std::filesystem::path(loss_csv);
  inv.snapshot_dir = snapshot_dir.empty() ? parent / (stem + "_snapshots") : std::filesystem::path(snapshot_dir);

  try {
    run.validate();
    inv.norm.validate();
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  return inv;
}

std::string effective_config_line(const CliInvocation& inv) {
  const RunConfig& r = inv.run;
  std::string line = "effective-config:";
  line += " --content " + shell_arg(inv.content_path.string());
  for (std::size_t i = 0; i < inv.styles.size(); ++i) {
    line += " --style " +
            shell_arg(fmt::format("{}:{}", inv.styles[i].path.string(), inv.blend[i]));
  }
  line += " --weights " + shell_arg(inv.weights_path.string());
  line += " --out " + shell_arg(inv.out_path.string());
  line += fmt::format(" --steps {} --lr {} --alpha {} --beta {}", r.steps, r.lr,
                      r.alpha, r.beta);
  for (auto layer : kStyleLayers) {
    auto it = r.layer_weights.find(std::string(layer));
    if (it != r.layer_weights.end()) {
      line += fmt::format(" --layer-weight {}={}", layer, it->second);
    }
  }
  line += fmt::format(" --size {} --mean {} --std {} --mode {} --snapshot-every {}",
                      inv.norm.max_dim, join3(inv.norm.mean), join3(inv.norm.std),
                      to_string(r.mode), r.snapshot_every);
  line += " --snapshot-dir " + shell_arg(inv.snapshot_dir.string());
  line += " --loss-csv " + shell_arg(inv.loss_csv.string());
  line += fmt::format(" --seed {}", r.seed);
  return line;
}

std::filesystem::path snapshot_path(const CliInvocation& inv,
                                    std::optional<std::size_t> stage,
                                    std::size_t step) {
  if (stage) {
    return inv.snapshot_dir / fmt::format("stage_{}", *stage + 1) / step_file(step);
  }
  return inv.snapshot_dir / step_file(step);
}

namespace {

// Names the pipeline stage reported when a runtime error escapes.
struct StageTracker {
  std::string current = "startup";
};

void ensure_parent(const std::filesystem::path& p) {
  const auto parent = p.parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(parent, ec);
  if (ec) throw IoError("cannot create directory " + parent.string() + ": " + ec.message());
}

int run_check_grad(const CliInvocation& inv, std::ostream& out) {
  const GradCheckReport report = run_gradient_check(inv.run.seed);
  for (const auto& s : report.samples) {
    out << fmt::format("pixel {:4d}  analytic {: .10e}  numeric {: .10e}  rel_err {:.3e}\n",
                       s.index, s.analytic, s.numeric, s.rel_error);
  }
  out << fmt::format("gradient check {}: max relative error {:.3e} (tolerance {:.0e})\n",
                     report.passed() ? "PASSED" : "FAILED", report.max_rel_error,
                     report.tolerance);
  return report.passed() ? 0 : 1;
}

int run_transfer(const CliInvocation& inv, StageTracker& stage, std::ostream& out,
                 std::ostream& err) {
  stage.current = "loading weights";
  const VggWeights<float> weights = load_weights(inv.weights_path);

  stage.current = "loading content image";
  const Tensor content = load_normalize(inv.content_path, inv.norm);

  std::vector<StyleSpec<float>> styles;
  for (std::size_t i = 0; i < inv.styles.size(); ++i) {
    stage.current = "loading style image " + inv.styles[i].path.string();
    const Tensor image = load_normalize(inv.styles[i].path, inv.norm);
    stage.current = "precomputing style " + inv.styles[i].path.string();
    styles.push_back(precompute_style(image, weights, inv.styles[i].path.string(),
                                      inv.blend[i]));
  }

  stage.current = "opening loss CSV";
  ensure_parent(inv.loss_csv);
  std::ofstream csv(inv.loss_csv, std::ios::trunc);
  if (!csv) throw IoError("cannot open " + inv.loss_csv.string() + " for writing");
  const bool sequential = inv.run.mode == MultiStyleMode::kSequential;
  csv << (sequential ? "stage," : "") << "step,content_loss,style_loss,total_loss\n";

  const std::size_t steps = inv.run.steps;
  const std::size_t report_every = std::max<std::size_t>(1, inv.run.snapshot_every);
  auto callbacks_for = [&](std::optional<std::size_t> stage_index) {
    RunCallbacks cb;
    cb.on_step = [&, stage_index](const StepRecord& r) {
      if (stage_index) csv << (*stage_index + 1) << ',';
      csv << fmt::format("{},{},{},{}\n", r.step, r.content_loss, r.style_loss,
                         r.total_loss);
      if (r.step == 1 || r.step % report_every == 0 || r.step == steps) {
        err << fmt::format("{}step {}/{}  content={:.6g}  style={:.6g}  total={:.6g}\n",
                           stage_index ? fmt::format("stage {} ", *stage_index + 1) : "",
                           r.step, steps, r.content_loss, r.style_loss, r.total_loss);
      }
    };
    cb.on_snapshot = [&, stage_index](const Snapshot& s) {
      const auto path = snapshot_path(inv, stage_index, s.step);
      ensure_parent(path);
      denormalize_save(s.image, inv.norm, path);
    };
    return cb;
  };

  stage.current = "optimization";
  Tensor final_image;
  if (sequential) {
    std::vector<RunReport> reports;
    try {
      reports = run_sequential(content, styles, inv.run, weights,
                               [&](std::size_t k) { return callbacks_for(k); });
    } catch (const ChainError& e) {
      stage.current = fmt::format("optimization (sequential stage {})", e.stage() + 1);
      csv.flush();
      throw;
    }
    final_image = reports.back().final_image;
  } else {
    final_image = run_single(content, styles, inv.run, weights,
                             callbacks_for(std::nullopt))
                      .final_image;
  }
  csv.close();
  if (!csv) throw IoError("failed writing " + inv.loss_csv.string());

  stage.current = "writing output image";
  ensure_parent(inv.out_path);
  denormalize_save(final_image, inv.norm, inv.out_path);
  out << "wrote " << inv.out_path.string() << '\n';
  return 0;
}

}  // namespace

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliInvocation inv;
  try {
    inv = parse_invocation(args);
  } catch (const HelpRequested& h) {
    out << h.what();
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n"
        << "run with --help for the list of flags\n";
    return 2;
  }

  StageTracker stage;
  try {
    if (inv.check_grad) return run_check_grad(inv, out);
    err << effective_config_line(inv) << '\n';
    return run_transfer(inv, stage, out, err);
  } catch (const std::exception& e) {
    err << "error during " << stage.current << ": " << e.what() << '\n';
    return 1;
  }
}

}  // namespace styleforge::cli
