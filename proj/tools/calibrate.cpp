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

// Prints count_params for every architecture and preset next to its target,
// or evaluates one architecture with attr overrides (key=value, lists as
// comma-separated integers).

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nnuzoo/models/model.hpp"

using namespace nnuzoo;

namespace {

void apply_override(ModelConfig& cfg, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) throw ValueError("override '" + kv + "' is not key=value");
  const auto key = kv.substr(0, eq), val = kv.substr(eq + 1);
  if (val.find(',') != std::string::npos) {
    std::vector<std::int64_t> v;
    std::size_t pos = 0;
    while (pos <= val.size()) {
      const auto next = val.find(',', pos);
      v.push_back(std::stoll(val.substr(pos, next - pos)));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    cfg.attrs.set(key, v);
  } else if (val.find('.') != std::string::npos) {
    cfg.attrs.set(key, std::stod(val));
  } else {
    cfg.attrs.set(key, static_cast<std::int64_t>(std::stoll(val)));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter-count calibration table"};
  std::string arch_opt;
  std::vector<std::string> overrides;
  app.add_option("--arch", arch_opt, "Only this architecture");
  app.add_option("--set", overrides, "Attr override key=value (repeatable)");
  CLI11_PARSE(app, argc, argv);

  std::vector<ArchitectureId> archs = all_architectures();
  if (!arch_opt.empty()) archs = {arch_from_name(arch_opt)};
  std::printf("%-12s %-11s %10s %8s %8s\n", "arch", "preset", "params", "target", "ratio");
  for (auto arch : archs) {
    for (const auto& preset : preset_names()) {
      const auto target = target_params_millions(arch, preset);
      if (!target) continue;
      auto cfg = preset_config(arch, preset);
      for (const auto& kv : overrides) apply_override(cfg, kv);
      rebuild_stage_plan(cfg);
      const double m = static_cast<double>(count_params(cfg)) / 1e6;
      std::printf("%-12s %-11s %9.3fM %7.2fM %8.3f\n", arch_name(arch).c_str(), preset.c_str(), m, *target,
                  m / *target);
    }
  }
  return 0;
}
