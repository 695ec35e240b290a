#pragma once

#include <map>
#include <string>

#include "tidyloop/world.hpp"

namespace tidyloop {

// Knobs for the generated occlusion suite. The visibility fractions shape
// the answerability ordering: every attribute is visible from its scripted
// best angle, a middling share from the front, a small share from the scene.
struct SuiteParams {
  int n_objects = 20;
  unsigned seed = 7;
  int iterations = 5;
  double scene_visible_fraction = 0.32;
  double front_visible_fraction = 0.65;
};

struct SyntheticSuite {
  WorldSpec world;
  std::map<std::string, std::string> llm_fixtures;  // llm.json
  // mode name -> overlay entries (llm.<mode>.json)
  std::map<std::string, std::map<std::string, std::string>> mode_overlays;
  int scene_visible_count = 0;
  int front_visible_count = 0;
};

// Deterministic for a given parameter set. Each object carries exactly one
// decision-critical attribute; its benchmark question is correct iff the
// decision tracks the attribute's truth, which a mode can only learn by
// getting a non-UNKNOWN answer.
SyntheticSuite make_synthetic_suite(const SuiteParams& params);

// Writes out_dir/manifests/synthetic.json plus out_dir/fixtures/llm.json and
// the per-mode overlay files.
void write_synthetic_suite(const SyntheticSuite& suite,
                           const std::string& out_dir);

}  // namespace tidyloop
