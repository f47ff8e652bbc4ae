#pragma once

#include <string>

#include "critline/functional.hpp"

namespace critline {
namespace presets {

// A fully assembled reproduction input: everything evaluate() needs plus
// the target proportion the inputs are published to achieve, and a note on
// how any ambiguity in the published coefficients was settled.
struct Preset {
  std::string name;
  EvalConfig config;
  MollifierSet mollifier;
  ShiftPolynomialSpec shift;
  double target = 0.0;
  std::string resolution;
};

// Simple-critical-zeros input set (target 0.6044).
const Preset& theorem1_simple();

// All-critical-zeros input set (target 0.6107).
const Preset& theorem1_critical();

}  // namespace presets
}  // namespace critline
