#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "otbag/ensemble.hpp"

namespace otbag {

// Line-oriented text model format, version 1. Floats are written with the
// shortest representation that round-trips exactly, so a saved and reloaded
// model predicts identically to the original.
//
//   otbag-model v1
//   algorithm otbag|sdmv|jdsmv
//   members M
//   dimension D
//   learning_rate LR
//   <algorithm-specific header lines>
//   h KIND BIAS W0 .. W(D-1)     (M lines; dual models add M matching f lines)
//
// sdmv adds:  surviving I..., fallback_to_f 0|1, ledger_h/ledger_f/ledger_targets
// jdsmv adds: alpha A, eta E, set I... (A-1 lines), target_counts C...,
//             and the same ledger lines. Member indices are 0-based.

void save_model(const AnyModel& model, std::ostream& out);
void save_model(const AnyModel& model, const std::filesystem::path& path);

AnyModel load_model(std::istream& in);
AnyModel load_model(const std::filesystem::path& path);

std::string algorithm_tag(const AnyModel& model);

}  // namespace otbag
