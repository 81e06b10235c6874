#pragma once

#include <iosfwd>
#include <string>

#include "disagg/master.hpp"
#include "disagg/milp.hpp"

namespace disagg {

// Fixed-format MPS (NAME/ROWS/COLUMNS/RHS/BOUNDS/ENDATA), deterministic
// naming: objective row COST, constraint rows R0001..., columns C0001...,
// binaries as BV bound rows. Values are written in shortest round-trip form
// so a write/parse cycle reproduces the model exactly. Ranged rows are not
// part of the dialect; see docs/mps.md.
void write_mps(const MilpModel& model, const std::string& name, std::ostream& out);

MilpModel parse_mps(std::istream& in);

void export_mps(const MilpInstance& inst, const std::string& path);
MilpModel parse_mps_file(const std::string& path);

// Empty string when the two models match column for column and row for row;
// otherwise a short description of the first difference.
std::string diff_models(const MilpModel& a, const MilpModel& b);

}  // namespace disagg
