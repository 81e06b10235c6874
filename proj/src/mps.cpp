#include "disagg/mps.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "disagg/errors.hpp"

namespace disagg {

namespace {

std::string num(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string row_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "R%04d", i + 1);
  return buf;
}

std::string col_name(int j) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "C%04d", j + 1);
  return buf;
}

void field(std::ostream& out, const std::string& s, size_t width) {
  out << s;
  for (size_t i = s.size(); i < width; ++i) out << ' ';
}

std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_num(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw IoError("mps: bad numeric field '" + s + "'");
  return v;
}

}  // namespace

void write_mps(const MilpModel& model, const std::string& name, std::ostream& out) {
  const LpModel& lp = model.lp;
  out << "NAME          " << name << "\n";
  out << "ROWS\n";
  out << " N  COST\n";
  std::vector<char> row_type(lp.num_rows());
  for (int i = 0; i < lp.num_rows(); ++i) {
    const auto& r = lp.rows[i];
    char type;
    if (std::isfinite(r.lb) && std::isfinite(r.ub)) {
      if (r.lb != r.ub) throw BuildError("write_mps: ranged rows are outside the dialect");
      type = 'E';
    } else if (std::isfinite(r.ub)) {
      type = 'L';
    } else if (std::isfinite(r.lb)) {
      type = 'G';
    } else {
      throw BuildError("write_mps: free row");
    }
    row_type[i] = type;
    out << ' ' << type << "  " << row_name(i) << "\n";
  }

  // Gather entries column-wise.
  std::vector<std::vector<std::pair<int, double>>> col_entries(lp.num_cols());
  for (int i = 0; i < lp.num_rows(); ++i)
    for (const auto& [j, v] : lp.rows[i].coef) col_entries[j].emplace_back(i, v);

  out << "COLUMNS\n";
  for (int j = 0; j < lp.num_cols(); ++j) {
    std::vector<std::pair<std::string, double>> recs;
    if (lp.obj[j] != 0.0 || col_entries[j].empty()) recs.emplace_back("COST", lp.obj[j]);
    for (const auto& [i, v] : col_entries[j]) recs.emplace_back(row_name(i), v);
    for (size_t r = 0; r < recs.size(); r += 2) {
      out << "    ";
      field(out, col_name(j), 10);
      field(out, recs[r].first, 10);
      if (r + 1 < recs.size()) {
        field(out, num(recs[r].second), 15);
        field(out, recs[r + 1].first, 10);
        out << num(recs[r + 1].second);
      } else {
        out << num(recs[r].second);
      }
      out << "\n";
    }
  }

  out << "RHS\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    const auto& r = lp.rows[i];
    const double rhs = row_type[i] == 'L' ? r.ub : r.lb;
    if (rhs == 0.0) continue;
    out << "    ";
    field(out, "RHS", 10);
    field(out, row_name(i), 10);
    out << num(rhs) << "\n";
  }

  out << "BOUNDS\n";
  for (int j = 0; j < lp.num_cols(); ++j) {
    const double lb = lp.col_lb[j];
    const double ub = lp.col_ub[j];
    auto bound = [&](const char* kind, bool with_value, double v) {
      out << ' ' << kind << ' ';
      field(out, "BND", 10);
      if (with_value) {
        field(out, col_name(j), 10);
        out << num(v);
      } else {
        out << col_name(j);
      }
      out << "\n";
    };
    if (model.is_integer[j] && lb == 0.0 && ub == 1.0) {
      bound("BV", false, 0);
      continue;
    }
    if (model.is_integer[j]) throw BuildError("write_mps: only binary integers are in the dialect");
    if (lb == ub) {
      bound("FX", true, lb);
      continue;
    }
    if (!std::isfinite(lb))
      bound("MI", false, 0);
    else if (lb != 0.0)
      bound("LO", true, lb);
    if (std::isfinite(ub)) bound("UP", true, ub);
  }
  out << "ENDATA\n";
}

MilpModel parse_mps(std::istream& in) {
  MilpModel model;
  LpModel& lp = model.lp;

  enum Section { None, Rows, Columns, Rhs, Bounds, Done } section = None;
  std::map<std::string, int> row_index;  // -1 for the objective row
  std::map<std::string, char> row_types;
  std::map<std::string, int> col_index;
  std::string obj_row;

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '*') continue;
    if (line[0] != ' ') {
      const auto toks = tokens(line);
      if (toks.empty()) continue;
      const std::string& head = toks[0];
      if (head == "NAME")
        section = None;
      else if (head == "ROWS")
        section = Rows;
      else if (head == "COLUMNS")
        section = Columns;
      else if (head == "RHS")
        section = Rhs;
      else if (head == "RANGES")
        throw IoError("mps: RANGES section is outside the dialect");
      else if (head == "BOUNDS")
        section = Bounds;
      else if (head == "ENDATA") {
        section = Done;
        break;
      } else
        throw IoError("mps: unknown section '" + head + "'");
      continue;
    }

    const auto toks = tokens(line);
    if (toks.empty()) continue;
    switch (section) {
      case Rows: {
        if (toks.size() != 2) throw IoError("mps: bad ROWS line");
        const char type = static_cast<char>(std::toupper(toks[0][0]));
        if (type == 'N') {
          if (obj_row.empty()) obj_row = toks[1];
          row_index[toks[1]] = -1;
        } else if (type == 'E' || type == 'L' || type == 'G') {
          row_index[toks[1]] = lp.num_rows();
          row_types[toks[1]] = type;
          const double lb = type == 'L' ? -kInf : 0.0;
          const double ub = type == 'G' ? kInf : 0.0;
          lp.add_row(lb, ub, {});
        } else {
          throw IoError("mps: unknown row type");
        }
        break;
      }
      case Columns: {
        if (toks.size() < 3 || toks.size() % 2 == 0) throw IoError("mps: bad COLUMNS line");
        if (toks[1] == "'MARKER'") break;  // INTORG/INTEND markers unused, binaries come from BOUNDS
        auto it = col_index.find(toks[0]);
        int j;
        if (it == col_index.end()) {
          j = lp.add_col(0.0, kInf, 0.0);
          model.is_integer.push_back(0);
          col_index[toks[0]] = j;
        } else {
          j = it->second;
        }
        for (size_t k = 1; k + 1 < toks.size(); k += 2) {
          const double v = parse_num(toks[k + 1]);
          const auto rit = row_index.find(toks[k]);
          if (rit == row_index.end()) throw IoError("mps: unknown row '" + toks[k] + "'");
          if (rit->second < 0)
            lp.obj[j] = v;
          else
            lp.rows[rit->second].coef.emplace_back(j, v);
        }
        break;
      }
      case Rhs: {
        if (toks.size() < 3 || toks.size() % 2 == 0) throw IoError("mps: bad RHS line");
        for (size_t k = 1; k + 1 < toks.size(); k += 2) {
          const auto rit = row_index.find(toks[k]);
          if (rit == row_index.end() || rit->second < 0) throw IoError("mps: RHS for unknown row");
          const double v = parse_num(toks[k + 1]);
          auto& row = lp.rows[rit->second];
          switch (row_types[toks[k]]) {
            case 'E':
              row.lb = row.ub = v;
              break;
            case 'L':
              row.ub = v;
              break;
            case 'G':
              row.lb = v;
              break;
          }
        }
        break;
      }
      case Bounds: {
        if (toks.size() < 3) throw IoError("mps: bad BOUNDS line");
        const std::string kind = toks[0];
        const auto cit = col_index.find(toks[2]);
        if (cit == col_index.end()) throw IoError("mps: bound for unknown column '" + toks[2] + "'");
        const int j = cit->second;
        if (kind == "BV") {
          lp.col_lb[j] = 0.0;
          lp.col_ub[j] = 1.0;
          model.is_integer[j] = 1;
        } else if (kind == "FR") {
          lp.col_lb[j] = -kInf;
          lp.col_ub[j] = kInf;
        } else if (kind == "MI") {
          lp.col_lb[j] = -kInf;
        } else if (kind == "PL") {
          lp.col_ub[j] = kInf;
        } else {
          if (toks.size() < 4) throw IoError("mps: bound needs a value");
          const double v = parse_num(toks[3]);
          if (kind == "UP")
            lp.col_ub[j] = v;
          else if (kind == "LO")
            lp.col_lb[j] = v;
          else if (kind == "FX")
            lp.col_lb[j] = lp.col_ub[j] = v;
          else
            throw IoError("mps: unknown bound kind '" + kind + "'");
        }
        break;
      }
      default:
        break;
    }
  }
  if (section != Done) throw IoError("mps: missing ENDATA");
  for (auto& row : lp.rows) std::sort(row.coef.begin(), row.coef.end());
  return model;
}

void export_mps(const MilpInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("export_mps: cannot open '" + path + "'");
  write_mps(inst.model, "DISAGG", out);
  if (!out) throw IoError("export_mps: write failed for '" + path + "'");
}

MilpModel parse_mps_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("parse_mps_file: cannot open '" + path + "'");
  return parse_mps(in);
}

std::string diff_models(const MilpModel& a, const MilpModel& b) {
  std::ostringstream os;
  if (a.lp.num_cols() != b.lp.num_cols()) {
    os << "column count " << a.lp.num_cols() << " vs " << b.lp.num_cols();
    return os.str();
  }
  if (a.lp.num_rows() != b.lp.num_rows()) {
    os << "row count " << a.lp.num_rows() << " vs " << b.lp.num_rows();
    return os.str();
  }
  for (int j = 0; j < a.lp.num_cols(); ++j) {
    if (a.lp.obj[j] != b.lp.obj[j] || a.lp.col_lb[j] != b.lp.col_lb[j] || a.lp.col_ub[j] != b.lp.col_ub[j] ||
        a.is_integer[j] != b.is_integer[j]) {
      os << "column " << j << " differs";
      return os.str();
    }
  }
  for (int i = 0; i < a.lp.num_rows(); ++i) {
    const auto& ra = a.lp.rows[i];
    const auto& rb = b.lp.rows[i];
    if (ra.lb != rb.lb || ra.ub != rb.ub || ra.coef != rb.coef) {
      os << "row " << i << " differs";
      return os.str();
    }
  }
  return {};
}

}  // namespace disagg
